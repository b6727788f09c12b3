import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qif.cli import (EXIT_FILE, EXIT_IMPOSSIBLE, EXIT_OK, EXIT_PROGRAM, EXIT_SCENARIO,
                     EXIT_USAGE, main)
from qif.scenario import (Scenario, ScenarioError, load_scenario, parse_scenario,
                          serialize_scenario)

ROOT = Path(__file__).resolve().parent.parent
SCEN = ROOT / "scenarios"


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_scenario(tmp_path, body, program="pwc.qif"):
    (tmp_path / program).write_text((SCEN / "pwc.qif").read_text())
    path = tmp_path / "s.scenario"
    path.write_text(body)
    return path


# ---- scenario files --------------------------------------------------------


def test_load_pwc_scenario():
    s = load_scenario(SCEN / "pwc.scenario")
    assert s.reality == ("C",)
    assert s.low_input == {"g": "A"}
    assert s.prebelief == {("A",): Fraction(98, 100), ("B",): Fraction(1, 100), ("C",): Fraction(1, 100)}
    assert s.observation == {"a": "0"}
    assert s.epsilon == Fraction(3, 100)
    e = s.experiment()
    assert e.prebelief.probs == (Fraction(49, 50), Fraction(1, 100), Fraction(1, 100))


def test_tuple_states_and_rationals():
    s = parse_scenario("program = x.qif\nreality = (A, 0)\nbelief.(A, 0) = 1/3\nbelief.A,1 = 2/3\n")
    assert s.reality == ("A", "0")
    assert s.prebelief == {("A", "0"): Fraction(1, 3), ("A", "1"): Fraction(2, 3)}


@pytest.mark.parametrize(
    "text",
    [
        "reality = C\nbelief.C = 1\n",
        "program = p.qif\nbelief.C = 1\n",
        "program = p.qif\nreality = C\n",
        "program = p.qif\nreality = C\nbelief.C = 2\n",
        "program = p.qif\nreality = C\nbelief.C = 1\nbelief.C = 1\n",
        "program = p.qif\nreality = C\nbelief.C = 1\nfoo = 1\n",
        "program = p.qif\nreality = C\nbelief.C = 1\nepsilon = 0\n",
        "program = p.qif\nreality = C\nbelief.C = 1\nnonsense\n",
        "program = p.qif\nreality = C\nbelief.C = abc\n",
    ],
)
def test_scenario_syntax_errors(text):
    with pytest.raises(ScenarioError):
        parse_scenario(text)


tokens = st.sampled_from(["A", "B", "C", "0", "1"])
probs = st.fractions(0, 1, max_denominator=1000)


@given(
    st.dictionaries(st.tuples(tokens), probs, min_size=1, max_size=3),
    st.tuples(tokens),
    st.dictionaries(st.sampled_from(["g", "h"]), tokens),
    st.none() | st.dictionaries(st.sampled_from(["a", "b"]), tokens, min_size=1),
    st.none() | st.fractions(Fraction(1, 1000), 10),
)
def test_scenario_round_trip(prebelief, reality, low, obs, eps):
    s = Scenario("prog.qif", prebelief, reality, low, obs, eps)
    back = parse_scenario(serialize_scenario(s))
    assert back == s
    assert all(isinstance(p, Fraction) for p in back.prebelief.values())


def test_scenario_normalization_tolerance(tmp_path):
    near = write_scenario(tmp_path, "program = pwc.qif\nreality = C\nlow.g = A\n"
                          "belief.A = 0.3333333333\nbelief.B = 0.3333333333\nbelief.C = 0.3333333334\n")
    assert sum(load_scenario(near).experiment().prebelief.probs) == 1
    far = write_scenario(tmp_path, "program = pwc.qif\nreality = C\nlow.g = A\n"
                         "belief.A = 0.5\nbelief.B = 0.2\nbelief.C = 0.2\n")
    with pytest.raises(ScenarioError, match="does not normalize"):
        load_scenario(far).experiment()


# ---- analyze -----------------------------------------------------------------


def test_analyze_pwc(capsys):
    code, out, _ = run_cli(capsys, "analyze", SCEN / "pwc.scenario")
    assert code == EXIT_OK
    q_line = next(l for l in out.splitlines() if l.startswith("Q   accuracy gain"))
    q2_line = next(l for l in out.splitlines() if l.startswith("Q'' refined"))
    assert abs(float(q_line.split()[4]) - 5.6438) <= 5e-4
    assert abs(float(q2_line.split()[4]) - 0.9044) <= 5e-4
    assert "postbelief" in out and "A=0, B=1/2, C=1/2" in out


def test_analyze_machine(capsys):
    code, out, _ = run_cli(capsys, "analyze", SCEN / "pwc.scenario", "--machine")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["q"] == pytest.approx(math.log2(50))
    assert data["q_double_prime"] == pytest.approx(0.9044, abs=5e-4)
    assert data["range_q"] == ["-inf", pytest.approx(-math.log2(0.01))]
    assert data["search_q"]["space"] is None
    assert data["postbelief"] == {"A": "0", "B": "1/2", "C": "1/2"}


def test_analyze_ppwc_postbelief(capsys):
    code, out, _ = run_cli(capsys, "analyze", SCEN / "ppwc.scenario")
    assert code == EXIT_OK
    assert "A=1/199, B=99/199, C=99/199" in out


def test_enumerate_observations(capsys):
    code, out, _ = run_cli(capsys, "analyze", SCEN / "ppwc.scenario", "--enumerate-observations",
                           "--machine")
    assert code == EXIT_OK
    data = json.loads(out)
    assert [d["observation_probability"] for d in data] == ["99/100", "1/100"]
    assert [d["observation"] for d in data] == [{"a": "0"}, {"a": "1"}]


def test_exit_codes(tmp_path, capsys):
    bad_norm = write_scenario(tmp_path, "program = pwc.qif\nreality = C\nlow.g = A\n"
                              "belief.A = 0.5\nbelief.B = 0.2\nbelief.C = 0.2\n")
    code, _, err = run_cli(capsys, "analyze", bad_norm)
    assert code == EXIT_SCENARIO and "prebelief does not normalize" in err

    impossible = write_scenario(tmp_path, "program = pwc.qif\nreality = C\nlow.g = A\n"
                                "belief.A = 1\nobserve.a = 0\n")
    code, _, err = run_cli(capsys, "analyze", impossible)
    assert code == EXIT_IMPOSSIBLE and "probability 0" in err

    code, _, _ = run_cli(capsys, "analyze", tmp_path / "missing.scenario")
    assert code == EXIT_FILE

    no_prog = tmp_path / "np.scenario"
    no_prog.write_text("program = nowhere.qif\nreality = C\nbelief.C = 1\n")
    assert run_cli(capsys, "analyze", no_prog)[0] == EXIT_FILE

    (tmp_path / "broken.qif").write_text("high p in {A}; if then")
    broken = tmp_path / "b.scenario"
    broken.write_text("program = broken.qif\nreality = A\nbelief.A = 1\n")
    assert run_cli(capsys, "analyze", broken)[0] == EXIT_PROGRAM

    outside = write_scenario(tmp_path, "program = pwc.qif\nreality = D\nlow.g = A\nbelief.A = 1\n")
    assert run_cli(capsys, "analyze", outside)[0] == EXIT_SCENARIO

    with pytest.raises(SystemExit) as info:
        main(["sweep", "--kind", "nope", "--steps", "3"])
    assert info.value.code == EXIT_USAGE
    capsys.readouterr()
    assert run_cli(capsys, "sweep", "--kind", "disc", "--steps", "1")[0] == EXIT_USAGE


# ---- check -------------------------------------------------------------------


def test_check_pwc(capsys):
    code, out, _ = run_cli(capsys, "check", SCEN / "pwc.scenario")
    assert code == EXIT_OK
    assert "Q: NOT size-consistent" in out
    assert "Q'': size-consistent" in out
    assert "R: size-consistent" in out
    assert "admissible" in out and "NOT admissible" not in out


def test_check_uniform_admissible(capsys):
    code, out, _ = run_cli(capsys, "check", SCEN / "ppwc.scenario", "--epsilon", "1")
    assert code == EXIT_OK and ": admissible" in out


def test_check_zero_entry_inadmissible(tmp_path, capsys):
    path = write_scenario(tmp_path, "program = pwc.qif\nreality = C\nlow.g = A\n"
                          "belief.B = 0.5\nbelief.C = 0.5\n")
    for eps in ("1", "0.000001", "1/1000000000"):
        code, out, _ = run_cli(capsys, "check", path, "--epsilon", eps)
        assert code == EXIT_OK and "NOT admissible" in out


# ---- sweep -------------------------------------------------------------------


def _table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_sweep_metric_row(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--kind", "metric", "--steps", "101")
    assert code == EXIT_OK
    header, rows = _table(out)
    assert header == ["post", "Q", "Q''", "+eta", "-eta"]
    row = next(r for r in rows if r[0] == 0.5)
    assert row[1] == pytest.approx(5.6438, abs=5e-4)
    assert row[2] == pytest.approx(0.9044, abs=5e-4)
    assert rows[0][1] == -math.inf
    assert all(-r[3] <= r[2] <= r[3] for r in rows)


def test_sweep_disc(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--kind", "disc", "--steps", "100")
    header, rows = _table(out)
    assert header == ["t", "I_Dis", "I_Dis_half", "I'_Dis", "I''_Dis"]
    assert len(rows) == 100 and rows[0][0] > 0 and rows[-1][0] == 1
    mid = next(r for r in rows if r[0] == 0.5)
    assert mid[1:] == [0, 0, 0, 0]
    assert all(r[3] <= r[1] / 2 for r in rows)


def test_sweep_div(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--kind", "div", "--steps", "11")
    header, rows = _table(out)
    assert header == ["t", "D", "D'"]
    assert rows[0][1] == math.inf and rows[0][2] == 1.0
    assert rows[-1][1] == 0 and rows[-1][2] == 0
    assert all(0 <= r[2] <= 1 for r in rows)


def test_sweep_lf_line_endings(capsys):
    _, out, _ = run_cli(capsys, "sweep", "--kind", "div", "--steps", "3")
    assert "\r" not in out and out.endswith("\n")


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "qif", "sweep", "--kind", "disc", "--steps", "100"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first.startswith(b"t,")
