"""Run the password-checker experiments and print their flow reports.

    python3 scripts/worked_example.py
"""

from pathlib import Path

from qif.cli import render_report
from qif.metrics import analyze
from qif.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main() -> None:
    for name in ("pwc", "ppwc", "ppwc_misinform"):
        s = load_scenario(SCENARIOS / f"{name}.scenario")
        print(f"== {name}")
        print(render_report(analyze(s.experiment(), s.observation)))


if __name__ == "__main__":
    main()
