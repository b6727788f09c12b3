"""Front end for the tiny probabilistic imperative language.

Concrete syntax::

    high p in {A, B, C};
    low g in {A, B, C};
    output a in {0, 1};
    if p == g then
        pchoice 0.99 { a := 1 } { a := 0 }
    else
        a := 0
    end

Declarations come first, each terminated by ``;``.  Statements are
``skip``, ``x := v``, ``s1; s2``, ``if c then s [else s] end``,
``pchoice r { s } { s }`` and ``{ s }`` for grouping.  Conditions combine
``x == v`` / ``x == y`` atoms with ``and``, ``or``, ``not`` and
parentheses.  ``#`` starts a comment running to the end of the line.

Probabilities are read as exact rationals (``0.99`` or ``99/100``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

HIGH = "high"
LOW = "low"
OUTPUT = "output"
CLASSES = (HIGH, LOW, OUTPUT)

KEYWORDS = frozenset(
    {"high", "low", "output", "in", "skip", "if", "then", "else", "end",
     "pchoice", "and", "or", "not"}
)


class ProgramError(ValueError):
    """Base class for every rejection of a program text or AST."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


class ParseError(ProgramError):
    """Malformed concrete syntax."""


class UndeclaredVariable(ProgramError):
    pass


class DomainError(ProgramError):
    """A value literal outside the domain of the variable it meets."""


class ProbabilityError(ProgramError):
    """A ``pchoice`` probability outside the open interval (0, 1)."""


class DuplicateDeclaration(ProgramError):
    pass


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class VarDecl:
    name: str
    domain: tuple[str, ...]
    cls: str

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise ProgramError(f"unknown security class {self.cls!r}")
        if not self.domain:
            raise DomainError(f"variable {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise DomainError(f"variable {self.name!r} has duplicate domain values")


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    value: str


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class If:
    cond: "Cond"
    then: "Stmt"
    orelse: "Stmt"


@dataclass(frozen=True)
class PChoice:
    """Run ``left`` with probability ``prob``, otherwise ``right``."""

    prob: Fraction
    left: "Stmt"
    right: "Stmt"


Stmt = Union[Skip, Assign, Seq, If, PChoice]


@dataclass(frozen=True)
class EqValue:
    var: str
    value: str


@dataclass(frozen=True)
class EqVar:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    arg: "Cond"


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"


Cond = Union[EqValue, EqVar, Not, And, Or]


@dataclass(frozen=True)
class Program:
    decls: tuple[VarDecl, ...]
    body: Stmt

    def __post_init__(self):
        object.__setattr__(self, "decls", tuple(self.decls))
        validate(self)

    @property
    def variables(self) -> dict[str, VarDecl]:
        return {d.name: d for d in self.decls}

    def of_class(self, cls: str) -> list[VarDecl]:
        return [d for d in self.decls if d.cls == cls]

    @property
    def high(self) -> list[VarDecl]:
        return self.of_class(HIGH)

    @property
    def low(self) -> list[VarDecl]:
        return self.of_class(LOW)

    @property
    def outputs(self) -> list[VarDecl]:
        return self.of_class(OUTPUT)


# --------------------------------------------------------------------------
# validation


def validate(program: Program) -> None:
    seen: dict[str, VarDecl] = {}
    for d in program.decls:
        if d.name in seen:
            raise DuplicateDeclaration(f"variable {d.name!r} declared twice")
        seen[d.name] = d
    _check_stmt(program.body, seen)


def _lookup(name: str, decls: dict[str, VarDecl]) -> VarDecl:
    try:
        return decls[name]
    except KeyError:
        raise UndeclaredVariable(f"undeclared variable {name!r}") from None


def _check_value(decl: VarDecl, value: str) -> None:
    if value not in decl.domain:
        raise DomainError(
            f"value {value!r} is not in the domain of {decl.name!r} "
            f"{{{', '.join(decl.domain)}}}"
        )


def _check_stmt(s: Stmt, decls: dict[str, VarDecl]) -> None:
    if isinstance(s, Skip):
        return
    if isinstance(s, Assign):
        _check_value(_lookup(s.var, decls), s.value)
    elif isinstance(s, Seq):
        _check_stmt(s.first, decls)
        _check_stmt(s.second, decls)
    elif isinstance(s, If):
        _check_cond(s.cond, decls)
        _check_stmt(s.then, decls)
        _check_stmt(s.orelse, decls)
    elif isinstance(s, PChoice):
        if not 0 < s.prob < 1:
            raise ProbabilityError(f"pchoice probability {s.prob} is not strictly between 0 and 1")
        _check_stmt(s.left, decls)
        _check_stmt(s.right, decls)
    else:
        raise TypeError(f"not a statement: {s!r}")


def _check_cond(c: Cond, decls: dict[str, VarDecl]) -> None:
    if isinstance(c, EqValue):
        _check_value(_lookup(c.var, decls), c.value)
        if c.value in decls:
            # would read back as a variable comparison
            raise ProgramError(f"value {c.value!r} in a condition shadows a variable name")
    elif isinstance(c, EqVar):
        _lookup(c.left, decls)
        _lookup(c.right, decls)
    elif isinstance(c, Not):
        _check_cond(c.arg, decls)
    elif isinstance(c, (And, Or)):
        _check_cond(c.left, decls)
        _check_cond(c.right, decls)
    else:
        raise TypeError(f"not a condition: {c!r}")


# --------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+/\d+|\d+\.\d+)
  | (?P<word>[A-Za-z0-9_]+)
  | (?P<sym>:=|==|[;{}(),])
  | (?P<bad>.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "number", "word", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def tokenize(source: str) -> Iterator[Token]:
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(source):
        kind, text = m.lastgroup, m.group()
        col = m.start() - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            continue
        elif kind == "bad":
            raise ParseError(f"unexpected character {text!r}", line, col)
        else:
            if kind == "word" and text in KEYWORDS:
                kind = "kw"
            yield Token(kind, text, line, col)
    yield Token("eof", "", line, len(source) - line_start + 1)


# --------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, source: str):
        self.toks = list(tokenize(source))
        self.i = 0
        self.decls: dict[str, VarDecl] = {}

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "sym") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "word" or not (tok.text[0].isalpha() or tok.text[0] == "_"):
            raise self.error(f"expected an identifier, found {tok.text or 'end of input'!r}")
        return self.advance()

    def value(self) -> Token:
        if self.tok.kind != "word":
            raise self.error(f"expected a value, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def var(self) -> tuple[VarDecl, Token]:
        tok = self.ident()
        if tok.text not in self.decls:
            raise self.error(f"undeclared variable {tok.text!r}", tok, UndeclaredVariable)
        return self.decls[tok.text], tok

    def check_value(self, decl: VarDecl, tok: Token) -> None:
        if tok.text not in decl.domain:
            raise self.error(
                f"value {tok.text!r} is not in the domain of {decl.name!r}", tok, DomainError
            )

    # program := decl* stmt
    def program(self) -> Program:
        decls = []
        while self.tok.kind == "kw" and self.tok.text in CLASSES:
            decls.append(self.decl())
        if not decls:
            raise self.error("a program must declare at least one variable")
        body = self.stmt()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after end of program")
        return Program(tuple(decls), body)

    def decl(self) -> VarDecl:
        cls = self.advance().text
        name = self.ident()
        if name.text in self.decls:
            raise self.error(f"variable {name.text!r} declared twice", name, DuplicateDeclaration)
        self.expect("in")
        self.expect("{")
        values = [self.value()]
        while self.at(","):
            self.advance()
            values.append(self.value())
        self.expect("}")
        self.expect(";")
        texts = [v.text for v in values]
        for k, v in enumerate(values):
            if v.text in texts[:k]:
                raise self.error(f"duplicate value {v.text!r} in domain of {name.text!r}", v, DomainError)
        decl = VarDecl(name.text, tuple(texts), cls)
        self.decls[decl.name] = decl
        return decl

    # stmt := simple (';' simple)*   (right-nested)
    def stmt(self) -> Stmt:
        first = self.simple()
        if self.at(";"):
            self.advance()
            return Seq(first, self.stmt())
        return first

    def simple(self) -> Stmt:
        tok = self.tok
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("if"):
            self.advance()
            cond = self.cond()
            self.expect("then")
            then = self.stmt()
            orelse: Stmt = Skip()
            if self.at("else"):
                self.advance()
                orelse = self.stmt()
            self.expect("end")
            return If(cond, then, orelse)
        if self.at("pchoice"):
            self.advance()
            prob = self.probability()
            self.expect("{")
            left = self.stmt()
            self.expect("}")
            self.expect("{")
            right = self.stmt()
            self.expect("}")
            return PChoice(prob, left, right)
        if self.at("{"):
            self.advance()
            inner = self.stmt()
            self.expect("}")
            return inner
        if tok.kind == "word":
            decl, _ = self.var()
            self.expect(":=")
            val = self.value()
            self.check_value(decl, val)
            return Assign(decl.name, val.text)
        raise self.error(f"expected a statement, found {tok.text or 'end of input'!r}")

    def probability(self) -> Fraction:
        tok = self.tok
        if tok.kind not in ("number", "word") or not tok.text[0].isdigit():
            raise self.error(f"expected a probability, found {tok.text or 'end of input'!r}")
        self.advance()
        try:
            p = Fraction(tok.text)
        except (ValueError, ZeroDivisionError):
            raise self.error(f"malformed probability {tok.text!r}", tok) from None
        if not 0 < p < 1:
            raise self.error(f"pchoice probability {tok.text} is not strictly between 0 and 1",
                             tok, ProbabilityError)
        return p

    # cond := conj ('or' conj)*
    def cond(self) -> Cond:
        c = self.conj()
        while self.at("or"):
            self.advance()
            c = Or(c, self.conj())
        return c

    def conj(self) -> Cond:
        c = self.neg()
        while self.at("and"):
            self.advance()
            c = And(c, self.neg())
        return c

    def neg(self) -> Cond:
        if self.at("not"):
            self.advance()
            return Not(self.neg())
        if self.at("("):
            self.advance()
            c = self.cond()
            self.expect(")")
            return c
        decl, _ = self.var()
        self.expect("==")
        rhs = self.value()
        # a declared variable name on the right wins over a value literal
        if rhs.text in self.decls:
            return EqVar(decl.name, rhs.text)
        self.check_value(decl, rhs)
        return EqValue(decl.name, rhs.text)


def parse_program(source: str) -> Program:
    """Parse and validate program text.

    Raises a :class:`ProgramError` subclass carrying line and column.
    """
    return _Parser(source).program()


# --------------------------------------------------------------------------
# printing


def pretty_print(program: Program) -> str:
    lines = [f"{d.cls} {d.name} in {{{', '.join(d.domain)}}};" for d in program.decls]
    lines.append(_fmt_stmt(program.body, 0))
    return "\n".join(lines) + "\n"


def _fmt_prob(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def _fmt_stmt(s: Stmt, indent: int) -> str:
    pad = "    " * indent
    if isinstance(s, Skip):
        return pad + "skip"
    if isinstance(s, Assign):
        return f"{pad}{s.var} := {s.value}"
    if isinstance(s, Seq):
        first = _fmt_stmt(s.first, indent)
        if isinstance(s.first, Seq):
            first = f"{pad}{{\n{_fmt_stmt(s.first, indent + 1)}\n{pad}}}"
        return f"{first};\n{_fmt_stmt(s.second, indent)}"
    if isinstance(s, If):
        return (
            f"{pad}if {_fmt_cond(s.cond)} then\n{_fmt_stmt(s.then, indent + 1)}\n"
            f"{pad}else\n{_fmt_stmt(s.orelse, indent + 1)}\n{pad}end"
        )
    if isinstance(s, PChoice):
        return (
            f"{pad}pchoice {_fmt_prob(s.prob)} {{\n{_fmt_stmt(s.left, indent + 1)}\n"
            f"{pad}}} {{\n{_fmt_stmt(s.right, indent + 1)}\n{pad}}}"
        )
    raise TypeError(f"not a statement: {s!r}")


def _fmt_cond(c: Cond) -> str:
    if isinstance(c, EqValue):
        return f"{c.var} == {c.value}"
    if isinstance(c, EqVar):
        return f"{c.left} == {c.right}"
    if isinstance(c, Not):
        return f"not {_fmt_operand(c.arg)}"
    op = "and" if isinstance(c, And) else "or"
    return f"{_fmt_operand(c.left)} {op} {_fmt_operand(c.right)}"


def _fmt_operand(c: Cond) -> str:
    text = _fmt_cond(c)
    return f"({text})" if isinstance(c, (And, Or)) else text


# --------------------------------------------------------------------------
# queries


def eta(program: Program) -> float:
    """Size of the secret input in bits: log2 of the joint high-domain size."""
    high = program.high
    if not high:
        raise ProgramError("program declares no high variable")
    return sum(math.log2(len(d.domain)) for d in high)


def count_pchoices(s: Stmt) -> int:
    if isinstance(s, PChoice):
        return 1 + count_pchoices(s.left) + count_pchoices(s.right)
    if isinstance(s, Seq):
        return count_pchoices(s.first) + count_pchoices(s.second)
    if isinstance(s, If):
        return count_pchoices(s.then) + count_pchoices(s.orelse)
    return 0


def is_deterministic(program: Program) -> bool:
    return count_pchoices(program.body) == 0


def outputs_read_before_written(program: Program) -> set[str]:
    """Output variables that some path may read before assigning.

    Their initial value is arbitrary, so such reads make results depend on
    the fixed initialization used by the likelihood computation.
    """
    outputs = {d.name for d in program.outputs}
    bad: set[str] = set()

    def reads(c: Cond) -> set[str]:
        if isinstance(c, EqValue):
            return {c.var}
        if isinstance(c, EqVar):
            return {c.left, c.right}
        if isinstance(c, Not):
            return reads(c.arg)
        return reads(c.left) | reads(c.right)

    # returns the set of outputs definitely written after s
    def walk(s: Stmt, written: frozenset[str]) -> frozenset[str]:
        if isinstance(s, Assign):
            return written | {s.var}
        if isinstance(s, Seq):
            return walk(s.second, walk(s.first, written))
        if isinstance(s, If):
            bad.update((reads(s.cond) & outputs) - written)
            return walk(s.then, written) & walk(s.orelse, written)
        if isinstance(s, PChoice):
            return walk(s.left, written) & walk(s.right, written)
        return written

    walk(program.body, frozenset())
    return bad
