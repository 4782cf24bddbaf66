"""Terms, identities and clauses: AST, parser and canonical printer.

Surface grammar::

    term   := var | "bot" | "top" | "~" term | term "/\\" term
            | term "\\/" term | term "*" | "(" term ")"
    ident  := term "=" term | term "<=" term
    clause := ("true" | ident {"," ident}) "=>" ("false" | ident {"|" ident})
            | ident                      (short for "true => ident")

Postfix ``*`` binds tightest, then prefix ``~``, then ``/\\``, then ``\\/``.
Binary operators associate to the left.  ``s <= t`` is stored as
``s /\\ t = s``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .errors import ClauseSyntaxError

KEYWORDS = {"bot", "top", "true", "false"}

# op name -> (arity, printed symbol)
OPERATIONS = {
    "meet": (2, "/\\"),
    "join": (2, "\\/"),
    "neg": (1, "~"),
    "star": (1, "*"),
    "bot": (0, "bot"),
    "top": (0, "top"),
}

_PREC = {"join": 1, "meet": 2, "neg": 3, "star": 4}
_ATOM = 5


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        return print_term(self)


Term = Var | App


def var(name: str) -> Var:
    return Var(name)


def meet(a: Term, b: Term) -> App:
    return App("meet", (a, b))


def join(a: Term, b: Term) -> App:
    return App("join", (a, b))


def neg(a: Term) -> App:
    return App("neg", (a,))


def star(a: Term) -> App:
    return App("star", (a,))


BOT = App("bot")
TOP = App("top")


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return print_identity(self)

    def variables(self) -> set[str]:
        return term_variables(self.lhs) | term_variables(self.rhs)


def leq(a: Term, b: Term) -> Identity:
    """The order sugar ``a <= b``, i.e. ``a /\\ b = a``."""
    return Identity(meet(a, b), a)


def _normalize(idents) -> tuple:
    return tuple(sorted(set(idents), key=print_identity))


@dataclass(frozen=True)
class Clause:
    premises: tuple = ()
    conclusions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "premises", _normalize(self.premises))
        object.__setattr__(self, "conclusions", _normalize(self.conclusions))

    @property
    def is_quasi_identity(self) -> bool:
        return len(self.conclusions) == 1

    @property
    def is_negative(self) -> bool:
        return not self.conclusions

    @property
    def is_positive(self) -> bool:
        return not self.premises

    def variables(self) -> list[str]:
        names: set[str] = set()
        for ident in self.premises + self.conclusions:
            names |= ident.variables()
        return sorted(names)

    def operations(self) -> set[str]:
        ops: set[str] = set()
        for ident in self.premises + self.conclusions:
            ops |= term_operations(ident.lhs) | term_operations(ident.rhs)
        return ops

    def __str__(self) -> str:
        return print_clause(self)


def term_variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_variables(a)
    return out


def term_operations(t: Term) -> set[str]:
    if isinstance(t, Var):
        return set()
    out = {t.op}
    for a in t.args:
        out |= term_operations(a)
    return out


# ---------------------------------------------------------------- printing

def _prec(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return _ATOM
    return _PREC.get(t.op, _ATOM)


def _wrap(t: Term, need: int) -> str:
    s = print_term(t)
    return f"({s})" if _prec(t) < need else s


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.op in ("bot", "top") and not t.args:
        return t.op
    if t.op == "neg":
        return "~" + _wrap(t.args[0], _PREC["neg"])
    if t.op == "star":
        return _wrap(t.args[0], _PREC["star"]) + "*"
    if t.op in ("meet", "join"):
        p = _PREC[t.op]
        sym = OPERATIONS[t.op][1]
        return f"{_wrap(t.args[0], p)} {sym} {_wrap(t.args[1], p + 1)}"
    # operations outside the grammar are printed functionally
    return f"{t.op}({', '.join(print_term(a) for a in t.args)})"


def print_identity(e: Identity) -> str:
    return f"{print_term(e.lhs)} = {print_term(e.rhs)}"


def print_clause(c: Clause) -> str:
    lhs = ", ".join(print_identity(e) for e in c.premises) or "true"
    rhs = " | ".join(print_identity(e) for e in c.conclusions) or "false"
    return f"{lhs} => {rhs}"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(=>)|(<=)|(/\\)|(\\/)|([a-zA-Z][a-zA-Z0-9_]*)|([~*()=,|]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ClauseSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        val = m.group(m.lastindex)
        kind = "ident" if m.lastindex == 5 else val
        toks.append((kind, val, start))
        pos = m.end()
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ClauseSyntaxError(msg, self.text, tok[2])

    def expect(self, kind: str, what: str):
        tok = self.peek()
        if tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            self.fail(f"expected {what}, found {found}")
        return self.take()

    def term(self) -> Term:
        left = self.meet_term()
        while self.peek()[0] == "\\/":
            self.take()
            left = App("join", (left, self.meet_term()))
        return left

    def meet_term(self) -> Term:
        left = self.unary()
        while self.peek()[0] == "/\\":
            self.take()
            left = App("meet", (left, self.unary()))
        return left

    def unary(self) -> Term:
        if self.peek()[0] == "~":
            self.take()
            return App("neg", (self.unary(),))
        return self.postfix()

    def postfix(self) -> Term:
        t = self.atom()
        while self.peek()[0] == "*":
            self.take()
            t = App("star", (t,))
        return t

    def atom(self) -> Term:
        kind, val, _ = tok = self.peek()
        if kind == "(":
            self.take()
            t = self.term()
            self.expect(")", "')'")
            return t
        if kind == "ident":
            if val in ("bot", "top"):
                self.take()
                return App(val)
            if val in KEYWORDS:
                self.fail(f"keyword {val!r} cannot be used as a term", tok)
            self.take()
            return Var(val)
        found = "end of input" if kind == "eof" else repr(val)
        self.fail(f"expected a term, found {found}", tok)

    def identity(self) -> Identity:
        lhs = self.term()
        kind = self.peek()[0]
        if kind == "=":
            self.take()
            return Identity(lhs, self.term())
        if kind == "<=":
            self.take()
            return leq(lhs, self.term())
        self.fail("expected '=' or '<='")

    def clause(self) -> Clause:
        premises: list[Identity] = []
        kind, val, _ = self.peek()
        if kind == "ident" and val == "true":
            self.take()
        else:
            premises.append(self.identity())
            while self.peek()[0] == ",":
                self.take()
                premises.append(self.identity())
            # a lone identity abbreviates "true => identity"
            if len(premises) == 1 and self.peek()[0] == "eof":
                return Clause((), tuple(premises))
        self.expect("=>", "'=>'")
        conclusions: list[Identity] = []
        kind, val, _ = self.peek()
        if kind == "ident" and val == "false":
            self.take()
        else:
            conclusions.append(self.identity())
            while self.peek()[0] == "|":
                self.take()
                conclusions.append(self.identity())
        self.end()
        return Clause(tuple(premises), tuple(conclusions))

    def end(self):
        if self.peek()[0] != "eof":
            self.fail(f"unexpected {self.peek()[1]!r} after end of input")


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.end()
    return t


def parse_identity(text: str) -> Identity:
    p = _Parser(text)
    e = p.identity()
    p.end()
    return e


def parse_clause(text: str) -> Clause:
    return _Parser(text).clause()


# ---------------------------------------------------------------- random generation

def random_term(rng: random.Random, ops: list[str], variables: list[str], depth: int) -> Term:
    if depth <= 0 or rng.random() < 0.3:
        consts = [o for o in ops if OPERATIONS[o][0] == 0]
        if consts and rng.random() < 0.2:
            return App(rng.choice(consts))
        return Var(rng.choice(variables))
    op = rng.choice([o for o in ops if OPERATIONS[o][0] > 0])
    arity = OPERATIONS[op][0]
    return App(op, tuple(random_term(rng, ops, variables, depth - 1) for _ in range(arity)))


def random_clause(rng: random.Random, ops: list[str], n_vars: int = 3, depth: int = 3,
                  max_premises: int = 3, max_conclusions: int = 2,
                  quasi: bool = False) -> Clause:
    names = ["x", "y", "z", "u", "v", "w"][:n_vars]

    def ident():
        return Identity(random_term(rng, ops, names, depth), random_term(rng, ops, names, depth))

    premises = [ident() for _ in range(rng.randint(0, max_premises))]
    k = 1 if quasi else rng.randint(0, max_conclusions)
    return Clause(tuple(premises), tuple(ident() for _ in range(k)))
