"""Satisfaction of clauses in finite algebras, and the named clause registry."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import FiniteAlgebra, compile_term
from .errors import EvaluationError, SignatureError
from .syntax import Clause, parse_clause, print_clause


@dataclass(frozen=True)
class Satisfaction:
    holds: bool
    assignment: tuple[tuple[str, int], ...] = ()

    def __bool__(self):
        return self.holds

    def describe(self, alg: FiniteAlgebra) -> str:
        return ", ".join(f"{v}:={alg.label(i)}" for v, i in self.assignment)


def _compile(alg: FiniteAlgebra, clause: Clause):
    names = clause.variables()
    index = {v: i for i, v in enumerate(names)}
    try:
        prem = [(compile_term(alg, e.lhs, index), compile_term(alg, e.rhs, index),
                 max((index[v] for v in e.variables()), default=-1)) for e in clause.premises]
        concl = [(compile_term(alg, e.lhs, index), compile_term(alg, e.rhs, index))
                 for e in clause.conclusions]
    except EvaluationError as exc:
        raise SignatureError(str(exc)) from None
    return names, prem, concl


def satisfies(alg: FiniteAlgebra, clause: Clause) -> Satisfaction:
    """Exhaustive check; returns the lexicographically first counter-assignment.

    Variables are ordered by name and take values in ascending order.  A
    premise is tested as soon as all of its variables are bound.
    """
    names, prem, concl = _compile(alg, clause)
    k = len(names)
    by_level = [[] for _ in range(k + 1)]
    for f, g, lvl in prem:
        by_level[lvl + 1].append((f, g))
    a = [0] * k
    n = alg.size

    def premises_ok(level):
        return all(f(a) == g(a) for f, g in by_level[level])

    if not premises_ok(0):
        return Satisfaction(True)

    def rec(i):
        if i == k:
            return not any(f(a) == g(a) for f, g in concl)
        for v in range(n):
            a[i] = v
            if premises_ok(i + 1) and rec(i + 1):
                return True
        return False

    if rec(0):
        return Satisfaction(False, tuple(zip(names, a)))
    return Satisfaction(True)


@dataclass(frozen=True)
class ClassSatisfaction:
    holds: bool
    algebra: FiniteAlgebra | None = None
    assignment: tuple = ()

    def __bool__(self):
        return self.holds


def valid_in_class(algebras: Sequence[FiniteAlgebra], clause: Clause) -> ClassSatisfaction:
    for alg in algebras:
        s = satisfies(alg, clause)
        if not s:
            return ClassSatisfaction(False, alg, s.assignment)
    return ClassSatisfaction(True)


@dataclass(frozen=True)
class RegistryEntry:
    id: str
    clause: Clause
    bases: tuple[str, ...]


_REGISTRY_TEXT = {
    "C1": ("top = bot => false", ("bdl", "st", "ka")),
    "C2": ("x /\\ y = bot => x = bot | y = bot", ("bdl",)),
    "C3": ("x \\/ y = top => x = top | y = top", ("bdl", "dma", "ka")),
    "C4": ("x = ~x => false", ("dma", "dml", "kl")),
    "C5": ("x = ~x => x = y", ("dml",)),
    "C6": ("x <= ~x, ~(x \\/ y) <= x \\/ y, ~y \\/ z = top => z = top", ("dma",)),
    "C7": ("x <= ~x, y <= ~y, x /\\ y = bot => x \\/ y <= ~(x \\/ y)", ("dma",)),
    "C8": ("~x <= x, x /\\ ~y <= ~x \\/ y => ~y <= y", ("ka", "kl")),
}

REGISTRY = {cid: RegistryEntry(cid, parse_clause(text), bases)
            for cid, (text, bases) in _REGISTRY_TEXT.items()}


def registry_clause(cid: str) -> Clause:
    return REGISTRY[cid].clause


def clause_label(clause: Clause) -> str:
    for cid, entry in REGISTRY.items():
        if entry.clause == clause:
            return cid
    return print_clause(clause)
