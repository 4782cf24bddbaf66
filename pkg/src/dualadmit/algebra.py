"""Finite algebras over small fixed signatures.

Carriers are the integers ``0..size-1``.  Binary tables are tuples of rows,
unary tables are tuples, constants are plain integers.  Products encode a
tuple ``(t_0, ..., t_{k-1})`` as the mixed-radix index ``sum t_i * r_i``
with ``r_0 = 1`` (first coordinate varies fastest).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BudgetExceeded, EvaluationError, SignatureError, VarietyError
from .syntax import App, Term, Var

SIZE_BUDGET = 1_000_000


@dataclass(frozen=True)
class Signature:
    # the name is a tag only: dma and ka share one language
    name: str = field(compare=False)
    operations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [o for o, _ in self.operations]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate operation names in {self.name}")
        for o, a in self.operations:
            if a not in (0, 1, 2):
                raise SignatureError(f"operation {o} has unsupported arity {a}")

    def arity(self, op: str) -> int:
        for o, a in self.operations:
            if o == op:
                return a
        raise SignatureError(f"operation {op!r} is not in signature {self.name}")

    def has(self, op: str) -> bool:
        return any(o == op for o, _ in self.operations)

    @property
    def op_names(self) -> list[str]:
        return [o for o, _ in self.operations]

    @property
    def bounded(self) -> bool:
        return self.has("bot") and self.has("top")


_LAT = (("meet", 2), ("join", 2))
SIGNATURES = {
    "bdl": Signature("bdl", _LAT + (("bot", 0), ("top", 0))),
    "dl": Signature("dl", _LAT),
    "st": Signature("st", _LAT + (("star", 1), ("bot", 0), ("top", 0))),
    "dma": Signature("dma", _LAT + (("neg", 1), ("bot", 0), ("top", 0))),
    "dml": Signature("dml", _LAT + (("neg", 1),)),
    "ka": Signature("ka", _LAT + (("neg", 1), ("bot", 0), ("top", 0))),
    "kl": Signature("kl", _LAT + (("neg", 1),)),
}

BOUNDED_OF = {"dl": "bdl", "dml": "dma", "kl": "ka"}
UNBOUNDED_OF = {v: k for k, v in BOUNDED_OF.items()}


def signature(name: str | Signature) -> Signature:
    if isinstance(name, Signature):
        return name
    try:
        return SIGNATURES[name]
    except KeyError:
        raise SignatureError(f"unknown signature {name!r}") from None


class FiniteAlgebra:
    """An algebra with carrier ``0..size-1`` and total operation tables."""

    __slots__ = ("signature", "size", "ops", "name", "labels", "_arrays")

    def __init__(self, sig: Signature | str, size: int, ops: Mapping, name: str = "",
                 labels: Sequence[str] | None = None):
        sig = signature(sig)
        if size < 1:
            raise SignatureError("an algebra needs a non-empty carrier")
        tables = {}
        for op, arity in sig.operations:
            if op not in ops:
                raise SignatureError(f"missing table for {op!r}")
            tables[op] = _freeze_table(ops[op], arity, size, op)
        extra = set(ops) - set(tables)
        if extra:
            raise SignatureError(f"operations {sorted(extra)} not in signature {sig.name}")
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != size:
                raise SignatureError("label count does not match the carrier size")
        self.signature = sig
        self.size = size
        self.ops = tables
        self.name = name
        self.labels = labels
        self._arrays = None

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (self.signature == other.signature and self.size == other.size
                and self.ops == other.ops)

    def __hash__(self):
        return hash((self.signature, self.size, tuple(sorted(self.ops.items()))))

    def __repr__(self):
        nm = self.name or "algebra"
        return f"<FiniteAlgebra {nm} {self.signature.name} size={self.size}>"

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def index_of(self, label: str) -> int:
        if self.labels and label in self.labels:
            return self.labels.index(label)
        return int(label)

    @property
    def is_trivial(self) -> bool:
        return self.size == 1

    def constants(self) -> list[int]:
        return [self.ops[o] for o, a in self.signature.operations if a == 0]

    def arrays(self) -> dict:
        """numpy views of the tables (cached)."""
        if self._arrays is None:
            self._arrays = {op: np.asarray(t, dtype=np.int64) for op, t in self.ops.items()}
        return self._arrays

    def leq(self, x: int, y: int) -> bool:
        return self.ops["meet"][x][y] == x

    def apply(self, op: str, *args: int) -> int:
        t = self.ops[op]
        if not args:
            return t
        if len(args) == 1:
            return t[args[0]]
        return t[args[0]][args[1]]

    def relabel(self, name: str | None = None, labels=None) -> "FiniteAlgebra":
        return FiniteAlgebra(self.signature, self.size, self.ops,
                             self.name if name is None else name,
                             self.labels if labels is None else labels)


def _freeze_table(t, arity: int, size: int, op: str):
    def check(v):
        v = int(v)
        if not 0 <= v < size:
            raise SignatureError(f"table {op!r} has entry {v} outside 0..{size - 1}")
        return v

    if arity == 0:
        if isinstance(t, (list, tuple, np.ndarray)):
            raise SignatureError(f"constant {op!r} must be a single index")
        return check(t)
    if arity == 1:
        if len(t) != size:
            raise SignatureError(f"unary table {op!r} must have length {size}")
        return tuple(check(v) for v in t)
    if len(t) != size or any(len(row) != size for row in t):
        raise SignatureError(f"binary table {op!r} must be {size}x{size}")
    return tuple(tuple(check(v) for v in row) for row in t)


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.map[x]

    def is_valid(self) -> bool:
        return is_homomorphism(self.source, self.target, self.map)

    @property
    def injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def surjective(self) -> bool:
        return len(set(self.map)) == self.target.size


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, h: Sequence[int]) -> bool:
    if A.signature != B.signature or len(h) != A.size:
        return False
    for op, arity in A.signature.operations:
        ta, tb = A.ops[op], B.ops[op]
        if arity == 0:
            if h[ta] != tb:
                return False
        elif arity == 1:
            if any(h[ta[x]] != tb[h[x]] for x in range(A.size)):
                return False
        else:
            for x in range(A.size):
                row, hx, rowb = ta[x], h[x], tb[h[x]]
                for y in range(A.size):
                    if h[row[y]] != rowb[h[y]]:
                        return False
    return True


def compose(g: Homomorphism, f: Homomorphism) -> Homomorphism:
    return Homomorphism(f.source, g.target, tuple(g.map[v] for v in f.map))


# ---------------------------------------------------------------- terms

def compile_term(alg: FiniteAlgebra, term: Term, index: Mapping[str, int]):
    """Return a function of an assignment tuple evaluating ``term`` in ``alg``."""
    if isinstance(term, Var):
        if term.name not in index:
            raise EvaluationError(f"unknown variable {term.name!r}")
        i = index[term.name]
        return lambda a: a[i]
    if not alg.signature.has(term.op):
        raise EvaluationError(f"operation {term.op!r} is not in signature {alg.signature.name}")
    arity = alg.signature.arity(term.op)
    if arity != len(term.args):
        raise EvaluationError(f"operation {term.op!r} expects {arity} arguments")
    t = alg.ops[term.op]
    if arity == 0:
        return lambda a: t
    if arity == 1:
        f = compile_term(alg, term.args[0], index)
        return lambda a: t[f(a)]
    f = compile_term(alg, term.args[0], index)
    g = compile_term(alg, term.args[1], index)
    return lambda a: t[f(a)][g(a)]


def eval_term(alg: FiniteAlgebra, term: Term, assignment: Mapping[str, int]) -> int:
    if isinstance(term, Var):
        try:
            return assignment[term.name]
        except KeyError:
            raise EvaluationError(f"unknown variable {term.name!r}") from None
    if not isinstance(term, App) or not alg.signature.has(term.op):
        raise EvaluationError(f"operation {getattr(term, 'op', term)!r} is not in "
                              f"signature {alg.signature.name}")
    args = [eval_term(alg, a, assignment) for a in term.args]
    if len(args) != alg.signature.arity(term.op):
        raise EvaluationError(f"operation {term.op!r} applied to {len(args)} arguments")
    return alg.apply(term.op, *args)


# ---------------------------------------------------------------- subalgebras

def closure(alg: FiniteAlgebra, seed: Iterable[int]) -> list[int]:
    """Least subuniverse containing ``seed`` and the constants, sorted."""
    members = set()
    order = []
    for c in list(seed) + alg.constants():
        if not 0 <= c < alg.size:
            raise IndexError(f"carrier index {c} out of range")
        if c not in members:
            members.add(c)
            order.append(c)
    unary = [alg.ops[o] for o, a in alg.signature.operations if a == 1]
    binary = [alg.ops[o] for o, a in alg.signature.operations if a == 2]
    i = 0
    while i < len(order):
        x = order[i]
        new = []
        for t in unary:
            new.append(t[x])
        for t in binary:
            for y in order[: i + 1]:
                new.append(t[x][y])
                new.append(t[y][x])
        for v in new:
            if v not in members:
                members.add(v)
                order.append(v)
        i += 1
    return sorted(members)


def restrict(alg: FiniteAlgebra, elems: Sequence[int], name: str = "") -> tuple[FiniteAlgebra, Homomorphism]:
    """The subalgebra on a (closed) sorted carrier subset, with its inclusion."""
    elems = list(elems)
    pos = {e: i for i, e in enumerate(elems)}
    ops = {}
    for op, arity in alg.signature.operations:
        t = alg.ops[op]
        if arity == 0:
            ops[op] = pos[t]
        elif arity == 1:
            ops[op] = [pos[t[e]] for e in elems]
        else:
            ops[op] = [[pos[t[e][f]] for f in elems] for e in elems]
    labels = [alg.label(e) for e in elems]
    sub = FiniteAlgebra(alg.signature, len(elems), ops, name, labels)
    return sub, Homomorphism(sub, alg, tuple(elems))


def subalgebra_generated(alg: FiniteAlgebra, seed: Iterable[int]) -> tuple[FiniteAlgebra, Homomorphism]:
    return restrict(alg, closure(alg, seed), f"Sg({alg.name})" if alg.name else "")


# ---------------------------------------------------------------- products

def trivial_algebra(sig: Signature | str, name: str = "1") -> FiniteAlgebra:
    sig = signature(sig)
    ops = {o: (0 if a == 0 else [0] if a == 1 else [[0]]) for o, a in sig.operations}
    return FiniteAlgebra(sig, 1, ops, name, ["()"])


def direct_product(algebras: Sequence[FiniteAlgebra], name: str = "",
                   budget: int = SIZE_BUDGET) -> FiniteAlgebra:
    if not algebras:
        raise SignatureError("direct_product needs at least one factor; "
                             "use trivial_algebra for the empty product")
    sig = algebras[0].signature
    if any(a.signature != sig for a in algebras):
        raise SignatureError("factors have different signatures")
    sizes = [a.size for a in algebras]
    total = 1
    for s in sizes:
        total *= s
        if total > budget:
            raise BudgetExceeded(f"product size exceeds budget {budget}", total)
    k = len(algebras)
    # coords[i, j] = j-th coordinate of element i
    coords = np.array(list(itertools.product(*[range(s) for s in reversed(sizes)])),
                      dtype=np.int64)[:, ::-1].reshape(total, k)
    radix = np.cumprod([1] + sizes[:-1]).astype(np.int64)
    ops = {}
    for op, arity in sig.operations:
        if arity == 0:
            ops[op] = int(sum(a.ops[op] * r for a, r in zip(algebras, radix)))
        elif arity == 1:
            out = np.zeros(total, dtype=np.int64)
            for j, a in enumerate(algebras):
                out += np.asarray(a.ops[op])[coords[:, j]] * radix[j]
            ops[op] = out.tolist()
        else:
            out = np.zeros((total, total), dtype=np.int64)
            for j, a in enumerate(algebras):
                t = np.asarray(a.ops[op])
                out += t[np.ix_(coords[:, j], coords[:, j])] * radix[j]
            ops[op] = out.tolist()
    labels = None
    if total <= 100_000:
        labels = ["(" + ",".join(a.label(int(c)) for a, c in zip(algebras, row)) + ")"
                  for row in coords]
    if not name:
        names = [a.name or "?" for a in algebras]
        name = "x".join(names)
    return FiniteAlgebra(sig, total, ops, name, labels)


def direct_power(alg: FiniteAlgebra, n: int, budget: int = SIZE_BUDGET) -> FiniteAlgebra:
    if n < 0:
        raise ValueError("power must be non-negative")
    if n == 0:
        return trivial_algebra(alg.signature)
    if n == 1:
        return alg.relabel()
    return direct_product([alg] * n, f"{alg.name}^{n}", budget)


def product_coordinates(sizes: Sequence[int], index: int) -> tuple[int, ...]:
    out = []
    for s in sizes:
        out.append(index % s)
        index //= s
    return tuple(out)


# ---------------------------------------------------------------- homomorphisms

def generating_sequence(alg: FiniteAlgebra) -> list[int]:
    """A small generating set found greedily (smallest missing element first)."""
    gens: list[int] = []
    current = set(closure(alg, []))
    while len(current) < alg.size:
        g = min(set(range(alg.size)) - current)
        gens.append(g)
        current = set(closure(alg, gens))
    return gens


def _extend(A: FiniteAlgebra, B: FiniteAlgebra, h: dict, order: list, start: int) -> bool:
    """Close the partial map ``h`` under all operations; False on conflict.

    ``order`` lists the domain of ``h`` in discovery order; entries from
    ``start`` on are new and still have to be combined with everything.
    """
    sig = A.signature
    unary = [(A.ops[o], B.ops[o]) for o, a in sig.operations if a == 1]
    binary = [(A.ops[o], B.ops[o]) for o, a in sig.operations if a == 2]
    i = start
    while i < len(order):
        x = order[i]
        hx = h[x]
        pairs = []
        for ta, tb in unary:
            pairs.append((ta[x], tb[hx]))
        for ta, tb in binary:
            rowa, rowb = ta[x], tb[hx]
            for y in order[: i + 1]:
                hy = h[y]
                pairs.append((rowa[y], rowb[hy]))
                pairs.append((ta[y][x], tb[hy][hx]))
        for a, b in pairs:
            got = h.get(a)
            if got is None:
                h[a] = b
                order.append(a)
            elif got != b:
                return False
        i += 1
    return True


def _hom_search(A: FiniteAlgebra, B: FiniteAlgebra, candidates=None, injective=False,
                first_only=False) -> list[tuple[int, ...]]:
    if A.signature != B.signature:
        raise SignatureError("homomorphisms need algebras of the same signature")
    h: dict = {}
    order: list = []
    for op, arity in A.signature.operations:
        if arity == 0:
            a, b = A.ops[op], B.ops[op]
            if h.get(a, b) != b:
                return []
            if a not in h:
                h[a] = b
                order.append(a)
    if not _extend(A, B, h, order, 0):
        return []
    gens = generating_sequence(A)
    found: list[tuple[int, ...]] = []

    def rec(k: int, h: dict, order: list):
        if k == len(gens):
            m = tuple(h[x] for x in range(A.size))
            if injective and len(set(m)) != A.size:
                return False
            found.append(m)
            return first_only
        g = gens[k]
        if g in h:
            return rec(k + 1, h, order)
        cands = range(B.size) if candidates is None else candidates[g]
        for b in cands:
            h2 = dict(h)
            h2[g] = b
            order2 = order + [g]
            if not _extend(A, B, h2, order2, len(order)):
                continue
            if injective and len(set(h2.values())) != len(h2):
                continue
            if rec(k + 1, h2, order2):
                return True
        return False

    rec(0, h, order)
    return found


def homomorphisms(A: FiniteAlgebra, B: FiniteAlgebra) -> list[Homomorphism]:
    maps = sorted(_hom_search(A, B))
    return [Homomorphism(A, B, m) for m in maps]


def _invariants(alg: FiniteAlgebra) -> list[tuple]:
    """Per-element isomorphism invariants."""
    n = alg.size
    inv = []
    unary = [alg.ops[o] for o, a in alg.signature.operations if a == 1]
    binary = [alg.ops[o] for o, a in alg.signature.operations if a == 2]
    consts = alg.constants()
    for x in range(n):
        row = [tuple(u[x] == x for u in unary)]
        row.append(tuple(x == c for c in consts))
        for t in binary:
            row.append(sum(1 for y in range(n) if t[x][y] == x))
            row.append(sum(1 for y in range(n) if t[y][x] == x))
            row.append(t[x][x] == x)
        inv.append(tuple(row))
    return inv


def is_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra) -> Homomorphism | None:
    if A.signature != B.signature:
        raise SignatureError("is_isomorphic needs algebras of the same signature")
    if A.size != B.size:
        return None
    ia, ib = _invariants(A), _invariants(B)
    if sorted(ia) != sorted(ib):
        return None
    cands = [[y for y in range(B.size) if ib[y] == ia[x]] for x in range(A.size)]
    found = _hom_search(A, B, candidates=cands, injective=True, first_only=True)
    if not found:
        return None
    return Homomorphism(A, B, found[0])


def iso_key(alg: FiniteAlgebra) -> tuple:
    return (alg.size, tuple(sorted(_invariants(alg))))


# ---------------------------------------------------------------- bar construction

def add_bounds(alg: FiniteAlgebra) -> FiniteAlgebra:
    """Adjoin a new bottom (index 0) and top (index size+1); old i becomes i+1."""
    name = alg.signature.name
    if name not in BOUNDED_OF:
        raise SignatureError(f"add_bounds needs an unbounded signature, got {name}")
    sig = SIGNATURES[BOUNDED_OF[name]]
    n = alg.size + 2
    bot, top = 0, n - 1
    m, j = alg.ops["meet"], alg.ops["join"]
    meet_t = [[0] * n for _ in range(n)]
    join_t = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            if x == bot or y == bot:
                meet_t[x][y], join_t[x][y] = bot, (y if x == bot else x)
            elif x == top or y == top:
                meet_t[x][y], join_t[x][y] = (y if x == top else x), top
            else:
                meet_t[x][y] = m[x - 1][y - 1] + 1
                join_t[x][y] = j[x - 1][y - 1] + 1
    ops = {"meet": meet_t, "join": join_t, "bot": bot, "top": top}
    if "neg" in alg.ops:
        ops["neg"] = [top] + [v + 1 for v in alg.ops["neg"]] + [bot]
    labels = ["_bot"] + [alg.label(i) for i in range(alg.size)] + ["_top"]
    return FiniteAlgebra(sig, n, ops, f"bar({alg.name})" if alg.name else "bar", labels)


def lattice_reduct(alg: FiniteAlgebra, target: Signature | str) -> FiniteAlgebra:
    """Forget the operations not in ``target``."""
    sig = signature(target)
    ops = {o: alg.ops[o] for o in sig.op_names}
    return FiniteAlgebra(sig, alg.size, ops, alg.name, alg.labels)


# ---------------------------------------------------------------- variety checks

@dataclass(frozen=True)
class Validation:
    ok: bool
    law: str = ""
    assignment: tuple = ()
    detail: str = ""

    def __bool__(self):
        return self.ok


def _first(mask: np.ndarray) -> tuple:
    idx = np.argwhere(mask)
    return tuple(int(v) for v in idx[0]) if len(idx) else ()


def validate_variety(profile, alg: FiniteAlgebra) -> Validation:
    """Check the defining conditions of the profile's variety on ``alg``.

    ``profile`` may be a profile object or a signature name.
    """
    sig_name = getattr(profile, "name", profile)
    if alg.signature != signature(sig_name):
        raise SignatureError(f"algebra has signature {alg.signature.name}, expected {sig_name}")
    T = alg.arrays()
    n = alg.size
    m, j = T["meet"], T["join"]
    x = np.arange(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    X3, Y3, Z3 = np.meshgrid(x, x, x, indexing="ij")

    def bad(name, mask, fmt=""):
        if mask.any():
            a = _first(mask)
            return Validation(False, name, a, fmt)
        return None

    checks = [
        ("meet idempotent", lambda: m[x, x] != x),
        ("join idempotent", lambda: j[x, x] != x),
        ("meet commutative", lambda: m[X, Y] != m[Y, X]),
        ("join commutative", lambda: j[X, Y] != j[Y, X]),
        ("meet associative", lambda: m[m[X3, Y3], Z3] != m[X3, m[Y3, Z3]]),
        ("join associative", lambda: j[j[X3, Y3], Z3] != j[X3, j[Y3, Z3]]),
        ("absorption", lambda: (m[X, j[X, Y]] != X) | (j[X, m[X, Y]] != X)),
        ("distributive", lambda: m[X3, j[Y3, Z3]] != j[m[X3, Y3], m[X3, Z3]]),
    ]
    if alg.signature.bounded:
        bot, top = T["bot"], T["top"]
        checks.append(("bottom", lambda: m[bot, x] != bot))
        checks.append(("top", lambda: j[top, x] != top))
    if "neg" in T:
        ng = T["neg"]
        checks.append(("involution", lambda: ng[ng[x]] != x))
        checks.append(("De Morgan law", lambda: ng[m[X, Y]] != j[ng[X], ng[Y]]))
        if sig_name in ("ka", "kl"):
            # x /\ ~x <= y \/ ~y
            checks.append(("Kleene condition",
                           lambda: m[m[X, ng[X]], j[Y, ng[Y]]] != m[X, ng[X]]))
    if "star" in T:
        st = T["star"]
        bot, top = T["bot"], T["top"]

        def pseudo():
            # x* is the largest y with x /\ y = bot
            disjoint = m[X, Y] == bot
            below = m[Y, st[X]] == Y
            return (m[x, st[x]] != bot)[:, None] | (disjoint & ~below)

        checks.append(("pseudocomplement", pseudo))
        checks.append(("Stone identity", lambda: j[st[x], st[st[x]]] != top))
    for law, f in checks:
        r = bad(law, f())
        if r is not None:
            return r
    return Validation(True)


def require_member(profile, alg: FiniteAlgebra) -> None:
    v = validate_variety(profile, alg)
    if not v:
        pretty = ", ".join(alg.label(i) for i in v.assignment)
        raise VarietyError(f"{alg.name or 'algebra'} fails {v.law} at ({pretty})")
