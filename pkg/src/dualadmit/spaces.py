"""Finite structured spaces: posets carrying unary maps, binary relations and
distinguished subsets.  All spaces here are finite, so the topology is
discrete and plays no role.

Relations and subsets are stored as Python ``int`` bitmasks: ``up[i]`` has
bit ``j`` set iff ``i <= j``; ``rels[name][i]`` has bit ``j`` set iff
``i R j``; ``subsets[name]`` has bit ``i`` set iff ``i`` is in the subset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BudgetExceeded, WorkbenchError

KINDS = ("priestley", "stone", "demorgan", "kleene")
POINT_BUDGET = 1_000_000


def bits(mask: int):
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _masks_from_matrix(mat: np.ndarray) -> tuple[int, ...]:
    packed = np.packbits(mat.astype(np.uint8), axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


class StructuredSpace:
    __slots__ = ("size", "up", "down", "unary", "rels", "subsets", "kind", "labels",
                 "_covers")

    def __init__(self, size: int, up: Sequence[int], unary: Mapping[str, Sequence[int]] | None = None,
                 rels: Mapping[str, Sequence[int]] | None = None,
                 subsets: Mapping[str, int] | None = None, kind: str = "priestley",
                 labels: Sequence[str] | None = None):
        if kind not in KINDS:
            raise WorkbenchError(f"unknown space kind {kind!r}")
        self.size = size
        self.up = tuple(up)
        down = [0] * size
        for i, m in enumerate(self.up):
            for j in bits(m):
                down[j] |= 1 << i
        self.down = tuple(down)
        self.unary = {k: tuple(v) for k, v in sorted((unary or {}).items())}
        self.rels = {k: tuple(v) for k, v in sorted((rels or {}).items())}
        self.subsets = {k: int(v) for k, v in sorted((subsets or {}).items())}
        self.kind = kind
        self.labels = tuple(labels) if labels is not None else None
        self._covers = None

    @classmethod
    def from_pairs(cls, size: int, order: Iterable[tuple[int, int]], unary=None, rels=None,
                   subsets=None, kind="priestley", labels=None) -> "StructuredSpace":
        """Build from explicit pairs; the order is closed reflexively and transitively."""
        up = [1 << i for i in range(size)]
        for i, j in order:
            up[i] |= 1 << j
        changed = True
        while changed:
            changed = False
            for i in range(size):
                m = up[i]
                for j in bits(m):
                    m |= up[j]
                if m != up[i]:
                    up[i] = m
                    changed = True
        rel_masks = {}
        for name, pairs in (rels or {}).items():
            succ = [0] * size
            for i, j in pairs:
                succ[i] |= 1 << j
            rel_masks[name] = succ
        sub_masks = {name: sum(1 << i for i in set(members))
                     for name, members in (subsets or {}).items()}
        return cls(size, up, unary, rel_masks, sub_masks, kind, labels)

    def __eq__(self, other):
        if not isinstance(other, StructuredSpace):
            return NotImplemented
        return (self.size, self.up, self.unary, self.rels, self.subsets, self.kind) == \
            (other.size, other.up, other.unary, other.rels, other.subsets, other.kind)

    def __hash__(self):
        return hash((self.size, self.up, self.kind))

    def __repr__(self):
        return f"<StructuredSpace {self.kind} size={self.size}>"

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def leq(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def related(self, name: str, i: int, j: int) -> bool:
        return bool(self.rels[name][i] >> j & 1)

    def in_subset(self, name: str, i: int) -> bool:
        return bool(self.subsets[name] >> i & 1)

    def order_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.size) for j in bits(self.up[i])]

    def rel_pairs(self, name: str) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.size) for j in bits(self.rels[name][i])]

    def subset_members(self, name: str) -> list[int]:
        return list(bits(self.subsets[name]))

    def covers(self) -> list[tuple[int, int]]:
        """Hasse edges (i, j) with i < j and nothing strictly between."""
        if self._covers is None:
            out = []
            for i in range(self.size):
                strict = self.up[i] & ~(1 << i)
                for j in bits(strict):
                    if self.down[j] & strict & ~(1 << j) == 0:
                        out.append((i, j))
            self._covers = out
        return self._covers

    def minimal(self) -> list[int]:
        return [i for i in range(self.size) if self.down[i] == 1 << i]

    def maximal(self) -> list[int]:
        return [i for i in range(self.size) if self.up[i] == 1 << i]

    def bottom(self) -> int | None:
        full = (1 << self.size) - 1
        for i in range(self.size):
            if self.up[i] == full:
                return i
        return None

    def top(self) -> int | None:
        full = (1 << self.size) - 1
        for i in range(self.size):
            if self.down[i] == full:
                return i
        return None

    def induced(self, points: Sequence[int]) -> "StructuredSpace":
        """Substructure on ``points`` (must be closed under the unary maps)."""
        points = list(points)
        pos = {p: k for k, p in enumerate(points)}
        def remap(mask):
            return sum(1 << pos[q] for q in bits(mask) if q in pos)
        up = [remap(self.up[p]) for p in points]
        unary = {}
        for name, t in self.unary.items():
            try:
                unary[name] = [pos[t[p]] for p in points]
            except KeyError:
                raise WorkbenchError(f"point set is not closed under {name}") from None
        rels = {name: [remap(r[p]) for p in points] for name, r in self.rels.items()}
        subsets = {name: remap(m) for name, m in self.subsets.items()}
        labels = [self.label(p) for p in points] if self.labels else None
        return StructuredSpace(len(points), up, unary, rels, subsets, self.kind, labels)


@dataclass(frozen=True)
class SpaceMorphism:
    source: StructuredSpace
    target: StructuredSpace
    map: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.map[i]

    def is_valid(self) -> bool:
        return is_space_morphism(self.source, self.target, self.map)

    @property
    def surjective(self) -> bool:
        return len(set(self.map)) == self.target.size


def is_space_morphism(X: StructuredSpace, Z: StructuredSpace, h: Sequence[int]) -> bool:
    if len(h) != X.size or set(X.unary) != set(Z.unary) or set(X.rels) != set(Z.rels) \
            or set(X.subsets) != set(Z.subsets):
        return False
    for i, j in X.covers():
        if not Z.leq(h[i], h[j]):
            return False
    for name, t in X.unary.items():
        tz = Z.unary[name]
        if any(h[t[i]] != tz[h[i]] for i in range(X.size)):
            return False
    for name in X.rels:
        for i, j in X.rel_pairs(name):
            if not Z.related(name, h[i], h[j]):
                return False
    for name, m in X.subsets.items():
        for i in bits(m):
            if not Z.in_subset(name, h[i]):
                return False
    return True


def compose_morphisms(g: SpaceMorphism, f: SpaceMorphism) -> SpaceMorphism:
    return SpaceMorphism(f.source, g.target, tuple(g.map[v] for v in f.map))


# ---------------------------------------------------------------- constructions

def space_power(S: StructuredSpace, n: int, budget: int = POINT_BUDGET) -> StructuredSpace:
    """Pointwise power; point index is ``sum t_i * |S|^i``.  ``n = 0`` gives one point."""
    if n < 0:
        raise ValueError("power must be non-negative")
    N = S.size ** n
    if N > budget:
        raise BudgetExceeded(f"space power has {N} points, budget {budget}", N)
    m = S.size
    coords = np.array(list(itertools.product(range(m), repeat=n)), dtype=np.int64)
    coords = coords[:, ::-1].reshape(N, n) if n else np.zeros((1, 0), dtype=np.int64)
    radix = m ** np.arange(n, dtype=np.int64)

    base_le = np.array([[S.leq(i, j) for j in range(m)] for i in range(m)], dtype=bool)

    def pointwise(base: np.ndarray) -> tuple[int, ...]:
        mat = np.ones((N, N), dtype=bool)
        for k in range(n):
            c = coords[:, k]
            mat &= base[np.ix_(c, c)]
        return _masks_from_matrix(mat)

    up = pointwise(base_le)
    unary = {}
    for name, t in S.unary.items():
        t = np.asarray(t, dtype=np.int64)
        unary[name] = (t[coords] @ radix).tolist() if n else [0]
    rels = {}
    for name, r in S.rels.items():
        base = np.array([[bool(r[i] >> j & 1) for j in range(m)] for i in range(m)], dtype=bool)
        rels[name] = pointwise(base)
    subsets = {}
    for name, mask in S.subsets.items():
        inside = np.array([bool(mask >> i & 1) for i in range(m)], dtype=bool)
        members = inside[coords].all(axis=1) if n else np.array([True])
        subsets[name] = sum(1 << int(i) for i in np.flatnonzero(members))
    labels = None
    if N <= 100_000:
        labels = ["(" + ",".join(S.label(int(c)) for c in row) + ")" for row in coords]
    return StructuredSpace(N, up, unary, rels, subsets, S.kind, labels)


def power_coordinates(base_size: int, n: int, index: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(index % base_size)
        index //= base_size
    return tuple(out)


def space_coproduct(spaces: Sequence[StructuredSpace]) -> tuple[StructuredSpace, list[SpaceMorphism]]:
    if not spaces:
        raise WorkbenchError("coproduct of an empty list")
    kind = spaces[0].kind
    if any(s.kind != kind for s in spaces):
        raise WorkbenchError("coproduct components must have the same kind")
    offsets = list(itertools.accumulate([0] + [s.size for s in spaces]))
    total = offsets[-1]
    up, labels = [], []
    unary = {name: [] for name in spaces[0].unary}
    rels = {name: [] for name in spaces[0].rels}
    subsets = {name: 0 for name in spaces[0].subsets}
    for k, s in enumerate(spaces):
        off = offsets[k]
        up.extend(m << off for m in s.up)
        for name in unary:
            unary[name].extend(v + off for v in s.unary[name])
        for name in rels:
            rels[name].extend(m << off for m in s.rels[name])
        for name in subsets:
            subsets[name] |= s.subsets[name] << off
        labels.extend(f"{k}:{s.label(i)}" for i in range(s.size))
    X = StructuredSpace(total, up, unary, rels, subsets, kind, labels)
    inj = [SpaceMorphism(s, X, tuple(range(offsets[k], offsets[k] + s.size)))
           for k, s in enumerate(spaces)]
    return X, inj


# ---------------------------------------------------------------- axioms

def check_space_axioms(X: StructuredSpace) -> tuple[bool, str]:
    """Return (ok, id of the first violated axiom)."""
    n = X.size
    for i in range(n):
        if not X.leq(i, i):
            return False, "order-reflexive"
        for j in bits(X.up[i]):
            if j != i and X.leq(j, i):
                return False, "order-antisymmetric"
            if X.up[j] & ~X.up[i]:
                return False, "order-transitive"
    if X.kind == "stone":
        if "d" not in X.unary:
            return False, "stone-d-missing"
        d = X.unary["d"]
        mins = set(X.minimal())
        for x in range(n):
            below = [m for m in mins if X.leq(m, x)]
            if below != [d[x]]:
                return False, "stone-d-unique-minimal"
    elif X.kind == "demorgan":
        if "f" not in X.unary:
            return False, "demorgan-f-missing"
        f = X.unary["f"]
        for x in range(n):
            if f[f[x]] != x:
                return False, "demorgan-involution"
        for x, y in X.order_pairs():
            if not X.leq(f[y], f[x]):
                return False, "demorgan-order-reversing"
    elif X.kind == "kleene":
        if "sim" not in X.rels or "Y" not in X.subsets:
            return False, "kleene-structure-missing"
        sim, Y = X.rels["sim"], X.subsets["Y"]
        for x in range(n):
            if not sim[x] >> x & 1:
                return False, "kleene-reflexive"
        for x in range(n):
            for y in bits(sim[x]):
                if Y >> x & 1 and not X.leq(x, y):
                    return False, "kleene-Y-below"
                for z in bits(X.up[y]):
                    if not sim[z] >> x & 1:
                        return False, "kleene-upward"
    return True, ""


# ---------------------------------------------------------------- morphism search

class SearchBudgetExceeded(BudgetExceeded):
    pass


class _Problem:
    """Binary CSP whose solutions are the morphisms X -> Z."""

    def __init__(self, X: StructuredSpace, Z: StructuredSpace):
        if X.kind != Z.kind or set(X.unary) != set(Z.unary) or set(X.rels) != set(Z.rels) \
                or set(X.subsets) != set(Z.subsets):
            raise WorkbenchError(f"spaces of different kinds ({X.kind}, {Z.kind})")
        self.X, self.Z = X, Z
        full = (1 << Z.size) - 1
        dom = [full] * X.size
        for name, m in X.subsets.items():
            for p in bits(m):
                dom[p] &= Z.subsets[name]
        arcs: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(X.size)]
        for p, q in X.covers():
            arcs[p].append((q, Z.up))
            arcs[q].append((p, Z.down))
        for name, t in X.unary.items():
            tz = Z.unary[name]
            fix = sum(1 << s for s in range(Z.size) if tz[s] == s)
            img = tuple(1 << tz[s] for s in range(Z.size))
            inv = [0] * Z.size
            for s in range(Z.size):
                inv[tz[s]] |= 1 << s
            inv = tuple(inv)
            for p in range(X.size):
                if t[p] == p:
                    dom[p] &= fix
                else:
                    arcs[p].append((t[p], img))
                    arcs[t[p]].append((p, inv))
        for name, r in X.rels.items():
            rz = Z.rels[name]
            pred = [0] * Z.size
            for s in range(Z.size):
                for u in bits(rz[s]):
                    pred[u] |= 1 << s
            pred = tuple(pred)
            selfok = sum(1 << s for s in range(Z.size) if rz[s] >> s & 1)
            for p in range(X.size):
                for q in bits(r[p]):
                    if p == q:
                        dom[p] &= selfok
                    else:
                        arcs[p].append((q, rz))
                        arcs[q].append((p, pred))
        self.dom0 = dom
        self.arcs = arcs
        self.degree = [popcount(X.up[p] | X.down[p]) for p in range(X.size)]
        self.nodes = 0

    def propagate(self, dom: list[int], queue: list[int]) -> bool:
        arcs = self.arcs
        pending = set(queue)
        while queue:
            v = queue.pop()
            pending.discard(v)
            dv = dom[v]
            for w, table in arcs[v]:
                allowed = 0
                for t in bits(dv):
                    allowed |= table[t]
                nw = dom[w] & allowed
                if nw != dom[w]:
                    if not nw:
                        return False
                    dom[w] = nw
                    if w not in pending:
                        pending.add(w)
                        queue.append(w)
        return True

    def solve(self, cover: int = 0, first_only: bool = False, max_nodes: int | None = None,
              order: str = "degree"):
        dom = list(self.dom0)
        if any(d == 0 for d in dom):
            return
        if not self.propagate(dom, list(range(len(dom)))):
            return
        yield from self._rec(dom, cover, max_nodes, order)

    def _rec(self, dom, cover, max_nodes, order):
        self.nodes += 1
        if max_nodes is not None and self.nodes > max_nodes:
            raise SearchBudgetExceeded(f"morphism search exceeded {max_nodes} nodes", self.nodes)
        if cover:
            seen = 0
            for d in dom:
                seen |= d
            if seen & cover != cover:
                return
        best, key = -1, None
        for v, d in enumerate(dom):
            if d & (d - 1):
                k = (-self.degree[v], popcount(d)) if order == "degree" else (popcount(d), -self.degree[v])
                if key is None or k < key:
                    best, key = v, k
        if best < 0:
            yield tuple(d.bit_length() - 1 for d in dom)
            return
        for t in bits(dom[best]):
            nd = list(dom)
            nd[best] = 1 << t
            if self.propagate(nd, [best]):
                yield from self._rec(nd, cover, max_nodes, order)


def iter_morphisms(X: StructuredSpace, Z: StructuredSpace, cover: int = 0,
                   max_nodes: int | None = None):
    """Morphisms X -> Z in search order; ``cover`` is a mask of required image points."""
    if X.size == 0:
        if cover == 0:
            yield ()
        return
    yield from _Problem(X, Z).solve(cover, max_nodes=max_nodes)


def morphisms(X: StructuredSpace, Z: StructuredSpace, max_nodes: int | None = None) -> list[SpaceMorphism]:
    maps = sorted(iter_morphisms(X, Z, max_nodes=max_nodes))
    return [SpaceMorphism(X, Z, m) for m in maps]


def surjective_morphism_exists(X: StructuredSpace, Z: StructuredSpace,
                               max_nodes: int | None = None) -> SpaceMorphism | None:
    full = (1 << Z.size) - 1
    for m in iter_morphisms(X, Z, cover=full, max_nodes=max_nodes):
        return SpaceMorphism(X, Z, m)
    return None


def morphism_hitting(X: StructuredSpace, Z: StructuredSpace, point: int,
                     max_nodes: int | None = None) -> SpaceMorphism | None:
    """First morphism whose image contains ``point``."""
    for m in iter_morphisms(X, Z, cover=1 << point, max_nodes=max_nodes):
        return SpaceMorphism(X, Z, m)
    return None


def is_isomorphic_space(X: StructuredSpace, Z: StructuredSpace) -> SpaceMorphism | None:
    if X.size != Z.size or X.kind != Z.kind:
        return None
    if sorted(popcount(u) for u in X.up) != sorted(popcount(u) for u in Z.up):
        return None
    full = (1 << Z.size) - 1
    for m in iter_morphisms(X, Z, cover=full):
        inv = [0] * Z.size
        for i, v in enumerate(m):
            inv[v] = i
        # a bijective morphism is an isomorphism iff its inverse is a morphism
        if is_space_morphism(Z, X, inv):
            return SpaceMorphism(X, Z, m)
    return None


# ---------------------------------------------------------------- rendering

def emit_dot(X: StructuredSpace, name: str = "X") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle];"]
    members = 0
    for m in X.subsets.values():
        members |= m
    for i in range(X.size):
        extra = ", peripheries=2" if members >> i & 1 else ""
        lines.append(f'  n{i} [label="{X.label(i)}"{extra}];')
    for i, j in X.covers():
        lines.append(f"  n{i} -> n{j} [dir=none];")
    for name_, t in X.unary.items():
        for i in range(X.size):
            lines.append(f'  n{i} -> n{t[i]} [color=gray, label="{name_}", constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"
