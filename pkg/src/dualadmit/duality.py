"""Dual spaces, dual algebras, free algebras and embeddings through the duality.

For a profile with generator ``M`` and alter ego ``M~``:

* ``dual_space(B)`` is the set of homomorphisms ``B -> M`` with structure
  lifted pointwise from ``M~``;
* ``dual_algebra(X)`` is the set of morphisms ``X -> M~`` with operations
  computed pointwise in ``M``;
* the free algebra on ``n`` generators is ``dual_algebra(M~^n)``, the
  generators being the coordinate projections.

Free-algebra elements are stored as rows of a uint8 matrix: row ``i`` lists
the values of the ``i``-th morphism at every point of ``M~^n``.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import (FiniteAlgebra, Homomorphism, add_bounds, homomorphisms, is_homomorphism,
                      require_member)
from .clauses import Satisfaction
from .errors import BudgetExceeded, DualityError, EvaluationError, SignatureError
from .profiles import VarietyProfile, get_profile
from .spaces import (SearchBudgetExceeded, SpaceMorphism, StructuredSpace, bits, check_space_axioms,
                     iter_morphisms, morphism_hitting, space_power, surjective_morphism_exists)
from .syntax import App, Clause, Identity, Term, Var

FREE_POINT_LIMIT = 256          # points of M~^n we are willing to search over
FREE_ELEMENT_LIMIT = 50_000     # elements of a free algebra we are willing to list
TABLE_LIMIT = 2_000             # largest free algebra given explicit operation tables
ASSIGNMENT_LIMIT = 10 ** 8      # evaluations allowed in free-algebra satisfaction
SEARCH_NODES = 200_000          # nodes per surjection search
CACHE_FORMAT = 1

_cache_dir: Path | None = Path(os.environ["DUALADMIT_CACHE"]) if os.environ.get("DUALADMIT_CACHE") else None
_memo: dict = {}


def set_cache_dir(path) -> None:
    """Enable (path) or disable (None) the on-disk free-algebra cache."""
    global _cache_dir
    _cache_dir = Path(path) if path is not None else None


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "dualadmit"


def clear_memo() -> None:
    _memo.clear()


def _need_duality(profile: VarietyProfile):
    if not profile.has_duality:
        raise DualityError(f"profile {profile.name} has no direct duality; "
                           f"use the bar reduction to {profile.bar_target}")


# ---------------------------------------------------------------- dual space / dual algebra

@dataclass(frozen=True)
class DualSpace:
    space: StructuredSpace
    homs: tuple[tuple[int, ...], ...]      # point i is the homomorphism homs[i]
    algebra: FiniteAlgebra


def _lift(M_space: StructuredSpace, rows: Sequence[tuple[int, ...]], kind: str,
          labels=None) -> StructuredSpace:
    """Structure on a set of maps (into the carrier of M~) induced pointwise."""
    n = len(rows)
    arr = np.asarray(rows, dtype=np.int64).reshape(n, -1)
    index = {tuple(r): i for i, r in enumerate(rows)}
    m = M_space.size
    le = np.array([[M_space.leq(i, j) for j in range(m)] for i in range(m)], dtype=bool)

    def pointwise(base):
        out = []
        for i in range(n):
            ok = base[arr[i][None, :], arr].all(axis=1)
            out.append(sum(1 << int(j) for j in np.flatnonzero(ok)))
        return out

    up = pointwise(le)
    unary = {}
    for name, t in M_space.unary.items():
        t = np.asarray(t)
        img = []
        for i in range(n):
            key = tuple(int(v) for v in t[arr[i]])
            if key not in index:
                raise DualityError(f"lifted {name} leaves the point set at point {i}")
            img.append(index[key])
        unary[name] = img
    rels = {}
    for name, r in M_space.rels.items():
        base = np.array([[bool(r[i] >> j & 1) for j in range(m)] for i in range(m)], dtype=bool)
        rels[name] = pointwise(base)
    subsets = {}
    for name, mask in M_space.subsets.items():
        inside = np.array([bool(mask >> i & 1) for i in range(m)], dtype=bool)
        subsets[name] = sum(1 << i for i in range(n) if inside[arr[i]].all())
    return StructuredSpace(n, up, unary, rels, subsets, kind, labels)


def dual_space(profile, B: FiniteAlgebra, check: bool = True) -> DualSpace:
    profile = get_profile(profile)
    _need_duality(profile)
    if check:
        require_member(profile, B)
    M = profile.generator
    homs = tuple(h.map for h in homomorphisms(B, M))
    labels = ["h" + "".join(M.label(v) for v in h) if M.size <= 10 else str(i)
              for i, h in enumerate(homs)]
    space = _lift(profile.space, homs, profile.space_kind, labels) if homs else \
        StructuredSpace(0, [], {k: [] for k in profile.space.unary},
                        {k: [] for k in profile.space.rels},
                        {k: 0 for k in profile.space.subsets}, profile.space_kind)
    return DualSpace(space, homs, B)


@dataclass(frozen=True)
class DualAlgebra:
    algebra: FiniteAlgebra
    morphisms: tuple[tuple[int, ...], ...]   # element i is the morphism morphisms[i]
    space: StructuredSpace


def _pointwise_algebra(profile: VarietyProfile, rows: np.ndarray, name: str,
                       labels=None) -> FiniteAlgebra:
    """Operation tables for a set of maps closed under the pointwise operations."""
    M = profile.generator
    T = M.arrays()
    N = rows.shape[0]
    index = {r.tobytes(): i for i, r in enumerate(rows)}

    def lookup(values: np.ndarray, where: str):
        out = []
        for v in values:
            i = index.get(v.astype(rows.dtype).tobytes())
            if i is None:
                raise DualityError(f"closure failure: {where} leaves the morphism set")
            out.append(i)
        return out

    ops = {}
    for op, arity in M.signature.operations:
        if arity == 0:
            const = np.full(rows.shape[1], T[op], dtype=rows.dtype)
            ops[op] = lookup([const], op)[0]
        elif arity == 1:
            ops[op] = lookup(T[op][rows], op)
        else:
            t = T[op]
            table = []
            for i in range(N):
                table.append(lookup(t[rows[i][None, :], rows], f"{op} at row {i}"))
            ops[op] = table
    return FiniteAlgebra(M.signature, N, ops, name, labels)


def dual_algebra(profile, X: StructuredSpace, max_elements: int = TABLE_LIMIT) -> DualAlgebra:
    profile = get_profile(profile)
    _need_duality(profile)
    ok, axiom = check_space_axioms(X)
    if not ok:
        raise DualityError(f"space violates axiom {axiom}")
    maps = []
    for m in iter_morphisms(X, profile.space):
        maps.append(m)
        if len(maps) > max_elements:
            raise BudgetExceeded(f"dual algebra has more than {max_elements} elements", len(maps))
    maps.sort()
    rows = np.asarray(maps, dtype=np.uint8).reshape(len(maps), X.size)
    alg = _pointwise_algebra(profile, rows, f"A(X)")
    return DualAlgebra(alg, tuple(maps), X)


# ---------------------------------------------------------------- evaluation map

@dataclass(frozen=True)
class EvaluationMap:
    map: tuple[int, ...]
    is_isomorphism: bool
    dual: DualSpace
    double_dual: DualAlgebra
    reason: str = ""


def evaluation_map(profile, B: FiniteAlgebra) -> EvaluationMap:
    profile = get_profile(profile)
    X = dual_space(profile, B)
    A = dual_algebra(profile, X.space, max_elements=max(TABLE_LIMIT, 4 * B.size))
    index = {m: i for i, m in enumerate(A.morphisms)}
    mapping = []
    reason = ""
    for b in range(B.size):
        key = tuple(h[b] for h in X.homs)
        if key not in index:
            reason = f"e_B({B.label(b)}) is not a morphism of the dual space"
            mapping.append(-1)
        else:
            mapping.append(index[key])
    mapping = tuple(mapping)
    ok = not reason
    if ok and len(set(mapping)) != B.size:
        ok, reason = False, "not injective"
    if ok and len(mapping) != A.algebra.size:
        ok, reason = False, "not surjective"
    if ok and not is_homomorphism(B, A.algebra, mapping):
        ok, reason = False, "not a homomorphism"
    return EvaluationMap(mapping, ok, X, A, reason)


# ---------------------------------------------------------------- free algebras

class FreeAlgebra:
    """The free algebra on ``n`` generators of a profile, realized via the duality.

    For profiles without a direct duality (dl, dml, kl) the elements are
    those of the bar target's free algebra other than its two constants.
    """

    def __init__(self, profile, n: int, elements: np.ndarray | None = None):
        profile = get_profile(profile)
        self.profile = profile
        self.n = n
        self.bar = not profile.has_duality
        tp = profile.target()
        self.base = tp.generator
        points = tp.space.size ** n
        if points > 10 ** 7:
            raise BudgetExceeded(f"M~^{n} has {points} points", points)
        self.points = points
        m = tp.space.size
        # coords[p, i] = i-th coordinate of point p
        self.coords = (np.arange(points)[:, None] // (m ** np.arange(n))[None, :]) % m \
            if n else np.zeros((1, 0), dtype=np.int64)
        self._space = None
        self._elements = elements
        self._index = None
        self._algebra = None

    def __repr__(self):
        return f"<FreeAlgebra {self.profile.name}({self.n})>"

    @property
    def space(self) -> StructuredSpace:
        if self._space is None:
            self._space = space_power(self.profile.target().space, self.n)
        return self._space

    @property
    def elements(self) -> np.ndarray:
        if self._elements is None:
            self._elements = _free_elements(self.profile, self.n)
        return self._elements

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    @property
    def index(self) -> dict:
        if self._index is None:
            self._index = {r.tobytes(): i for i, r in enumerate(self.elements)}
        return self._index

    def element_index(self, values) -> int:
        v = np.asarray(values, dtype=np.uint8)
        try:
            return self.index[v.tobytes()]
        except KeyError:
            raise DualityError("value tuple is not an element of the free algebra") from None

    def projection(self, i: int) -> np.ndarray:
        return self.coords[:, i].astype(np.uint8)

    @property
    def generators(self) -> tuple[int, ...]:
        return tuple(self.element_index(self.projection(i)) for i in range(self.n))

    @property
    def algebra(self) -> FiniteAlgebra:
        if self._algebra is None:
            if self.size > TABLE_LIMIT:
                raise BudgetExceeded(f"free algebra has {self.size} elements; explicit tables "
                                     f"are limited to {TABLE_LIMIT}", self.size)
            # for bar profiles the generator is the reduct on the same carrier
            self._algebra = _pointwise_algebra(self.profile, self.elements,
                                               f"F_{self.profile.name}({self.n})")
        return self._algebra

    def evaluate(self, term: Term, variables: Sequence[str]) -> np.ndarray:
        """Value of ``term`` with the i-th variable sent to the i-th generator."""
        if len(variables) > self.n:
            raise EvaluationError("more variables than generators")
        env = {v: self.projection(i) for i, v in enumerate(variables)}
        sig = self.profile.signature
        T = self.base.arrays()
        P = self.points

        def ev(t):
            if isinstance(t, Var):
                if t.name not in env:
                    raise EvaluationError(f"unknown variable {t.name!r}")
                return env[t.name]
            if not sig.has(t.op):
                raise EvaluationError(f"operation {t.op!r} is not in signature {sig.name}")
            args = [ev(a) for a in t.args]
            if not args:
                return np.full(P, T[t.op], dtype=np.uint8)
            if len(args) == 1:
                return T[t.op][args[0]].astype(np.uint8)
            return T[t.op][args[0], args[1]].astype(np.uint8)

        return ev(term)

    def satisfies(self, clause: Clause, limit: int = ASSIGNMENT_LIMIT) -> Satisfaction:
        """Clause satisfaction with the last variable handled by numpy."""
        names = clause.variables()
        k = len(names)
        E = self.elements
        N = E.shape[0]
        count = N ** k
        if count > limit:
            raise BudgetExceeded(f"{N}^{k} = {count} assignments exceed the limit {limit}", count)
        sig = self.profile.signature
        T = self.base.arrays()
        index = {v: i for i, v in enumerate(names)}
        for op in clause.operations():
            if not sig.has(op):
                raise SignatureError(f"operation {op!r} is not in signature {sig.name}")

        def compile_(t):
            if isinstance(t, Var):
                i = index[t.name]
                return lambda env: env[i]
            tab = T[t.op]
            fs = [compile_(a) for a in t.args]
            if not fs:
                return lambda env: tab
            if len(fs) == 1:
                f = fs[0]
                return lambda env: tab[f(env)]
            f, g = fs
            return lambda env: tab[f(env), g(env)]

        def level(e: Identity):
            return max((index[v] for v in e.variables()), default=-1)

        prem = [(compile_(e.lhs), compile_(e.rhs), level(e)) for e in clause.premises]
        concl = [(compile_(e.lhs), compile_(e.rhs)) for e in clause.conclusions]
        last = k - 1

        def holds(f, g, env, vector):
            eq = np.equal(f(env), g(env))
            if vector:
                return np.broadcast_to(eq, (N, self.points)).all(axis=1)
            return bool(np.all(eq))

        env: list = [None] * k
        prefix = [[(f, g) for f, g, lv in prem if lv == i] for i in range(-1, k)]
        final = [(f, g) for f, g, lv in prem if lv == last] if k else []

        if not all(holds(f, g, env, False) for f, g in prefix[0]):
            return Satisfaction(True)
        if k == 0:
            if any(holds(f, g, env, False) for f, g in concl):
                return Satisfaction(True)
            return Satisfaction(False, ())

        assignment = [0] * k

        def rec(i):
            if i == last:
                env[i] = E
                mask = np.ones(N, dtype=bool)
                for f, g in final:
                    mask &= holds(f, g, env, True)
                for f, g in concl:
                    if not mask.any():
                        break
                    mask &= ~holds(f, g, env, True)
                hit = np.flatnonzero(mask)
                if len(hit):
                    assignment[i] = int(hit[0])
                    return True
                return False
            for v in range(N):
                env[i] = E[v]
                assignment[i] = v
                if all(holds(f, g, env, False) for f, g in prefix[i + 1]) and rec(i + 1):
                    return True
            return False

        if rec(0):
            return Satisfaction(False, tuple(zip(names, assignment)))
        return Satisfaction(True)


def _cache_path(profile: VarietyProfile, n: int) -> Path | None:
    if _cache_dir is None:
        return None
    return _cache_dir / f"free-{profile.name}-{n}.json"


def _checksum(rows: list) -> str:
    return hashlib.sha256(json.dumps(rows, separators=(",", ":")).encode()).hexdigest()


def _load_cached(profile: VarietyProfile, n: int):
    path = _cache_path(profile, n)
    if path is None or not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
        if data.get("format") != CACHE_FORMAT or data.get("profile") != profile.name \
                or data.get("n") != n or _checksum(data["elements"]) != data.get("checksum"):
            return None
        rows = np.asarray(data["elements"], dtype=np.uint8)
        return rows.reshape(len(data["elements"]), data["points"])
    except (OSError, ValueError, KeyError, TypeError):
        return None


def _store_cached(profile: VarietyProfile, n: int, rows: np.ndarray) -> None:
    path = _cache_path(profile, n)
    if path is None:
        return
    data = rows.tolist()
    payload = {"format": CACHE_FORMAT, "profile": profile.name, "n": n,
               "points": int(rows.shape[1]), "elements": data, "checksum": _checksum(data)}
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, separators=(",", ":")))
    os.replace(tmp, path)   # single writer; readers see either old or new file


def _free_elements(profile: VarietyProfile, n: int) -> np.ndarray:
    if profile.bar_target:
        if n < 1:
            raise DualityError(f"the free {profile.name} algebra needs at least one generator")
        rows = free_algebra(profile.bar_target, n).elements
        M = profile.target().generator
        bot, top = M.ops["bot"], M.ops["top"]
        keep = ~((rows == bot).all(axis=1) | (rows == top).all(axis=1))
        return rows[keep]
    points = profile.space.size ** n
    if points > FREE_POINT_LIMIT:
        raise BudgetExceeded(f"free algebra {profile.name}({n}) refused: M~^{n} has {points} "
                             f"points (limit {FREE_POINT_LIMIT})", points)
    cached = _load_cached(profile, n)
    if cached is not None:
        return cached
    P = space_power(profile.space, n)
    maps = []
    for m in iter_morphisms(P, profile.space):
        maps.append(m)
        if len(maps) > FREE_ELEMENT_LIMIT:
            raise BudgetExceeded(f"free algebra {profile.name}({n}) has more than "
                                 f"{FREE_ELEMENT_LIMIT} elements", len(maps))
    maps.sort()
    rows = np.asarray(maps, dtype=np.uint8).reshape(len(maps), points)
    _store_cached(profile, n, rows)
    return rows


def free_algebra(profile, n: int) -> FreeAlgebra:
    profile = get_profile(profile)
    key = (profile.name, n)
    if key not in _memo:
        fa = FreeAlgebra(profile, n)
        try:
            fa.elements  # force enumeration so budget errors surface here
        except BudgetExceeded as exc:
            _memo[key] = exc
            raise
        _memo[key] = fa
    got = _memo[key]
    if isinstance(got, BudgetExceeded):
        raise BudgetExceeded(str(got), got.count)
    return got


def identity_valid(profile, ident: Identity) -> bool:
    """Evaluate both sides at the free generators of F(k)."""
    profile = get_profile(profile)
    names = sorted(ident.variables())
    fa = _memo.get((profile.name, len(names)))
    if not isinstance(fa, FreeAlgebra):
        fa = FreeAlgebra(profile, len(names))
    return bool(np.array_equal(fa.evaluate(ident.lhs, names), fa.evaluate(ident.rhs, names)))


# ---------------------------------------------------------------- embeddings

@dataclass
class Embedding:
    """An embedding of B into F(n) obtained from a surjection eta: M~^n -> X(B).

    ``images[b]`` lists the values of the image of ``b`` at the points of
    M~^n.  ``bound_limited`` is set when the search stopped at a budget
    rather than proving that no surjection exists up to ``searched``.
    """
    found: bool
    n: int | None = None
    eta: tuple | None = None
    images: np.ndarray | None = None
    searched: int = -1
    bound_limited: bool = False
    note: str = ""

    def __bool__(self):
        return self.found


def _verify_embedding(M: FiniteAlgebra, B: FiniteAlgebra, images: np.ndarray) -> None:
    if len({r.tobytes() for r in images}) != B.size:
        raise DualityError("embedding witness is not one-to-one")
    T = M.arrays()
    for op, arity in B.signature.operations:
        t = B.ops[op]
        if arity == 0:
            ok = (images[t] == T[op]).all()
        elif arity == 1:
            ok = (images[list(t)] == T[op][images]).all()
        else:
            tb = np.asarray(t)
            ok = all((images[tb[x]] == T[op][images[x][None, :], images]).all()
                     for x in range(B.size))
        if not ok:
            raise DualityError(f"embedding witness does not preserve {op}")


def embeds_into_free(profile, B: FiniteAlgebra, n_cap: int | None = None,
                     max_nodes: int = SEARCH_NODES) -> Embedding:
    profile = get_profile(profile)
    if profile.bar_target:
        require_member(profile, B)
        res = embeds_into_free(profile.bar_target, add_bounds(B), n_cap, max_nodes)
        if res.found:
            res.images = res.images[1:-1]
        return res
    X = dual_space(profile, B)
    if n_cap is None:
        n_cap = X.space.size + 2
    M = profile.generator
    res = Embedding(False)
    for n in range(n_cap + 1):
        if profile.space.size ** n > FREE_POINT_LIMIT:
            res.bound_limited = True
            res.note = f"M~^{n} exceeds {FREE_POINT_LIMIT} points"
            return res
        P = space_power(profile.space, n)
        try:
            eta = surjective_morphism_exists(P, X.space, max_nodes=max_nodes)
        except SearchBudgetExceeded:
            res.bound_limited = True
            res.note = f"search budget exhausted at n={n}"
            return res
        res.searched = n
        if eta is not None:
            homs = np.asarray(X.homs, dtype=np.uint8)
            images = homs[list(eta.map)].T.copy()   # images[b, p] = eta(p)(b)
            _verify_embedding(M, B, images)
            return Embedding(True, n, eta.map, images, n)
    res.bound_limited = True
    res.note = f"no surjection for n <= {n_cap}"
    return res


@dataclass
class PowerEmbedding:
    found: bool
    parts: list = field(default_factory=list)     # (n_i, eta_i) pairs
    bound_limited: bool = False
    note: str = ""

    def __bool__(self):
        return self.found


def embeds_into_free_power(profile, B: FiniteAlgebra, n_cap: int | None = None,
                           parts_cap: int | None = None,
                           max_nodes: int = SEARCH_NODES) -> PowerEmbedding:
    """Cover X(B) by images of morphisms from powers of M~.

    The union of the images is the image of the induced map from the
    coproduct, so B embeds into the product of the corresponding free
    algebras.
    """
    profile = get_profile(profile)
    if profile.bar_target:
        require_member(profile, B)
        if B.is_trivial:
            return PowerEmbedding(True, [], note="trivial algebra: empty product")
        single = embeds_into_free(profile, B, n_cap, max_nodes)
        if single.found:
            return PowerEmbedding(True, [(single.n, single.eta)])
        return PowerEmbedding(False, bound_limited=single.bound_limited, note=single.note)
    X = dual_space(profile, B)
    S = X.space
    if n_cap is None:
        n_cap = S.size + 2
    if parts_cap is None:
        parts_cap = max(S.size, 1)
    covered = 0
    parts = []
    for x in range(S.size):
        if covered >> x & 1:
            continue
        if len(parts) >= parts_cap:
            return PowerEmbedding(False, parts, True, f"more than {parts_cap} parts needed")
        hit = None
        limited = False
        for n in range(n_cap + 1):
            if profile.space.size ** n > FREE_POINT_LIMIT:
                limited = True
                break
            try:
                hit = morphism_hitting(space_power(profile.space, n), S, x, max_nodes=max_nodes)
            except SearchBudgetExceeded:
                limited = True
                break
            if hit is not None:
                parts.append((n, hit.map))
                for v in hit.map:
                    covered |= 1 << v
                break
        if hit is None:
            return PowerEmbedding(False, parts, True,
                                  f"point {S.label(x)} not reached with n <= {n_cap}"
                                  + (" (budget)" if limited else ""))
    # verify the product embedding
    homs = np.asarray(X.homs, dtype=np.uint8).reshape(len(X.homs), B.size)
    if parts:
        images = np.concatenate([homs[list(eta)].T for _, eta in parts], axis=1)
        _verify_embedding(profile.generator, B, images)
    elif B.size != 1:
        raise DualityError("empty product can only receive the trivial algebra")
    return PowerEmbedding(True, parts)
