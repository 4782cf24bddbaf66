"""Membership in IS(F) and ISP(F), admissibility verdicts, completeness
classification and the cross-route verification suite.

Three independent routes decide membership of a finite algebra B:

* clause:  B satisfies the profile's basis clauses (resp. quasi-identities);
* dual:    a combinatorial condition on the dual space X(B);
* witness: an explicit embedding into F(n) (resp. a product of such),
           searched for up to a bound; absence is only bound-limited.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import FiniteAlgebra, add_bounds, require_member
from .clauses import REGISTRY, satisfies
from .duality import (DualityError, FreeAlgebra, _pointwise_algebra, dual_space, embeds_into_free,
                      embeds_into_free_power, evaluation_map, free_algebra)
from .errors import BudgetExceeded, SignatureError
from .members import enumerate_members
from .profiles import VarietyProfile, get_profile
from .spaces import StructuredSpace, bits, space_power
from .syntax import Clause, print_clause

SUBSET_LIMIT = 1 << 16
FREE_CAP = 2
CLOSURE_LIMIT = 5_000


# ---------------------------------------------------------------- dual criteria


def dual_is_criterion(kind: str, X: StructuredSpace) -> tuple[bool, str]:
    """Finite dual condition for B in IS(F), by space kind."""
    if X.size == 0:
        return False, "dual space is empty"
    if kind == "stone":
        return True, ""
    if kind == "kleene":
        if X.top() is None:
            return False, "no top element"
        mins = sum(1 << i for i in X.minimal())
        if X.subsets["Y"] != mins:
            return False, "Y differs from the set of minimal elements"
        return True, ""
    failed = []
    if X.bottom() is None or X.top() is None:
        failed.append("not bounded")
    if kind == "demorgan":
        f = X.unary["f"]
        if not any(f[x] == x for x in range(X.size)):
            failed.append("no f-fixpoint")
    return not failed, "; ".join(failed)


def dual_isp_criterion(kind: str, X: StructuredSpace) -> tuple[bool, str]:
    """Finite dual condition for B in ISP(F), by space kind."""
    if kind == "demorgan":
        f = X.unary["f"]
        fixed = sum(1 << z for z in range(X.size) if f[z] == z)
        for x in X.minimal():
            if not X.up[x] & fixed:
                return False, f"(a) fails at minimal point {X.label(x)}"
        for x in range(X.size):
            if not X.down[x] & X.down[f[x]]:
                return False, f"(b) fails at point {X.label(x)}"
        return True, ""
    if kind == "kleene":
        mins = sum(1 << i for i in X.minimal())
        if X.subsets["Y"] != mins:
            return False, "Y differs from the set of minimal elements"
        return True, ""
    return True, ""


# ---------------------------------------------------------------- membership

@dataclass
class RouteResult:
    route: str
    result: bool | None          # None: witness search was bound-limited
    evidence: str = ""


@dataclass
class MembershipVerdict:
    algebra: FiniteAlgebra
    question: str                # "IS" or "ISP"
    route: str
    result: bool
    evidence: str
    routes: list[RouteResult] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        decided = {r.result for r in self.routes if r.route != "witness" and r.result is not None}
        if len(decided) > 1:
            return False
        w = [r for r in self.routes if r.route == "witness"]
        return not (w and w[0].result is True and not self.result)

    def __bool__(self):
        return self.result

    def to_json(self) -> dict:
        return {"algebra": self.algebra.name, "size": self.algebra.size, "question": self.question,
                "result": self.result,
                "routes": [{"route": r.route, "result": r.result, "evidence": r.evidence}
                           for r in self.routes]}


def _clause_route(profile: VarietyProfile, B: FiniteAlgebra, ids) -> RouteResult:
    for cid in ids:
        s = satisfies(B, REGISTRY[cid].clause)
        if not s:
            return RouteResult("clause", False, f"{cid} fails at {s.describe(B)}")
    return RouteResult("clause", True, "satisfies " + (", ".join(ids) if ids else "no conditions"))


def _dual_route(profile: VarietyProfile, B: FiniteAlgebra, question: str) -> RouteResult:
    if profile.bar_target:
        target = profile.target()
        if question == "ISP":
            if profile.name == "dl":
                return RouteResult("dual", True, "every distributive lattice")
            if B.is_trivial:
                return RouteResult("dual", True, "trivial algebra")
        X = dual_space(target, add_bounds(B)).space
        ok, why = dual_is_criterion(target.space_kind, X)
        return RouteResult("dual", ok, why or "criterion holds on X(bar B)")
    X = dual_space(profile, B).space
    crit = dual_is_criterion if question == "IS" else dual_isp_criterion
    ok, why = crit(profile.space_kind, X)
    return RouteResult("dual", ok, why or f"criterion holds on X(B) ({X.size} points)")


def member_IS_free(profile, B: FiniteAlgebra, n_cap: int | None = None,
                   witness: bool = False) -> MembershipVerdict:
    profile = get_profile(profile)
    require_member(profile, B)
    routes = [_clause_route(profile, B, profile.basis_clauses), _dual_route(profile, B, "IS")]
    if witness:
        emb = embeds_into_free(profile, B, n_cap)
        if emb.found:
            routes.append(RouteResult("witness", True, f"embeds into F({emb.n})"))
        else:
            routes.append(RouteResult("witness", None, emb.note or "no embedding found"))
    dual = routes[1]
    return MembershipVerdict(B, "IS", "dual", bool(dual.result), dual.evidence, routes)


def member_ISP_free(profile, B: FiniteAlgebra, n_cap: int | None = None,
                    witness: bool = False) -> MembershipVerdict:
    profile = get_profile(profile)
    require_member(profile, B)
    routes = [_clause_route(profile, B, profile.basis_quasi), _dual_route(profile, B, "ISP")]
    if witness:
        emb = embeds_into_free_power(profile, B, n_cap)
        if emb.found:
            desc = " x ".join(f"F({n})" for n, _ in emb.parts) or "the empty product"
            routes.append(RouteResult("witness", True, f"embeds into {desc}"))
        else:
            routes.append(RouteResult("witness", None, emb.note or "no embedding found"))
    dual = routes[1]
    return MembershipVerdict(B, "ISP", "dual", bool(dual.result), dual.evidence, routes)


# ---------------------------------------------------------------- admissibility

@dataclass
class AdmissibilityVerdict:
    clause: Clause
    verdict: str                          # admissible | not_admissible | unknown
    counterexample: FiniteAlgebra | None = None
    assignment: tuple = ()
    source: str = ""
    bounds: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"clause": print_clause(self.clause), "verdict": self.verdict,
                               "bounds": self.bounds}
        if self.counterexample is not None:
            out["counterexample"] = {
                "algebra": self.counterexample.name, "size": self.counterexample.size,
                "source": self.source,
                "assignment": {v: self.counterexample.label(i) for v, i in self.assignment}}
        return out

    def describe(self) -> str:
        if self.verdict != "not_admissible":
            return self.verdict
        a = ", ".join(f"{v}:={self.counterexample.label(i)}" for v, i in self.assignment)
        where = f" at {a}" if a else ""
        return f"not_admissible; counterexample {self.counterexample.name} ({self.source}){where}"


def _check_clause_signature(profile: VarietyProfile, clause: Clause):
    for op in clause.operations():
        if not profile.signature.has(op):
            raise SignatureError(f"operation {op!r} is not in signature {profile.name}")


def _closed_subsets(points: list[int], gen: dict[int, int], limit: int):
    """Subsets of ``points`` closed under ``gen`` (p in S implies gen[p] within S)."""
    count = 0

    def rec(i: int, chosen: int, banned: int):
        nonlocal count
        if i == len(points):
            count += 1
            if count > limit:
                raise BudgetExceeded(f"more than {limit} candidate substructures", count)
            yield chosen
            return
        p = points[i]
        bit = 1 << p
        if chosen & bit:
            yield from rec(i + 1, chosen, banned)
            return
        if not banned & bit:
            g = gen[p]
            if not g & banned:
                yield from rec(i + 1, chosen | g, banned)
        # exclude p: every point generating p is excluded too
        yield from rec(i + 1, chosen, banned | bit)

    yield from rec(0, 0, 0)


def _generated_rows(profile: VarietyProfile, gens: np.ndarray, limit: int) -> np.ndarray:
    """Closure of the rows ``gens`` under the pointwise operations of M."""
    M = profile.generator
    T = M.arrays()
    width = gens.shape[1]
    rows = [np.full(width, T[o], dtype=np.uint8) for o, a in M.signature.operations if a == 0]
    rows += list(gens)
    seen = {}
    order = []
    for r in rows:
        k = r.tobytes()
        if k not in seen:
            seen[k] = len(order)
            order.append(r)
    unary = [T[o] for o, a in M.signature.operations if a == 1]
    binary = [T[o] for o, a in M.signature.operations if a == 2]
    i = 0
    while i < len(order):
        x = order[i]
        new = [t[x] for t in unary]
        for t in binary:
            for y in order[: i + 1]:
                new.append(t[x, y])
                new.append(t[y, x])
        for v in new:
            v = v.astype(np.uint8)
            k = v.tobytes()
            if k not in seen:
                seen[k] = len(order)
                order.append(v)
                if len(order) > limit:
                    raise BudgetExceeded(f"generated algebra exceeds {limit} elements", len(order))
        i += 1
    arr = np.asarray(order, dtype=np.uint8).reshape(len(order), width)
    return arr[np.lexsort(arr.T[::-1])]


@dataclass
class _ExactResult:
    complete: bool
    algebra: FiniteAlgebra | None = None
    generators: tuple = ()
    examined: int = 0
    note: str = ""


def _exact_search(profile: VarietyProfile, clause: Clause, limit: int) -> _ExactResult:
    """Search the k-generated members of IS(F) for a refutation at the generators.

    A k-generated B in IS(F) is the restriction of F(k) to a subset S of
    M~^k closed under the unary maps, with X(B) isomorphic to S.  So the
    clause fails in some such B iff some closed S inside the premise set
    meets the complement of every conclusion and satisfies the dual IS
    criterion.
    """
    target = profile.target()
    names = clause.variables()
    if profile.bar_target and not names:
        # without constants a member needs at least one generator
        names = ["_"]
    k = len(names)
    try:
        fa = FreeAlgebra(profile, k)
        if fa.points > 4096:
            return _ExactResult(False, note=f"M~^{k} has {fa.points} points")
        values = {}

        def holds(e):
            return np.asarray(fa.evaluate(e.lhs, names) == fa.evaluate(e.rhs, names))
    except BudgetExceeded as exc:
        return _ExactResult(False, note=str(exc))
    P = np.ones(fa.points, dtype=bool)
    for e in clause.premises:
        P &= holds(e)
    outside = [~holds(e) for e in clause.conclusions]
    space = space_power(target.space, k)
    # points whose unary orbit stays inside the premise set
    gen = {}
    for p in range(space.size):
        g, todo = 0, [p]
        while todo:
            q = todo.pop()
            if g >> q & 1:
                continue
            g |= 1 << q
            todo.extend(t[q] for t in space.unary.values())
        gen[p] = g
    inside = [p for p in range(space.size) if all(P[q] for q in bits(gen[p]))]
    out_masks = [sum(1 << int(p) for p in np.flatnonzero(o)) for o in outside]
    bar_masks = ()
    if profile.bar_target:
        M = target.generator
        coords = fa.coords
        T = M.arrays()
        lo = np.full(fa.points, M.ops["top"])
        hi = np.full(fa.points, M.ops["bot"])
        for i in range(k):
            lit = coords[:, i]
            lo = T["meet"][lo, lit]
            hi = T["join"][hi, lit]
            if "neg" in T:
                lo = T["meet"][lo, T["neg"][lit]]
                hi = T["join"][hi, T["neg"][lit]]
        bar_masks = (sum(1 << int(p) for p in np.flatnonzero(lo != M.ops["bot"])),
                     sum(1 << int(p) for p in np.flatnonzero(hi != M.ops["top"])))
    examined = 0
    try:
        for S in _closed_subsets(inside, gen, limit):
            examined += 1
            if any(not S & m for m in out_masks):
                continue
            if bar_masks and (not S & bar_masks[0] or not S & bar_masks[1]):
                continue
            if not _is_criterion_on_subset(target.space_kind, space, S):
                continue
            pts = list(bits(S))
            return _ExactResult(True, *_build_counterexample(profile, fa, pts, k), examined=examined)
    except BudgetExceeded as exc:
        return _ExactResult(False, examined=examined, note=str(exc))
    return _ExactResult(True, examined=examined)


def _is_criterion_on_subset(kind: str, X: StructuredSpace, S: int) -> bool:
    """dual_is_criterion on the substructure induced by the bitmask S, without building it."""
    if not S:
        return False
    pts = list(bits(S))
    has_top = any(X.down[x] & S == S for x in pts)
    if kind == "stone":
        return True
    if kind == "kleene":
        mins = sum(1 << x for x in pts if X.down[x] & S == 1 << x)
        return has_top and X.subsets["Y"] & S == mins
    if not has_top or not any(X.up[x] & S == S for x in pts):
        return False
    if kind == "demorgan":
        f = X.unary["f"]
        return any(f[x] == x for x in pts)
    return True


def _build_counterexample(profile: VarietyProfile, fa: FreeAlgebra, pts: list[int], k: int):
    gens = np.asarray([fa.coords[pts, i] for i in range(k)], dtype=np.uint8).reshape(k, len(pts))
    rows = _generated_rows(profile, gens, CLOSURE_LIMIT)
    alg = _pointwise_algebra(profile, rows, f"{profile.generator.name}^{len(pts)}-sub",
                             None)
    index = {r.tobytes(): i for i, r in enumerate(rows)}
    gidx = tuple(index[g.tobytes()] for g in gens)
    return alg, gidx


def admissible_clause(profile, clause: Clause, max_power: int = 2, max_size: int = 8,
                      free_cap: int = FREE_CAP, subset_limit: int = SUBSET_LIMIT) -> AdmissibilityVerdict:
    profile = get_profile(profile)
    _check_clause_signature(profile, clause)
    names = clause.variables()
    bounds: dict[str, Any] = {"max_power": max_power, "max_size": max_size, "free_cap": free_cap}

    # 1. enumerated members lying in IS(F)
    members = enumerate_members(profile, max_power, max_size)
    bounds["members"] = len(members)
    bounds["power_bound_sufficient"] = members.power_bound_sufficient
    for B in members:
        if not member_IS_free(profile, B).result:
            continue
        s = satisfies(B, clause)
        if not s:
            return AdmissibilityVerdict(clause, "not_admissible", B, s.assignment, "member", bounds)

    # 2. exact search over k-generated members of IS(F)
    exact = _exact_search(profile, clause, subset_limit)
    bounds["exact_search"] = {"complete": exact.complete, "examined": exact.examined}
    if exact.note:
        bounds["exact_search"]["note"] = exact.note
    if exact.algebra is not None:
        B = exact.algebra
        if not member_IS_free(profile, B).result:
            raise DualityError("exact search produced a non-member counterexample")
        s = satisfies(B, clause)
        if s:
            raise DualityError("exact search counterexample satisfies the clause")
        B.name = _name_counterexample(profile, B)
        return AdmissibilityVerdict(clause, "not_admissible", B, s.assignment, "generated", bounds)

    # 3. direct check in small free algebras
    for m in range(max(1, len(names)), max(free_cap, len(names)) + 1):
        try:
            fa = free_algebra(profile, m)
            s = fa.satisfies(clause)
        except BudgetExceeded as exc:
            bounds["free_check"] = f"stopped at F({m}): {exc}"
            break
        if not s:
            if exact.complete:
                raise DualityError(f"F({m}) refutes a clause the exact search accepted")
            alg = fa.algebra
            return AdmissibilityVerdict(clause, "not_admissible", alg, s.assignment, f"F({m})", bounds)
    if exact.complete:
        return AdmissibilityVerdict(clause, "admissible", bounds=bounds)
    return AdmissibilityVerdict(clause, "unknown", bounds=bounds)


def _name_counterexample(profile: VarietyProfile, B: FiniteAlgebra) -> str:
    for M in enumerate_members(profile, 2, 8):
        if M.size == B.size:
            from .algebra import is_isomorphic
            if is_isomorphic(M, B) is not None:
                return M.name
    return f"generated {profile.name} algebra of size {B.size}"


def admissible_quasi_exact(profile, q: Clause, limit: int | None = None) -> bool:
    """Validity of a quasi-identity in F(n0), which equals admissibility."""
    profile = get_profile(profile)
    if len(q.conclusions) != 1:
        raise SignatureError("admissible_quasi_exact needs a quasi-identity (exactly one conclusion)")
    _check_clause_signature(profile, q)
    if not q.premises:
        # positive: valid iff the identity holds in F(k); no assignment search needed
        from .duality import identity_valid
        return identity_valid(profile, q.conclusions[0])
    from .duality import ASSIGNMENT_LIMIT, FREE_ELEMENT_LIMIT
    k = len(q.variables())
    try:
        fa = free_algebra(profile, profile.n0)
    except BudgetExceeded as exc:
        # the free algebra could not even be listed; report a lower bound on the assignments
        count = (FREE_ELEMENT_LIMIT + 1) ** k
        raise BudgetExceeded(f"{exc}; so at least {count} assignments would be needed", count) from None
    return fa.satisfies(q, limit if limit is not None else ASSIGNMENT_LIMIT).holds


# ---------------------------------------------------------------- classification

def classify_completeness(profile, max_power: int = 2, max_size: int = 8) -> dict:
    profile = get_profile(profile)
    members = enumerate_members(profile, max_power, max_size)
    out = {"profile": profile.name, "bounds": members.bounds(), "members_checked": len(members),
           "structurally_complete": True, "universally_complete": True,
           "non_negative_universally_complete": True, "failures": {},
           "not_in_IS": [], "not_in_ISP": []}
    for B in members:
        is_v = member_IS_free(profile, B)
        isp_v = member_ISP_free(profile, B)
        if not is_v.result:
            out["not_in_IS"].append(B.name)
        if not isp_v.result:
            out["not_in_ISP"].append(B.name)
        if not isp_v.result and out["structurally_complete"]:
            out["structurally_complete"] = False
            out["failures"]["structurally_complete"] = f"{B.name} not in ISP(F): {isp_v.evidence}"
        if not is_v.result and out["universally_complete"]:
            out["universally_complete"] = False
            out["failures"]["universally_complete"] = f"{B.name} not in IS(F): {is_v.evidence}"
        if not is_v.result and not B.is_trivial and out["non_negative_universally_complete"]:
            out["non_negative_universally_complete"] = False
            out["failures"]["non_negative_universally_complete"] = \
                f"{B.name} not in IS(F): {is_v.evidence}"
    return out


# ---------------------------------------------------------------- verification suite

def _lemma_checks(profile: VarietyProfile, B: FiniteAlgebra) -> list[tuple[str, bool, bool]]:
    """(statement, clause side, dual side) for the finer per-lemma equivalences."""
    def sat(*ids):
        return all(satisfies(B, REGISTRY[c].clause).holds for c in ids)

    out = []
    if profile.bar_target:
        if profile.name == "dml":
            out.append(("C5 iff trivial or C4", sat("C5"), B.is_trivial or sat("C4")))
        if profile.name == "kl":
            out.append(("C8 iff trivial or (C4 and C8)", sat("C8"),
                        B.is_trivial or sat("C4", "C8")))
        return out
    X = dual_space(profile, B).space
    if profile.name in ("bdl", "st"):
        out.append(("C1 iff X non-empty", sat("C1"), X.size > 0))
    if profile.name == "dma":
        f = X.unary["f"]
        out.append(("C4 iff f has a fixpoint", sat("C4"), any(f[x] == x for x in range(X.size))))
        fixed = sum(1 << z for z in range(X.size) if f[z] == z)
        cond_a = all(X.up[x] & fixed for x in X.minimal())
        cond_b = all(X.down[x] & X.down[f[x]] for x in range(X.size))
        out.append(("C6 iff every minimal point lies below a fixpoint", sat("C6"), cond_a))
        out.append(("C7 iff every x has a lower bound of x and f(x)", sat("C7"), cond_b))
    if profile.name == "ka" and not B.is_trivial:
        mins = sum(1 << i for i in X.minimal())
        out.append(("C1 iff X non-empty", sat("C1"), X.size > 0))
        out.append(("C1 and C3 iff X has a top", sat("C1", "C3"), X.top() is not None))
        out.append(("C1 and C8 iff Y = min(X) non-empty", sat("C1", "C8"),
                    X.size > 0 and X.subsets["Y"] == mins))
    return out


def _check_member(args) -> dict:
    profile_name, B, n_cap = args
    profile = get_profile(profile_name)
    entry: dict[str, Any] = {"algebra": B.name, "size": B.size}
    problems: list[str] = []
    limited: list[str] = []
    if profile.has_duality:
        ev = evaluation_map(profile, B)
        entry["evaluation_map_iso"] = ev.is_isomorphism
        if not ev.is_isomorphism:
            problems.append(f"evaluation map is not an isomorphism: {ev.reason}")
    for question, fn in (("IS", member_IS_free), ("ISP", member_ISP_free)):
        v = fn(profile, B, n_cap, witness=True)
        entry[question] = v.to_json()
        routes = {r.route: r for r in v.routes}
        if routes["clause"].result != routes["dual"].result:
            problems.append(f"{question}: clause route {routes['clause'].result} "
                            f"({routes['clause'].evidence}) vs dual route {routes['dual'].result} "
                            f"({routes['dual'].evidence})")
        w = routes["witness"]
        if w.result is True and not routes["dual"].result:
            problems.append(f"{question}: witness found but dual route says false")
        if w.result is None and routes["dual"].result:
            limited.append(f"{question}: {w.evidence}")
    lemmas = []
    for statement, lhs, rhs in _lemma_checks(profile, B):
        lemmas.append({"statement": statement, "clause": lhs, "dual": rhs})
        if lhs != rhs:
            problems.append(f"{statement}: clause side {lhs}, dual side {rhs}")
    entry["lemmas"] = lemmas
    entry["disagreements"] = problems
    entry["bound_limited"] = limited
    return entry


def verify_lemma_suite(profile, max_power: int = 2, max_size: int = 8, n_cap: int | None = None,
                       jobs: int = 1) -> dict:
    profile = get_profile(profile)
    members = enumerate_members(profile, max_power, max_size)
    tasks = [(profile.name, B, n_cap) for B in members]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_check_member, tasks))
    else:
        entries = [_check_member(t) for t in tasks]
    disagreements = [f"{e['algebra']}: {p}" for e in entries for p in e["disagreements"]]
    limited = [f"{e['algebra']}: {p}" for e in entries for p in e["bound_limited"]]
    bounds = members.bounds()
    bounds["n_cap"] = n_cap
    return {"profile": profile.name, "bounds": bounds, "members_checked": len(members),
            "disagreements": disagreements, "bound_limited": limited, "verdicts": entries}
