"""Enumeration of the finite members of a profile's quasivariety.

Every finite member of ISP(M) embeds in some finite power of M, so listing
subalgebras of M^k for k <= max_power gives all members that embed in
M^max_power.  A member of size s always embeds in M^(s(s-1)/2) (one
homomorphism per pair of elements), which is the bound reported as
sufficient.
"""

from __future__ import annotations

from .algebra import FiniteAlgebra, closure, direct_power, is_isomorphic, iso_key, restrict, \
    trivial_algebra
from .errors import BudgetExceeded
from .profiles import get_profile

SUBUNIVERSE_LIMIT = 200_000

_memo: dict = {}


class MemberList(list):
    """A list of algebras plus the bounds used to produce it."""

    def __init__(self, items=(), max_power=0, max_size=0):
        super().__init__(items)
        self.max_power = max_power
        self.max_size = max_size

    @property
    def power_bound_sufficient(self) -> bool:
        return self.max_power >= max(1, self.max_size * (self.max_size - 1) // 2)

    def bounds(self) -> dict:
        return {"max_power": self.max_power, "max_size": self.max_size,
                "power_bound_sufficient": self.power_bound_sufficient}


def subuniverses(alg: FiniteAlgebra, max_size: int, limit: int = SUBUNIVERSE_LIMIT) -> list[tuple[int, ...]]:
    """Non-empty subuniverses of size <= max_size, in discovery order."""
    start = tuple(closure(alg, []))
    seen: set = set()
    order: list = []
    queue = []
    if start:
        seen.add(start)
        queue.append(start)
    else:
        for e in range(alg.size):
            s = tuple(closure(alg, [e]))
            if len(s) <= max_size and s not in seen:
                seen.add(s)
                queue.append(s)
    i = 0
    while i < len(queue):
        s = queue[i]
        i += 1
        order.append(s)
        present = set(s)
        for e in range(alg.size):
            if e in present:
                continue
            t = tuple(closure(alg, list(s) + [e]))
            if len(t) <= max_size and t not in seen:
                seen.add(t)
                queue.append(t)
                if len(seen) > limit:
                    raise BudgetExceeded(f"more than {limit} subuniverses", len(seen))
    return [s for s in order if len(s) <= max_size]


def enumerate_members(profile, max_power: int = 2, max_size: int = 8) -> MemberList:
    profile = get_profile(profile)
    if max_power < 0 or max_size < 1:
        raise ValueError("budgets must be positive")
    key = (profile.name, max_power, max_size)
    if key in _memo:
        return MemberList(_memo[key], max_power, max_size)
    M = profile.generator
    candidates = [(1, 0, 0, trivial_algebra(profile.signature, "trivial"))]
    for k in range(1, max_power + 1):
        P = direct_power(M, k)
        for j, s in enumerate(subuniverses(P, max_size)):
            if len(s) == P.size:
                name = M.name if k == 1 else f"{M.name}^{k}"
            else:
                name = f"{M.name}^{k}" if k > 1 else M.name
                name += "{" + ",".join(P.label(e) for e in s) + "}"
            sub, _ = restrict(P, s, name)
            candidates.append((len(s), k, j, sub))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    kept: list[FiniteAlgebra] = []
    buckets: dict = {}
    for _, _, _, alg in candidates:
        bucket = buckets.setdefault(iso_key(alg), [])
        if any(is_isomorphic(alg, other) is not None for other in bucket):
            continue
        bucket.append(alg)
        kept.append(alg)
    _memo[key] = tuple(kept)
    return MemberList(kept, max_power, max_size)
