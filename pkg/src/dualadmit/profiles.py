"""Built-in generator algebras, their alter-ego spaces and the seven profiles."""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import SIGNATURES, FiniteAlgebra, Signature, lattice_reduct
from .errors import WorkbenchError
from .spaces import StructuredSpace, check_space_axioms


def _chain_tables(n: int):
    meet = [[min(i, j) for j in range(n)] for i in range(n)]
    join = [[max(i, j) for j in range(n)] for i in range(n)]
    return meet, join


def two() -> FiniteAlgebra:
    m, j = _chain_tables(2)
    return FiniteAlgebra("bdl", 2, {"meet": m, "join": j, "bot": 0, "top": 1}, "2", ["0", "1"])


def stone_s() -> FiniteAlgebra:
    # carrier 0 < a < 1
    m, j = _chain_tables(3)
    return FiniteAlgebra("st", 3, {"meet": m, "join": j, "star": [2, 0, 0], "bot": 0, "top": 2},
                         "S", ["0", "a", "1"])


def demorgan_d() -> FiniteAlgebra:
    # carrier 0, a, b, 1 with a, b incomparable
    labels = ["0", "a", "b", "1"]
    le = {(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 3), (2, 2), (2, 3), (3, 3)}
    meet = [[0] * 4 for _ in range(4)]
    join = [[0] * 4 for _ in range(4)]
    for x in range(4):
        for y in range(4):
            lower = [z for z in range(4) if (z, x) in le and (z, y) in le]
            upper = [z for z in range(4) if (x, z) in le and (y, z) in le]
            meet[x][y] = max(lower, key=lambda z: sum((w, z) in le for w in range(4)))
            join[x][y] = min(upper, key=lambda z: sum((w, z) in le for w in range(4)))
    return FiniteAlgebra("dma", 4, {"meet": meet, "join": join, "neg": [3, 1, 2, 0],
                                    "bot": 0, "top": 3}, "D", labels)


def kleene_k() -> FiniteAlgebra:
    m, j = _chain_tables(3)
    return FiniteAlgebra("ka", 3, {"meet": m, "join": j, "neg": [2, 1, 0], "bot": 0, "top": 2},
                         "K", ["0", "a", "1"])


def two_space() -> StructuredSpace:
    return StructuredSpace.from_pairs(2, [(0, 1)], kind="priestley", labels=["0", "1"])


def stone_space() -> StructuredSpace:
    # 1 <= a; d(0)=0, d(a)=1, d(1)=1
    return StructuredSpace.from_pairs(3, [(2, 1)], unary={"d": [0, 2, 2]}, kind="stone",
                                      labels=["0", "a", "1"])


def demorgan_space() -> StructuredSpace:
    # a <= 0, 1 <= b; f swaps a and b
    return StructuredSpace.from_pairs(4, [(1, 0), (1, 3), (0, 2), (3, 2)],
                                      unary={"f": [0, 2, 1, 3]}, kind="demorgan",
                                      labels=["0", "a", "b", "1"])


def kleene_space() -> StructuredSpace:
    # 0 <= a, 1 <= a; sim is everything except (0,1), (1,0); Y = {0, 1}
    sim = [(i, j) for i in range(3) for j in range(3) if {i, j} != {0, 2}]
    return StructuredSpace.from_pairs(3, [(0, 1), (2, 1)], rels={"sim": sim},
                                      subsets={"Y": [0, 2]}, kind="kleene",
                                      labels=["0", "a", "1"])


@dataclass(frozen=True)
class VarietyProfile:
    name: str
    signature: Signature
    generator: FiniteAlgebra
    space: StructuredSpace | None
    space_kind: str
    basis_clauses: tuple[str, ...]
    basis_quasi: tuple[str, ...]
    n0: int
    bar_target: str | None = None
    description: str = field(default="", compare=False)

    @property
    def has_duality(self) -> bool:
        return self.bar_target is None

    def target(self) -> "VarietyProfile":
        return get_profile(self.bar_target) if self.bar_target else self

    def __repr__(self):
        return f"<VarietyProfile {self.name}>"


def _build() -> dict[str, VarietyProfile]:
    two_a, s, d, k = two(), stone_s(), demorgan_d(), kleene_k()
    out = {
        "bdl": VarietyProfile("bdl", SIGNATURES["bdl"], two_a, two_space(), "priestley",
                              ("C1", "C2", "C3"), (), 2,
                              description="bounded distributive lattices"),
        "st": VarietyProfile("st", SIGNATURES["st"], s, stone_space(), "stone",
                             ("C1",), (), 3, description="Stone algebras"),
        "dma": VarietyProfile("dma", SIGNATURES["dma"], d, demorgan_space(), "demorgan",
                              ("C3", "C4"), ("C6", "C7"), 4, description="De Morgan algebras"),
        "ka": VarietyProfile("ka", SIGNATURES["ka"], k, kleene_space(), "kleene",
                             ("C1", "C3", "C8"), ("C8",), 3, description="Kleene algebras"),
    }
    for name, target, base, clauses, quasi, desc in (
            ("dl", "bdl", two_a, (), (), "distributive lattices"),
            ("dml", "dma", d, ("C4",), ("C5",), "De Morgan lattices"),
            ("kl", "ka", k, ("C4", "C8"), ("C8",), "Kleene lattices")):
        gen = lattice_reduct(base, name)
        out[name] = VarietyProfile(name, SIGNATURES[name], gen, out[target].space,
                                   out[target].space_kind, clauses, quasi, gen.size,
                                   bar_target=target, description=desc)
    for p in out.values():
        ok, axiom = check_space_axioms(p.space)
        if not ok:
            raise WorkbenchError(f"built-in space for {p.name} violates {axiom}")
    return out


PROFILES = _build()
PROFILE_NAMES = ("bdl", "dl", "st", "dma", "dml", "ka", "kl")


def get_profile(name) -> VarietyProfile:
    if isinstance(name, VarietyProfile):
        return name
    try:
        return PROFILES[name]
    except KeyError:
        raise WorkbenchError(f"unknown profile {name!r}; choose from {', '.join(PROFILE_NAMES)}") from None


NAMED_ALGEBRAS = {"2": ("bdl", two), "S": ("st", stone_s), "D": ("dma", demorgan_d),
                  "K": ("ka", kleene_k)}
