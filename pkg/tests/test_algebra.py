import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_homs, raw_generator
from dualadmit.algebra import (FiniteAlgebra, add_bounds, closure, compose, direct_power,
                               direct_product, eval_term, homomorphisms, is_homomorphism, is_isomorphic,
                               lattice_reduct, product_coordinates, require_member, subalgebra_generated,
                               trivial_algebra, validate_variety)
from dualadmit.errors import EvaluationError, SignatureError, VarietyError
from dualadmit.profiles import PROFILES, demorgan_d, kleene_k, stone_s, two
from dualadmit.syntax import parse_term

GENERATORS = {"bdl": two, "st": stone_s, "dma": demorgan_d, "ka": kleene_k}


@pytest.mark.parametrize("name", sorted(PROFILES))
def test_generators_belong_to_their_variety(name):
    p = PROFILES[name]
    assert validate_variety(p, p.generator).ok


def test_eval_term():
    K = kleene_k()
    t = parse_term("~x /\\ (y \\/ bot)")
    assert eval_term(K, t, {"x": 0, "y": 1}) == 1
    with pytest.raises(EvaluationError):
        eval_term(K, t, {"x": 0})
    with pytest.raises(EvaluationError):
        eval_term(K, parse_term("x*"), {"x": 0})


def test_table_validation():
    with pytest.raises(SignatureError):
        FiniteAlgebra("bdl", 2, {"meet": [[0, 0], [0, 1]], "join": [[0, 1], [1, 1]], "bot": 0})
    with pytest.raises(SignatureError):
        FiniteAlgebra("bdl", 2, {"meet": [[0, 0], [0, 2]], "join": [[0, 1], [1, 1]],
                                 "bot": 0, "top": 1})


@pytest.mark.parametrize("a,b", [("bdl", "bdl"), ("st", "st"), ("dma", "dma"), ("ka", "ka")])
def test_homomorphisms_match_brute_force(a, b):
    A, B = GENERATORS[a](), GENERATORS[b]()
    got = [h.map for h in homomorphisms(A, B)]
    assert got == sorted(all_homs(*raw_generator(a), *raw_generator(b)))


def test_homomorphisms_D_to_D():
    assert [h.map for h in homomorphisms(demorgan_d(), demorgan_d())] == [(0, 1, 2, 3), (0, 2, 1, 3)]


def test_homomorphisms_into_square_brute_force():
    K = kleene_k()
    K2 = direct_power(K, 2)
    size, ops = raw_generator("ka")
    raw2 = {o: (K2.ops[o] if isinstance(K2.ops[o], int) else [list(r) if isinstance(r, tuple) else r
                                                                for r in K2.ops[o]])
            for o in K2.ops}
    assert sorted(h.map for h in homomorphisms(K, K2)) == sorted(all_homs(size, ops, K2.size, raw2))


def test_subalgebra_generated():
    D = demorgan_d()
    assert closure(D, []) == [0, 3]
    sub, inc = subalgebra_generated(D, [1])
    assert sub.size == 3 and inc.is_valid() and inc.injective
    K = kleene_k()
    assert subalgebra_generated(K, [1])[0].size == 3


def test_products():
    D = demorgan_d()
    P = direct_power(D, 2)
    assert P.size == 16 and validate_variety("dma", P).ok
    assert direct_power(D, 0).is_trivial
    assert direct_power(D, 1) == D
    assert product_coordinates([4, 4], 7) == (3, 1)
    for i in range(2):
        proj = tuple(product_coordinates([4, 4], e)[i] for e in range(P.size))
        assert is_homomorphism(P, D, proj)
    mixed = direct_product([two(), two(), two()])
    assert mixed.size == 8


def test_isomorphism():
    D = demorgan_d()
    swapped = D.relabel()
    perm = [0, 2, 1, 3]
    ops = {"meet": [[perm[D.ops["meet"][perm[i]][perm[j]]] for j in range(4)] for i in range(4)],
           "join": [[perm[D.ops["join"][perm[i]][perm[j]]] for j in range(4)] for i in range(4)],
           "neg": [perm[D.ops["neg"][perm[i]]] for i in range(4)], "bot": 0, "top": 3}
    E = FiniteAlgebra("dma", 4, ops)
    h = is_isomorphic(D, E)
    assert h is not None and h.is_valid() and h.injective and h.surjective
    assert is_isomorphic(D, swapped) is not None
    # a 4-chain De Morgan algebra has the same size but is not isomorphic to D
    m = [[min(a, b) for b in range(4)] for a in range(4)]
    j = [[max(a, b) for b in range(4)] for a in range(4)]
    chain = FiniteAlgebra("dma", 4, {"meet": m, "join": j, "neg": [3, 2, 1, 0], "bot": 0, "top": 3})
    assert is_isomorphic(D, chain) is None


def test_compose():
    D = demorgan_d()
    hs = homomorphisms(D, D)
    assert compose(hs[1], hs[1]).map == hs[0].map


def test_add_bounds():
    K = lattice_reduct(kleene_k(), "kl")
    B = add_bounds(K)
    assert B.signature.name == "ka" and B.size == 5
    assert validate_variety("ka", B).ok
    assert B.ops["neg"] == (4, 3, 2, 1, 0)
    assert B.labels[0] == "_bot" and B.labels[-1] == "_top"
    with pytest.raises(SignatureError):
        add_bounds(kleene_k())


def test_trivial():
    T = trivial_algebra("dma")
    assert T.is_trivial and validate_variety("dma", T).ok


def _tables(n, meet, join, **extra):
    return {"meet": meet, "join": join, **extra}


def test_validate_variety_rejections():
    # M3 is a lattice that is not distributive
    le = {(0, i) for i in range(5)} | {(i, 4) for i in range(5)} | {(i, i) for i in range(5)}
    meet = [[0] * 5 for _ in range(5)]
    join = [[0] * 5 for _ in range(5)]
    for a in range(5):
        for b in range(5):
            meet[a][b] = a if (a, b) in le else b if (b, a) in le else 0
            join[a][b] = b if (a, b) in le else a if (b, a) in le else 4
    M3 = FiniteAlgebra("bdl", 5, {"meet": meet, "join": join, "bot": 0, "top": 4})
    v = validate_variety("bdl", M3)
    assert not v.ok and "distribut" in v.law
    with pytest.raises(VarietyError):
        require_member("bdl", M3)
    # 3-chain with identity negation is not an involutive anti-automorphism
    m, j = [[min(a, b) for b in range(3)] for a in range(3)], [[max(a, b) for b in range(3)] for a in range(3)]
    bad = FiniteAlgebra("dma", 3, {"meet": m, "join": j, "neg": [0, 1, 2], "bot": 0, "top": 2})
    assert not validate_variety("dma", bad).ok
    # D is De Morgan but not Kleene
    assert not validate_variety("ka", demorgan_d()).ok
    # the 4-chain with pseudocomplement is not Stone-valid if star is wrong
    m4 = [[min(a, b) for b in range(4)] for a in range(4)]
    j4 = [[max(a, b) for b in range(4)] for a in range(4)]
    bad_star = FiniteAlgebra("st", 4, {"meet": m4, "join": j4, "star": [3, 1, 0, 0], "bot": 0, "top": 3})
    assert not validate_variety("st", bad_star).ok


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(GENERATORS)), st.lists(st.integers(0, 15), min_size=1, max_size=3))
def test_generated_subalgebras_are_closed(name, seed):
    P = direct_power(GENERATORS[name](), 2)
    seed = [s % P.size for s in seed]
    sub, inc = subalgebra_generated(P, seed)
    assert inc.is_valid()
    assert set(seed) <= set(inc.map)
    assert validate_variety(name, sub).ok
