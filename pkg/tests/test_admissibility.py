import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualadmit.admissibility import (_exact_search, admissible_clause, admissible_quasi_exact,
                                     classify_completeness, dual_is_criterion, member_IS_free,
                                     member_ISP_free, verify_lemma_suite)
from dualadmit.algebra import direct_power, lattice_reduct, subalgebra_generated, trivial_algebra
from dualadmit.clauses import REGISTRY, satisfies, valid_in_class
from dualadmit.errors import BudgetExceeded, SignatureError
from dualadmit.members import enumerate_members
from dualadmit.profiles import PROFILE_NAMES, PROFILES, demorgan_d, kleene_k, stone_s, two
from dualadmit.spaces import StructuredSpace
from dualadmit.syntax import parse_clause, random_clause

OPS = {name: list(PROFILES[name].signature.op_names) for name in PROFILE_NAMES}


def test_membership_examples():
    v = member_IS_free("bdl", direct_power(two(), 2))
    assert not v.result and v.agree
    assert v.routes[0].evidence.startswith("C2 fails")
    assert v.routes[1].evidence == "not bounded"
    assert not member_IS_free("dma", demorgan_d()).result
    assert "fixpoint" in member_IS_free("dma", demorgan_d()).evidence
    assert not member_ISP_free("ka", kleene_k()).result
    assert member_ISP_free("dma", trivial_algebra("dma")).result
    for B in enumerate_members("bdl", 2, 8):
        assert member_ISP_free("bdl", B).result
    for B in enumerate_members("st", 2, 8):
        assert member_IS_free("st", B).result == (not B.is_trivial)
    for B in enumerate_members("dl", 2, 8):
        assert member_IS_free("dl", B).result


def test_membership_witness_route():
    v = member_IS_free("st", stone_s(), witness=True)
    assert v.routes[2].result is True and v.agree
    v = member_IS_free("dma", demorgan_d(), n_cap=2, witness=True)
    assert v.routes[2].result is None and v.agree


def test_dual_criteria_on_hand_built_spaces():
    chain = StructuredSpace.from_pairs(2, [(0, 1)])
    antichain = StructuredSpace.from_pairs(2, [])
    empty = StructuredSpace(0, [])
    assert dual_is_criterion("priestley", chain)[0]
    assert not dual_is_criterion("priestley", antichain)[0]
    assert not dual_is_criterion("priestley", empty)[0]


def test_headline_gaps():
    assert not satisfies(direct_power(two(), 2), REGISTRY["C2"].clause)
    assert admissible_clause("bdl", REGISTRY["C2"].clause).verdict == "admissible"
    s = satisfies(kleene_k(), REGISTRY["C8"].clause)
    assert not s and s.describe(kleene_k()) == "x:=a, y:=0"
    assert admissible_clause("ka", REGISTRY["C8"].clause).verdict == "admissible"
    s = satisfies(demorgan_d(), REGISTRY["C6"].clause)
    assert not s and s.describe(demorgan_d()) == "x:=0, y:=a, z:=b"
    assert admissible_clause("dma", REGISTRY["C6"].clause).verdict == "admissible"


def test_D_fails_C6_at_other_assignments():
    D = demorgan_d()
    c = REGISTRY["C6"].clause
    from dualadmit.algebra import eval_term
    env = {"x": 1, "y": 2, "z": 1}
    prem = all(eval_term(D, e.lhs, env) == eval_term(D, e.rhs, env) for e in c.premises)
    concl = any(eval_term(D, e.lhs, env) == eval_term(D, e.rhs, env) for e in c.conclusions)
    assert prem and not concl


def test_collapse_clause_not_admissible_in_bdl():
    v = admissible_clause("bdl", parse_clause("x = y => false"))
    assert v.verdict == "not_admissible"
    assert v.counterexample.name == "2"
    assert v.describe().endswith("at x:=0, y:=0")


def test_signature_checked():
    with pytest.raises(SignatureError):
        admissible_clause("ka", parse_clause("x* = x"))
    with pytest.raises(SignatureError):
        admissible_clause("dl", parse_clause("x = bot => false"))


@pytest.mark.parametrize("name", PROFILE_NAMES)
def test_basis_clauses_admissible_but_not_valid(name):
    p = PROFILES[name]
    members = enumerate_members(name, 2, 8)
    for cid in p.basis_clauses + p.basis_quasi:
        c = REGISTRY[cid].clause
        assert admissible_clause(name, c).verdict == "admissible", cid
        bad = valid_in_class(members, c)
        if not bad.holds:
            assert not member_IS_free(name, bad.algebra).result


@pytest.mark.parametrize("name", ["bdl", "st", "dma", "ka", "dl", "dml", "kl"])
def test_not_admissible_counterexamples_are_checked(name):
    rng = random.Random(hash(name) % 1000)
    seen = 0
    for _ in range(25):
        c = random_clause(rng, OPS[name], n_vars=2, depth=2, max_premises=2, max_conclusions=2)
        v = admissible_clause(name, c)
        assert v.verdict in ("admissible", "not_admissible")
        if v.verdict == "not_admissible":
            seen += 1
            B = v.counterexample
            assert B.signature == PROFILES[name].signature
            assert member_IS_free(name, B).result
            s = satisfies(B, c)
            assert not s
            assert not any(lbl in ("_bot", "_top") for lbl in (B.labels or ()))
    assert seen


@pytest.mark.parametrize("name", ["bdl", "st", "dma", "ka", "kl"])
def test_exact_search_agrees_with_members(name):
    """Whenever an enumerated member in IS(F) refutes a clause, the exact search must too."""
    p = PROFILES[name]
    rng = random.Random(7)
    members = [B for B in enumerate_members(name, 2, 8) if member_IS_free(name, B).result]
    for _ in range(25):
        c = random_clause(rng, OPS[name], n_vars=2, depth=2, max_premises=2, max_conclusions=2)
        res = _exact_search(p, c, 1 << 16)
        assert res.complete
        refuted = not valid_in_class(members, c).holds
        if refuted:
            assert res.algebra is not None
        if res.algebra is not None:
            assert member_IS_free(name, res.algebra).result
            assert not satisfies(res.algebra, c)


def test_exact_search_finds_large_counterexample():
    # 2 is the only non-trivial member at these bounds and it is a chain
    c = parse_clause("true => x <= y | y <= x")
    v = admissible_clause("bdl", c, max_power=1, max_size=2)
    assert v.verdict == "not_admissible" and v.source == "generated"
    assert member_IS_free("bdl", v.counterexample).result


def test_monotone_budget():
    rng = random.Random(11)
    for _ in range(15):
        c = random_clause(rng, OPS["st"], n_vars=2, depth=2, max_premises=2, max_conclusions=1)
        small = admissible_clause("st", c, 1, 4)
        big = admissible_clause("st", c, 2, 8)
        if small.verdict == "not_admissible":
            assert big.verdict == "not_admissible"


def test_unknown_when_search_budget_is_tiny():
    v = admissible_clause("dma", REGISTRY["C6"].clause, subset_limit=10, free_cap=1)
    assert v.verdict == "unknown"
    assert v.bounds["exact_search"]["complete"] is False


def test_quasi_exact():
    assert not admissible_quasi_exact("bdl", parse_clause("x /\\ y = bot => x = bot"))
    assert admissible_quasi_exact("ka", parse_clause("true => x = x"))
    with pytest.raises(SignatureError):
        admissible_quasi_exact("bdl", REGISTRY["C2"].clause)
    with pytest.raises(BudgetExceeded) as info:
        admissible_quasi_exact("ka", REGISTRY["C8"].clause)
    assert info.value.count == 43918 ** 2


def test_quasi_exact_matches_members_bdl():
    rng = random.Random(5)
    members = enumerate_members("bdl", 2, 8)
    for _ in range(30):
        q = random_clause(rng, OPS["bdl"], n_vars=3, depth=2, max_premises=2, quasi=True)
        assert admissible_quasi_exact("bdl", q) == valid_in_class(members, q).holds


def test_classification():
    r = {n: classify_completeness(n) for n in PROFILE_NAMES}
    assert r["bdl"]["structurally_complete"] and not r["bdl"]["universally_complete"]
    assert not r["bdl"]["non_negative_universally_complete"]
    assert r["st"]["non_negative_universally_complete"] and not r["st"]["universally_complete"]
    assert r["st"]["structurally_complete"]
    assert r["dl"]["universally_complete"]
    for n in ("dma", "dml", "ka", "kl"):
        assert not r[n]["structurally_complete"]
    assert "K" in r["ka"]["not_in_ISP"] and "K" in r["kl"]["not_in_ISP"]
    assert "D" in r["dma"]["not_in_ISP"] and "D" in r["dml"]["not_in_ISP"]


@pytest.mark.parametrize("name", PROFILE_NAMES)
def test_lemma_suite_clean(name):
    r = verify_lemma_suite(name, 2, 8)
    assert r["disagreements"] == []
    assert r["members_checked"] == len(enumerate_members(name, 2, 8))
    for entry in r["verdicts"]:
        assert all(l["clause"] == l["dual"] for l in entry["lemmas"])


def test_lemma_suite_small_cap_is_bound_limited():
    r = verify_lemma_suite("dma", 2, 8, n_cap=0)
    assert r["disagreements"] == []
    assert r["bound_limited"]


def test_lemma_suite_parallel_matches_serial():
    a = verify_lemma_suite("ka", 2, 8, jobs=1)
    b = verify_lemma_suite("ka", 2, 8, jobs=2)
    assert a == b


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["bdl", "st", "dma", "ka", "dml", "kl"]),
       st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=2))
def test_routes_agree_on_random_subalgebras_of_cubes(name, seed):
    p = PROFILES[name]
    base = p.target().generator
    P = direct_power(base, 3)
    if p.bar_target:
        P = lattice_reduct(P, p.signature)
    B, _ = subalgebra_generated(P, [s % P.size for s in seed])
    for fn in (member_IS_free, member_ISP_free):
        v = fn(name, B)
        assert v.routes[0].result == v.routes[1].result, (fn.__name__, v.routes)
