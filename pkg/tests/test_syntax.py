import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualadmit.clauses import REGISTRY
from dualadmit.errors import ClauseSyntaxError
from dualadmit.syntax import (BOT, TOP, App, Clause, Identity, Var, join, leq, meet, neg, parse_clause,
                              parse_identity, parse_term, print_clause, print_term, random_clause, star)

x, y, z = Var("x"), Var("y"), Var("z")

MALFORMED = [
    ("x /\\ => y = y", 5),
    ("x = y => ", 9),
    ("x = = y => false", 4),
    ("(x /\\ y = x => false", 8),
    ("x = y => z", 10),
    ("x & y = x => false", 2),
    ("x = y , => false", 8),
    ("=> x = y", 0),
    ("x = y => false extra", 15),
    ("true => x = y |", 15),
]


def test_precedence():
    assert parse_term("x \\/ y /\\ z") == join(x, meet(y, z))
    assert parse_term("~x /\\ y") == meet(neg(x), y)
    assert parse_term("~x*") == neg(star(x))
    assert parse_term("x /\\ y /\\ z") == meet(meet(x, y), z)


def test_printing_minimal_parentheses():
    assert print_term(meet(x, join(y, z))) == "x /\\ (y \\/ z)"
    assert print_term(join(meet(x, y), z)) == "x /\\ y \\/ z"
    assert print_term(meet(x, meet(y, z))) == "x /\\ (y /\\ z)"
    assert print_term(neg(join(x, y))) == "~(x \\/ y)"
    assert print_term(star(neg(x))) == "(~x)*"


def test_leq_sugar():
    assert parse_identity("x <= y") == leq(x, y) == Identity(meet(x, y), x)


def test_constants_and_keywords():
    c = parse_clause("true => false")
    assert c.premises == () and c.conclusions == ()
    assert c.is_negative and c.is_positive
    assert parse_term("bot \\/ top") == join(BOT, TOP)


def test_lone_identity_is_positive_clause():
    assert parse_clause("x = y") == Clause((), (Identity(x, y),))


def test_clause_normalizes_order_and_duplicates():
    a = parse_clause("y = x, x = y, y = x => false")
    b = parse_clause("x = y, y = x => false")
    assert a == b and len(a.premises) == 2


def test_clause_properties():
    c = REGISTRY["C8"].clause
    assert c.variables() == ["x", "y"]
    assert c.operations() == {"neg", "meet", "join"}
    assert c.is_quasi_identity
    assert REGISTRY["C4"].clause.is_negative


@pytest.mark.parametrize("cid", sorted(REGISTRY))
def test_registry_round_trip(cid):
    c = REGISTRY[cid].clause
    assert parse_clause(print_clause(c)) == c


def test_random_round_trip_seeded():
    rng = random.Random(2024)
    ops = ["meet", "join", "neg", "star", "bot", "top"]
    for _ in range(100):
        c = random_clause(rng, ops)
        assert parse_clause(print_clause(c)) == c


@pytest.mark.parametrize("text,col", MALFORMED)
def test_malformed_rejected_with_position(text, col):
    with pytest.raises(ClauseSyntaxError) as info:
        parse_clause(text)
    assert info.value.pos == col
    assert str(info.value).startswith(f"column {col + 1}:")


def test_keywords_are_not_variables():
    with pytest.raises(ClauseSyntaxError):
        parse_term("x /\\ true")


def _terms():
    leaves = st.sampled_from([x, y, z, BOT, TOP])
    return st.recursive(leaves, lambda t: st.one_of(
        st.builds(lambda a: App("neg", (a,)), t),
        st.builds(lambda a: App("star", (a,)), t),
        st.builds(lambda a, b: App("meet", (a, b)), t, t),
        st.builds(lambda a, b: App("join", (a, b)), t, t)), max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(_terms())
def test_term_round_trip_property(t):
    assert parse_term(print_term(t)) == t
