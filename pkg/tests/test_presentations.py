import itertools
import math

import pytest

from dendroidal.operads import grid_transpose, validate_operad
from dendroidal.presentations import (
    SLOT,
    OperadPresentation,
    Term,
    Unknown,
    act_term,
    associative_presentation,
    bv_tensor_presentation,
    commutative_presentation,
    compose_term,
    decompose,
    evaluate_term,
    free_presentation,
    generator_term,
    identity_term,
    rewrite_root,
    tabulate,
    terms_equal,
)


def m(*args):
    return compose_term(generator_term("m", 2), list(args))


X = identity_term()
E = generator_term("e", 0)


def test_term_basics():
    t = generator_term("m", 2)
    assert t.arity == 2 and t.size == 1
    assert identity_term().arity == 1 and identity_term().size == 0
    swapped = act_term((1, 0), t)
    assert swapped.listing == (1, 0)
    assert act_term((1, 0), swapped) == t


def test_compose_term_listing_bookkeeping():
    t = m(m(X, X), X)
    assert t.size == 2 and t.arity == 3
    assert t.listing == (0, 1, 2)
    tw = compose_term(act_term((1, 0), generator_term("m", 2)), [X, X])
    assert tw.listing == (1, 0)
    # Composing a twisted outer op shuffles whole blocks: the first argument
    # grafts at planar leaf 1, so its two slots sit at planar positions 1, 2.
    big = compose_term(act_term((1, 0), generator_term("m", 2)), [m(X, X), X])
    assert big.tree == ("v", "m", (SLOT, ("v", "m", (SLOT, SLOT))))
    assert big.listing == (1, 2, 0)


def test_rewrite_root_associativity():
    pres = associative_presentation()
    lhs, rhs = pres.relations[0]
    t = m(m(X, X), X)
    out = rewrite_root(t, lhs, rhs)
    assert out == m(X, m(X, X))
    assert rewrite_root(out, rhs, lhs) == t
    assert rewrite_root(m(X, m(X, X)), lhs, rhs) is None


def test_rewrite_root_respects_twists():
    pres = associative_presentation()
    lhs, rhs = pres.relations[0]
    t = act_term((2, 0, 1), m(m(X, X), X))
    out = rewrite_root(t, lhs, rhs)
    assert out == act_term((2, 0, 1), m(X, m(X, X)))


def test_rewrite_unit_law():
    pres = associative_presentation()
    unit_l = pres.relations[1]
    t = compose_term(generator_term("m", 2), [E, m(X, X)])
    out = rewrite_root(t, *unit_l)
    assert out == m(X, X)


def test_identity_rule_matches_anything():
    pres = associative_presentation()
    lhs, rhs = pres.relations[1]  # m(e, x) = x
    grown = rewrite_root(m(X, X), rhs, lhs)
    assert grown == compose_term(generator_term("m", 2), [E, m(X, X)])


def test_decompose_round_trip():
    t = act_term((2, 0, 1), m(m(X, X), X))
    label, blocks, rho = decompose(t)
    assert label == "m"
    rebuilt = act_term(
        rho, compose_term(Term(("v", "m", (SLOT, SLOT)), (0, 1)), list(blocks))
    )
    assert rebuilt == t


def test_tabulate_free_binary_generator():
    pres = free_presentation(("*",), {"b": (("*", "*"), "*")})
    P = tabulate(pres, arity_bound=3, term_size_bound=3)
    assert not isinstance(P, Unknown)
    # 2 planar trees x 3! listings at arity 3.
    assert len(P.ops(("*",) * 3, "*")) == 12
    assert len(P.ops(("*", "*"), "*")) == 2
    validate_operad(P, max_arity=3)


def test_tabulate_as_counts():
    As = tabulate(associative_presentation(), arity_bound=3, term_size_bound=4)
    assert not isinstance(As, Unknown)
    for n, want in [(0, 1), (1, 1), (2, 2), (3, 6)]:
        assert len(As.ops(("*",) * n, "*")) == want
    validate_operad(As, max_arity=3)


def test_tabulate_comm_counts():
    Comm = tabulate(commutative_presentation(), arity_bound=4, term_size_bound=4)
    assert not isinstance(Comm, Unknown)
    for n in range(5):
        assert len(Comm.ops(("*",) * n, "*")) == 1
    validate_operad(Comm, max_arity=3)


def test_bv_tensor_generator_count():
    As = associative_presentation()
    tensor = bv_tensor_presentation(As, As)
    # |P gens| * |Q colors| + |P colors| * |Q gens| at the single color pair.
    assert len(tensor.generators) == 4
    assert tensor.colors == (("*", "*"),)


def test_bv_tensor_interchange_shape():
    free_bin = free_presentation(("*",), {"b": (("*", "*"), "*")})
    tensor = bv_tensor_presentation(free_bin, free_bin)
    (lhs, rhs), = [r for r in tensor.relations]
    assert lhs.arity == 4 and rhs.arity == 4
    # The right side carries the 2x2 interchange square's transpose.
    assert rhs.listing == grid_transpose(2, 2)
    assert lhs.listing == (0, 1, 2, 3)


def test_interchange_permutation_2x3_matrix():
    P = free_presentation(("*",), {"b": (("*", "*"), "*")})
    Q = free_presentation(("*",), {"t": (("*", "*", "*"), "*")})
    tensor = bv_tensor_presentation(P, Q)
    (lhs, rhs), = tensor.relations
    assert rhs.listing == grid_transpose(2, 3) == (0, 2, 4, 1, 3, 5)


def test_eckmann_hilton_units_merge():
    tensor = bv_tensor_presentation(associative_presentation(), associative_presentation())
    e_left = generator_term(("L", "e", "*"), 0)
    e_right = generator_term(("R", "*", "e"), 0)
    assert terms_equal(tensor, e_left, e_right, size_budget=7) == "yes"


def test_eckmann_hilton_multiplications_merge():
    tensor = bv_tensor_presentation(associative_presentation(), associative_presentation())
    m_left = generator_term(("L", "m", "*"), 2)
    m_right = generator_term(("R", "*", "m"), 2)
    assert terms_equal(tensor, m_left, m_right, size_budget=7) == "yes"
    assert terms_equal(tensor, m_left, act_term((1, 0), m_left), size_budget=7) == "yes"


def test_interchange_image_equality():
    # The displayed interchange square: both sides of relation 5 merge.
    tensor = bv_tensor_presentation(associative_presentation(), associative_presentation())
    lhs, rhs = next(
        (l, r)
        for l, r in tensor.relations
        if l.arity == 4 and l.size == 3
    )
    assert terms_equal(tensor, lhs, rhs, size_budget=5) == "yes"


def test_tensor_As_As_collapses_to_comm():
    tensor = bv_tensor_presentation(associative_presentation(), associative_presentation())
    T = tabulate(tensor, arity_bound=3, term_size_bound=3, closure_size_bound=7)
    assert not isinstance(T, Unknown)
    for n in range(4):
        ops = T.ops((("*", "*"),) * n, ("*", "*"))
        assert len(ops) == 1, (n, ops)
    validate_operad(T, max_arity=3)


def test_terms_equal_trivial_and_free():
    pres = free_presentation(("*",), {"b": (("*", "*"), "*")})
    b = generator_term("b", 2)
    t1 = compose_term(b, [compose_term(b, [X, X]), X])
    t2 = compose_term(b, [X, compose_term(b, [X, X])])
    assert terms_equal(pres, t1, t1) == "yes"
    assert terms_equal(pres, t1, t2) == "no"  # no relations, saturated space


def test_terms_equal_profile_mismatch_rejected():
    pres = free_presentation(("*",), {"b": (("*", "*"), "*")})
    with pytest.raises(ValueError):
        terms_equal(pres, generator_term("b", 2), identity_term())


def test_terms_equal_unknown_on_tiny_budget():
    # The multiplication identification needs room for its derivation peak;
    # a starved budget must answer unknown, never no.
    tensor = bv_tensor_presentation(associative_presentation(), associative_presentation())
    m_left = generator_term(("L", "m", "*"), 2)
    m_right = generator_term(("R", "*", "m"), 2)
    assert terms_equal(tensor, m_left, m_right, size_budget=3) == "unknown"


def test_evaluate_term_in_permutation_operad():
    from dendroidal.operads import permutation_operad

    As_ops = permutation_operad()
    pres = associative_presentation()
    images = {"m": ("w", (0, 1)), "e": ("w", ())}
    color_map = {"*": "*"}
    for lhs, rhs in pres.relations:
        _, cod = pres.relation_profile(lhs, rhs)
        assert evaluate_term(pres, As_ops, color_map, images, lhs, cod) == evaluate_term(
            pres, As_ops, color_map, images, rhs, cod
        )


def test_multicolor_tabulation_of_presented_iso():
    # f and g inverse to each other: finitely many unary classes per profile.
    f, g = generator_term("f", 1), generator_term("g", 1)
    pres = OperadPresentation(
        ("a", "b"),
        {"f": (("a",), "b"), "g": (("b",), "a")},
        ((compose_term(g, [f]), X), (compose_term(f, [g]), X)),
    )
    P = tabulate(pres, arity_bound=1, term_size_bound=3)
    assert not isinstance(P, Unknown)
    assert len(P.ops(("a",), "b")) == 1
    assert len(P.ops(("a",), "a")) == 1
    assert len(P.ops(("b",), "a")) == 1
    validate_operad(P, max_arity=1)


def test_free_unary_chains_report_budget_exhaustion():
    # Free composable loops have infinitely many unary operations, so any
    # truncation fails to close under composition and must say so.
    pres = free_presentation(("a", "b"), {"f": (("a",), "b"), "g": (("b",), "a")})
    P = tabulate(pres, arity_bound=1, term_size_bound=4, closure_size_bound=8)
    assert isinstance(P, Unknown)
    assert "BudgetExceeded" in P.reason
