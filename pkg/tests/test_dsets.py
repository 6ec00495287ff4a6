import itertools

import pytest

from dendroidal.categories import free_iso_category, terminal_category
from dendroidal.dsets import (
    DSetMap,
    FiniteSimplicialSet,
    boundary_families,
    delete_dendrex,
    deletion_breaks_inner_kan,
    empty_dset,
    fill_horn,
    horn_families,
    i_lower,
    i_upper,
    inclusion_of_empty,
    inner_horns,
    is_equivalence_dendrex_in_nerve,
    is_inner_kan,
    is_normal,
    is_normal_mono,
    is_strict,
    matching_families,
    nerve,
    nerve_of_category,
    nerve_functor_of,
    normality_witness,
    representable,
    restriction_family,
    shape_universe,
    sset_product,
    standard_iso,
    standard_simplex,
    tau_presentation,
    validate_presheaf,
)
from dendroidal.omega import faces, hom_set, identity
from dendroidal.operads import (
    free_tree_operad,
    j_lower,
    j_star,
    j_upper,
    permutation_operad,
    terminal_operad,
    validate_operad,
)
from dendroidal.presentations import Unknown, evaluate_term, tabulate
from dendroidal.trees import (
    build_tree,
    corolla,
    linear_tree,
    standard_form,
    tree_from_code,
    unit_tree,
)

U2 = shape_universe(2, 5)
U3 = shape_universe(3, 6)


def math_factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def test_shape_universe_closed_under_faces():
    for t in U3:
        for f in faces(t):
            assert standard_form(f.morphism.source) in U3


def test_standard_iso_is_iso():
    t = build_tree(["r", "x", "y"], {"x": "r", "y": "r"}, ["x", "y"])
    rho = standard_iso(t)
    rho.validate()
    assert rho.is_iso
    assert rho.source == tree_from_code("(**)")


def test_representable_counts():
    eta = unit_tree("0")
    X = representable(eta, U2)
    assert len(X.dendrices(eta)) == 1
    assert len(X.dendrices(tree_from_code("(**)"))) == 0

    Y = representable(corolla(2, "r"), U2)
    assert len(Y.dendrices(eta)) == 3
    assert len(Y.dendrices(tree_from_code("(**)"))) == 2


def test_representable_presheaf_laws():
    Y = representable(corolla(2, "r"), U2)
    validate_presheaf(Y, max_tree_edges=4)


def test_yoneda_on_small_shapes():
    # A dendrex of shape T is the same as a map out of the representable.
    X = nerve(permutation_operad(), U2)
    T = tree_from_code("(**)")
    R = representable(T, U2)
    for x in X.dendrices(T):
        comps = {
            s: {f: X.action(f, x) for f in R.dendrices(s)} for s in U2
        }
        m = DSetMap(R, X, comps)
        m.validate(max_tree_edges=4)
        assert m.at(T, identity(T)) == x


def test_nerve_counts_for_As_and_comm():
    X = nerve(permutation_operad(), U3)
    for n in range(1, 5):
        cn = standard_form(corolla(n))
        if cn in U3:
            assert len(X.dendrices(cn)) == math_factorial(n)
    Y = nerve(terminal_operad(), U3)
    assert all(len(Y.dendrices(t)) == 1 for t in U3)


def test_nerve_presheaf_laws():
    X = nerve(permutation_operad(), U2)
    validate_presheaf(X, max_tree_edges=4)
    Y = nerve(free_tree_operad(tree_from_code("((*)*)")), U2)
    validate_presheaf(Y, max_tree_edges=4)


def nerve_chain(P, n, x):
    """Convert an encoded linear-shape nerve dendrex to an arrow chain.

    Simplex vertex j corresponds to edge n - j, so the chain's j-th arrow is
    the functor's value on the vertex above edge n - 1 - j.
    """
    F = nerve_functor_of(P, linear_tree(n), x)
    if n == 0:
        return (F.color_map["0"],)
    return tuple(
        F.op_map[(str(n - 1 - j), frozenset([str(n - 1 - j)]), (str(n - j),))]
        for j in range(n)
    )


def assert_sset_matches_category_nerve(S, P, cat, dim):
    want = nerve_of_category(cat, dim)
    for n in range(dim + 1):
        got = {nerve_chain(P, n, x) for x in S.sets[n]}
        assert got == set(want.sets[n])
        assert len(S.sets[n]) == len(want.sets[n])
        if n >= 1:
            for i in range(n + 1):
                for x in S.sets[n]:
                    lhs = nerve_chain(P, n - 1, S.face[(n, i)][x])
                    assert lhs == want.face[(n, i)][nerve_chain(P, n, x)]


def test_nerve_of_star_on_linear_shapes_is_point_nerve():
    star = j_lower(terminal_category())
    X = nerve(star, U3)
    S = i_upper(X, dim=3)
    assert_sset_matches_category_nerve(S, star, terminal_category(), 3)


def test_boundary_of_corolla_in_nerve_As():
    X = nerve(permutation_operad(), U2)
    c2 = tree_from_code("(**)")
    fams = boundary_families(X, c2)
    # Single color: one choice per edge inclusion, no codim-2 constraints.
    assert len(fams) == 1


def test_inner_horn_of_two_inner_edge_tree_in_comm():
    X = nerve(terminal_operad(), shape_universe(3, 7))
    t = standard_form(
        build_tree(
            ["a", "b", "c", "d", "e", "f"],
            {"b": "a", "c": "a", "d": "a", "e": "b", "f": "b"},
            ["e", "f", "c"],
        )
    )
    horns = inner_horns(t)
    assert len(horns) == 2
    for alpha in horns:
        fams = horn_families(X, t, alpha)
        assert len(fams) == 1
        assert len(fill_horn(X, fams[0])) == 1


def test_horn_families_against_empty():
    X = empty_dset(U2)
    c2c2 = tree_from_code("((**)*)")
    for alpha in inner_horns(c2c2):
        assert horn_families(X, c2c2, alpha) == []


def test_nerves_are_strict_at_bound_two():
    for P in (permutation_operad(), terminal_operad()):
        X = nerve(P, U2)
        assert is_strict(X)
        assert is_inner_kan(X)


def test_representable_inner_horn_unique_filler():
    T = tree_from_code("((**)*)")
    X = representable(T, shape_universe(2, 5))
    (alpha,) = inner_horns(T)
    fams = horn_families(X, T, alpha)
    fam = restriction_family(X, T, identity(T), omitted=alpha)
    assert fam in fams
    assert fill_horn(X, fam) == [identity(T)]


def test_deleting_top_dendrex_breaks_inner_kan():
    X = nerve(terminal_operad(), U2)
    t = tree_from_code("((**)*)")
    (x,) = X.dendrices(t)
    assert deletion_breaks_inner_kan(X, t, x)
    X2 = delete_dendrex(X, t, x)
    assert len(X2.dendrices(t)) == 0


def test_normality():
    X = nerve(permutation_operad(), U2)
    assert is_normal(X)
    Y = nerve(terminal_operad(), U2)
    assert not is_normal(Y)
    tree, x, g = normality_witness(Y)
    assert tree == tree_from_code("(**)")  # the 2-corolla leaf swap
    assert g("1") == "2" and g("2") == "1"


def test_normal_mono_from_empty():
    X = nerve(permutation_operad(), U2)
    Y = nerve(terminal_operad(), U2)
    assert is_normal_mono(inclusion_of_empty(X))
    assert not is_normal_mono(inclusion_of_empty(Y))


def test_simplicial_round_trip():
    d1 = standard_simplex(1, 3)
    d1.validate()
    X = i_lower(d1, U3)
    validate_presheaf(X, max_tree_edges=4)
    assert i_upper(X, dim=3) == d1
    assert X.dendrices(tree_from_code("(**)")) == ()


def test_i_lower_rejects_short_simplicial_data():
    with pytest.raises(ValueError):
        i_lower(standard_simplex(1, 2), U3)


def test_i_upper_nerve_is_category_nerve():
    # The unary slice of the nerve is the nerve of the unary part.
    P = permutation_operad()
    X = nerve(P, U3)
    S = i_upper(X, dim=3)
    S.validate()
    assert_sset_matches_category_nerve(S, P, j_upper(P), 3)

    Q = j_lower(free_iso_category())
    Y = nerve(Q, U3)
    assert_sset_matches_category_nerve(i_upper(Y, dim=3), Q, j_upper(Q), 3)


def test_delta_product_has_two_top_cells():
    d1 = standard_simplex(1, 2)
    sq = sset_product(d1, d1)
    nondegen_2 = [
        x
        for x in sq.sets[2]
        if all(sq.degen[(1, i)][y] != x for y in sq.sets[1] for i in range(2))
    ]
    assert len(nondegen_2) == 2


def test_tau_presentation_of_unit_representable_is_point():
    X = representable(unit_tree("0"), U2)
    pres = tau_presentation(X)
    P = tabulate(pres, arity_bound=2, term_size_bound=3)
    assert not isinstance(P, Unknown)
    assert len(P.colors) == 1
    assert len(P.all_ops(2)) == 1  # just the identity


def check_tau_matches_tree_operad(T, universe, arity_bound=3):
    X = representable(T, universe)
    pres = tau_presentation(X)
    om = free_tree_operad(T)
    # The canonical color identification: a color of tau(X) is a map eta -> T.
    color_edge = {c: c.edge_map["0"] for c in pres.colors}
    assert sorted(color_edge.values()) == sorted(T.edges)
    # Generator images: a corolla dendrex is a morphism C_n -> T.
    images = {}
    for name, (dom, cod) in pres.generators.items():
        _, n, x = name
        listing = tuple(x.edge_map[str(k)] for k in range(1, n + 1))
        images[name] = (x.edge_map["0"], _vertex_set(om, x), listing)
    for lhs, rhs in pres.relations:
        _, cod = pres.relation_profile(lhs, rhs)
        a = evaluate_term(pres, om, color_edge, images, lhs, cod)
        b = evaluate_term(pres, om, color_edge, images, rhs, cod)
        assert a == b
    P = tabulate(pres, arity_bound=arity_bound, term_size_bound=3)
    assert not isinstance(P, Unknown)
    # Profile-by-profile bijection through the canonical identification.
    for dom, cod in P.profiles(arity_bound):
        ops = P.ops(dom, cod)
        values = {
            evaluate_term(pres, om, color_edge, images, P.term_of(op), cod)
            for op in ops
        }
        assert len(values) == len(ops)
        want = om.ops(tuple(color_edge[c] for c in dom), color_edge[cod])
        assert values == set(want)


def _vertex_set(om, x):
    from dendroidal.omega import subtree_between

    tree = [t for t in [None]][0]
    # x: C_n -> T; its vertex image is the subtree under the morphism.
    n = len(x.source.edges) - 1
    return subtree_between(
        x.target,
        x.edge_map["0"],
        frozenset(x.edge_map[str(k)] for k in range(1, n + 1)),
    )


@pytest.mark.parametrize(
    "code", ["*", "(*)", "(**)", "((**)*)", "(*(*)*)"]
)
def test_tau_of_representable_matches_tree_operad(code):
    T = tree_from_code(code)
    check_tau_matches_tree_operad(T, U2 if T.n_vertices <= 2 else U3)


def test_equivalence_dendrices_in_nerves():
    iso_operad = j_lower(free_iso_category())
    X = nerve(iso_operad, U2)
    l1 = linear_tree(1)
    for x in X.dendrices(l1):
        F = nerve_functor_of(iso_operad, l1, x)
        assert is_equivalence_dendrex_in_nerve(iso_operad, x)

    arrow_operad = j_lower(
        __import__("dendroidal.categories", fromlist=["walking_arrow"]).walking_arrow()
    )
    Y = nerve(arrow_operad, U2)
    verdicts = {
        is_equivalence_dendrex_in_nerve(arrow_operad, y) for y in Y.dendrices(l1)
    }
    assert verdicts == {True, False}  # identities yes, the strict arrow no
