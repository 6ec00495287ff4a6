import itertools

import pytest

from dendroidal.dsets import (
    i_upper,
    shape_universe,
    sset_product,
    standard_simplex,
    tau_presentation,
    validate_presheaf,
)
from dendroidal.dtensor import (
    PercolationPoset,
    ScaleLimit,
    percolation_poset,
    percolation_tree_json,
    tensor_representables,
    top_percolation_tree,
)
from dendroidal.presentations import (
    Unknown,
    bv_tensor_presentation,
    free_presentation,
    tabulate,
)
from dendroidal.trees import (
    Tree,
    build_tree,
    canonical_code,
    corolla,
    linear_tree,
    tree_from_code,
    unit_tree,
)

# The worked pair: a binary vertex over a unary vertex, and two unary
# vertices over a binary vertex.
S_EX = build_tree(["r", "e", "x", "y"], {"e": "r", "x": "e", "y": "e"}, ["x", "y"])
T_EX = build_tree(
    ["1", "2", "4", "3", "5"], {"2": "1", "4": "1", "3": "2", "5": "4"}, ["3", "5"]
)

# The displayed fourteen-element poset, numbered 1..14, as cover pairs.
PINNED_COVERS = [
    (1, 2),
    (2, 3), (2, 6), (2, 4),
    (3, 7), (3, 5),
    (6, 7), (6, 9),
    (4, 5), (4, 9),
    (7, 8), (7, 10),
    (5, 10),
    (9, 10), (9, 12),
    (8, 11),
    (10, 11), (10, 13),
    (12, 13),
    (11, 14),
    (13, 14),
]


def digraphs_isomorphic(edges_a, n_a, edges_b, n_b):
    """Backtracking digraph isomorphism for small vertex counts."""
    if n_a != n_b or len(edges_a) != len(edges_b):
        return False
    outs_a = {i: set() for i in range(n_a)}
    ins_a = {i: set() for i in range(n_a)}
    for i, j in edges_a:
        outs_a[i].add(j)
        ins_a[j].add(i)
    outs_b = {i: set() for i in range(n_b)}
    ins_b = {i: set() for i in range(n_b)}
    for i, j in edges_b:
        outs_b[i].add(j)
        ins_b[j].add(i)
    sig_a = {i: (len(outs_a[i]), len(ins_a[i])) for i in range(n_a)}
    sig_b = {i: (len(outs_b[i]), len(ins_b[i])) for i in range(n_b)}
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return False
    order = sorted(range(n_a), key=lambda i: -len(outs_a[i]) - len(ins_a[i]))
    edge_set_b = set(edges_b)

    def extend(k, mapping, used):
        if k == len(order):
            return True
        i = order[k]
        for j in range(n_b):
            if j in used or sig_a[i] != sig_b[j]:
                continue
            ok = True
            for i2, j2 in mapping.items():
                if ((i, i2) in set(edges_a)) != ((j, j2) in edge_set_b):
                    ok = False
                    break
                if ((i2, i) in set(edges_a)) != ((j2, j) in edge_set_b):
                    ok = False
                    break
            if ok:
                mapping[i] = j
                used.add(j)
                if extend(k + 1, mapping, used):
                    return True
                del mapping[i]
                used.remove(j)
        return False

    return extend(0, {}, set())


def test_worked_example_has_fourteen_trees():
    poset = percolation_poset(S_EX, T_EX)
    assert len(poset) == 14
    top, bottom = poset.top_and_bottom()
    assert poset.is_connected()
    # Orientation: the top has the whole of T above the whole of S.
    top_tree = poset.elements[top]
    root_kind = top_tree.vertex_label[top_tree.tree.root]
    assert root_kind[0] == "S"
    bottom_tree = poset.elements[bottom]
    assert bottom_tree.vertex_label[bottom_tree.tree.root][0] == "T"


def test_worked_example_hasse_matches_pinned_diagram():
    poset = percolation_poset(S_EX, T_EX)
    pinned = [(i - 1, j - 1) for i, j in PINNED_COVERS]
    assert digraphs_isomorphic(list(poset.covers), len(poset), pinned, 14)


def test_percolation_trees_validate_and_leaf_products():
    poset = percolation_poset(S_EX, T_EX)
    for p in poset.elements:
        p.validate(S_EX, T_EX)  # includes the leaf product check


def test_unit_factor_gives_single_tree():
    for other in (T_EX, S_EX, corolla(2, "r")):
        poset = percolation_poset(unit_tree("u"), other)
        assert len(poset) == 1
        assert canonical_code(poset.elements[0].tree) == canonical_code(other)
        dual = percolation_poset(other, unit_tree("u"))
        assert len(dual) == 1


def test_poset_antisymmetry_between_factors():
    a = percolation_poset(S_EX, T_EX)
    b = percolation_poset(T_EX, S_EX)
    assert len(a) == len(b)
    flipped = [(j, i) for i, j in b.covers]
    assert digraphs_isomorphic(list(a.covers), len(a), flipped, len(b))


def test_scale_limit_enforced():
    big = linear_tree(5)
    with pytest.raises(ScaleLimit):
        percolation_poset(big, big, scale_limit=4)


def test_nullary_factor_supported():
    c0 = tree_from_code("()")
    l1 = linear_tree(1)
    poset = percolation_poset(c0, l1)
    for p in poset.elements:
        p.validate(c0, l1)
    assert len(poset) == 2  # the nullary vertex percolates past one vertex
    assert poset.is_connected()


def test_dot_export():
    poset = percolation_poset(unit_tree("u"), corolla(2, "r"))
    dot = poset.to_dot()
    assert "digraph" in dot and "T1" in dot
    data = percolation_tree_json(poset.elements[0])
    assert set(data) == {"edges", "parent", "leaves", "edge_labels", "vertex_labels"}


def test_tensor_unit_is_identity_on_representables():
    from dendroidal.dsets import representable

    U = shape_universe(2, 5)
    T = corolla(2, "r")
    X = tensor_representables(unit_tree("u"), T, U)
    Y = representable(T, U)
    for shape in U:
        assert len(X.dendrices(shape)) == len(Y.dendrices(shape))
    validate_presheaf(X, max_tree_edges=4)


def test_tensor_l1_l1_slices_to_the_square():
    U = shape_universe(2, 5)
    X = tensor_representables(linear_tree(1), linear_tree(1), U)
    validate_presheaf(X, max_tree_edges=4)
    S = i_upper(X, dim=2)
    square = sset_product(standard_simplex(1, 2), standard_simplex(1, 2))
    for n in range(3):
        assert len(S.sets[n]) == len(square.sets[n])
    # Two maximal nondegenerate linear dendrices of length 2.
    nondegen = [
        x
        for x in S.sets[2]
        if all(S.degen[(1, i)][y] != x for y in S.sets[1] for i in range(2))
    ]
    assert len(nondegen) == 2


def test_tau_of_tensor_matches_bv_presentation():
    # tau(Omega[S] (x) Omega[T]) tabulates like the tensor presentation of
    # the two free tree operads, profile counts compared through the color
    # pairing.
    U = shape_universe(2, 5)
    S, T = linear_tree(1), linear_tree(1)
    X = tensor_representables(S, T, U)
    pres_tensor = tau_presentation(X)
    tab_tensor = tabulate(pres_tensor, arity_bound=1, term_size_bound=3)
    assert not isinstance(tab_tensor, Unknown)

    pres_S = free_presentation(
        tuple(sorted(S.edges)),
        {f"v{e}": (S.children(e), e) for e in S.vertex_edges},
    )
    pres_T = free_presentation(
        tuple(sorted(T.edges)),
        {f"w{e}": (T.children(e), e) for e in T.vertex_edges},
    )
    bv = bv_tensor_presentation(pres_S, pres_T)
    tab_bv = tabulate(bv, arity_bound=1, term_size_bound=3)
    assert not isinstance(tab_bv, Unknown)

    # Colors pair up: a tensor color is an eta-dendrex, i.e. an edge pair.
    color_pair = {c: dict(c[0])["0"] for c in tab_tensor.colors}
    assert sorted(color_pair.values()) == sorted(bv.colors)
    for dom, cod in tab_tensor.profiles(1):
        got = len(tab_tensor.ops(dom, cod))
        want = len(
            tab_bv.ops(tuple(color_pair[c] for c in dom), color_pair[cod])
        )
        assert got == want, (dom, cod, got, want)
