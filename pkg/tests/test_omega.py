import itertools
import random

import pytest

from dendroidal.omega import (
    OmegaError,
    OmegaMorphism,
    automorphisms,
    classify,
    degeneracies,
    degeneracy,
    edge_inclusion,
    faces,
    factorize,
    hom_set,
    identity,
    inner_face,
    outer_face,
    removable_vertices,
    subfaces2,
    subtree_between,
    subtrees_from,
)
from dendroidal.trees import (
    build_tree,
    corolla,
    enumerate_trees,
    linear_tree,
    unit_tree,
)


def paper_tree():
    return build_tree(
        ["a", "b", "c", "d", "e", "f"],
        {"b": "a", "c": "a", "d": "a", "e": "b", "f": "b"},
        ["e", "f", "c"],
    )


def small_universe(max_vertices, max_edges):
    return enumerate_trees(max_vertices, max_edges=max_edges)


def brute_force_hom(S, T):
    """Oracle: filter all edge maps by direct validation."""
    out = []
    tgt = sorted(T.edges)
    for images in itertools.product(tgt, repeat=len(S.edges)):
        emap = dict(zip(sorted(S.edges), images))
        f = OmegaMorphism(S, T, emap)
        try:
            f.validate()
        except OmegaError:
            continue
        out.append(f)
    return out


def test_subtree_between_basic():
    t = paper_tree()
    assert subtree_between(t, "a", frozenset(["b", "c", "d"])) == frozenset(["a"])
    assert subtree_between(t, "a", frozenset(["e", "f", "c"])) == frozenset(["a", "b", "d"])
    assert subtree_between(t, "a", frozenset(["e", "f", "c", "d"])) == frozenset(["a", "b"])
    assert subtree_between(t, "b", frozenset(["e", "f"])) == frozenset(["b"])
    assert subtree_between(t, "d", frozenset()) == frozenset(["d"])
    assert subtree_between(t, "a", frozenset(["a"])) == frozenset()
    assert subtree_between(t, "a", frozenset(["e", "c"])) is None
    assert subtree_between(t, "b", frozenset(["c"])) is None


def test_subtree_between_agrees_with_enumeration():
    for t in small_universe(4, 7):
        for e in sorted(t.edges):
            for vset, boundary in subtrees_from(t, e):
                assert subtree_between(t, e, boundary) == vset


def test_hom_counts_unit_and_corolla():
    eta = unit_tree("u")
    c2 = corolla(2, "r")
    assert len(hom_set(eta, c2)) == 3
    assert len(hom_set(eta, eta)) == 1
    assert len(hom_set(c2, c2)) == 2
    assert len(hom_set(c2, eta)) == 0


def test_hom_set_matches_brute_force():
    univ = small_universe(2, 5)
    for S in univ:
        for T in univ:
            got = hom_set(S, T)
            want = brute_force_hom(S, T)
            assert len(got) == len(want)
            assert set(got) == set(want)


def test_hom_set_closed_under_composition():
    univ = small_universe(2, 4)
    for a, b, c in itertools.product(univ, repeat=3):
        hab, hbc, hac = hom_set(a, b), hom_set(b, c), set(hom_set(a, c))
        for f in hab:
            for g in hbc:
                assert f.then(g) in hac


def test_automorphisms_of_corolla():
    c2 = corolla(2)
    auts = automorphisms(c2)
    assert len(auts) == 2
    assert identity(c2) in auts


def test_faces_of_unit_and_corolla():
    assert faces(unit_tree()) == ()
    c2 = corolla(2, "r")
    fs = faces(c2)
    assert len(fs) == 3
    assert all(f.kind == "edge" for f in fs)
    assert {f.witness for f in fs} == set(c2.edges)


def test_faces_of_linear_two():
    l2 = linear_tree(2)
    fs = faces(l2)
    kinds = sorted((f.kind, f.witness) for f in fs)
    assert kinds == [("inner", "1"), ("outer", "0"), ("outer", "1")]


def test_inner_faces_of_paper_tree():
    t = paper_tree()
    inner = [f for f in faces(t) if f.kind == "inner"]
    assert {f.witness for f in inner} == {"b", "d"}
    outer = [f for f in faces(t) if f.kind == "outer"]
    # Removable: the binary top vertex (b) and the nullary vertex (d); the
    # root vertex has two inner edges attached.
    assert {f.witness for f in outer} == {"b", "d"}


def test_root_removal_example():
    # Root vertex with one inner input is removable; result is the subtree.
    t = build_tree(
        ["a", "b", "c", "d", "e", "f"],
        {"b": "a", "c": "a", "d": "a", "e": "b", "f": "b"},
        ["e", "f", "c", "d"],
    )
    assert "a" in removable_vertices(t)
    fm = outer_face(t, "a")
    assert fm.morphism.source.edges == frozenset(["b", "e", "f"])
    fm.morphism.validate()


def test_nullary_vertex_removal():
    t = build_tree(["a", "b", "c"], {"b": "a", "c": "a"}, ["c"])  # nullary on b
    assert set(removable_vertices(t)) == {"a", "b"}
    fm = outer_face(t, "b")
    src = fm.morphism.source
    assert src.edges == t.edges
    assert src.leaves == frozenset(["b", "c"])
    fm.morphism.validate()
    assert not fm.morphism.is_iso


def test_classify_elementary_maps():
    t = paper_tree()
    f = inner_face(t, "b")
    assert classify(f.morphism) == ("inner", "b")
    g = outer_face(t, "d")
    assert classify(g.morphism) == ("outer", "d")
    l1 = linear_tree(1)
    d = degeneracy(l1, "0")
    assert classify(d.morphism) == ("degeneracy", "0")
    assert classify(identity(t)) == ("iso", None)
    assert classify(edge_inclusion(corolla(2, "r"), "r").morphism) == ("outer", "r")
    # A two-step composite is not elementary.
    root_face = outer_face(linear_tree(2), "0")
    tip = edge_inclusion(root_face.morphism.source, "2")
    comp = tip.morphism.then(root_face.morphism)
    assert classify(comp) == ("composite", None)


def test_degeneracy_shape():
    l2 = linear_tree(2)
    ds = degeneracies(l2)
    assert {d.witness for d in ds} == {"0", "1"}
    d = degeneracy(l2, "1")
    assert d.morphism.target.edges == frozenset(["0", "2"])
    assert d.morphism.edge_map["1"] == "2"
    d.morphism.validate()


def test_factorize_identity_and_degeneracy():
    t = paper_tree()
    fac = factorize(identity(t))
    assert fac.degeneracies == () and fac.faces == ()
    assert fac.iso == identity(t)

    l1 = linear_tree(1)
    d = degeneracy(l1, "0")
    fac = factorize(d.morphism)
    assert [x.witness for x in fac.degeneracies] == ["0"]
    assert fac.faces == ()
    assert fac.compose() == d.morphism


def test_factorize_exhaustive_small():
    univ = small_universe(3, 6)
    rng = random.Random(11)
    for S in univ:
        for T in univ:
            for f in hom_set(S, T):
                fac = factorize(f)
                assert fac.compose() == f
                data = fac.canonical_data()
                for _ in range(3):
                    other = factorize(f, rng=rng)
                    assert other.compose() == f
                    assert other.canonical_data() == data


def test_codim2_exactly_two_small():
    for t in small_universe(4, 7):
        for beta, pairs in subfaces2(t).items():
            assert len(pairs) == 2, (t, beta, pairs)


def test_codim2_linear_matches_simplicial():
    # For linear trees the law is the classical simplicial identity count.
    l3 = linear_tree(3)
    grouped = subfaces2(l3)
    assert all(len(v) == 2 for v in grouped.values())
    # d_i d_j for 0 <= j < i <= 3 gives C(4,2) = 6 codim-2 subfaces.
    assert len(grouped) == 6


def test_factorize_rejects_nothing_valid():
    # Every hom between 2-vertex trees factors; sanity on a bigger sample.
    univ = small_universe(2, 5)
    for S in univ:
        for T in univ:
            for f in hom_set(S, T):
                assert factorize(f).compose() == f
