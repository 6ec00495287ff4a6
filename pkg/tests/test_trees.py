import random

import pytest

from dendroidal.trees import (
    PlanarTree,
    TreeError,
    build_planar_tree,
    build_tree,
    canonical_code,
    corolla,
    decompose_root,
    enumerate_trees,
    graft,
    graft_all,
    is_isomorphic,
    linear_tree,
    planar_tree_from_json,
    reduced_planar_count,
    reduced_planar_trees,
    standard_form,
    to_dot,
    tree_from_code,
    tree_from_json,
    unit_tree,
)


def paper_example_tree():
    # Root edge a, bottom vertex with inputs b, c, d; binary vertex on b with
    # inputs e, f; nullary vertex on d.
    return build_tree(
        ["a", "b", "c", "d", "e", "f"],
        {"b": "a", "c": "a", "d": "a", "e": "b", "f": "b"},
        ["e", "f", "c"],
    )


def test_build_unit_tree():
    t = build_tree(["e"], {}, ["e"])
    assert t == unit_tree("e")
    assert t.root == "e"
    assert t.n_vertices == 0


def test_build_two_corolla():
    t = build_tree(["r", "a", "b"], {"a": "r", "b": "r"}, ["a", "b"])
    assert t.n_vertices == 1
    assert t.children("r") == ("a", "b")
    assert is_isomorphic(t, corolla(2))


def test_nullary_capped_edge_is_valid():
    # Maximal edge not marked as a leaf carries a nullary vertex.
    t = build_tree(["r", "a"], {"a": "r"}, [])
    assert t.n_vertices == 2
    assert t.vertex("a").valence == 0
    assert t.vertex("r").valence == 1


def test_build_errors():
    with pytest.raises(TreeError) as e:
        build_tree(["a", "b"], {"a": "b", "b": "a"}, [])
    assert e.value.code in ("NoRoot", "Cycle")
    with pytest.raises(TreeError) as e:
        build_tree(["a", "b"], {}, [])
    assert e.value.code == "MultipleRoots"
    with pytest.raises(TreeError) as e:
        build_tree(["a", "b"], {"b": "a"}, ["a"])
    assert e.value.code == "LeafNotMaximal"
    with pytest.raises(TreeError) as e:
        build_tree(["a", "a"], {}, ["a"])
    assert e.value.code == "EdgeClash"


def test_paper_tree_shape():
    t = paper_example_tree()
    assert t.n_vertices == 3
    assert sorted(v.valence for v in t.vertices()) == [0, 2, 3]
    assert t.inner_edges == ("b", "d")


def test_graft_edge_clash_rejected():
    with pytest.raises(TreeError) as e:
        graft(unit_tree("e"), unit_tree("e"))
    assert e.value.code == "EdgeClash"


def test_graft_root_not_leaf_rejected():
    with pytest.raises(TreeError) as e:
        graft(corolla(2, "r"), build_tree(["x", "y"], {"y": "x"}, ["y"]))
    assert e.value.code == "RootNotLeafOfT"


def test_graft_two_corollas():
    base = corolla(2, "r")  # leaves 1, 2
    top = build_tree(["1", "s", "t"], {"s": "1", "t": "1"}, ["s", "t"])
    g = graft(base, top)
    assert g.n_vertices == 2
    assert g.leaves == frozenset(["2", "s", "t"])
    assert len(g.leaves) == 3


def test_graft_unit_is_neutral():
    c1 = build_tree(["r", "a"], {"a": "r"}, ["a"])
    assert graft(c1, unit_tree("a")) == c1


def test_decompose_unit_tree_rejected():
    with pytest.raises(TreeError) as e:
        decompose_root(unit_tree())
    assert e.value.code == "NoVertex"


def test_decompose_corolla():
    c = corolla(2, "r")
    head, subs = decompose_root(c)
    assert head == c
    assert [s.edges for s in subs] == [frozenset(["1"]), frozenset(["2"])]
    assert all(s.n_vertices == 0 for s in subs)


def test_decompose_paper_tree():
    t = paper_example_tree()
    head, subs = decompose_root(t)
    assert head.leaves == frozenset(["b", "c", "d"])
    assert head.root == "a"
    by_root = {s.root: s for s in subs}
    assert by_root["b"].n_vertices == 1
    assert by_root["c"] == unit_tree("c")
    assert by_root["d"].n_vertices == 1  # the nullary vertex
    assert by_root["d"].leaves == frozenset()


@pytest.mark.parametrize("max_vertices", [0, 1, 2, 3])
def test_decompose_graft_round_trip(max_vertices):
    for t in enumerate_trees(max_vertices):
        if t.n_vertices == 0:
            continue
        head, subs = decompose_root(t)
        assert graft_all(head, subs) == t


def test_round_trip_up_to_five_vertices():
    for t in enumerate_trees(5, max_edges=8):
        if t.n_vertices:
            head, subs = decompose_root(t)
            assert graft_all(head, subs) == t


def test_isomorphism_relabeling():
    a = build_tree(["r", "a", "b"], {"a": "r", "b": "r"}, ["a", "b"])
    b = build_tree(["x", "y", "z"], {"y": "x", "z": "x"}, ["y", "z"])
    assert is_isomorphic(a, b)
    assert canonical_code(a) == canonical_code(b) == "(**)"


def test_planar_vs_symmetric_isomorphism():
    # The two binary trees with three leaves: not planar-isomorphic,
    # symmetric-isomorphic.
    left = build_tree(
        ["r", "p", "c", "x", "y"], {"p": "r", "c": "r", "x": "p", "y": "p"}, ["c", "x", "y"]
    )
    right = build_tree(
        ["r", "c", "p", "x", "y"], {"c": "r", "p": "r", "x": "p", "y": "p"}, ["c", "x", "y"]
    )
    pl = build_planar_tree(left, {"r": ("p", "c"), "p": ("x", "y")})
    pr = build_planar_tree(right, {"r": ("c", "p"), "p": ("x", "y")})
    assert not is_isomorphic(pl, pr)
    assert is_isomorphic(pl.tree, pr.tree)


def brute_force_isomorphic(a, b):
    """Oracle: search all edge bijections for a structure isomorphism."""
    import itertools

    if len(a.edges) != len(b.edges):
        return False
    bs = sorted(b.edges)
    for perm in itertools.permutations(bs):
        m = dict(zip(sorted(a.edges), perm))
        if m[a.root] != b.root:
            continue
        if {m[e] for e in a.leaves} != set(b.leaves):
            continue
        if all(m[a.parent[e]] == b.parent.get(m[e]) for e in a.parent):
            ok = len(a.parent) == len(b.parent)
            if ok:
                return True
    return False


def test_canonical_code_matches_brute_force_partition():
    trees = enumerate_trees(2, max_edges=5)
    # Re-derive the partition by pairwise brute force and compare class counts.
    classes = []
    for t in trees:
        for cls in classes:
            if brute_force_isomorphic(t, cls[0]):
                cls.append(t)
                break
        else:
            classes.append([t])
    assert len(classes) == len({canonical_code(t) for t in trees})
    assert len(classes) == len(trees)  # enumerate returns one per class


def test_code_invariant_under_relabeling():
    rng = random.Random(7)
    for t in enumerate_trees(3, max_edges=6):
        names = [f"n{i}" for i in range(len(t.edges))]
        rng.shuffle(names)
        relabeled = t.relabel(dict(zip(sorted(t.edges), names)))
        assert canonical_code(relabeled) == canonical_code(t)
        assert standard_form(relabeled) == standard_form(t)


def test_standard_form_is_fixed_point():
    for t in enumerate_trees(3):
        s = standard_form(t)
        assert standard_form(s) == s
        assert s.root == "0"


def test_enumerate_reduced_planar_counts():
    expected = [1, 1, 3, 11, 45]
    for n, want in zip(range(1, 6), expected):
        got = reduced_planar_trees(n)
        assert len(got) == want
        assert reduced_planar_count(n) == want
        assert all(isinstance(t, PlanarTree) for t in got)


def test_enumerate_small_symmetric():
    # eta only
    assert len(enumerate_trees(0)) == 1
    # eta plus corollas C_0..C_2 within a 3-edge budget
    assert len(enumerate_trees(1, max_edges=3)) == 4


def test_linear_trees():
    l3 = linear_tree(3)
    assert l3.n_vertices == 3
    assert canonical_code(l3) == "(((*)))"
    assert l3.inner_edges == ("1", "2")


def test_json_round_trip():
    t = paper_example_tree()
    assert tree_from_json(t.to_json()) == t
    p = build_planar_tree(t)
    assert planar_tree_from_json(p.to_json()) == p


def test_dot_output_mentions_all_edges():
    t = paper_example_tree()
    dot = to_dot(t)
    for e in t.edges:
        assert f'"{e}"' in dot
    assert "rankdir=BT" in dot


def test_tree_from_code_round_trip():
    for t in enumerate_trees(4, max_edges=7):
        assert canonical_code(tree_from_code(canonical_code(t))) == canonical_code(t)
