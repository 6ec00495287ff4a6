"""Tensor products of representable dendroidal sets via percolation trees.

A percolation tree for a pair (S, T) is a tree whose edges carry pairs of
edges and whose vertices are copies of S-vertices at a T-coordinate or
dually; they enumerate the nondegenerate shapes of the tensor product.  The
poset is generated by interchange moves pushing a T-vertex below an
S-vertex; the tensor of representables glues the representables of all
percolation trees along shared faces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .dsets import FiniteDendroidalSet
from .omega import OmegaMorphism, hom_set, subtree_between
from .trees import Tree, TreeError, canonical_code


class ScaleLimit(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PercolationTree:
    """A tree with pair-labeled edges and copied vertices.

    ``vertex_label[e]`` is ``("S", v, t)`` for the copy of the S-vertex
    above ``v`` at T-coordinate ``t``, or ``("T", s, w)`` dually.
    """

    tree: Tree
    edge_label: Mapping
    vertex_label: Mapping

    def __eq__(self, other):
        if not isinstance(other, PercolationTree):
            return NotImplemented
        return self.code() == other.code()

    def __hash__(self):
        return hash(self.code())

    def __repr__(self):
        return f"PercolationTree({self.code()})"

    def code(self) -> tuple:
        """Canonical labeled code; equal iff label-isomorphic."""

        def enc(e):
            kids = tuple(sorted(enc(c) for c in self.tree.children(e)))
            vlabel = self.vertex_label.get(e)
            return (self.edge_label[e], vlabel, kids)

        return enc(self.tree.root)

    def validate(self, S: Tree, T: Tree) -> None:
        tree = self.tree
        assert self.edge_label[tree.root] == (S.root, T.root)
        leaf_labels = sorted(self.edge_label[e] for e in tree.leaves)
        want = sorted(itertools.product(sorted(S.leaves), sorted(T.leaves)))
        assert leaf_labels == want, (leaf_labels, want)
        for e in tree.vertex_edges:
            kind, a, b = self.vertex_label[e]
            s, t = self.edge_label[e]
            kid_labels = sorted(self.edge_label[c] for c in tree.children(e))
            if kind == "S":
                assert a in S.vertex_edges and s == a
                assert kid_labels == sorted((c, t) for c in S.children(a))
            else:
                assert b in T.vertex_edges and t == b
                assert kid_labels == sorted((s, c) for c in T.children(b))


def _build(edges, parent, leaves, elabel, vlabel) -> PercolationTree:
    return PercolationTree(
        Tree(frozenset(edges), dict(parent), frozenset(leaves)), dict(elabel), dict(vlabel)
    )


def top_percolation_tree(S: Tree, T: Tree) -> PercolationTree:
    """Copies of T grafted on the leaves of the S-structure at the bottom."""
    edges, parent, leaves, elabel, vlabel = [], {}, [], {}, {}
    counter = itertools.count()

    def new_edge(label):
        name = f"e{next(counter)}"
        edges.append(name)
        elabel[name] = label
        return name

    def build_T_copy(s_leaf, t_edge, parent_name):
        name = new_edge((s_leaf, t_edge))
        if parent_name is not None:
            parent[name] = parent_name
        if t_edge in T.leaves:
            leaves.append(name)
            return name
        vlabel[name] = ("T", s_leaf, t_edge)
        for c in T.children(t_edge):
            build_T_copy(s_leaf, c, name)
        return name

    def build_S_part(s_edge, parent_name):
        if s_edge in S.leaves:
            return build_T_copy(s_edge, T.root, parent_name)
        name = new_edge((s_edge, T.root))
        if parent_name is not None:
            parent[name] = parent_name
        vlabel[name] = ("S", s_edge, T.root)
        for c in S.children(s_edge):
            build_S_part(c, name)
        return name

    build_S_part(S.root, None)
    return _build(edges, parent, leaves, elabel, vlabel)


def percolation_moves(P: PercolationTree, S: Tree, T: Tree) -> list[PercolationTree]:
    """All single interchange moves pushing a T-vertex below an S-vertex."""
    out = []
    tree = P.tree
    for e in tree.vertex_edges:
        label = P.vertex_label[e]
        if label[0] != "S":
            continue
        _, v, t = label
        if t in T.leaves:
            continue
        kids = tree.children(e)
        if any(c in tree.leaves or P.vertex_label[c][0] != "T" for c in kids):
            continue
        out.append(_apply_move(P, S, T, e))
    return out


def _apply_move(P: PercolationTree, S: Tree, T: Tree, at: str) -> PercolationTree:
    """Rewrite the configuration at the S-vertex copy on edge ``at``.

    Before: ("S", v, t) with a full rank of ("T", s_i, t) copies above its
    inputs (t is the T-vertex, identified with its output edge).  After:
    ("T", v, t) at the bottom with copies ("S", v, t_j) above it, and the
    grandchild subtrees re-attached by their labels.
    """
    tree = P.tree
    _, v, t = P.vertex_label[at]
    t_children = T.children(t)
    s_children = S.children(v)
    hang: dict = {}
    for c in tree.children(at):
        for g in tree.children(c):
            hang[P.edge_label[g]] = g

    edges = set(tree.edges)
    parent = dict(tree.parent)
    elabel = dict(P.edge_label)
    vlabel = dict(P.vertex_label)
    for c in tree.children(at):
        edges.remove(c)
        parent.pop(c, None)
        elabel.pop(c)
        vlabel.pop(c, None)
    vlabel[at] = ("T", v, t)

    counter = itertools.count()

    def fresh():
        while True:
            name = f"m{next(counter)}"
            if name not in edges:
                return name

    for t_j in t_children:
        mid = fresh()
        edges.add(mid)
        parent[mid] = at
        elabel[mid] = (v, t_j)
        vlabel[mid] = ("S", v, t_j)
        for s_i in s_children:
            parent[hang[(s_i, t_j)]] = mid

    return _build(edges, parent, tree.leaves, elabel, vlabel)


@dataclass(eq=False)
class PercolationPoset:
    elements: tuple  # PercolationTrees, index order = discovery from the top
    covers: tuple  # pairs (i, j): element i covers element j

    def __len__(self):
        return len(self.elements)

    def top_and_bottom(self) -> tuple[int, int]:
        above = {j for _, j in self.covers}
        below = {i for i, _ in self.covers}
        tops = [k for k in range(len(self.elements)) if k not in above]
        bottoms = [k for k in range(len(self.elements)) if k not in below]
        if len(tops) != 1 or len(bottoms) != 1:
            raise ValueError("poset does not have unique extremes")
        return tops[0], bottoms[0]

    def is_connected(self) -> bool:
        adj: dict = {k: set() for k in range(len(self.elements))}
        for i, j in self.covers:
            adj[i].add(j)
            adj[j].add(i)
        seen, stack = set(), [0]
        while stack:
            k = stack.pop()
            if k in seen:
                continue
            seen.add(k)
            stack.extend(adj[k])
        return len(seen) == len(self.elements)

    def to_dot(self, name: str = "percolation") -> str:
        lines = [f"digraph {name} {{", "  rankdir=TB;"]
        for k in range(len(self.elements)):
            lines.append(f'  n{k} [label="T{k + 1}", shape=box];')
        for i, j in sorted(self.covers):
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines)


def percolation_poset(S: Tree, T: Tree, scale_limit: int = 4) -> PercolationPoset:
    """All percolation trees of the pair, ordered by interchange moves.

    Breadth-first from the tree with the whole of T above the whole of S;
    every move is a cover of the poset.
    """
    if S.n_vertices > scale_limit or T.n_vertices > scale_limit:
        raise ScaleLimit(f"percolation poset limited to {scale_limit} vertices per factor")
    top = top_percolation_tree(S, T)
    elements = [top]
    index = {top.code(): 0}
    covers = set()
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for moved in percolation_moves(elements[i], S, T):
                code = moved.code()
                if code not in index:
                    index[code] = len(elements)
                    elements.append(moved)
                    nxt.append(index[code])
                covers.add((i, index[code]))
        frontier = nxt
    for p in elements:
        p.validate(S, T)
    return PercolationPoset(tuple(elements), tuple(sorted(covers)))


# ---------------------------------------------------------------------------
# Tensor of representables


def _orbit_code(P: PercolationTree, S: Tree, T: Tree, sub_vertices, root_edge, boundary):
    """Canonical code of a labeled operation under interchange moves.

    The operation is the labeled subtree of the percolation tree spanned by
    ``sub_vertices``; its class in the tensor operad is its orbit under
    interchange, canonicalized as the minimum labeled code.
    """
    sub = _extract_subtree(P, root_edge, sub_vertices)
    seen = {sub.code()}
    frontier = [sub]
    while frontier:
        nxt = []
        for q in frontier:
            for moved in percolation_moves(q, S, T) + _inverse_moves(q, S, T):
                c = moved.code()
                if c not in seen:
                    seen.add(c)
                    nxt.append(moved)
        frontier = nxt
    return min(seen)


def _extract_subtree(P: PercolationTree, root_edge, vertices) -> PercolationTree:
    """The labeled fragment spanned by a vertex set; boundary edges are leaves."""
    edges = {root_edge}
    stack = [root_edge]
    while stack:
        e = stack.pop()
        if e in vertices:
            for c in P.tree.children(e):
                edges.add(c)
                stack.append(c)
    parent = {e: p for e, p in P.tree.parent.items() if e in edges and p in edges}
    leaves = frozenset(e for e in edges if e not in vertices)
    return PercolationTree(
        Tree(frozenset(edges), parent, leaves),
        {e: P.edge_label[e] for e in edges},
        {e: P.vertex_label[e] for e in edges if e in vertices},
    )


def _inverse_moves(P: PercolationTree, S: Tree, T: Tree) -> list[PercolationTree]:
    """Upward interchange moves: push an S-vertex below a T-vertex back up."""
    out = []
    tree = P.tree
    for e in tree.vertex_edges:
        label = P.vertex_label[e]
        if label[0] != "T":
            continue
        _, s, w = label
        if s in S.leaves:
            continue
        kids = tree.children(e)
        if any(c in tree.leaves or P.vertex_label[c][0] != "S" for c in kids):
            continue
        # All children must be copies of the same S-vertex (forced by labels).
        out.append(_apply_inverse_move(P, S, T, e))
    return out


def _apply_inverse_move(P: PercolationTree, S: Tree, T: Tree, at: str) -> PercolationTree:
    tree = P.tree
    _, s, w = P.vertex_label[at]
    s_children = S.children(s)
    t_children = T.children(w)
    hang: dict = {}
    for c in tree.children(at):
        for g in tree.children(c):
            hang[P.edge_label[g]] = g
    edges = set(tree.edges)
    parent = dict(tree.parent)
    elabel = dict(P.edge_label)
    vlabel = dict(P.vertex_label)
    for c in tree.children(at):
        edges.remove(c)
        parent.pop(c, None)
        elabel.pop(c)
        vlabel.pop(c, None)
    vlabel[at] = ("S", s, w)
    counter = itertools.count()

    def fresh():
        while True:
            name = f"u{next(counter)}"
            if name not in edges:
                return name

    for s_i in s_children:
        mid = fresh()
        edges.add(mid)
        parent[mid] = at
        elabel[mid] = (s_i, w)
        vlabel[mid] = ("T", s_i, w)
        for t_j in t_children:
            parent[hang[(s_i, t_j)]] = mid
    return _build(edges, parent, tree.leaves, elabel, vlabel)


def tensor_representables(
    S: Tree, T: Tree, universe: tuple, scale_limit: int = 4
) -> FiniteDendroidalSet:
    """The tensor of two representables as a tabulated presheaf.

    A dendrex of shape R is a morphism into some percolation tree, recorded
    up to the interchange identifications: its edge labels plus the orbit
    class of each vertex operation.
    """
    poset = percolation_poset(S, T, scale_limit)
    strips = [(p, p.tree) for p in poset.elements]

    def dendrex_data(p: PercolationTree, f: OmegaMorphism):
        shape = f.source
        labels = tuple(
            (e, p.edge_label[f(e)]) for e in sorted(shape.edges)
        )
        ops = []
        for e0 in shape.vertex_edges:
            images = frozenset(f(c) for c in shape.children(e0))
            vset = subtree_between(p.tree, f(e0), images)
            ops.append((e0, _orbit_code(p, S, T, vset, f(e0), images)))
        return (labels, tuple(ops))

    dendrex_sets = {}
    witness: dict = {}
    for shape in universe:
        found = {}
        for p, strip in strips:
            for f in hom_set(shape, strip):
                data = dendrex_data(p, f)
                if data not in found:
                    found[data] = (p, f)
        dendrex_sets[shape] = tuple(sorted(found, key=repr))
        for data, wit in found.items():
            witness[data] = wit

    def act_std(g: OmegaMorphism, x):
        p, f = witness[x]
        return dendrex_data(p, g.then(f))

    label = f"Omega[{canonical_code(S)}]x[{canonical_code(T)}]"
    return FiniteDendroidalSet(universe, dendrex_sets, act_std, label=label)


def percolation_tree_json(P: PercolationTree) -> dict:
    return {
        "edges": sorted(P.tree.edges),
        "parent": {e: P.tree.parent[e] for e in sorted(P.tree.parent)},
        "leaves": sorted(P.tree.leaves),
        "edge_labels": {e: list(P.edge_label[e]) for e in sorted(P.tree.edges)},
        "vertex_labels": {
            e: list(P.vertex_label[e]) for e in sorted(P.vertex_label)
        },
    }
