"""Symmetric and planar rooted trees: building, grafting, canonical forms, enumeration.

A tree is a finite edge poset with a unique minimal edge (the root) together
with a chosen subset of maximal edges called leaves.  A maximal edge that is
not a leaf carries a nullary vertex.  Every non-leaf edge ``e`` carries the
vertex whose output is ``e`` and whose inputs are the edges directly above
``e``; consequently vertices are identified with non-leaf edges throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping


class TreeError(ValueError):
    """Structural invariant violation; ``code`` names the failed check."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


LEAF_CODE = "*"


@dataclass(frozen=True, eq=False)
class Vertex:
    """A vertex, identified by its outgoing edge."""

    out_edge: str
    in_edges: tuple[str, ...]

    @property
    def valence(self) -> int:
        return len(self.in_edges)


@dataclass(frozen=True, eq=False)
class Tree:
    """Finite rooted tree with designated leaf subset.

    ``parent`` maps each non-root edge to its immediate predecessor.  Use
    :func:`build_tree` to construct validated instances.
    """

    edges: frozenset
    parent: Mapping[str, str]
    leaves: frozenset

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return (
            self.edges == other.edges
            and dict(self.parent) == dict(other.parent)
            and self.leaves == other.leaves
        )

    @cached_property
    def _hash(self) -> int:
        return hash((self.edges, tuple(sorted(self.parent.items())), self.leaves))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Tree({sorted(self.edges)}, root={self.root!r}, leaves={sorted(self.leaves)})"

    @cached_property
    def root(self) -> str:
        (r,) = [e for e in self.edges if e not in self.parent]
        return r

    @cached_property
    def _children(self) -> dict:
        out: dict = {e: [] for e in self.edges}
        for child, par in self.parent.items():
            out[par].append(child)
        return {e: tuple(sorted(cs)) for e, cs in out.items()}

    def children(self, edge: str) -> tuple[str, ...]:
        return self._children[edge]

    @cached_property
    def vertex_edges(self) -> tuple[str, ...]:
        """Edges carrying a vertex, i.e. all non-leaf edges."""
        return tuple(sorted(self.edges - self.leaves))

    def vertex(self, edge: str) -> Vertex:
        if edge in self.leaves:
            raise TreeError("NoVertex", f"edge {edge!r} is a leaf")
        return Vertex(edge, self.children(edge))

    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(self.vertex(e) for e in self.vertex_edges)

    @property
    def n_vertices(self) -> int:
        return len(self.edges) - len(self.leaves)

    def is_inner(self, edge: str) -> bool:
        return edge != self.root and edge not in self.leaves

    @cached_property
    def inner_edges(self) -> tuple[str, ...]:
        return tuple(sorted(e for e in self.edges if self.is_inner(e)))

    def up_set(self, edge: str) -> frozenset:
        """All edges weakly above ``edge``."""
        acc = {edge}
        stack = [edge]
        while stack:
            for c in self._children.get(stack.pop(), ()):
                acc.add(c)
                stack.append(c)
        return frozenset(acc)

    def subtree_above(self, edge: str) -> "Tree":
        """The full subtree rooted at ``edge``."""
        keep = self.up_set(edge)
        return Tree(
            frozenset(keep),
            {e: p for e, p in self.parent.items() if e in keep and p in keep},
            self.leaves & keep,
        )

    def relabel(self, mapping: Mapping[str, str]) -> "Tree":
        """Rename edges along an injective mapping (id on missing keys)."""
        ren = lambda e: mapping.get(e, e)
        edges = [ren(e) for e in self.edges]
        if len(set(edges)) != len(edges):
            raise TreeError("EdgeClash", "relabeling is not injective")
        return Tree(
            frozenset(edges),
            {ren(e): ren(p) for e, p in self.parent.items()},
            frozenset(ren(e) for e in self.leaves),
        )

    def to_json(self) -> dict:
        return {
            "edges": sorted(self.edges),
            "parent": {e: self.parent[e] for e in sorted(self.parent)},
            "leaves": sorted(self.leaves),
        }


def build_tree(edges: Iterable[str], parent_map: Mapping[str, str], leaves: Iterable[str]) -> Tree:
    """Validate raw data and return a :class:`Tree`.

    Raises :class:`TreeError` with codes ``NoRoot``, ``MultipleRoots``,
    ``Cycle`` or ``LeafNotMaximal``.
    """
    edge_list = list(edges)
    if len(set(edge_list)) != len(edge_list):
        raise TreeError("EdgeClash", "duplicate edge ids")
    edge_set = frozenset(edge_list)
    parent = dict(parent_map)
    for e, p in parent.items():
        if e not in edge_set or p not in edge_set:
            raise TreeError("NoRoot", f"parent entry {e!r}->{p!r} mentions unknown edge")
    roots = [e for e in edge_set if e not in parent]
    if not roots:
        raise TreeError("NoRoot" if not edge_set else "Cycle", "no parentless edge")
    if len(roots) > 1:
        raise TreeError("MultipleRoots", f"parentless edges {sorted(roots)}")
    # Walk down from every edge; a repeat means the parent map loops.
    for e in edge_set:
        seen = set()
        while e in parent:
            if e in seen:
                raise TreeError("Cycle", "parent chain does not reach the root")
            seen.add(e)
            e = parent[e]
    leaf_set = frozenset(leaves)
    if not leaf_set <= edge_set:
        raise TreeError("LeafNotMaximal", "leaf outside edge set")
    has_child = set(parent.values())
    for e in leaf_set:
        if e in has_child:
            raise TreeError("LeafNotMaximal", f"leaf {e!r} has edges above it")
    return Tree(edge_set, parent, leaf_set)


def tree_from_json(data: Mapping) -> Tree:
    return build_tree(data["edges"], data.get("parent", {}), data.get("leaves", []))


def unit_tree(edge: str = "0") -> Tree:
    """The tree with one edge and no vertices."""
    return Tree(frozenset([edge]), {}, frozenset([edge]))


def corolla(n: int, root: str = "0", leaf_prefix: str = "") -> Tree:
    """The n-corolla: one vertex, ``n`` leaves."""
    kids = [f"{leaf_prefix}{i + 1}" for i in range(n)]
    return Tree(frozenset([root, *kids]), {k: root for k in kids}, frozenset(kids))


def linear_tree(n: int) -> Tree:
    """The linear tree with ``n`` unary vertices and edges ``"0".."n"``."""
    edges = [str(i) for i in range(n + 1)]
    return Tree(
        frozenset(edges),
        {str(i): str(i - 1) for i in range(1, n + 1)},
        frozenset([str(n)]),
    )


def graft(base: Tree, top: Tree) -> Tree:
    """Graft ``top`` onto ``base`` along the root of ``top``.

    The root of ``top`` must be a leaf of ``base`` and the only shared edge.
    Grafting the unit tree is neutral, so leaves are
    ``(L(base) - {r}) | L(top)``.
    """
    r = top.root
    if r not in base.leaves:
        raise TreeError("RootNotLeafOfT", f"root {r!r} of the grafted tree is not a leaf")
    if (base.edges & top.edges) != {r} or r == base.root:
        clash = sorted((base.edges & top.edges) - {r}) or [r]
        raise TreeError("EdgeClash", f"shared edges besides the graft point: {clash}")
    parent = dict(base.parent)
    parent.update(top.parent)
    return Tree(base.edges | top.edges, parent, (base.leaves - {r}) | top.leaves)


def graft_all(base: Tree, tops: Iterable[Tree]) -> Tree:
    out = base
    for t in tops:
        out = graft(out, t)
    return out


def decompose_root(tree: Tree) -> tuple[Tree, tuple[Tree, ...]]:
    """Split off the root corolla; regrafting the parts reproduces the tree."""
    if tree.n_vertices == 0:
        raise TreeError("NoVertex", "the unit tree has no root vertex")
    r = tree.root
    kids = tree.children(r)
    root_corolla = Tree(
        frozenset([r, *kids]), {k: r for k in kids}, frozenset(kids)
    )
    return root_corolla, tuple(tree.subtree_above(k) for k in kids)


@dataclass(frozen=True, eq=False)
class PlanarTree:
    """A tree plus a total order on the inputs of every vertex."""

    tree: Tree
    input_order: Mapping[str, tuple]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlanarTree):
            return NotImplemented
        return self.tree == other.tree and dict(self.input_order) == dict(other.input_order)

    def __hash__(self) -> int:
        return hash((self.tree, tuple(sorted(self.input_order.items()))))

    def __repr__(self) -> str:
        return f"PlanarTree({self.tree!r})"

    @property
    def edges(self) -> frozenset:
        return self.tree.edges

    @property
    def root(self) -> str:
        return self.tree.root

    @property
    def leaves(self) -> frozenset:
        return self.tree.leaves

    def children(self, edge: str) -> tuple[str, ...]:
        return self.input_order[edge] if edge in self.input_order else ()

    def planar_leaves(self) -> tuple[str, ...]:
        """Leaf edges in left-to-right planar order."""
        out = []

        def walk(e):
            if e in self.tree.leaves:
                out.append(e)
            else:
                for c in self.children(e):
                    walk(c)

        walk(self.root)
        return tuple(out)

    def relabel(self, mapping: Mapping[str, str]) -> "PlanarTree":
        ren = lambda e: mapping.get(e, e)
        return PlanarTree(
            self.tree.relabel(mapping),
            {ren(e): tuple(ren(c) for c in cs) for e, cs in self.input_order.items()},
        )

    def to_json(self) -> dict:
        data = self.tree.to_json()
        data["planar_order"] = {e: list(self.input_order[e]) for e in sorted(self.input_order)}
        return data


def build_planar_tree(tree: Tree, input_order: Mapping[str, tuple] | None = None) -> PlanarTree:
    """Attach a planar structure; defaults to sorted-edge-id order."""
    if input_order is None:
        input_order = {e: tree.children(e) for e in tree.vertex_edges}
    order = {e: tuple(cs) for e, cs in input_order.items()}
    if set(order) != set(tree.vertex_edges):
        raise TreeError("LeafNotMaximal", "planar order must cover exactly the vertices")
    for e, cs in order.items():
        if sorted(cs) != sorted(tree.children(e)):
            raise TreeError("LeafNotMaximal", f"planar order at {e!r} does not list its inputs")
    return PlanarTree(tree, order)


def planar_tree_from_json(data: Mapping) -> PlanarTree:
    tree = tree_from_json(data)
    order = data.get("planar_order")
    if order is not None:
        order = {e: tuple(cs) for e, cs in order.items()}
    return build_planar_tree(tree, order)


def any_tree_from_json(data: Mapping) -> Tree | PlanarTree:
    if "planar_order" in data:
        return planar_tree_from_json(data)
    return tree_from_json(data)


# ---------------------------------------------------------------------------
# Canonical codes (AHU-style) and standard representatives


def canonical_code(t: Tree | PlanarTree) -> str:
    """Code equal on two trees iff they are isomorphic.

    Symmetric trees sort child codes; planar trees keep planar order.  A leaf
    edge is ``*`` and a vertex is the bracketed concatenation of its input
    codes (so a nullary vertex is ``()``).
    """
    if isinstance(t, PlanarTree):
        tree, kids = t.tree, t.children
        planar = True
    else:
        tree, kids = t, t.children
        planar = False

    def code(e: str) -> str:
        if e in tree.leaves:
            return LEAF_CODE
        subs = [code(c) for c in kids(e)]
        if not planar:
            subs.sort()
        return "(" + "".join(subs) + ")"

    return code(tree.root)


def is_isomorphic(a: Tree | PlanarTree, b: Tree | PlanarTree) -> bool:
    """Isomorphism test; planar iff both arguments are planar."""
    if isinstance(a, PlanarTree) != isinstance(b, PlanarTree):
        a = a.tree if isinstance(a, PlanarTree) else a
        b = b.tree if isinstance(b, PlanarTree) else b
    return canonical_code(a) == canonical_code(b)


def _parse_code(code: str) -> tuple:
    """Parse a canonical code into nested child tuples (leaf -> None)."""

    def parse(i: int):
        if code[i] == LEAF_CODE:
            return None, i + 1
        if code[i] != "(":
            raise TreeError("Cycle", f"bad code at {i}: {code!r}")
        i += 1
        kids = []
        while code[i] != ")":
            node, i = parse(i)
            kids.append(node)
        return tuple(kids), i + 1

    node, end = parse(0)
    if end != len(code):
        raise TreeError("Cycle", f"trailing characters in code {code!r}")
    return node


def planar_tree_from_code(code: str) -> PlanarTree:
    """Standard planar tree of a code: edges named by breadth-first order."""
    shape = _parse_code(code)
    edges, parent, leaves, order = [], {}, [], {}
    queue = [(shape, None)]
    while queue:
        node, par = queue.pop(0)
        name = str(len(edges))
        edges.append(name)
        if par is not None:
            parent[name] = par
        if node is None:
            leaves.append(name)
        else:
            order[name] = ()
            queue.extend((child, name) for child in node)
    # Second pass to record planar child order (children got consecutive names).
    tree = Tree(frozenset(edges), parent, frozenset(leaves))
    by_parent: dict = {e: [] for e in edges}
    for name in edges:
        if name in parent:
            by_parent[parent[name]].append(name)
    for e in order:
        order[e] = tuple(sorted(by_parent[e], key=int))
    return PlanarTree(tree, order)


def tree_from_code(code: str) -> Tree:
    """Standard symmetric tree of a code (root ``"0"``, then BFS order)."""
    return planar_tree_from_code(code).tree


def standard_form(t: Tree | PlanarTree) -> Tree | PlanarTree:
    """The standard representative of the isomorphism class of ``t``."""
    if isinstance(t, PlanarTree):
        return planar_tree_from_code(canonical_code(t))
    return tree_from_code(canonical_code(t))


def standard_edge_map(t: Tree | PlanarTree) -> dict:
    """The canonical bijection from standard-form edge names onto ``t``.

    Children are visited in sorted (code, edge id) order for symmetric trees
    and in planar order for planar trees, matching the breadth-first naming
    of the standard representative, so composing with any structure map of
    ``t`` is deterministic.
    """
    if isinstance(t, PlanarTree):
        tree, kids = t.tree, t.children
        planar = True
    else:
        tree, kids = t, t.children
        planar = False

    codes: dict = {}

    def code(e: str) -> str:
        if e in tree.leaves:
            codes[e] = LEAF_CODE
        else:
            subs = [code(c) for c in kids(e)]
            if not planar:
                subs.sort()
            codes[e] = "(" + "".join(subs) + ")"
        return codes[e]

    code(tree.root)
    mapping = {}
    queue = [tree.root]
    counter = 0
    while queue:
        e = queue.pop(0)
        mapping[str(counter)] = e
        counter += 1
        children = list(kids(e)) if e not in tree.leaves else []
        if not planar:
            children.sort(key=lambda c: (codes[c], c))
        queue.extend(children)
    return mapping


def planar_contract(pt: PlanarTree, edge: str) -> PlanarTree:
    """Contract an inner edge, splicing its inputs into the parent's rank."""
    tree = pt.tree
    if edge == tree.root or edge in tree.leaves:
        raise TreeError("NoVertex", f"{edge!r} is not an inner edge")
    parent_edge = tree.parent[edge]
    new_parent = {}
    for e, p in tree.parent.items():
        if e == edge:
            continue
        new_parent[e] = parent_edge if p == edge else p
    order = {}
    for e, kids in pt.input_order.items():
        if e == edge:
            continue
        if e == parent_edge:
            spliced = []
            for k in kids:
                spliced.extend(pt.children(edge) if k == edge else [k])
            order[e] = tuple(spliced)
        else:
            order[e] = kids
    return PlanarTree(Tree(tree.edges - {edge}, new_parent, tree.leaves), order)


# ---------------------------------------------------------------------------
# Enumeration


def _code_candidates(
    max_vertices: int, max_edges: int, reduced: bool, planar: bool, nullary: bool
):
    """All subtree codes within budget, as (code, vertices, edges, leaves)."""
    memo: dict = {}

    def gen(v: int, e: int) -> list[tuple[str, int, int, int]]:
        key = (v, e)
        if key in memo:
            return memo[key]
        out = []
        if e >= 1:
            out.append((LEAF_CODE, 0, 1, 1))
            if v >= 1:
                for kids in child_lists(v - 1, e - 1, None):
                    codes, vv, ee, ll = kids
                    if reduced and len(codes) == 1:
                        continue
                    if not nullary and len(codes) == 0:
                        continue
                    out.append(("(" + "".join(codes) + ")", vv + 1, ee + 1, ll))
        memo[key] = out
        return out

    def child_lists(v: int, e: int, min_code: str | None):
        """Lists of child codes fitting the budgets; sorted if symmetric."""
        results = [((), 0, 0, 0)]
        if v < 0 or e < 0:
            return []
        # Breadth-first extension: append children one at a time.
        complete = [((), 0, 0, 0)]
        frontier = [((), 0, 0, 0, min_code)]
        while frontier:
            codes, vv, ee, ll, lo = frontier.pop()
            for cand, cv, ce, cl in gen(v - vv, e - ee):
                if not planar and lo is not None and cand < lo:
                    continue
                if vv + cv > v or ee + ce > e:
                    continue
                nxt = (codes + (cand,), vv + cv, ee + ce, ll + cl)
                complete.append(nxt)
                frontier.append((*nxt, cand if not planar else None))
        return complete

    return gen(max_vertices, max_edges)


def enumerate_trees(
    max_vertices: int,
    planar: bool = False,
    reduced: bool = False,
    max_edges: int | None = None,
    leaves: int | None = None,
    nullary: bool = True,
) -> list:
    """One standard representative per isomorphism class within the bounds.

    ``reduced`` excludes unary vertices and ``nullary=False`` excludes
    nullary vertices.  Since corollas of every arity fit any vertex bound,
    the edge budget (default ``2 * max_vertices + 1``) keeps the class
    finite; pass ``leaves`` to keep only trees with that exact number of
    leaf edges.
    """
    if max_vertices < 0:
        raise TreeError("ScaleLimit", "max_vertices must be >= 0")
    if max_edges is None:
        max_edges = 2 * max_vertices + 1
    out = []
    for code, nv, ne, nl in sorted(
        set(_code_candidates(max_vertices, max_edges, reduced, planar, nullary))
    ):
        if leaves is not None and nl != leaves:
            continue
        out.append(planar_tree_from_code(code) if planar else tree_from_code(code))
    return out


def reduced_planar_trees(n_leaves: int) -> list:
    """Standard reduced planar trees with ``n_leaves`` leaves and no nullary vertices."""
    return enumerate_trees(
        max(n_leaves - 1, 0),
        planar=True,
        reduced=True,
        max_edges=2 * n_leaves,
        leaves=n_leaves,
        nullary=False,
    )


def reduced_planar_count(n_leaves: int) -> int:
    """Independent oracle for tr(n): recursion over root valences >= 2."""
    memo = {1: 1}

    def t(n: int) -> int:
        if n in memo:
            return memo[n]
        total = 0
        for k in range(2, n + 1):
            total += sum_products(n, k)
        memo[n] = total
        return total

    def sum_products(n: int, k: int) -> int:
        # Sum over compositions n = n_1 + ... + n_k of prod t(n_i).
        if k == 1:
            return t(n)
        total = 0
        for first in range(1, n - k + 2):
            total += t(first) * sum_products(n - first, k - 1)
        return total

    return t(n_leaves)


# ---------------------------------------------------------------------------
# Rendering


def to_dot(t: Tree | PlanarTree, name: str = "tree") -> str:
    """DOT drawing with the root at the bottom and bullets for vertices."""
    tree = t.tree if isinstance(t, PlanarTree) else t
    kids = t.children if isinstance(t, PlanarTree) else tree.children
    lines = [
        f"graph {name} {{",
        "  rankdir=BT;",
        '  node [shape=point, width=0.12];',
    ]
    lines.append(f'  "root_tip" [style=invis];')
    for e in sorted(tree.leaves):
        lines.append(f'  "tip_{e}" [style=invis];')

    def node_of(e: str) -> str:
        return f'"tip_{e}"' if e in tree.leaves else f'"v_{e}"'

    lines.append(f'  "root_tip" -- {node_of(tree.root)} [label="{tree.root}"];')
    for e in tree.vertex_edges:
        for c in kids(e):
            lines.append(f"  {node_of(e)} -- {node_of(c)} [label=\"{c}\"];")
    lines.append("}")
    return "\n".join(lines)


def tree_to_text(t: Tree | PlanarTree) -> str:
    """Indented text rendering, root first."""
    tree = t.tree if isinstance(t, PlanarTree) else t
    kids = t.children if isinstance(t, PlanarTree) else tree.children
    out = []

    def walk(e, depth):
        tag = "leaf" if e in tree.leaves else ("nullary" if not kids(e) else "")
        out.append("  " * depth + e + (f"  [{tag}]" if tag else ""))
        for c in kids(e):
            walk(c, depth + 1)

    walk(tree.root, 0)
    return "\n".join(out)


def dumps(t: Tree | PlanarTree) -> str:
    return json.dumps(t.to_json(), indent=2, sort_keys=True)
