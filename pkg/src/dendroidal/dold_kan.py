"""Signs for planar face maps making the face differential square to zero.

In the planar tree category a codimension-2 subface factors in exactly two
ways through elementary faces; a sign assignment must make the two routes
anticommute.  Each square is one parity constraint over the two-element
field, so assignments are found by linear algebra, optionally gauge-fixed
so that linear trees carry the alternating simplicial convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .trees import (
    PlanarTree,
    Tree,
    canonical_code,
    enumerate_trees,
    planar_contract,
    standard_edge_map,
    standard_form,
    unit_tree,
)


@dataclass(frozen=True, eq=False)
class PlanarFace:
    """An elementary planar face with standard source and target shapes."""

    source: PlanarTree
    target: PlanarTree
    edge_map: Mapping  # source edge -> target edge
    kind: str  # inner | outer | edge
    witness: str

    @property
    def key(self) -> tuple:
        """The sign-table key: target shape, kind, witness."""
        return (canonical_code(self.target), self.kind, self.witness)

    def __eq__(self, other):
        if not isinstance(other, PlanarFace):
            return NotImplemented
        return self.key == other.key and dict(self.edge_map) == dict(other.edge_map)

    def __hash__(self):
        return hash((self.key, tuple(sorted(self.edge_map.items()))))

    def __repr__(self):
        return f"PlanarFace({self.kind}:{self.witness} -> {canonical_code(self.target)})"


def _planar_subtree_above(pt: PlanarTree, edge: str) -> PlanarTree:
    tree = pt.tree.subtree_above(edge)
    order = {e: pt.input_order[e] for e in tree.vertex_edges}
    return PlanarTree(tree, order)


def _standardized_face(literal: PlanarTree, target: PlanarTree, kind, witness) -> PlanarFace:
    ren = standard_edge_map(literal)  # standard name -> literal edge
    return PlanarFace(standard_form(literal), target, dict(ren), kind, witness)


@lru_cache(maxsize=None)
def planar_faces(pt: PlanarTree) -> tuple[PlanarFace, ...]:
    """Elementary faces of a standard planar tree.

    One inner face per inner edge, one outer face per vertex with a single
    inner edge attached, and the edge inclusions for one-vertex trees.
    """
    tree = pt.tree
    if tree.n_vertices == 0:
        return ()
    if tree.n_vertices == 1:
        out = []
        for e in sorted(tree.edges):
            eta = PlanarTree(unit_tree(e), {})
            out.append(PlanarFace(PlanarTree(unit_tree("0"), {}), pt, {"0": e}, "edge", e))
        return tuple(out)

    out = []
    for e in tree.inner_edges:
        out.append(_standardized_face(planar_contract(pt, e), pt, "inner", e))
    for e0 in tree.vertex_edges:
        attached = (e0, *tree.children(e0))
        if sum(1 for x in attached if tree.is_inner(x)) != 1:
            continue
        kids = pt.children(e0)
        if tree.is_inner(e0) or not any(tree.is_inner(c) for c in kids):
            gone = frozenset(kids)
            smaller = Tree(
                tree.edges - gone,
                {e: p for e, p in tree.parent.items() if e not in gone},
                (tree.leaves - gone) | {e0},
            )
            order = {e: pt.input_order[e] for e in smaller.edges - smaller.leaves}
            literal = PlanarTree(smaller, order)
        else:
            (b,) = [c for c in kids if tree.is_inner(c)]
            literal = _planar_subtree_above(pt, b)
        out.append(_standardized_face(literal, pt, "outer", e0))
    return tuple(sorted(out, key=lambda f: (f.kind, f.witness)))


def planar_subfaces2(pt: PlanarTree) -> dict:
    """Codimension-2 subfaces with their factorizations into face pairs."""
    groups: dict = {}
    for alpha in planar_faces(pt):
        for beta in planar_faces(alpha.source):
            composite = tuple(
                sorted((e, alpha.edge_map[beta.edge_map[e]]) for e in beta.edge_map)
            )
            key = (canonical_code(beta.source), composite)
            groups.setdefault(key, []).append((alpha, beta))
    return groups


def planar_universe(max_vertices: int, max_edges: int | None = None) -> tuple:
    return tuple(enumerate_trees(max_vertices, planar=True, max_edges=max_edges))


@dataclass(frozen=True)
class SignAssignment:
    """Signs for the elementary planar faces of a universe of shapes."""

    signs: Mapping  # face key -> +1 | -1

    def __call__(self, face: PlanarFace) -> int:
        return self.signs[face.key]

    def flipped(self, key) -> "SignAssignment":
        out = dict(self.signs)
        out[key] = -out[key]
        return SignAssignment(out)

    def to_json(self) -> list:
        return [
            {"target": k[0], "kind": k[1], "witness": k[2], "sign": v}
            for k, v in sorted(self.signs.items())
        ]


@dataclass(frozen=True)
class Infeasible:
    reason: str

    def __bool__(self):
        return False


def _linear_gauge(universe) -> dict:
    """Pin linear-tree faces to the alternating simplicial convention.

    Simplex vertex ``i`` of an n-simplex corresponds to edge ``n - i`` of
    the linear tree, so the face skipping vertex ``i`` gets sign (-1)^i.
    """
    gauge = {}
    for pt in universe:
        tree = pt.tree
        n = tree.n_vertices
        if n == 0 or any(len(tree.children(e)) != 1 for e in tree.vertex_edges):
            continue
        code = canonical_code(pt)
        if n == 1:
            gauge[(code, "edge", "0")] = -1  # skips vertex 1
            gauge[(code, "edge", "1")] = 1  # skips vertex 0
            continue
        gauge[(code, "outer", "0")] = (-1) ** n  # drop the root: vertex n
        gauge[(code, "outer", str(n - 1))] = 1  # drop the top: vertex 0
        for j in range(1, n):
            gauge[(code, "inner", str(j))] = (-1) ** (n - j)
    return gauge


def _solve_gf2(n_vars: int, equations: list) -> list | None:
    """Solve equations given as (bitmask, rhs) pairs; free variables 0.

    Rows are reduced by their leading bit against the stored pivot rows, so
    each pivot row's highest bit is its pivot and back-substitution can run
    from the low variables up.
    """
    pivots: dict = {}
    for mask, rhs in equations:
        while mask:
            var = mask.bit_length() - 1
            if var not in pivots:
                pivots[var] = (mask, rhs)
                break
            pmask, prhs = pivots[var]
            mask ^= pmask
            rhs ^= prhs
        else:
            if rhs:
                return None
    solution = [0] * n_vars
    for var in sorted(pivots):
        mask, rhs = pivots[var]
        value = rhs
        m = mask & ~(1 << var)
        while m:
            low = m & -m
            value ^= solution[low.bit_length() - 1]
            m ^= low
        solution[var] = value
    return solution


def sign_constraints(universe) -> tuple[list, dict]:
    """One parity constraint per codimension-2 square over the universe."""
    keys: dict = {}

    def var(key):
        return keys.setdefault(key, len(keys))

    constraints = []
    for pt in universe:
        for pairs in planar_subfaces2(pt).values():
            if len(pairs) != 2:
                raise ValueError(
                    f"codimension-2 subface of {canonical_code(pt)} has "
                    f"{len(pairs)} factorizations"
                )
            (a1, b1), (a2, b2) = pairs
            constraints.append((var(a1.key), var(b1.key), var(a2.key), var(b2.key)))
    return constraints, keys


def solve_signs(
    max_vertices: int,
    max_edges: int | None = None,
    gauge: str | None = "simplicial",
    scale_limit: int = 5,
):
    """A sign table satisfying all anticommutation squares, or Infeasible.

    Every square contributes the parity equation ``x1+x2+x3+x4 = 1`` over
    GF(2) (with -1 encoded as 1); ``gauge="simplicial"`` additionally pins
    the linear-tree faces to the alternating convention.
    """
    if max_vertices > scale_limit:
        raise ValueError(f"sign solving limited to {scale_limit} vertices")
    universe = planar_universe(max_vertices, max_edges)
    constraints, keys = sign_constraints(universe)
    # Register every face key, including those in no square.
    for pt in universe:
        for f in planar_faces(pt):
            keys.setdefault(f.key, len(keys))
    equations = []
    for v1, v2, v3, v4 in constraints:
        mask = 0
        for v in (v1, v2, v3, v4):
            mask ^= 1 << v
        equations.append((mask, 1))
    if gauge == "simplicial":
        for key, sign in _linear_gauge(universe).items():
            if key in keys:
                equations.append((1 << keys[key], 0 if sign == 1 else 1))
    solution = _solve_gf2(len(keys), equations)
    if solution is None:
        return Infeasible("the parity system admits no solution")
    return SignAssignment(
        {key: (-1 if solution[i] else 1) for key, i in keys.items()}
    )


# ---------------------------------------------------------------------------
# The differential


def subface_complex(pt: PlanarTree) -> list:
    """All subfaces of the shape, keyed by source code and composite map."""
    start = (canonical_code(pt), tuple(sorted((e, e) for e in pt.edges)))
    seen = {start}
    frontier = [start]
    while frontier:
        code, emap = frontier.pop()
        src = _planar_from_code(code)
        lookup = dict(emap)
        for beta in planar_faces(src):
            comp = tuple(
                sorted((e, lookup[beta.edge_map[e]]) for e in beta.edge_map)
            )
            key = (canonical_code(beta.source), comp)
            if key not in seen:
                seen.add(key)
                frontier.append(key)
    return sorted(seen)


@lru_cache(maxsize=None)
def _planar_from_code(code: str) -> PlanarTree:
    from .trees import planar_tree_from_code

    return planar_tree_from_code(code)


def check_d_squared(pt: PlanarTree, signs: SignAssignment) -> bool:
    """Does the signed face differential vanish twice on every subface?

    The module is freely generated by the subfaces of the shape; the
    differential of a generator is the signed sum of its own faces.  A
    missing sign raises ``KeyError`` (``MissingSign``).
    """
    pt = standard_form(pt)

    def d(element) -> dict:
        code, emap = element
        src = _planar_from_code(code)
        lookup = dict(emap)
        out: dict = {}
        for beta in planar_faces(src):
            comp = tuple(
                sorted((e, lookup[beta.edge_map[e]]) for e in beta.edge_map)
            )
            key = (canonical_code(beta.source), comp)
            out[key] = out.get(key, 0) + signs.signs[beta.key]
        return out

    for element in subface_complex(pt):
        acc: dict = {}
        for mid, coeff in d(element).items():
            for low, coeff2 in d(mid).items():
                acc[low] = acc.get(low, 0) + coeff * coeff2
        if any(v != 0 for v in acc.values()):
            return False
    return True


def first_d_squared_failure(universe, signs: SignAssignment):
    """The first shape on which the squared differential fails, if any."""
    for pt in universe:
        if not check_d_squared(pt, signs):
            return pt
    return None
