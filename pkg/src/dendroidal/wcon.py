"""Cubical cell complexes of the resolution built from trees with edge lengths.

For a one-color discrete operad, the arity-n piece is glued from cubes, one
per labeled reduced planar tree with its inner edges as coordinates.  The
canonical cells split the inner edges into those frozen at length one and
those left free; setting a free edge to zero contracts it and composes the
labels, setting it to one freezes it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .operads import FiniteOperad
from .trees import (
    PlanarTree,
    canonical_code,
    planar_contract,
    reduced_planar_count,
    reduced_planar_trees,
    standard_edge_map,
    standard_form,
)


class ScaleLimit(ValueError):
    pass


def one_per_arity_operad(label: str = "nonunital-As") -> FiniteOperad:
    """One color and a single operation in every positive arity."""
    color = "*"

    def ops(dom, cod):
        if cod != color or any(c != color for c in dom) or len(dom) == 0:
            return ()
        return (("m", len(dom)),)

    return FiniteOperad(
        colors=(color,),
        ops_fn=ops,
        dom_fn=lambda op: (color,) * op[1],
        cod_fn=lambda op: color,
        compose_fn=lambda psi, i, phi: ("m", psi[1] + phi[1] - 1),
        sigma_fn=lambda perm, op: op,
        identity_fn=lambda c: ("m", 1),
        label=label,
    )


@dataclass(frozen=True)
class WCell:
    """A labeled reduced planar tree with its inner edges split by length.

    ``ones`` are frozen at length one, ``free`` vary in the open interval;
    zero-length edges are contracted away in the canonical representative.
    """

    code: str  # canonical planar code of the underlying tree
    labels: tuple  # (vertex edge, operation) pairs, sorted
    ones: frozenset
    free: frozenset

    @property
    def dim(self) -> int:
        return len(self.free)

    def __repr__(self):
        return f"WCell({self.code}, dim={self.dim})"


@dataclass(eq=False)
class FacePoset:
    """Cells graded by dimension with the codimension-one face relation."""

    cells: tuple
    covers: Mapping  # cell -> tuple of faces (codimension one)

    def by_dimension(self) -> dict:
        out: dict = {}
        for c in self.cells:
            out.setdefault(c.dim, []).append(c)
        return out

    def cell_counts(self) -> dict:
        return {d: len(cs) for d, cs in sorted(self.by_dimension().items())}

    def euler_characteristic(self) -> int:
        return sum((-1) ** c.dim for c in self.cells)

    def validate_grading(self) -> None:
        for cell, faces in self.covers.items():
            for f in faces:
                assert f.dim == cell.dim - 1
                assert f in self.cells

    def to_dot(self, name: str = "faces") -> str:
        index = {c: i for i, c in enumerate(self.cells)}
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for c, i in index.items():
            lines.append(f'  n{i} [label="dim {c.dim}", shape=box];')
        for c, faces in self.covers.items():
            for f in faces:
                lines.append(f"  n{index[f]} -> n{index[c]};")
        lines.append("}")
        return "\n".join(lines)


def _standard_cell(pt: PlanarTree, labels: dict, ones, free) -> WCell:
    """Rename everything along the canonical planar standardization."""
    ren = standard_edge_map(pt)  # standard name -> edge of pt
    back = {v: k for k, v in ren.items()}
    return WCell(
        canonical_code(pt),
        tuple(sorted((back[e], op) for e, op in labels.items())),
        frozenset(back[e] for e in ones),
        frozenset(back[e] for e in free),
    )


def w_cells(P: FiniteOperad, n_leaves: int, scale_limit: int = 7) -> FacePoset:
    """The cubical cell poset of the arity-``n_leaves`` resolution piece.

    Cells are labeled reduced planar trees together with a ones/free split
    of their inner edges; a free edge restricts to one (freeze) or to zero
    (contract the edge and compose the labels through the operad).
    """
    if n_leaves > scale_limit:
        raise ScaleLimit(f"resolution cells limited to {scale_limit} leaves")
    if len(P.colors) != 1:
        raise ValueError("the cell complex is implemented for one-color operads")
    color = P.colors[0]

    trees = reduced_planar_trees(n_leaves)
    cells = []
    covers: dict = {}

    def labelings(pt: PlanarTree):
        vedges = pt.tree.vertex_edges
        pools = [P.ops((color,) * len(pt.children(e)), color) for e in vedges]
        for combo in itertools.product(*pools):
            yield dict(zip(vedges, combo))

    def face_to_zero(pt: PlanarTree, labels: dict, ones, free, e):
        contracted = planar_contract(pt, e)
        parent_edge = pt.tree.parent[e]
        slot = pt.children(parent_edge).index(e)
        new_labels = dict(labels)
        composed = P.compose_at(labels[parent_edge], slot, labels[e])
        del new_labels[e]
        new_labels[parent_edge] = composed
        return _standard_cell(
            contracted, new_labels, set(ones), set(free) - {e}
        )

    for pt in trees:
        inner = set(pt.tree.inner_edges)
        for labels in labelings(pt):
            for ones_size in range(len(inner) + 1):
                for ones in itertools.combinations(sorted(inner), ones_size):
                    ones_set = set(ones)
                    free_set = inner - ones_set
                    cell = _standard_cell(pt, labels, ones_set, free_set)
                    faces = []
                    for e in sorted(free_set):
                        faces.append(
                            _standard_cell(pt, labels, ones_set | {e}, free_set - {e})
                        )
                        faces.append(
                            face_to_zero(pt, labels, ones_set, free_set, e)
                        )
                    cells.append(cell)
                    covers[cell] = tuple(faces)

    poset = FacePoset(tuple(cells), covers)
    poset.validate_grading()
    return poset


def catalan(n: int) -> int:
    """Independent recursion for the binary-tree counts."""
    memo = {0: 1}

    def c(k):
        if k in memo:
            return memo[k]
        memo[k] = sum(c(i) * c(k - 1 - i) for i in range(k))
        return memo[k]

    return c(n)


def associahedron_summary(n_leaves: int, scale_limit: int = 7) -> dict:
    """Cell counts of the arity-n piece for the one-op-per-arity operad."""
    if not 2 <= n_leaves <= scale_limit:
        raise ScaleLimit(f"summaries cover 2..{scale_limit} leaves")
    poset = w_cells(one_per_arity_operad(), n_leaves, scale_limit)
    counts = poset.cell_counts()
    binary_vertices = sum(
        1
        for c in poset.cells
        if c.dim == 0 and not c.free and _is_binary_code(c.code)
    )
    return {
        "cells_by_dim": counts,
        "euler_characteristic": poset.euler_characteristic(),
        "vertex_count": counts.get(0, 0),
        "edge_count": counts.get(1, 0),
        "binary_vertex_count": binary_vertices,
    }


def _is_binary_code(code: str) -> bool:
    # A planar code is binary when every vertex has exactly two inputs.
    stack = []
    for ch in code:
        if ch == "(":
            stack.append(0)
        elif ch == "*":
            if stack:
                stack[-1] += 1
        else:  # ")"
            k = stack.pop()
            if k != 2:
                return False
            if stack:
                stack[-1] += 1
    return True


def w_cat_hom(n_leaves: int) -> dict:
    """The arity-n hom-category of the groupoid-interval resolution.

    Objects are the reduced planar trees with that many leaves (every inner
    edge frozen at the invertible end); contractibility is reported through
    the connectivity of the contraction move graph.
    """
    if n_leaves < 1:
        raise ValueError("arity must be positive")
    trees = reduced_planar_trees(n_leaves)
    codes = {canonical_code(t): t for t in trees}
    adj: dict = {c: set() for c in codes}
    for code, pt in codes.items():
        for e in pt.tree.inner_edges:
            other = canonical_code(standard_form(planar_contract(pt, e)))
            adj[code].add(other)
            adj[other].add(code)
    seen: set = set()
    stack = [next(iter(codes))] if codes else []
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        stack.extend(adj[c])
    return {
        "object_count": len(codes),
        "contractible": len(seen) == len(codes),
    }
