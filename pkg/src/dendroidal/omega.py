"""The tree category: morphisms, faces, degeneracies and unique factorization.

A morphism of trees is an edge map realizing a map of the free operads the
trees span.  Concretely an edge map is valid when every source vertex with
output ``e0`` and inputs ``e1..en`` lands on a subtree of the target with
root ``f(e0)`` and boundary exactly ``{f(e1),..,f(en)}`` (all distinct).
Every morphism factors as degeneracies, then an isomorphism, then elementary
faces; the face/degeneracy witnesses of that factorization are unique even
though the linear order of the face chain is a convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Mapping

from .trees import Tree, TreeError, unit_tree


class OmegaError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OmegaMorphism:
    source: Tree
    target: Tree
    edge_map: Mapping[str, str]

    def __eq__(self, other) -> bool:
        if not isinstance(other, OmegaMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and dict(self.edge_map) == dict(other.edge_map)
        )

    @cached_property
    def _hash(self) -> int:
        return hash((self.source, self.target, tuple(sorted(self.edge_map.items()))))

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        items = ", ".join(f"{e}>{self.edge_map[e]}" for e in sorted(self.edge_map))
        return f"OmegaMorphism({items})"

    def __call__(self, edge: str) -> str:
        return self.edge_map[edge]

    def validate(self) -> None:
        if set(self.edge_map) != set(self.source.edges):
            raise OmegaError("edge map must be defined on exactly the source edges")
        if not set(self.edge_map.values()) <= set(self.target.edges):
            raise OmegaError("edge map leaves the target edge set")
        for e0 in self.source.vertex_edges:
            images = [self.edge_map[c] for c in self.source.children(e0)]
            if len(set(images)) != len(images):
                raise OmegaError(f"vertex above {e0!r} has repeated input images")
            if subtree_between(self.target, self.edge_map[e0], frozenset(images)) is None:
                raise OmegaError(
                    f"vertex above {e0!r} does not map to an operation of the target"
                )

    def then(self, other: "OmegaMorphism") -> "OmegaMorphism":
        """Composite ``other after self``."""
        if self.target != other.source:
            raise OmegaError("composition mismatch")
        return OmegaMorphism(
            self.source, other.target, {e: other.edge_map[v] for e, v in self.edge_map.items()}
        )

    @cached_property
    def is_injective(self) -> bool:
        vals = list(self.edge_map.values())
        return len(set(vals)) == len(vals)

    def inverse(self) -> "OmegaMorphism":
        if not self.is_injective or len(self.source.edges) != len(self.target.edges):
            raise OmegaError("not bijective")
        return OmegaMorphism(
            self.target, self.source, {v: e for e, v in self.edge_map.items()}
        )

    @cached_property
    def is_iso(self) -> bool:
        """Bijective with a structure-preserving inverse."""
        if not self.is_injective or len(self.source.edges) != len(self.target.edges):
            return False
        try:
            self.inverse().validate()
        except OmegaError:
            return False
        return True

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "edge_map": {e: self.edge_map[e] for e in sorted(self.edge_map)},
        }


def morphism_from_json(data: Mapping) -> OmegaMorphism:
    from .trees import tree_from_json

    f = OmegaMorphism(
        tree_from_json(data["source"]), tree_from_json(data["target"]), dict(data["edge_map"])
    )
    f.validate()
    return f


def identity(tree: Tree) -> OmegaMorphism:
    return OmegaMorphism(tree, tree, {e: e for e in tree.edges})


def subtree_between(tree: Tree, root_edge: str, boundary: frozenset) -> frozenset | None:
    """Vertex set of the subtree with given root and boundary, if one exists.

    The subtree is unique: walking up from the root, each edge either stops
    (when it lies in the boundary) or must continue through its vertex.
    """
    if root_edge not in tree.edges:
        return None
    if root_edge in boundary:
        return frozenset() if boundary == {root_edge} else None
    vertices = set()
    found = set()
    stack = [root_edge]
    while stack:
        e = stack.pop()
        if e in boundary:
            found.add(e)
            continue
        if e in tree.leaves:
            return None
        vertices.add(e)
        stack.extend(tree.children(e))
    return frozenset(vertices) if found == set(boundary) else None


@lru_cache(maxsize=None)
def subtrees_from(tree: Tree, edge: str) -> tuple:
    """All (vertex_set, boundary) pairs of subtrees rooted at ``edge``."""
    opts = [(frozenset(), frozenset([edge]))]
    if edge not in tree.leaves:
        with_vertex = [(frozenset([edge]), frozenset())]
        for c in tree.children(edge):
            with_vertex = [
                (v | cv, b | cb)
                for v, b in with_vertex
                for cv, cb in subtrees_from(tree, c)
            ]
        opts.extend(with_vertex)
    return tuple(opts)


@lru_cache(maxsize=None)
def hom_set(source: Tree, target: Tree) -> tuple[OmegaMorphism, ...]:
    """All morphisms ``source -> target``, sorted deterministically."""
    vertex_order = _bfs_vertices(source)
    results: list[OmegaMorphism] = []

    def assign(i: int, emap: dict) -> None:
        if i == len(vertex_order):
            results.append(OmegaMorphism(source, target, dict(emap)))
            return
        e0 = vertex_order[i]
        kids = source.children(e0)
        for vset, boundary in subtrees_from(target, emap[e0]):
            if len(boundary) != len(kids):
                continue
            for perm in itertools.permutations(sorted(boundary)):
                for c, img in zip(kids, perm):
                    emap[c] = img
                assign(i + 1, emap)
            for c in kids:
                emap.pop(c, None)

    for root_img in sorted(target.edges):
        assign(0, {source.root: root_img})
    results.sort(key=lambda f: tuple(sorted(f.edge_map.items())))
    return tuple(results)


def _bfs_vertices(tree: Tree) -> tuple[str, ...]:
    out, queue = [], [tree.root]
    while queue:
        e = queue.pop(0)
        if e not in tree.leaves:
            out.append(e)
            queue.extend(tree.children(e))
    return tuple(out)


@lru_cache(maxsize=None)
def automorphisms(tree: Tree) -> tuple[OmegaMorphism, ...]:
    return tuple(f for f in hom_set(tree, tree) if f.is_iso)


# ---------------------------------------------------------------------------
# Elementary faces and degeneracies


@dataclass(frozen=True, eq=False)
class FaceMap:
    """An elementary face with its witness.

    ``kind`` is ``inner`` (contracted inner edge), ``outer`` (removed
    vertex, named by its output edge) or ``edge`` (inclusion of a single
    edge into a corolla, the conventional outer face of a one-vertex tree).
    """

    morphism: OmegaMorphism
    kind: str
    witness: str

    def __eq__(self, other):
        if not isinstance(other, FaceMap):
            return NotImplemented
        return (self.kind, self.witness, self.morphism) == (
            other.kind,
            other.witness,
            other.morphism,
        )

    def __hash__(self):
        return hash((self.kind, self.witness, self.morphism))

    def __repr__(self):
        return f"FaceMap({self.kind}:{self.witness})"

    @property
    def is_inner(self) -> bool:
        return self.kind == "inner"

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.witness}"


@dataclass(frozen=True, eq=False)
class DegeneracyMap:
    morphism: OmegaMorphism
    witness: str  # output edge of the collapsed unary vertex

    def __eq__(self, other):
        if not isinstance(other, DegeneracyMap):
            return NotImplemented
        return (self.witness, self.morphism) == (other.witness, other.morphism)

    def __hash__(self):
        return hash((self.witness, self.morphism))

    def __repr__(self):
        return f"DegeneracyMap({self.witness})"


def contract_edge(tree: Tree, edge: str) -> Tree:
    """The tree with inner ``edge`` contracted (vertices merged)."""
    if not tree.is_inner(edge):
        raise OmegaError(f"{edge!r} is not inner")
    parent = {}
    for e, p in tree.parent.items():
        if e == edge:
            continue
        parent[e] = tree.parent[edge] if p == edge else p
    return Tree(tree.edges - {edge}, parent, tree.leaves)


@lru_cache(maxsize=None)
def inner_face(tree: Tree, edge: str) -> FaceMap:
    src = contract_edge(tree, edge)
    return FaceMap(OmegaMorphism(src, tree, {e: e for e in src.edges}), "inner", edge)


@lru_cache(maxsize=None)
def removable_vertices(tree: Tree) -> tuple[str, ...]:
    """Vertices (by output edge) with exactly one inner edge attached."""
    if tree.n_vertices <= 1:
        return ()
    out = []
    for e0 in tree.vertex_edges:
        attached = (e0, *tree.children(e0))
        if sum(1 for x in attached if tree.is_inner(x)) == 1:
            out.append(e0)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def outer_face(tree: Tree, vertex_edge: str) -> FaceMap:
    """Remove the vertex above ``vertex_edge`` together with its outer edges."""
    if vertex_edge not in removable_vertices(tree):
        raise OmegaError(f"vertex above {vertex_edge!r} is not removable")
    kids = tree.children(vertex_edge)
    if tree.is_inner(vertex_edge) or not any(tree.is_inner(c) for c in kids):
        # Top removal (covers nullary vertices: nothing but the vertex goes).
        gone = frozenset(kids)
        src = Tree(
            tree.edges - gone,
            {e: p for e, p in tree.parent.items() if e not in gone},
            (tree.leaves - gone) | {vertex_edge},
        )
    else:
        # Root removal: keep the subtree above the unique inner input.
        (b,) = [c for c in kids if tree.is_inner(c)]
        src = tree.subtree_above(b)
    return FaceMap(OmegaMorphism(src, tree, {e: e for e in src.edges}), "outer", vertex_edge)


@lru_cache(maxsize=None)
def edge_inclusion(tree: Tree, edge: str) -> FaceMap:
    """The conventional outer face of a corolla: include one of its edges."""
    if tree.n_vertices != 1:
        raise OmegaError("edge inclusions are faces of corollas only")
    return FaceMap(OmegaMorphism(unit_tree(edge), tree, {edge: edge}), "edge", edge)


@lru_cache(maxsize=None)
def faces(tree: Tree) -> tuple[FaceMap, ...]:
    """The elementary faces of ``tree``."""
    if tree.n_vertices == 0:
        return ()
    if tree.n_vertices == 1:
        return tuple(edge_inclusion(tree, e) for e in sorted(tree.edges))
    out = [inner_face(tree, e) for e in tree.inner_edges]
    out.extend(outer_face(tree, v) for v in removable_vertices(tree))
    return tuple(sorted(out, key=lambda f: (f.kind, f.witness)))


@lru_cache(maxsize=None)
def degeneracy(tree: Tree, vertex_edge: str) -> DegeneracyMap:
    """Collapse the unary vertex above ``vertex_edge``; the input edge survives."""
    kids = tree.children(vertex_edge)
    if len(kids) != 1:
        raise OmegaError(f"vertex above {vertex_edge!r} is not unary")
    (e,) = kids
    parent = {}
    for x, p in tree.parent.items():
        if x == vertex_edge:
            continue
        if x == e:
            if vertex_edge in tree.parent:
                parent[x] = tree.parent[vertex_edge]
        else:
            parent[x] = p
    tgt = Tree(tree.edges - {vertex_edge}, parent, tree.leaves)
    emap = {x: x for x in tree.edges - {vertex_edge}}
    emap[vertex_edge] = e
    return DegeneracyMap(OmegaMorphism(tree, tgt, emap), vertex_edge)


def degeneracies(tree: Tree) -> tuple[DegeneracyMap, ...]:
    return tuple(
        degeneracy(tree, e)
        for e in tree.vertex_edges
        if len(tree.children(e)) == 1
    )


# ---------------------------------------------------------------------------
# Classification


def classify(f: OmegaMorphism) -> tuple[str, str | None]:
    """Match against the elementary patterns.

    Returns one of ``("iso", None)``, ``("degeneracy", v)``,
    ``("inner", e)``, ``("outer", v)`` (edge inclusions report the kept
    edge) or ``("composite", None)``.
    """
    f.validate()
    if f.is_iso:
        return ("iso", None)
    for d in degeneracies(f.source):
        if d.morphism == f:
            return ("degeneracy", d.witness)
    for face in faces(f.target):
        if face.morphism == f:
            kind = "outer" if face.kind == "edge" else face.kind
            return (kind, face.witness)
    return ("composite", None)


# ---------------------------------------------------------------------------
# Codimension 2


def subfaces2(tree: Tree) -> dict:
    """Codimension-2 subfaces, each mapped to its factorizations.

    Keys are the composite morphisms; values list the ``(outer, inner)``
    face pairs ``(alpha, gamma)`` with ``composite = alpha o gamma``.
    """
    groups: dict = {}
    for alpha in faces(tree):
        for gamma in faces(alpha.morphism.source):
            comp = gamma.morphism.then(alpha.morphism)
            groups.setdefault(comp, []).append((alpha, gamma))
    return groups


def double_factorizations(tree: Tree, beta: OmegaMorphism) -> tuple:
    """The two factorizations of a codimension-2 subface."""
    pairs = subfaces2(tree).get(beta)
    if pairs is None:
        raise OmegaError("not a codimension-2 subface")
    return tuple(pairs)


# ---------------------------------------------------------------------------
# Factorization  f = (faces) o (iso) o (degeneracies)


@dataclass(frozen=True)
class Factorization:
    """``f = phi . pi . delta`` with the chains stored source-to-target.

    ``degeneracies[0]`` starts at the source of ``f``; ``faces[-1]`` ends at
    its target.  The witness sets and the intermediate data are canonical,
    the linear order of ``faces`` is a convention.
    """

    degeneracies: tuple[DegeneracyMap, ...]
    iso: OmegaMorphism
    faces: tuple[FaceMap, ...]
    choice_points: int = 0  # steps at which the chosen order could differ

    def compose(self) -> OmegaMorphism:
        out = identity(self.iso.source) if not self.degeneracies else None
        for d in self.degeneracies:
            out = d.morphism if out is None else out.then(d.morphism)
        out = self.iso if out is None else out.then(self.iso)
        for face in self.faces:
            out = out.then(face.morphism)
        return out

    def canonical_data(self) -> tuple:
        """Order-independent content: collapsed vertices, iso, face composite."""
        phi_source = self.faces[0].morphism.source if self.faces else self.iso.target
        return (
            frozenset(d.witness for d in self.degeneracies),
            tuple(sorted(self.iso.edge_map.items())),
            phi_source,
            len(self.faces),
        )


def factorize(f: OmegaMorphism, rng=None, validate: bool = True) -> Factorization:
    """Factor ``f`` as degeneracies, an isomorphism, then elementary faces.

    ``rng`` (a ``random.Random``) shuffles the order in which independent
    collapse/chop/contract steps are taken; the canonical data of the result
    does not depend on it.
    """
    if validate:
        f.validate()
    choices = 0

    def pick(xs):
        nonlocal choices
        if len(xs) > 1:
            choices += 1
        return xs[rng.randrange(len(xs))] if rng is not None else xs[0]

    # Degeneracies: collapse unary vertices whose two edges share an image.
    degs: list[DegeneracyMap] = []
    cur, emap = f.source, dict(f.edge_map)
    while True:
        cands = sorted(
            e0
            for e0 in cur.vertex_edges
            if len(cur.children(e0)) == 1 and emap[cur.children(e0)[0]] == emap[e0]
        )
        if not cands:
            break
        d = degeneracy(cur, pick(cands))
        degs.append(d)
        cur = d.morphism.target
        emap = {e: emap[e] for e in cur.edges}

    if len(set(emap.values())) != len(emap):
        raise OmegaError("morphism is not injective after removing degeneracies")

    # The image tree and the isomorphism onto it.
    image = cur.relabel(emap)
    pi = OmegaMorphism(cur, image, dict(emap))
    target = f.target
    kept = set(emap.values())
    needed = set()
    for e0 in cur.vertex_edges:
        images = frozenset(emap[c] for c in cur.children(e0))
        needed |= subtree_between(target, emap[e0], images)

    # Outer phase: chop vertices outside the image region.
    chain: list[FaceMap] = []  # target-to-image order
    tree = target
    while True:
        cands = []
        for v in removable_vertices(tree):
            if v in needed:
                continue
            face = outer_face(tree, v)
            if (tree.edges - face.morphism.source.edges) & kept:
                continue
            cands.append(face)
        if not cands:
            break
        face = pick(cands)
        chain.append(face)
        tree = face.morphism.source

    # Inner phase: contract image-internal edges that are not image edges.
    while True:
        cands = [e for e in tree.inner_edges if e not in kept]
        if not cands:
            break
        face = inner_face(tree, pick(cands))
        chain.append(face)
        tree = face.morphism.source

    # A unit-tree image needs one final corolla edge inclusion.
    if tree != image and tree.n_vertices == 1 and image.n_vertices == 0:
        face = edge_inclusion(tree, image.root)
        chain.append(face)
        tree = face.morphism.source

    if tree != image:
        raise OmegaError("face chain did not reach the image tree")
    result = Factorization(tuple(degs), pi, tuple(reversed(chain)), choices)
    if result.compose() != f:
        raise OmegaError("factorization does not recompose to the morphism")
    return result
