"""Vertex-bounded dendroidal sets as tabulated presheaves on the tree category.

Dendrex sets are stored on standard tree shapes within a (vertex, edge)
bound; every other tree is reached through the canonical isomorphism onto
its standard form, so actions are defined along arbitrary morphisms whose
shapes fall inside the universe.  All Kan-type verdicts are relative to the
stored universe and say so in their names.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .omega import (
    FaceMap,
    OmegaMorphism,
    automorphisms,
    degeneracy,
    edge_inclusion,
    faces,
    hom_set,
    identity,
    subfaces2,
)
from .operads import FiniteOperad, OperadFunctor, evaluate_free_op, free_tree_operad
from .presentations import (
    OperadPresentation,
    Term,
    act_term,
    compose_term,
    generator_term,
    identity_term,
)
from .trees import (
    Tree,
    canonical_code,
    enumerate_trees,
    linear_tree,
    standard_edge_map,
    standard_form,
    tree_from_code,
    unit_tree,
)


def shape_universe(bound: int, max_edges: int | None = None) -> tuple[Tree, ...]:
    """Standard trees with at most ``bound`` vertices and ``max_edges`` edges.

    The edge cap (default ``2 * bound + 1``) keeps the universe finite and
    closed under taking face sources and degeneracy targets.
    """
    return tuple(enumerate_trees(bound, max_edges=max_edges))


def standard_iso(tree: Tree) -> OmegaMorphism:
    """The canonical isomorphism standard_form(tree) -> tree."""
    return OmegaMorphism(standard_form(tree), tree, standard_edge_map(tree))


@dataclass(eq=False)
class FiniteDendroidalSet:
    """Dendrex sets on a universe of standard shapes, with computed actions.

    ``act_std`` implements the contravariant action for morphisms between
    standard shapes; :meth:`action` extends it along the canonical
    standardization isomorphisms.
    """

    universe: tuple
    dendrex_sets: Mapping  # standard tree -> tuple of dendrices
    act_std: Callable  # (morphism between standard shapes, dendrex) -> dendrex
    label: str = "dset"
    _cache: dict = field(default_factory=dict)

    def __repr__(self):
        total = sum(len(v) for v in self.dendrex_sets.values())
        return f"FiniteDendroidalSet({self.label}, {len(self.universe)} shapes, {total} dendrices)"

    def shapes(self) -> tuple:
        return self.universe

    def dendrices(self, tree: Tree) -> tuple:
        """The dendrex set of any tree whose standard form is stored."""
        std = tree if tree in self.dendrex_sets else standard_form(tree)
        return self.dendrex_sets[std]

    def action(self, f: OmegaMorphism, x):
        """The action of ``f: S -> T`` on ``x`` in X_T, landing in X_S."""
        key = (f, x)
        if key in self._cache:
            return self._cache[key]
        rho_s = standard_iso(f.source)
        rho_t = standard_iso(f.target)
        g = rho_s.then(f).then(rho_t.inverse())
        out = self.act_std(g, x)
        self._cache[key] = out
        return out

    def total_size(self) -> int:
        return sum(len(v) for v in self.dendrex_sets.values())


def validate_presheaf(X: FiniteDendroidalSet, max_tree_edges: int = 5) -> None:
    """Identity and composition laws, exhaustive over the stored hom-sets.

    Restricted to shapes with few edges so the check stays desk-sized.
    """
    small = [t for t in X.universe if len(t.edges) <= max_tree_edges]
    for t in small:
        for x in X.dendrices(t):
            assert X.action(identity(t), x) == x
    for s in small:
        for t in small:
            for f in hom_set(s, t):
                for u in small:
                    for g in hom_set(t, u):
                        comp = f.then(g)
                        for x in X.dendrices(u):
                            assert X.action(comp, x) == X.action(f, X.action(g, x))


# ---------------------------------------------------------------------------
# Representables and nerves


def representable(tree: Tree, universe: tuple) -> FiniteDendroidalSet:
    """The presheaf represented by ``tree``: shapes map into it."""
    dendrex_sets = {shape: hom_set(shape, tree) for shape in universe}
    return FiniteDendroidalSet(
        universe,
        dendrex_sets,
        act_std=lambda g, x: g.then(x),
        label=f"Omega[{canonical_code(tree)}]",
    )


def nerve_dendrices(P: FiniteOperad, shape: Tree) -> tuple:
    """Encoded operad maps out of the tree operad of ``shape``.

    Enumerated root-down: coloring the output edge of a vertex restricts its
    operation choices, whose domain then colors the input edges.
    """
    vorder = []
    queue = [shape.root]
    while queue:
        e = queue.pop(0)
        if e not in shape.leaves:
            vorder.append(e)
            queue.extend(shape.children(e))
    out = []

    def assign(i: int, cmap: dict, gens: dict):
        if i == len(vorder):
            out.append(
                (
                    tuple((e, cmap[e]) for e in sorted(shape.edges)),
                    tuple((v, gens[v]) for v in shape.vertex_edges),
                )
            )
            return
        e0 = vorder[i]
        kids = shape.children(e0)
        for psi in P.ops_by_cod(cmap[e0], len(kids)):
            for kid, color in zip(kids, P.dom(psi)):
                cmap[kid] = color
            gens[e0] = psi
            assign(i + 1, cmap, gens)
        for kid in kids:
            cmap.pop(kid, None)
        gens.pop(e0, None)

    for color in P.colors:
        assign(0, {shape.root: color}, {})
    return tuple(sorted(out, key=repr))


def nerve(P: FiniteOperad, universe: tuple) -> FiniteDendroidalSet:
    """The nerve: dendrices of shape T are the operad maps out of Omega(T)."""
    dendrex_sets = {shape: nerve_dendrices(P, shape) for shape in universe}

    def act_std(g: OmegaMorphism, x):
        src, tgt = g.source, g.target
        colors = dict(x[0])
        gen_images = {}
        om_tgt = free_tree_operad(tgt)
        tgt_gens = {name: op for name, op in zip([v[0] for v in om_tgt.free_generators], om_tgt.free_generators)}
        images = dict(x[1])
        cmap = {e: colors[e] for e in tgt.edges}
        gmap = {tgt_gens[name]: images[name] for name in images}
        new_colors = tuple((e, colors[g(e)]) for e in sorted(src.edges))
        new_gens = []
        for e0 in free_tree_operad(src).free_generators:
            op_in_tgt = (
                g(e0[0]),
                _subtree_vertices(tgt, g, e0),
                tuple(g(c) for c in e0[2]),
            )
            value = evaluate_free_op(om_tgt, P, cmap, gmap, op_in_tgt)
            new_gens.append((e0[0], value))
        return (new_colors, tuple(new_gens))

    return FiniteDendroidalSet(universe, dendrex_sets, act_std, label=f"N_d({P.label})")


def _subtree_vertices(tgt: Tree, g: OmegaMorphism, gen) -> frozenset:
    from .omega import subtree_between

    vset = subtree_between(tgt, g(gen[0]), frozenset(g(c) for c in gen[2]))
    if vset is None:
        raise ValueError("morphism does not carry the generator to an operation")
    return vset


def nerve_functor_of(P: FiniteOperad, tree: Tree, x, max_arity: int | None = None) -> OperadFunctor:
    """Decode a nerve dendrex back into an operad functor on the tree operad."""
    om = free_tree_operad(tree)
    color_map = dict(x[0])
    images = dict(x[1])
    gen_images = {g: images[g[0]] for g in om.free_generators}
    from .operads import functor_from_generators

    if max_arity is None:
        max_arity = max((len(g[2]) for g in om.free_generators), default=0)
    return functor_from_generators(om, P, color_map, gen_images, max_arity)


def is_equivalence_dendrex_in_nerve(P: FiniteOperad, x) -> bool:
    """Is a unary dendrex of the nerve an isomorphism in the unary part?"""
    from .operads import j_upper

    l1 = linear_tree(1)
    F = nerve_functor_of(P, l1, x)
    arrow = F.op_map[free_tree_operad(l1).free_generators[0]]
    return j_upper(P).is_iso(arrow)


# ---------------------------------------------------------------------------
# Boundaries, horns, fillers


@dataclass(frozen=True, eq=False)
class MatchingFamily:
    """Compatible dendrices on the faces of a shape, minus an omitted face."""

    tree: Tree
    omitted: FaceMap | None
    assignment: tuple  # pairs (FaceMap, dendrex), in faces() order

    def __eq__(self, other):
        if not isinstance(other, MatchingFamily):
            return NotImplemented
        return (
            self.tree == other.tree
            and self.omitted == other.omitted
            and self.assignment == other.assignment
        )

    def __hash__(self):
        return hash((self.tree, self.omitted, self.assignment))

    def value(self, face: FaceMap):
        for f, x in self.assignment:
            if f == face:
                return x
        raise KeyError(face)


def matching_families(
    X: FiniteDendroidalSet, tree: Tree, omitted: FaceMap | None = None
) -> list[MatchingFamily]:
    """All boundary (or horn, when a face is omitted) families against X.

    Built by backtracking over the retained faces; the codimension-2
    double factorizations supply the compatibility constraints.
    """
    retained = [f for f in faces(tree) if f != omitted]
    constraints = []
    for pairs in subfaces2(tree).values():
        (a1, g1), (a2, g2) = pairs
        if omitted is not None and omitted in (a1, a2):
            continue
        constraints.append((a1, g1, a2, g2))

    families: list[MatchingFamily] = []
    order = {f: i for i, f in enumerate(retained)}

    def compatible(assign: dict, face) -> bool:
        for a1, g1, a2, g2 in constraints:
            if a1 not in assign or a2 not in assign:
                continue
            if face not in (a1, a2):
                continue
            lhs = X.action(g1.morphism, assign[a1])
            rhs = X.action(g2.morphism, assign[a2])
            if lhs != rhs:
                return False
        return True

    def backtrack(i: int, assign: dict):
        if i == len(retained):
            families.append(
                MatchingFamily(
                    tree, omitted, tuple((f, assign[f]) for f in retained)
                )
            )
            return
        face = retained[i]
        for x in X.dendrices(face.morphism.source):
            assign[face] = x
            if compatible(assign, face):
                backtrack(i + 1, assign)
            del assign[face]

    backtrack(0, {})
    return families


def boundary_families(X: FiniteDendroidalSet, tree: Tree) -> list[MatchingFamily]:
    return matching_families(X, tree, omitted=None)


def horn_families(
    X: FiniteDendroidalSet, tree: Tree, omitted: FaceMap
) -> list[MatchingFamily]:
    return matching_families(X, tree, omitted=omitted)


def restriction_family(
    X: FiniteDendroidalSet, tree: Tree, x, omitted: FaceMap | None = None
) -> MatchingFamily:
    """The family obtained by restricting an actual dendrex to its faces."""
    retained = [f for f in faces(tree) if f != omitted]
    return MatchingFamily(
        tree, omitted, tuple((f, X.action(f.morphism, x)) for f in retained)
    )


def fill_horn(X: FiniteDendroidalSet, family: MatchingFamily) -> list:
    """Dendrices of the full shape restricting to the family."""
    out = []
    for x in X.dendrices(family.tree):
        if all(X.action(f.morphism, x) == v for f, v in family.assignment):
            out.append(x)
    return out


def inner_horns(tree: Tree) -> list[FaceMap]:
    return [f for f in faces(tree) if f.is_inner]


def is_inner_kan(X: FiniteDendroidalSet, verbose: bool = False) -> bool:
    """Within the stored universe: every inner horn has a filler."""
    for tree in X.universe:
        for alpha in inner_horns(tree):
            for family in horn_families(X, tree, alpha):
                if not fill_horn(X, family):
                    if verbose:
                        print(f"unfilled inner horn at {canonical_code(tree)}")
                    return False
    return True


def is_strict(X: FiniteDendroidalSet, verbose: bool = False) -> bool:
    """Within the stored universe: every inner horn has a unique filler."""
    for tree in X.universe:
        for alpha in inner_horns(tree):
            for family in horn_families(X, tree, alpha):
                n = len(fill_horn(X, family))
                if n != 1:
                    if verbose:
                        print(
                            f"{n} fillers at {canonical_code(tree)} horn {alpha.label}"
                        )
                    return False
    return True


def deletion_breaks_inner_kan(X: FiniteDendroidalSet, tree: Tree, x) -> bool:
    """Does removing the dendrex ``x`` of ``tree`` leave an unfillable horn?

    The faces of ``x`` live on smaller shapes and survive the deletion, so
    they still form an inner horn family; it is unfillable afterwards iff
    ``x`` was its only filler.
    """
    for alpha in inner_horns(tree):
        family = restriction_family(X, tree, x, omitted=alpha)
        fillers = [y for y in fill_horn(X, family) if y != x]
        if not fillers:
            return True
    return False


# ---------------------------------------------------------------------------
# Normality


def stabilizer_is_trivial(X: FiniteDendroidalSet, tree: Tree, x) -> bool:
    for g in automorphisms(tree):
        if g == identity(tree):
            continue
        if X.action(g, x) == x:
            return False
    return True


def is_normal(X: FiniteDendroidalSet) -> bool:
    """No dendrex is fixed by a nontrivial automorphism of its shape."""
    for tree in X.universe:
        for x in X.dendrices(tree):
            if not stabilizer_is_trivial(X, tree, x):
                return False
    return True


def normality_witness(X: FiniteDendroidalSet):
    """A (shape, dendrex, automorphism) triple breaking normality, if any."""
    for tree in sorted(X.universe, key=lambda t: (t.n_vertices, len(t.edges))):
        for x in X.dendrices(tree):
            for g in automorphisms(tree):
                if g != identity(tree) and X.action(g, x) == x:
                    return (tree, x, g)
    return None


@dataclass(eq=False)
class DSetMap:
    """A map of dendroidal sets: a component function per stored shape."""

    source: FiniteDendroidalSet
    target: FiniteDendroidalSet
    components: Mapping  # standard tree -> dict dendrex -> dendrex

    def at(self, tree: Tree, x):
        return self.components[tree][x]

    def validate(self, max_tree_edges: int = 5) -> None:
        small = [t for t in self.source.universe if len(t.edges) <= max_tree_edges]
        for s in small:
            for t in small:
                for f in hom_set(s, t):
                    for x in self.source.dendrices(t):
                        lhs = self.at(s, self.source.action(f, x))
                        rhs = self.target.action(f, self.at(t, x))
                        assert lhs == rhs

    def is_mono(self) -> bool:
        return all(
            len(set(comp.values())) == len(comp) for comp in self.components.values()
        )


def is_normal_mono(f: DSetMap) -> bool:
    """Monomorphism whose new dendrices have trivial stabilizers."""
    if not f.is_mono():
        return False
    for tree in f.target.universe:
        image = set(f.components.get(tree, {}).values())
        for y in f.target.dendrices(tree):
            if y in image:
                continue
            if not stabilizer_is_trivial(f.target, tree, y):
                return False
    return True


def empty_dset(universe: tuple) -> FiniteDendroidalSet:
    return FiniteDendroidalSet(
        universe,
        {t: () for t in universe},
        act_std=lambda g, x: x,
        label="empty",
    )


def inclusion_of_empty(X: FiniteDendroidalSet) -> DSetMap:
    return DSetMap(empty_dset(X.universe), X, {t: {} for t in X.universe})


def delete_dendrex(X: FiniteDendroidalSet, tree: Tree, x) -> FiniteDendroidalSet:
    """Drop one dendrex of a maximal shape (actions into it are unaffected)."""
    sets = dict(X.dendrex_sets)
    sets[tree] = tuple(y for y in sets[tree] if y != x)
    return FiniteDendroidalSet(
        X.universe, sets, X.act_std, label=f"{X.label} minus one"
    )


# ---------------------------------------------------------------------------
# Slicing to simplicial sets


@dataclass(eq=False)
class FiniteSimplicialSet:
    """Simplex sets up to a dimension bound with face/degeneracy tables."""

    dim: int
    sets: Mapping  # n -> tuple
    face: Mapping  # (n, i) -> dict on sets[n], landing in sets[n-1]
    degen: Mapping  # (n, i) -> dict on sets[n], landing in sets[n+1]

    def __eq__(self, other):
        if not isinstance(other, FiniteSimplicialSet):
            return NotImplemented
        if self.dim != other.dim or set(self.sets) != set(other.sets):
            return False
        if any(set(self.sets[n]) != set(other.sets[n]) for n in self.sets):
            return False
        if set(self.face) != set(other.face) or set(self.degen) != set(other.degen):
            return False
        return all(
            dict(self.face[k]) == dict(other.face[k]) for k in self.face
        ) and all(dict(self.degen[k]) == dict(other.degen[k]) for k in self.degen)

    def validate(self) -> None:
        for (n, i), table in self.face.items():
            for x, y in table.items():
                assert x in self.sets[n] and y in self.sets[n - 1]
        # Simplicial identities on faces within range.
        for n in range(2, self.dim + 1):
            for i in range(n):
                for j in range(i + 1, n + 1):
                    for x in self.sets[n]:
                        a = self.face[(n - 1, i)][self.face[(n, j)][x]]
                        b = self.face[(n - 1, j - 1)][self.face[(n, i)][x]]
                        assert a == b


def nerve_of_category(cat, dim: int) -> FiniteSimplicialSet:
    """Chains of composable arrows with the usual faces and degeneracies."""
    sets = {n: tuple(cat.chains(n)) for n in range(dim + 1)}
    face, degen = {}, {}
    for n in range(1, dim + 1):
        for i in range(n + 1):
            table = {}
            for chain in sets[n]:
                if n == 1:
                    table[chain] = (cat.dom[chain[0]],) if i == 1 else (cat.cod[chain[0]],)
                elif i == 0:
                    table[chain] = chain[1:]
                elif i == n:
                    table[chain] = chain[:-1]
                else:
                    merged = cat.compose(chain[i], chain[i - 1])
                    table[chain] = chain[: i - 1] + (merged,) + chain[i + 1 :]
            face[(n, i)] = table
    for n in range(dim):
        for i in range(n + 1):
            table = {}
            for chain in sets[n]:
                if n == 0:
                    table[chain] = (cat.identities[chain[0]],)
                else:
                    obj = cat.dom[chain[i]] if i < n else cat.cod[chain[-1]]
                    ins = cat.identities[obj]
                    table[chain] = chain[:i] + (ins,) + chain[i:]
            degen[(n, i)] = table
    return FiniteSimplicialSet(dim, sets, face, degen)


def standard_simplex(n: int, dim: int) -> FiniteSimplicialSet:
    """Delta[n] up to the given dimension, as monotone vertex tuples."""
    sets = {
        k: tuple(
            chain
            for chain in itertools.product(range(n + 1), repeat=k + 1)
            if all(chain[i] <= chain[i + 1] for i in range(k))
        )
        for k in range(dim + 1)
    }
    face = {
        (k, i): {x: x[:i] + x[i + 1 :] for x in sets[k]}
        for k in range(1, dim + 1)
        for i in range(k + 1)
    }
    degen = {
        (k, i): {x: x[: i + 1] + x[i:] for x in sets[k]}
        for k in range(dim)
        for i in range(k + 1)
    }
    return FiniteSimplicialSet(dim, sets, face, degen)


def sset_product(A: FiniteSimplicialSet, B: FiniteSimplicialSet) -> FiniteSimplicialSet:
    dim = min(A.dim, B.dim)
    sets = {
        n: tuple(itertools.product(A.sets[n], B.sets[n])) for n in range(dim + 1)
    }
    face = {
        (n, i): {
            (a, b): (A.face[(n, i)][a], B.face[(n, i)][b]) for a, b in sets[n]
        }
        for n in range(1, dim + 1)
        for i in range(n + 1)
    }
    degen = {
        (n, i): {
            (a, b): (A.degen[(n, i)][a], B.degen[(n, i)][b]) for a, b in sets[n]
        }
        for n in range(dim)
        for i in range(n + 1)
    }
    return FiniteSimplicialSet(dim, sets, face, degen)


def vertex_map_to_edge_morphism(psi: tuple, n: int, m: int) -> OmegaMorphism:
    """The tree morphism L_n -> L_m of a weakly monotone vertex map.

    Simplex vertex ``j`` corresponds to edge ``n - j`` of the linear tree
    (arrows of the tree operad run from leaf color to root color), so the
    vertex map is conjugated by the reversals on both sides.
    """
    emap = {str(k): str(m - psi[n - k]) for k in range(n + 1)}
    return OmegaMorphism(linear_tree(n), linear_tree(m), emap)


def edge_map_to_vertex_map(g: OmegaMorphism) -> tuple:
    n, m = g.source.n_vertices, g.target.n_vertices
    return tuple(m - int(g(str(n - j))) for j in range(n + 1))


def i_upper(X: FiniteDendroidalSet, dim: int | None = None) -> FiniteSimplicialSet:
    """Restrict a dendroidal set to its linear shapes."""
    if dim is None:
        dim = max(
            (t.n_vertices for t in X.universe if _is_linear(t)), default=0
        )
    sets = {n: tuple(X.dendrices(linear_tree(n))) for n in range(dim + 1)}
    face, degen = {}, {}
    for n in range(1, dim + 1):
        for i in range(n + 1):
            psi = tuple(j if j < i else j + 1 for j in range(n))
            f = vertex_map_to_edge_morphism(psi, n - 1, n)
            face[(n, i)] = {x: X.action(f, x) for x in sets[n]}
    for n in range(dim):
        for i in range(n + 1):
            psi = tuple(j if j <= i else j - 1 for j in range(n + 2))
            s = vertex_map_to_edge_morphism(psi, n + 1, n)
            degen[(n, i)] = {x: X.action(s, x) for x in sets[n]}
    return FiniteSimplicialSet(dim, sets, face, degen)


def _is_linear(t: Tree) -> bool:
    return all(len(t.children(e)) == 1 for e in t.vertex_edges)


def _monotone_factorization(phi: tuple, n: int, m: int) -> list:
    """Write a monotone map as elementary faces and degeneracies.

    Returns a list of ("d", i) / ("s", i) tokens whose left-to-right
    composite (in the simplex category) equals ``phi``.
    """
    if n == m and phi == tuple(range(n + 1)):
        return []
    # Surjective part first (collapse duplicates), then injective part.
    dups = [j for j in range(n) if phi[j] == phi[j + 1]]
    if dups:
        i = dups[0]
        rest = phi[:i] + phi[i + 1 :]
        return [("s", i)] + _monotone_factorization(rest, n - 1, m)
    missing = [v for v in range(m + 1) if v not in phi]
    i = missing[0]
    sub = tuple(v if v < i else v - 1 for v in phi)
    return _monotone_factorization(sub, n, m - 1) + [("d", i)]


def simplicial_action(S: FiniteSimplicialSet, phi: tuple, n: int, m: int, x):
    """Apply X(phi) for a weakly monotone map [n] -> [m] to ``x`` in X_m."""
    tokens = _monotone_factorization(phi, n, m)
    # Contravariance: the last token acts first.
    cur, level = x, m
    for kind, i in reversed(tokens):
        if kind == "d":
            cur = S.face[(level, i)][cur]
            level -= 1
        else:
            cur = S.degen[(level, i)][cur]
            level += 1
    return cur


def i_lower(S: FiniteSimplicialSet, universe: tuple) -> FiniteDendroidalSet:
    """Place a simplicial set on the linear shapes, empty elsewhere.

    The simplicial data must extend at least as far as the longest linear
    shape of the universe, otherwise the face actions would dangle.
    """
    longest = max((t.n_vertices for t in universe if _is_linear(t)), default=0)
    if longest > S.dim:
        raise ValueError(
            f"universe holds linear shapes up to length {longest}; "
            f"the simplicial set stops at dimension {S.dim}"
        )
    sets = {}
    for t in universe:
        if _is_linear(t) and t.n_vertices <= S.dim:
            sets[t] = tuple(S.sets[t.n_vertices])
        else:
            sets[t] = ()

    def act_std(g: OmegaMorphism, x):
        n, m = g.source.n_vertices, g.target.n_vertices
        psi = edge_map_to_vertex_map(g)
        return simplicial_action(S, psi, n, m, x)

    return FiniteDendroidalSet(universe, sets, act_std, label="i_lower")


# ---------------------------------------------------------------------------
# The left adjoint presentation


def tau_presentation(X: FiniteDendroidalSet) -> OperadPresentation:
    """Colors from the edge shape, generators from corolla dendrices.

    Relations: corolla dendrices twisted by shape automorphisms agree with
    the twisted generators, degenerate unary dendrices are identities, and
    the inner face of every two-vertex dendrex is the composite of its two
    outer faces.
    """
    eta = unit_tree("0")
    colors = tuple(X.dendrices(eta))
    generators: dict = {}
    corollas = [t for t in X.universe if t.n_vertices == 1]
    two_vertex = [t for t in X.universe if t.n_vertices == 2]

    def leaf_edges(tree):
        return sorted(tree.edges - {tree.root}, key=int)

    def gen_name(tree, x):
        return ("g", len(tree.edges) - 1, x)

    def color_at(tree, x, edge):
        return X.action(edge_inclusion(tree, edge).morphism, x)

    for tree in corollas:
        for x in X.dendrices(tree):
            dom = tuple(color_at(tree, x, e) for e in leaf_edges(tree))
            cod = color_at(tree, x, tree.root)
            generators[gen_name(tree, x)] = (dom, cod)

    relations = []
    # Unary degenerate dendrices are identities.
    c1 = tree_from_code("(*)")
    if c1 in X.dendrex_sets:
        for color in colors:
            x = X.action(_degeneracy_into(c1), color)
            relations.append(
                (generator_term(gen_name(c1, x), 1), identity_term())
            )

    # Automorphism twists of corolla dendrices.
    for tree in corollas:
        n = len(tree.edges) - 1
        ledges = leaf_edges(tree)
        for x in X.dendrices(tree):
            for g in automorphisms(tree):
                if g == identity(tree):
                    continue
                y = X.action(g, x)
                # g permutes the leaves; slot k of g_y reads leaf g(ledges[k]).
                perm = tuple(ledges.index(g(e)) for e in ledges)
                relations.append(
                    (
                        generator_term(gen_name(tree, y), n),
                        act_term(perm, generator_term(gen_name(tree, x), n)),
                    )
                )

    # Compositions from two-vertex shapes.  Removing the top vertex keeps the
    # bottom corolla; removing the root vertex keeps the subtree on top.
    for tree in two_vertex:
        (inner_edge,) = tree.inner_edges
        fs = {f.label: f for f in faces(tree)}
        inner = fs[f"inner:{inner_edge}"]
        bottom_face = fs[f"outer:{inner_edge}"]
        top_face = fs[f"outer:{tree.root}"]
        for y in X.dendrices(tree):
            comp = X.action(inner.morphism, y)
            bot = X.action(bottom_face.morphism, y)
            up = X.action(top_face.morphism, y)
            rel = _composition_relation(
                X, tree, inner, bottom_face, top_face, comp, bot, up, gen_name
            )
            relations.append(rel)

    return OperadPresentation(colors, generators, tuple(relations))


def _degeneracy_into(c1: Tree) -> OmegaMorphism:
    """The degeneracy C_1 -> eta, as a morphism into the standard unit tree."""
    return degeneracy(c1, "0").morphism.then(
        OmegaMorphism(
            degeneracy(c1, "0").morphism.target, unit_tree("0"), {"1": "0"}
        )
    )


def _composition_relation(X, tree, inner, bottom_face, top_face, comp, bot, up, gen_name):
    """Inner-face dendrex = bottom dendrex composed with the top dendrex.

    Slot orders of the three generators come from their standard shapes;
    the transport isomorphisms translate them into edges of ``tree`` so the
    two sides can be aligned by an explicit permutation.
    """

    def slot_edges(face):
        src = face.morphism.source
        ren = standard_edge_map(src)
        std = standard_form(src)
        ledges = sorted(std.edges - {std.root}, key=int)
        return [face.morphism(ren[e]) for e in ledges]

    comp_edges = slot_edges(inner)
    bot_edges = slot_edges(bottom_face)
    up_edges = slot_edges(top_face)
    (inner_edge,) = tree.inner_edges
    slot = bot_edges.index(inner_edge)

    n, m = len(bot_edges), len(up_edges)
    lhs = generator_term(gen_name(standard_form(inner.morphism.source), comp), n + m - 1)
    bot_term = generator_term(gen_name(standard_form(bottom_face.morphism.source), bot), n)
    up_term = generator_term(gen_name(standard_form(top_face.morphism.source), up), m)
    args = [identity_term()] * n
    args[slot] = up_term
    rhs = compose_term(bot_term, args)
    rhs_edges = bot_edges[:slot] + up_edges + bot_edges[slot + 1 :]
    perm = tuple(rhs_edges.index(e) for e in comp_edges)
    return (lhs, act_term(perm, rhs))
