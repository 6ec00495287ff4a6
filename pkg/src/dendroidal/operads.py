"""Finite colored symmetric operads: hom tables, functors, slicing, transfer.

Operations have ordered domains; the symmetric action moves listings around,
with ``act(perm, op)`` placing the old slot ``perm[i]`` at slot ``i``.  Hom
sets, composition, actions and identities are supplied per backend (explicit
tables, permutation words, free operads on trees, categories, endomorphism
operads) behind one interface so everything downstream is backend-agnostic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .categories import FiniteCategory, is_isofibration_of_categories
from .omega import subtree_between
from .trees import Tree


def perm_compose(q: tuple, p: tuple) -> tuple:
    """The action-composition ``q . p``: act(p, act(q, x)) == act(q.p, x)."""
    return tuple(q[i] for i in p)


def perm_inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def equivariance_perm(perm: tuple, slot: int, inner_arity: int) -> tuple:
    """Permutation relating ``act(perm, psi) o_slot phi`` to ``psi o_{perm[slot]} phi``."""
    j, m, n = perm[slot], inner_arity, len(perm)

    def pos(x: int) -> int:
        return x if x < j else x + m - 1

    out = []
    for k in range(n + m - 1):
        if k < slot:
            out.append(pos(perm[k]))
        elif k < slot + m:
            out.append(j + (k - slot))
        else:
            out.append(pos(perm[k - m + 1]))
    return tuple(out)


def grid_transpose(n: int, m: int) -> tuple:
    """Permutation sending slot (i major, j minor) to (j major, i minor).

    Slot ``i*m + j`` of the result reads slot ``j*n + i`` of the argument;
    this is the evident permutation equating the two sides of the
    interchange relation on an n-by-m grid of inputs.
    """
    return tuple(j * n + i for i in range(n) for j in range(m))


@dataclass(eq=False)
class FiniteOperad:
    """A symmetric operad with computable hom-sets within an arity bound."""

    colors: tuple
    ops_fn: Callable[[tuple, object], tuple]
    dom_fn: Callable[[object], tuple]
    cod_fn: Callable[[object], object]
    compose_fn: Callable[[object, int, object], object]
    sigma_fn: Callable[[tuple, object], object]
    identity_fn: Callable[[object], object]
    label: str = "operad"
    arity_bound: int | None = None
    free_generators: tuple | None = None  # ops generating freely, if any
    presentation: object | None = None  # OperadPresentation, for tabulated quotients
    term_of: Callable | None = None  # representative term of an op, when presented
    all_ops_fn: Callable | None = None  # direct enumeration, bypassing profile loops
    ops_by_cod_fn: Callable | None = None  # (cod, arity) -> ops, bypassing dom loops

    def __repr__(self):
        return f"FiniteOperad({self.label})"

    def ops(self, dom: tuple, cod) -> tuple:
        return self.ops_fn(tuple(dom), cod)

    def dom(self, op) -> tuple:
        return self.dom_fn(op)

    def cod(self, op):
        return self.cod_fn(op)

    def arity(self, op) -> int:
        return len(self.dom_fn(op))

    def identity(self, color):
        return self.identity_fn(color)

    def compose_at(self, psi, slot: int, phi):
        """Partial composition; ``slot`` is 0-based."""
        if self.dom_fn(psi)[slot] != self.cod_fn(phi):
            raise ValueError("colors do not match at the composition slot")
        return self.compose_fn(psi, slot, phi)

    def compose(self, psi, args: Iterable) -> object:
        """Full composition, derived by substituting from the last slot."""
        args = list(args)
        if len(args) != self.arity(psi):
            raise ValueError("wrong number of arguments")
        out = psi
        for slot in reversed(range(len(args))):
            out = self.compose_at(out, slot, args[slot])
        return out

    def act(self, perm: tuple, op):
        if sorted(perm) != list(range(self.arity(op))):
            raise ValueError("not a permutation of the slots")
        return self.sigma_fn(tuple(perm), op)

    def profiles(self, max_arity: int) -> list[tuple]:
        """All (dom, cod) profiles up to ``max_arity``."""
        out = []
        for n in range(max_arity + 1):
            for dom in itertools.product(self.colors, repeat=n):
                for cod in self.colors:
                    out.append((dom, cod))
        return out

    def all_ops(self, max_arity: int) -> list:
        if self.all_ops_fn is not None:
            return list(self.all_ops_fn(max_arity))
        out = []
        for dom, cod in self.profiles(max_arity):
            out.extend(self.ops(dom, cod))
        return out

    def ops_by_cod(self, cod, arity: int) -> list:
        """All operations with the given codomain and arity."""
        if self.ops_by_cod_fn is not None:
            return list(self.ops_by_cod_fn(cod, arity))
        out = []
        for dom in itertools.product(self.colors, repeat=arity):
            out.extend(self.ops(dom, cod))
        return out

    def hom_table(self, max_arity: int) -> dict:
        """Materialized hom-sets; the explicit-table view of the operad."""
        return {
            (dom, cod): tuple(self.ops(dom, cod))
            for dom, cod in self.profiles(max_arity)
            if self.ops(dom, cod)
        }


def validate_operad(P: FiniteOperad, max_arity: int = 3, max_ops: int | None = None) -> None:
    """Exhaustive unit, associativity and equivariance checks within bounds."""
    ops = P.all_ops(max_arity)
    if max_ops is not None:
        ops = ops[:max_ops]
    for psi in ops:
        n = P.arity(psi)
        dom = P.dom(psi)
        assert P.compose_at(P.identity(P.cod(psi)), 0, psi) == psi
        for slot in range(n):
            assert P.compose_at(psi, slot, P.identity(dom[slot])) == psi
        for perm in itertools.permutations(range(n)):
            moved = P.act(perm, psi)
            assert P.dom(moved) == tuple(dom[i] for i in perm)
            for qerm in itertools.permutations(range(n)):
                assert P.act(qerm, moved) == P.act(perm_compose(perm, qerm), psi)
    # Composition interplay: associativity and both equivariance shapes.
    by_cod: dict = {}
    for phi in ops:
        by_cod.setdefault(P.cod(phi), []).append(phi)
    for psi in ops:
        dom = P.dom(psi)
        for slot, color in enumerate(dom):
            for phi in by_cod.get(color, []):
                if P.arity(psi) + P.arity(phi) - 1 > max_arity:
                    continue
                comp = P.compose_at(psi, slot, phi)
                assert P.dom(comp) == dom[:slot] + P.dom(phi) + dom[slot + 1 :]
                for perm in itertools.permutations(range(len(dom))):
                    lhs = P.compose_at(P.act(perm, psi), perm_inverse(perm)[slot], phi)
                    rho = equivariance_perm(perm, perm_inverse(perm)[slot], P.arity(phi))
                    assert lhs == P.act(rho, comp)
                # Associativity in the nested shape.
                for slot2, color2 in enumerate(P.dom(phi)):
                    for chi in by_cod.get(color2, []):
                        if P.arity(comp) + P.arity(chi) - 1 > max_arity:
                            continue
                        a = P.compose_at(comp, slot + slot2, chi)
                        b = P.compose_at(psi, slot, P.compose_at(phi, slot2, chi))
                        assert a == b


# ---------------------------------------------------------------------------
# Backends


def table_operad(
    colors,
    hom: Mapping,
    compose: Mapping,
    sigma: Mapping,
    identities: Mapping,
    label: str = "table",
    arity_bound: int | None = None,
    free_generators: tuple | None = None,
    presentation=None,
) -> FiniteOperad:
    """Operad backed by explicit dictionaries.

    ``hom`` maps (dom, cod) to op tuples; ``compose`` maps (psi, slot, phi)
    to ops; ``sigma`` maps (perm, psi) to ops.
    """
    profile = {}
    for (dom, cod), ops in hom.items():
        for op in ops:
            profile[op] = (tuple(dom), cod)

    def sigma_fn(perm, op):
        if perm == tuple(range(len(perm))):
            return op
        return sigma[(perm, op)]

    return FiniteOperad(
        colors=tuple(colors),
        ops_fn=lambda dom, cod: tuple(hom.get((dom, cod), ())),
        dom_fn=lambda op: profile[op][0],
        cod_fn=lambda op: profile[op][1],
        compose_fn=lambda psi, i, phi: compose[(psi, i, phi)],
        sigma_fn=sigma_fn,
        identity_fn=lambda c: identities[c],
        label=label,
        arity_bound=arity_bound,
        free_generators=free_generators,
        presentation=presentation,
    )


def _as_compose(word: tuple, slot: int, inner: tuple) -> tuple:
    m = len(inner)
    out = []
    for x in word:
        if x < slot:
            out.append(x)
        elif x == slot:
            out.extend(u + slot for u in inner)
        else:
            out.append(x + m - 1)
    return tuple(out)


def permutation_operad(label: str = "As") -> FiniteOperad:
    """One color; the arity-n operations are the orderings of n slots."""
    color = "*"

    def ops(dom, cod):
        if cod != color or any(c != color for c in dom):
            return ()
        return tuple(
            ("w", perm) for perm in itertools.permutations(range(len(dom)))
        )

    return FiniteOperad(
        colors=(color,),
        ops_fn=ops,
        dom_fn=lambda op: (color,) * len(op[1]),
        cod_fn=lambda op: color,
        compose_fn=lambda psi, i, phi: ("w", _as_compose(psi[1], i, phi[1])),
        sigma_fn=lambda perm, op: ("w", tuple(perm_inverse(perm)[x] for x in op[1])),
        identity_fn=lambda c: ("w", (0,)),
        label=label,
    )


def terminal_operad() -> FiniteOperad:
    """One color, one operation in every arity."""
    color = "*"
    return FiniteOperad(
        colors=(color,),
        ops_fn=lambda dom, cod: (("u", len(dom)),),
        dom_fn=lambda op: (color,) * op[1],
        cod_fn=lambda op: color,
        compose_fn=lambda psi, i, phi: ("u", psi[1] + phi[1] - 1),
        sigma_fn=lambda perm, op: op,
        identity_fn=lambda c: ("u", 1),
        label="Comm",
    )


def free_tree_operad(tree: Tree) -> FiniteOperad:
    """The operad freely generated by the vertices of a tree.

    Colors are the edges; an operation is a subtree (by its vertex set)
    together with a listing of its boundary, so each hom-set is empty or a
    singleton per listing.
    """

    def ops(dom, cod):
        if cod not in tree.edges or not set(dom) <= set(tree.edges):
            return ()
        if len(set(dom)) != len(dom):
            return ()
        vset = subtree_between(tree, cod, frozenset(dom))
        if vset is None:
            return ()
        return ((cod, vset, tuple(dom)),)

    def compose(psi, slot, phi):
        cod, vset, listing = psi
        _, vset2, listing2 = phi
        return (
            cod,
            vset | vset2,
            listing[:slot] + listing2 + listing[slot + 1 :],
        )

    generators = tuple(
        (e0, frozenset([e0]), tree.children(e0)) for e0 in tree.vertex_edges
    )

    def all_ops(max_arity):
        from .omega import subtrees_from

        out = []
        for e in sorted(tree.edges):
            for vset, boundary in subtrees_from(tree, e):
                if len(boundary) > max_arity:
                    continue
                for listing in itertools.permutations(sorted(boundary)):
                    out.append((e, vset, listing))
        return out

    def ops_by_cod(cod, arity):
        from .omega import subtrees_from

        out = []
        for vset, boundary in subtrees_from(tree, cod):
            if len(boundary) != arity:
                continue
            for listing in itertools.permutations(sorted(boundary)):
                out.append((cod, vset, listing))
        return out

    return FiniteOperad(
        colors=tuple(sorted(tree.edges)),
        ops_fn=ops,
        dom_fn=lambda op: op[2],
        cod_fn=lambda op: op[0],
        compose_fn=compose,
        sigma_fn=lambda perm, op: (op[0], op[1], tuple(op[2][i] for i in perm)),
        identity_fn=lambda c: (c, frozenset(), (c,)),
        label=f"Omega({'|'.join(sorted(tree.edges))})",
        free_generators=generators,
        all_ops_fn=all_ops,
        ops_by_cod_fn=ops_by_cod,
    )


def endomorphism_operad(sets: Mapping[object, tuple], label: str = "End") -> FiniteOperad:
    """Multivariable functions between finite sets, as an environment operad.

    An operation with domain ``(c1..cn)`` and codomain ``c0`` is the full
    value table of a function ``sets[c1] x .. x sets[cn] -> sets[c0]``,
    indexed by the lexicographic enumeration of inputs.
    """
    sets = {c: tuple(v) for c, v in sets.items()}

    def points(dom):
        return list(itertools.product(*(sets[c] for c in dom)))

    def ops(dom, cod):
        if cod not in sets or not all(c in sets for c in dom):
            return ()
        return tuple(
            ("fn", dom, cod, values)
            for values in itertools.product(sets[cod], repeat=len(points(dom)))
        )

    def apply(op, args):
        _, dom, cod, values = op
        return values[points(dom).index(tuple(args))]

    def compose(psi, slot, phi):
        dom = psi[1][:slot] + phi[1] + psi[1][slot + 1 :]
        values = []
        for xs in points(dom):
            inner = apply(phi, xs[slot : slot + len(phi[1])])
            outer_args = xs[:slot] + (inner,) + xs[slot + len(phi[1]) :]
            values.append(apply(psi, outer_args))
        return ("fn", dom, psi[2], tuple(values))

    def sigma(perm, op):
        dom = tuple(op[1][i] for i in perm)
        inv = perm_inverse(perm)
        values = []
        for xs in points(dom):
            values.append(apply(op, tuple(xs[inv[j]] for j in range(len(perm)))))
        return ("fn", dom, op[2], tuple(values))

    def ident(c):
        return ("fn", (c,), c, tuple(sets[c]))

    return FiniteOperad(
        colors=tuple(sets),
        ops_fn=ops,
        dom_fn=lambda op: op[1],
        cod_fn=lambda op: op[2],
        compose_fn=compose,
        sigma_fn=sigma,
        identity_fn=ident,
        label=label,
    )


# ---------------------------------------------------------------------------
# Slicing between operads and categories


def j_lower(cat: FiniteCategory) -> FiniteOperad:
    """A category as an operad concentrated in arity one."""

    def ops(dom, cod):
        if len(dom) != 1:
            return ()
        return tuple(f for f in cat.hom(dom[0], cod))

    return FiniteOperad(
        colors=tuple(cat.objects),
        ops_fn=ops,
        dom_fn=lambda f: (cat.dom[f],),
        cod_fn=lambda f: cat.cod[f],
        compose_fn=lambda g, i, f: cat.compose(g, f),
        sigma_fn=lambda perm, f: f,
        identity_fn=lambda c: cat.identities[c],
        label="j_lower",
    )


def j_upper(P: FiniteOperad) -> FiniteCategory:
    """The unary part of an operad."""
    arrows = []
    dom, cod = {}, {}
    for a in P.colors:
        for b in P.colors:
            for f in P.ops((a,), b):
                arrows.append(f)
                dom[f], cod[f] = a, b
    table = {}
    for g in arrows:
        for f in arrows:
            if cod[f] == dom[g]:
                table[(g, f)] = P.compose_at(g, 0, f)
    return FiniteCategory(
        tuple(P.colors),
        tuple(arrows),
        dom,
        cod,
        {c: P.identity(c) for c in P.colors},
        table,
    )


def j_star(cat: FiniteCategory) -> FiniteOperad:
    """Right-adjoint style extension of a category by anonymous operations.

    Unary operations are the arrows of the category; every profile of arity
    other than one holds a single anonymous operation.  Nullary operations
    are only included when every hom-set of the category is a singleton
    (e.g. the terminal category, giving the terminal operad); otherwise a
    composite like ``psi o (constant, arrow)`` would land in a unary hom-set
    with no canonical value, so the reduced variant is returned.
    """
    singleton_homs = all(
        len(cat.hom(a, b)) == 1 for a in cat.objects for b in cat.objects
    )

    def anon(dom, cod):
        return ("anon", dom, cod)

    def ops(dom, cod):
        if len(dom) == 1:
            return tuple(cat.hom(dom[0], cod))
        if len(dom) == 0 and not singleton_homs:
            return ()
        if not set(dom) <= set(cat.objects) or cod not in cat.objects:
            return ()
        return (anon(tuple(dom), cod),)

    def dom_fn(op):
        return op[1] if op[0] == "anon" else (cat.dom[op],)

    def cod_fn(op):
        return op[2] if op[0] == "anon" else cat.cod[op]

    def compose(psi, slot, phi):
        if psi[0] != "anon" and phi[0] != "anon":
            return cat.compose(psi, phi)
        dom = dom_fn(psi)[:slot] + dom_fn(phi) + dom_fn(psi)[slot + 1 :]
        cod = cod_fn(psi)
        if len(dom) == 1:
            (only,) = cat.hom(dom[0], cod)
            return only
        return anon(dom, cod)

    def sigma(perm, op):
        if op[0] != "anon":
            return op
        return anon(tuple(op[1][i] for i in perm), op[2])

    return FiniteOperad(
        colors=tuple(cat.objects),
        ops_fn=ops,
        dom_fn=dom_fn,
        cod_fn=cod_fn,
        compose_fn=compose,
        sigma_fn=sigma,
        identity_fn=lambda c: cat.identities[c],
        label="j_star",
    )


# ---------------------------------------------------------------------------
# Functors


@dataclass(eq=False)
class OperadFunctor:
    source: FiniteOperad
    target: FiniteOperad
    color_map: Mapping
    op_map: Mapping  # materialized on the ops of interest

    def __eq__(self, other):
        if not isinstance(other, OperadFunctor):
            return NotImplemented
        return dict(self.color_map) == dict(other.color_map) and dict(self.op_map) == dict(
            other.op_map
        )

    def __hash__(self):
        return hash(
            (
                tuple(sorted(self.color_map.items(), key=repr)),
                tuple(sorted(self.op_map.items(), key=repr)),
            )
        )

    def __repr__(self):
        return f"OperadFunctor({dict(self.color_map)!r}, {len(self.op_map)} ops)"

    def on_color(self, c):
        return self.color_map[c]

    def __call__(self, op):
        return self.op_map[op]

    def validate(self, max_arity: int = 3) -> None:
        P, Q = self.source, self.target
        for op, img in self.op_map.items():
            assert Q.dom(img) == tuple(self.color_map[c] for c in P.dom(op))
            assert Q.cod(img) == self.color_map[P.cod(op)]
        for c in P.colors:
            ident = P.identity(c)
            if ident in self.op_map:
                assert self.op_map[ident] == Q.identity(self.color_map[c])
        ops = [op for op in self.op_map if P.arity(op) <= max_arity]
        for psi in ops:
            for perm in itertools.permutations(range(P.arity(psi))):
                moved = P.act(perm, psi)
                if moved in self.op_map:
                    assert self.op_map[moved] == Q.act(perm, self.op_map[psi])
            for slot, color in enumerate(P.dom(psi)):
                for phi in ops:
                    if P.cod(phi) != color:
                        continue
                    comp = P.compose_at(psi, slot, phi)
                    if comp in self.op_map:
                        assert self.op_map[comp] == Q.compose_at(
                            self.op_map[psi], slot, self.op_map[phi]
                        )


def functor_from_generators(
    P: FiniteOperad, Q: FiniteOperad, color_map: Mapping, gen_images: Mapping, max_arity: int
) -> OperadFunctor:
    """Extend generator images over all ops of a free operad up to the bound."""
    op_map = {}
    for op in P.all_ops(max_arity):
        op_map[op] = evaluate_free_op(P, Q, color_map, gen_images, op)
    return OperadFunctor(P, Q, dict(color_map), op_map)


def evaluate_free_op(P, Q, color_map, gen_images, op):
    """Evaluate one op of a free tree operad through generator images.

    Ops of a free tree operad are (root, vertex set, listing); the value is
    built by recursion over the subtree and a final listing adjustment.
    """
    cod, vset, listing = op

    def eval_planar(edge, vset_left):
        """Value on the subtree below ``edge`` with the planar listing; returns
        (op in Q, planar boundary listing)."""
        if edge not in vset_left:
            return Q.identity(color_map[edge]), (edge,)
        gen = next(g for g in P.free_generators if g[0] == edge)
        img = gen_images[gen]
        args, boundary = [], []
        for child in gen[2]:
            sub, sub_boundary = eval_planar(child, vset_left)
            args.append(sub)
            boundary.extend(sub_boundary)
        return Q.compose(img, args), tuple(boundary)

    if not vset:
        return Q.identity(color_map[cod])
    value, boundary = eval_planar(cod, vset)
    # boundary lists the planar order; op wants `listing`.
    perm = tuple(boundary.index(e) for e in listing)
    return Q.act(perm, value)


def enumerate_functors(
    P: FiniteOperad, Q: FiniteOperad, max_arity: int = 3
) -> list[OperadFunctor]:
    """All operad functors P -> Q, materialized on ops of arity <= bound.

    Free sources enumerate generator images; presented sources check their
    relations; anything else falls back to profile-by-profile backtracking.
    """
    out = []
    for colors in itertools.product(Q.colors, repeat=len(P.colors)):
        color_map = dict(zip(P.colors, colors))
        if P.free_generators is not None:
            gen_lists = []
            for gen in P.free_generators:
                img_dom = tuple(color_map[c] for c in P.dom(gen))
                gen_lists.append(
                    [(gen, img) for img in Q.ops(img_dom, color_map[P.cod(gen)])]
                )
            for combo in itertools.product(*gen_lists):
                out.append(
                    functor_from_generators(P, Q, color_map, dict(combo), max_arity)
                )
        elif P.presentation is not None:
            out.extend(_presented_functors(P, Q, color_map, max_arity))
        else:
            out.extend(_backtrack_functors(P, Q, color_map, max_arity))
    return out


def _presented_functors(P, Q, color_map, max_arity):
    from .presentations import evaluate_term

    pres = P.presentation
    gen_lists = []
    for name in sorted(pres.generators, key=repr):
        gdom, gcod = pres.generators[name]
        img_dom = tuple(color_map[c] for c in gdom)
        gen_lists.append([(name, img) for img in Q.ops(img_dom, color_map[gcod])])
    for combo in itertools.product(*gen_lists):
        images = dict(combo)
        ok = True
        for lhs, rhs in pres.relations:
            _, cod = pres.relation_profile(lhs, rhs)
            if evaluate_term(pres, Q, color_map, images, lhs, cod) != evaluate_term(
                pres, Q, color_map, images, rhs, cod
            ):
                ok = False
                break
        if not ok:
            continue
        op_map = {
            op: evaluate_term(pres, Q, color_map, images, P.term_of(op), P.cod(op))
            for op in P.all_ops(max_arity)
        }
        yield OperadFunctor(P, Q, dict(color_map), op_map)


def _backtrack_functors(P, Q, color_map, max_arity):
    ops = P.all_ops(max_arity)
    order = sorted(ops, key=lambda op: (P.arity(op), repr(op)))

    def consistent(op_map, op, img):
        n = P.arity(op)
        if op == P.identity(P.cod(op)) and n == 1:
            if img != Q.identity(color_map[P.cod(op)]):
                return False
        for perm in itertools.permutations(range(n)):
            moved = P.act(perm, op)
            if moved in op_map and op_map[moved] != Q.act(perm, img):
                return False
        for other, other_img in list(op_map.items()) + [(op, img)]:
            for slot, color in enumerate(P.dom(other)):
                for inner, inner_img in list(op_map.items()) + [(op, img)]:
                    if P.cod(inner) != color:
                        continue
                    comp = P.compose_at(other, slot, inner)
                    if comp in op_map or comp == op:
                        want = Q.compose_at(other_img, slot, inner_img)
                        got = op_map.get(comp, img if comp == op else None)
                        if got is not None and got != want:
                            return False
        return True

    def assign(i, op_map):
        if i == len(order):
            yield OperadFunctor(P, Q, dict(color_map), dict(op_map))
            return
        op = order[i]
        if op in op_map:
            yield from assign(i + 1, op_map)
            return
        img_dom = tuple(color_map[c] for c in P.dom(op))
        for img in Q.ops(img_dom, color_map[P.cod(op)]):
            if consistent(op_map, op, img):
                op_map[op] = img
                yield from assign(i + 1, op_map)
                del op_map[op]

    yield from assign(0, {})


# ---------------------------------------------------------------------------
# Isofibrations, equivalences, transfer


def is_isofibration(F: OperadFunctor) -> bool:
    """Right lifting against the point inclusion into the free-living iso.

    Equivalently the unary part is an isofibration of categories, checked
    exhaustively.
    """
    src, tgt = j_upper(F.source), j_upper(F.target)
    f_arr = {f: F.op_map[f] for f in src.arrows}
    return is_isofibration_of_categories(dict(F.color_map), f_arr, src, tgt)


def is_equivalence(F: OperadFunctor, max_arity: int = 3) -> bool:
    """Fully faithful on every profile within the bound, essentially surjective."""
    P, Q = F.source, F.target
    for dom, cod in P.profiles(max_arity):
        img_dom = tuple(F.color_map[c] for c in dom)
        src_ops = P.ops(dom, cod)
        images = [F.op_map[op] for op in src_ops]
        if len(set(images)) != len(src_ops):
            return False
        if set(images) != set(Q.ops(img_dom, F.color_map[cod])):
            return False
    cat = j_upper(Q)
    hit = set(F.color_map.values())
    for q in Q.colors:
        if q in hit:
            continue
        if not any(cat.cod[f] in hit for f in cat.isos_from(q)):
            return False
    return True


def is_natural_family(F: OperadFunctor, G: OperadFunctor, family: Mapping) -> bool:
    """Is ``family[c] : F(c) -> G(c)`` natural between algebras F and G?"""
    Q = F.target
    for psi, img in F.op_map.items():
        cod = F.source.cod(psi)
        lhs = Q.compose_at(family[cod], 0, img)
        rhs = Q.compose(G.op_map[psi], [family[c] for c in F.source.dom(psi)])
        if lhs != rhs:
            return False
    return True


def transfer_algebra(F: OperadFunctor, iso_family: Mapping) -> tuple[OperadFunctor, dict]:
    """Transfer an algebra along a family of isomorphisms.

    ``iso_family[c]`` must be an isomorphism in the unary part of the target
    out of ``F.color_map[c]``.  Returns the transferred algebra and a
    witness record with the inverses and the verified naturality flag.
    """
    Q = F.target
    cat = j_upper(Q)
    inv = {}
    for c, f in iso_family.items():
        g = cat.inverse(f)
        if g is None:
            raise ValueError(f"NotIso: family member at color {c!r} has no inverse")
        inv[c] = g
    color_map = {c: cat.cod[iso_family[c]] for c in F.color_map}
    op_map = {}
    for psi, img in F.op_map.items():
        cod = F.source.cod(psi)
        conjugated = Q.compose(
            Q.compose_at(iso_family[cod], 0, img),
            [inv[c] for c in F.source.dom(psi)],
        )
        op_map[psi] = conjugated
    G = OperadFunctor(F.source, Q, color_map, op_map)
    witness = {
        "inverses": inv,
        "natural": is_natural_family(F, G, dict(iso_family)),
    }
    return G, witness


def unique_transfer(F: OperadFunctor, iso_family: Mapping) -> OperadFunctor:
    """Solve the naturality equation pointwise; the solution is forced."""
    G, witness = transfer_algebra(F, iso_family)
    assert witness["natural"]
    return G
