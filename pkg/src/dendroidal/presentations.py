"""Operad presentations, term rewriting, and bounded tabulation.

Terms of a free symmetric operad are planar labeled trees together with a
listing that assigns each domain slot to a planar leaf; all symmetric-group
twisting lives in that single listing.  Relations are pairs of equal-arity
terms whose slots correspond positionally.  Word problems are attacked by
congruence closure over a bounded term space: rules are applied at the root
of every stored term and the closure is completed by signature hashing, so
derivations may reuse already-merged subterm classes instead of replaying
them inside every context.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .operads import FiniteOperad, grid_transpose, perm_inverse, table_operad

SLOT = "_"


def tree_size(tree) -> int:
    if tree == SLOT:
        return 0
    return 1 + sum(tree_size(c) for c in tree[2])


def tree_slots(tree) -> int:
    if tree == SLOT:
        return 1
    return sum(tree_slots(c) for c in tree[2])


@dataclass(frozen=True)
class Term:
    """A planar labeled tree plus the slot-to-planar-leaf listing."""

    tree: object
    listing: tuple

    def __post_init__(self):
        if sorted(self.listing) != list(range(tree_slots(self.tree))):
            raise ValueError("listing must be a permutation of the planar leaves")

    @property
    def arity(self) -> int:
        return len(self.listing)

    @property
    def size(self) -> int:
        return tree_size(self.tree)

    def sort_key(self):
        return (self.size, repr(self.tree), self.listing)

    def __repr__(self):
        return f"Term({self.tree!r}, {self.listing!r})"


def identity_term() -> Term:
    return Term(SLOT, (0,))


def generator_term(name, arity: int) -> Term:
    return Term(("v", name, (SLOT,) * arity), tuple(range(arity)))


def act_term(perm: tuple, t: Term) -> Term:
    return Term(t.tree, tuple(t.listing[p] for p in perm))


def compose_term(t: Term, args: list[Term]) -> Term:
    """Full operadic composition: graft ``args[s]`` into slot ``s`` of ``t``."""
    if len(args) != t.arity:
        raise ValueError("argument count mismatch")
    inv = perm_inverse(t.listing)  # planar leaf -> slot of t

    counter = itertools.count()

    def graft(tree):
        if tree == SLOT:
            return args[inv[next(counter)]].tree
        return ("v", tree[1], tuple(graft(c) for c in tree[2]))

    new_tree = graft(t.tree)
    # Planar offsets: leaf j of t opens a block of size arity(args[inv[j]]).
    sizes = [args[inv[j]].arity for j in range(t.arity)]
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    listing = []
    for s in range(t.arity):
        j = t.listing[s]
        base = offsets[j]
        listing.extend(base + p for p in args[s].listing)
    return Term(new_tree, tuple(listing))


def subterm_blocks(t: Term, pattern_tree) -> tuple[list[Term], tuple] | None:
    """Match ``pattern_tree`` at the root of ``t``.

    On success returns the bound sub-terms (ordered by the pattern's planar
    leaves, listings normalized by the global slot order) and the
    recombination permutation ``rho`` with
    ``t == act(rho, compose(pattern-with-identity-listing, blocks))``.
    """
    bound: list = []

    def match(pat, sub) -> bool:
        if pat == SLOT:
            bound.append(sub)
            return True
        if sub == SLOT or pat[1] != sub[1] or len(pat[2]) != len(sub[2]):
            return False
        return all(match(p, s) for p, s in zip(pat[2], sub[2]))

    if not match(pattern_tree, t.tree):
        return None
    sizes = [tree_slots(b) for b in bound]
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)

    def block_of(p):
        for j in range(len(bound)):
            if offsets[j] <= p < offsets[j + 1]:
                return j
        raise AssertionError

    local: dict[int, list[int]] = {j: [] for j in range(len(bound))}
    for s in range(t.arity):
        p = t.listing[s]
        j = block_of(p)
        local[j].append(p - offsets[j])
    blocks = [Term(bound[j], tuple(local[j])) for j in range(len(bound))]

    ident = Term(pattern_tree, tuple(range(len(bound))))
    composed = compose_term(ident, blocks)
    inv = perm_inverse(composed.listing)
    rho = tuple(inv[p] for p in t.listing)
    return blocks, rho


def rewrite_root(t: Term, lhs: Term, rhs: Term) -> Term | None:
    """Apply the rule ``lhs = rhs`` at the root of ``t``, if it matches.

    Matching gives ``t == act(rho, P o blocks)`` for the identity-listing
    pattern ``P == act(inv(lhs.listing), lhs)``; since the rule equates the
    operations, ``P`` also equals ``act(inv(lhs.listing), rhs)``, which is
    what gets substituted.
    """
    hit = subterm_blocks(t, lhs.tree)
    if hit is None:
        return None
    blocks, rho = hit
    corrected = act_term(perm_inverse(lhs.listing), rhs)
    return act_term(rho, compose_term(corrected, list(blocks)))


def decompose(t: Term) -> tuple | None:
    """Root decomposition ``(label, child terms, rho)``; None for a bare slot."""
    if t.tree == SLOT:
        return None
    pattern = ("v", t.tree[1], tuple(SLOT for _ in t.tree[2]))
    blocks, rho = subterm_blocks(t, pattern)
    return (t.tree[1], tuple(blocks), rho)


# ---------------------------------------------------------------------------
# Presentations


@dataclass(frozen=True)
class OperadPresentation:
    """Colors, typed generators, and relations between terms."""

    colors: tuple
    generators: Mapping  # name -> (dom colors, cod color)
    relations: tuple  # pairs (Term, Term)
    planar: bool = False

    def __post_init__(self):
        names = list(self.generators)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        for lhs, rhs in self.relations:
            pl, pr = self.term_profile(lhs), self.term_profile(rhs)
            if pl is not None and pr is not None and pl != pr:
                raise ValueError(f"relation sides have different profiles: {lhs} = {rhs}")

    def __hash__(self):
        return hash(
            (
                self.colors,
                tuple(sorted(self.generators.items(), key=repr)),
                self.relations,
                self.planar,
            )
        )

    def __eq__(self, other):
        if not isinstance(other, OperadPresentation):
            return NotImplemented
        return (
            self.colors == other.colors
            and dict(self.generators) == dict(other.generators)
            and set(self.relations) == set(other.relations)
            and self.planar == other.planar
        )

    def planar_slot_colors(self, tree, cod) -> tuple | None:
        """Colors of the planar leaves, or None on a color clash."""
        out = []

        def walk(node, color):
            if node == SLOT:
                out.append(color)
                return True
            dom, gcod = self.generators[node[1]]
            if gcod != color or len(dom) != len(node[2]):
                return False
            return all(walk(c, col) for c, col in zip(node[2], dom))

        return tuple(out) if walk(tree, cod) else None

    def term_profile(self, t: Term) -> tuple | None:
        """(dom colors, cod) of a term, or None when it is a bare slot."""
        if t.tree == SLOT:
            return None
        cod = self.generators[t.tree[1]][1]
        planar = self.planar_slot_colors(t.tree, cod)
        if planar is None:
            raise ValueError(f"term is not color-consistent: {t}")
        return (tuple(planar[t.listing[s]] for s in range(t.arity)), cod)

    def relation_profile(self, lhs: Term, rhs: Term, ambient_color=None):
        p = self.term_profile(lhs) or self.term_profile(rhs)
        if p is None:
            p = ((ambient_color,), ambient_color)
        return p


def free_presentation(colors, generators, planar: bool = False) -> OperadPresentation:
    return OperadPresentation(tuple(colors), dict(generators), (), planar)


def associative_presentation() -> OperadPresentation:
    """One color, a binary multiplication with two-sided unit, associativity."""
    m, e = generator_term("m", 2), generator_term("e", 0)
    x, dummy = identity_term(), None
    assoc_l = compose_term(m, [compose_term(m, [x, x]), x])
    assoc_r = compose_term(m, [x, compose_term(m, [x, x])])
    unit_l = compose_term(m, [e, x])
    unit_r = compose_term(m, [x, e])
    return OperadPresentation(
        ("*",),
        {"m": (("*", "*"), "*"), "e": ((), "*")},
        ((assoc_l, assoc_r), (unit_l, x), (unit_r, x)),
    )


def commutative_presentation() -> OperadPresentation:
    base = associative_presentation()
    m = generator_term("m", 2)
    return OperadPresentation(
        base.colors,
        dict(base.generators),
        base.relations + ((m, act_term((1, 0), m)),),
    )


def tensor_generator(side: str, payload, color) -> tuple:
    """Label of a tensor generator: a P-generator at a Q-color or dually."""
    return (side, payload, color)


def _relabel(tree, rename):
    if tree == SLOT:
        return SLOT
    return ("v", rename(tree[1]), tuple(_relabel(c, rename) for c in tree[2]))


def bv_tensor_presentation(
    P: OperadPresentation, Q: OperadPresentation
) -> OperadPresentation:
    """Tensor-product presentation on the product color set.

    Generators are each P-generator at each Q-color and dually.  Relations:
    the P-relations at each Q-color, the Q-relations at each P-color, and
    one interchange relation per generator pair, twisted by the explicit
    grid-transpose permutation equating the two composite domains.
    """
    if P.planar or Q.planar:
        raise ValueError("the tensor product needs symmetric presentations")
    colors = tuple((p, q) for p in P.colors for q in Q.colors)
    generators: dict = {}
    for g, (dom, cod) in P.generators.items():
        for q in Q.colors:
            generators[("L", g, q)] = (tuple((d, q) for d in dom), (cod, q))
    for h, (dom, cod) in Q.generators.items():
        for p in P.colors:
            generators[("R", p, h)] = (tuple((p, d) for d in dom), (p, cod))

    relations = []
    for lhs, rhs in P.relations:
        for q in Q.colors:
            ren = lambda g, q=q: ("L", g, q)
            relations.append(
                (Term(_relabel(lhs.tree, ren), lhs.listing), Term(_relabel(rhs.tree, ren), rhs.listing))
            )
    for lhs, rhs in Q.relations:
        for p in P.colors:
            ren = lambda h, p=p: ("R", p, h)
            relations.append(
                (Term(_relabel(lhs.tree, ren), lhs.listing), Term(_relabel(rhs.tree, ren), rhs.listing))
            )
    for g, (gdom, gcod) in P.generators.items():
        for h, (hdom, hcod) in Q.generators.items():
            n, m = len(gdom), len(hdom)
            top = generator_term(("L", g, hcod), n)
            lhs = compose_term(
                top, [generator_term(("R", d, h), m) for d in gdom]
            )
            bottom = generator_term(("R", gcod, h), m)
            rhs = compose_term(
                bottom, [generator_term(("L", g, d), n) for d in hdom]
            )
            relations.append((lhs, act_term(grid_transpose(n, m), rhs)))
    return OperadPresentation(colors, generators, tuple(relations))


# ---------------------------------------------------------------------------
# Bounded term spaces and congruence closure


@dataclass
class TermSpace:
    """All color-consistent terms within size and arity bounds, plus closure.

    Entries are (cod color, term) pairs: a bare slot term exists once per
    color, and every other term determines its colors from its root label.
    """

    pres: OperadPresentation
    max_size: int
    max_arity: int
    entries: list = field(default_factory=list)  # (cod, term)
    index: dict = field(default_factory=dict)  # (cod, term) -> position
    profiles: dict = field(default_factory=dict)  # position -> (dom, cod)
    parent: list = field(default_factory=list)  # union-find
    escaped: bool = False

    def __post_init__(self):
        for cod in self.pres.colors:
            for tree, planar_colors in _trees_by_cod(
                self.pres, cod, self.max_size, self.max_arity
            ):
                n = len(planar_colors)
                listings = (
                    [tuple(range(n))]
                    if self.pres.planar
                    else itertools.permutations(range(n))
                )
                for listing in listings:
                    t = Term(tree, tuple(listing))
                    key = (cod, t)
                    if key not in self.index:
                        self.index[key] = len(self.entries)
                        self.entries.append(key)
                        dom = tuple(planar_colors[p] for p in listing)
                        self.profiles[len(self.entries) - 1] = (dom, cod)
        self.parent = list(range(len(self.entries)))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        self.parent[max(ri, rj)] = min(ri, rj)
        return True

    def close(self) -> None:
        """Root rule applications once, then congruence passes to fixpoint."""
        rules = []
        for lhs, rhs in self.pres.relations:
            if lhs.tree == SLOT and rhs.tree == SLOT:
                continue
            profile = self.pres.relation_profile(lhs, rhs)
            rules.append((lhs, rhs, profile[1]))
            rules.append((rhs, lhs, profile[1]))
        for i, (cod, t) in enumerate(self.entries):
            for lhs, rhs, rule_cod in rules:
                if lhs.tree == SLOT and cod != rule_cod:
                    continue
                out = rewrite_root(t, lhs, rhs)
                if out is None:
                    continue
                j = self.index.get((cod, out))
                if j is None:
                    self.escaped = True
                else:
                    self.union(i, j)
        decos = []
        for cod, t in self.entries:
            deco = decompose(t)
            if deco is None:
                decos.append(None)
            else:
                label, blocks, rho = deco
                child_cods = [self._child_cod(label, k) for k in range(len(blocks))]
                decos.append(
                    (label, tuple(zip(child_cods, blocks)), rho)
                )
        while True:
            changed = False
            signatures: dict = {}
            for i, deco in enumerate(decos):
                if deco is None:
                    continue
                label, keyed_blocks, rho = deco
                sig = (
                    label,
                    tuple(self.find(self.index[kb]) for kb in keyed_blocks),
                    rho,
                )
                j = signatures.setdefault(sig, i)
                if j != i:
                    changed |= self.union(i, j)
            if not changed:
                break

    def _child_cod(self, label, planar_leaf: int):
        return self.pres.generators[label][0][planar_leaf]

    def class_of(self, cod, t: Term) -> int | None:
        i = self.index.get((cod, t))
        return None if i is None else self.find(i)

    def classes(self) -> dict:
        """class root -> member positions."""
        out: dict = {}
        for i in range(len(self.entries)):
            out.setdefault(self.find(i), []).append(i)
        return out


@lru_cache(maxsize=8)
def closed_space(pres: OperadPresentation, max_size: int, max_arity: int) -> TermSpace:
    """A term space with its closure already run; cached, treat as read-only."""
    space = TermSpace(pres, max_size, max_arity)
    space.close()
    return space


@lru_cache(maxsize=None)
def _trees_by_cod(pres: OperadPresentation, cod, max_size: int, max_arity: int):
    """Term trees with the given root color; (tree, planar slot colors)."""
    out = [(SLOT, (cod,))]
    if max_size <= 0:
        return tuple(out)
    for g, (dom, gcod) in sorted(pres.generators.items(), key=repr):
        if gcod != cod:
            continue
        child_lists = [((), ())]
        for color in dom:
            grown = []
            for trees, colors in child_lists:
                used = sum(tree_size(t) for t in trees)
                for sub, sub_colors in _trees_by_cod(
                    pres, color, max_size - 1 - used, max_arity
                ):
                    if len(colors) + len(sub_colors) > max_arity:
                        continue
                    grown.append((trees + (sub,), colors + sub_colors))
            child_lists = grown
        for trees, colors in child_lists:
            tree = ("v", g, trees)
            if tree_size(tree) <= max_size and len(colors) <= max_arity:
                out.append((tree, colors))
    return tuple(out)


# ---------------------------------------------------------------------------
# Tabulation and word problems


@dataclass(frozen=True)
class Unknown:
    """Verdict for budget-limited questions; never silently wrong."""

    reason: str

    def __bool__(self):
        return False


def tabulate(
    pres: OperadPresentation,
    arity_bound: int,
    term_size_bound: int,
    closure_size_bound: int | None = None,
):
    """Hom tables from rewriting-closure classes of bounded terms.

    Hom-sets collect the closure classes holding a term of size at most
    ``term_size_bound``; the closure itself may travel through terms up to
    ``closure_size_bound`` (default ``term_size_bound + 3``).  Returns
    :class:`Unknown` when a composition or action escapes the closed space,
    instead of guessing.
    """
    closure_size = closure_size_bound or term_size_bound + 3
    space = closed_space(pres, closure_size, arity_bound)

    reps: dict = {}  # class root -> representative (cod, term)
    for root, members in space.classes().items():
        small = [
            space.entries[i]
            for i in members
            if space.entries[i][1].size <= term_size_bound
        ]
        if small:
            reps[root] = min(small, key=lambda e: e[1].sort_key())

    hom: dict = {}
    op_of_root: dict = {}
    for root, (cod, rep) in reps.items():
        dom, _ = space.profiles[space.index[(cod, rep)]]
        op = ("cls", dom, cod, rep)
        op_of_root[root] = op
        hom.setdefault((dom, cod), []).append(op)
    for key in hom:
        hom[key] = tuple(sorted(hom[key], key=lambda op: op[3].sort_key()))

    def class_op(cod, term: Term):
        root = space.class_of(cod, term)
        if root is None or root not in op_of_root:
            return None
        return op_of_root[root]

    compose_table: dict = {}
    sigma_table: dict = {}
    for ops in hom.values():
        for op in ops:
            cod, rep = op[2], op[3]
            for perm in itertools.permutations(range(rep.arity)):
                moved = class_op(cod, act_term(perm, rep))
                if moved is None:
                    return Unknown("BudgetExceeded: action left the closed term space")
                sigma_table[(perm, op)] = moved
    for (dom, cod), ops in hom.items():
        for op in ops:
            for slot, color in enumerate(dom):
                for key2, ops2 in hom.items():
                    if key2[1] != color or len(dom) + len(key2[0]) - 1 > arity_bound:
                        continue
                    for op2 in ops2:
                        args = [identity_term()] * len(dom)
                        args[slot] = op2[3]
                        comp = class_op(cod, compose_term(op[3], args))
                        if comp is None:
                            return Unknown(
                                "BudgetExceeded: composite left the closed term space"
                            )
                        compose_table[(op, slot, op2)] = comp

    identities = {}
    for c in pres.colors:
        identities[c] = class_op(c, identity_term())
        if identities[c] is None:
            return Unknown("BudgetExceeded: identity class missing from the table")

    operad = table_operad(
        pres.colors,
        {k: tuple(v) for k, v in hom.items()},
        compose_table,
        sigma_table,
        identities,
        label="tabulated",
        arity_bound=arity_bound,
        presentation=pres,
    )
    operad.term_of = lambda op: op[3]
    return operad


def _jsonable(v):
    """Tuples become lists; anything exotic is shown by its repr."""
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return repr(v)


def term_to_json(t: Term) -> dict:
    def enc(tree):
        if tree == SLOT:
            return "slot"
        return {"gen": _jsonable(tree[1]), "children": [enc(c) for c in tree[2]]}

    return {"tree": enc(t.tree), "listing": list(t.listing)}


def term_from_json(data: Mapping) -> Term:
    def dec(node):
        if node == "slot":
            return SLOT
        name = node["gen"]
        if isinstance(name, list):
            name = tuple(name)
        return ("v", name, tuple(dec(c) for c in node["children"]))

    return Term(dec(data["tree"]), tuple(data["listing"]))


def presentation_to_json(pres: OperadPresentation) -> dict:
    return {
        "colors": [_jsonable(c) for c in pres.colors],
        "generators": [
            {
                "name": _jsonable(name),
                "dom": [_jsonable(c) for c in dom],
                "cod": _jsonable(cod),
            }
            for name, (dom, cod) in pres.generators.items()
        ],
        "relations": [
            [term_to_json(lhs), term_to_json(rhs)] for lhs, rhs in pres.relations
        ],
        "planar": pres.planar,
    }


def presentation_from_json(data: Mapping) -> OperadPresentation:
    def dec(v):
        return tuple(dec(x) for x in v) if isinstance(v, list) else v

    generators = {
        dec(g["name"]): (tuple(dec(c) for c in g["dom"]), dec(g["cod"]))
        for g in data["generators"]
    }
    relations = tuple(
        (term_from_json(l), term_from_json(r)) for l, r in data.get("relations", [])
    )
    return OperadPresentation(
        tuple(dec(c) for c in data["colors"]),
        generators,
        relations,
        bool(data.get("planar", False)),
    )


def evaluate_term(pres: OperadPresentation, Q, color_map, gen_images, term: Term, cod=None):
    """Evaluate a term in a target operad through generator images.

    ``cod`` is only needed for bare slot terms, whose color is ambient.
    """

    def ev(tree, color):
        if tree == SLOT:
            return Q.identity(color_map[color])
        dom, _ = pres.generators[tree[1]]
        img = gen_images[tree[1]]
        args = [ev(c, col) for c, col in zip(tree[2], dom)]
        return Q.compose(img, args)

    if term.tree == SLOT:
        if cod is None:
            raise ValueError("a bare slot term needs its ambient color")
        return Q.identity(color_map[cod])
    root_cod = pres.generators[term.tree[1]][1]
    return Q.act(term.listing, ev(term.tree, root_cod))


def terms_equal(
    pres: OperadPresentation,
    t1: Term,
    t2: Term,
    size_budget: int | None = None,
    arity_budget: int | None = None,
) -> str:
    """Three-valued word problem: ``"yes"``, ``"no"`` or ``"unknown"``.

    ``yes`` when the bounded closure joins the terms.  ``no`` only when the
    whole bounded space is saturated (no rewrite escaped it), so the classes
    are exact.  ``unknown`` otherwise.
    """
    p1 = pres.term_profile(t1)
    p2 = pres.term_profile(t2)
    if p1 is not None and p2 is not None and p1 != p2:
        raise ValueError("terms are not profile-compatible")
    for bare, other in ((p1, p2), (p2, p1)):
        if bare is None and other is not None and other != ((other[1],), other[1]):
            raise ValueError("a bare slot term is only compatible with unary profiles")
    if t1 == t2 and p1 == p2:
        return "yes"
    budget = size_budget or (max(t1.size, t2.size) + 4)
    cod = (p1 or p2 or ((), pres.colors[0]))[1]
    arity = max(t1.arity, t2.arity, arity_budget or 0)
    space = closed_space(pres, budget, arity)
    c1, c2 = space.class_of(cod, t1), space.class_of(cod, t2)
    if c1 is None or c2 is None:
        return "unknown"
    if c1 == c2:
        return "yes"
    return "unknown" if space.escaped else "no"
