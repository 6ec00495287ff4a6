"""Small finite categories with explicit composition tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping


@dataclass(eq=False)
class FiniteCategory:
    """Objects, arrow ids, and a total composition table (``g after f``)."""

    objects: tuple
    arrows: tuple
    dom: Mapping
    cod: Mapping
    identities: Mapping  # object -> arrow
    table: Mapping  # (g, f) -> g o f

    def hom(self, a, b) -> tuple:
        return tuple(f for f in self.arrows if self.dom[f] == a and self.cod[f] == b)

    def compose(self, g, f):
        if self.cod[f] != self.dom[g]:
            raise ValueError("composition mismatch")
        return self.table[(g, f)]

    def validate(self) -> None:
        for f in self.arrows:
            assert self.compose(f, self.identities[self.dom[f]]) == f
            assert self.compose(self.identities[self.cod[f]], f) == f
        for f, g, h in itertools.product(self.arrows, repeat=3):
            if self.cod[f] == self.dom[g] and self.cod[g] == self.dom[h]:
                assert self.compose(h, self.compose(g, f)) == self.compose(
                    self.compose(h, g), f
                )

    def inverse(self, f):
        """The two-sided inverse of ``f``, or None."""
        for g in self.hom(self.cod[f], self.dom[f]):
            if (
                self.compose(g, f) == self.identities[self.dom[f]]
                and self.compose(f, g) == self.identities[self.cod[f]]
            ):
                return g
        return None

    def is_iso(self, f) -> bool:
        return self.inverse(f) is not None

    def isos_from(self, a) -> list:
        return [f for f in self.arrows if self.dom[f] == a and self.is_iso(f)]

    def chains(self, n: int) -> list[tuple]:
        """Composable arrow chains of length ``n`` (the nerve in dimension n)."""
        if n == 0:
            return [(a,) for a in self.objects]
        out = []

        def extend(chain, tail_obj, k):
            if k == 0:
                out.append(tuple(chain))
                return
            for f in self.arrows:
                if self.dom[f] == tail_obj:
                    extend(chain + [f], self.cod[f], k - 1)

        for a in self.objects:
            extend([], a, n)
        return out

    def __eq__(self, other):
        if not isinstance(other, FiniteCategory):
            return NotImplemented
        return (
            set(self.objects) == set(other.objects)
            and set(self.arrows) == set(other.arrows)
            and dict(self.dom) == dict(other.dom)
            and dict(self.cod) == dict(other.cod)
            and dict(self.identities) == dict(other.identities)
            and dict(self.table) == dict(other.table)
        )

    def __hash__(self):
        return hash((frozenset(self.objects), frozenset(self.arrows)))


def discrete_category(objects) -> FiniteCategory:
    objs = tuple(objects)
    ids = {a: ("id", a) for a in objs}
    arrows = tuple(ids.values())
    return FiniteCategory(
        objs,
        arrows,
        {f: f[1] for f in arrows},
        {f: f[1] for f in arrows},
        ids,
        {(f, f): f for f in arrows},
    )


def terminal_category() -> FiniteCategory:
    return discrete_category(["*"])


def walking_arrow() -> FiniteCategory:
    """Two objects and a single non-identity arrow 0 -> 1."""
    ids = {0: ("id", 0), 1: ("id", 1)}
    arr = ("f", 0, 1)
    arrows = (ids[0], ids[1], arr)
    dom = {ids[0]: 0, ids[1]: 1, arr: 0}
    cod = {ids[0]: 0, ids[1]: 1, arr: 1}
    table = {}
    for g, f in itertools.product(arrows, repeat=2):
        if cod[f] == dom[g]:
            if g == ids[cod[f]]:
                table[(g, f)] = f
            elif f == ids[dom[g]]:
                table[(g, f)] = g
    return FiniteCategory((0, 1), arrows, dom, cod, ids, table)


def free_iso_category() -> FiniteCategory:
    """The free-living isomorphism 0 <-> 1."""
    ids = {0: ("id", 0), 1: ("id", 1)}
    up, down = ("f", 0, 1), ("g", 1, 0)
    arrows = (ids[0], ids[1], up, down)
    dom = {ids[0]: 0, ids[1]: 1, up: 0, down: 1}
    cod = {ids[0]: 0, ids[1]: 1, up: 1, down: 0}
    table = {}
    for g, f in itertools.product(arrows, repeat=2):
        if cod[f] != dom[g]:
            continue
        if f == ids[dom[g]]:
            table[(g, f)] = g
        elif g == ids[cod[f]]:
            table[(g, f)] = f
        else:
            table[(g, f)] = ids[dom[f]]
    return FiniteCategory((0, 1), arrows, dom, cod, ids, table)


def group_as_category(elements, multiply, unit) -> FiniteCategory:
    """A one-object groupoid from a finite group's multiplication."""
    arrows = tuple(("g", x) for x in elements)
    table = {
        (("g", a), ("g", b)): ("g", multiply(a, b)) for a in elements for b in elements
    }
    return FiniteCategory(
        ("*",),
        arrows,
        {f: "*" for f in arrows},
        {f: "*" for f in arrows},
        {"*": ("g", unit)},
        table,
    )


def is_isofibration_of_categories(
    F_obj: Mapping, F_arr: Mapping, src: FiniteCategory, tgt: FiniteCategory
) -> bool:
    """Lifting of isomorphisms: every iso out of an image object lifts."""
    for p in src.objects:
        for f in tgt.isos_from(F_obj[p]):
            lifted = any(
                F_arr[g] == f for g in src.isos_from(p)
            )
            if not lifted:
                return False
    return True
