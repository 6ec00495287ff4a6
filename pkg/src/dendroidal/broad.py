"""Broad relations, broad posets, and the tree/dendroidal-order dictionary.

A broad relation on a carrier relates elements to finite multisets over the
carrier; multisets are stored as sorted tuples.  Trees give broad posets by
relating each vertex output to the multiset of its inputs and closing under
reflexivity and transitivity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .trees import Tree


def multiset(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(items))


@dataclass(frozen=True)
class BroadRelation:
    carrier: frozenset
    relations: frozenset  # pairs (a, multiset)

    def __post_init__(self):
        for a, ms in self.relations:
            if a not in self.carrier or not set(ms) <= set(self.carrier):
                raise ValueError(f"relation ({a}, {ms}) mentions elements off the carrier")

    def holds(self, a: str, ms: Iterable[str]) -> bool:
        return (a, multiset(ms)) in self.relations

    def below(self, a: str) -> list[tuple[str, ...]]:
        """All multisets related to ``a``."""
        return sorted(ms for x, ms in self.relations if x == a)

    def to_json(self) -> dict:
        return {
            "carrier": sorted(self.carrier),
            "relations": sorted([a, list(ms)] for a, ms in self.relations),
        }


def broad_relation(carrier: Iterable[str], relations: Iterable[tuple]) -> BroadRelation:
    return BroadRelation(
        frozenset(carrier), frozenset((a, multiset(ms)) for a, ms in relations)
    )


def broad_relation_from_json(data: Mapping) -> BroadRelation:
    return broad_relation(data["carrier"], [(a, ms) for a, ms in data["relations"]])


class BroadPoset(BroadRelation):
    """A broad relation that passed :func:`check_broad_axioms`."""


def check_broad_axioms(rel: BroadRelation) -> dict:
    """Exhaustively check reflexivity, transitivity and anti-symmetry."""
    reflexive = all(rel.holds(a, (a,)) for a in rel.carrier)

    transitive = True
    for a0, ms in rel.relations:
        if not transitive:
            break
        parts = [rel.below(b) for b in ms]
        for combo in itertools.product(*parts):
            joined = multiset(itertools.chain.from_iterable(combo))
            if not rel.holds(a0, joined):
                transitive = False
                break

    antisymmetric = True
    for a1, ms1 in rel.relations:
        for a2, ms2 in rel.relations:
            if a2 in ms1 and a1 in ms2 and a1 != a2:
                antisymmetric = False
    return {
        "reflexive": reflexive,
        "transitive": transitive,
        "antisymmetric": antisymmetric,
    }


def as_broad_poset(rel: BroadRelation) -> BroadPoset:
    report = check_broad_axioms(rel)
    if not all(report.values()):
        failed = [k for k, v in report.items() if not v]
        raise ValueError(f"not a broad poset; failed: {failed}")
    return BroadPoset(rel.carrier, rel.relations)


def transitive_reflexive_closure(rel: BroadRelation) -> BroadRelation:
    """Fixpoint of the transitivity rule on top of added reflexivity."""
    rels = {(a, multiset((a,))) for a in rel.carrier}
    rels |= set(rel.relations)
    while True:
        new = set()
        for a0, ms in rels:
            below = {}
            for b in set(ms):
                below[b] = [m for x, m in rels if x == b]
            for combo in itertools.product(*(below[b] for b in ms)):
                joined = multiset(itertools.chain.from_iterable(combo))
                cand = (a0, joined)
                if cand not in rels:
                    new.add(cand)
        if not new:
            break
        rels |= new
    return BroadRelation(rel.carrier, frozenset(rels))


def to_broad_poset(tree: Tree) -> BroadPoset:
    """The broad poset on the edges, generated by the vertices."""
    gens = [
        (e0, tree.children(e0))
        for e0 in tree.vertex_edges
    ]
    closed = transitive_reflexive_closure(broad_relation(tree.edges, gens))
    return as_broad_poset(closed)


def is_dendroidally_ordered(poset: BroadPoset) -> bool:
    """Root, successor, and distinctness conditions for a broad poset."""
    elements = sorted(poset.carrier)

    # (1) some root lies below every element (up to an added remainder).
    def is_root(r):
        return all(any(a in ms for ms in poset.below(r)) for a in elements)

    if not any(is_root(r) for r in elements):
        return False

    # (3) no multiset on the right may repeat an element.
    for a0, ms in poset.relations:
        if len(set(ms)) != len(ms):
            return False

    # (2) strictly-above sets are empty or have a generating element s(a).
    for a in elements:
        strictly_above = [ms for ms in poset.below(a) if ms != (a,)]
        if not strictly_above:
            continue
        if not any(
            all(_dominates(poset, s, b) for b in strictly_above) for s in strictly_above
        ):
            return False
    return True


def _dominates(poset: BroadPoset, s: tuple, b: tuple) -> bool:
    """Can ``b`` be split as b_1+..+b_n with s_i <= b_i for each part?"""
    if not s:
        return b == ()
    head, rest = s[0], s[1:]
    items = list(b)
    # Try each sub-multiset of b as the part below head.
    for size in range(len(items) + 1):
        for combo in itertools.combinations(range(len(items)), size):
            part = multiset(items[i] for i in combo)
            if poset.holds(head, part):
                remainder = multiset(items[i] for i in range(len(items)) if i not in combo)
                if _dominates(poset, rest, remainder):
                    return True
    return False
