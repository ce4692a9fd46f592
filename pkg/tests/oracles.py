"""Independent brute-force reference implementations for the test suite.

Everything here works on raw (events, relations) data and recomputes
order-theoretic notions from first principles, so test expectations never
lean on the code under test.  Tests build a CausalSet and an OraclePoset
from the same primitive data and compare behaviors.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field


@dataclass
class OraclePoset:
    events: tuple[str, ...]
    strict: frozenset[tuple[str, str]]  # transitively closed, irreflexive

    @classmethod
    def build(cls, events, relations) -> "OraclePoset":
        closed = set(map(tuple, relations))
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(closed), repeat=2):
                if b == c and (a, d) not in closed:
                    closed.add((a, d))
                    changed = True
        if any(a == b for a, b in closed):
            raise ValueError("cyclic input")
        return cls(tuple(sorted(events)), frozenset(closed))

    def le(self, x: str, y: str) -> bool:
        return x == y or (x, y) in self.strict


def brute_past(P: OraclePoset, subset: set[str]) -> set[str]:
    return {x for x in P.events if any(P.le(x, a) for a in subset)}


def brute_future(P: OraclePoset, subset: set[str]) -> set[str]:
    return {x for x in P.events if any(P.le(a, x) for a in subset)}


def brute_strict_past(P: OraclePoset, subset: set[str]) -> set[str]:
    return {x for x in P.events if any(P.le(x, a) and x != a for a in subset)}


def brute_strict_future(P: OraclePoset, subset: set[str]) -> set[str]:
    return {x for x in P.events if any(P.le(a, x) and x != a for a in subset)}


def brute_convex(P: OraclePoset, subset: set[str]) -> bool:
    for x, z in itertools.product(subset, repeat=2):
        for y in P.events:
            if P.le(x, y) and P.le(y, z) and y not in subset:
                return False
    return True


def brute_hull(P: OraclePoset, subset: set[str]) -> set[str]:
    return brute_past(P, subset) & brute_future(P, subset)


def brute_is_antichain(P: OraclePoset, subset: set[str]) -> bool:
    return not any(
        P.le(a, b) and a != b for a, b in itertools.permutations(subset, 2)
    )


def all_maximal_chains(P: OraclePoset) -> list[tuple[str, ...]]:
    chains: list[tuple[str, ...]] = []

    def is_cover(a: str, b: str) -> bool:
        if not (P.le(a, b) and a != b):
            return False
        return not any(
            P.le(a, m) and P.le(m, b) and m not in (a, b) for m in P.events
        )

    minima = [e for e in P.events if not any(P.le(o, e) and o != e for o in P.events)]

    def grow(chain: list[str]) -> None:
        nexts = [e for e in P.events if is_cover(chain[-1], e)]
        if not nexts:
            chains.append(tuple(chain))
            return
        for e in nexts:
            grow(chain + [e])

    for m in minima:
        grow([m])
    return chains


def brute_is_cauchy(P: OraclePoset, subset: set[str]) -> bool:
    if not brute_is_antichain(P, subset):
        return False
    if len(P.events) == 0:
        return not subset
    if not subset:
        return False
    return all(set(chain) & subset for chain in all_maximal_chains(P))


def all_antichains(P: OraclePoset) -> list[frozenset[str]]:
    out = []
    for k in range(len(P.events) + 1):
        for combo in itertools.combinations(P.events, k):
            if brute_is_antichain(P, set(combo)):
                out.append(frozenset(combo))
    return out


def sub_oracle(P: OraclePoset, members: set[str]) -> OraclePoset:
    strict = frozenset((a, b) for a, b in P.strict if a in members and b in members)
    return OraclePoset(tuple(sorted(members)), strict)


def brute_embeddings(dom: OraclePoset, cod: OraclePoset) -> list[dict[str, str]]:
    """All injections preserving and reflecting order, with convex image."""
    out = []
    for images in itertools.permutations(cod.events, len(dom.events)):
        table = dict(zip(dom.events, images))
        if all(
            dom.le(a, b) == cod.le(table[a], table[b])
            for a, b in itertools.product(dom.events, repeat=2)
        ) and brute_convex(cod, set(images)):
            out.append(table)
    return out


def random_poset_data(
    rng: random.Random, n_events: int, edge_bias: float = 0.3
) -> tuple[list[str], list[tuple[str, str]]]:
    """Raw data for a random strict poset on n_events labeled events.

    Events are topologically labeled, so drawing i < j edges keeps the
    relation acyclic by construction.
    """
    names = [f"e{i}" for i in range(n_events)]
    relations = [
        (names[i], names[j])
        for i in range(n_events)
        for j in range(i + 1, n_events)
        if rng.random() < edge_bias
    ]
    return names, relations


def random_subset(rng: random.Random, events, p: float = 0.5) -> set[str]:
    return {e for e in events if rng.random() < p}


def poset_isomorphic(A: OraclePoset, B: OraclePoset) -> bool:
    if len(A.events) != len(B.events):
        return False
    for images in itertools.permutations(B.events):
        table = dict(zip(A.events, images))
        if all(
            A.le(x, y) == B.le(table[x], table[y])
            for x, y in itertools.product(A.events, repeat=2)
        ):
            return True
    return False
