"""Finite causal sets and the order-theoretic kernel built on them.

A causal set here is a finite strict poset of named events.  The strict
relation plays the role of chronology (``I``-style operators) and its
reflexive closure the role of causality (``J``-style operators); all the
region calculus of the package (convexity, hulls, Cauchy antichains,
Cauchy embeddings, disjointness, gluing) reduces to reachability over it.

Events are opaque strings.  Lexicographic order is used only to make
serialization and quotient naming deterministic, never as causal data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import GluingCycle, NonConvexCocone

__all__ = [
    "CausalSet",
    "MonotoneMap",
    "CausalEmbedding",
    "GluingResult",
    "causal_past",
    "causal_future",
    "chronological_past",
    "chronological_future",
    "is_causally_convex",
    "convex_hull",
    "is_antichain",
    "is_cauchy_antichain",
    "is_cauchy_embedding",
    "are_causally_disjoint",
    "max_antichain",
    "glue_pushout",
]


class CausalSet:
    """A finite set of events with an irreflexive transitive order.

    Instances are immutable values: two causal sets are equal when they
    have the same events and the same order.
    """

    __slots__ = ("events", "_index", "_up", "_down", "__dict__")

    def __init__(self, events: Iterable[str], relations: Iterable[tuple[str, str]] = ()):
        evs = tuple(sorted(events))
        if len(set(evs)) != len(evs):
            raise ValueError("duplicate event names")
        for e in evs:
            if not isinstance(e, str) or not e:
                raise ValueError(f"event names must be nonempty strings, got {e!r}")
        index = {e: i for i, e in enumerate(evs)}
        n = len(evs)
        succ = [0] * n
        for a, b in relations:
            if a not in index or b not in index:
                raise ValueError(f"relation ({a!r}, {b!r}) mentions unknown events")
            if a == b:
                raise ValueError(f"reflexive relation on {a!r}")
            succ[index[a]] |= 1 << index[b]
        self.events = evs
        self._index = index
        self._up = self._close(succ)
        down = [1 << i for i in range(n)]
        for i in range(n):
            for j in self._bits(self._up[i]):
                if j != i:
                    down[j] |= 1 << i
        self._down = tuple(down)

    @staticmethod
    def _bits(mask: int) -> Iterator[int]:
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def _close(self, succ: list[int]) -> tuple[int, ...]:
        # Reflexive-transitive closure in reverse topological order; a
        # leftover in Kahn's algorithm is a causal cycle.
        n = len(succ)
        indeg = [0] * n
        for i in range(n):
            for j in self._bits(succ[i]):
                indeg[j] += 1
        queue = [i for i in range(n) if indeg[i] == 0]
        order = []
        while queue:
            i = queue.pop()
            order.append(i)
            for j in self._bits(succ[i]):
                indeg[j] -= 1
                if indeg[j] == 0:
                    queue.append(j)
        if len(order) != n:
            cyclic = sorted(self.events[i] for i in range(n) if indeg[i] > 0)
            raise ValueError(f"causal cycle among events {cyclic}")
        up = [0] * n
        for i in reversed(order):
            acc = 1 << i
            for j in self._bits(succ[i]):
                acc |= up[j]
            up[i] = acc
        return tuple(up)

    # ---- comparisons ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[str]:
        return iter(self.events)

    def __contains__(self, event: object) -> bool:
        return event in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalSet):
            return NotImplemented
        return self.events == other.events and self._up == other._up

    def __hash__(self) -> int:
        # hashed constantly as part of composite keys, so cache aggressively
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.events, self._up))
            self.__dict__["_hash"] = h
        return h

    def __repr__(self) -> str:
        return f"CausalSet({list(self.events)!r}, covers={sorted(self.covers)!r})"

    # ---- order queries ---------------------------------------------------

    def le(self, a: str, b: str) -> bool:
        """Causal precedence, reflexive."""
        return bool(self._up[self._idx(a)] & (1 << self._idx(b)))

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.le(a, b)

    def comparable(self, a: str, b: str) -> bool:
        return self.le(a, b) or self.le(b, a)

    def _idx(self, event: str) -> int:
        try:
            return self._index[event]
        except KeyError:
            raise ValueError(f"event {event!r} not in this causal set") from None

    def _mask(self, members: Iterable[str]) -> int:
        mask = 0
        for e in members:
            mask |= 1 << self._idx(e)
        return mask

    def _events_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.events[i] for i in self._bits(mask))

    @cached_property
    def covers(self) -> frozenset[tuple[str, str]]:
        """Transitive reduction as (lower, upper) pairs."""
        out = set()
        n = len(self.events)
        for i in range(n):
            strict = self._up[i] & ~(1 << i)
            for j in self._bits(strict):
                between = strict & (self._down[j] & ~(1 << j))
                if between == 0:
                    out.add((self.events[i], self.events[j]))
        return frozenset(out)

    @cached_property
    def maximal_events(self) -> frozenset[str]:
        return frozenset(
            e for i, e in enumerate(self.events) if self._up[i] == 1 << i
        )

    @cached_property
    def minimal_events(self) -> frozenset[str]:
        return frozenset(
            e for i, e in enumerate(self.events) if self._down[i] == 1 << i
        )

    # ---- derived structure ------------------------------------------------

    def induced(self, members: Iterable[str]) -> "CausalSet":
        """Sub-poset on ``members`` with the restricted order."""
        members = frozenset(members)
        mask = self._mask(members)
        rels = [
            (a, b)
            for a in members
            for b in self._events_of(self._up[self._idx(a)] & mask)
            if a != b
        ]
        return CausalSet(members, rels)

    def relabel(self, mapping: dict[str, str]) -> "CausalSet":
        if sorted(mapping) != list(self.events):
            raise ValueError("relabeling must cover exactly the events")
        rels = [(mapping[a], mapping[b]) for a, b in self.covers]
        return CausalSet(mapping.values(), rels)

    def maximal_chains(self) -> Iterator[tuple[str, ...]]:
        """All inclusion-maximal chains, as cover paths from minima to maxima."""
        if not self.events:
            return
        up_covers: dict[str, list[str]] = {e: [] for e in self.events}
        for a, b in sorted(self.covers):
            up_covers[a].append(b)

        def walk(prefix: list[str]) -> Iterator[tuple[str, ...]]:
            succs = up_covers[prefix[-1]]
            if not succs:
                yield tuple(prefix)
                return
            for nxt in succs:
                prefix.append(nxt)
                yield from walk(prefix)
                prefix.pop()

        for start in sorted(self.minimal_events):
            yield from walk([start])

    def antichains(self, within: Iterable[str] | None = None) -> Iterator[frozenset[str]]:
        """All antichains (including the empty one), optionally inside a subset."""
        pool = sorted(within) if within is not None else list(self.events)
        for e in pool:
            self._idx(e)

        def extend(chosen: list[str], rest: list[str]) -> Iterator[frozenset[str]]:
            yield frozenset(chosen)
            for k, e in enumerate(rest):
                if all(not self.comparable(e, c) for c in chosen):
                    chosen.append(e)
                    yield from extend(chosen, rest[k + 1 :])
                    chosen.pop()

        yield from extend([], pool)


# ---- region operators ------------------------------------------------------


def _check_members(M: CausalSet, members: Iterable[str]) -> frozenset[str]:
    out = frozenset(members)
    for e in out:
        if e not in M:
            raise ValueError(f"event {e!r} is not an event of the causal set")
    return out


def causal_future(M: CausalSet, members: Iterable[str]) -> frozenset[str]:
    """Reflexive future J+: everything at or after some member."""
    members = _check_members(M, members)
    mask = 0
    for e in members:
        mask |= M._up[M._idx(e)]
    return M._events_of(mask)


def causal_past(M: CausalSet, members: Iterable[str]) -> frozenset[str]:
    """Reflexive past J-."""
    members = _check_members(M, members)
    mask = 0
    for e in members:
        mask |= M._down[M._idx(e)]
    return M._events_of(mask)


def chronological_future(M: CausalSet, members: Iterable[str]) -> frozenset[str]:
    """Strict future I+: everything strictly after some member."""
    members = _check_members(M, members)
    mask = 0
    for e in members:
        i = M._idx(e)
        mask |= M._up[i] & ~(1 << i)
    return M._events_of(mask)


def chronological_past(M: CausalSet, members: Iterable[str]) -> frozenset[str]:
    """Strict past I-."""
    members = _check_members(M, members)
    mask = 0
    for e in members:
        i = M._idx(e)
        mask |= M._down[i] & ~(1 << i)
    return M._events_of(mask)


def convex_hull(M: CausalSet, members: Iterable[str]) -> frozenset[str]:
    """Least causally convex superset: J+(A) intersected with J-(A)."""
    members = _check_members(M, members)
    return causal_future(M, members) & causal_past(M, members)


def is_causally_convex(M: CausalSet, members: Iterable[str]) -> bool:
    """Interval-closed: contains everything between two of its events."""
    members = _check_members(M, members)
    return convex_hull(M, members) == members


def is_antichain(M: CausalSet, members: Iterable[str]) -> bool:
    members = sorted(_check_members(M, members))
    return all(
        not M.comparable(a, b) for a, b in itertools.combinations(members, 2)
    )


def is_cauchy_antichain(M: CausalSet, members: Iterable[str]) -> bool:
    """Antichain met by every maximal chain.

    Decided as a cut condition on the cover digraph: the antichain is
    Cauchy iff no cover path from a minimal to a maximal event avoids it.
    Isolated events are one-event chains, so each must itself be a member
    unless it lies in the antichain's shadow (it never does: an isolated
    event avoided by the antichain is an avoided chain).
    """
    members = _check_members(M, members)
    if not is_antichain(M, members):
        return False
    if not M.events:
        return not members
    up_covers: dict[str, list[str]] = {e: [] for e in M.events}
    for a, b in M.covers:
        up_covers[a].append(b)
    blocked = members
    stack = [e for e in M.minimal_events if e not in blocked]
    seen = set(stack)
    while stack:
        e = stack.pop()
        if e in M.maximal_events:
            return False
        for nxt in up_covers[e]:
            if nxt not in blocked and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def max_antichain(M: CausalSet) -> frozenset[str]:
    """The maximal-element antichain; Cauchy for every nonempty causal set."""
    return M.maximal_events


def are_causally_disjoint(M: CausalSet, a: Iterable[str], b: Iterable[str]) -> bool:
    """No member of one region is comparable to a member of the other."""
    a = _check_members(M, a)
    b = _check_members(M, b)
    reach = causal_future(M, a) | causal_past(M, a)
    return not (reach & b)


# ---- maps between causal sets ----------------------------------------------


@dataclass(frozen=True)
class MonotoneMap:
    """Injective order-preserving map; the loose legs accepted by gluing."""

    dom: CausalSet
    cod: CausalSet
    pairs: tuple[tuple[str, str], ...]

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.__class__.__name__, self.dom, self.cod, self.pairs))
            self.__dict__["_hash"] = h
        return h

    def __init__(self, dom: CausalSet, cod: CausalSet, mapping: dict[str, str] | Iterable[tuple[str, str]]):
        table = dict(mapping)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "pairs", tuple(sorted(table.items())))
        self._validate(table)

    def _validate(self, table: dict[str, str]) -> None:
        if sorted(table) != list(self.dom.events):
            raise ValueError("map must be defined on exactly the domain events")
        for v in table.values():
            if v not in self.cod:
                raise ValueError(f"image event {v!r} not in codomain")
        if len(set(table.values())) != len(table):
            raise ValueError("map is not injective")
        for a, b in itertools.combinations(self.dom.events, 2):
            if self.dom.le(a, b) and not self.cod.le(table[a], table[b]):
                raise ValueError(f"map does not preserve {a!r} < {b!r}")
            if self.dom.le(b, a) and not self.cod.le(table[b], table[a]):
                raise ValueError(f"map does not preserve {b!r} < {a!r}")

    @cached_property
    def table(self) -> dict[str, str]:
        return dict(self.pairs)

    @cached_property
    def inverse_table(self) -> dict[str, str]:
        return {v: k for k, v in self.pairs}

    def __call__(self, event: str) -> str:
        try:
            return self.table[event]
        except KeyError:
            raise ValueError(f"event {event!r} not in domain") from None

    @cached_property
    def image(self) -> frozenset[str]:
        return frozenset(self.inverse_table)

    def image_of(self, members: Iterable[str]) -> frozenset[str]:
        return frozenset(self(e) for e in members)

    def preimage_of(self, members: Iterable[str]) -> frozenset[str]:
        inv = self.inverse_table
        return frozenset(inv[e] for e in members if e in inv)


@dataclass(frozen=True, init=False)
class CausalEmbedding(MonotoneMap):
    """Order-reflecting injection with causally convex image.

    The image being convex makes the map an isomorphism onto a causally
    closed sub-region, which is what every construction downstream
    (germs, collars, gluing cocones) relies on.
    """

    # the decorator would regenerate an uncached __hash__ for the subclass
    __hash__ = MonotoneMap.__hash__

    def _validate(self, table: dict[str, str]) -> None:
        super()._validate(table)
        for a, b in itertools.permutations(self.dom.events, 2):
            if self.cod.le(table[a], table[b]) and not self.dom.le(a, b):
                raise ValueError(
                    f"map does not reflect order: {table[a]!r} < {table[b]!r} "
                    f"but {a!r} not < {b!r}"
                )
        if not is_causally_convex(self.cod, set(table.values())):
            raise ValueError("image is not causally convex")

    @classmethod
    def identity(cls, M: CausalSet) -> "CausalEmbedding":
        return cls(M, M, {e: e for e in M.events})

    @classmethod
    def inclusion(cls, M: CausalSet, members: Iterable[str]) -> "CausalEmbedding":
        """Inclusion of the induced sub-poset; members must be convex in M."""
        sub = M.induced(members)
        return cls(sub, M, {e: e for e in sub.events})

    def then(self, other: "CausalEmbedding") -> "CausalEmbedding":
        """Composite self;other (apply self first)."""
        if other.dom != self.cod:
            raise ValueError("embeddings do not compose")
        return CausalEmbedding(self.dom, other.cod, {e: other(self(e)) for e in self.dom.events})

    def restrict(self, members: Iterable[str]) -> "CausalEmbedding":
        """Restriction to a convex subset of the domain."""
        members = frozenset(members)
        sub = self.dom.induced(members)
        return CausalEmbedding(sub, self.cod, {e: self(e) for e in members})

    def restrict_into(self, members: Iterable[str], region: Iterable[str]) -> "CausalEmbedding":
        """Restrict the domain and corestrict the codomain to a convex region."""
        members = frozenset(members)
        sub = self.dom.induced(members)
        target = self.cod.induced(region)
        return CausalEmbedding(sub, target, {e: self(e) for e in members})


def is_cauchy_embedding(emb: CausalEmbedding) -> bool:
    """Does the image contain a Cauchy antichain of the codomain?

    Fast reject: a cover path from a minimal to a maximal event of the
    codomain avoiding the image is a maximal chain no antichain inside the
    image can meet.  When no such path exists the question is decided
    exactly, first by the greedy picks (maximal / minimal elements of the
    image), then by scanning all antichains inside the image; the fast
    test alone is not sufficient for a positive answer.
    """
    cod = emb.cod
    image = emb.image
    if not cod.events:
        return True
    up_covers: dict[str, list[str]] = {e: [] for e in cod.events}
    for a, b in cod.covers:
        up_covers[a].append(b)
    stack = [e for e in cod.minimal_events if e not in image]
    seen = set(stack)
    while stack:
        e = stack.pop()
        if e in cod.maximal_events:
            return False
        for nxt in up_covers[e]:
            if nxt not in image and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    sub = cod.induced(image)
    for greedy in (sub.maximal_events, sub.minimal_events):
        if is_cauchy_antichain(cod, greedy):
            return True
    return any(
        is_cauchy_antichain(cod, candidate)
        for candidate in cod.antichains(within=image)
        if candidate
    )


# ---- gluing ------------------------------------------------------------------


@dataclass(frozen=True)
class GluingResult:
    result: CausalSet
    left_legs: tuple[CausalEmbedding, ...]
    right_leg: CausalEmbedding


def glue_pushout(
    left: Sequence[CausalSet],
    mid: Sequence[CausalSet],
    right: CausalSet,
    into_left: Sequence[MonotoneMap],
    into_right: Sequence[MonotoneMap],
) -> GluingResult:
    """Pushout of the star cospan left[i] <- mid[i] -> right.

    Events identified along the shared middles are merged, orders are
    pushed forward and transitively closed.  Images of distinct
    ``into_right`` legs must be pairwise causally disjoint; under that
    precondition each quotient class holds at most one right event and at
    most one left event.  Quotient classes are named after their right
    event when they have one, else after their left event, with
    deterministic ``@i`` suffixes on collisions.

    Raises GluingCycle when the pushed-forward order acquires a cycle and
    NonConvexCocone when a cocone map fails to be a causal embedding;
    neither can occur when all legs are genuine CausalEmbeddings.
    """
    k = len(mid)
    if not (len(left) == len(into_left) == len(into_right) == k):
        raise ValueError("mismatched gluing data lengths")
    for i in range(k):
        if into_left[i].dom != mid[i] or into_left[i].cod != left[i]:
            raise ValueError(f"into_left[{i}] does not map mid[{i}] into left[{i}]")
        if into_right[i].dom != mid[i] or into_right[i].cod != right:
            raise ValueError(f"into_right[{i}] does not map mid[{i}] into right")
    for i, j in itertools.combinations(range(k), 2):
        if not are_causally_disjoint(right, into_right[i].image, into_right[j].image):
            raise ValueError(
                f"into_right images {i} and {j} are not causally disjoint"
            )

    # Atoms carry provenance; the union-find merges along the middles.
    parent: dict[tuple, tuple] = {}

    def find(x: tuple) -> tuple:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: tuple, y: tuple) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    atoms = [("R", r) for r in right.events]
    for i in range(k):
        atoms.extend(("L", i, e) for e in left[i].events)
    for a in atoms:
        parent[a] = a
    for i in range(k):
        for x in mid[i].events:
            union(("L", i, into_left[i](x)), ("R", into_right[i](x)))

    classes: dict[tuple, list[tuple]] = {}
    for a in atoms:
        classes.setdefault(find(a), []).append(a)

    # Deterministic names: right representative wins, then the left event.
    names: dict[tuple, str] = {}
    used: set[str] = set()
    right_roots = sorted(
        (r for r in classes if any(a[0] == "R" for a in classes[r])),
        key=lambda r: min(a[1] for a in classes[r] if a[0] == "R"),
    )
    for root in right_roots:
        name = min(a[1] for a in classes[root] if a[0] == "R")
        names[root] = name
        used.add(name)
    left_roots = sorted(
        (r for r in classes if r not in names),
        key=lambda r: min((a[1], a[2]) for a in classes[r] if a[0] == "L"),
    )
    for root in left_roots:
        i, base = min((a[1], a[2]) for a in classes[root] if a[0] == "L")
        name = base
        bump = 0
        while name in used:
            bump += 1
            suffix = f"@{i}" if bump == 1 else f"@{i}.{bump}"
            name = f"{base}{suffix}"
        names[root] = name
        used.add(name)

    def cls(atom: tuple) -> str:
        return names[find(atom)]

    relations: set[tuple[str, str]] = set()
    for a, b in itertools.combinations(right.events, 2):
        if right.lt(a, b):
            relations.add((cls(("R", a)), cls(("R", b))))
        elif right.lt(b, a):
            relations.add((cls(("R", b)), cls(("R", a))))
    for i in range(k):
        for a, b in itertools.combinations(left[i].events, 2):
            if left[i].lt(a, b):
                relations.add((cls(("L", i, a)), cls(("L", i, b))))
            elif left[i].lt(b, a):
                relations.add((cls(("L", i, b)), cls(("L", i, a))))

    for a, b in relations:
        if a == b:
            raise GluingCycle(f"events merged across a strict relation at {a!r}")
    try:
        result = CausalSet(set(names.values()), relations)
    except ValueError as exc:
        raise GluingCycle(str(exc)) from None

    def leg(dom: CausalSet, tag) -> CausalEmbedding:
        mapping = {e: cls(tag(e)) for e in dom.events}
        try:
            return CausalEmbedding(dom, result, mapping)
        except ValueError as exc:
            raise NonConvexCocone(f"cocone map is not an embedding: {exc}") from None

    left_legs = tuple(
        leg(left[i], lambda e, i=i: ("L", i, e)) for i in range(k)
    )
    right_leg = leg(right, lambda e: ("R", e))
    return GluingResult(result, left_legs, right_leg)
