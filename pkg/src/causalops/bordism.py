"""Bordisms between pointed causal sets and their operadic composition.

A pointed causal set carries a distinguished Cauchy antichain, its surface.
A bordism embeds collars around several input surfaces and one output
surface into an interpolating causal set; composition cuts away the
overhang above the glued surfaces and forms a pushout along the shared
collar cores.  Two-cells identify bordisms that agree near their whole
surface configuration, and finite windows of the structure materialize as
pseudo-operad tables whose globular collapse is an honest operad.

Everything here is exact and deterministic: canonical representatives are
restrictions to convex hulls of surfaces, pushout labels are renamed by
intrinsic anchors so that composition commutes with permutation actions on
the nose, and all searches enumerate candidates in sorted order.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .causal_core import (
    CausalEmbedding,
    CausalSet,
    GluingResult,
    causal_past,
    chronological_past,
    convex_hull,
    are_causally_disjoint,
    glue_pushout,
    is_causally_convex,
    is_cauchy_antichain,
    is_cauchy_embedding,
)
from .errors import FragmentCapExceeded, InvalidComposite
from .operad_kernel import FiniteGroupoid, Operad, apply_permutation
from .pseudo_operad import PseudoOperadData, tau
from .report import FAIL, PASS, Report

__all__ = [
    "PointedObject",
    "Germ",
    "enumerate_germs",
    "Bordism",
    "unit_bordism",
    "validate_bordism",
    "OverhangRegions",
    "overhang_regions",
    "ComposedBordism",
    "compose_bordisms_full",
    "compose_bordisms",
    "permute_bordism",
    "TwoCell",
    "identity_cell",
    "germ_to_cell",
    "permute_cell",
    "cells_between",
    "globular_cells_between",
    "source_of",
    "target_of",
    "compose_two_cells",
    "find_wide_witness",
    "check_two_cell",
    "coherence_cells",
    "unitor_cells",
    "companion_bordism",
    "companion_cells",
    "bordism_fragment",
    "truncate_bordisms",
]


# ---- pointed causal sets -----------------------------------------------------


@dataclass(frozen=True)
class PointedObject:
    """A causal set pointed by one of its Cauchy antichains."""

    carrier: CausalSet
    surface: frozenset[str]

    def __init__(self, carrier: CausalSet, surface: Iterable[str]):
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "surface", frozenset(surface))
        if not is_cauchy_antichain(carrier, self.surface):
            raise ValueError("surface must be a Cauchy antichain of the carrier")

    @cached_property
    def surface_hull(self) -> frozenset[str]:
        return convex_hull(self.carrier, self.surface)

    @cached_property
    def core(self) -> CausalSet:
        """The carrier restricted to the convex hull of the surface."""
        return self.carrier.induced(self.surface_hull)

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((PointedObject, self.carrier, self.surface))
            self.__dict__["_hash"] = h
        return h

    @cached_property
    def _text(self) -> str:
        return f"<{'|'.join(sorted(self.surface))} in {self.carrier!r}>"

    def __str__(self) -> str:
        return self._text


# ---- germs of embeddings around a surface -------------------------------------


@dataclass(frozen=True)
class Germ:
    """An invertible germ of embeddings around a pointed surface.

    The stored table is the canonical representative: the restriction to the
    hull core of the source, which lands exactly on the hull of the target
    surface.  Two wider embeddings present the same germ precisely when
    these restrictions coincide, so equality of the dataclass fields is germ
    equality.
    """

    src: PointedObject
    tgt: PointedObject
    pairs: tuple[tuple[str, str], ...]

    def __init__(self, src: PointedObject, tgt: PointedObject,
                 mapping: Mapping[str, str] | Iterable[tuple[str, str]]):
        table = dict(mapping)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)
        object.__setattr__(self, "pairs", tuple(sorted(table.items())))
        emb = CausalEmbedding(src.core, tgt.carrier, table)
        if emb.image != tgt.surface_hull:
            raise ValueError("germ must cover exactly the target surface hull")
        if emb.image_of(src.surface) != tgt.surface:
            raise ValueError("germ must carry the surface onto the target surface")
        self.__dict__["embedding"] = emb

    @classmethod
    def from_map(cls, src: PointedObject, tgt: PointedObject,
                 mapping: Mapping[str, str]) -> "Germ":
        """Canonicalize a wider representative defined on a convex region.

        The representative must be a Cauchy embedding around the source
        surface; its restriction to the surface hull is the germ.
        """
        table = dict(mapping)
        domain = frozenset(table)
        if not domain >= src.surface:
            raise ValueError("representative must be defined around the surface")
        if not is_causally_convex(src.carrier, domain):
            raise ValueError("representative domain must be causally convex")
        emb = CausalEmbedding(src.carrier.induced(domain), tgt.carrier, table)
        if not is_cauchy_embedding(emb):
            raise ValueError("representative must be a Cauchy embedding")
        if emb.image_of(src.surface) != tgt.surface:
            raise ValueError("representative must carry surface to surface")
        return cls(src, tgt, {e: table[e] for e in src.surface_hull})

    @classmethod
    def identity(cls, obj: PointedObject) -> "Germ":
        return cls(obj, obj, {e: e for e in obj.surface_hull})

    @cached_property
    def embedding(self) -> CausalEmbedding:
        return CausalEmbedding(self.src.core, self.tgt.carrier, dict(self.pairs))

    @cached_property
    def table(self) -> dict[str, str]:
        return dict(self.pairs)

    def __call__(self, event: str) -> str:
        return self.embedding(event)

    def then(self, other: "Germ") -> "Germ":
        """Composite germ, applying self first."""
        if other.src != self.tgt:
            raise ValueError("germs do not compose")
        return Germ(self.src, other.tgt,
                    {e: other.table[v] for e, v in self.pairs})

    def inverse(self) -> "Germ":
        return Germ(self.tgt, self.src, {v: e for e, v in self.pairs})

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((Germ, self.src, self.tgt, self.pairs))
            self.__dict__["_hash"] = h
        return h

    @cached_property
    def _text(self) -> str:
        body = ",".join(f"{a}>{b}" for a, b in self.pairs)
        return f"germ[{body}]({self.src}=>{self.tgt})"

    def __str__(self) -> str:
        return self._text


# ---- backtracking searches for structured isomorphisms ------------------------


def _iso_stats(M: CausalSet) -> dict[str, tuple[int, int, int, int]]:
    """Invariants each event must preserve under any order isomorphism."""
    down: dict[str, int] = {e: 0 for e in M.events}
    up: dict[str, int] = {e: 0 for e in M.events}
    for a, b in M.covers:
        up[a] += 1
        down[b] += 1
    past = {e: sum(1 for x in M.events if M.le(x, e)) for e in M.events}
    future = {e: sum(1 for x in M.events if M.le(e, x)) for e in M.events}
    return {e: (past[e], future[e], down[e], up[e]) for e in M.events}


def _pinned_isos(
    A: CausalSet,
    B: CausalSet,
    blocks: Sequence[tuple[frozenset[str], frozenset[str]]] = (),
    pins: Mapping[str, str] | None = None,
) -> Iterator[dict[str, str]]:
    """Order isomorphisms A -> B respecting setwise blocks and exact pins."""
    if len(A.events) != len(B.events):
        return
    for s, t in blocks:
        if len(s) != len(t):
            return
    pins = dict(pins or {})
    stats_a = _iso_stats(A)
    stats_b = _iso_stats(B)
    order = sorted(A.events)
    b_sorted = sorted(B.events)

    def extend(i: int, assignment: dict[str, str], used: set[str]) -> Iterator[dict[str, str]]:
        if i == len(order):
            yield dict(assignment)
            return
        a = order[i]
        candidates = [pins[a]] if a in pins else b_sorted
        for b in candidates:
            if b in used:
                continue
            if stats_a[a] != stats_b[b]:
                continue
            if any((a in s) != (b in t) for s, t in blocks):
                continue
            if any(
                A.le(a, a2) != B.le(b, b2) or A.le(a2, a) != B.le(b2, b)
                for a2, b2 in assignment.items()
            ):
                continue
            assignment[a] = b
            used.add(b)
            yield from extend(i + 1, assignment, used)
            del assignment[a]
            used.discard(b)

    yield from extend(0, {}, set())


def _pinned_embeddings(
    A: CausalSet,
    B: CausalSet,
    pins: Mapping[str, str],
) -> Iterator[dict[str, str]]:
    """Order-reflecting injections A -> B extending the pinned assignments."""
    order = sorted(A.events)
    b_sorted = sorted(B.events)
    pins = dict(pins)

    def extend(i: int, assignment: dict[str, str], used: set[str]) -> Iterator[dict[str, str]]:
        if i == len(order):
            yield dict(assignment)
            return
        a = order[i]
        candidates = [pins[a]] if a in pins else b_sorted
        for b in candidates:
            if b in used:
                continue
            if any(
                A.le(a, a2) != B.le(b, b2) or A.le(a2, a) != B.le(b2, b)
                for a2, b2 in assignment.items()
            ):
                continue
            assignment[a] = b
            used.add(b)
            yield from extend(i + 1, assignment, used)
            del assignment[a]
            used.discard(b)

    yield from extend(0, {}, set())


def enumerate_germs(src: PointedObject, tgt: PointedObject) -> tuple[Germ, ...]:
    """All invertible germs from src to tgt, sorted deterministically."""
    found = [
        Germ(src, tgt, iso)
        for iso in _pinned_isos(src.core, tgt.core,
                                blocks=((src.surface, tgt.surface),))
    ]
    return tuple(sorted(found, key=str))


# ---- bordisms ------------------------------------------------------------------


@dataclass(frozen=True)
class Bordism:
    """A causal set interpolating between pointed inputs and one output.

    Each input embeds a collar from its own carrier into the interpolating
    carrier, and so does the output.  Only shape is enforced here; the
    semantic conditions (convex collars, Cauchy output, disjoint inputs and
    the surface ordering) live in validate_bordism so that broken instances
    can be constructed and diagnosed.
    """

    sources: tuple[PointedObject, ...]
    target: PointedObject
    carrier: CausalSet
    maps_in: tuple[CausalEmbedding, ...]
    map_out: CausalEmbedding

    def __init__(self, sources: Iterable[PointedObject], target: PointedObject,
                 carrier: CausalSet, maps_in: Iterable[CausalEmbedding],
                 map_out: CausalEmbedding):
        object.__setattr__(self, "sources", tuple(sources))
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "maps_in", tuple(maps_in))
        object.__setattr__(self, "map_out", map_out)
        if len(self.maps_in) != len(self.sources):
            raise ValueError("one input embedding per source is required")
        for i, (src, emb) in enumerate(zip(self.sources, self.maps_in)):
            if emb.cod != self.carrier:
                raise ValueError(f"input embedding {i} does not land in the carrier")
            self._check_collar(emb, src.carrier, f"input collar {i}")
        if self.map_out.cod != self.carrier:
            raise ValueError("output embedding does not land in the carrier")
        self._check_collar(self.map_out, self.target.carrier, "output collar")

    @staticmethod
    def _check_collar(emb: CausalEmbedding, ambient: CausalSet, what: str) -> None:
        events = frozenset(emb.dom.events)
        if not events <= set(ambient.events):
            raise ValueError(f"{what} uses events outside its causal set")
        if emb.dom != ambient.induced(events):
            raise ValueError(f"{what} does not carry the induced order")

    # tokens participate in operads through the .inputs/.output protocol
    @property
    def inputs(self) -> tuple[PointedObject, ...]:
        return self.sources

    @property
    def output(self) -> PointedObject:
        return self.target

    @property
    def arity(self) -> int:
        return len(self.sources)

    @cached_property
    def in_collars(self) -> tuple[frozenset[str], ...]:
        return tuple(frozenset(emb.dom.events) for emb in self.maps_in)

    @cached_property
    def out_collar(self) -> frozenset[str]:
        return frozenset(self.map_out.dom.events)

    @cached_property
    def surface_images(self) -> tuple[frozenset[str], ...]:
        return tuple(
            emb.image_of(src.surface)
            for src, emb in zip(self.sources, self.maps_in)
        )

    @cached_property
    def out_surface_image(self) -> frozenset[str]:
        return self.map_out.image_of(self.target.surface)

    @cached_property
    def surface_hull(self) -> frozenset[str]:
        seed = set(self.out_surface_image)
        for img in self.surface_images:
            seed |= img
        return convex_hull(self.carrier, seed)

    @cached_property
    def hull_core(self) -> CausalSet:
        return self.carrier.induced(self.surface_hull)

    @cached_property
    def is_cauchy_case(self) -> bool:
        """Single input whose collar already covers the carrier causally."""
        return self.arity == 1 and is_cauchy_embedding(self.maps_in[0])

    @property
    def label(self) -> str:
        return f"{self.arity}-ary bordism on {len(self.carrier.events)} events"

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((Bordism, self.sources, self.target, self.carrier,
                      self.maps_in, self.map_out))
            self.__dict__["_hash"] = h
        return h

    @cached_property
    def _text(self) -> str:
        ins = ";".join(
            ",".join(f"{a}>{b}" for a, b in emb.pairs) or "()"
            for emb in self.maps_in
        )
        out = ",".join(f"{a}>{b}" for a, b in self.map_out.pairs)
        srcs = ",".join(str(s) for s in self.sources)
        return f"bord[{ins}|{out}]({srcs}=>{self.target};{self.carrier!r})"

    def __str__(self) -> str:
        return self._text


def unit_bordism(obj: PointedObject) -> Bordism:
    """The identity bordism: the carrier itself with full collars."""
    ident = CausalEmbedding.identity(obj.carrier)
    return Bordism((obj,), obj, obj.carrier, (ident,), ident)


def validate_bordism(b: Bordism, report: Report | None = None) -> Report:
    """Check the semantic bordism conditions, one report entry per aspect."""
    rep = report if report is not None else Report()
    t = b.label

    collar_bad: list[str] = []
    for i, (src, collar) in enumerate(zip(b.sources, b.in_collars)):
        if not collar >= src.surface:
            collar_bad.append(f"input collar {i} misses its surface")
        if not is_causally_convex(src.carrier, collar):
            collar_bad.append(f"input collar {i} is not causally convex")
    rep.add("bordism/in-collars", t, FAIL if collar_bad else PASS,
            witness=collar_bad[:3] or None)

    out_bad: list[str] = []
    if not b.out_collar >= b.target.surface:
        out_bad.append("output collar misses its surface")
    if not is_causally_convex(b.target.carrier, b.out_collar):
        out_bad.append("output collar is not causally convex")
    rep.add("bordism/out-collar", t, FAIL if out_bad else PASS,
            witness=out_bad[:3] or None)

    rep.add("bordism/out-cauchy", t,
            PASS if is_cauchy_embedding(b.map_out) else FAIL,
            witness=None if is_cauchy_embedding(b.map_out)
            else "output image contains no Cauchy antichain of the carrier")

    dis_bad = [
        f"input images {i} and {j} are causally related"
        for i, j in itertools.combinations(range(b.arity), 2)
        if not are_causally_disjoint(b.carrier, b.maps_in[i].image,
                                     b.maps_in[j].image)
    ]
    rep.add("bordism/disjoint-inputs", t, FAIL if dis_bad else PASS,
            witness=dis_bad[:3] or None)

    if b.arity == 0:
        rep.add("bordism/surface-order", t, PASS, witness="no inputs")
    elif b.is_cauchy_case:
        past = causal_past(b.carrier, b.out_surface_image)
        ok = b.surface_images[0] <= past
        rep.add("bordism/surface-order", t, PASS if ok else FAIL,
                witness=None if ok
                else "input surface leaves the causal past of the output surface")
    else:
        strict = chronological_past(b.carrier, b.out_surface_image)
        offenders = sorted(
            e for img in b.surface_images for e in img if e not in strict
        )
        rep.add("bordism/surface-order", t, PASS if not offenders else FAIL,
                witness=offenders[:5] or None)
    return rep


def permute_bordism(b: Bordism, sigma: Sequence[int]) -> Bordism:
    """Reindex the inputs by a permutation acting on the right."""
    sigma = tuple(sigma)
    return Bordism(
        apply_permutation(b.sources, sigma),
        b.target,
        b.carrier,
        apply_permutation(b.maps_in, sigma),
        b.map_out,
    )


# ---- overhang regions and composition -------------------------------------------


@dataclass(frozen=True)
class OverhangRegions:
    """The three regions a composition glues along.

    ``upper`` lives in the outer carrier: everything not causally below an
    input surface image, plus the images of the shared collar overlaps.
    ``lower[i]`` lives in the i-th inner carrier: the causal past of its
    outgoing overlap image.  ``overlaps[i]`` is the intersection of the two
    collars inside the shared interface carrier.
    """

    upper: frozenset[str]
    lower: tuple[frozenset[str], ...]
    overlaps: tuple[frozenset[str], ...]


def overhang_regions(outer: Bordism, inners: Sequence[Bordism]) -> OverhangRegions:
    inners = tuple(inners)
    if len(inners) != outer.arity:
        raise ValueError("arity mismatch: one inner bordism per input is required")
    for i, inner in enumerate(inners):
        if inner.target != outer.sources[i]:
            raise ValueError(
                f"inner bordism {i} does not end at the matching input object"
            )
    overlaps = tuple(
        inner.out_collar & outer.in_collars[i]
        for i, inner in enumerate(inners)
    )
    removed: set[str] = set()
    added: set[str] = set()
    for i, w in enumerate(overlaps):
        removed |= causal_past(outer.carrier, outer.surface_images[i])
        added |= outer.maps_in[i].image_of(w)
    upper = frozenset((set(outer.carrier.events) - removed) | added)
    lower = tuple(
        frozenset(causal_past(inner.carrier, inner.map_out.image_of(w)))
        for inner, w in zip(inners, overlaps)
    )
    return OverhangRegions(upper, lower, overlaps)


def _assert_regions(outer: Bordism, inners: tuple[Bordism, ...],
                    regions: OverhangRegions) -> None:
    """The region properties every composition relies on, checked every call."""
    if not is_causally_convex(outer.carrier, regions.upper):
        raise InvalidComposite("upper overhang region is not causally convex")
    if not regions.upper >= outer.out_surface_image:
        raise InvalidComposite("upper region lost the output surface")
    for i, inner in enumerate(inners):
        iface = outer.sources[i]
        w = regions.overlaps[i]
        if not w >= iface.surface:
            raise InvalidComposite(f"collar overlap {i} misses the shared surface")
        if not is_causally_convex(iface.carrier, w):
            raise InvalidComposite(f"collar overlap {i} is not causally convex")
        if not regions.upper >= outer.surface_images[i]:
            raise InvalidComposite(f"upper region lost input surface image {i}")
        lo = regions.lower[i]
        if not is_causally_convex(inner.carrier, lo):
            raise InvalidComposite(f"lower region {i} is not causally convex")
        if not lo >= inner.map_out.image_of(w):
            raise InvalidComposite(f"lower region {i} lost its overlap image")
        for j, img in enumerate(inner.surface_images):
            if not lo >= img:
                raise InvalidComposite(
                    f"lower region {i} lost inner input surface image {j}"
                )


def _canonical_glue(
    lowers: Sequence[CausalSet],
    mids: Sequence[CausalSet],
    upper: CausalSet,
    into_left: Sequence[CausalEmbedding],
    into_right: Sequence[CausalEmbedding],
) -> GluingResult:
    """Pushout with labels renamed so piece order cannot leak into names.

    The raw pushout disambiguates colliding labels by leg position, which
    would break equivariance of composition under input permutations.  Here
    every surviving lower-piece event is renamed after the smallest event of
    its own interface image, an anchor that travels with the piece.
    """
    glued = glue_pushout(list(lowers), list(mids), upper,
                         list(into_left), list(into_right))
    right_names = glued.right_leg.image
    piece_of: dict[str, tuple[int, str]] = {}
    for i, leg in enumerate(glued.left_legs):
        for e in leg.dom.events:
            merged = leg(e)
            if merged not in right_names:
                piece_of[merged] = (i, e)
    if not piece_of:
        return glued

    anchors = {i: min(into_right[i].image) for i in range(len(into_left))
               if into_right[i].image}
    base_counts = Counter(base for _i, base in piece_of.values())
    rename: dict[str, str] = {e: e for e in right_names}
    assigned = set(rename.values())
    for merged, (i, base) in sorted(piece_of.items(),
                                    key=lambda kv: (kv[1][1], anchors[kv[1][0]])):
        name = base
        if name in right_names or base_counts[base] > 1:
            name = f"{base}@{anchors[i]}"
        bump = 1
        while name in assigned:
            bump += 1
            name = f"{base}@{anchors[i]}.{bump}"
        rename[merged] = name
        assigned.add(name)

    if all(rename[e] == e for e in glued.result.events):
        return glued
    result = glued.result.relabel(rename)
    left_legs = tuple(
        CausalEmbedding(leg.dom, result,
                        {e: rename[leg(e)] for e in leg.dom.events})
        for leg in glued.left_legs
    )
    right_leg = CausalEmbedding(
        glued.right_leg.dom, result,
        {e: rename[glued.right_leg(e)] for e in glued.right_leg.dom.events},
    )
    return GluingResult(result, left_legs, right_leg)


@dataclass(frozen=True)
class ComposedBordism:
    """A composite together with the gluing data that produced it."""

    bordism: Bordism
    regions: OverhangRegions
    lower_legs: tuple[CausalEmbedding, ...]
    upper_leg: CausalEmbedding


def compose_bordisms_full(outer: Bordism, inners: Sequence[Bordism]) -> ComposedBordism:
    """Glue inner bordisms into the inputs of an outer one, keeping the legs."""
    inners = tuple(inners)
    regions = overhang_regions(outer, inners)

    pieces = [("outer", outer)]
    pieces.extend((f"inner {i}", inner) for i, inner in enumerate(inners))
    for what, piece in pieces:
        rep = validate_bordism(piece)
        if not rep.ok:
            first = rep.failures[0]
            raise InvalidComposite(f"{what} bordism invalid: {first.check}")
    _assert_regions(outer, inners, regions)

    mids = [
        outer.sources[i].carrier.induced(w)
        for i, w in enumerate(regions.overlaps)
    ]
    lowers = [
        inner.carrier.induced(lo)
        for inner, lo in zip(inners, regions.lower)
    ]
    upper_poset = outer.carrier.induced(regions.upper)
    try:
        into_left = [
            inner.map_out.restrict_into(w, lo)
            for inner, w, lo in zip(inners, regions.overlaps, regions.lower)
        ]
        into_right = [
            outer.maps_in[i].restrict_into(w, regions.upper)
            for i, w in enumerate(regions.overlaps)
        ]
    except ValueError as exc:
        raise InvalidComposite(f"collar restriction failed: {exc}") from None

    glued = _canonical_glue(lowers, mids, upper_poset, into_left, into_right)

    try:
        new_maps_in = []
        for i, inner in enumerate(inners):
            for emb in inner.maps_in:
                pre = emb.preimage_of(regions.lower[i])
                new_maps_in.append(
                    emb.restrict_into(pre, regions.lower[i]).then(glued.left_legs[i])
                )
        pre_out = outer.map_out.preimage_of(regions.upper)
        new_out = outer.map_out.restrict_into(pre_out, regions.upper).then(glued.right_leg)
    except ValueError as exc:
        raise InvalidComposite(f"composite collar construction failed: {exc}") from None

    composite = Bordism(
        tuple(s for inner in inners for s in inner.sources),
        outer.target,
        glued.result,
        tuple(new_maps_in),
        new_out,
    )
    rep = validate_bordism(composite)
    if not rep.ok:
        raise InvalidComposite(
            "composite failed validation: "
            + "; ".join(e.check for e in rep.failures)
        )
    return ComposedBordism(composite, regions, glued.left_legs, glued.right_leg)


def compose_bordisms(outer: Bordism, inners: Sequence[Bordism]) -> Bordism:
    return compose_bordisms_full(outer, inners).bordism


# ---- two-cells -------------------------------------------------------------------


@dataclass(frozen=True)
class TwoCell:
    """A germ of isomorphisms near the whole surface configuration.

    The canonical datum is an order isomorphism between the convex hulls of
    all surface images, matching each input surface image and the output
    surface image slotwise.  Boundary germs on the pointed objects are
    derived by factoring through the collar embeddings.
    """

    dom: Bordism
    cod: Bordism
    pairs: tuple[tuple[str, str], ...]

    def __init__(self, dom: Bordism, cod: Bordism,
                 mapping: Mapping[str, str] | Iterable[tuple[str, str]]):
        table = dict(mapping)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "pairs", tuple(sorted(table.items())))
        if dom.arity != cod.arity:
            raise ValueError("cells connect bordisms of equal arity")
        if frozenset(table) != dom.surface_hull:
            raise ValueError("cell must be defined on exactly the surface hull")
        emb = CausalEmbedding(dom.hull_core, cod.carrier, table)
        if emb.image != cod.surface_hull:
            raise ValueError("cell image must be exactly the surface hull")
        for i in range(dom.arity):
            if emb.image_of(dom.surface_images[i]) != cod.surface_images[i]:
                raise ValueError(f"cell does not match input surface image {i}")
        if emb.image_of(dom.out_surface_image) != cod.out_surface_image:
            raise ValueError("cell does not match the output surface image")
        self.__dict__["embedding"] = emb

    @cached_property
    def embedding(self) -> CausalEmbedding:
        return CausalEmbedding(self.dom.hull_core, self.cod.carrier, dict(self.pairs))

    @cached_property
    def table(self) -> dict[str, str]:
        return dict(self.pairs)

    def __call__(self, event: str) -> str:
        return self.embedding(event)

    def then(self, other: "TwoCell") -> "TwoCell":
        """Vertical composite, applying self first."""
        if other.dom != self.cod:
            raise ValueError("cells do not compose")
        return TwoCell(self.dom, other.cod,
                       {e: other.table[v] for e, v in self.pairs})

    def inverse(self) -> "TwoCell":
        return TwoCell(self.cod, self.dom, {v: e for e, v in self.pairs})

    @cached_property
    def source_germs(self) -> tuple[Germ, ...]:
        """Boundary germs on the inputs, one per slot."""
        germs = []
        for i in range(self.dom.arity):
            back = self.cod.maps_in[i].inverse_table
            fwd = self.dom.maps_in[i]
            table = {}
            for x in self.dom.sources[i].surface_hull:
                y = back.get(self(fwd(x)))
                if y is None:
                    raise ValueError(
                        f"cell does not factor through input collar {i}"
                    )
                table[x] = y
            germs.append(Germ(self.dom.sources[i], self.cod.sources[i], table))
        return tuple(germs)

    @cached_property
    def target_germ(self) -> Germ:
        """Boundary germ on the output."""
        back = self.cod.map_out.inverse_table
        fwd = self.dom.map_out
        table = {}
        for x in self.dom.target.surface_hull:
            y = back.get(self(fwd(x)))
            if y is None:
                raise ValueError("cell does not factor through the output collar")
            table[x] = y
        return Germ(self.dom.target, self.cod.target, table)

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((TwoCell, self.dom, self.cod, self.pairs))
            self.__dict__["_hash"] = h
        return h

    @cached_property
    def _text(self) -> str:
        body = ",".join(f"{a}>{b}" for a, b in self.pairs)
        return f"cell[{body}]({self.dom}=>{self.cod})"

    def __str__(self) -> str:
        return self._text


def source_of(cell: TwoCell) -> tuple[Germ, ...]:
    return cell.source_germs


def target_of(cell: TwoCell) -> Germ:
    return cell.target_germ


def identity_cell(b: Bordism) -> TwoCell:
    return TwoCell(b, b, {e: e for e in b.surface_hull})


def germ_to_cell(germ: Germ) -> TwoCell:
    """A germ viewed as a cell between the identity bordisms of its ends."""
    return TwoCell(unit_bordism(germ.src), unit_bordism(germ.tgt), germ.table)


def permute_cell(cell: TwoCell, sigma: Sequence[int]) -> TwoCell:
    return TwoCell(permute_bordism(cell.dom, sigma),
                   permute_bordism(cell.cod, sigma), cell.table)


def cells_between(a: Bordism, b: Bordism) -> tuple[TwoCell, ...]:
    """Every two-cell from a to b, sorted deterministically."""
    if a.arity != b.arity:
        return ()
    blocks = [
        (a.surface_images[i], b.surface_images[i]) for i in range(a.arity)
    ]
    blocks.append((a.out_surface_image, b.out_surface_image))
    found = [
        TwoCell(a, b, iso)
        for iso in _pinned_isos(a.hull_core, b.hull_core, blocks=tuple(blocks))
    ]
    return tuple(sorted(found, key=str))


class _PinClash(Exception):
    pass


def globular_cells_between(a: Bordism, b: Bordism,
                           limit: int | None = None) -> tuple[TwoCell, ...]:
    """Cells whose boundary germs are all identities.

    Such a cell is pinned pointwise on every collar hull image, so the
    search space is the complement of the boundary inside the surface hull.
    """
    if a.arity != b.arity or a.sources != b.sources or a.target != b.target:
        return ()
    pins: dict[str, str] = {}

    def pin(key: str, value: str) -> None:
        if pins.setdefault(key, value) != value:
            raise _PinClash

    try:
        for i in range(a.arity):
            fwd_a, fwd_b = a.maps_in[i], b.maps_in[i]
            for x in a.sources[i].surface_hull:
                pin(fwd_a(x), fwd_b(x))
        for x in a.target.surface_hull:
            pin(a.map_out(x), b.map_out(x))
    except _PinClash:
        return ()

    cells: list[TwoCell] = []
    for iso in _pinned_isos(a.hull_core, b.hull_core, pins=pins):
        cells.append(TwoCell(a, b, iso))
        if limit is not None and len(cells) >= limit:
            return tuple(cells)
    return tuple(sorted(cells, key=str))


def find_wide_witness(cell: TwoCell) -> CausalEmbedding | None:
    """Search for a Cauchy embedding on a convex region presenting the cell.

    Canonical restrictions need not stay Cauchy, so cells are identified by
    their hull cores alone; this reconstructs a wide representative when one
    exists, preferring the smallest region.
    """
    dom_carrier = cell.dom.carrier
    cod_carrier = cell.cod.carrier
    base = cell.dom.surface_hull
    rest = sorted(set(dom_carrier.events) - base)
    for k in range(len(rest) + 1):
        for extra in itertools.combinations(rest, k):
            region = base | frozenset(extra)
            if not is_causally_convex(dom_carrier, region):
                continue
            sub = dom_carrier.induced(region)
            for assignment in _pinned_embeddings(sub, cod_carrier, cell.table):
                try:
                    emb = CausalEmbedding(sub, cod_carrier, assignment)
                except ValueError:
                    continue
                if is_cauchy_embedding(emb):
                    return emb
    return None


def check_two_cell(cell: TwoCell, report: Report | None = None) -> Report:
    rep = report if report is not None else Report()
    t = f"cell between {cell.dom.label} and {cell.cod.label}"
    rep.add("twocell/core-iso", t, PASS,
            witness={"hull-events": len(cell.pairs)})
    try:
        _ = cell.source_germs
        _ = cell.target_germ
        rep.add("twocell/boundary-germs", t, PASS)
    except ValueError as exc:
        rep.add("twocell/boundary-germs", t, FAIL, witness=str(exc))
    witness = find_wide_witness(cell)
    rep.add("twocell/wide-witness", t,
            PASS if witness is not None else FAIL,
            witness=sorted(witness.dom.events) if witness is not None else
            "no convex Cauchy representative extends the hull core")
    return rep


def compose_two_cells(outer: TwoCell, inners: Sequence[TwoCell]) -> TwoCell:
    """Horizontal pasting of cells over a composition of their boundaries."""
    inners = tuple(inners)
    if len(inners) != outer.dom.arity:
        raise ValueError("arity mismatch: one inner cell per input is required")
    for i, cell in enumerate(inners):
        if cell.target_germ != outer.source_germs[i]:
            raise ValueError(
                f"inner cell {i} does not feed the matching boundary germ"
            )
    dom_full = compose_bordisms_full(outer.dom, tuple(c.dom for c in inners))
    cod_full = compose_bordisms_full(outer.cod, tuple(c.cod for c in inners))

    up_inv = dom_full.upper_leg.inverse_table
    lo_invs = [leg.inverse_table for leg in dom_full.lower_legs]
    outer_hull = outer.dom.surface_hull
    inner_hulls = [c.dom.surface_hull for c in inners]

    table: dict[str, str] = {}
    for x in sorted(dom_full.bordism.surface_hull):
        candidates = set()
        u = up_inv.get(x)
        if u is not None and u in outer_hull:
            candidates.add(cod_full.upper_leg(outer(u)))
        for i, cell in enumerate(inners):
            v = lo_invs[i].get(x)
            if v is not None and v in inner_hulls[i]:
                candidates.add(cod_full.lower_legs[i](cell(v)))
        if not candidates:
            raise InvalidComposite(
                "composite hull event not covered by any piece hull"
            )
        if len(candidates) > 1:
            raise InvalidComposite("piece cells disagree on a shared hull event")
        table[x] = candidates.pop()
    return TwoCell(dom_full.bordism, cod_full.bordism, table)


# ---- coherence cells via provenance tracing ---------------------------------------


def _seed_atoms(b: Bordism, tag: str) -> dict[str, frozenset]:
    return {e: frozenset({(tag, e)}) for e in b.carrier.events}


def _trace_compose(
    outer: Bordism,
    inners: tuple[Bordism, ...],
    outer_atoms: dict[str, frozenset],
    inner_atoms: Sequence[dict[str, frozenset]],
) -> tuple[ComposedBordism, dict[str, frozenset]]:
    """Compose while accumulating the provenance tags of merged events."""
    full = compose_bordisms_full(outer, inners)
    atoms: dict[str, set] = {e: set() for e in full.bordism.carrier.events}
    for i, leg in enumerate(full.lower_legs):
        for e in leg.dom.events:
            atoms[leg(e)].update(inner_atoms[i][e])
    for e in full.upper_leg.dom.events:
        atoms[full.upper_leg(e)].update(outer_atoms[e])
    return full, {e: frozenset(s) for e, s in atoms.items()}


def _atom_pairing(
    hull_left: Iterable[str],
    atoms_left: dict[str, frozenset],
    hull_right: Iterable[str],
    atoms_right: dict[str, frozenset],
) -> dict[str, str]:
    """Match hull events of two composites by shared provenance tags."""
    hull_left = frozenset(hull_left)
    hull_right = frozenset(hull_right)
    owner: dict = {}
    for e in hull_left:
        for atom in atoms_left[e]:
            owner[atom] = e
    table: dict[str, str] = {}
    for e2 in sorted(hull_right):
        for atom in atoms_right[e2]:
            e1 = owner.get(atom)
            if e1 is None:
                continue
            if table.setdefault(e1, e2) != e2:
                raise InvalidComposite("provenance pairing is ambiguous")
    if frozenset(table) != hull_left or frozenset(table.values()) != hull_right:
        raise InvalidComposite("provenance pairing does not cover the hulls")
    return table


def coherence_cells(
    outer: Bordism,
    mids: Sequence[Bordism],
    inners: Sequence[Sequence[Bordism]],
) -> TwoCell:
    """The associator comparing the two ways of stacking three layers.

    The cell runs from composing the outer pair first to composing the
    inner pairs first; its table pairs hull events through the provenance
    of the shared pieces.
    """
    mids = tuple(mids)
    inners = tuple(tuple(block) for block in inners)
    outer_atoms = _seed_atoms(outer, "o")
    mid_atoms = [_seed_atoms(m, f"m{i}") for i, m in enumerate(mids)]
    inner_atoms = [
        [_seed_atoms(x, f"i{i}.{j}") for j, x in enumerate(block)]
        for i, block in enumerate(inners)
    ]
    flat_inners = tuple(itertools.chain.from_iterable(inners))
    flat_inner_atoms = list(itertools.chain.from_iterable(inner_atoms))

    first, first_atoms = _trace_compose(outer, mids, outer_atoms, mid_atoms)
    left_full, left_atoms = _trace_compose(
        first.bordism, flat_inners, first_atoms, flat_inner_atoms
    )

    blocks = []
    block_atoms = []
    for i, (m, block) in enumerate(zip(mids, inners)):
        full, atoms = _trace_compose(m, block, mid_atoms[i], inner_atoms[i])
        blocks.append(full.bordism)
        block_atoms.append(atoms)
    right_full, right_atoms = _trace_compose(
        outer, tuple(blocks), outer_atoms, block_atoms
    )

    table = _atom_pairing(
        left_full.bordism.surface_hull, left_atoms,
        right_full.bordism.surface_hull, right_atoms,
    )
    return TwoCell(left_full.bordism, right_full.bordism, table)


def unitor_cells(b: Bordism) -> tuple[TwoCell, TwoCell]:
    """Cells from the unit-padded composites of b down to b itself."""
    base = _seed_atoms(b, "b")

    unit_out = unit_bordism(b.target)
    left_full, left_atoms = _trace_compose(
        unit_out, (b,), _seed_atoms(unit_out, "u"), [base]
    )
    left_table = _atom_pairing(
        left_full.bordism.surface_hull, left_atoms, b.surface_hull, base
    )
    left = TwoCell(left_full.bordism, b, left_table)

    units_in = tuple(unit_bordism(s) for s in b.sources)
    unit_atoms = [_seed_atoms(u, f"u{i}") for i, u in enumerate(units_in)]
    right_full, right_atoms = _trace_compose(b, units_in, base, unit_atoms)
    right_table = _atom_pairing(
        right_full.bordism.surface_hull, right_atoms, b.surface_hull, base
    )
    right = TwoCell(right_full.bordism, b, right_table)
    return left, right


# ---- companions --------------------------------------------------------------------


def companion_bordism(germ: Germ) -> Bordism:
    """The bordism presenting a germ horizontally: its target carrier,
    with the germ as input collar and the identity as output."""
    return Bordism(
        (germ.src,),
        germ.tgt,
        germ.tgt.carrier,
        (germ.embedding,),
        CausalEmbedding.identity(germ.tgt.carrier),
    )


def companion_cells(germ: Germ) -> tuple[TwoCell, TwoCell]:
    """Binding cells of the companion: one over (germ, id), one over (id, germ)."""
    comp = companion_bordism(germ)
    plus = TwoCell(comp, unit_bordism(germ.tgt),
                   {e: e for e in comp.surface_hull})
    minus = TwoCell(unit_bordism(germ.src), comp, germ.table)
    return plus, minus


# ---- fragments and truncation --------------------------------------------------------


def _action_closure(items: Iterable[Bordism]) -> set[Bordism]:
    out = set(items)
    for op in tuple(out):
        for sigma in itertools.permutations(range(op.arity)):
            out.add(permute_bordism(op, sigma))
    return out


def bordism_fragment(
    generators: Iterable[PointedObject | Bordism],
    depth: int = 1,
    *,
    max_objects: int = 32,
    max_ops: int = 128,
    max_cells: int = 4096,
) -> PseudoOperadData:
    """Materialize a finite window of the bordism pseudo-operad.

    Operations are the units, the generators, the companions of every germ
    between the touched objects and all composites reachable within the
    given depth, closed under input permutations.  Cells are every
    isomorphism germ between same-arity operations.  Caps guard each stage
    and overflow raises FragmentCapExceeded.
    """
    objs: list[PointedObject] = []
    gens: list[Bordism] = []
    for g in generators:
        if isinstance(g, PointedObject):
            objs.append(g)
        elif isinstance(g, Bordism):
            gens.append(g)
        else:
            raise TypeError(f"unsupported generator {g!r}")
    for i, b in enumerate(gens):
        rep = validate_bordism(b)
        if not rep.ok:
            raise ValueError(
                f"generator bordism {i} invalid: {rep.failures[0].check}"
            )

    colors: set[PointedObject] = set(objs)
    for b in gens:
        colors.update(b.sources)
        colors.add(b.target)
    if len(colors) > max_objects:
        raise FragmentCapExceeded(f"object cap {max_objects} exceeded")
    color_list = tuple(sorted(colors, key=str))

    germ_set: set[Germ] = set()
    for a, b in itertools.product(color_list, repeat=2):
        germ_set.update(enumerate_germs(a, b))
    germ_list = tuple(sorted(germ_set, key=str))
    objects = FiniteGroupoid(
        color_list,
        germ_list,
        {g: g.src for g in germ_list},
        {g: g.tgt for g in germ_list},
        lambda g, f: f.then(g),
        {c: Germ.identity(c) for c in color_list},
        lambda g: g.inverse(),
    )

    ops: set[Bordism] = {unit_bordism(c) for c in color_list}
    ops.update(gens)
    ops.update(companion_bordism(g) for g in germ_list)
    ops = _action_closure(ops)
    if len(ops) > max_ops:
        raise FragmentCapExceeded(f"operation cap {max_ops} exceeded")

    compose_ops: dict = {}
    for _ in range(depth):
        current = tuple(sorted(ops, key=str))
        new_ops: set[Bordism] = set()
        for psi in current:
            pools = [
                tuple(op for op in current if op.target == s)
                for s in psi.sources
            ]
            for phis in itertools.product(*pools):
                key = (psi, phis)
                if key in compose_ops:
                    continue
                composite = compose_bordisms(psi, phis)
                compose_ops[key] = composite
                if composite not in ops:
                    new_ops.add(composite)
                if len(ops) + len(new_ops) > max_ops:
                    raise FragmentCapExceeded(f"operation cap {max_ops} exceeded")
        if not new_ops:
            break
        ops |= _action_closure(new_ops)
        if len(ops) > max_ops:
            raise FragmentCapExceeded(f"operation cap {max_ops} exceeded")

    ops_sorted = tuple(sorted(ops, key=str))
    ops_by_arity: dict[int, list[Bordism]] = {}
    for op in ops_sorted:
        ops_by_arity.setdefault(op.arity, []).append(op)

    total_cells = 0
    cells_by_arity: dict[int, tuple[TwoCell, ...]] = {}
    for n, group in sorted(ops_by_arity.items()):
        cells: list[TwoCell] = []
        for a in group:
            for b in group:
                for cell in cells_between(a, b):
                    cells.append(cell)
                    total_cells += 1
                    if total_cells > max_cells:
                        raise FragmentCapExceeded(f"cell cap {max_cells} exceeded")
        cells_by_arity[n] = tuple(cells)

    op_groupoids = {
        n: FiniteGroupoid(
            tuple(ops_by_arity[n]),
            cells_by_arity[n],
            {c: c.dom for c in cells_by_arity[n]},
            {c: c.cod for c in cells_by_arity[n]},
            lambda g, f: f.then(g),
            {op: identity_cell(op) for op in ops_by_arity[n]},
            lambda c: c.inverse(),
        )
        for n in ops_by_arity
    }

    all_cells = tuple(c for n in sorted(cells_by_arity) for c in cells_by_arity[n])
    cell_inputs = {c: c.source_germs for c in all_cells}
    cell_output = {c: c.target_germ for c in all_cells}

    compose_cells: dict = {}
    for (psi, phis), composite in sorted(
        compose_ops.items(), key=lambda kv: str(kv[0])
    ):
        outer_cells = [c for c in cells_by_arity[psi.arity] if c.dom == psi]
        inner_pools = [
            [c for c in cells_by_arity[p.arity] if c.dom == p] for p in phis
        ]
        for alpha in outer_cells:
            for betas in itertools.product(*inner_pools):
                if tuple(b.target_germ for b in betas) != alpha.source_germs:
                    continue
                cod_key = (alpha.cod, tuple(b.cod for b in betas))
                if cod_key not in compose_ops:
                    continue
                compose_cells[(alpha, betas)] = compose_two_cells(alpha, betas)
                if len(compose_cells) > max_cells:
                    raise FragmentCapExceeded(f"cell cap {max_cells} exceeded")

    act_ops: dict = {}
    act_cells: dict = {}
    for op in ops_sorted:
        for sigma in itertools.permutations(range(op.arity)):
            act_ops[(op, sigma)] = permute_bordism(op, sigma)
    for n in sorted(cells_by_arity):
        for cell in cells_by_arity[n]:
            for sigma in itertools.permutations(range(n)):
                act_cells[(cell, sigma)] = permute_cell(cell, sigma)

    unit_ops = {c: unit_bordism(c) for c in color_list}
    unit_cells = {g: germ_to_cell(g) for g in germ_list}

    left_unitors: dict = {}
    right_unitors: dict = {}
    for op in ops_sorted:
        want_left = (unit_bordism(op.target), (op,)) in compose_ops
        units_in = tuple(unit_bordism(s) for s in op.sources)
        want_right = (op, units_in) in compose_ops
        if want_left or want_right:
            left, right = unitor_cells(op)
            if want_left:
                left_unitors[op] = left
            if want_right:
                right_unitors[op] = right

    by_outer: dict[Bordism, list[tuple]] = {}
    for (psi, phis) in compose_ops:
        by_outer.setdefault(psi, []).append(phis)
    associators: dict = {}
    for psi in ops_sorted:
        for phis in sorted(by_outer.get(psi, []), key=str):
            pools = [sorted(by_outer.get(p, []), key=str) for p in phis]
            if any(not pool for pool in pools):
                continue
            middle = compose_ops[(psi, phis)]
            for chis in itertools.product(*pools):
                flat = tuple(itertools.chain.from_iterable(chis))
                if (middle, flat) not in compose_ops:
                    continue
                inner_comps = tuple(
                    compose_ops[(p, c)] for p, c in zip(phis, chis)
                )
                if (psi, inner_comps) not in compose_ops:
                    continue
                associators[(psi, phis, chis)] = coherence_cells(psi, phis, chis)
                if len(associators) > max_cells:
                    raise FragmentCapExceeded(f"cell cap {max_cells} exceeded")

    return PseudoOperadData(
        objects=objects,
        op_groupoids=op_groupoids,
        op_inputs={op: op.sources for op in ops_sorted},
        op_output={op: op.target for op in ops_sorted},
        cell_inputs=cell_inputs,
        cell_output=cell_output,
        compose_ops=compose_ops,
        compose_cells=compose_cells,
        unit_ops=unit_ops,
        unit_cells=unit_cells,
        act_ops=act_ops,
        act_cells=act_cells,
        associators=associators,
        left_unitors=left_unitors,
        right_unitors=right_unitors,
        name=f"bordism-fragment(depth={depth})",
        compose_op_fn=lambda psi, phis: compose_bordisms(psi, tuple(phis)),
        act_op_fn=lambda op, sigma: permute_bordism(op, sigma),
        op_link_fn=lambda a, b: bool(globular_cells_between(a, b, limit=1)),
    )


def truncate_bordisms(fragment: PseudoOperadData) -> Operad:
    """Collapse a fragment along its globular cells into an honest operad."""
    return tau(fragment)
