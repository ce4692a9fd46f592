"""Colored symmetric operads with finite, inspectable structure.

Operations are interned hashable tokens exposing ``inputs`` (a tuple of
colors) and ``output`` (a color).  Composition, units and the right
symmetric-group action are table- or callable-backed and memoized, so
concrete operads (explicit tables, embedding tuples over causal-set
fragments, truncated bordism classes) share one checker.

Permutations are 0-based one-line tuples acting on tuples from the right:
``apply_permutation(t, s)[i] == t[s[i]]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .causal_core import CausalEmbedding, CausalSet, are_causally_disjoint
from .errors import FragmentCapExceeded
from .report import FAIL, PASS, Report

__all__ = [
    "identity_permutation",
    "apply_permutation",
    "compose_permutations",
    "invert_permutation",
    "block_permutation",
    "sum_permutation",
    "all_permutations",
    "Operation",
    "EmbeddingTuple",
    "Operad",
    "check_operad_axioms",
    "prefactorization_operad",
    "enumerate_embeddings",
    "Multifunctor",
    "MultinaturalTransformation",
    "check_multifunctor",
    "check_multinatural",
    "compose_multifunctors",
    "vertical_compose",
    "whisker_functor",
    "whisker_transformation",
    "FiniteGroupoid",
    "Functor",
]


# ---- permutation algebra -----------------------------------------------------


def identity_permutation(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def apply_permutation(items: Sequence, sigma: Sequence[int]) -> tuple:
    if len(items) != len(sigma):
        raise ValueError("permutation length mismatch")
    return tuple(items[i] for i in sigma)


def compose_permutations(sigma: Sequence[int], tau: Sequence[int]) -> tuple[int, ...]:
    """The permutation acting as sigma-then-tau on tuples."""
    return tuple(sigma[i] for i in tau)


def invert_permutation(sigma: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(sigma)
    for i, s in enumerate(sigma):
        out[s] = i
    return tuple(out)


def block_permutation(sigma: Sequence[int], arities: Sequence[int]) -> tuple[int, ...]:
    """Permute concatenated index blocks of the given sizes as sigma permutes blocks."""
    if len(sigma) != len(arities):
        raise ValueError("sigma and arities must have equal length")
    offsets = [0]
    for k in arities:
        offsets.append(offsets[-1] + k)
    out: list[int] = []
    for i in sigma:
        out.extend(range(offsets[i], offsets[i] + arities[i]))
    return tuple(out)


def sum_permutation(sigmas: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Blockwise direct sum sigma_1 + ... + sigma_n."""
    out: list[int] = []
    offset = 0
    for s in sigmas:
        out.extend(offset + i for i in s)
        offset += len(s)
    return tuple(out)


def all_permutations(n: int) -> Iterator[tuple[int, ...]]:
    return itertools.permutations(range(n))


# ---- operation tokens ---------------------------------------------------------


@dataclass(frozen=True)
class Operation:
    """Opaque named operation of an explicitly tabulated operad."""

    name: str
    inputs: tuple[Hashable, ...]
    output: Hashable

    def __str__(self) -> str:
        ins = ",".join(str(c) for c in self.inputs)
        return f"{self.name}:({ins})->{self.output}"


@dataclass(frozen=True)
class EmbeddingTuple:
    """A prefactorization operation: disjoint embeddings into one target."""

    maps: tuple[CausalEmbedding, ...]
    target: CausalSet

    def __post_init__(self) -> None:
        for f in self.maps:
            if f.cod != self.target:
                raise ValueError("embedding codomain differs from the target")
        for f, g in itertools.combinations(self.maps, 2):
            if not are_causally_disjoint(self.target, f.image, g.image):
                raise ValueError("embedding images are not pairwise causally disjoint")

    @property
    def inputs(self) -> tuple[CausalSet, ...]:
        return tuple(f.dom for f in self.maps)

    @property
    def output(self) -> CausalSet:
        return self.target

    def __str__(self) -> str:
        legs = ";".join(
            ",".join(f"{a}>{b}" for a, b in f.pairs) or "()" for f in self.maps
        )
        return f"[{legs}]->{'|'.join(self.target.events) or 'empty'}"


# ---- the operad container -----------------------------------------------------


class Operad:
    """A colored symmetric operad given by tokens plus composition rules.

    ``compose_rule``/``action_rule`` may be dicts (explicit tables) or
    callables (computed operads); results are memoized either way.  The
    listed ``operations`` are the materialized window; computed operads may
    return values outside it (e.g. higher-arity composites), which is fine
    for law checking since tokens compare by value.
    """

    def __init__(
        self,
        colors: Iterable[Hashable],
        operations: Iterable[Hashable],
        units: Mapping[Hashable, Hashable],
        compose_rule,
        action_rule,
        name: str = "operad",
    ):
        self.name = name
        self.colors = tuple(dict.fromkeys(colors))
        self.operations = tuple(dict.fromkeys(operations))
        self._units = dict(units)
        self._compose_rule = compose_rule
        self._action_rule = action_rule
        self._compose_memo: dict = {}
        self._action_memo: dict = {}
        for c in self._units:
            if c not in set(self.colors):
                raise ValueError(f"unit declared for unknown color {c!r}")

    def __repr__(self) -> str:
        return f"Operad({self.name}, colors={len(self.colors)}, ops={len(self.operations)})"

    def ops(self, arity: int | None = None) -> tuple:
        if arity is None:
            return self.operations
        return tuple(op for op in self.operations if len(op.inputs) == arity)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(sorted({len(op.inputs) for op in self.operations}))

    def unit(self, color: Hashable):
        try:
            return self._units[color]
        except KeyError:
            raise ValueError(f"no unit for color {color!r}") from None

    def compose(self, outer, inners: Sequence):
        inners = tuple(inners)
        if len(inners) != len(outer.inputs):
            raise ValueError("arity mismatch in composition")
        for slot, inner in zip(outer.inputs, inners):
            if inner.output != slot:
                raise ValueError("input color mismatch in composition")
        key = (outer, inners)
        if key in self._compose_memo:
            return self._compose_memo[key]
        if isinstance(self._compose_rule, Mapping):
            try:
                result = self._compose_rule[key]
            except KeyError:
                raise ValueError(
                    f"composition not tabulated for {outer} with {len(inners)} inners"
                ) from None
        else:
            result = self._compose_rule(outer, inners)
        expected_inputs = tuple(
            itertools.chain.from_iterable(inner.inputs for inner in inners)
        )
        if result.inputs != expected_inputs or result.output != outer.output:
            raise ValueError(f"composition rule broke the signature at {outer}")
        self._compose_memo[key] = result
        return result

    def act(self, op, sigma: Sequence[int]):
        sigma = tuple(sigma)
        if len(sigma) != len(op.inputs):
            raise ValueError("permutation arity mismatch")
        key = (op, sigma)
        if key in self._action_memo:
            return self._action_memo[key]
        if isinstance(self._action_rule, Mapping):
            try:
                result = self._action_rule[key]
            except KeyError:
                raise ValueError(f"action not tabulated for {op} by {sigma}") from None
        else:
            result = self._action_rule(op, sigma)
        if result.inputs != apply_permutation(op.inputs, sigma) or result.output != op.output:
            raise ValueError(f"action rule broke the signature at {op}")
        self._action_memo[key] = result
        return result

    def composable_inner_tuples(self, outer) -> Iterator[tuple]:
        pools = [self.ops_with_output(c) for c in outer.inputs]
        return itertools.product(*pools)

    def ops_with_output(self, color) -> tuple:
        return tuple(op for op in self.operations if op.output == color)


# ---- axiom checking ------------------------------------------------------------


def check_operad_axioms(
    operad: Operad,
    report: Report | None = None,
    max_assoc_checks: int | None = 200_000,
) -> Report:
    """Exhaustively verify the operad laws over the materialized operations.

    Checks signatures, unit laws, associativity, the right action and both
    equivariance compatibilities; every failure is reported with a
    counterexample witness.
    """
    rep = report if report is not None else Report()
    target = operad.name
    colors = set(operad.colors)

    bad = [op for op in operad.operations if op.output not in colors
           or any(c not in colors for c in op.inputs)]
    rep.add("operad/signatures", target, FAIL if bad else PASS,
            witness=[str(op) for op in bad[:3]] or None)

    unit_bad = []
    for c in operad.colors:
        try:
            u = operad.unit(c)
        except ValueError:
            unit_bad.append(f"missing unit for {c}")
            continue
        if u.inputs != (c,) or u.output != c:
            unit_bad.append(f"unit of {c} has wrong signature")
    rep.add("operad/units-present", target, FAIL if unit_bad else PASS,
            witness=unit_bad[:3] or None)

    unit_law_bad = []
    if not unit_bad:
        try:
            for op in operad.operations:
                left = operad.compose(operad.unit(op.output), (op,))
                if left != op:
                    unit_law_bad.append(f"unit;{op} != {op}")
                right = operad.compose(op, tuple(operad.unit(c) for c in op.inputs))
                if right != op:
                    unit_law_bad.append(f"{op};units != {op}")
        except ValueError as exc:
            unit_law_bad.append(str(exc))
    rep.add("operad/unit-laws", target, FAIL if unit_law_bad else PASS,
            witness=unit_law_bad[:3] or None)

    assoc_bad = []
    checked = 0
    budget_hit = False
    try:
        for psi in operad.operations:
            for phis in operad.composable_inner_tuples(psi):
                middle = operad.compose(psi, phis)
                for chis in itertools.product(
                    *[tuple(operad.composable_inner_tuples(phi)) for phi in phis]
                ):
                    checked += 1
                    if max_assoc_checks is not None and checked > max_assoc_checks:
                        budget_hit = True
                        break
                    flat = tuple(itertools.chain.from_iterable(chis))
                    lhs = operad.compose(middle, flat)
                    rhs = operad.compose(
                        psi, tuple(operad.compose(phi, chi) for phi, chi in zip(phis, chis))
                    )
                    if lhs != rhs:
                        assoc_bad.append(f"({psi}; {[str(p) for p in phis]})")
                if budget_hit:
                    break
            if budget_hit:
                break
    except ValueError as exc:
        assoc_bad.append(str(exc))
    rep.add("operad/associativity", target, FAIL if assoc_bad else PASS,
            witness=assoc_bad[:3] or {"checked": checked})

    action_bad = []
    equiv_bad = []
    try:
        for op in operad.operations:
            n = len(op.inputs)
            if operad.act(op, identity_permutation(n)) != op:
                action_bad.append(f"identity action moved {op}")
            for sigma in all_permutations(n):
                moved = operad.act(op, sigma)
                for tau in all_permutations(n):
                    lhs = operad.act(moved, tau)
                    rhs = operad.act(op, compose_permutations(sigma, tau))
                    if lhs != rhs:
                        action_bad.append(f"{op} under {sigma} then {tau}")
    except ValueError as exc:
        action_bad.append(str(exc))
    rep.add("operad/right-action", target, FAIL if action_bad else PASS,
            witness=action_bad[:3] or None)

    try:
        for psi in operad.operations:
            n = len(psi.inputs)
            for phis in operad.composable_inner_tuples(psi):
                arities = tuple(len(phi.inputs) for phi in phis)
                composite = operad.compose(psi, phis)
                for sigma in all_permutations(n):
                    lhs = operad.compose(
                        operad.act(psi, sigma), apply_permutation(phis, sigma)
                    )
                    rhs = operad.act(composite, block_permutation(sigma, arities))
                    if lhs != rhs:
                        equiv_bad.append(f"block equivariance at ({psi}, {sigma})")
                for taus in itertools.product(*[tuple(all_permutations(k)) for k in arities]):
                    lhs = operad.compose(
                        psi, tuple(operad.act(phi, t) for phi, t in zip(phis, taus))
                    )
                    rhs = operad.act(composite, sum_permutation(taus))
                    if lhs != rhs:
                        equiv_bad.append(f"sum equivariance at ({psi}, {taus})")
    except ValueError as exc:
        equiv_bad.append(str(exc))
    rep.add("operad/equivariance", target, FAIL if equiv_bad else PASS,
            witness=equiv_bad[:3] or None)
    return rep


# ---- prefactorization operads ----------------------------------------------------


def enumerate_embeddings(dom: CausalSet, cod: CausalSet) -> Iterator[CausalEmbedding]:
    """All order embeddings with causally convex image, by backtracking."""
    events = sorted(dom.events)
    cod_events = sorted(cod.events)

    def extend(assign: dict[str, str], used: set[str], k: int) -> Iterator[dict[str, str]]:
        if k == len(events):
            yield dict(assign)
            return
        e = events[k]
        for target in cod_events:
            if target in used:
                continue
            ok = True
            for prev, img in assign.items():
                if dom.le(prev, e) != cod.le(img, target):
                    ok = False
                    break
                if dom.le(e, prev) != cod.le(target, img):
                    ok = False
                    break
            if ok:
                assign[e] = target
                used.add(target)
                yield from extend(assign, used, k + 1)
                del assign[e]
                used.remove(target)

    from .causal_core import is_causally_convex

    for assign in extend({}, set(), 0):
        if is_causally_convex(cod, set(assign.values())):
            yield CausalEmbedding(dom, cod, assign)


def prefactorization_operad(
    fragment: Sequence[CausalSet],
    max_arity: int = 3,
    max_colors: int = 6,
    max_events: int = 8,
    max_ops: int = 20_000,
) -> Operad:
    """The operad of pairwise causally disjoint embedding tuples.

    Colors are the fragment causal sets; an n-ary operation is a tuple of
    embeddings with pairwise causally disjoint images into a common target,
    with exactly one 0-ary operation per color (the empty tuple).  The
    materialized window stops at ``max_arity``; composition may produce
    higher arities on demand.
    """
    colors = tuple(dict.fromkeys(fragment))
    if len(colors) > max_colors:
        raise FragmentCapExceeded(
            f"fragment has {len(colors)} colors, cap is {max_colors}"
        )
    for M in colors:
        if len(M) > max_events:
            raise FragmentCapExceeded(
                f"fragment color with {len(M)} events exceeds cap {max_events}"
            )

    singles: dict[tuple[CausalSet, CausalSet], tuple[CausalEmbedding, ...]] = {}
    for dom, cod in itertools.product(colors, repeat=2):
        singles[(dom, cod)] = tuple(enumerate_embeddings(dom, cod))

    operations: list[EmbeddingTuple] = []
    count = 0
    for target in colors:
        for arity in range(0, max_arity + 1):
            if arity == 0:
                operations.append(EmbeddingTuple((), target))
                count += 1
                continue
            pools = [
                emb
                for dom in colors
                for emb in singles[(dom, target)]
            ]
            for combo in itertools.product(pools, repeat=arity):
                if all(
                    are_causally_disjoint(target, f.image, g.image)
                    for f, g in itertools.combinations(combo, 2)
                ):
                    operations.append(EmbeddingTuple(tuple(combo), target))
                    count += 1
                    if count > max_ops:
                        raise FragmentCapExceeded(
                            f"embedding enumeration overflow: more than {max_ops} operations"
                        )

    units = {
        M: EmbeddingTuple((CausalEmbedding.identity(M),), M) for M in colors
    }

    def compose_rule(outer: EmbeddingTuple, inners: tuple[EmbeddingTuple, ...]) -> EmbeddingTuple:
        maps = []
        for leg, inner in zip(outer.maps, inners):
            maps.extend(inner_map.then(leg) for inner_map in inner.maps)
        return EmbeddingTuple(tuple(maps), outer.target)

    def action_rule(op: EmbeddingTuple, sigma: tuple[int, ...]) -> EmbeddingTuple:
        return EmbeddingTuple(apply_permutation(op.maps, sigma), op.target)

    return Operad(colors, operations, units, compose_rule, action_rule,
                  name="prefactorization")


# ---- multifunctors and transformations -------------------------------------------


@dataclass(frozen=True)
class Multifunctor:
    source: Operad
    target: Operad
    on_colors: Mapping
    on_ops: Mapping

    def color(self, c):
        return self.on_colors[c]

    def op(self, psi):
        return self.on_ops[psi]


def check_multifunctor(F: Multifunctor, report: Report | None = None) -> Report:
    rep = report if report is not None else Report()
    tgt = f"{F.source.name}->{F.target.name}"
    sig_bad = []
    for psi in F.source.operations:
        image = F.op(psi)
        if image.inputs != tuple(F.color(c) for c in psi.inputs) or image.output != F.color(psi.output):
            sig_bad.append(str(psi))
    rep.add("multifunctor/signatures", tgt, FAIL if sig_bad else PASS,
            witness=sig_bad[:3] or None)

    unit_bad = [
        str(c)
        for c in F.source.colors
        if F.op(F.source.unit(c)) != F.target.unit(F.color(c))
    ]
    rep.add("multifunctor/units", tgt, FAIL if unit_bad else PASS,
            witness=unit_bad[:3] or None)

    comp_bad = []
    for psi in F.source.operations:
        for phis in F.source.composable_inner_tuples(psi):
            lhs = F.op(F.source.compose(psi, phis))
            rhs = F.target.compose(F.op(psi), tuple(F.op(p) for p in phis))
            if lhs != rhs:
                comp_bad.append(str(psi))
    rep.add("multifunctor/composition", tgt, FAIL if comp_bad else PASS,
            witness=comp_bad[:3] or None)

    act_bad = []
    for psi in F.source.operations:
        for sigma in all_permutations(len(psi.inputs)):
            if F.op(F.source.act(psi, sigma)) != F.target.act(F.op(psi), sigma):
                act_bad.append(f"{psi} under {sigma}")
    rep.add("multifunctor/equivariance", tgt, FAIL if act_bad else PASS,
            witness=act_bad[:3] or None)
    return rep


@dataclass(frozen=True)
class MultinaturalTransformation:
    source: Multifunctor
    target: Multifunctor
    components: Mapping  # color of the common source operad -> 1-ary op of the common target


def check_multinatural(zeta: MultinaturalTransformation, report: Report | None = None) -> Report:
    rep = report if report is not None else Report()
    F, G = zeta.source, zeta.target
    if F.source is not G.source or F.target is not G.target:
        raise ValueError("transformation endpoints do not share operads")
    O, T = F.source, F.target
    tgt = f"{O.name}=>{T.name}"
    comp_bad = []
    for c in O.colors:
        comp = zeta.components[c]
        if comp.inputs != (F.color(c),) or comp.output != G.color(c):
            comp_bad.append(str(c))
    rep.add("multinatural/components", tgt, FAIL if comp_bad else PASS,
            witness=comp_bad[:3] or None)

    nat_bad = []
    for psi in O.operations:
        lhs = T.compose(zeta.components[psi.output], (F.op(psi),))
        rhs = T.compose(G.op(psi), tuple(zeta.components[c] for c in psi.inputs))
        if lhs != rhs:
            nat_bad.append(str(psi))
    rep.add("multinatural/naturality", tgt, FAIL if nat_bad else PASS,
            witness=nat_bad[:3] or None)
    return rep


def compose_multifunctors(F: Multifunctor, G: Multifunctor) -> Multifunctor:
    """G after F."""
    if F.target is not G.source:
        raise ValueError("multifunctors do not compose")
    return Multifunctor(
        F.source,
        G.target,
        {c: G.color(F.color(c)) for c in F.source.colors},
        {psi: G.op(F.op(psi)) for psi in F.source.operations},
    )


def vertical_compose(
    zeta: MultinaturalTransformation, xi: MultinaturalTransformation
) -> MultinaturalTransformation:
    """zeta after xi (components compose in the target operad)."""
    if xi.target is not zeta.source:
        raise ValueError("transformations do not stack")
    T = zeta.source.target
    components = {
        c: T.compose(zeta.components[c], (xi.components[c],))
        for c in zeta.source.source.colors
    }
    return MultinaturalTransformation(xi.source, zeta.target, components)


def whisker_functor(F: Multifunctor, zeta: MultinaturalTransformation) -> MultinaturalTransformation:
    """Precompose a transformation with a multifunctor: (zeta F)_c = zeta_{F(c)}."""
    if zeta.source.source is not F.target:
        raise ValueError("whiskering endpoints do not match")
    components = {c: zeta.components[F.color(c)] for c in F.source.colors}
    return MultinaturalTransformation(
        compose_multifunctors(F, zeta.source),
        compose_multifunctors(F, zeta.target),
        components,
    )


def whisker_transformation(zeta: MultinaturalTransformation, K: Multifunctor) -> MultinaturalTransformation:
    """Postcompose a transformation with a multifunctor: (K zeta)_c = K(zeta_c)."""
    if K.source is not zeta.source.target:
        raise ValueError("whiskering endpoints do not match")
    components = {c: K.op(zeta.components[c]) for c in zeta.source.source.colors}
    return MultinaturalTransformation(
        compose_multifunctors(zeta.source, K),
        compose_multifunctors(zeta.target, K),
        components,
    )


# ---- finite groupoids ---------------------------------------------------------------


class FiniteGroupoid:
    """Objects and invertible morphisms with explicit tables."""

    def __init__(
        self,
        objects: Iterable[Hashable],
        morphisms: Iterable[Hashable],
        src: Mapping,
        tgt: Mapping,
        compose: Mapping | Callable,
        identities: Mapping,
        inverses: Mapping | Callable,
    ):
        self.objects = tuple(dict.fromkeys(objects))
        self.morphisms = tuple(dict.fromkeys(morphisms))
        self._src = dict(src)
        self._tgt = dict(tgt)
        self._compose = compose
        self._id = dict(identities)
        self._inv = inverses
        self._compose_memo: dict = {}

    def __repr__(self) -> str:
        return f"FiniteGroupoid(objects={len(self.objects)}, morphisms={len(self.morphisms)})"

    def src(self, g):
        return self._src[g]

    def tgt(self, g):
        return self._tgt[g]

    def id(self, obj):
        return self._id[obj]

    def compose(self, g, f):
        """g after f."""
        if self.tgt(f) != self.src(g):
            raise ValueError("morphisms do not compose")
        key = (g, f)
        if key in self._compose_memo:
            return self._compose_memo[key]
        if isinstance(self._compose, Mapping):
            result = self._compose[key]
        else:
            result = self._compose(g, f)
        self._compose_memo[key] = result
        return result

    def inv(self, g):
        if isinstance(self._inv, Mapping):
            return self._inv[g]
        return self._inv(g)

    def validate(self, report: Report | None = None, name: str = "groupoid") -> Report:
        rep = report if report is not None else Report()
        bad: list[str] = []
        for g in self.morphisms:
            if self.src(g) not in self.objects or self.tgt(g) not in self.objects:
                bad.append(f"dangling morphism {g}")
        for obj in self.objects:
            i = self.id(obj)
            if self.src(i) != obj or self.tgt(i) != obj:
                bad.append(f"identity of {obj} has wrong endpoints")
        rep.add("groupoid/endpoints", name, FAIL if bad else PASS, witness=bad[:3] or None)

        law_bad: list[str] = []
        for g in self.morphisms:
            if self.compose(g, self.id(self.src(g))) != g:
                law_bad.append(f"right identity at {g}")
            if self.compose(self.id(self.tgt(g)), g) != g:
                law_bad.append(f"left identity at {g}")
            gi = self.inv(g)
            if self.compose(gi, g) != self.id(self.src(g)):
                law_bad.append(f"left inverse at {g}")
            if self.compose(g, gi) != self.id(self.tgt(g)):
                law_bad.append(f"right inverse at {g}")
        by_src: dict = {}
        for g in self.morphisms:
            by_src.setdefault(self.src(g), []).append(g)
        for f in self.morphisms:
            for g in by_src.get(self.tgt(f), ()):
                gf = self.compose(g, f)
                for h in by_src.get(self.tgt(g), ()):
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                        law_bad.append(f"associativity at ({h},{g},{f})")
        rep.add("groupoid/laws", name, FAIL if law_bad else PASS, witness=law_bad[:3] or None)
        return rep


@dataclass(frozen=True)
class Functor:
    """Mapping between finite groupoids, given by explicit tables."""

    dom: FiniteGroupoid
    cod: FiniteGroupoid
    on_objects: Mapping
    on_morphisms: Mapping

    def obj(self, x):
        return self.on_objects[x]

    def mor(self, g):
        return self.on_morphisms[g]
