"""Region/surface model translation: windows, zig-zags, and round trips."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalops.bordism import Bordism, PointedObject, unit_bordism
from causalops.causal_core import CausalEmbedding, CausalSet
from causalops.errors import (
    AdditivityRequired,
    FragmentCapExceeded,
    NoLaterSurface,
    TimeSliceRequired,
)
from causalops.operad_kernel import (
    EmbeddingTuple,
    check_operad_axioms,
    prefactorization_operad,
)
from causalops.qft_models import (
    Monoid,
    MonoidHom,
    aqft_model,
    check_additivity_aqft,
    check_additivity_fqft,
    check_einstein_causality,
    check_time_slice_aqft,
    check_time_slice_fqft,
    compose_monoid_homs,
    constant_aqft,
    constant_fqft,
    fqft_model,
    validate_aqft,
    validate_fqft,
)
from causalops.translate import (
    aqft_to_fqft,
    build_translation_context,
    chain_translation_context,
    diamond_translation_context,
    derive_zigzag,
    evaluate_zigzag,
    fqft_to_aqft,
    later_surfaces,
    resolve_bordism_class,
    roundtrip_aqft,
    roundtrip_fqft,
    sigma_colimit,
    translate_transformation_a2f,
    translate_transformation_f2a,
    translation_window,
    validate_translation_context,
    wrapper_bordism,
)

import oracles

Z2 = Monoid.cyclic(2)
Z3 = Monoid.cyclic(3)
Z4 = Monoid.cyclic(4)
TRIV = Monoid.trivial()


def fs(s: str) -> frozenset:
    return frozenset(s)


@st.composite
def poset_data(draw, max_events=4):
    n = draw(st.integers(min_value=1, max_value=max_events))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    bias = draw(st.sampled_from([0.15, 0.3, 0.5]))
    return oracles.random_poset_data(random.Random(seed), n, bias)


def times(k: int) -> MonoidHom:
    return MonoidHom.unary(Z4, Z4, {x: (k * x) % 4 for x in Z4.elements})


def diamond_region(ctx) -> CausalSet:
    return next(M for M in ctx.aqft_fragment.colors if len(M) == 4)


def unary_ops_into(base, target, image):
    return [op for op in base.operations
            if len(op.maps) == 1 and op.target is target
            and frozenset(op.maps[0].image) == image]


def skew_model():
    """Diamond model with a non-invertible image on the off-surface inclusions.

    The two lower singleton inclusions double, the bottom one triples, and
    binary operations add the doubled arguments; compatibility with the
    operad laws pins everything else to identities and unit picks.
    """
    ctx = diamond_translation_context()
    base = ctx.aqft_fragment
    D = diamond_region(ctx)
    colors = {M: Z4 for M in base.colors}
    ops = {}
    for op in base.operations:
        if len(op.maps) == 0:
            ops[op] = MonoidHom((), Z4, {(): 0})
        elif len(op.maps) == 1:
            image = frozenset(op.maps[0].image)
            if op.target is D and image == fs("a"):
                ops[op] = times(3)
            elif op.target is D and len(image) == 1 and image <= fs("bc"):
                ops[op] = times(2)
            else:
                ops[op] = times(1)
        else:
            ops[op] = MonoidHom((Z4, Z4), Z4,
                                {(x, y): (2 * x + 2 * y) % 4
                                 for x in range(4) for y in range(4)})
    return aqft_model(base, colors, ops, name="skew")


def conjugated_model():
    """Surface model whose colimit legs are forced away from identities."""
    ctx = diamond_translation_context()
    translated = aqft_to_fqft(skew_model(), ctx)
    alpha = {
        c: times(3) if len(c.carrier) == 4 and c.surface == fs("a") else times(1)
        for c in ctx.bordism_fragment.colors
    }
    ops = {
        cls: compose_monoid_homs(
            translated.hom(cls).then(alpha[cls.output]),
            tuple(alpha[c].inverse() for c in cls.inputs),
        )
        for cls in ctx.bordism_fragment.operations
    }
    model = fqft_model(ctx.bordism_fragment,
                       {c: Z4 for c in ctx.bordism_fragment.colors},
                       ops, name="conjugated")
    return model, translated, alpha


class TestLaterSurfaces:
    def test_diamond_identity_decorations(self):
        ctx = diamond_translation_context()
        D = diamond_region(ctx)
        ident = ctx.aqft_fragment.unit(D)
        assert later_surfaces(ident, (fs("a"),)) == (fs("a"), fs("bc"), fs("d"))
        assert later_surfaces(ident, (fs("bc"),)) == (fs("bc"), fs("d"))
        assert later_surfaces(ident, (fs("d"),)) == (fs("d"),)

    def test_off_surface_inclusion_needs_the_top(self):
        ctx = diamond_translation_context()
        D = diamond_region(ctx)
        for image in (fs("b"), fs("c")):
            for op in unary_ops_into(ctx.aqft_fragment, D, image):
                assert later_surfaces(op, (op.maps[0].image,)) == (fs("d"),)

    def test_binary_inclusions_need_the_top(self):
        ctx = diamond_translation_context()
        base = ctx.aqft_fragment
        binaries = [op for op in base.operations if len(op.maps) == 2]
        assert len(binaries) == 18
        for op in binaries:
            surfaces = tuple(m.image for m in op.maps)
            assert later_surfaces(op, surfaces) == (fs("d"),)

    def test_empty_tuples_accept_every_surface(self):
        ctx = diamond_translation_context()
        D = diamond_region(ctx)
        nullary = next(op for op in ctx.aqft_fragment.operations
                       if not op.maps and op.target is D)
        assert later_surfaces(nullary, ()) == (fs("a"), fs("bc"), fs("d"))

    @given(poset_data(max_events=5))
    @settings(max_examples=25, deadline=None)
    def test_maximal_antichain_always_decorates_the_identity(self, data):
        events, relations = data
        M = CausalSet(events, relations)
        base = prefactorization_operad((M,))
        ident = base.unit(M)
        top = frozenset(M.maximal_events)
        for surface in later_surfaces(ident, (top,)):
            pass
        for op in base.operations:
            if len(op.maps) != 1:
                continue
            for surface in (top,):
                assert top in later_surfaces(ident, (surface,))


class TestTranslationWindow:
    def test_chain_window_shape(self):
        ctx = chain_translation_context()
        window = ctx.bordism_fragment
        assert len(window.colors) == 4
        assert len(window.operations) == 17
        assert all(len(cls.members) == 1 for cls in window.operations)

    def test_diamond_window_shape(self):
        ctx = diamond_translation_context()
        window = ctx.bordism_fragment
        assert len(window.colors) == 8
        assert len(window.operations) == 46
        sizes = sorted(len(cls.members) for cls in window.operations)
        assert sizes.count(1) == 29 and sizes.count(2) == 17

    def test_disjoint_binary_wrappers_share_a_class(self):
        ctx = diamond_translation_context()
        binaries = [cls for cls in ctx.bordism_fragment.operations
                    if len(cls.inputs) == 2]
        assert len(binaries) == 9
        for cls in binaries:
            images = {
                tuple(sorted(m.image_of(frozenset(m.table))
                             for m in member.maps_in))
                for member in cls.members
            }
            # both orderings of the two incomparable events appear
            assert len(cls.members) == 2
            assert len(images) == 1

    def test_carrier_symmetry_folds_into_the_shift(self):
        ctx = diamond_translation_context()
        D = diamond_region(ctx)
        shift = ctx.resolve(wrapper_bordism(ctx.aqft_fragment.unit(D),
                                            (fs("a"),), fs("d")))
        tables = {tuple(sorted(m.maps_in[0].table.items()))
                  for m in shift.members}
        ident = tuple((e, e) for e in sorted(D.events))
        swapped = tuple(sorted({"a": "a", "b": "c", "c": "b", "d": "d"}.items()))
        assert tables == {ident, swapped}

    def test_both_off_surface_inclusions_share_a_class(self):
        ctx = diamond_translation_context()
        D = diamond_region(ctx)
        op_b = next(op for op in unary_ops_into(ctx.aqft_fragment, D, fs("b"))
                    if op.maps[0].dom.events == ("b",))
        op_c = next(op for op in unary_ops_into(ctx.aqft_fragment, D, fs("c"))
                    if op.maps[0].dom.events == ("b",))
        cls_b = ctx.resolve(wrapper_bordism(op_b, (fs("b"),), fs("d")))
        cls_c = ctx.resolve(wrapper_bordism(op_c, (fs("b"),), fs("d")))
        assert cls_b is cls_c

    def test_units_resolve_to_unit_wrappers(self):
        for ctx in (chain_translation_context(), diamond_translation_context()):
            window = ctx.bordism_fragment
            for color in window.colors:
                assert unit_bordism(color) in window.unit(color).members

    def test_windows_are_strict_operads(self):
        for ctx in (chain_translation_context(), diamond_translation_context()):
            report = check_operad_axioms(ctx.bordism_fragment)
            assert report.ok, report.failures

    def test_resolution_handles_trimmed_composites(self):
        ctx = diamond_translation_context()
        window = ctx.bordism_fragment
        for outer in window.operations:
            for inners in window.composable_inner_tuples(outer):
                assert window.compose(outer, inners) in set(window.operations)

    def test_resolution_rejects_interval_carriers(self):
        ctx = chain_translation_context()
        M = next(c for c in ctx.aqft_fragment.colors if len(c) == 2)
        lo = PointedObject(M.induced({"u"}), fs("u"))
        hi = PointedObject(M.induced({"v"}), fs("v"))
        interval = Bordism(
            (lo,), hi, M,
            (CausalEmbedding(lo.carrier, M, {"u": "u"}),),
            CausalEmbedding(hi.carrier, M, {"v": "v"}),
        )
        with pytest.raises(ValueError, match="no class presenting"):
            resolve_bordism_class(ctx.bordism_fragment, interval)

    def test_resolution_accepts_proper_out_collars(self):
        ctx = chain_translation_context()
        M = next(c for c in ctx.aqft_fragment.colors if len(c) == 2)
        lo = PointedObject(M.induced({"u"}), fs("u"))
        partial = Bordism(
            (lo,), PointedObject(M, fs("v")), M,
            (CausalEmbedding(lo.carrier, M, {"u": "u"}),),
            CausalEmbedding(M.induced({"v"}), M, {"v": "v"}),
        )
        inclusion = next(op for op in ctx.aqft_fragment.operations
                         if len(op.maps) == 1 and op.target is M
                         and op.maps[0].table == {"u": "u"})
        full = ctx.resolve(wrapper_bordism(inclusion, (fs("u"),), fs("v")))
        assert resolve_bordism_class(ctx.bordism_fragment, partial) is full

    def test_operation_cap_trips(self):
        ctx = diamond_translation_context()
        with pytest.raises(FragmentCapExceeded):
            translation_window(ctx.aqft_fragment, max_ops=5)


class TestZigZags:
    def test_wrapper_zigzags_reuse_the_wrapped_operation(self):
        ctx = diamond_translation_context()
        for cls in ctx.bordism_fragment.operations:
            member = sorted(cls.members, key=str)[0]
            zz = ctx.bridge[cls][0]
            assert zz.middle == EmbeddingTuple(member.maps_in, member.carrier)
            units = [ctx.aqft_fragment.unit(src.carrier) for src in member.sources]
            assert list(zz.left) == units
            assert zz.right_in == ctx.aqft_fragment.unit(member.carrier)
            assert zz.right_out == ctx.aqft_fragment.unit(member.target.carrier)

    def test_unmaterialized_collars_yield_nothing(self):
        ctx = diamond_translation_context()
        D = diamond_region(ctx)
        lo = PointedObject(D.induced({"a"}), fs("a"))
        partial = Bordism(
            (lo,), PointedObject(D, fs("d")), D,
            (CausalEmbedding(lo.carrier, D, {"a": "a"}),),
            CausalEmbedding(D.induced({"d"}), D, {"d": "d"}),
        )
        assert derive_zigzag(partial, ctx.aqft_fragment) is None

    def test_skew_values_through_zigzags(self):
        ctx = diamond_translation_context()
        model = skew_model()
        D = diamond_region(ctx)
        op = next(op for op in unary_ops_into(ctx.aqft_fragment, D, fs("b"))
                  if op.maps[0].dom.events == ("b",))
        cls = ctx.resolve(wrapper_bordism(op, (fs("b"),), fs("d")))
        assert evaluate_zigzag(model, ctx.bridge[cls][0]) == times(2)
        shift = ctx.resolve(wrapper_bordism(ctx.aqft_fragment.unit(D),
                                            (fs("a"),), fs("d")))
        assert evaluate_zigzag(model, ctx.bridge[shift][0]) == times(1)

    def test_noninvertible_cauchy_leg_raises(self):
        ctx = diamond_translation_context()
        model = skew_model()
        D = diamond_region(ctx)
        bottom = next(op for op in unary_ops_into(ctx.aqft_fragment, D, fs("a"))
                      if op.maps[0].dom.events == ("a",))
        wrapper = wrapper_bordism(bottom, (fs("a"),), fs("d"))
        zz = derive_zigzag(wrapper, ctx.aqft_fragment)
        crippled = aqft_model(
            ctx.aqft_fragment,
            {M: Z4 for M in ctx.aqft_fragment.colors},
            {op: (times(2) if op == zz.right_in else model.hom(op))
             for op in ctx.aqft_fragment.operations},
        )
        with pytest.raises(TimeSliceRequired, match="does not invert"):
            evaluate_zigzag(crippled, zz)


class TestContexts:
    def test_shipped_contexts_validate(self):
        for ctx in (chain_translation_context(), diamond_translation_context()):
            report = validate_translation_context(ctx)
            assert report.ok, report.failures
            by_check = {e.check: e for e in report.entries}
            assert by_check["context/composition"].witness["checked"] > 0

    def test_missing_bridge_entries_are_reported(self):
        ctx = chain_translation_context()
        thinned = dict(ctx.bridge)
        dropped = next(iter(thinned))
        del thinned[dropped]
        from causalops.translate import TranslationContext

        broken = TranslationContext(ctx.aqft_fragment, ctx.bordism_fragment,
                                    thinned, name="broken")
        report = validate_translation_context(broken)
        assert not report.ok
        assert any(e.check == "context/bridge" and e.status == "fail"
                   for e in report.entries)

    def test_building_requires_collar_descriptions(self):
        M = CausalSet(("u", "v"), (("u", "v"),))
        base = prefactorization_operad((M,))
        ctx = build_translation_context(base, name="bare")
        assert validate_translation_context(ctx).ok

    @given(poset_data(max_events=4))
    @settings(max_examples=10, deadline=None)
    def test_random_single_region_contexts_validate(self, data):
        events, relations = data
        M = CausalSet(events, relations)
        ctx = build_translation_context(prefactorization_operad((M,)))
        assert validate_translation_context(ctx).ok
        assert check_operad_axioms(ctx.bordism_fragment).ok


class TestAqftToFqft:
    def test_constant_models_translate_to_constants(self):
        for ctx in (chain_translation_context(), diamond_translation_context()):
            model = constant_aqft(ctx.aqft_fragment, Z2)
            translated = aqft_to_fqft(model, ctx, debug=True)
            assert validate_fqft(translated).ok
            for color in ctx.bordism_fragment.colors:
                assert translated.value(color) == Z2
            reference = constant_fqft(ctx.bordism_fragment, Z2)
            for cls in ctx.bordism_fragment.operations:
                assert translated.hom(cls) == reference.hom(cls)

    def test_trivial_monoid_translates_trivially(self):
        ctx = chain_translation_context()
        translated = aqft_to_fqft(constant_aqft(ctx.aqft_fragment, TRIV), ctx)
        assert all(translated.value(c) == TRIV
                   for c in ctx.bordism_fragment.colors)

    def test_identity_classes_map_to_identity_homs(self):
        ctx = diamond_translation_context()
        translated = aqft_to_fqft(skew_model(), ctx, debug=True)
        for color in ctx.bordism_fragment.colors:
            unit_cls = ctx.bordism_fragment.unit(color)
            assert translated.hom(unit_cls) == MonoidHom.identity(Z4)

    def test_representatives_agree_for_lawful_models(self):
        ctx = diamond_translation_context()
        model = skew_model()
        for cls in ctx.bordism_fragment.operations:
            images = {evaluate_zigzag(model, zz) for zz in ctx.bridge[cls]}
            assert len(images) == 1, str(cls)

    def test_skew_images(self):
        ctx = diamond_translation_context()
        model = skew_model()
        translated = aqft_to_fqft(model, ctx, debug=True)
        D = diamond_region(ctx)
        binary = next(cls for cls in ctx.bordism_fragment.operations
                      if len(cls.inputs) == 2)
        assert translated.hom(binary)(1, 1) == 0
        assert translated.hom(binary)(1, 0) == 2
        bottom = next(op for op in unary_ops_into(ctx.aqft_fragment, D, fs("a"))
                      if op.maps[0].dom.events == ("a",))
        cls = ctx.resolve(wrapper_bordism(bottom, (fs("a"),), fs("a")))
        assert translated.hom(cls) == times(3)

    def test_preserves_time_slice_and_additivity(self):
        cases = [
            (chain_translation_context(), None),
            (diamond_translation_context(), skew_model()),
        ]
        for ctx, model in cases:
            model = model or constant_aqft(ctx.aqft_fragment, Z3)
            translated = aqft_to_fqft(model, ctx)
            assert check_time_slice_fqft(translated).ok
            for color in ctx.bordism_fragment.colors:
                report = check_additivity_fqft(translated, color)
                assert not report.failures, (str(color), report.failures)

    def test_gate_rejects_broken_time_slice(self):
        ctx = diamond_translation_context()
        model = skew_model()
        D = diamond_region(ctx)
        ops = {op: model.hom(op) for op in ctx.aqft_fragment.operations}
        for op in unary_ops_into(ctx.aqft_fragment, D, fs("d")):
            ops[op] = times(2)
        broken = aqft_model(ctx.aqft_fragment,
                            {M: Z4 for M in ctx.aqft_fragment.colors}, ops)
        with pytest.raises(TimeSliceRequired, match="time-slice fails"):
            aqft_to_fqft(broken, ctx)

    def test_foreign_models_are_rejected(self):
        chain = chain_translation_context()
        diamond = diamond_translation_context()
        model = constant_aqft(chain.aqft_fragment, Z2)
        with pytest.raises(ValueError, match="different region fragment"):
            aqft_to_fqft(model, diamond)


class TestFqftToAqft:
    def test_constant_models_translate_to_constants(self):
        for ctx in (chain_translation_context(), diamond_translation_context()):
            model = constant_fqft(ctx.bordism_fragment, Z2)
            back = fqft_to_aqft(model, ctx, debug=True)
            assert validate_aqft(back).ok
            reference = constant_aqft(ctx.aqft_fragment, Z2)
            for M in ctx.aqft_fragment.colors:
                assert back.value(M) == Z2
            for op in ctx.aqft_fragment.operations:
                assert back.hom(op) == reference.hom(op)

    def test_cauchy_inclusions_land_on_conjugated_class_images(self):
        ctx = diamond_translation_context()
        surface_model = aqft_to_fqft(skew_model(), ctx, debug=True)
        back = fqft_to_aqft(surface_model, ctx, debug=True)
        D = diamond_region(ctx)
        bottom = next(op for op in unary_ops_into(ctx.aqft_fragment, D, fs("a"))
                      if op.maps[0].dom.events == ("a",))
        for later in later_surfaces(bottom, (fs("a"),)):
            cls = ctx.resolve(wrapper_bordism(bottom, (fs("a"),), later))
            assert back.hom(bottom) == surface_model.hom(cls)

    def test_binary_recipe_matches_every_presentation(self):
        ctx = diamond_translation_context()
        surface_model = aqft_to_fqft(skew_model(), ctx, debug=True)
        back = fqft_to_aqft(surface_model, ctx, debug=True)
        binary = next(op for op in ctx.aqft_fragment.operations
                      if len(op.maps) == 2)
        surfaces = tuple(m.image for m in binary.maps)
        cls = ctx.resolve(wrapper_bordism(binary, surfaces, fs("d")))
        assert back.hom(binary) == surface_model.hom(cls)
        recomputed = MonoidHom(
            back.hom(binary).doms, back.value(binary.target),
            {args: surface_model.hom(cls)(*args)
             for args in itertools.product(*(m.elements
                                             for m in back.hom(binary).doms))},
        )
        assert recomputed == back.hom(binary)

    def test_outputs_stay_lawful_and_causal(self):
        ctx = diamond_translation_context()
        surface_model = aqft_to_fqft(skew_model(), ctx)
        back = fqft_to_aqft(surface_model, ctx)
        assert validate_aqft(back).ok
        assert check_time_slice_aqft(back).ok
        assert check_einstein_causality(back).ok
        for M in ctx.aqft_fragment.colors:
            report = check_additivity_aqft(back, M)
            assert not report.failures

    def test_conjugated_colimits_do_not_collapse(self):
        ctx = diamond_translation_context()
        model, _, _ = conjugated_model()
        D = diamond_region(ctx)
        colim = sigma_colimit(model, ctx, D)
        assert not colim.collapsed
        assert len(colim.monoid) == 4
        assert all(colim.legs[s].is_isomorphism
                   for s in ctx.surface_families[D])
        back = fqft_to_aqft(model, ctx, debug=True)
        assert validate_aqft(back).ok
        assert check_time_slice_aqft(back).ok

    def test_gate_rejects_broken_additivity(self):
        ctx = diamond_translation_context()
        reference = aqft_to_fqft(constant_aqft(ctx.aqft_fragment, Z2), ctx)
        zero = MonoidHom.unary(Z2, Z2, {0: 0, 1: 0})
        upper = next(c for c in ctx.bordism_fragment.colors
                     if len(c.carrier) == 4 and c.surface == fs("bc"))
        ops = {}
        for cls in ctx.bordism_fragment.operations:
            pinched = (cls.output == upper and len(cls.inputs) == 1
                       and cls.inputs[0].carrier.events == ("a",))
            ops[cls] = zero if pinched else reference.hom(cls)
        broken = fqft_model(ctx.bordism_fragment,
                            {c: Z2 for c in ctx.bordism_fragment.colors}, ops)
        with pytest.raises(AdditivityRequired, match="additivity fails"):
            fqft_to_aqft(broken, ctx)

    def test_pinched_top_surfaces_raise(self):
        D = CausalSet(("a", "b", "c", "d"),
                      (("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")))
        open_top = D.induced({"a", "b", "c"})
        base = prefactorization_operad(
            (open_top, D.induced({"a"}), D.induced({"b"}), D.induced({"c"})))
        ctx = build_translation_context(base, name="open-top")
        assert validate_translation_context(ctx).ok
        model = constant_fqft(ctx.bordism_fragment, Z2)
        with pytest.raises(NoLaterSurface, match="no Cauchy antichain"):
            fqft_to_aqft(model, ctx)

    def test_foreign_models_are_rejected(self):
        chain = chain_translation_context()
        diamond = diamond_translation_context()
        model = constant_fqft(chain.bordism_fragment, Z2)
        with pytest.raises(ValueError, match="different bordism window"):
            fqft_to_aqft(model, diamond)


class TestRoundTrips:
    @pytest.mark.parametrize("monoid", [TRIV, Z2, Z3, Z4], ids=str)
    def test_constant_region_round_trip_is_exact(self, monoid):
        for ctx in (chain_translation_context(), diamond_translation_context()):
            report = roundtrip_aqft(constant_aqft(ctx.aqft_fragment, monoid),
                                    ctx, debug=True)
            assert report.ok, report.failures

    def test_skew_round_trip_is_exact(self):
        ctx = diamond_translation_context()
        model = skew_model()
        report = roundtrip_aqft(model, ctx, debug=True)
        assert report.ok, report.failures
        back = fqft_to_aqft(aqft_to_fqft(model, ctx), ctx)
        for op in ctx.aqft_fragment.operations:
            assert back.hom(op) == model.hom(op)

    def test_region_transformations_survive_the_round_trip(self):
        ctx = diamond_translation_context()
        model = skew_model()
        doubling = {M: times(2) for M in ctx.aqft_fragment.colors}
        report = roundtrip_aqft(model, ctx, transformation=(model, doubling),
                                debug=True)
        assert report.ok, report.failures
        identity = {M: times(1) for M in ctx.aqft_fragment.colors}
        report = roundtrip_aqft(model, ctx, transformation=(model, identity))
        assert report.ok, report.failures

    def test_constant_surface_round_trip(self):
        for ctx in (chain_translation_context(), diamond_translation_context()):
            report = roundtrip_fqft(constant_fqft(ctx.bordism_fragment, Z2),
                                    ctx, debug=True)
            assert report.ok, report.failures
            rows = {e.check: e for e in report.entries}
            assert rows["roundtrip/base-diagram"].witness["outside-window"] == 0

    def test_translated_surface_models_round_trip_on_identity_legs(self):
        ctx = diamond_translation_context()
        surface_model = aqft_to_fqft(skew_model(), ctx)
        report = roundtrip_fqft(surface_model, ctx, debug=True)
        assert report.ok, report.failures
        colim = sigma_colimit(surface_model, ctx, diamond_region(ctx))
        assert colim.collapsed

    def test_conjugated_round_trip_has_iso_components(self):
        ctx = diamond_translation_context()
        model, translated, alpha = conjugated_model()
        inverse = {c: alpha[c].inverse() for c in ctx.bordism_fragment.colors}
        report = roundtrip_fqft(model, ctx, transformation=(translated, inverse),
                                debug=True)
        assert report.ok, report.failures

    def test_surface_transformations_keep_their_squares(self):
        ctx = diamond_translation_context()
        model, translated, alpha = conjugated_model()
        report = roundtrip_fqft(translated, ctx, transformation=(model, alpha),
                                debug=True)
        assert report.ok, report.failures

    def test_nonnatural_components_fail_the_mediator_in_debug(self):
        ctx = diamond_translation_context()
        model, translated, alpha = conjugated_model()
        skewed = dict(alpha)
        skewed[next(iter(skewed))] = times(2)
        with pytest.raises(AssertionError, match="not constant"):
            translate_transformation_f2a(skewed, translated, model, ctx,
                                         debug=True)

    @given(poset_data(max_events=4))
    @settings(max_examples=10, deadline=None)
    def test_random_single_region_round_trips_exactly(self, data):
        events, relations = data
        M = CausalSet(events, relations)
        ctx = build_translation_context(prefactorization_operad((M,)))
        report = roundtrip_aqft(constant_aqft(ctx.aqft_fragment, Z2), ctx,
                                debug=True)
        assert report.ok, report.failures
