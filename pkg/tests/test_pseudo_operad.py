"""Pseudo-operads: fattening, companions, truncation, the strict adjunction."""

import pytest

from causalops import CausalSet, NotFibrant
from causalops.operad_kernel import FiniteGroupoid, prefactorization_operad
from causalops.pseudo_operad import (
    PseudoOperadData,
    check_pseudo_operad,
    check_two_adjunction,
    find_companion,
    iota,
    tau,
    tau_full,
)
from test_operad_kernel import commutative_fold_operad, cyclic_group_operad


class TestIota:
    def test_group_operad_fattens_to_eight_squares(self):
        P = iota(cyclic_group_operad())
        assert len(P.objects.morphisms) == 2  # both unaries are invertible
        assert len(P.all_cells(1)) == 8
        report = check_pseudo_operad(P)
        assert report.ok, report.failures

    def test_fold_operad_fattens_cleanly(self):
        P = iota(commutative_fold_operad())
        report = check_pseudo_operad(P)
        assert report.ok, report.failures
        # pentagon and triangle instances actually ran
        by_check = {e.check: e for e in report.entries}
        assert by_check["pseudo-operad/pentagon"].witness["instances-checked"] > 0
        assert by_check["pseudo-operad/triangle"].witness["instances-checked"] > 0

    def test_prefactorization_fragment_fattens_cleanly(self):
        pt = CausalSet("p", [])
        V = CausalSet("bc", [])
        P = iota(prefactorization_operad([pt, V], max_arity=2))
        report = check_pseudo_operad(P)
        assert report.ok, report.failures

    def test_corrupted_associator_is_caught(self):
        P = iota(cyclic_group_operad())
        key = next(iter(P.associators))
        cells = [c for c in P.all_cells(1) if c.dom != c.cod]
        P.associators[key] = cells[0]  # wrong endpoints, not even globular
        report = check_pseudo_operad(P)
        assert not report.ok


class TestCompanions:
    def test_every_vertical_of_a_fattened_operad_is_its_own_companion(self):
        O = cyclic_group_operad()
        P = iota(O)
        for g in P.objects.morphisms:
            comp = find_companion(P, g)
            assert comp.op == g
            assert P.cell_inputs[comp.unit_binding] == (g,)
            assert P.cell_output[comp.counit_binding] == g

    def test_missing_horizontal_lift_raises_not_fibrant(self):
        objects = FiniteGroupoid(
            ["c", "d"], ["idc", "idd", "g", "ginv"],
            {"idc": "c", "idd": "d", "g": "c", "ginv": "d"},
            {"idc": "c", "idd": "d", "g": "d", "ginv": "c"},
            {
                ("idc", "idc"): "idc", ("g", "idc"): "g",
                ("idd", "g"): "g", ("ginv", "g"): "idc",
                ("idd", "idd"): "idd", ("ginv", "idd"): "ginv",
                ("idc", "ginv"): "ginv", ("g", "ginv"): "idd",
            },
            {"c": "idc", "d": "idd"},
            {"idc": "idc", "idd": "idd", "g": "ginv", "ginv": "g"},
        )
        ops1 = FiniteGroupoid(
            ["uc", "ud"], ["iuc", "iud", "ug", "uginv"],
            {"iuc": "uc", "iud": "ud", "ug": "uc", "uginv": "ud"},
            {"iuc": "uc", "iud": "ud", "ug": "ud", "uginv": "uc"},
            {
                ("iuc", "iuc"): "iuc", ("ug", "iuc"): "ug",
                ("iud", "ug"): "ug", ("uginv", "ug"): "iuc",
                ("iud", "iud"): "iud", ("uginv", "iud"): "uginv",
                ("iuc", "uginv"): "uginv", ("ug", "uginv"): "iud",
            },
            {"uc": "iuc", "ud": "iud"},
            {"iuc": "iuc", "iud": "iud", "ug": "uginv", "uginv": "ug"},
        )
        P = PseudoOperadData(
            objects=objects,
            op_groupoids={1: ops1},
            op_inputs={"uc": ("c",), "ud": ("d",)},
            op_output={"uc": "c", "ud": "d"},
            cell_inputs={"iuc": ("idc",), "iud": ("idd",), "ug": ("g",), "uginv": ("ginv",)},
            cell_output={"iuc": "idc", "iud": "idd", "ug": "g", "uginv": "ginv"},
            compose_ops={("uc", ("uc",)): "uc", ("ud", ("ud",)): "ud"},
            compose_cells={},
            unit_ops={"c": "uc", "d": "ud"},
            unit_cells={"idc": "iuc", "idd": "iud", "g": "ug", "ginv": "uginv"},
            act_ops={("uc", (0,)): "uc", ("ud", (0,)): "ud"},
            act_cells={},
            left_unitors={"uc": "iuc", "ud": "iud"},
            right_unitors={"uc": "iuc", "ud": "iud"},
            name="two-colors-no-lift",
        )
        assert check_pseudo_operad(P).ok
        with pytest.raises(NotFibrant):
            find_companion(P, "g")


def quotient_example() -> PseudoOperadData:
    """Three unaries over one color, two of them joined by a globular cell."""
    objects = FiniteGroupoid(
        ["c"], ["idc"], {"idc": "c"}, {"idc": "c"},
        {("idc", "idc"): "idc"}, {"c": "idc"}, {"idc": "idc"},
    )
    cells = ["iu", "if1", "if2", "al", "al_inv"]
    ops1 = FiniteGroupoid(
        ["u", "f1", "f2"], cells,
        {"iu": "u", "if1": "f1", "if2": "f2", "al": "f1", "al_inv": "f2"},
        {"iu": "u", "if1": "f1", "if2": "f2", "al": "f2", "al_inv": "f1"},
        {
            ("iu", "iu"): "iu", ("if1", "if1"): "if1", ("if2", "if2"): "if2",
            ("al", "if1"): "al", ("if2", "al"): "al",
            ("al_inv", "al"): "if1", ("al", "al_inv"): "if2",
            ("al_inv", "if2"): "al_inv", ("if1", "al_inv"): "al_inv",
        },
        {"u": "iu", "f1": "if1", "f2": "if2"},
        {"iu": "iu", "if1": "if1", "if2": "if2", "al": "al_inv", "al_inv": "al"},
    )
    ident = ("idc",)
    return PseudoOperadData(
        objects=objects,
        op_groupoids={1: ops1},
        op_inputs={"u": ("c",), "f1": ("c",), "f2": ("c",)},
        op_output={"u": "c", "f1": "c", "f2": "c"},
        cell_inputs={c: ident for c in cells},
        cell_output={c: "idc" for c in cells},
        compose_ops={
            ("u", ("u",)): "u", ("u", ("f1",)): "f1", ("u", ("f2",)): "f2",
            ("f1", ("u",)): "f1", ("f2", ("u",)): "f2",
            ("f1", ("f1",)): "u", ("f1", ("f2",)): "u",
            ("f2", ("f1",)): "u", ("f2", ("f2",)): "u",
        },
        compose_cells={("iu", ("iu",)): "iu"},
        unit_ops={"c": "u"},
        unit_cells={"idc": "iu"},
        act_ops={("u", (0,)): "u", ("f1", (0,)): "f1", ("f2", (0,)): "f2"},
        act_cells={},
        left_unitors={"u": "iu", "f1": "if1", "f2": "if2"},
        right_unitors={"u": "iu", "f1": "if1", "f2": "if2"},
        name="quotient-example",
    )


class TestTau:
    def test_collapsing_a_fattened_operad_reuses_tokens(self):
        O = cyclic_group_operad()
        result = tau_full(iota(O))
        assert result.token_reuse
        assert set(result.operad.operations) == set(O.operations)

    def test_globular_cells_merge_operations(self):
        P = quotient_example()
        assert check_pseudo_operad(P).ok
        result = tau_full(P)
        assert not result.token_reuse
        assert result.class_of["f1"] == result.class_of["f2"]
        assert result.class_of["u"] != result.class_of["f1"]
        T = result.operad
        assert len(T.operations) == 2
        f_class = result.class_of["f1"]
        assert f_class.rep == "f1"  # lexicographically least member
        assert T.compose(f_class, (f_class,)) == result.class_of["u"]

    def test_tau_returns_a_plain_operad(self):
        T = tau(quotient_example())
        assert {str(op) for op in T.operations} == {"[f1]", "[u]"}


class TestTwoAdjunction:
    @pytest.mark.parametrize("factory", [
        cyclic_group_operad,
        commutative_fold_operad,
        lambda: prefactorization_operad(
            [CausalSet("p", []), CausalSet("bc", [])], max_arity=2
        ),
    ])
    def test_adjunction_identities_hold(self, factory):
        O = factory()
        report = check_two_adjunction(O, iota(O))
        assert report.ok, report.failures

    def test_quotient_unit_is_strict(self):
        P = quotient_example()
        O = tau(P)
        report = check_two_adjunction(O, P)
        assert report.ok, report.failures
