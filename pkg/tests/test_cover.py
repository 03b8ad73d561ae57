from __future__ import annotations

import pytest

from conftest import make_data
from dpcover.chargroup import Character, GroupElement, automorphisms, nontrivial_characters
from dpcover.cover import (
    BuildingData,
    DeclaredPoint,
    IncidenceSpec,
    UnsupportedCurve,
    invariants,
    nef_big_check,
    relabel,
    smoothness_check,
    validate,
)
from dpcover.picard import DivClass, NamedCurve, canonical_class, surface_context, template_class, zero_class

D14Q0_BRANCH = {
    "010": [("f_11", "f_1", 1), ("f_12", "f_1", 2)],
    "011": [("f_21", "f_2", 1), ("e_1", "e_1", 1)],
    "100": [("f_22", "f_2", 2)],
    "101": [("C_1", "l+f_1", 1)],
    "110": [("C_2", "l+f_1", 2)],
    "111": [("f_23", "f_2", 3)],
}


@pytest.fixture
def d14q0():
    return make_data(2, D14Q0_BRANCH)


def test_validate_reference_data(d14q0):
    report = validate(d14q0)
    assert report.ok and not report.violations


def test_validate_detects_perturbed_character_class(d14q0):
    L = dict(d14q0.L)
    chi = Character.of("011")
    L[chi] = L[chi] - template_class(2, "e_1")
    broken = BuildingData(ctx=d14q0.ctx, branch=d14q0.branch, L=L)
    report = validate(broken)
    assert not report.ok
    assert any(v.kind == "parity" and v.subject == "011" for v in report.violations)


def test_validate_rejects_trivial_character_classes():
    data = make_data(2, {}, L={chi: zero_class(2) for chi in nontrivial_characters(3)})
    report = validate(data)
    assert not report.ok
    assert sum(v.kind == "nontrivial" for v in report.violations) == 7


def test_validate_rejects_duplicate_labels():
    spec = dict(D14Q0_BRANCH)
    spec["111"] = [("f_11", "f_2", 3)]
    report = validate(make_data(2, spec))
    assert any(v.kind == "reduced" and v.subject == "f_11" for v in report.violations)


def test_validate_rejects_rigid_class_reuse(d14q0):
    spec = dict(D14Q0_BRANCH)
    spec["100"] = [("e_1_again", "e_1", 1)]
    report = validate(make_data(2, spec, L=dict(d14q0.L)))
    assert any(v.kind == "reduced" and "rigid" in v.detail for v in report.violations)


def test_smoothness_of_reference_data(d14q0):
    assert smoothness_check(d14q0).smooth


def test_smoothness_flags_declared_triple_points(d14q0):
    inc = IncidenceSpec(
        points=(
            DeclaredPoint("P_3", {"f_21": 1, "C_1": 1, "C_2": 1}),
            DeclaredPoint("P_4", {"f_12": 1, "C_1": 1, "f_23": 1}),
        )
    )
    report = smoothness_check(d14q0, inc)
    assert not report.smooth
    assert report.offenders == ("P_3", "P_4")


def test_smoothness_flags_quadruple_point_with_node():
    data = make_data(
        2,
        {
            "010": [("f_11", "f_1", 1), ("f_12", "f_1", 2)],
            "011": [("f_21", "f_2", 1), ("e_1", "e_1", 1)],
            "100": [("l_1", "l", 1), ("e_2", "e_2", 1)],
            "101": [("f_22", "f_2", 2), ("h_12", "h_12", 1)],
            "110": [("C_2", "l+f_1", 1)],
            "111": [("f_23", "f_2", 3)],
        },
    )
    inc = IncidenceSpec(points=(DeclaredPoint("P_3", {"C_2": 2, "f_21": 1, "l_1": 1}),))
    report = smoothness_check(data, inc)
    assert not report.smooth
    assert report.offenders == ("P_3",)


def test_smoothness_flags_crossing_inside_one_slot(d14q0):
    spec = dict(D14Q0_BRANCH)
    spec["101"] = [("C_1", "l+f_1", 1), ("C_3", "l+f_1", 3)]
    spec["110"] = []
    data = make_data(2, spec, L=dict(d14q0.L))
    report = smoothness_check(data)
    assert not report.smooth
    assert any("C_1" in o and "C_3" in o for o in report.offenders)


def test_smoothness_rejects_uncurated_curve():
    curve = NamedCurve("weird", DivClass(5, (2, 2)), 1)
    data = make_data(2, {})
    branch = dict(data.branch)
    branch[GroupElement.of("100")] = (curve,)
    data = BuildingData(ctx=data.ctx, branch=branch, L=data.L)
    with pytest.raises(UnsupportedCurve):
        smoothness_check(data)


def test_smoothness_rejects_overdeclared_meetings(d14q0):
    # f_11 and f_12 are disjoint members of the same pencil.
    inc = IncidenceSpec(points=(DeclaredPoint("P", {"f_11": 1, "f_12": 1, "e_1": 1}),))
    with pytest.raises(ValueError):
        smoothness_check(d14q0, inc)


def test_invariants_of_reference_data(d14q0):
    inv = invariants(d14q0)
    assert (inv.KX2, inv.pg, inv.chiO, inv.q) == (14, 3, 4, 0)
    assert inv.half_2KX == -canonical_class(surface_context(2))


def test_invariants_doubling_consistency(catalog):
    for entry in catalog:
        inv = invariants(entry.data)
        K = canonical_class(entry.data.ctx)
        assert inv.half_2KX == 2 * K + entry.data.total_branch_class()
        assert inv.q == 1 + inv.pg - inv.chiO
        assert inv.pg >= 0 and inv.chiO >= 1


def test_nef_big_check(d14q0):
    assert nef_big_check(d14q0)
    tiny = make_data(2, {"100": [("e_1", "e_1", 1)]}, L=dict(d14q0.L))
    assert not nef_big_check(tiny)


def test_relabel_preserves_validity_and_invariants(d14q0):
    inv = invariants(d14q0)
    for M in automorphisms(3)[:24]:
        moved = relabel(d14q0, M)
        assert validate(moved).ok
        assert invariants(moved) == inv
