from __future__ import annotations

import random

import pytest

from dpcover.picard import (
    DimensionMismatch,
    DivClass,
    canonical_class,
    exceptional_class,
    h0,
    h0_oracle,
    is_nef,
    line_class,
    pairing,
    surface_context,
    template_class,
    zero_class,
)


def T(k, name):
    return template_class(k, name)


def test_pairing_lattice_basics():
    assert pairing(line_class(2), line_class(2)) == 1
    e1 = exceptional_class(2, 1)
    assert pairing(e1, e1) == -1
    assert pairing(line_class(2), e1) == 0


def test_anticanonical_square_is_del_pezzo_degree():
    for k, degree in [(0, 9), (1, 8), (2, 7), (3, 6), (4, 5)]:
        K = canonical_class(surface_context(k))
        assert pairing(-K, -K) == degree


def test_pairing_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        pairing(line_class(2), line_class(3))


def test_pairing_bilinear_symmetric_fuzz():
    rng = random.Random(20240)
    for _ in range(200):
        k = rng.choice([2, 3, 4])
        a, b, c = (
            DivClass(rng.randint(-6, 6), tuple(rng.randint(-6, 6) for _ in range(k)))
            for _ in range(3)
        )
        n, m = rng.randint(-3, 3), rng.randint(-3, 3)
        assert pairing(a, b) == pairing(b, a)
        assert pairing(n * a + m * b, c) == n * pairing(a, c) + m * pairing(b, c)


def test_canonical_class_values():
    assert canonical_class(surface_context(2)) == DivClass(-3, (-1, -1))
    assert -canonical_class(surface_context(2)) == T(2, "f_1") + T(2, "f_2") + T(2, "l")
    assert -canonical_class(surface_context(4)) == T(4, "f_1") + T(4, "f_2") + T(4, "f_3") - exceptional_class(4, 4)


def test_is_nef():
    ctx2 = surface_context(2)
    assert is_nef(ctx2, -canonical_class(ctx2))
    assert not is_nef(ctx2, exceptional_class(2, 1))
    ctx4 = surface_context(4)
    assert is_nef(ctx4, T(4, "f_1") + T(4, "f_2") + T(4, "h_34"))
    assert len(ctx4.negative_curves) == 10


def test_h0_basics():
    ctx = surface_context(2)
    assert h0(ctx, zero_class(2)) == 1
    assert h0(ctx, -canonical_class(ctx)) == 8
    assert h0(ctx, canonical_class(ctx)) == 0
    assert h0(ctx, 2 * T(2, "h_12")) == 1


def test_anticanonical_members_are_effective():
    # Branch curves drawn from |-K| exist on every surface in range.
    for k in range(5):
        ctx = surface_context(k)
        K = canonical_class(ctx)
        assert h0(ctx, -K) > 0
        assert h0(ctx, -K - (-K)) >= 0


def test_h0_matches_chi_on_nef_classes():
    rng = random.Random(7)
    for _ in range(300):
        k = rng.choice([2, 3, 4])
        ctx = surface_context(k)
        D = DivClass(rng.randint(0, 8), tuple(rng.randint(-2, 4) for _ in range(k)))
        if is_nef(ctx, D):
            K = canonical_class(ctx)
            assert h0(ctx, D) == 1 + D.dot(D - K) // 2


def test_oracle_basics():
    ctx = surface_context(2)
    assert h0_oracle(ctx, line_class(2), 3) == 3
    assert h0_oracle(ctx, T(2, "f_1"), 3) == 2
    assert h0_oracle(ctx, 2 * T(2, "h_12"), 3) == 1


def test_oracle_rejects_large_degree():
    ctx = surface_context(2)
    with pytest.raises(ValueError):
        h0_oracle(ctx, DivClass(13, (0, 0)), 1)


def test_h0_agrees_with_oracle_fuzz():
    rng = random.Random(991)
    for _ in range(120):
        k = rng.choice([2, 3, 4])
        ctx = surface_context(k)
        D = DivClass(rng.randint(0, 8), tuple(rng.randint(-4, 4) for _ in range(k)))
        expected = h0(ctx, D)
        assert h0_oracle(ctx, D, rng.randint(0, 10**6)) == expected


def test_curve_dictionary_h0():
    ctx = surface_context(4)
    assert ctx.templates["l"].h0 == 3
    assert ctx.templates["e_1"].h0 == 1
    assert ctx.templates["h_12"].h0 == 1
    assert ctx.templates["f_3"].h0 == 2
    assert ctx.templates["l+f_1"].h0 == 5
    assert ctx.templates["f_1+h_34"].h0 == 3
    assert ctx.templates["f_1+f_2"].h0 == 4
    assert ctx.templates["f_2+h_13"].moving
    assert not ctx.templates["h_34"].moving


def test_template_parsing():
    assert T(4, "f_1+h_34") == DivClass(2, (1, 0, 1, 1))
    assert T(3, "f_1+f_3") == DivClass(2, (1, 0, 1))
    with pytest.raises(ValueError):
        template_class(2, "g_1")
