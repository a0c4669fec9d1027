import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetamoments.series import (
    PrecisionError,
    SeriesError,
    TruncSeries,
    logderiv_coeffs,
    series_sum,
    t_power_expansion,
    zeta_laurent,
    zeta_logderiv_laurent,
)

V = ("x", "y")
HIGH = (4, 3)
SHAPE = (HIGH[0] + 1, HIGH[1] + 1)

coef = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
arrays = st.lists(coef, min_size=SHAPE[0] * SHAPE[1], max_size=SHAPE[0] * SHAPE[1]).map(
    lambda xs: np.array(xs).reshape(SHAPE)
)


def ser(a, low=(0, 0)):
    return TruncSeries(V, low, tuple(l + h for l, h in zip(low, HIGH)), a)


@given(arrays, arrays, arrays)
@settings(max_examples=40, deadline=None)
def test_ring_axioms(a, b, c):
    A, B, C = ser(a), ser(b), ser(c)
    assert (A * B).allclose(B * A, 1e-12)
    assert ((A * B) * C).allclose(A * (B * C), 1e-10)
    assert (A * (B + C)).allclose(A * B + A * C, 1e-10)
    assert (A - A).allclose(TruncSeries.zero(V, HIGH), 0)


@given(arrays, arrays)
@settings(max_examples=30, deadline=None)
def test_mul_matches_dense_convolution(a, b):
    got = (ser(a) * ser(b)).coeffs
    full = np.zeros((2 * SHAPE[0] - 1, 2 * SHAPE[1] - 1))
    for i in range(SHAPE[0]):
        for j in range(SHAPE[1]):
            full[i : i + SHAPE[0], j : j + SHAPE[1]] += a[i, j] * b
    assert np.allclose(got, full[: SHAPE[0], : SHAPE[1]], atol=1e-12)


@given(arrays)
@settings(max_examples=30, deadline=None)
def test_reciprocal_inverts(a):
    a = a.copy()
    a[0, 0] = 1.5 + abs(a[0, 0])
    A = ser(a)
    one = TruncSeries.constant(1.0, V, HIGH)
    assert (A * A.reciprocal()).allclose(one, 1e-9)


@given(arrays)
@settings(max_examples=30, deadline=None)
def test_exp_log_roundtrip(a):
    a = 0.3 * a
    a[0, 0] = 1.0 + abs(a[0, 0])
    A = ser(a)
    assert A.log().exp().allclose(A, 1e-9)
    B = ser(0.3 * a)
    assert B.exp().log().allclose(B, 1e-9)


def test_exp_of_sum_is_product():
    x = TruncSeries.variable("x", V, HIGH)
    y = TruncSeries.variable("y", V, HIGH)
    assert (x + y).exp().allclose(x.exp() * y.exp(), 1e-13)
    e = x.exp()
    for n in range(5):
        assert e.coefficient((n, 0)) == pytest.approx(1 / math.factorial(n))


def test_laurent_multiplication_tracks_valuation():
    inv = TruncSeries.univariate([1.0], "x", low=-1, high=3)  # 1/x + O(x^4)
    sq = inv * inv
    assert sq.low == (-2,)
    assert sq.high == (2,)  # min(3 - 1, 3 - 1)
    assert sq.coefficient((-2,)) == 1
    with pytest.raises(PrecisionError):
        sq.coefficient((3,))


def test_pole_cap():
    with pytest.raises(SeriesError):
        TruncSeries.univariate([1.0], "x", low=-5, high=0)


def test_precision_error_above_high():
    s = TruncSeries.univariate([1, 2, 3], "x")
    assert s.coefficient((-1,)) == 0
    with pytest.raises(PrecisionError):
        s.coefficient((3,))


def test_total_degree_cap():
    x = TruncSeries.variable("x", V, HIGH, total=3)
    y = TruncSeries.variable("y", V, HIGH, total=3)
    p = (1 + x + y) ** 4
    assert p.coefficient((1, 2)) == pytest.approx(12)
    with pytest.raises(PrecisionError):
        p.coefficient((2, 2))


def test_derivative_and_scale():
    s = TruncSeries.univariate([1, 1, 1, 1], "x")
    d = s.derivative("x")
    assert [d.coefficient((i,)) for i in range(3)] == [1, 2, 3]
    sc = s.scale_variable("x", 2.0)
    assert sc.coefficient((3,)) == 8


def test_univariate_reciprocal_past_leading_zero():
    s = TruncSeries.univariate([0.0, 2.0, 1.0], "x", high=5)  # 2x + x^2
    r = s.tightened().reciprocal()
    assert r.low == (-1,)
    assert r.coefficient((-1,)) == pytest.approx(0.5)
    assert r.coefficient((0,)) == pytest.approx(-0.25)


def test_embed_and_sum():
    a = TruncSeries.univariate([1, 2], "x")
    b = a.embed(("x", "L"), {"L": 2})
    assert b.coefficient((1, 0)) == 2
    assert b.coefficient((0, 2)) == 0
    tot = series_sum([b, b, b])
    assert tot.coefficient((1, 0)) == 6


def test_zeta_laurent_against_mpmath():
    Z = zeta_laurent(6, "x")
    for x in (0.05, -0.07, 0.1j):
        val = sum(Z.coefficient((n,)) * x**n for n in range(-1, 7))
        assert complex(val) == pytest.approx(complex(mp.zeta(1 + x)), rel=1e-9)


def test_zeta_laurent_scaled():
    Z = zeta_laurent(5, "a", scale=-1.0)
    assert Z.coefficient((-1,)) == pytest.approx(-1.0)
    assert Z.coefficient((0,)) == pytest.approx(0.5772156649015329)


def test_logderiv_series_against_mpmath():
    c = logderiv_coeffs(6)
    S = zeta_logderiv_laurent(6, "x")
    assert S.coefficient((-1,)) == pytest.approx(-1.0)
    x = 0.04
    approx = sum(S.coefficient((n,)) * x**n for n in range(-1, 7))
    ref = mp.zeta(1 + x, derivative=1) / mp.zeta(1 + x)
    assert complex(approx) == pytest.approx(complex(ref), rel=1e-10)
    assert c[0] == pytest.approx(0.5772156649015329)


def test_t_power_expansion():
    # (t/2pi)^{-alpha} = exp(-alpha L)
    E = t_power_expansion(5, "alpha", "L")
    assert E.coefficient((2, 2)) == pytest.approx(0.5)
    assert E.coefficient((3, 3)) == pytest.approx(-1 / 6)
    assert E.coefficient((2, 1)) == 0
