import math

import numpy as np
import pytest
from scipy import stats

from zetamoments import cue
from zetamoments.symfunc import DomainError, complete_homogeneous


def rand_params(rng, k):
    return rng.normal(size=k) + 1j * rng.normal(size=k)


def test_haar_unitary_is_unitary(rng):
    u = cue.haar_unitary(5, 3, rng)
    for m in u:
        assert np.allclose(m @ m.conj().T, np.eye(5), atol=1e-12)


def test_haar_angles_match_eig(rng):
    seed = np.random.default_rng(7)
    u = cue.haar_unitary(6, 1, np.random.default_rng(7))[0]
    th = cue.haar_angles(6, 1, seed)[0]
    ref = np.sort(np.angle(np.linalg.eigvals(u)))
    assert np.allclose(np.sort(th), ref, atol=1e-10)


def test_haar_moments_of_trace(rng):
    # E|tr U|^2 = 1 and E|tr U^2|^2 = 2 for N >= 2
    th = cue.haar_angles(5, 40000, rng)
    t1 = np.abs(np.exp(1j * th).sum(axis=1)) ** 2
    t2 = np.abs(np.exp(2j * th).sum(axis=1)) ** 2
    assert abs(t1.mean() - 1) < 4 * t1.std() / np.sqrt(t1.size)
    assert abs(t2.mean() - 2) < 4 * t2.std() / np.sqrt(t2.size)


def test_n2_spacing_law_chi2():
    """QR sampler and Weyl rejection sampler agree on the N=2 angle-gap law."""
    rng = np.random.default_rng(99)
    n = 4000
    qr = cue.haar_angles(2, n, rng)
    rej = np.array([cue.weyl_rejection_sample(2, rng).angles for _ in range(n)])
    gap = lambda a: np.abs(np.angle(np.exp(1j * (a[:, 0] - a[:, 1]))))
    edges = np.linspace(0, np.pi, 11)
    # density of the gap phi in [0, pi] is (1 - cos phi)/pi
    cdf = lambda x: (x - np.sin(x)) / np.pi
    expect = n * np.diff(cdf(edges))
    for g in (gap(qr), gap(rej)):
        obs, _ = np.histogram(g, edges)
        assert stats.chisquare(obs, expect).pvalue > 1e-3


def test_char_poly_derivative_fd(rng):
    s = cue.haar_sample(7, rng)
    th, h = 0.3, 1e-5
    fd = (cue.char_poly(s, th + h) - cue.char_poly(s, th - h)) / (2 * h)
    assert cue.char_poly(s, th, 1) == pytest.approx(fd, rel=1e-7)
    fd2 = (cue.char_poly(s, th + h, 1) - cue.char_poly(s, th - h, 1)) / (2 * h)
    assert cue.char_poly(s, th, 2) == pytest.approx(fd2, rel=1e-6)


def test_char_poly_vanishes_at_eigenangle(rng):
    s = cue.haar_sample(5, rng)
    assert abs(cue.char_poly(s, s.angles[2])) < 1e-12


@pytest.mark.parametrize("k", range(0, 5))
def test_toeplitz_forms_agree(rng, k):
    A = rand_params(rng, k + 2)
    for N in (0, 1, 5, 17):
        h = complete_homogeneous(N, A)
        assert cue.toeplitz_det(N, A) == pytest.approx(h, rel=1e-9, abs=1e-12)
        assert cue.toeplitz_recurrence(N, A) == pytest.approx(h, rel=1e-9, abs=1e-12)
        assert cue.toeplitz_closed(N, A) == pytest.approx(h, rel=1e-9, abs=1e-12)


def test_toeplitz_confluent_matches_h(rng):
    A = list(np.exp(1j * rng.uniform(-1, 1, 3)))
    for N in (0, 3, 12):
        assert cue.toeplitz_confluent(N, A) == pytest.approx(complete_homogeneous(N, A + [1, 1]), rel=1e-9)


def test_toeplitz_closed_rejects_confluent():
    with pytest.raises(DomainError):
        cue.toeplitz_closed(4, [0.5, 1.0, 1.0])


@pytest.mark.parametrize("shifts", [(0.3,), (0.05, 0.11), (0.2, -0.4, 0.7)])
def test_shift_branches_agree(shifts):
    for N in (1, 4, 9):
        r = cue.shifted_moment_exact(N, shifts, "rational")
        h = cue.shifted_moment_exact(N, shifts, "h")
        assert r == pytest.approx(h, rel=1e-9, abs=1e-12)


def test_shift_auto_near_collision():
    a = 0.1
    near = cue.shifted_moment_exact(6, (a, a + 1e-6))
    assert near == pytest.approx(cue.shifted_moment_exact(6, (a, a + 1e-6), "h"), rel=1e-12)
    # continuity through the collision
    assert abs(near - cue.shifted_moment_exact(6, (a, a))) < 5e-6  # O(gap) change


def test_n1_is_deterministic():
    # N = 1: Z(theta_1 + a) = 1 - e^{-ia}
    a = 0.3
    assert cue.shifted_moment_exact(1, (a,)) == pytest.approx(1 - np.exp(-1j * a))


def test_derivative_moment_against_finite_differences():
    # (1) moment is d/da of the one-shift moment at a = 0
    N, h = 5, 1e-5
    fd = (cue.shifted_moment_exact(N, (h,), "h") - cue.shifted_moment_exact(N, (-h,), "h")) / (2 * h)
    assert cue.derivative_moment_exact(N, (1,)) == pytest.approx(fd, rel=1e-7)


def test_derivative_moment_n8_order1():
    assert cue.derivative_moment_exact(8, (1,)) == pytest.approx(4.5j)


def test_derivative_moment_leading_ratio_decreases():
    errs = [abs(cue.derivative_moment_exact(N, (1, 1)) / cue.derivative_moment_leading((1, 1), N) - 1) for N in (50, 100, 200)]
    assert errs[0] > errs[1] > errs[2]


def test_scaled_limit_matches_large_N():
    a = np.array([0.7, -0.3])
    N = 2000
    ex = cue.shifted_moment_exact(N, a / N, "h")
    assert ex == pytest.approx(cue.scaled_limit_series(a), rel=2e-3)


def test_keating_snaith_small_cases():
    assert cue.keating_snaith_moment(4, 1) == pytest.approx(5.0)  # E|Z|^2 = N + 1
    assert cue.keating_snaith_moment(3, 0) == pytest.approx(1.0)


def test_accumulator_merge_matches_batch(rng):
    x = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    a, b, full = cue.MomentAccumulator(), cue.MomentAccumulator(), cue.MomentAccumulator()
    a.add_batch(x[:300])
    b.add_batch(x[300:])
    full.add_batch(x)
    a.merge(b)
    assert a.n == 1000
    assert a.mean == pytest.approx(full.mean)
    assert a.stderr_re == pytest.approx(full.stderr_re)
    assert a.stderr_re == pytest.approx(x.real.std(ddof=1) / math.sqrt(1000), rel=1e-10)


def test_mc_reproducible_and_thread_split():
    r1 = cue.mc_moment(4, shifts=(0.2,), samples=2000, seed=5)
    r2 = cue.mc_moment(4, shifts=(0.2,), samples=2000, seed=5)
    assert r1.estimate == r2.estimate
    r3 = cue.mc_moment(4, shifts=(0.2,), samples=2000, seed=5, threads=2)
    assert r3.samples == 2000
    assert r3.within(cue.shifted_moment_exact(4, (0.2,)), 5)


def test_mc_complex_shift():
    a = 0.2 + 0.05j
    r = cue.mc_moment(3, shifts=(a,), samples=20000, seed=3)
    assert r.within(cue.shifted_moment_exact(3, (a,), "h"), 4)


def test_mc_requires_one_mode():
    with pytest.raises(DomainError):
        cue.mc_moment(3, samples=1000)
    with pytest.raises(DomainError):
        cue.mc_moment(3, shifts=(0.1,), samples=10)


def test_scaled_limit_first_order_convergence():
    a = [0.9, -0.4]
    errs = []
    for N in (50, 100, 200, 400):
        ex = cue.shifted_moment_exact(N, [x / N for x in a], "h")
        errs.append(abs(ex - cue.scaled_limit_series(a, 60)))
    for e0, e1 in zip(errs, errs[1:]):
        assert e0 / e1 >= 1.8
