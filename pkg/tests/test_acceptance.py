"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the verdict lines
are also repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import FIXTURE_SECONDS
from zetamoments import arith, cue, predict, zeta
from zetamoments.series import zeta_laurent
from zetamoments.symfunc import combinatorial_sum, combinatorial_sum_literal, complete_homogeneous

SEED = 20240601


def test_c1_symmetric_identities(verdict):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst, worst_zero, n_zero = 0.0, 0.0, 0
    exact_zero = True
    for _ in range(500):
        k = int(rng.integers(1, 7))
        n = int(rng.integers(-8, 13))
        v = np.exp(rng.uniform(-0.5, 0.5, k) + 1j * rng.uniform(-np.pi, np.pi, k))
        lit = combinatorial_sum_literal(n, v)
        got = combinatorial_sum(n, v)
        if 1 <= n <= k - 1:
            n_zero += 1
            exact_zero &= got == 0
            worst_zero = max(worst_zero, abs(lit))
        else:
            worst = max(worst, abs(got - lit) / abs(lit))
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and exact_zero and worst_zero < 1e-10 and dt < 5
    verdict(
        "C1 symmetric identities",
        ok,
        f"max rel err {worst:.2e}; {n_zero} zero-branch cases, max |literal| {worst_zero:.2e}; {dt:.2f}s",
    )
    assert ok


def test_c2_toeplitz_triple(verdict):
    rng = np.random.default_rng(SEED + 1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(0, 5))
        N = int(rng.integers(0, 51))
        A = rng.normal(size=k + 2) + 1j * rng.normal(size=k + 2)
        h = complete_homogeneous(N, A)
        rec, clo = cue.toeplitz_recurrence(N, A), cue.toeplitz_closed(N, A)
        worst = max(worst, abs(rec - h) / abs(h), abs(clo - h) / abs(h), abs(rec - clo) / abs(h))
    dt = time.perf_counter() - t0
    ok = worst < 1e-9 and dt < 5
    verdict("C2 Toeplitz recurrence = closed form = h_N", ok, f"max rel err {worst:.2e}; {dt:.2f}s")
    assert ok


@pytest.mark.slow
def test_c3_cue_monte_carlo(verdict):
    t0 = time.perf_counter()
    cases = [
        ("N=8 shifts (0.05, 0.11)", dict(N=8, shifts=(0.05, 0.11)), cue.shifted_moment_exact(8, (0.05, 0.11))),
        ("N=6 orders (1)", dict(N=6, orders=(1,)), cue.derivative_moment_exact(6, (1,))),
    ]
    hits = {}
    for label, kw, exact in cases:
        hits[label] = sum(cue.mc_moment(samples=200_000, seed=SEED + trial, **kw).within(exact, 3.0) for trial in range(20))
    dt = time.perf_counter() - t0
    ok = all(h >= 19 for h in hits.values()) and dt < 300
    verdict("C3 CUE Monte Carlo within 3 stderr", ok, "; ".join(f"{k}: {v}/20" for k, v in hits.items()) + f"; {dt:.0f}s")
    assert ok


def test_c4_asymptotic_constants(verdict):
    t0 = time.perf_counter()
    parts, ok = [], True
    for orders in [(1,), (2,), (1, 1), (2, 1)]:
        s, k = sum(orders), len(orders)
        const = math.prod(math.factorial(n) for n in orders) / math.factorial(s + 1)
        lead = cue.derivative_moment_leading(orders, 1.0)
        assert abs(abs(lead) - const) < 1e-15
        errs = []
        for N in (400, 800):
            ratio = cue.derivative_moment_exact(N, orders) / N**s
            errs.append(abs(ratio / lead - 1))
        ok &= errs[0] < 0.05 and errs[1] < errs[0]
        parts.append(f"{orders}: {errs[0]:.4f} -> {errs[1]:.4f}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    verdict("C4 N^-|n| moment -> n!/(|n|+1)! constant", ok, "; ".join(parts) + f"; {dt:.1f}s")
    assert ok


def test_c5_keating_snaith(verdict):
    t0 = time.perf_counter()
    target = cue.keating_snaith_moment(4, 1)
    direct = math.prod(math.gamma(j) * math.gamma(j + 2) / math.gamma(j + 1) ** 2 for j in range(1, 5))
    mc = cue.mc_abs_moment(4, 1, samples=200_000, seed=SEED)
    dt = time.perf_counter() - t0
    ok = abs(target - direct) < 1e-12 and mc.within(target, 3.0) and dt < 60
    z = abs(mc.estimate.real - target) / mc.stderr_re
    verdict("C5 Keating-Snaith E|Z|^2 at N=4", ok, f"MC {mc.estimate.real:.4f} vs {target:.4f}, {z:.2f} stderr; {dt:.1f}s")
    assert ok


def test_c6_second_moment_polynomial(verdict):
    t0 = time.perf_counter()
    tensor = arith.arith_deriv_tensor(2, 3, 1000)
    P = predict.second_moment_integrand(tensor)
    Q = P.antiderivative()
    scratch = predict.ratios_integrand([1, 1], primes=1000)
    dt = time.perf_counter() - t0

    ref_c = (-2.52789, 2.12487, -0.03621)  # c0, c1, c2
    ref_q = (-4.65238, 2.95321, -0.52037)  # q0, q1, q2
    err_c = max(abs(P.coeffs[m] - ref_c[m]) for m in range(3))
    err_q = max(abs(Q.coeffs[m] - ref_q[m]) for m in range(3))
    err_d = max(abs(a - b) for a, b in zip(scratch.coeffs, P.coeffs))
    ok_c, ok_q, ok_d = err_c < 5e-3, err_q < 1e-2, err_d < 1e-10
    ok = ok_c and ok_q and ok_d and dt < 30
    q = ", ".join(f"{Q.coeffs[m]:.5f}" for m in (2, 1, 0))
    verdict(
        "C6 second-moment polynomial",
        ok,
        f"integrand max err {err_c:.1e} ({'ok' if ok_c else 'FAIL'}); "
        f"integrated ({q}) max err {err_q:.3f} ({'ok' if ok_q else 'FAIL'}); "
        f"derivation agreement {err_d:.1e} ({'ok' if ok_d else 'FAIL'}); {dt:.1f}s",
    )
    assert ok


@pytest.mark.slow
def test_c7_shanks_gate(verdict):
    t0 = time.perf_counter()
    zeros = zeta.find_zeros(max_count=2000)
    trace = zeta.discrete_moment(zeros, (1,))
    predict.compare(trace, predict.derive([1]))
    dt = time.perf_counter() - t0
    top = abs(trace.sums[-1] - trace.prediction[-1]) / abs(trace.sums[-1])
    ok = top < 0.01 and dt < 600
    verdict("C7 Shanks gate over 2000 zeros", ok, f"|residual|/|sum| at T={trace.T[-1]:.1f}: {top:.2e}; {dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_c8_figure_properties(verdict, zeros_10k, derivs_10k):
    t0 = time.perf_counter()
    trace = zeta.discrete_moment(zeros_10k, (1, 1), derivs=derivs_10k)
    predict.compare(trace, predict.derive([1, 1], primes=1000))
    dt = time.perf_counter() - t0 + FIXTURE_SECONDS["zeros_10k"] + FIXTURE_SECONDS["derivs_10k"]
    re, im = trace.sums.real, trace.sums.imag
    rl, rf = trace.residual_leading, trace.residual_full
    a = bool(np.all(re[10:] > 0))
    ratio_im = float(np.max(np.abs(im[1000:]) / re[1000:]))
    b = ratio_im < 0.01
    ratio_res = float(np.max(np.abs(rl)) / np.max(np.abs(rf)))
    c = ratio_res >= 10
    d = bool(np.any(rl > 0) and np.any(rl < 0))
    ok = a and b and c and d and dt < 1800
    flag = lambda x: "ok" if x else "FAIL"
    verdict(
        "C8 figure properties over 10^4 zeros, orders (1,1)",
        ok,
        f"(a) Re>0 {flag(a)}; (b) max|Im|/Re beyond 1000th zero {ratio_im:.3f} {flag(b)}; "
        f"(c) max|res_lead|/max|res_full| {ratio_res:.2f} {flag(c)}; (d) leading residual sign change {flag(d)}; {dt:.0f}s",
    )
    assert ok


def test_c9_numerical_hygiene(verdict, zeros_10k):
    # Cauchy-circle derivatives independent of the radius
    pick = [zeros_10k[i].gamma for i in (0, 1, 10, 100, 1000, 5000, 9999)]
    a = zeta.zeta_derivs_batch(pick, 2, radius=0.1)
    b = zeta.zeta_derivs_batch(pick, 2, radius=0.05)
    c = zeta.zeta_derivs_batch(pick, 2, radius=0.15)
    err_r = float(max(np.max(np.abs(a - b)), np.max(np.abs(a - c))))

    # zeta(1.1) from the Stieltjes-based Laurent series vs Euler-Maclaurin
    Z = zeta_laurent(8, "x")
    x = 0.1
    via_gamma = sum(Z.coefficient((n,)) * x**n for n in range(-1, 9))
    err_z = abs(complex(via_gamma) - complex(zeta.zeta_em(1.1)))

    # central finite differences of the arithmetic factor vs the tensor
    t = arith.arith_deriv_tensor(2, 3, 1000)
    A = lambda al, be, de: arith.arith_factor([al, be], de, 1000).real
    h = 1e-3
    fd = {
        (0, 0, 1): (A(0, 0, h) - A(0, 0, -h)) / (2 * h),
        (0, 0, 2): (A(0, 0, h) - 2 * A(0, 0, 0) + A(0, 0, -h)) / h**2,
        (0, 1, 1): (A(0, h, h) - A(0, h, -h) - A(0, -h, h) + A(0, -h, -h)) / (4 * h * h),
        (1, 0, 1): (A(h, 0, h) - A(h, 0, -h) - A(-h, 0, h) + A(-h, 0, -h)) / (4 * h * h),
        (1, 0, 0): (A(h, 0, 0) - A(-h, 0, 0)) / (2 * h),
    }
    err_fd = max(abs(v - t[e]) for e, v in fd.items())

    ok = err_r < 1e-7 and err_z < 1e-6 and err_fd < 1e-5
    verdict(
        "C9 numerical hygiene",
        ok,
        f"Cauchy radius spread {err_r:.1e}; zeta(1.1) gap {err_z:.1e}; tensor FD max err {err_fd:.1e}",
    )
    assert ok
