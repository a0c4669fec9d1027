"""Critical-line zeta: evaluation, zeros, derivatives at zeros, discrete moments.

zeta_em is the reference evaluator (Euler-Maclaurin, vectorized).  hardy_z
uses Riemann-Siegel with four correction terms for t >= 50, which is what
brackets zeros; brackets are then polished against Euler-Maclaurin so every
accepted ordinate is good to ~1e-12.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np
from scipy.special import bernoulli, loggamma, psi

from .symfunc import DomainError

RS_MIN_T = 50.0
EM_CORRECTIONS = 24
ZERO_TOL = 1e-9
MAX_SUBDIVIDE = 12


class IntegrityError(RuntimeError):
    """Zero count in a Gram block could not be reconciled."""


class MalformedImport(ValueError):
    pass


# -- Euler-Maclaurin -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _em_factors(M: int) -> np.ndarray:
    B = bernoulli(2 * M)
    return np.array([B[2 * j] / math.factorial(2 * j) for j in range(1, M + 1)])


def em_terms(t) -> int:
    return int(max(50, np.max(np.abs(t)) / math.pi + 30))


def zeta_em(s, terms: int | None = None, corrections: int = EM_CORRECTIONS):
    """zeta(s) for Re s > -1 by Euler-Maclaurin; vectorized over ``s``."""
    s_arr = np.asarray(s, dtype=complex)
    if np.any(np.abs(s_arr - 1) < 1e-14):
        raise DomainError("zeta has a pole at s = 1")
    if np.any(s_arr.real <= -1):
        raise DomainError("zeta_em needs Re s > -1")
    flat = s_arr.ravel()
    N = em_terms(flat.imag) if terms is None else int(terms)
    out = np.empty(flat.shape, dtype=complex)
    logn = np.log(np.arange(1, N, dtype=float))
    chunk = max(1, 2_000_000 // max(N, 1))
    fac = _em_factors(corrections)
    lN = math.log(N)
    for a in range(0, flat.size, chunk):
        ss = flat[a : a + chunk]
        head = np.exp(-np.outer(ss, logn)).sum(axis=1)
        Ns = np.exp(-ss * lN)  # N^{-s}
        tail = N * Ns / (ss - 1) + 0.5 * Ns
        poch = ss.copy()  # (s)_{2j-1}
        powN = Ns / N
        for j in range(1, corrections + 1):
            tail += fac[j - 1] * poch * powN
            poch = poch * (ss + 2 * j - 1) * (ss + 2 * j)
            powN = powN / (N * N)
        out[a : a + chunk] = head + tail
    return out.reshape(s_arr.shape) if s_arr.ndim else complex(out[0])


def theta(t):
    """Riemann-Siegel theta function."""
    t = np.asarray(t, dtype=float)
    val = np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * math.log(math.pi)
    return val if val.ndim else float(val)


def theta_prime(t):
    t = np.asarray(t, dtype=float)
    val = 0.5 * np.real(psi(0.25 + 0.5j * t)) - 0.5 * math.log(math.pi)
    return val if val.ndim else float(val)


def hardy_z_em(t):
    t = np.asarray(t, dtype=float)
    val = np.real(np.exp(1j * theta(t)) * zeta_em(0.5 + 1j * t))
    return val if np.ndim(val) else float(val)


# -- Riemann-Siegel -------------------------------------------------------------------


@lru_cache(maxsize=1)
def _psi_taylor(order: int = 110):
    """Taylor coefficients of Psi(1/2 + u) = -cos(2 pi u^2 - 5 pi/8) / cos(2 pi u)."""
    with mpmath.workdps(150):
        pi = mpmath.pi
        num = [mpmath.mpf(0)] * (order + 1)
        c, s = mpmath.cos(5 * pi / 8), mpmath.sin(5 * pi / 8)
        # cos(x - a) = cos a cos x + sin a sin x, x = 2 pi u^2
        for m in range(0, order // 2 + 1):
            x_pow = (2 * pi) ** m / mpmath.factorial(m)
            if m % 2 == 0:
                num[2 * m] += c * (-1) ** (m // 2) * x_pow
            else:
                num[2 * m] += s * (-1) ** (m // 2) * x_pow
        den = [mpmath.mpf(0)] * (order + 1)
        for m in range(0, order // 2 + 1):
            den[2 * m] = (-1) ** m * (2 * pi) ** (2 * m) / mpmath.factorial(2 * m)
        q = [mpmath.mpf(0)] * (order + 1)
        for n in range(order + 1):
            q[n] = (num[n] - mpmath.fsum(q[i] * den[n - i] for i in range(n))) / den[0]
        return -np.array([float(x) for x in q])


@lru_cache(maxsize=1)
def _psi_deriv_polys(max_deriv: int = 12):
    c = _psi_taylor()
    n = np.arange(c.size)
    polys = []
    for k in range(max_deriv + 1):
        ck = c[k:] * np.array([math.perm(int(i), k) for i in n[k:]], dtype=float)
        polys.append(ck[::-1].copy())  # highest power first for np.polyval
    return polys


def psi_direct(p):
    p = np.asarray(p, dtype=float)
    return np.cos(2 * np.pi * (p * p - p - 1 / 16)) / np.cos(2 * np.pi * p)


def _rs_remainder(p, a):
    """sum_k C_k a^k with a = sqrt(2 pi / t), C_k in Psi derivatives at p."""
    P = _psi_deriv_polys()
    u = p - 0.5
    d = [np.polyval(P[k], u) for k in range(13)]
    pi2 = math.pi**2
    C0 = d[0]
    C1 = -d[3] / (96 * pi2)
    C2 = d[2] / (64 * pi2) + d[6] / (18432 * pi2**2)
    C3 = -d[1] / (64 * pi2) - d[5] / (3840 * pi2**2) - d[9] / (5308416 * pi2**3)
    C4 = (
        d[0] / (128 * pi2)
        + 19 * d[4] / (24576 * pi2**2)
        + 11 * d[8] / (5898240 * pi2**3)
        + d[12] / (2038431744 * pi2**4)
    )
    return C0 + a * (C1 + a * (C2 + a * (C3 + a * C4)))


def hardy_z_rs(t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.sqrt(t / (2 * math.pi))
    N = np.floor(x).astype(int)
    p = x - N
    th = theta(t)
    n = np.arange(1, N.max() + 1)
    terms = np.cos(th[:, None] - t[:, None] * np.log(n)[None, :]) / np.sqrt(n)[None, :]
    terms[n[None, :] > N[:, None]] = 0
    main = 2 * terms.sum(axis=1)
    sign = np.where(N % 2 == 1, 1.0, -1.0)  # (-1)^{N-1}
    rem = sign * x ** (-0.5) * _rs_remainder(p, 1 / x)
    return main + rem


def hardy_z(t):
    """Real Hardy function Z(t) = e^{i theta(t)} zeta(1/2 + it)."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 2):
        raise DomainError("hardy_z needs t >= 2")
    out = np.empty_like(t_arr)
    lo = t_arr < RS_MIN_T
    if lo.any():
        out[lo] = hardy_z_em(t_arr[lo])
    if (~lo).any():
        out[~lo] = hardy_z_rs(t_arr[~lo])
    return out if np.ndim(t) else float(out[0])


# -- zeros ------------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroRecord:
    index: int
    gamma: float
    tolerance: float = ZERO_TOL


def gram_points(n_lo: int, n_hi: int) -> np.ndarray:
    """g_n for n_lo <= n <= n_hi, solving theta(g_n) = n pi by Newton."""
    n = np.arange(n_lo, n_hi + 1, dtype=float)
    if n_lo < -1:
        raise DomainError("Gram points start at n = -1")
    # asymptotic start: g ~ 2 pi (n + 1/8) / W((n + 1/8)/e)
    from scipy.special import lambertw

    g = 2 * math.pi * (n + 0.125) / np.real(lambertw((n + 0.125) / math.e))
    g = np.maximum(g, 9.0)
    for _ in range(50):
        step = (theta(g) - n * math.pi) / theta_prime(g)
        g = g - step
        if np.max(np.abs(step)) < 1e-13 * np.max(g):
            break
    return g


def _illinois(f, a, b, fa, fb, tol=1e-13, maxiter=100):
    """Vectorized bracketed regula falsi (Illinois variant)."""
    a, b, fa, fb = a.copy(), b.copy(), fa.copy(), fb.copy()
    side = np.zeros(a.shape, dtype=int)
    c = 0.5 * (a + b)
    for _ in range(maxiter):
        c = b - fb * (b - a) / (fb - fa)
        bad = ~np.isfinite(c) | (c <= np.minimum(a, b)) | (c >= np.maximum(a, b))
        c[bad] = 0.5 * (a[bad] + b[bad])
        fc = f(c)
        same = np.sign(fc) == np.sign(fa)
        # a retained endpoint twice in a row gets its value halved
        fb_keep = np.where(same & (side == 1), fb / 2, fb)
        fa_keep = np.where(~same & (side == -1), fa / 2, fa)
        a, fa = np.where(same, c, a), np.where(same, fc, fa_keep)
        b, fb = np.where(same, b, c), np.where(same, fb_keep, fc)
        side = np.where(same, 1, -1)
        hit = fc == 0
        a[hit] = b[hit] = c[hit]
        if np.all(np.abs(b - a) < tol * np.maximum(1.0, np.abs(b))):
            break
    return c


def _count_sign_changes(vals: np.ndarray) -> int:
    s = np.sign(vals)
    return int(np.sum(s[1:] * s[:-1] < 0))


def _block_brackets(ga: float, gb: float, expected: int, pts: np.ndarray, vals: np.ndarray, label: str):
    """Subdivide [ga, gb] until it shows ``expected`` sign changes."""
    for _ in range(MAX_SUBDIVIDE):
        if _count_sign_changes(vals) >= expected:
            break
        mids = 0.5 * (pts[1:] + pts[:-1])
        mvals = hardy_z(mids)
        pts = np.insert(pts, np.arange(1, pts.size), mids)
        vals = np.insert(vals, np.arange(1, vals.size), mvals)
    got = _count_sign_changes(vals)
    if got != expected:
        raise IntegrityError(f"Gram block {label} [{ga:.6f}, {gb:.6f}]: expected {expected} zeros, found {got}")
    s = np.sign(vals)
    idx = np.nonzero(s[1:] * s[:-1] < 0)[0]
    return pts[idx], pts[idx + 1], vals[idx], vals[idx + 1]


def _polish_em(gam: np.ndarray, chunk: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Secant refinement of RS roots against Euler-Maclaurin Z.

    Returns the polished ordinates and an error estimate |Z| / |Z'| at them.
    """
    out = gam.copy()
    err = np.full(gam.shape, 1e-13)
    for a in range(0, gam.size, chunk):
        g = gam[a : a + chunk]
        hi = g >= RS_MIN_T
        if not hi.any():
            continue
        t0, t1 = g[hi], g[hi] + 1e-7
        f0, f1 = hardy_z_em(t0), hardy_z_em(t1)
        active = np.ones(t0.shape, dtype=bool)
        for _ in range(8):
            denom = f1 - f0
            ok = active & (denom != 0) & (t1 != t0)
            step = np.where(ok, -f1 * (t1 - t0) / np.where(ok, denom, 1), 0.0)
            # converged entries stay frozen: further secant steps only divide noise by noise
            t0, f0 = np.where(ok, t1, t0), np.where(ok, f1, f0)
            t1 = t1 + step
            if ok.any():
                f1 = np.where(ok, hardy_z_em(t1), f1)
            active = ok & (np.abs(step) >= 1e-12)
            if not active.any():
                break
        # fresh slope: the final secant difference is dominated by noise
        h = 1e-6
        slope = np.abs(hardy_z_em(t1 + h) - hardy_z_em(t1 - h)) / (2 * h)
        est = np.where(slope > 0, np.abs(f1) / np.where(slope > 0, slope, 1), np.inf)
        out[a : a + chunk][hi] = t1
        err[a : a + chunk][hi] = np.maximum(est, 1e-13)
    return out, err


def find_zeros(max_T: float | None = None, max_count: int | None = None, threads: int = 1) -> list[ZeroRecord]:
    """All zeros 0 < gamma <= max_T (or the first max_count), validated by Gram blocks."""
    if (max_T is None) == (max_count is None):
        raise DomainError("give exactly one of max_T / max_count")
    if max_T is not None and max_T <= 0 or max_count is not None and max_count <= 0:
        raise DomainError("limit must be positive")
    if max_T is not None:
        n_hi = int(theta(max(max_T, 10.0)) / math.pi) + 3
    else:
        n_hi = max_count + 2
    # extend until the last Gram point is good and covers the limit
    while True:
        g = gram_points(-1, n_hi)
        z = hardy_z(g)
        n = np.arange(-1, n_hi + 1)
        good = (-1.0) ** n * z > 0
        if good[-1] and (max_T is None or g[-1] > max_T):
            break
        n_hi += 8
    if not good[0]:
        raise IntegrityError("first Gram point g_-1 is not good")
    good_idx = np.nonzero(good)[0]
    lo_all, hi_all, flo_all, fhi_all = [], [], [], []
    for a, b in zip(good_idx[:-1], good_idx[1:]):
        pts, vals = g[a : b + 1], z[a : b + 1]
        lo, hi, flo, fhi = _block_brackets(g[a], g[b], int(b - a), pts, vals, f"({n[a]},{n[b]})")
        lo_all.append(lo)
        hi_all.append(hi)
        flo_all.append(flo)
        fhi_all.append(fhi)
    lo, hi = np.concatenate(lo_all), np.concatenate(hi_all)
    flo, fhi = np.concatenate(flo_all), np.concatenate(fhi_all)
    # hard count check: N(g_b) = b + 1 at the last good Gram point
    if lo.size != n[good_idx[-1]] + 1:
        raise IntegrityError(f"zero count {lo.size} != counting function {n[good_idx[-1]] + 1}")
    roots = _parallel_chunks(lambda sl: _illinois(hardy_z, lo[sl], hi[sl], flo[sl], fhi[sl]), lo.size, threads)
    gam, err = _polish_em(roots)
    if np.any(np.diff(gam) <= 0):
        raise IntegrityError("refined zeros are not strictly increasing")
    if not np.all((gam > lo - 1e-9) & (gam < hi + 1e-9)):
        raise IntegrityError("polished zero escaped its bracket")
    recs = [ZeroRecord(i + 1, float(x), float(e)) for i, (x, e) in enumerate(zip(gam, err))]
    if max_T is not None:
        recs = [r for r in recs if r.gamma <= max_T]
    else:
        recs = recs[:max_count]
    return recs


def _parallel_chunks(fn, size: int, threads: int, chunk: int = 2048) -> np.ndarray:
    slices = [slice(a, min(a + chunk, size)) for a in range(0, size, chunk)]
    if threads > 1 and len(slices) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(fn, slices))
    else:
        parts = [fn(sl) for sl in slices]
    return np.concatenate(parts) if parts else np.zeros(0)


def count_zeros_main_term(T: float) -> float:
    return theta(T) / math.pi + 1


def save_zeros(path, zeros: Sequence[ZeroRecord]):
    lines = ["# zeta-zeros v1"] + [f"{z.index}\t{z.gamma:.15g}" for z in zeros]
    Path(path).write_text("\n".join(lines) + "\n")


def load_zeros(path) -> list[ZeroRecord]:
    text = Path(path).read_text().splitlines()
    recs = []
    for lineno, line in enumerate(text, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedImport(f"line {lineno}: expected 'index gamma'")
        try:
            idx, gam = int(parts[0]), float(parts[1])
        except ValueError as exc:
            raise MalformedImport(f"line {lineno}: {exc}") from None
        if not math.isfinite(gam) or gam <= 0:
            raise MalformedImport(f"line {lineno}: bad ordinate")
        recs.append(ZeroRecord(idx, gam, ZERO_TOL))
    for a, b in zip(recs, recs[1:]):
        if b.gamma <= a.gamma or b.index <= a.index:
            raise MalformedImport(f"ordinates not strictly increasing at index {b.index}")
    return recs


def check_imported(zeros: Sequence[ZeroRecord], h: float = 1e-6) -> list[int]:
    """Indices whose ordinate is not bracketed by a sign change of Z within +-h."""
    g = np.array([z.gamma for z in zeros])
    if g.size == 0:
        return []
    if np.any(g < 2 + h):
        raise DomainError("imported ordinates must exceed 2")
    bad = np.sign(hardy_z(g - h)) == np.sign(hardy_z(g + h))
    return [zeros[i].index for i in np.nonzero(bad)[0]]


# -- derivatives and moments ------------------------------------------------------------------


def zeta_derivs_batch(ts, max_order: int, radius: float = 0.1, nodes: int = 64, chunk: int = 64) -> np.ndarray:
    """zeta^{(n)}(1/2 + it) for n = 0..max_order; shape (len(ts), max_order + 1).

    Trapezoid rule on the circle |s - z| = radius, i.e. a discrete Fourier
    transform of zeta samples; all orders come from the same samples.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if max_order > 6:
        raise DomainError("derivative order above 6 not supported")
    if radius >= 0.5 or np.any(np.abs(0.5 + 1j * ts - 1) <= radius):
        raise DomainError("integration circle touches the pole at s = 1")
    w = np.exp(2j * math.pi * np.arange(nodes) / nodes)
    out = np.empty((ts.size, max_order + 1), dtype=complex)
    for a in range(0, ts.size, chunk):
        z = 0.5 + 1j * ts[a : a + chunk]
        vals = zeta_em(z[:, None] + radius * w[None, :])
        for k in range(max_order + 1):
            out[a : a + chunk, k] = math.factorial(k) / radius**k * np.mean(vals * w[None, :] ** (-k), axis=1)
    return out


def zeta_deriv_at(n: int, t: float, radius: float = 0.1, nodes: int = 64) -> complex:
    if n < 0:
        raise DomainError("order must be nonnegative")
    if t < 2:
        raise DomainError("zeta_deriv_at needs t >= 2")
    return complex(zeta_derivs_batch([t], n, radius, nodes)[0, n])


@dataclass
class MomentTrace:
    orders: tuple
    T: np.ndarray
    sums: np.ndarray
    prediction: np.ndarray | None = None
    prediction_leading: np.ndarray | None = None

    @property
    def residual_full(self) -> np.ndarray:
        return self.sums.real - self.prediction

    @property
    def residual_leading(self) -> np.ndarray:
        return self.sums.real - self.prediction_leading

    def rows(self):
        for j in range(self.T.size):
            yield (
                float(self.T[j]),
                complex(self.sums[j]),
                None if self.prediction is None else float(self.prediction[j]),
                None if self.prediction_leading is None else float(self.residual_leading[j]),
                None if self.prediction is None else float(self.residual_full[j]),
            )


def derivative_table(zeros: Sequence[ZeroRecord], max_order: int, threads: int = 1) -> np.ndarray:
    ts = np.array([z.gamma for z in zeros])
    return _parallel_chunks(lambda sl: zeta_derivs_batch(ts[sl], max_order), ts.size, threads, chunk=512).reshape(
        ts.size, max_order + 1
    )


def discrete_moment(zeros: Sequence[ZeroRecord], orders: Sequence[int], stride: int = 1, derivs: np.ndarray | None = None, threads: int = 1) -> MomentTrace:
    """Cumulative sum of prod_r zeta^{(n_r)}(rho) over zeros in height order."""
    orders = tuple(int(n) for n in orders)
    if not orders or any(n < 0 for n in orders):
        raise DomainError("orders must be nonempty and nonnegative")
    zeros = sorted(zeros, key=lambda z: z.gamma)
    if derivs is None:
        derivs = derivative_table(zeros, max(orders), threads)
    terms = np.ones(len(zeros), dtype=complex)
    for n in orders:
        terms *= derivs[:, n]
    if 0 in orders:
        terms[:] = 0  # zeta(rho) = 0 exactly
    csum = np.cumsum(terms)
    T = np.array([z.gamma for z in zeros])
    keep = np.arange(stride - 1, len(zeros), stride) if stride > 1 else np.arange(len(zeros))
    if stride > 1 and len(zeros) and keep[-1] != len(zeros) - 1:
        keep = np.append(keep, len(zeros) - 1)
    return MomentTrace(orders, T[keep], csum[keep])
