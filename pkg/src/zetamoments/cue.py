"""Moments of CUE characteristic polynomials evaluated at their own eigenvalues.

Convention: Z(theta) = prod_m (1 - e^{i theta_m} e^{-i theta}).  For shifts
alpha_1..alpha_k the averaged product (1/N) sum_n prod_r Z(theta_n + alpha_r)
has an exact expectation in terms of h_{N-1}(e^{-i alpha}, 1, 1), which is the
Toeplitz determinant D_{N-1} of a symbol with k+2 parameters.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .series import TruncSeries
from .symfunc import (
    DomainError,
    ValueVector,
    complete_homogeneous,
    complete_homogeneous_all,
    elementary_all,
)

# rational closed form loses ~log10(1/gap) digits; switch to the h-branch early
SHIFT_GAP_EPS = 1e-3


@dataclass(frozen=True)
class SpectrumSample:
    angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float).reshape(-1)
        if a.size < 1:
            raise DomainError("spectrum needs at least one angle")
        if not np.all(np.isfinite(a)):
            raise DomainError("angles must be finite")
        object.__setattr__(self, "angles", a)

    @property
    def N(self) -> int:
        return self.angles.size


# -- sampling -----------------------------------------------------------------


def haar_unitary(N: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitaries via QR of complex Ginibre matrices with phase correction."""
    z = (rng.standard_normal((size, N, N)) + 1j * rng.standard_normal((size, N, N))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def haar_angles(N: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenangles in (-pi, pi) of ``size`` Haar unitaries, shape (size, N).

    Uses the Cayley transform H = i(I-U)(I+U)^{-1}, which is Hermitian with
    eigenvalues tan(theta/2); eigvalsh is ~2x cheaper than a general eig.
    """
    if N < 1:
        raise DomainError("N must be positive")
    u = haar_unitary(N, size, rng)
    eye = np.eye(N)
    # X (I+U) = (I-U)  <=>  (I+U)^T X^T = (I-U)^T
    h = 1j * np.linalg.solve((eye + u).transpose(0, 2, 1), (eye - u).transpose(0, 2, 1)).transpose(0, 2, 1)
    h = 0.5 * (h + np.conj(h.transpose(0, 2, 1)))
    return 2 * np.arctan(np.linalg.eigvalsh(h))


def haar_sample(N: int, rng: np.random.Generator) -> SpectrumSample:
    return SpectrumSample(haar_angles(N, 1, rng)[0])


def weyl_rejection_sample(N: int, rng: np.random.Generator) -> SpectrumSample:
    """Direct rejection sampling from the Weyl density; only sensible for N <= 3."""
    if N > 3:
        raise DomainError("rejection sampler is only meant for N <= 3")
    bound = 4.0 ** (N * (N - 1) // 2)
    while True:
        th = rng.uniform(-np.pi, np.pi, N)
        z = np.exp(1j * th)
        w = np.prod([abs(z[i] - z[j]) ** 2 for i in range(N) for j in range(i + 1, N)]) if N > 1 else 1.0
        if rng.uniform() * bound < w:
            return SpectrumSample(th)


# -- characteristic polynomial -----------------------------------------------------


def char_poly_coeffs(angles: np.ndarray) -> np.ndarray:
    """c_j with Z(theta) = sum_j c_j e^{-i j theta}; batched over leading axes."""
    z = np.exp(1j * np.asarray(angles, dtype=float))
    c = np.zeros(z.shape[:-1] + (z.shape[-1] + 1,), dtype=complex)
    c[..., 0] = 1
    for m in range(z.shape[-1]):
        c[..., 1 : m + 2] = c[..., 1 : m + 2] - z[..., m : m + 1] * c[..., 0 : m + 1]
    return c


def char_poly(spectrum: SpectrumSample, theta: float, n: int = 0) -> complex:
    """n-th theta-derivative of Z at theta."""
    if n < 0:
        raise DomainError("derivative order must be nonnegative")
    th = spectrum.angles
    if n == 0:
        return complex(np.prod(1 - np.exp(1j * (th - theta))))
    c = char_poly_coeffs(th)
    j = np.arange(c.size)
    return complex(np.sum(c * (-1j * j) ** n * np.exp(-1j * j * theta)))


# -- Toeplitz determinants ------------------------------------------------------


@dataclass(frozen=True)
class ToeplitzSymbolCoeffs:
    fhat: dict

    def __call__(self, ell: int) -> complex:
        return self.fhat.get(ell, 0j)


def symbol_coeffs(A) -> ToeplitzSymbolCoeffs:
    A = A if isinstance(A, ValueVector) else ValueVector(tuple(A))
    C = elementary_all(list(A.entries))
    out = {-1: -1 + 0j}
    for ell in range(len(A)):
        out[ell] = (-1) ** ell * complex(C[ell + 1])
    return ToeplitzSymbolCoeffs(out)


def toeplitz_det(N: int, A) -> complex:
    """Direct determinant of the N x N Toeplitz matrix of the symbol."""
    if N == 0:
        return 1 + 0j
    f = symbol_coeffs(A)
    T = np.array([[f(j - i) for j in range(N)] for i in range(N)], dtype=complex)
    return complex(np.linalg.det(T))


def toeplitz_recurrence(N: int, A) -> complex:
    A = A if isinstance(A, ValueVector) else ValueVector(tuple(A))
    if N < 0:
        raise DomainError("N must be nonnegative")
    C = elementary_all(list(A.entries))
    K = len(A)
    D = [1 + 0j]
    for m in range(1, N + 1):
        D.append(sum((-1) ** (j + 1) * C[j] * D[m - j] for j in range(1, min(m, K) + 1)))
    return D[N]


def toeplitz_closed(N: int, A) -> complex:
    A = A if isinstance(A, ValueVector) else ValueVector(tuple(A))
    if not A.distinct:
        raise DomainError("closed form needs distinct parameters; use shifted_moment_exact for the confluent case")
    vals = A.entries
    k = len(vals) - 2
    total = 0j
    for r, ar in enumerate(vals):
        term = ar ** (N + k + 1)
        for j, aj in enumerate(vals):
            if j != r:
                term /= aj - ar
        total += term
    return (-1) ** (k + 1) * total


def toeplitz_confluent(N: int, A_free) -> complex:
    """D_N with parameters (A_1..A_k, 1, 1): the limit A_{k+1} -> A_{k+2} = 1 taken analytically."""
    vals = [complex(a) for a in A_free]
    k = len(vals)
    total = 0j
    for r, ar in enumerate(vals):
        term = ar ** (N + k + 1) / (ar - 1) ** 2
        for j, aj in enumerate(vals):
            if j != r:
                term /= ar - aj
        total += term
    tail = N + k + 1 - sum(1 / (1 - a) for a in vals)
    total += tail * math.prod((1 / (1 - a) for a in vals), start=1 + 0j)
    return total


# -- exact moments ------------------------------------------------------------------


def _min_gap(y: Sequence[complex]) -> float:
    pts = list(y) + [1 + 0j]
    return min((abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :]), default=np.inf)


def shifted_moment_exact(N: int, shifts: Sequence[float], branch: str = "auto") -> complex:
    """E_N[(1/N) sum_n prod_r Z(theta_n + alpha_r)].

    ``branch`` is "rational" (closed form in the shifts), "h" (complete
    homogeneous representation) or "auto" (rational unless shifts collide).
    """
    if N < 1:
        raise DomainError("N must be positive")
    y = [complex(np.exp(-1j * a)) for a in shifts]
    k = len(y)
    if k == 0:
        return 1 + 0j
    if branch == "auto":
        branch = "rational" if _min_gap(y) > SHIFT_GAP_EPS else "h"
    if branch == "h":
        pref = math.prod((1 - v for v in y), start=1 + 0j)
        if abs(pref) == 0:
            return 0j
        h = complete_homogeneous_all(N - 1, y)
        return pref * sum((N - j) * h[j] for j in range(N)) / N
    if branch != "rational":
        raise ValueError(f"unknown branch {branch!r}")
    if _min_gap(y) <= 1e-12:
        raise DomainError("rational branch needs distinct, nonzero shifts")
    total = 0j
    for l, yl in enumerate(y):
        term = yl ** (N + k) / (1 - yl)
        for j, yj in enumerate(y):
            if j != l:
                term *= (1 - yj) / (yl - yj)
        total += term
    total += N + k - sum(1 / (1 - v) for v in y)
    return total / N


def scaled_limit_series(a: Sequence[complex], terms: int = 60) -> complex:
    """sum_{m<terms} (-1)^m i^{k+m} / (m+k+1)! h_m(a) prod a."""
    a = [complex(x) for x in a]
    k = len(a)
    h = complete_homogeneous_all(max(terms - 1, 0), a)
    pa = math.prod(a, start=1 + 0j)
    return sum((-1) ** m * 1j ** (k + m) / math.factorial(m + k + 1) * h[m] * pa for m in range(terms))


def derivative_moment_exact(N: int, orders: Sequence[int], degree: int | None = None) -> complex:
    """E_N[(1/N) sum_n prod_r Z^{(n_r)}(theta_n)], exact in N.

    Expands y_r = e^{-i alpha_r} as truncated series and reads off the
    coefficient of prod alpha_r^{n_r} in (1/N) prod(1-y_r) h_{N-1}(y, 1, 1).
    """
    orders = [int(n) for n in orders]
    if any(n < 1 for n in orders):
        raise DomainError("derivative orders must be >= 1")
    need = sum(orders)
    degree = need + 2 if degree is None else degree
    if degree < need:
        raise DomainError(f"truncation degree {degree} below total order {need}")
    k = len(orders)
    names = tuple(f"a{r}" for r in range(k))
    high = tuple(orders)  # per-variable box only needs the target exponent
    ys = []
    for r in range(k):
        coeffs = [(-1j) ** m / math.factorial(m) for m in range(high[r] + 1)]
        s = TruncSeries.univariate(coeffs, names[r]).embed(names, {v: h for v, h in zip(names, high)})
        ys.append(s.reframe(high=high, total=degree))
    one = TruncSeries.constant(1.0, names, high, total=degree)
    h = complete_homogeneous_all(N - 1, ys, one=one)
    acc = TruncSeries.zero(names, high, total=degree)
    for j in range(N):
        acc = acc + h[j] * float(N - j)
    for y in ys:
        acc = acc * (one - y)
    c = acc.coefficient(tuple(orders))
    return complex(c) * math.prod(math.factorial(n) for n in orders) / N


def derivative_moment_leading(orders: Sequence[int], N: float = 1.0) -> complex:
    orders = [int(n) for n in orders]
    if any(n < 1 for n in orders):
        raise DomainError("derivative orders must be >= 1")
    s, k = sum(orders), len(orders)
    const = (-1) ** (s - k) * 1j**s * math.prod(math.factorial(n) for n in orders) / math.factorial(s + 1)
    return const * float(N) ** s


def keating_snaith_moment(N: int, k: float) -> float:
    """E|Z|^{2k} over U(N): prod_j Gamma(j) Gamma(j+2k) / Gamma(j+k)^2."""
    if k <= -0.5:
        raise DomainError("moment needs k > -1/2")
    j = np.arange(1, N + 1, dtype=float)
    return float(np.exp(np.sum(gammaln(j) + gammaln(j + 2 * k) - 2 * gammaln(j + k))))


# -- Monte Carlo ----------------------------------------------------------------------


@dataclass
class MomentAccumulator:
    """Running mean / M2 for real and imaginary parts; merge() is Chan's update."""

    n: int = 0
    mean: complex = 0j
    m2_re: float = 0.0
    m2_im: float = 0.0

    def add_batch(self, x: np.ndarray):
        x = np.asarray(x, dtype=complex).ravel()
        if x.size == 0:
            return self
        other = MomentAccumulator(
            x.size,
            complex(x.mean()),
            float(np.sum((x.real - x.real.mean()) ** 2)),
            float(np.sum((x.imag - x.imag.mean()) ** 2)),
        )
        return self.merge(other)

    def merge(self, other: "MomentAccumulator"):
        if other.n == 0:
            return self
        if self.n == 0:
            self.n, self.mean, self.m2_re, self.m2_im = other.n, other.mean, other.m2_re, other.m2_im
            return self
        n = self.n + other.n
        d = other.mean - self.mean
        self.mean = self.mean + d * other.n / n
        self.m2_re += other.m2_re + d.real**2 * self.n * other.n / n
        self.m2_im += other.m2_im + d.imag**2 * self.n * other.n / n
        self.n = n
        return self

    @property
    def stderr_re(self) -> float:
        return math.sqrt(self.m2_re / (self.n - 1) / self.n) if self.n > 1 else 0.0

    @property
    def stderr_im(self) -> float:
        return math.sqrt(self.m2_im / (self.n - 1) / self.n) if self.n > 1 else 0.0


@dataclass(frozen=True)
class MCResult:
    estimate: complex
    stderr_re: float
    stderr_im: float
    samples: int

    @property
    def stderr(self) -> float:
        return math.hypot(self.stderr_re, self.stderr_im)

    def __iter__(self):
        return iter((self.estimate, self.stderr))

    def within(self, target: complex, nsigma: float = 3.0, floor: float = 1e-12) -> bool:
        d = self.estimate - complex(target)
        return abs(d.real) <= nsigma * self.stderr_re + floor and abs(d.imag) <= nsigma * self.stderr_im + floor


def _shift_statistic(angles: np.ndarray, shifts: Sequence[complex]) -> np.ndarray:
    # Z(theta_n + alpha) = prod_m (1 - e^{i(theta_m - theta_n - alpha)})
    diff = angles[:, None, :] - angles[:, :, None]  # [b, n, m] = theta_m - theta_n
    prod = np.ones(angles.shape, dtype=complex)
    for a in shifts:
        prod *= np.prod(1 - np.exp(1j * (diff - a)), axis=2)
    return prod.mean(axis=1)


def _derivative_statistic(angles: np.ndarray, orders: Sequence[int]) -> np.ndarray:
    c = char_poly_coeffs(angles)  # [b, j]
    j = np.arange(c.shape[-1])
    phase = np.exp(-1j * angles[:, :, None] * j)  # [b, n, j]
    prod = np.ones(angles.shape, dtype=complex)
    for n in orders:
        prod *= np.einsum("bj,bnj->bn", c * (-1j * j) ** n, phase)
    return prod.mean(axis=1)


def _abs_statistic(angles: np.ndarray, k: float) -> np.ndarray:
    z = np.prod(1 - np.exp(1j * angles), axis=1)
    return np.abs(z) ** (2 * k) + 0j


def _run_mc(N, stat, samples, seed, threads, batch):
    if samples < 100:
        raise DomainError("Monte Carlo needs at least 100 samples")
    threads = max(1, int(threads))
    streams = np.random.SeedSequence(seed).spawn(threads)
    shares = [samples // threads + (1 if i < samples % threads else 0) for i in range(threads)]

    def work(i):
        rng = np.random.default_rng(streams[i])
        acc = MomentAccumulator()
        left = shares[i]
        while left > 0:
            b = min(batch, left)
            acc.add_batch(stat(haar_angles(N, b, rng)))
            left -= b
        return acc

    if threads == 1:
        parts = [work(0)]
    else:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(work, range(threads)))
    total = MomentAccumulator()
    for p in parts:
        total.merge(p)
    return MCResult(total.mean, total.stderr_re, total.stderr_im, total.n)


def mc_moment(
    N: int,
    shifts: Sequence[float] | None = None,
    orders: Sequence[int] | None = None,
    samples: int = 10_000,
    seed: int = 20240601,
    threads: int = 1,
    batch: int = 4096,
) -> MCResult:
    """Monte Carlo estimate of the shifted (or derivative) moment."""
    if (shifts is None) == (orders is None):
        raise DomainError("give exactly one of shifts / orders")
    if shifts is not None:
        shifts = [complex(a) for a in shifts]
        stat = lambda th: _shift_statistic(th, shifts)
    else:
        orders = [int(n) for n in orders]
        stat = lambda th: _derivative_statistic(th, orders)
    return _run_mc(N, stat, samples, seed, threads, batch)


def mc_abs_moment(N: int, k: float, samples: int = 10_000, seed: int = 20240601, threads: int = 1, batch: int = 4096) -> MCResult:
    """Monte Carlo E|Z(0)|^{2k}; compare with :func:`keating_snaith_moment`."""
    return _run_mc(N, lambda th: _abs_statistic(th, k), samples, seed, threads, batch)
