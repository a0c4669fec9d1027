"""Stieltjes constants, prime tables and the prime-product arithmetic factor.

The factor A_{alpha_1..alpha_k}(delta) is a product over primes of

    (1 + F_1(p) + ... + F_k(p)) / prod_j (1 - p^{-(1 + alpha_j)}),
    F_m(p) = (-1)^m sum_{|J| = m} p^{-(m + (m-1) delta + sum_{j in J} alpha_j)},

and :func:`arith_deriv_tensor` returns its partial derivatives at the origin.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np

from .series import TruncSeries
from .symfunc import DomainError

MAX_STIELTJES = 8
DEFAULT_PRIMES = 1000
MIN_PRIMES = 10


class UnsupportedOrder(DomainError):
    pass


# -- primes -----------------------------------------------------------------


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def first_primes(count: int) -> np.ndarray:
    bound = max(16, int(count * (math.log(count + 2) + math.log(math.log(count + 3)) + 2)))
    while True:
        ps = primes_upto(bound)
        if len(ps) >= count:
            return ps[:count]
        bound *= 2


@dataclass(frozen=True)
class PrimeTable:
    primes: tuple[int, ...]

    def __post_init__(self):
        ps = self.primes
        if ps and ps[0] != 2:
            raise DomainError("prime table must start at 2")
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise DomainError("prime table must be ascending")

    @classmethod
    def first(cls, count: int = DEFAULT_PRIMES) -> "PrimeTable":
        return cls(tuple(int(p) for p in first_primes(count)))

    def __len__(self):
        return len(self.primes)

    def array(self) -> np.ndarray:
        return np.asarray(self.primes, dtype=float)


# -- Stieltjes constants ------------------------------------------------------


def _log_poly_derivs(n: int, count: int):
    """Derivatives of (log x)^n / x as (a, P) with g = x^{-a} P(log x)."""
    P = [mpmath.mpf(0)] * n + [mpmath.mpf(1)]  # coefficients in log x, ascending
    a = 1
    out = [(a, P)]
    for _ in range(count):
        dP = [i * P[i] for i in range(1, len(P))] or [mpmath.mpf(0)]
        newP = [-a * c for c in P]
        for i, c in enumerate(dP):
            newP[i] += c
        a, P = a + 1, newP
        out.append((a, P))
    return out


@lru_cache(maxsize=None)
def stieltjes(n: int, cutoff: int = 30, terms: int = 12) -> float:
    """gamma_n from an Euler-Maclaurin corrected limit of the defining sum.

    gamma_n = sum_{k<M} f(k) + f(M)/2 - log^{n+1} M/(n+1) - sum_j B_2j/(2j)! f^{(2j-1)}(M)
    with f(x) = log^n x / x.
    """
    if n < 0:
        raise DomainError("Stieltjes index must be nonnegative")
    if n > MAX_STIELTJES:
        raise UnsupportedOrder(f"Stieltjes constant gamma_{n} not supported (max {MAX_STIELTJES})")
    with mpmath.workdps(40):
        M = mpmath.mpf(cutoff)
        f = lambda x: mpmath.log(x) ** n / x
        s = mpmath.fsum(f(mpmath.mpf(k)) for k in range(1, cutoff))
        s += f(M) / 2 - mpmath.log(M) ** (n + 1) / (n + 1)
        derivs = _log_poly_derivs(n, 2 * terms)
        lm = mpmath.log(M)
        for j in range(1, terms + 1):
            a, P = derivs[2 * j - 1]
            val = M ** (-a) * mpmath.polyval(P[::-1], lm)
            s -= mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * val
        return float(s)


def logderiv_coefficient(n: int) -> float:
    """A_n in zeta'/zeta(1+x) = -1/x + sum A_n x^n (derived from the gamma_n)."""
    from .series import logderiv_coeffs

    if n > MAX_STIELTJES:
        raise UnsupportedOrder(f"A_{n} not supported")
    return logderiv_coeffs(MAX_STIELTJES)[n]


def save_stieltjes(path, nmax: int = MAX_STIELTJES):
    lines = ["# stieltjes v1"] + [f"{n}\t{stieltjes(n):.15g}" for n in range(nmax + 1)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_stieltjes(path) -> dict[int, float]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        n, v = line.split("\t")
        out[int(n)] = float(v)
    return out


# -- arithmetic factor ----------------------------------------------------------


def _check_shifts(shifts, delta):
    if any(abs(complex(a).real) >= 0.25 for a in shifts):
        raise DomainError("arithmetic factor needs |Re alpha_j| < 1/4")
    if abs(delta) >= 0.25:
        raise DomainError("arithmetic factor needs |delta| < 1/4")


def _table(primes) -> PrimeTable:
    if primes is None:
        return PrimeTable.first(DEFAULT_PRIMES)
    if isinstance(primes, int):
        return PrimeTable.first(primes)
    return primes if isinstance(primes, PrimeTable) else PrimeTable(tuple(primes))


def arith_factor(shifts: Sequence[complex], delta: complex = 0.0, primes=None) -> complex:
    shifts = [complex(a) for a in shifts]
    _check_shifts(shifts, delta)
    p = _table(primes).array()
    lp = np.log(p)
    k = len(shifts)
    num = np.ones_like(p, dtype=complex)
    for m in range(1, k + 1):
        for J in itertools.combinations(range(k), m):
            expo = m + (m - 1) * delta + sum(shifts[j] for j in J)
            num += (-1) ** m * np.exp(-expo * lp)
    den = np.ones_like(p, dtype=complex)
    for a in shifts:
        den *= 1 - np.exp(-(1 + a) * lp)
    return complex(np.exp(np.sum(np.log(num / den))))


@dataclass
class ArithDerivTensor:
    k: int
    max_order: int
    prime_cutoff: int
    values: dict = field(default_factory=dict)

    def __getitem__(self, idx) -> float:
        idx = tuple(idx)
        if sum(idx) > self.max_order:
            raise DomainError(f"derivative order {sum(idx)} exceeds tensor order {self.max_order}")
        return self.values.get(idx, 0.0)

    def taylor(self, variables: Sequence[str], high: int) -> TruncSeries:
        """Taylor polynomial of A in the given variables (shifts first, delta last)."""
        terms = {e: v / math.prod(math.factorial(i) for i in e) for e, v in self.values.items()}
        return TruncSeries.from_dict(terms, variables, high, low=0, total=self.max_order)

    def save(self, path):
        lines = [f"# arith-tensor v1 k={self.k} max_order={self.max_order} cutoff={self.prime_cutoff}"]
        for e in sorted(self.values):
            lines.append(" ".join(map(str, e)) + f"\t{self.values[e]:.15g}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "ArithDerivTensor":
        text = Path(path).read_text().splitlines()
        head = dict(tok.split("=") for tok in text[0].split()[3:])
        t = cls(int(head["k"]), int(head["max_order"]), int(head["cutoff"]))
        for line in text[1:]:
            if line.strip():
                key, v = line.split("\t")
                t.values[tuple(int(x) for x in key.split())] = float(v)
        return t


def _prime_log_series(p: float, k: int, variables, order: int) -> TruncSeries:
    lp = math.log(p)
    shifts = [TruncSeries.variable(v, variables, order, total=order) for v in variables[:k]]
    delta = TruncSeries.variable(variables[-1], variables, order, total=order)

    def ppow(const, lin):
        # p^{-(const + lin)} with lin a linear series
        return (lin * (-lp)).exp() * p ** (-const)

    num = TruncSeries.constant(1.0, variables, order, total=order)
    for m in range(1, k + 1):
        for J in itertools.combinations(range(k), m):
            lin = delta * (m - 1)
            for j in J:
                lin = lin + shifts[j]
            num = num + ppow(m, lin) * (-1) ** m
    out = num.log()
    for a in shifts:
        out = out - (TruncSeries.constant(1.0, variables, order, total=order) - ppow(1, a)).log()
    return out


def arith_deriv_tensor(k: int = 2, max_order: int = 3, primes=None) -> ArithDerivTensor:
    if k not in (1, 2):
        raise DomainError("tensor supported for k = 1 or 2")
    if not 0 <= max_order <= 3:
        raise UnsupportedOrder("tensor order must be at most 3")
    table = _table(primes)
    if len(table) < MIN_PRIMES:
        raise DomainError(f"need at least {MIN_PRIMES} primes")
    return _tensor_cached(k, max_order, table.primes)


@lru_cache(maxsize=8)
def _tensor_cached(k, max_order, primes):
    variables = ("alpha", "beta", "delta") if k == 2 else ("alpha", "delta")
    acc = TruncSeries.zero(variables, max_order, total=max_order)
    for p in primes:
        acc = acc + _prime_log_series(float(p), k, variables, max_order)
    A = acc.exp()
    t = ArithDerivTensor(k, max_order, len(primes))
    for e, c in A.terms().items():
        if sum(e) <= max_order:
            t.values[e] = math.prod(math.factorial(i) for i in e) * c.real
    return t


# -- arithmetic factor restricted to a line through the origin --------------------
#
# With alpha_j = x lam_j and delta = x lam_delta every per-prime factor is a
# power series in the single variable x.  All primes are handled at once as
# rows of a coefficient matrix.


def _batched_log(a: np.ndarray) -> np.ndarray:
    """Power-series log of each row; rows need a nonzero constant term."""
    M = a.shape[1] - 1
    b = np.zeros_like(a)
    b[:, 0] = np.log(a[:, 0])
    for n in range(1, M + 1):
        acc = a[:, n].copy()
        for k in range(1, n):
            acc -= (k / n) * b[:, k] * a[:, n - k]
        b[:, n] = acc / a[:, 0]
    return b


def _batched_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    q = np.zeros_like(a)
    for n in range(a.shape[1]):
        acc = a[:, n].copy()
        for k in range(n):
            acc -= q[:, k] * b[:, n - k]
        q[:, n] = acc / b[:, 0]
    return q


def _ppow_rows(lp: np.ndarray, const: float, lam: complex, order: int) -> np.ndarray:
    """Rows of Taylor coefficients of p^{-(const + x lam)} in x."""
    m = np.arange(order + 1)
    fact = np.array([math.factorial(int(i)) for i in m], dtype=float)
    return np.exp(-const * lp)[:, None] * (-lam * lp[:, None]) ** m[None, :] / fact[None, :]


def _numerator_rows(lp, lam, lam_delta, order, d_delta=False):
    k = len(lam)
    rows = np.zeros((lp.size, order + 1), dtype=complex)
    if not d_delta:
        rows[:, 0] = 1
    for m in range(1, k + 1):
        for J in itertools.combinations(range(k), m):
            slope = sum(lam[j] for j in J) + (m - 1) * lam_delta
            term = (-1) ** m * _ppow_rows(lp, m, slope, order)
            if d_delta:
                term = term * (-(m - 1) * lp[:, None])
            rows += term
    return rows


def arith_factor_on_line(lam: Sequence[complex], lam_delta: complex, order: int, primes=None) -> TruncSeries:
    """A_{x lam}(x lam_delta) as a series in x through degree ``order``."""
    table = _table(primes)
    if len(table) < MIN_PRIMES:
        raise DomainError(f"need at least {MIN_PRIMES} primes")
    lp = np.log(table.array())
    lam = [complex(v) for v in lam]
    num = _numerator_rows(lp, lam, complex(lam_delta), order)
    logs = _batched_log(num)
    for v in lam:
        den = -_ppow_rows(lp, 1, v, order)
        den[:, 0] += 1
        logs -= _batched_log(den)
    total = logs.sum(axis=0)
    total[0] = 0  # A = 1 at the origin exactly
    return TruncSeries.univariate(total, "x").exp()


def arith_ddelta_on_line(lam: Sequence[complex], order: int, primes=None) -> TruncSeries:
    """d/d delta A_{x lam}(delta) at delta = 0, as a series in x.

    Since A(0) = 1 identically, this is sum_p (d num_p / d delta) / num_p.
    """
    table = _table(primes)
    if len(table) < MIN_PRIMES:
        raise DomainError(f"need at least {MIN_PRIMES} primes")
    lp = np.log(table.array())
    lam = [complex(v) for v in lam]
    num = _numerator_rows(lp, lam, 0j, order)
    dnum = _numerator_rows(lp, lam, 0j, order, d_delta=True)
    return TruncSeries.univariate(_batched_div(dnum, num).sum(axis=0), "x")
