"""Ratios-conjecture integrands for sums of zeta-derivative products over zeros.

For shifts alpha_1..alpha_k the integrand (in L = log(t/2pi)) is

    S = d/d delta A_alpha(delta)|_0 + sum_j W_j,
    W_j = zeta'/zeta(1+alpha_j)
          - (t/2pi)^{-alpha_j} zeta(1-alpha_j) A_{alpha, alpha_j -> 0}(-alpha_j)
            prod_{l != j} zeta(1+alpha_l-alpha_j) / zeta(1+alpha_l),

plus the shift-free L + 1 coming from (T/2pi) log(T/2pi).  The integrand for
orders (n_1..n_k) is prod n_r! times the coefficient of prod alpha_r^{n_r}.

The individual W_j carry poles 1/(alpha_l - alpha_j) that only cancel in the
sum.  To extract a mixed coefficient without rational-function algebra, all
shifts are put on a line alpha_r = x u_r; S(x u) is then a Laurent series in
x whose x^{|n|} coefficient is sum_{|m|=|n|} s_m u^m.  Sampling u_r on scaled
roots of unity of order D > |n| and applying a DFT isolates s_n exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import arith
from .arith import ArithDerivTensor, stieltjes
from .series import (
    PrecisionError,
    SeriesError,
    TruncSeries,
    t_power_expansion,
    zeta_laurent,
    zeta_logderiv_laurent,
)
from .symfunc import DomainError

MAX_TOTAL_ORDER = 6
POLE_TOL = 1e-8


@dataclass(frozen=True)
class LogPolynomial:
    coeffs: tuple  # c_0..c_d

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, L):
        return np.polyval(self.coeffs[::-1], L)

    def antiderivative(self) -> "LogPolynomial":
        """Q with d/dt [t Q(log(t/2pi))] = P(log(t/2pi)), i.e. Q + Q' = P."""
        c = self.coeffs
        q = [0.0] * len(c)
        for m in range(len(c) - 1, -1, -1):
            q[m] = c[m] - ((m + 1) * q[m + 1] if m + 1 < len(c) else 0.0)
        return LogPolynomial(tuple(q))

    def leading(self) -> "LogPolynomial":
        return LogPolynomial((0.0,) * self.degree + (self.coeffs[-1],))

    def __repr__(self):
        return "LogPolynomial(" + ", ".join(f"{c:.10g}" for c in self.coeffs) + ")"


def integrate_logpoly(p: LogPolynomial, T) -> np.ndarray | float:
    """(1/2pi) int_1^T P(log(t/2pi)) dt, exactly."""
    T = np.asarray(T, dtype=float)
    if np.any(T <= 1):
        raise DomainError("integration needs T > 1")
    Q = p.antiderivative()
    upper = T * Q(np.log(T / (2 * math.pi)))
    lower = Q(math.log(1 / (2 * math.pi)))
    val = (upper - lower) / (2 * math.pi)
    return val if val.ndim else float(val)


def leading_asymptotic(p: LogPolynomial, T):
    """c_d (T/2pi) L^d: the leading term of the integrated prediction."""
    T = np.asarray(T, dtype=float)
    return p.coeffs[-1] * T / (2 * math.pi) * np.log(T / (2 * math.pi)) ** p.degree


def mixed_leading(orders: Sequence[int]) -> float:
    orders = [int(n) for n in orders]
    if any(n < 1 for n in orders):
        raise DomainError("orders must be >= 1")
    s, k = sum(orders), len(orders)
    return (-1) ** (s + k) * math.prod(math.factorial(n) for n in orders) / math.factorial(s + 1)


# -- k = 1 ----------------------------------------------------------------------


def shanks_integrand(n: int) -> LogPolynomial:
    """Integrand for sum zeta^{(n)}(rho) by the series pipeline in (alpha, L)."""
    if not 1 <= n <= MAX_TOTAL_ORDER:
        raise DomainError(f"order {n} outside 1..{MAX_TOTAL_ORDER}")
    order = n + 1
    v = ("alpha", "L")
    logd = zeta_logderiv_laurent(order, "alpha").embed(v, {"L": order + 1})
    tpow = t_power_expansion(order + 1, "alpha", "L")
    zneg = zeta_laurent(order, "alpha", scale=-1.0).embed(v, {"L": order + 1})
    S = logd - tpow * zneg
    coeffs = [S.coefficient((n, m)).real * math.factorial(n) for m in range(n + 2)]
    return LogPolynomial(coeffs)


def shanks_closed_form(n: int) -> LogPolynomial:
    """n! [A_n + (-1)^{n+1} L^{n+1}/(n+1)! + sum_m (-1)^{m+1} L^m gamma_{n-m}/(m!(n-m)!)]."""
    c = [0.0] * (n + 2)
    c[0] += arith.logderiv_coefficient(n)
    c[n + 1] += (-1) ** (n + 1) / math.factorial(n + 1)
    for m in range(n + 1):
        c[m] += (-1) ** (m + 1) * stieltjes(n - m) / (math.factorial(m) * math.factorial(n - m))
    return LogPolynomial([math.factorial(n) * x for x in c])


# -- k = 2, transcribed ------------------------------------------------------------


def second_moment_integrand(tensor: ArithDerivTensor, gammas: Sequence[float] | None = None) -> LogPolynomial:
    if tensor.k != 2 or tensor.max_order < 3:
        raise DomainError("second moment needs a k=2 tensor of order >= 3")
    g0, g1, g2 = gammas if gammas is not None else (stieltjes(0), stieltjes(1), stieltjes(2))
    A = lambda i, j, m: tensor[(i, j, m)]
    c3 = 1 / 6
    c2 = 0.5 * (2 * g0 + A(0, 0, 1))
    c1 = 0.5 * (-8 * g1 + 4 * g0 * A(0, 0, 1) + A(0, 0, 2) + 2 * A(0, 1, 1))
    c0 = (
        -12 * g0**3
        - 36 * g0 * g1
        + 6 * g2
        - 24 * g1 * A(0, 0, 1)
        + 6 * g0 * A(0, 0, 2)
        + A(0, 0, 3)
        + 12 * g0 * A(0, 1, 1)
        + 3 * A(0, 1, 2)
        - 3 * A(0, 2, 1)
        + 6 * A(1, 1, 1)
    ) / 6
    return LogPolynomial((c0, c1, c2, c3))


# -- general k, from scratch --------------------------------------------------------------


class _LineArith:
    """Arithmetic factor pieces restricted to the line alpha = x u."""

    def __init__(self, source: str, primes, tensor: ArithDerivTensor | None, order: int):
        self.source, self.primes, self.tensor, self.order = source, primes, tensor, order

    def factor(self, lam, lam_delta) -> TruncSeries:
        if self.source == "primes":
            return arith.arith_factor_on_line(lam, lam_delta, self.order, self.primes)
        t = self.tensor
        c = np.zeros(t.max_order + 1, dtype=complex)
        for e, v in t.values.items():
            w = v / math.prod(math.factorial(i) for i in e)
            c[sum(e)] += w * math.prod(l**i for l, i in zip(list(lam) + [lam_delta], e))
        return TruncSeries.univariate(c, "x")

    def ddelta(self, lam) -> TruncSeries:
        if self.source == "primes":
            return arith.arith_ddelta_on_line(lam, self.order, self.primes)
        t = self.tensor
        c = np.zeros(t.max_order, dtype=complex)
        for e, v in t.values.items():
            if e[-1] != 1:
                continue
            w = v / math.prod(math.factorial(i) for i in e)
            c[sum(e) - 1] += w * math.prod(l**i for l, i in zip(lam, e[:-1]))
        return TruncSeries.univariate(c, "x")


def line_integrand(u: Sequence[complex], order: int, line_arith: _LineArith, standalone: bool = True) -> TruncSeries:
    """S(x u; L) as a series in (x, L)."""
    k = len(u)
    v = ("x", "L")
    hL = order + 2
    emb = lambda s: s.embed(v, {"L": hL})
    zeta = lambda c: emb(zeta_laurent(order, "x", scale=c))
    S = emb(line_arith.ddelta(u))
    for j in range(k):
        S = S + emb(zeta_logderiv_laurent(order, "x", scale=u[j]))
        lam = [0.0 if r == j else u[r] for r in range(k)]
        term = t_power_expansion(hL, "x", "L", scale=u[j]) * zeta(-u[j]) * emb(line_arith.factor(lam, -u[j]))
        for l in range(k):
            if l != j:
                term = term * zeta(u[l] - u[j]) * zeta(u[l]).reciprocal()
        S = S - term
    if standalone:
        S = S + TruncSeries.from_dict({(0, 0): 1.0, (0, 1): 1.0}, v, (order, hL))
    return S


def _check_poles(S: TruncSeries, tol: float):
    for e, c in S.terms().items():
        if e[0] < 0 and abs(c) > tol:
            raise SeriesError(f"uncancelled pole term x^{e[0]} L^{e[1]}: {c}")


def ratios_integrand(
    orders: Sequence[int],
    primes=None,
    arith_source: str = "primes",
    tensor: ArithDerivTensor | None = None,
    standalone: bool = True,
    radii: Sequence[float] | None = None,
    return_imag: bool = False,
):
    """Integrand polynomial for sum prod zeta^{(n_r)}(rho), derived from the shifted ratios formula."""
    orders = [int(n) for n in orders]
    if not orders or any(n < 1 for n in orders):
        raise DomainError("orders must be positive integers")
    n_tot = sum(orders)
    if n_tot > MAX_TOTAL_ORDER:
        raise arith.UnsupportedOrder(f"total order {n_tot} above {MAX_TOTAL_ORDER}")
    k = len(orders)
    if arith_source == "tensor":
        if tensor is None:
            tensor = arith.arith_deriv_tensor(k, 3, primes)
        if tensor.k != k:
            raise DomainError("tensor shift count does not match orders")
    elif arith_source != "primes":
        raise ValueError(f"unknown arithmetic source {arith_source!r}")
    order = min(n_tot + 2, arith.MAX_STIELTJES)
    la = _LineArith(arith_source, primes, tensor, order + 2)
    D = n_tot + 1
    radii = list(radii) if radii is not None else [1.0 - 0.37 * r for r in range(k)]
    omega = np.exp(2j * math.pi / D)
    acc = np.zeros(n_tot + 2, dtype=complex)
    for js in itertools.product(range(D), repeat=k):
        u = [radii[r] * omega ** js[r] for r in range(k)]
        S = line_integrand(u, order, la, standalone)
        scale = max(1.0, max(abs(c) for c in S.terms().values()))
        _check_poles(S, POLE_TOL * scale)
        try:
            row = np.array([S.coefficient((n_tot, m)) for m in range(n_tot + 2)])
        except PrecisionError as exc:
            raise PrecisionError(f"insufficient expansion order for {orders}: {exc}") from None
        acc += row * omega ** (-sum(j * n for j, n in zip(js, orders)))
    acc /= D**k * math.prod(r**n for r, n in zip(radii, orders))
    acc *= math.prod(math.factorial(n) for n in orders)
    poly = LogPolynomial(acc.real)
    return (poly, float(np.max(np.abs(acc.imag)))) if return_imag else poly


def derive(orders: Sequence[int], primes=None, **kw) -> LogPolynomial:
    orders = [int(n) for n in orders]
    if len(orders) == 1:
        return shanks_integrand(orders[0])
    return ratios_integrand(orders, primes, **kw)


# -- comparison --------------------------------------------------------------------------


def compare(trace, poly: LogPolynomial):
    """Fill prediction columns of a MomentTrace in place and return it."""
    if poly.degree != sum(trace.orders) + 1:
        raise DomainError("polynomial degree does not match the trace orders")
    trace.prediction = np.asarray(integrate_logpoly(poly, np.maximum(trace.T, 1.0 + 1e-12)), dtype=float)
    trace.prediction_leading = np.asarray(leading_asymptotic(poly, trace.T), dtype=float)
    return trace
