"""Truncated multivariate Laurent series over complex coefficients.

A :class:`TruncSeries` is known exactly on a box ``low <= e <= high`` of
exponent tuples (optionally also capped in total degree).  ``low`` is a
guaranteed valuation, so a negative entry is a pole order; ``high`` is the
last exponent whose coefficient is known.  Arithmetic propagates both bounds,
so a coefficient is either known or :meth:`TruncSeries.coefficient` raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np


class SeriesError(ValueError):
    """Domain error in series arithmetic."""


class PrecisionError(SeriesError):
    """Requested coefficient lies beyond the known truncation box."""


@dataclass(frozen=True)
class SeriesConfig:
    max_degree: int = 6
    # intermediate products in the one-swap terms carry double poles
    pole_cap: int = 4
    singular_tol: float = 1e-300


DEFAULTS = SeriesConfig()


def _min_opt(*vals):
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


class TruncSeries:
    __slots__ = ("variables", "low", "high", "total", "coeffs", "pole_cap")

    def __init__(self, variables, low, high, coeffs=None, total=None, pole_cap=None):
        self.variables = tuple(variables)
        self.low = tuple(int(x) for x in low)
        self.high = tuple(int(x) for x in high)
        if not (len(self.variables) == len(self.low) == len(self.high)):
            raise SeriesError("variables, low and high must have equal length")
        if len(set(self.variables)) != len(self.variables):
            raise SeriesError("duplicate variable names")
        self.total = None if total is None else int(total)
        self.pole_cap = DEFAULTS.pole_cap if pole_cap is None else pole_cap
        if any(-lo > self.pole_cap for lo in self.low):
            raise SeriesError(f"pole order {max(-lo for lo in self.low)} exceeds cap {self.pole_cap}")
        shape = tuple(max(0, h - lo + 1) for lo, h in zip(self.low, self.high))
        if coeffs is None:
            self.coeffs = np.zeros(shape, dtype=complex)
        else:
            c = np.asarray(coeffs, dtype=complex)
            if c.shape != shape:
                raise SeriesError(f"coefficient array shape {c.shape} != box shape {shape}")
            self.coeffs = c.copy()
        self._apply_total()

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, variables, high, low=None, total=None):
        variables = tuple(variables)
        high = _broadcast(high, len(variables))
        low = _broadcast(0 if low is None else low, len(variables))
        return cls(variables, low, high, total=total)

    @classmethod
    def constant(cls, c, variables, high, total=None):
        s = cls.zero(variables, high, total=total)
        if s.coeffs.size:
            s.coeffs[(0,) * len(s.variables)] = c
        return s

    @classmethod
    def monomial(cls, exponents, variables, high, coeff=1.0, total=None):
        """``coeff * prod x_r^{e_r}``; the exponents double as the valuation."""
        variables = tuple(variables)
        exps = tuple(int(e) for e in exponents)
        s = cls(variables, exps, _broadcast(high, len(variables)), total=total)
        if s.coeffs.size and all(h >= e for h, e in zip(s.high, exps)):
            s.coeffs[(0,) * len(variables)] = coeff
        return s

    @classmethod
    def variable(cls, name, variables, high, total=None):
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise SeriesError(f"unknown variable {name!r}")
        return cls.monomial(exps, variables, high, total=total)

    @classmethod
    def from_dict(cls, terms: Mapping[tuple, complex], variables, high, low=None, total=None):
        variables = tuple(variables)
        if low is None:
            keys = list(terms) or [(0,) * len(variables)]
            low = tuple(min(min(k[r] for k in keys), 0) for r in range(len(variables)))
        s = cls(variables, _broadcast(low, len(variables)), _broadcast(high, len(variables)), total=total)
        for k, v in terms.items():
            if s._in_box(k):
                s.coeffs[s._index(k)] += v
        s._apply_total()
        return s

    @classmethod
    def univariate(cls, coeffs: Sequence[complex], var: str, low: int = 0, high: int | None = None):
        """Series sum_i coeffs[i] * var^(low + i), known through ``high``."""
        if high is None:
            high = low + len(coeffs) - 1
        s = cls((var,), (low,), (high,))
        n = min(len(coeffs), s.coeffs.shape[0])
        s.coeffs[:n] = np.asarray(coeffs[:n], dtype=complex)
        return s

    # -- bookkeeping ------------------------------------------------------

    def _index(self, exps):
        return tuple(e - lo for e, lo in zip(exps, self.low))

    def _in_box(self, exps):
        if any(e < lo or e > h for e, lo, h in zip(exps, self.low, self.high)):
            return False
        return self.total is None or sum(exps) <= self.total

    def _apply_total(self):
        if self.total is None or self.coeffs.size == 0:
            return
        mask = _over_total_mask(self.coeffs.shape, self.low, self.total)
        if mask is not None:
            self.coeffs[mask] = 0

    def copy(self):
        return TruncSeries(self.variables, self.low, self.high, self.coeffs, self.total, self.pole_cap)

    def embed(self, variables: Sequence[str], high: Mapping[str, int] | None = None) -> "TruncSeries":
        """View in a larger variable list; new variables enter at degree 0."""
        variables = tuple(variables)
        missing = [v for v in self.variables if v not in variables]
        if missing:
            raise SeriesError(f"cannot drop variables {missing}")
        high = high or {}
        low, hi = [], []
        for v in variables:
            if v in self.variables:
                r = self.variables.index(v)
                low.append(self.low[r])
                hi.append(self.high[r])
            else:
                low.append(0)
                hi.append(high.get(v, DEFAULTS.max_degree))
        out = TruncSeries(variables, low, hi, total=self.total, pole_cap=self.pole_cap)
        src = self.coeffs
        for v in variables:
            if v not in self.variables:
                src = src[..., np.newaxis]
        perm_vars = list(self.variables) + [v for v in variables if v not in self.variables]
        src = np.moveaxis(src, list(range(len(perm_vars))), [variables.index(v) for v in perm_vars])
        if out.coeffs.size and src.size:
            sl = tuple(slice(0, n) for n in src.shape)
            out.coeffs[sl] = src
        return out

    def reframe(self, low=None, high=None, total=None) -> "TruncSeries":
        """Copy into another box; dropping known nonzero terms below ``low`` is an error."""
        low = self.low if low is None else tuple(low)
        high = self.high if high is None else tuple(high)
        total = self.total if total is None else total
        out = TruncSeries(self.variables, low, high, total=total, pole_cap=self.pole_cap)
        if not self.coeffs.size or not out.coeffs.size:
            return out
        src, dst = [], []
        for lo_s, lo_d, hi_s, hi_d in zip(self.low, low, self.high, high):
            a, b = max(lo_s, lo_d), min(hi_s, hi_d)
            if b < a:
                return out
            src.append(slice(a - lo_s, b - lo_s + 1))
            dst.append(slice(a - lo_d, b - lo_d + 1))
        if any(ld > ls for ld, ls in zip(low, self.low)):
            kept = np.zeros_like(self.coeffs)
            kept[tuple(src)] = self.coeffs[tuple(src)]
            lost = self.coeffs - kept
            # only terms below the new valuation count as dropped knowledge
            mask = np.zeros(self.coeffs.shape, dtype=bool)
            grids = np.indices(self.coeffs.shape)
            for g, ls, ld in zip(grids, self.low, low):
                mask |= (g + ls) < ld
            if np.any(np.abs(lost[mask]) > 0):
                raise SeriesError("reframe would drop nonzero terms below the new valuation")
        out.coeffs[tuple(dst)] = self.coeffs[tuple(src)]
        out._apply_total()
        return out

    def truncate(self, high=None, total=None) -> "TruncSeries":
        high = self.high if high is None else tuple(min(a, b) for a, b in zip(_broadcast(high, len(self.low)), self.high))
        return self.reframe(high=high, total=_min_opt(total, self.total))

    # -- access -------------------------------------------------------------

    def coefficient(self, exponents) -> complex:
        exps = tuple(int(e) for e in exponents)
        if len(exps) != len(self.variables):
            raise SeriesError("exponent tuple has wrong length")
        if any(e < lo for e, lo in zip(exps, self.low)):
            return 0j
        if any(e > h for e, h in zip(exps, self.high)) or (self.total is not None and sum(exps) > self.total):
            raise PrecisionError(f"coefficient {exps} lies outside the known box")
        return complex(self.coeffs[self._index(exps)])

    def __getitem__(self, exponents):
        if not isinstance(exponents, tuple):
            exponents = (exponents,)
        return self.coefficient(exponents)

    def terms(self, tol: float = 0.0) -> dict:
        out = {}
        for idx in zip(*np.nonzero(np.abs(self.coeffs) > tol)):
            out[tuple(int(i) + lo for i, lo in zip(idx, self.low))] = complex(self.coeffs[idx])
        return out

    def constant_term(self) -> complex:
        return self.coefficient((0,) * len(self.variables))

    def __repr__(self):
        parts = []
        for e, c in sorted(self.terms().items()):
            mono = "*".join(f"{v}^{k}" if k != 1 else v for v, k in zip(self.variables, e) if k)
            parts.append(f"({c:.6g})" + (f"*{mono}" if mono else ""))
        body = " + ".join(parts) or "0"
        return f"TruncSeries[{','.join(self.variables)}; high={self.high}]({body})"

    def allclose(self, other: "TruncSeries", tol: float = 1e-12) -> bool:
        a, b = _align(self, other)
        d = a - b
        return bool(np.all(np.abs(d.coeffs) <= tol))

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            return _align(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self, TruncSeries.constant(other, self.variables, self.high, self.total)
        return NotImplemented

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        low = tuple(min(x, y) for x, y in zip(a.low, b.low))
        high = tuple(min(x, y) for x, y in zip(a.high, b.high))
        total = _min_opt(a.total, b.total)
        ra, rb = a.reframe(low, high, total), b.reframe(low, high, total)
        ra.coeffs += rb.coeffs
        ra.pole_cap = max(a.pole_cap, b.pole_cap)
        return ra

    __radd__ = __add__

    def __neg__(self):
        out = self.copy()
        out.coeffs = -out.coeffs
        return out

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            out = self.copy()
            out.coeffs = out.coeffs * other
            return out
        if not isinstance(other, TruncSeries):
            return NotImplemented
        a, b = _align(self, other)
        cap = max(a.pole_cap, b.pole_cap)
        low = tuple(x + y for x, y in zip(a.low, b.low))
        if any(-lo > cap for lo in low):
            raise SeriesError(f"pole order cap {cap} exceeded in product")
        high = tuple(min(ha + lb, hb + la) for ha, hb, la, lb in zip(a.high, b.high, a.low, b.low))
        ta = None if a.total is None else a.total + sum(b.low)
        tb = None if b.total is None else b.total + sum(a.low)
        out = TruncSeries(a.variables, low, high, total=_min_opt(ta, tb), pole_cap=cap)
        if a.coeffs.size and b.coeffs.size and out.coeffs.size:
            _convolve_into(out.coeffs, a.coeffs, b.coeffs)
            out._apply_total()
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * (1.0 / other)
        if isinstance(other, TruncSeries):
            return self * other.reciprocal()
        return NotImplemented

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        if n < 0:
            return self.reciprocal() ** (-n)
        result = TruncSeries.constant(1.0, self.variables, self.high, self.total)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- analytic operations -------------------------------------------------

    def _normalized(self):
        """Split self = c * x^low * (1 + u) with u of nonnegative exponents, u(0) = 0."""
        if not self.coeffs.size:
            raise SeriesError("empty series has no leading term")
        c = complex(self.coeffs[(0,) * len(self.variables)])
        if abs(c) < DEFAULTS.singular_tol:
            raise SeriesError("leading coefficient vanishes; series is singular")
        rel_high = tuple(h - lo for h, lo in zip(self.high, self.low))
        rel_total = None if self.total is None else self.total - sum(self.low)
        unit = TruncSeries(self.variables, (0,) * len(self.low), rel_high, self.coeffs / c, rel_total, self.pole_cap)
        return c, unit

    def _nilpotent_degree(self):
        d = sum(self.high)
        return d if self.total is None else min(d, self.total)

    def tightened(self) -> "TruncSeries":
        """Raise the declared valuation past leading zeros (univariate only).

        With several variables an all-zero slab may still hide unknown terms
        beyond the box in the other variables, so no tightening is done.
        """
        if len(self.variables) != 1 or not self.coeffs.size:
            return self
        nz = np.nonzero(self.coeffs)[0]
        if not len(nz) or nz[0] == 0:
            return self
        return TruncSeries(self.variables, (self.low[0] + int(nz[0]),), self.high, self.coeffs[nz[0]:], self.total, self.pole_cap)

    def reciprocal(self) -> "TruncSeries":
        self = self.tightened()
        c, unit = self._normalized()
        one = TruncSeries.constant(1.0, unit.variables, unit.high, unit.total)
        r = one
        # Newton: r <- r (2 - unit r); doubles the number of correct terms
        for _ in range(max(1, math.ceil(math.log2(unit._nilpotent_degree() + 2))) + 1):
            r = r + r * (one - unit * r)
        low = tuple(-lo for lo in self.low)
        high = tuple(h - 2 * lo for h, lo in zip(self.high, self.low))
        total = None if self.total is None else self.total - 2 * sum(self.low)
        return TruncSeries(self.variables, low, high, r.reframe(high=unit.high).coeffs / c, total, self.pole_cap)

    def _require_no_poles(self, op):
        if any(lo < 0 for lo in self.low):
            raise SeriesError(f"{op} needs a series without poles")

    def exp(self) -> "TruncSeries":
        self._require_no_poles("exp")
        base = self.reframe(low=(0,) * len(self.low))
        c0 = complex(base.coeffs[(0,) * len(base.low)]) if base.coeffs.size else 0j
        u = base.copy()
        if u.coeffs.size:
            u.coeffs[(0,) * len(u.low)] = 0
        n = u._nilpotent_degree()
        one = TruncSeries.constant(1.0, u.variables, u.high, u.total)
        acc = one
        for k in range(n, 0, -1):
            acc = one + u * acc * (1.0 / k)
        return acc * complex(np.exp(c0))

    def log(self) -> "TruncSeries":
        self._require_no_poles("log")
        base = self.reframe(low=(0,) * len(self.low))
        c0 = complex(base.coeffs[(0,) * len(base.low)]) if base.coeffs.size else 0j
        if abs(c0) < DEFAULTS.singular_tol:
            raise SeriesError("log needs a nonzero constant term")
        u = base * (1.0 / c0)
        u.coeffs[(0,) * len(u.low)] = 0
        n = u._nilpotent_degree()
        # log(1+u) = u (1 - u (1/2 - u (1/3 - ...)))
        acc = u * (1.0 / n) if n else u * 0
        for k in range(n - 1, 0, -1):
            acc = u * (1.0 / k - acc)
        out = acc + complex(np.log(c0))
        return out

    def derivative(self, var: str) -> "TruncSeries":
        if var not in self.variables:
            return TruncSeries.zero(self.variables, self.high, total=self.total)
        r = self.variables.index(var)
        exps = np.arange(self.low[r], self.high[r] + 1)
        shape = [1] * len(self.variables)
        shape[r] = -1
        scaled = self.coeffs * exps.reshape(shape)
        low = list(self.low)
        high = list(self.high)
        high[r] -= 1
        if low[r] == 0:
            # the constant slab differentiates to zero; keep valuation 0
            scaled = np.delete(scaled, 0, axis=r) if scaled.shape[r] else scaled
            new_low = 0
            low[r] = new_low
            return TruncSeries(self.variables, low, high, scaled, None if self.total is None else self.total - 1, self.pole_cap)
        low[r] -= 1
        return TruncSeries(self.variables, low, high, scaled, None if self.total is None else self.total - 1, self.pole_cap)

    def scale_variable(self, var: str, factor: complex) -> "TruncSeries":
        """Substitute var -> factor * var."""
        r = self.variables.index(var)
        exps = np.arange(self.low[r], self.high[r] + 1)
        shape = [1] * len(self.variables)
        shape[r] = -1
        out = self.copy()
        out.coeffs = out.coeffs * (complex(factor) ** exps.astype(float)).reshape(shape)
        return out


@lru_cache(maxsize=4096)
def _over_total_mask(shape, low, total):
    deg = sum(g + lo for g, lo in zip(np.indices(shape), low))
    mask = deg > total
    return mask if mask.any() else None


def _convolve_into(out: np.ndarray, a: np.ndarray, b: np.ndarray):
    """out += (a * b) restricted to out's shape; exact, loops over the sparser factor."""
    if np.count_nonzero(a) > np.count_nonzero(b):
        a, b = b, a
    for idx in zip(*np.nonzero(a)):
        dst, src = [], []
        for i, nb, no in zip(idx, b.shape, out.shape):
            stop = min(i + nb, no)
            if stop <= i:
                break
            dst.append(slice(i, stop))
            src.append(slice(0, stop - i))
        else:
            out[tuple(dst)] += a[idx] * b[tuple(src)]


def _broadcast(x, n):
    if isinstance(x, (int, np.integer)):
        return (int(x),) * n
    x = tuple(int(v) for v in x)
    if len(x) != n:
        raise SeriesError("bound has wrong length")
    return x


def _align(a: TruncSeries, b: TruncSeries):
    if a.variables == b.variables:
        return a, b
    union = list(a.variables) + [v for v in b.variables if v not in a.variables]
    ha = {v: b.high[b.variables.index(v)] for v in b.variables}
    hb = {v: a.high[a.variables.index(v)] for v in a.variables}
    return a.embed(union, ha), b.embed(union, hb)


# -- zeta expansions ---------------------------------------------------------


def zeta_laurent(order: int, var: str = "x", scale: complex = 1.0) -> TruncSeries:
    """zeta(1 + scale*x) = 1/(scale x) + sum_n (-1)^n gamma_n (scale x)^n / n!."""
    from .arith import stieltjes

    if order < 0:
        raise SeriesError("order must be nonnegative")
    coeffs = [1.0 / scale] + [(-1) ** n * stieltjes(n) * scale**n / math.factorial(n) for n in range(order + 1)]
    return TruncSeries.univariate(coeffs, var, low=-1, high=order)


@lru_cache(maxsize=None)
def logderiv_coeffs(order: int) -> tuple[float, ...]:
    """A_0..A_order with zeta'/zeta(1+x) = -1/x + sum_n A_n x^n.

    Derived through the series engine from the Stieltjes constants.
    """
    x = TruncSeries.monomial((1,), ("x",), order + 2)  # exact, so give it headroom
    xz = (x * zeta_laurent(order, "x")).reframe(low=(0,))
    d = xz.log().derivative("x")
    return tuple(float(d.coefficient((n,)).real) for n in range(order + 1))


def zeta_logderiv_laurent(order: int, var: str = "x", scale: complex = 1.0) -> TruncSeries:
    """zeta'/zeta(1 + scale*x) as a Laurent series in x."""
    a = logderiv_coeffs(order)
    coeffs = [-1.0 / scale] + [a[n] * scale**n for n in range(order + 1)]
    return TruncSeries.univariate(coeffs, var, low=-1, high=order)


def t_power_expansion(order: int, alpha: str = "alpha", log_var: str = "L", scale: complex = 1.0) -> TruncSeries:
    """(t/2pi)^(-scale*alpha) = sum_j (-1)^j (scale alpha)^j L^j / j!, exact in the box."""
    s = TruncSeries.zero((alpha, log_var), (order, order))
    for j in range(order + 1):
        s.coeffs[j, j] = (-scale) ** j / math.factorial(j)
    return s


def series_sum(items: Iterable[TruncSeries]) -> TruncSeries:
    it = iter(items)
    acc = next(it)
    for s in it:
        acc = acc + s
    return acc
