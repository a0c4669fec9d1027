"""Symmetric polynomials, Vandermonde products and the product-sum identity.

Every closed form here has a brute-force twin (``*_literal`` / ``*_enum``)
so that identities can be checked against plain enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

EPS_DISTINCT = 1e-9


class DomainError(ValueError):
    """Input lies outside the domain where a closed form is valid."""


@dataclass(frozen=True)
class ValueVector:
    entries: tuple[complex, ...]
    eps: float = field(default=EPS_DISTINCT, compare=False)

    def __post_init__(self):
        if len(self.entries) < 1:
            raise DomainError("ValueVector needs at least one entry")
        object.__setattr__(self, "entries", tuple(complex(x) for x in self.entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def distinct(self) -> bool:
        v = self.entries
        return all(abs(v[i] - v[j]) > self.eps for i in range(len(v)) for j in range(i + 1, len(v)))

    @property
    def nonzero(self) -> bool:
        return all(abs(x) > self.eps for x in self.entries)

    def inverse(self) -> "ValueVector":
        return ValueVector(tuple(1 / x for x in self.entries), self.eps)


def _as_vector(v) -> ValueVector:
    return v if isinstance(v, ValueVector) else ValueVector(tuple(v))


def elementary_all(values: Sequence[Any], one: Any = 1) -> list:
    """All elementary symmetric polynomials C_0..C_k of ``values``.

    Works for any ring elements supporting ``+`` and ``*``.
    """
    e = [one] + [0 * one] * len(values)
    for x in values:
        for j in range(len(e) - 1, 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e


def elem_sym(j: int, v) -> complex:
    v = _as_vector(v)
    if j < 0 or j > len(v):
        raise DomainError(f"elementary symmetric index {j} outside 0..{len(v)}")
    return elementary_all(v.entries)[j]


def complete_homogeneous_all(m: int, values: Sequence[Any], one: Any = 1) -> list:
    """h_0..h_m of ``values`` by adjoining one variable at a time.

    h_d(x_1..x_r) = h_d(x_1..x_{r-1}) + x_r h_{d-1}(x_1..x_r); O(m k) ring
    operations, no divisions, so it also runs over truncated series.
    """
    if m < 0:
        raise DomainError("degree must be nonnegative")
    h = [one] + [0 * one] * m
    for x in values:
        for d in range(1, m + 1):
            h[d] = h[d] + x * h[d - 1]
    return h


def complete_homogeneous(m: int, v, method: str = "adjoin") -> complex:
    """Complete homogeneous symmetric polynomial h_m(v).

    ``method="power_sum"`` uses Newton's recurrence m h_m = sum_j p_j h_{m-j};
    the default adjoins variables one at a time, which avoids the division
    by m and behaves better for long unimodular inputs.
    """
    vals = list(_as_vector(v).entries)
    if m < 0:
        raise DomainError("degree must be nonnegative")
    if method == "adjoin":
        return complete_homogeneous_all(m, vals)[m]
    if method == "power_sum":
        arr = np.asarray(vals, dtype=complex)
        p = [complex(np.sum(arr**j)) for j in range(m + 1)]
        h = [1 + 0j]
        for d in range(1, m + 1):
            h.append(sum(p[j] * h[d - j] for j in range(1, d + 1)) / d)
        return h[m]
    raise ValueError(f"unknown method {method!r}")


def complete_homogeneous_enum(m: int, v) -> complex:
    # brute force over all exponent vectors summing to m
    vals = list(_as_vector(v).entries)
    total = 0j
    for combo in itertools.combinations_with_replacement(range(len(vals)), m):
        total += math.prod((vals[i] for i in combo), start=1 + 0j)
    return total


def vandermonde(v) -> complex:
    vals = _as_vector(v).entries
    out = 1 + 0j
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            out *= vals[j] - vals[i]
    return out


def vandermonde_det(v) -> complex:
    """Generic O(k^3) determinant of the explicit Vandermonde matrix."""
    vals = np.asarray(_as_vector(v).entries, dtype=complex)
    return complex(np.linalg.det(np.vander(vals, increasing=True)))


def combinatorial_sum(n: int, v) -> complex:
    """sum_l v_l^n prod_{j != l} v_j / (v_j - v_l), by its closed form.

    Three regimes: (-1)^{k+1} h_{n-k}(v) prod v for n >= k; zero for
    1 <= n <= k-1; h_{|n|}(1/v) for n <= 0.
    """
    v = _as_vector(v)
    if not v.distinct:
        raise DomainError("combinatorial_sum needs pairwise distinct entries")
    if not v.nonzero:
        raise DomainError("combinatorial_sum needs nonzero entries")
    k = len(v)
    if n >= k:
        return (-1) ** (k + 1) * complete_homogeneous(n - k, v) * math.prod(v.entries, start=1 + 0j)
    if n >= 1:
        return 0j
    return complete_homogeneous(-n, v.inverse())


def combinatorial_sum_literal(n: int, v) -> complex:
    vals = _as_vector(v).entries
    total = 0j
    for l, al in enumerate(vals):
        term = al**n
        for j, aj in enumerate(vals):
            if j != l:
                term *= aj / (aj - al)
        total += term
    return total
