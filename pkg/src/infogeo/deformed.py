"""Deformed exponential functions and their derivative algebra.

Two families are provided. The balanced family inverts
log(y) + y - 1; its inverse psi grows linearly for large arguments and
like exp below, with 0 < psi' < 1. The Kaniadakis-type family has the
closed inverse psi(z) = z + sqrt(1 + z^2) and chart function
(y - 1/y)/2.

Every derivative of psi is a rational function of psi itself. The tables
are built once per family by differentiating through the first-derivative
relation, with exact integer coefficients:

  balanced     psi^(n) = y Q_{n-2}(y) / (1+y)^(2n-1),        y = psi(a)
  kaniadakis   psi^(n) = 2 y^3 Q_{3(n-2)}(y) / (1+y^2)^(2n-1)

where the subscript on Q is its degree bound. Depth is capped at
MAX_DERIVATIVE_ORDER; tables are fully built at construction so instances
are safe to share across threads.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._backend import psi_balanced

MAX_DERIVATIVE_ORDER = 12
FAMILIES = ("balanced", "kaniadakis")


def _poly_deriv(c):
    return [i * c[i] for i in range(1, len(c))] or [0]


def _poly_eval(c, y):
    out = np.zeros_like(y)
    for coeff in reversed(c):
        out = out * y + coeff
    return out


def _balanced_tables():
    """Q polynomials (integer coefficient lists, index = degree) for n >= 2."""
    tables = {2: [1]}
    for n in range(2, MAX_DERIVATIVE_ORDER):
        q = tables[n]
        dq = _poly_deriv(q)
        # (Q + y Q')(1 + y) - (2n - 1) y Q
        a = q + [0]
        for i, ci in enumerate(dq):
            a[i + 1] += ci
        out = [0] * (len(a) + 1)
        for i, ci in enumerate(a):
            out[i] += ci
            out[i + 1] += ci
        for i, ci in enumerate(q):
            out[i + 1] -= (2 * n - 1) * ci
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        tables[n + 1] = out
    return tables


def _kaniadakis_tables():
    tables = {2: [4]}
    for n in range(2, MAX_DERIVATIVE_ORDER):
        q = tables[n]
        dq = _poly_deriv(q)
        # 2 y [ (3Q + y Q')(1 + y^2) - (4n - 2) y^2 Q ]
        a = [3 * ci for ci in q] + [0]
        for i, ci in enumerate(dq):
            a[i + 1] += ci
        inner = [0] * (len(a) + 2)
        for i, ci in enumerate(a):
            inner[i] += ci
            inner[i + 2] += ci
        for i, ci in enumerate(q):
            inner[i + 2] -= (4 * n - 2) * ci
        out = [0] + [2 * ci for ci in inner]
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        tables[n + 1] = out
    return tables


class DeformedExp:
    """One deformed-exponential family with cached derivative tables."""

    def __init__(self, name: str):
        if name not in FAMILIES:
            raise ValueError(f"unknown family {name!r}; expected one of {FAMILIES}")
        self.name = name
        if name == "balanced":
            self._tables = _balanced_tables()
        else:
            self._tables = _kaniadakis_tables()
        self._float_tables = {n: np.array(c, dtype=np.float64)
                              for n, c in self._tables.items()}

    # -- chart map and inverse ------------------------------------------

    def log(self, y):
        y = np.asarray(y, dtype=np.float64)
        if np.any(y <= 0.0):
            raise ValueError("log is defined for positive arguments only")
        if self.name == "balanced":
            return y - 1.0 + np.log(y)
        return 0.5 * (y - 1.0 / y)

    def psi(self, a):
        a = np.asarray(a, dtype=np.float64)
        if self.name == "balanced":
            # kernels take 1-d contiguous input; restore the caller's shape
            return psi_balanced(a.reshape(-1)).reshape(a.shape)
        s = np.hypot(1.0, a)
        return np.where(a >= 0.0, a + s, 1.0 / (s - a))

    # -- derivatives ----------------------------------------------------

    def psi_deriv_of_value(self, n: int, y):
        """n-th derivative of psi expressed through y = psi(a)."""
        if not (1 <= n <= MAX_DERIVATIVE_ORDER):
            raise ValueError(f"derivative order must be in 1..{MAX_DERIVATIVE_ORDER}, got {n}")
        y = np.asarray(y, dtype=np.float64)
        if self.name == "balanced":
            if n == 1:
                return y / (1.0 + y)
            q = _poly_eval(self._float_tables[n], y)
            return y * q / (1.0 + y) ** (2 * n - 1)
        if n == 1:
            return 2.0 * y * y / (1.0 + y * y)
        q = _poly_eval(self._float_tables[n], y)
        return 2.0 * y ** 3 * q / (1.0 + y * y) ** (2 * n - 1)

    def psi_deriv(self, n: int, a):
        return self.psi_deriv_of_value(n, self.psi(a))

    def table(self, n: int) -> tuple:
        """Integer numerator coefficients Q for order n >= 2 (index = degree)."""
        if not (2 <= n <= MAX_DERIVATIVE_ORDER):
            raise ValueError(f"tables exist for orders 2..{MAX_DERIVATIVE_ORDER}, got {n}")
        return tuple(self._tables[n])


@lru_cache(maxsize=None)
def make_family(name: str) -> DeformedExp:
    return DeformedExp(name)


def log_deformed(y, family: str = "balanced"):
    return make_family(family).log(y)


def psi(a, family: str = "balanced"):
    return make_family(family).psi(a)


def psi_deriv(n: int, a, family: str = "balanced"):
    return make_family(family).psi_deriv(n, a)


def transition_tau(z):
    """Balanced chart value of the Kaniadakis inverse: the chart transition."""
    return make_family("balanced").log(make_family("kaniadakis").psi(z))
