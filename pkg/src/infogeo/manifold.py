"""Points on the density manifold in a deformed-exponential chart.

A point wraps a chart function together with its family and reference
measure. Raw points carry any strictly positive density, of arbitrary
total mass; probability points additionally store the chart split as a
centred part plus a scalar level, the level being pinned so the density
integrates to one. Derivatives of the level with respect to the centred
part come out as escort-type moments and are exposed directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .deformed import DeformedExp
from .grid import GridFunction, diff, integrate_mu
from .measure import ReferenceMeasure

NORMALIZE_TOL = 1e-12
CENTERING_TOL = 1e-10
_MAX_DOUBLINGS = 200


def _solve_level(family: DeformedExp, mu, z_values: np.ndarray, weights: np.ndarray,
                 tol: float = NORMALIZE_TOL, max_iter: int = 200) -> float:
    """Scalar c with sum(w * psi(c + z)) = 1, by bracketing plus safeguarded Newton.

    The map is strictly increasing with positive slope, so a sign-changing
    bracket always exists; doubling is guarded anyway.
    """

    def val_slope(c):
        dens = family.psi(c + z_values)
        return (float(np.sum(weights * dens)) - 1.0,
                float(np.sum(weights * family.psi_deriv_of_value(1, dens))))

    f0, _ = val_slope(0.0)
    if abs(f0) <= tol:
        return 0.0
    lo, hi = -1.0, 1.0
    if f0 > 0.0:
        hi = 0.0
        for _ in range(_MAX_DOUBLINGS):
            if val_slope(lo)[0] <= 0.0:
                break
            lo *= 2.0
        else:
            raise RuntimeError("normalization bracket search failed (lower end)")
    else:
        lo = 0.0
        for _ in range(_MAX_DOUBLINGS):
            if val_slope(hi)[0] >= 0.0:
                break
            hi *= 2.0
        else:
            raise RuntimeError("normalization bracket search failed (upper end)")

    c = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f, slope = val_slope(c)
        if abs(f) <= tol:
            return c
        if f > 0.0:
            hi = c
        else:
            lo = c
        c_new = c - f / slope if slope > 0.0 else 0.5 * (lo + hi)
        if not (lo < c_new < hi):
            c_new = 0.5 * (lo + hi)
        c = c_new
    raise RuntimeError(f"normalization did not converge: residual {val_slope(c)[0]:.3e}")


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    family: DeformedExp
    mu: ReferenceMeasure
    base: GridFunction
    level: float = 0.0
    is_probability: bool = False

    @classmethod
    def from_chart(cls, family: DeformedExp, mu, chart: GridFunction) -> "ManifoldPoint":
        if not np.all(np.isfinite(chart.values)):
            raise ValueError("chart must be finite")
        return cls(family, mu, chart)

    @classmethod
    def from_density(cls, family: DeformedExp, mu, p: GridFunction) -> "ManifoldPoint":
        bad = np.argwhere(p.values <= 0.0)
        if bad.size:
            raise ValueError(f"density must be strictly positive; first bad node index {tuple(bad[0])}")
        return cls(family, mu, GridFunction(p.grid, family.log(p.values)))

    @classmethod
    def from_log_density(cls, family: DeformedExp, mu, ell: GridFunction) -> "ManifoldPoint":
        """Chart from a log-density, without forming the density itself.

        Overflow-safe composition: expm1(l) + l for the balanced family,
        sinh(l) for the kaniadakis one.
        """
        lv = ell.values
        if family.name == "balanced":
            chart = np.expm1(lv) + lv
        else:
            chart = np.sinh(lv)
        return cls(family, mu, GridFunction(ell.grid, chart))

    @property
    def grid(self):
        return self.base.grid

    def chart(self) -> GridFunction:
        """Ambient chart: centred part plus level."""
        if self.level == 0.0:
            return self.base
        return self.base + self.level

    @cached_property
    def _density_values(self) -> np.ndarray:
        d = self.family.psi(self.level + self.base.values)
        d.setflags(write=False)
        return d

    def density(self) -> GridFunction:
        return GridFunction(self.grid, self._density_values)

    @cached_property
    def mass(self) -> float:
        w = self.mu.quadrature_weights(self.grid)
        return float(np.sum(w * self._density_values))

    def normalized(self, recenter: bool = True) -> "ManifoldPoint":
        """Probability point with the same centred chart shape."""
        return normalize(self.family, self.mu, self.chart(), recenter=recenter)[1]

    def renormalize(self) -> float:
        """Extra level shift that would restore unit mass; ~0 when already normalized."""
        w = self.mu.quadrature_weights(self.grid)
        return _solve_level(self.family, self.mu, self.level + self.base.values, w)

    # -- escort moments and level derivatives ---------------------------

    def escort_expectation(self, u: GridFunction) -> float:
        """Mean of u under the reweighting by psi'(chart), normalized."""
        w = self.mu.quadrature_weights(self.grid)
        slope = self.family.psi_deriv_of_value(1, self._density_values)
        return float(np.sum(w * slope * u.values) / np.sum(w * slope))

    def _require_centred_direction(self, u: GridFunction):
        mean = integrate_mu(u, self.mu)
        scale = max(1.0, float(np.max(np.abs(u.values))))
        if abs(mean) > CENTERING_TOL * scale:
            raise ValueError(f"direction must have zero mean under mu, got {mean:.3e}")

    def level_gradient(self, u: GridFunction) -> float:
        """Derivative of the level when the centred chart moves along u."""
        if not self.is_probability:
            raise ValueError("level derivatives require a probability point")
        self._require_centred_direction(u)
        return -self.escort_expectation(u)

    def level_hessian(self, u: GridFunction, v: GridFunction) -> float:
        """Second derivative of the level along the pair (u, v)."""
        if not self.is_probability:
            raise ValueError("level derivatives require a probability point")
        self._require_centred_direction(u)
        self._require_centred_direction(v)
        w = self.mu.quadrature_weights(self.grid)
        dens = self._density_values
        slope = self.family.psi_deriv_of_value(1, dens)
        curve = self.family.psi_deriv_of_value(2, dens)
        uc = u.values - self.escort_expectation(u)
        vc = v.values - self.escort_expectation(v)
        return float(-np.sum(w * curve * uc * vc) / np.sum(w * slope))

    # -- mixture / exponential representations --------------------------

    def mixture_rep(self) -> GridFunction:
        """Density minus one; integrates to zero exactly at unit mass."""
        return self.density() + (-1.0)

    def exponential_rep(self) -> GridFunction:
        """Chart minus mixture part; equals log(density) for the balanced family."""
        return GridFunction(self.grid, (self.level + self.base.values)
                            - (self._density_values - 1.0))

    def centred_exponential_rep(self) -> GridFunction:
        e = self.exponential_rep()
        return e + (-integrate_mu(e, self.mu))


def normalize(family: DeformedExp, mu, a0: GridFunction,
              recenter: bool = False) -> tuple:
    """Solve for the level making E_mu[psi(a0 + level)] = 1.

    a0 must already be centred unless recenter is set; returns the pair
    (level, probability point).
    """
    mean = integrate_mu(a0, mu)
    if recenter:
        if mean != 0.0:
            a0 = a0 + (-mean)
    elif abs(mean) > CENTERING_TOL * max(1.0, float(np.max(np.abs(a0.values)))):
        raise ValueError(f"chart must be centred (mean {mean:.3e}); pass recenter=True to shift")
    w = mu.quadrature_weights(a0.grid)
    level = _solve_level(family, mu, a0.values, w)
    return level, ManifoldPoint(family, mu, a0, level, True)


@dataclass(frozen=True, eq=False)
class TangentRep:
    """Direction attached to a base point, in chart coordinates."""

    base: ManifoldPoint
    u: GridFunction
    centred: bool = False

    def __post_init__(self):
        if self.u.grid != self.base.grid:
            raise ValueError("grid mismatch between direction and base point")
        if self.centred:
            self.base._require_centred_direction(self.u)

    def chart_velocity(self) -> GridFunction:
        """Velocity of the ambient chart; subtracts the escort mean for
        centred directions, where the level moves along with the chart."""
        if not self.centred:
            return self.u
        return self.u + (-self.base.escort_expectation(self.u))

    def escort_mass_defect(self) -> float:
        """Unnormalized escort integral of the centred velocity; zero by
        construction, up to rounding."""
        w = self.base.mu.quadrature_weights(self.base.grid)
        slope = self.base.family.psi_deriv_of_value(1, self.base._density_values)
        vel = self.chart_velocity()
        return float(np.sum(w * slope * vel.values))


def chain_rule_residual(family: DeformedExp, mu, a: GridFunction, s) -> float:
    """Max-norm gap between differentiating psi(a) directly and assembling
    the same derivative from psi', psi'' and derivatives of a.

    Supports total order 1 and 2 (the orders with a two-term expansion).
    """
    s = tuple(int(si) for si in s)
    order = sum(s)
    if order not in (1, 2):
        raise ValueError(f"total order must be 1 or 2, got {s}")
    dens = family.psi(a.values)
    d1 = family.psi_deriv_of_value(1, dens)
    if order == 1:
        composed = d1 * diff(a, s).values
    else:
        d2 = family.psi_deriv_of_value(2, dens)
        if max(s) == 2:
            axis = s.index(2)
            e = tuple(1 if i == axis else 0 for i in range(len(s)))
            da = diff(a, e).values
            composed = d2 * da * da + d1 * diff(a, s).values
        else:
            e0 = tuple(1 if i == 0 else 0 for i in range(len(s)))
            e1 = tuple(1 if i == 1 else 0 for i in range(len(s)))
            composed = d2 * diff(a, e0).values * diff(a, e1).values + d1 * diff(a, s).values
    direct = diff(GridFunction(a.grid, dens), s).values
    return float(np.max(np.abs(direct - composed)))
