"""Divergences and tensors between points over a common reference measure.

Divergences accept points of arbitrary mass and include the
mass-difference terms, so they stay nonnegative and vanish only at
equality even off the probability set. Tensor arguments are chart
velocities; weights are rational in the density, computed directly from
the chart map's derivatives to avoid cancellation.
"""

from __future__ import annotations

import numpy as np

from .grid import GridFunction
from .manifold import ManifoldPoint


def _pair_check(p: ManifoldPoint, q: ManifoldPoint):
    if p.grid != q.grid:
        raise ValueError("points live on different grids")
    if p.mu is not q.mu and p.mu != q.mu:
        raise ValueError("points use different reference measures")


def kl(p: ManifoldPoint, q: ManifoldPoint) -> float:
    """Relative entropy for finite measures:
    mass(q) - mass(p) + E_mu[p log(p/q)]."""
    _pair_check(p, q)
    w = p.mu.quadrature_weights(p.grid)
    pd, qd = p._density_values, q._density_values
    integral = float(np.sum(w * pd * (np.log(pd) - np.log(qd))))
    return q.mass - p.mass + integral


def jeffreys(p: ManifoldPoint, q: ManifoldPoint) -> float:
    return kl(p, q) + kl(q, p)


def duality_pairing(p: ManifoldPoint, q: ManifoldPoint) -> float:
    """Pairing of the mixture gap p - q with the log-density gap."""
    _pair_check(p, q)
    w = p.mu.quadrature_weights(p.grid)
    pd, qd = p._density_values, q._density_values
    return float(np.sum(w * (pd - qd) * (np.log(pd) - np.log(qd))))


def cosine_defect(p: ManifoldPoint, q: ManifoldPoint, r: ManifoldPoint) -> float:
    """Three-point divergence identity residual.

    kl(p, r) decomposes through the intermediate point q up to the pairing
    of the mixture gap p - q with the log-density gap r - q; the residual
    vanishes identically, so it measures quadrature rounding only.
    """
    _pair_check(p, q)
    _pair_check(q, r)
    w = p.mu.quadrature_weights(p.grid)
    pd, qd, rd = p._density_values, q._density_values, r._density_values
    pairing = float(np.sum(w * (pd - qd) * (np.log(rd) - np.log(qd))))
    return kl(p, r) - kl(p, q) - kl(q, r) + pairing


def chi2_mo(q: ManifoldPoint, p: ManifoldPoint) -> float:
    """Half the p-weighted squared relative gap of q against p."""
    _pair_check(q, p)
    w = p.mu.quadrature_weights(p.grid)
    pd, qd = p._density_values, q._density_values
    return float(0.5 * np.sum(w * (qd - pd) ** 2 / pd))


def _tensor_parts(point: ManifoldPoint):
    dens = point._density_values
    slope = point.family.psi_deriv_of_value(1, dens)
    w = point.mu.quadrature_weights(point.grid)
    return w, dens, slope


def fisher_rao(point: ManifoldPoint, u: GridFunction, v: GridFunction) -> float:
    """Metric contraction E_mu[(psi'(a)^2 / psi(a)) u v]; the weight is
    p/(1+p)^2 for the balanced family."""
    w, dens, slope = _tensor_parts(point)
    return float(np.sum(w * (slope * slope / dens) * u.values * v.values))


def amari_chentsov(point: ManifoldPoint, u: GridFunction, v: GridFunction,
                   t: GridFunction) -> float:
    """Cubic tensor E_mu[(psi'(a)^3 / psi(a)^2) u v t]; weight p/(1+p)^3
    for the balanced family."""
    w, dens, slope = _tensor_parts(point)
    return float(np.sum(w * (slope ** 3 / dens ** 2) * u.values * v.values * t.values))


def eguchi_check(point: ManifoldPoint, u: GridFunction, v: GridFunction,
                 step: float = 1e-3) -> tuple:
    """Metric recovered from the divergence by a mixed second difference.

    Returns (fd_value, metric_value): the negated centred cross difference
    of kl under chart perturbations along u (first slot) and v (second
    slot), against the direct tensor contraction.
    """
    if not (1e-4 <= step <= 1e-2):
        raise ValueError(f"step must lie in [1e-4, 1e-2], got {step}")
    family, mu = point.family, point.mu
    a = point.chart()

    def shifted(direction, sign):
        return ManifoldPoint(family, mu, a + sign * step * direction)

    pp = kl(shifted(u, +1.0), shifted(v, +1.0))
    pm = kl(shifted(u, +1.0), shifted(v, -1.0))
    mp = kl(shifted(u, -1.0), shifted(v, +1.0))
    mm = kl(shifted(u, -1.0), shifted(v, -1.0))
    fd_value = -(pp - pm - mp + mm) / (4.0 * step * step)
    return fd_value, fisher_rao(point, u, v)
