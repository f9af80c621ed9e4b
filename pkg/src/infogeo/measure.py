"""Reference measures with log-density built from a radial profile.

Each axis contributes C - theta(|x_i|) to the log density, where theta is
strictly increasing with theta(0) = 0 and theta(z) = c + z^t for large z.
The simple variant uses theta(z) = z^t everywhere (t in [1, 2]). The smooth
variant replaces the profile on [0, z_t], z_t = 2 - t, by a cosine arc
a(1 - cos(b z)) with a, b chosen so the two branches match with one
continuous derivative at z_t; the matching condition also makes the profile
C^2 there, and theta'(0) = 0 removes the kink at the origin. The constant C
normalizes each axis factor to unit mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .grid import TensorGrid


def default_half_width(t: float) -> float:
    """Half-width L making the tail mass negligible (< 1e-12) for exponent t."""
    return float(math.ceil(28.0 ** (1.0 / t)) + 2)


def _solve_patch(t: float):
    """Patch parameters (z_t, beta, alpha, c) for the smooth variant."""
    z_t = 2.0 - t
    if z_t <= 0.0:
        return 0.0, None, None, 0.0
    if t == 1.0:
        w = 0.5 * math.pi
    else:
        # root of (t-1) sin(w) = w cos(w); pole-free form of the tangent equation
        g = lambda w: (t - 1.0) * math.sin(w) - w * math.cos(w)
        if t > 1.0:
            w = brentq(g, 1e-9, 0.5 * math.pi, xtol=1e-15, rtol=8.9e-16)
        else:
            w = brentq(g, 0.5 * math.pi, math.pi - 1e-12, xtol=1e-15, rtol=8.9e-16)
    beta = w / z_t
    alpha = t * z_t ** (t - 1.0) / (beta * math.sin(w))
    c = alpha * (1.0 - math.cos(w)) - z_t ** t
    return z_t, beta, alpha, c


@dataclass(frozen=True)
class ReferenceMeasure:
    t: float
    variant: str
    z_t: float
    beta: float | None
    alpha: float | None
    c: float
    log_norm: float  # C in the axis log density C - theta(|x|)

    # -- radial profile -------------------------------------------------

    def theta(self, z):
        z = np.asarray(z, dtype=np.float64)
        tail = self.c + np.maximum(z, self.z_t) ** self.t
        if self.z_t == 0.0:
            return tail
        patch = self.alpha * (1.0 - np.cos(self.beta * np.minimum(z, self.z_t)))
        return np.where(z < self.z_t, patch, tail)

    def theta_prime(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.z_t == 0.0:
            # t = 1 gives z^0 = 1 at the origin, the right-limit convention
            return self.t * z ** (self.t - 1.0)
        tail = self.t * np.maximum(z, self.z_t) ** (self.t - 1.0)
        patch = self.alpha * self.beta * np.sin(self.beta * np.minimum(z, self.z_t))
        return np.where(z < self.z_t, patch, tail)

    def theta_second(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.z_t > 0.0:
            zt = np.maximum(z, self.z_t)
            tail = self.t * (self.t - 1.0) * zt ** (self.t - 2.0)
            patch = self.alpha * self.beta ** 2 * np.cos(self.beta * np.minimum(z, self.z_t))
            return np.where(z < self.z_t, patch, tail)
        if self.t == 2.0:
            return np.full_like(z, 2.0)
        if self.t == 1.0:
            # piecewise value away from the kink at the origin
            return np.zeros_like(z)
        with np.errstate(divide="ignore"):
            return self.t * (self.t - 1.0) * z ** (self.t - 2.0)

    # -- log density and derivatives ------------------------------------

    def log_density_axis(self, x):
        return self.log_norm - self.theta(np.abs(x))

    def grad_log_axis(self, x):
        x = np.asarray(x, dtype=np.float64)
        return -self.theta_prime(np.abs(x)) * np.sign(x)

    def hess_log_axis(self, x):
        return -self.theta_second(np.abs(np.asarray(x, dtype=np.float64)))

    def log_density_on(self, grid: TensorGrid) -> np.ndarray:
        parts = self.log_density_axis(grid.axis)
        if grid.d == 1:
            return parts
        return np.add.outer(parts, parts)

    def density_on(self, grid: TensorGrid) -> np.ndarray:
        return np.exp(self.log_density_on(grid))

    def quadrature_weights(self, grid: TensorGrid) -> np.ndarray:
        """Trapezoid-times-density weights, rescaled to unit total.

        The rescaling makes the grid measure an exact probability measure,
        so constants integrate exactly; the continuum normalization
        accuracy is reported separately by normalization_error().
        """
        return _weights(self, grid)

    # -- diagnostics ----------------------------------------------------

    @property
    def c1_at_zero(self) -> bool:
        """Whether the log density is C^1 across the coordinate hyperplanes."""
        return self.variant == "smooth" or self.t > 1.0

    def matching_residual(self) -> float:
        """|theta' mismatch| of the two branches at z_t (0 when degenerate)."""
        if self.z_t == 0.0:
            return 0.0
        left = self.alpha * self.beta * math.sin(self.beta * self.z_t)
        right = self.t * self.z_t ** (self.t - 1.0)
        return abs(left - right)

    def convexity_report(self, z_max: float = 10.0, samples: int = 4001) -> dict:
        """Numerical convexity check of theta and -sqrt(theta) on (0, z_max]."""
        z = np.linspace(z_max / samples, z_max, samples)
        th = self.theta(z)
        d1 = self.theta_prime(z)
        d2 = self.theta_second(z)
        theta_convex = bool(np.min(d2) >= -1e-10)
        # -sqrt(theta) convex iff (theta')^2 >= 2 theta theta''
        gap = d1 * d1 - 2.0 * th * d2
        neg_sqrt_convex = bool(np.min(gap) >= -1e-8 * max(1.0, float(np.max(np.abs(gap)))))
        return {"theta_convex": theta_convex, "neg_sqrt_theta_convex": neg_sqrt_convex,
                "min_theta_second": float(np.min(d2)), "min_gap": float(np.min(gap))}

    def normalization_error(self) -> float:
        """Deviation of the axis density from unit mass (adaptive quadrature)."""
        total = _axis_mass(self.t, self.variant, self.z_t, self.beta, self.alpha, self.c)
        return abs(total * math.exp(self.log_norm) - 1.0)

    def grid_normalization_error(self, grid: TensorGrid) -> float:
        """Raw trapezoid mass of the density on the grid against one;
        combines domain truncation and quadrature error."""
        w = grid.trapezoid_weights()
        return abs(float(np.tensordot(w, self.density_on(grid), axes=grid.d)) - 1.0)


def _axis_mass(t, variant, z_t, beta, alpha, c):
    """Integral of exp(-theta(|z|)) over the real line."""
    total = 0.0
    if z_t > 0.0:
        patch, _ = quad(lambda z: math.exp(-alpha * (1.0 - math.cos(beta * z))), 0.0, z_t,
                        epsabs=1e-14, epsrel=1e-13)
        total += patch
    tail, _ = quad(lambda z: math.exp(-c - z ** t), z_t, np.inf, epsabs=1e-14, epsrel=1e-13)
    return 2.0 * (total + tail)


def make_reference(t: float, variant: str = "simple") -> ReferenceMeasure:
    """Build a reference measure; variant is "simple" or "smooth"."""
    t = float(t)
    if variant == "simple":
        if not (1.0 <= t <= 2.0):
            raise ValueError(f"simple variant requires t in [1, 2], got {t}")
        z_t, beta, alpha, c = 0.0, None, None, 0.0
    elif variant == "smooth":
        if not (0.0 < t <= 2.0):
            raise ValueError(f"smooth variant requires t in (0, 2], got {t}")
        z_t, beta, alpha, c = _solve_patch(t)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    mass = _axis_mass(t, variant, z_t, beta, alpha, c)
    log_norm = -math.log(mass)
    return ReferenceMeasure(t=t, variant=variant, z_t=z_t, beta=beta, alpha=alpha,
                            c=c, log_norm=log_norm)


@lru_cache(maxsize=64)
def _weights(mu: ReferenceMeasure, grid: TensorGrid) -> np.ndarray:
    w = grid.trapezoid_weights() * np.exp(mu.log_density_on(grid))
    w /= w.sum()
    w.setflags(write=False)
    return w
