"""Weighted mixed-norm Sobolev norms on grid functions.

The index set pairs each multi-index s (entries in 0..k, total order at
most k) with an integrability exponent lambda_{|s|} taken from a
non-increasing ladder (lambda_0, ..., lambda_k). The norm is an l^lambda_0
combination of the per-derivative L^lambda_{|s|} norms. All-2 ladders give
the Hilbert case with the associated inner product.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, diff, integrate_mu, lp_norm


def multi_indices(d: int, k: int, jmin: int = 0) -> list:
    """Multi-indices s in {0..k}^d with jmin <= |s| <= k, lexicographic."""
    if d < 1 or k < 0:
        raise ValueError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    if jmin < 0 or jmin > k:
        raise ValueError(f"jmin must lie in 0..{k}, got {jmin}")
    out = []
    for s in itertools.product(range(k + 1), repeat=d):
        if jmin <= sum(s) <= k:
            out.append(s)
    return out


@dataclass(frozen=True)
class MixedNormSpec:
    """Smoothness order k plus the exponent ladder (lambda_0..lambda_k)."""

    k: int
    lambdas: tuple
    kind: str = "custom"

    def __post_init__(self):
        if not (1 <= self.k <= 4):
            raise ValueError(f"k must be in 1..4, got {self.k}")
        lam = tuple(float(x) for x in self.lambdas)
        if len(lam) != self.k + 1:
            raise ValueError(f"need {self.k + 1} exponents for k={self.k}, got {len(lam)}")
        if not all(np.isfinite(lam)):
            raise ValueError("exponents must be finite")
        if lam[-1] < 1.0:
            raise ValueError(f"smallest exponent must be >= 1, got {lam[-1]}")
        for j in range(self.k):
            if lam[j] < lam[j + 1]:
                raise ValueError(f"exponents must be non-increasing, got {lam}")
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def mixed(cls, k: int, lambda0: float, lambda1: float) -> "MixedNormSpec":
        """Ladder lambda_j = lambda_1 / j for j >= 2; needs lambda1 >= k."""
        if lambda1 < k:
            raise ValueError(f"lambda1 must be >= k={k}, got {lambda1}")
        if lambda0 < lambda1:
            raise ValueError(f"lambda0 must be >= lambda1, got {lambda0} < {lambda1}")
        lam = (lambda0, lambda1) + tuple(lambda1 / j for j in range(2, k + 1))
        return cls(k, lam, "mixed")

    @classmethod
    def fixed(cls, k: int, lam: float) -> "MixedNormSpec":
        return cls(k, (lam,) * (k + 1), "fixed")

    @classmethod
    def hilbert(cls, k: int) -> "MixedNormSpec":
        return cls(k, (2.0,) * (k + 1), "hilbert")

    @classmethod
    def low_order(cls) -> "MixedNormSpec":
        return cls(2, (1.0, 1.0, 1.0), "low_order")

    @classmethod
    def split(cls, lambda0: float) -> "MixedNormSpec":
        return cls(2, (lambda0, 1.0, 1.0), "split")


def mixed_norm(a: GridFunction, spec: MixedNormSpec, mu) -> float:
    lam0 = spec.lambdas[0]
    total = 0.0
    for s in multi_indices(a.grid.d, spec.k):
        j = sum(s)
        total += lp_norm(diff(a, s), spec.lambdas[j], mu) ** lam0
    return float(total ** (1.0 / lam0))


def hk_inner(u: GridFunction, v: GridFunction, k: int, mu) -> float:
    """Hilbert inner product: sum over |s| <= k of the weighted L^2 pairings."""
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    total = 0.0
    for s in multi_indices(u.grid.d, k):
        total += integrate_mu(diff(u, s) * diff(v, s), mu)
    return float(total)


def smoothness_order(lambda0: float, lambda1: float, beta: float, t: float) -> int:
    """Largest guaranteed chart smoothness order for the given exponents.

    beta is the derivative-cost exponent of the target scale. The equality
    case (t in (1, 2] with lambda1 == lambda0) keeps the full floor; the
    general case drops one order at integer ratios.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not (lambda0 >= lambda1 >= 1.0):
        raise ValueError(f"need lambda0 >= lambda1 >= 1, got {lambda0}, {lambda1}")
    q = lambda0 / beta
    if abs(q - round(q)) < 1e-12:
        q = float(round(q))
    if 1.0 < t <= 2.0 and lambda1 == lambda0:
        return int(math.floor(q))
    return int(math.ceil(q)) - 1
