"""Seeded generators for smooth test charts, directions, and points.

Charts are analytic functions (damped random trig sums), returned as
callables so the same function can be sampled on grids of different
resolution. Helpers turn them into grid functions, centre them against
a reference measure, or normalize them into probability points.
"""

from __future__ import annotations

import numpy as np

from .grid import GridFunction, TensorGrid
from .manifold import ManifoldPoint, normalize


def rng_from_seed(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; distinct streams stay independent."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def random_smooth_chart(rng: np.random.Generator, n_modes: int = 4,
                        amp: float = 0.5, freq_max: float = 1.5,
                        envelope: float = 4.0):
    """Analytic chart x -> sum_j c_j sin(w_j x + p_j) * exp(-(x/env)^2).

    Bounded by n_modes*amp everywhere and decaying in the tails, so the
    mapped density stays within a fixed band of the reference density.
    """
    coef = rng.uniform(-amp, amp, size=n_modes)
    freq = rng.uniform(0.2, freq_max, size=n_modes)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n_modes)

    def chart(x):
        x = np.asarray(x, dtype=np.float64)
        acc = np.zeros_like(x)
        for c, w, p in zip(coef, freq, phase):
            acc += c * np.sin(w * x + p)
        return acc * np.exp(-((x / envelope) ** 2))

    return chart


def chart_on_grid(chart, grid: TensorGrid) -> GridFunction:
    """Evaluate a 1-d analytic chart on the grid (tensorized by sum for d > 1)."""
    if grid.d == 1:
        return GridFunction(grid, chart(grid.axis))
    total = np.zeros(grid.shape)
    for mesh in grid.meshes():
        total += chart(mesh)
    return GridFunction(grid, total / grid.d)


def centred(u: GridFunction, weights: np.ndarray) -> GridFunction:
    """Subtract the quadrature mean so the result integrates to zero."""
    return GridFunction(u.grid, u.values - float(np.tensordot(weights, u.values, axes=u.grid.d)))


def random_centred_chart(rng: np.random.Generator, grid: TensorGrid,
                         weights: np.ndarray, **kwargs) -> GridFunction:
    return centred(chart_on_grid(random_smooth_chart(rng, **kwargs), grid), weights)


def random_direction(rng: np.random.Generator, grid: TensorGrid,
                     **kwargs) -> GridFunction:
    return chart_on_grid(random_smooth_chart(rng, **kwargs), grid)


def random_probability_point(rng: np.random.Generator, family, mu,
                             grid: TensorGrid, **kwargs) -> ManifoldPoint:
    """Normalized point from a random centred chart."""
    a0 = random_centred_chart(rng, grid, mu.quadrature_weights(grid), **kwargs)
    return normalize(family, mu, a0)[1]
