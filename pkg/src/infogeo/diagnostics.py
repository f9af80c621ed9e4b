"""Structural diagnostics: the bump-series counterexample and the
reduced-exponent embedding trend.

The counterexample accumulates shrinking, steepening bumps placed at
spread-out centers. Per-term Sobolev contributions of the chart decay
geometrically while the corresponding contributions of the mapped
density grow geometrically, so the chart series converges in norm while
the image series diverges; the two certified geometric rates are
emitted per term.

The embedding trend checks the complementary positive result: with the
integrability exponent reduced to nu = (lambda+1)/k, norms of the mapped
density stay bounded under grid refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .deformed import make_family
from .grid import build_grid, GridFunction
from .measure import make_reference
from .sampling import random_smooth_chart
from .sobolev import MixedNormSpec, mixed_norm

_balanced = make_family("balanced")


# -- smooth transition bump -------------------------------------------------


def _g(u):
    """exp(-1/u) for u > 0, flat zero otherwise."""
    out = np.zeros_like(u)
    pos = u > 0.0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _g1(u):
    out = np.zeros_like(u)
    pos = u > 0.0
    up = u[pos]
    out[pos] = np.exp(-1.0 / up) / (up * up)
    return out


def _g2(u):
    out = np.zeros_like(u)
    pos = u > 0.0
    up = u[pos]
    out[pos] = np.exp(-1.0 / up) * (1.0 - 2.0 * up) / up ** 4
    return out


def transition(s: np.ndarray) -> tuple:
    """C^inf step S with S=1 below 1/2 and S=0 above 1, plus S' and S''.

    S = G/(G+H) with G = g(1-s), H = g(s-1/2) and g(u) = exp(-1/u); both
    ingredients vanish to all orders at their endpoints, so underflow to
    zero is harmless and the denominator stays positive strictly between
    the plateaus.
    """
    s = np.asarray(s, dtype=np.float64)
    S = np.ones_like(s)
    S1 = np.zeros_like(s)
    S2 = np.zeros_like(s)
    S[s >= 1.0] = 0.0
    mid = (s > 0.5) & (s < 1.0)
    sm = s[mid]
    u = 1.0 - sm
    v = sm - 0.5
    G, H = _g(u), _g(v)
    Gp, Hp = -_g1(u), _g1(v)
    Gpp, Hpp = _g2(u), _g2(v)
    den = G + H
    num = Gp * H - G * Hp
    S[mid] = G / den
    S1[mid] = num / den ** 2
    S2[mid] = (Gpp * H - G * Hpp) / den ** 2 - 2.0 * num * (Gp + Hp) / den ** 3
    return S, S1, S2


def bump_profile(y: np.ndarray) -> tuple:
    """The odd bump phi(y) = y S(|y|) with its first two derivatives."""
    y = np.asarray(y, dtype=np.float64)
    ay = np.abs(y)
    sg = np.sign(y)
    S, S1, S2 = transition(ay)
    phi = y * S
    phi1 = S + ay * S1
    phi2 = sg * (2.0 * S1 + ay * S2)
    return phi, phi1, phi2


# -- counterexample ---------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleConfig:
    k: int = 2
    lam: float = 2.0
    t: float = 1.0
    m: int = 2
    n_terms: int = 30
    zeta1: float = -1.0
    zeta2: float = -0.1
    local_nodes: int = 2001
    override_exponent: int = None

    def __post_init__(self):
        if self.k not in (2, 3):
            raise ValueError(f"derivative order must be 2 or 3, got {self.k}")
        if self.lam < 1.0:
            raise ValueError(f"exponent must be >= 1, got {self.lam}")
        if not (self.zeta2 < self.zeta1 + 1.0):
            raise ValueError("window top must be below window bottom plus one")
        if self.zeta1 >= self.zeta2:
            raise ValueError("window endpoints must be increasing")
        if self.n_terms < 2:
            raise ValueError("need at least two terms")
        if self.local_nodes < 201:
            raise ValueError("local resolution too low")

    @property
    def alpha(self) -> float:
        """Geometric amplitude base; the override exponent illustrates that
        swapping the derivative order in the base does not change the
        divergence mechanism."""
        kk = self.k if self.override_exponent is None else self.override_exponent
        return math.exp(2.0 / ((kk + 1) * self.lam - 1.0))

    def centers(self, ns: np.ndarray) -> np.ndarray:
        return ns ** (1.0 / self.t)


@dataclass(frozen=True)
class CounterexampleResult:
    config: CounterexampleConfig
    ns: np.ndarray              # m .. m+N inclusive
    a_terms: np.ndarray
    b_terms: np.ndarray
    raw_ratio_a: np.ndarray     # length N
    raw_ratio_b: np.ndarray
    ratio_a: np.ndarray         # polynomial-compensated, comparable to the limits
    ratio_b: np.ndarray
    limit_a: float
    limit_b: float
    epsilon_window: float
    a_tail_bound: float

    def b_partial_ratio(self, n_lo: int, n_hi: int) -> float:
        """Ratio of the partial sums of the density-side terms up to n_hi
        and up to n_lo."""
        csum = np.cumsum(self.b_terms)
        i_lo = int(np.searchsorted(self.ns, n_lo))
        i_hi = int(np.searchsorted(self.ns, n_hi))
        return float(csum[i_hi] / csum[i_lo])

    def rows(self) -> list:
        """Complete per-term rows: term values and the compensated ratios
        to the next term (the last computed term only feeds the ratios)."""
        out = []
        for i in range(self.ratio_a.shape[0]):
            out.append({
                "n": int(self.ns[i]),
                "A_n": float(self.a_terms[i]),
                "B_n": float(self.b_terms[i]),
                "ratio_A": float(self.ratio_a[i]),
                "ratio_B": float(self.ratio_b[i]),
            })
        return out


def _trapz_refined(fn, lo: float, hi: float, nodes: int, what: str) -> float:
    """Trapezoid value at doubled resolution with a Richardson check;
    disagreement beyond 1% means the local grid cannot resolve the term."""
    vals = []
    for m in (nodes, 2 * nodes - 1):
        y = np.linspace(lo, hi, m)
        vals.append(float(np.trapezoid(fn(y), y)))
    coarse, fine = vals
    scale = max(abs(fine), 1e-300)
    if abs(fine - coarse) > 0.01 * scale:
        raise RuntimeError(
            f"local integration for {what} did not converge: "
            f"{coarse:.6e} vs {fine:.6e}")
    return fine + (fine - coarse) / 3.0


def dahlberg_terms(cfg: CounterexampleConfig = None) -> CounterexampleResult:
    """Per-term series contributions for the bump construction.

    Chart side: each bump contributes its own mixed-norm mass on its
    support sphere (the supports are pairwise disjoint, asserted below).
    Density side: on the thin window interval the chart is exactly linear,
    so the k-th derivative of the mapped density is the exact composition
    value; the integral is taken in the chart variable.
    """
    if cfg is None:
        cfg = CounterexampleConfig()
    mu = make_reference(cfg.t, "simple")
    ns = np.arange(cfg.m, cfg.m + cfg.n_terms + 1)
    centers = cfg.centers(ns)

    # pairwise-disjoint supports, clear of the origin region
    radii = 1.0 / ns
    if np.any(centers[:-1] + radii[:-1] >= centers[1:] - radii[1:]):
        raise ValueError("bump supports overlap for this start index and measure exponent")
    if centers[0] - radii[0] <= mu.z_t:
        raise ValueError("first bump support touches the origin region")

    alpha = cfg.alpha
    lam = cfg.lam
    klam = cfg.k * lam

    a_terms = np.empty(ns.shape[0])
    b_terms = np.empty(ns.shape[0])
    window = np.linspace(cfg.zeta1, cfg.zeta2, 2001)
    eps_window = float(np.min(np.abs(_balanced.psi_deriv(cfg.k, window))))
    if eps_window <= 0.0:
        raise RuntimeError("window derivative bound is not positive")

    for i, n in enumerate(ns):
        amp = alpha ** float(n)
        sigma = centers[i]

        def chart_piece(y, j, n=n, amp=amp):
            phi, phi1, phi2 = bump_profile(y)
            dj = (phi, phi1, phi2)[j] if j <= 2 else None
            if dj is None:
                h_loc = y[1] - y[0]
                from .grid import apply_fd
                dj = apply_fd(phi2, j - 2, h_loc)
            return np.abs(amp * float(n) ** j * dj) ** lam

        total = 0.0
        for j in range(cfg.k + 1):
            def integrand(y, j=j, n=n, sigma=sigma):
                x = sigma + y / float(n)
                weight = np.exp(mu.log_density_axis(x))
                return chart_piece(y, j) * weight / float(n)
            total += _trapz_refined(integrand, -1.0, 1.0, cfg.local_nodes,
                                    f"chart term n={n}, order {j}")
        a_terms[i] = total

        slope = float(n) * amp
        width = (cfg.zeta2 - cfg.zeta1) / slope

        def b_integrand(avals, sigma=sigma, slope=slope):
            x = sigma + (avals - cfg.zeta1) / slope
            weight = np.exp(mu.log_density_axis(x))
            deriv = _balanced.psi_deriv(cfg.k, avals) * slope ** cfg.k
            return np.abs(deriv) ** lam * weight / slope

        b_nodes = max(201, cfg.local_nodes // 4)
        b_terms[i] = _trapz_refined(b_integrand, cfg.zeta1, cfg.zeta2, b_nodes,
                                    f"density term n={n} (window width {width:.3e})")

    raw_ratio_a = a_terms[1:] / a_terms[:-1]
    raw_ratio_b = b_terms[1:] / b_terms[:-1]
    comp = (ns[:-1] / ns[1:]).astype(np.float64) ** (klam - 1.0)
    ratio_a = raw_ratio_a * comp
    ratio_b = raw_ratio_b * comp
    limit_a = math.exp(2.0 * lam / ((cfg.k + 1) * lam - 1.0) - 1.0)
    limit_b = math.exp(2.0 * (klam - 1.0) / ((cfg.k + 1) * lam - 1.0) - 1.0)

    r_last = float(raw_ratio_a[-1])
    tail = float(a_terms[-1]) * r_last / (1.0 - r_last) if r_last < 1.0 else float("inf")

    return CounterexampleResult(cfg, ns, a_terms, b_terms, raw_ratio_a, raw_ratio_b,
                                ratio_a, ratio_b, limit_a, limit_b, eps_window, tail)


# -- reduced-exponent embedding trend ---------------------------------------


def nu_embedding_trend(k: int, lam: float, samples: int = 10, refinements: int = 2,
                       base_n: int = 601, half_width: float = 30.0, t: float = 1.0,
                       seed: int = 0) -> dict:
    """Norms of the mapped density in the reduced-exponent space across
    grid refinements.

    nu = (lam+1)/k; each random smooth chart is an analytic function
    evaluated on every refinement level, so level-to-level norm growth
    measures quadrature/stencil convergence, which must flatten out.
    """
    if k not in (2, 3):
        raise ValueError(f"order must be 2 or 3, got {k}")
    if lam < k - 1:
        raise ValueError(f"exponent must be >= {k - 1}, got {lam}")
    nu = (lam + 1.0) / k
    spec = MixedNormSpec.fixed(k, nu)
    mu = make_reference(t, "smooth")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    levels = [base_n * (2 ** j) + (2 ** j - 1) for j in range(refinements + 1)]
    grids = [build_grid(1, half_width, n) for n in levels]
    norms = np.empty((samples, len(levels)))
    for i in range(samples):
        chart = random_smooth_chart(rng)
        for j, grid in enumerate(grids):
            dens = GridFunction(grid, _balanced.psi(chart(grid.axis)))
            norms[i, j] = mixed_norm(dens, spec, mu)
    growth = norms[:, -1] / norms[:, -2] - 1.0
    return {
        "nu": nu,
        "levels": levels,
        "norms": norms,
        "max_abs_growth": float(np.max(np.abs(growth))),
        "bounded": bool(np.max(np.abs(growth)) <= 0.01),
    }
