"""Pure NumPy implementations of the hot kernels.

The compiled module in ``_native`` mirrors these signatures exactly. Both
backends must produce results equal to within a few ulps; tests compare them
at 1e-12 relative tolerance. Keep accumulation orders aligned with the C
loops where it is cheap to do so (the banded stencil sums), and accept
last-ulp differences where BLAS reductions are involved.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def psi_balanced(a, tol=1e-13, max_iter=80):
    """Invert y - 1 + log(y) = a for y > 0, elementwise.

    Solved as a Newton iteration for w = log(y): F(w) = e^w + w - 1 - a.
    F is convex and increasing, and the starting point is chosen at the
    upper end of the analytic bracket (log(1 + a) for a >= 0, a/2 for
    a < 0) so F(w0) >= 0 and the iteration decreases monotonically to the
    root. Terminates when |F| <= tol everywhere or the iterate stops
    moving (roundoff plateau for very large |a|).
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    w = np.where(a >= 0.0, np.log1p(np.maximum(a, 0.0)), 0.5 * a)
    for _ in range(max_iter):
        e = np.exp(w)
        f = e + w - 1.0 - a
        if np.max(np.abs(f)) <= tol:
            break
        w_next = w - f / (e + 1.0)
        if np.array_equal(w_next, w):
            break
        w = w_next
    return np.exp(w)


def banded_apply(u, wint, lo_rows, hi_rows):
    """Apply a banded operator with explicit boundary rows.

    out[i] = sum_k wint[k] * u[i - c + k] for interior i, where
    c = len(wint) // 2. The first and last c entries use the dense
    boundary rows against the leading/trailing ``wb`` nodes.
    """
    n = u.shape[0]
    p = wint.shape[0]
    c = p // 2
    nb, wb = lo_rows.shape
    out = np.empty_like(u)
    acc = wint[0] * u[0:n - p + 1]
    for k in range(1, p):
        acc = acc + wint[k] * u[k:n - p + 1 + k]
    out[c:n - c] = acc
    out[:nb] = lo_rows @ u[:wb]
    out[n - nb:] = hi_rows @ u[n - wb:]
    return out


def dense_filter_loop(pi0, Gr, fr, r, hv, wq, x,
                      d2w, d2lo, d2hi, d1w, d1lo, d1hi,
                      dY, dt, renormalize, floor, snap_every):
    """Explicit Euler-Maruyama loop for the measure-relative density SPDE.

    pi0      initial density values with respect to the reference measure
    Gr, fr   precomputed Gamma(x) r(x) and f(x) r(x)
    r        reference density values
    hv       observation function values
    wq       quadrature weights already multiplied by r
    x        grid nodes (for moment recording)
    d2*, d1* banded second/first derivative operators
    dY       observation increments, one per step
    snap_every  record a density snapshot every this many steps
               (must divide len(dY); <= 0 keeps only the final state)

    Returns (mass, mean, var, snaps, floored) where the moment arrays have
    length len(dY) + 1 and row j of snaps is the state at step j * snap_every.
    """
    pi = np.array(pi0, dtype=np.float64, copy=True)
    nsteps = dY.shape[0]
    n = pi.shape[0]
    mass = np.empty(nsteps + 1)
    mean = np.empty(nsteps + 1)
    var = np.empty(nsteps + 1)
    if snap_every > 0:
        nsnap = nsteps // snap_every + 1
    else:
        nsnap = 1
    snaps = np.empty((nsnap, n))
    floored = 0

    def _record(j):
        m0 = wq @ pi
        m1 = wq @ (pi * x)
        m2 = wq @ (pi * x * x)
        mass[j] = m0
        mu1 = m1 / m0
        mean[j] = mu1
        var[j] = m2 / m0 - mu1 * mu1
        return m0

    for j in range(nsteps):
        m0 = _record(j)
        if snap_every > 0 and j % snap_every == 0:
            snaps[j // snap_every] = pi
        d2 = banded_apply(Gr * pi, d2w, d2lo, d2hi)
        d1 = banded_apply(fr * pi, d1w, d1lo, d1hi)
        a_pi = (0.5 * d2 - d1) / r
        hb = (wq @ (pi * hv)) / m0
        pi = pi + dt * a_pi + pi * (hv - hb) * (dY[j] - hb * dt)
        neg = pi < 0.0
        if neg.any():
            floored += int(np.count_nonzero(neg))
            pi[neg] = floor
        if renormalize:
            pi = pi * (1.0 / (wq @ pi))
    _record(nsteps)
    snaps[nsnap - 1] = pi
    return mass, mean, var, snaps, floored
