# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernels: deformed-exponential inversion, banded stencil
application, and the dense filter time loop. Mirrors fallback.py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log1p

cnp.import_array()

NAME = "native"


def psi_balanced(a, double tol=1e-13, int max_iter=80):
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] av = a_arr.ravel()
    out = np.empty(av.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = av.shape[0]
    cdef int it
    cdef double ai, w, e, f, w_next
    for i in range(n):
        ai = av[i]
        if ai >= 0.0:
            w = log1p(ai)
        else:
            w = 0.5 * ai
        for it in range(max_iter):
            e = exp(w)
            f = e + w - 1.0 - ai
            if fabs(f) <= tol:
                break
            w_next = w - f / (e + 1.0)
            if w_next == w:
                break
            w = w_next
        ov[i] = exp(w)
    return out.reshape(a_arr.shape)


def banded_apply(u, wint, lo_rows, hi_rows):
    u_arr = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[::1] uv = u_arr
    cdef const double[::1] wv = np.ascontiguousarray(wint, dtype=np.float64)
    cdef const double[:, ::1] lo = np.ascontiguousarray(lo_rows, dtype=np.float64)
    cdef const double[:, ::1] hi = np.ascontiguousarray(hi_rows, dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0]
    cdef Py_ssize_t p = wv.shape[0]
    cdef Py_ssize_t c = p // 2
    cdef Py_ssize_t nb = lo.shape[0]
    cdef Py_ssize_t wb = lo.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(c, n - c):
        acc = 0.0
        for k in range(p):
            acc += wv[k] * uv[i - c + k]
        ov[i] = acc
    for i in range(nb):
        acc = 0.0
        for k in range(wb):
            acc += lo[i, k] * uv[k]
        ov[i] = acc
        acc = 0.0
        for k in range(wb):
            acc += hi[i, k] * uv[n - wb + k]
        ov[n - nb + i] = acc
    return out


cdef void _banded_into(const double[::1] uv, const double[::1] wv,
                       const double[:, ::1] lo, const double[:, ::1] hi,
                       double[::1] ov) noexcept nogil:
    cdef Py_ssize_t n = uv.shape[0]
    cdef Py_ssize_t p = wv.shape[0]
    cdef Py_ssize_t c = p // 2
    cdef Py_ssize_t nb = lo.shape[0]
    cdef Py_ssize_t wb = lo.shape[1]
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(c, n - c):
        acc = 0.0
        for k in range(p):
            acc += wv[k] * uv[i - c + k]
        ov[i] = acc
    for i in range(nb):
        acc = 0.0
        for k in range(wb):
            acc += lo[i, k] * uv[k]
        ov[i] = acc
        acc = 0.0
        for k in range(wb):
            acc += hi[i, k] * uv[n - wb + k]
        ov[n - nb + i] = acc


def dense_filter_loop(pi0, Gr, fr, r, hv, wq, x,
                      d2w, d2lo, d2hi, d1w, d1lo, d1hi,
                      dY, double dt, bint renormalize, double floor,
                      Py_ssize_t snap_every):
    pi_arr = np.array(pi0, dtype=np.float64, copy=True)
    cdef double[::1] pi = pi_arr
    cdef const double[::1] grv = np.ascontiguousarray(Gr, dtype=np.float64)
    cdef const double[::1] frv = np.ascontiguousarray(fr, dtype=np.float64)
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef const double[::1] hvv = np.ascontiguousarray(hv, dtype=np.float64)
    cdef const double[::1] wqv = np.ascontiguousarray(wq, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] d2wv = np.ascontiguousarray(d2w, dtype=np.float64)
    cdef const double[:, ::1] d2lov = np.ascontiguousarray(d2lo, dtype=np.float64)
    cdef const double[:, ::1] d2hiv = np.ascontiguousarray(d2hi, dtype=np.float64)
    cdef const double[::1] d1wv = np.ascontiguousarray(d1w, dtype=np.float64)
    cdef const double[:, ::1] d1lov = np.ascontiguousarray(d1lo, dtype=np.float64)
    cdef const double[:, ::1] d1hiv = np.ascontiguousarray(d1hi, dtype=np.float64)
    cdef const double[::1] dYv = np.ascontiguousarray(dY, dtype=np.float64)

    cdef Py_ssize_t nsteps = dYv.shape[0]
    cdef Py_ssize_t n = pi.shape[0]
    mass_arr = np.empty(nsteps + 1)
    mean_arr = np.empty(nsteps + 1)
    var_arr = np.empty(nsteps + 1)
    cdef double[::1] mass = mass_arr
    cdef double[::1] mean = mean_arr
    cdef double[::1] var = var_arr
    cdef Py_ssize_t nsnap = nsteps // snap_every + 1 if snap_every > 0 else 1
    snaps_arr = np.empty((nsnap, n))
    cdef double[:, ::1] snaps = snaps_arr
    work_arr = np.empty(n)
    cdef double[::1] work = work_arr
    d2_arr = np.empty(n)
    cdef double[::1] d2 = d2_arr
    d1_arr = np.empty(n)
    cdef double[::1] d1 = d1_arr

    cdef Py_ssize_t i, j
    cdef Py_ssize_t floored = 0
    cdef double m0, m1, m2, mu1, hb, a_pi, dyj, scale, p_new

    with nogil:
        for j in range(nsteps):
            m0 = 0.0
            m1 = 0.0
            m2 = 0.0
            for i in range(n):
                m0 += wqv[i] * pi[i]
                m1 += wqv[i] * pi[i] * xv[i]
                m2 += wqv[i] * pi[i] * xv[i] * xv[i]
            mass[j] = m0
            mu1 = m1 / m0
            mean[j] = mu1
            var[j] = m2 / m0 - mu1 * mu1
            if snap_every > 0 and j % snap_every == 0:
                for i in range(n):
                    snaps[j // snap_every, i] = pi[i]
            for i in range(n):
                work[i] = grv[i] * pi[i]
            _banded_into(work, d2wv, d2lov, d2hiv, d2)
            for i in range(n):
                work[i] = frv[i] * pi[i]
            _banded_into(work, d1wv, d1lov, d1hiv, d1)
            hb = 0.0
            for i in range(n):
                hb += wqv[i] * pi[i] * hvv[i]
            hb = hb / m0
            dyj = dYv[j] - hb * dt
            for i in range(n):
                a_pi = (0.5 * d2[i] - d1[i]) / rv[i]
                p_new = pi[i] + dt * a_pi + pi[i] * (hvv[i] - hb) * dyj
                if p_new < 0.0:
                    floored += 1
                    p_new = floor
                pi[i] = p_new
            if renormalize:
                m0 = 0.0
                for i in range(n):
                    m0 += wqv[i] * pi[i]
                scale = 1.0 / m0
                for i in range(n):
                    pi[i] = pi[i] * scale
        m0 = 0.0
        m1 = 0.0
        m2 = 0.0
        for i in range(n):
            m0 += wqv[i] * pi[i]
            m1 += wqv[i] * pi[i] * xv[i]
            m2 += wqv[i] * pi[i] * xv[i] * xv[i]
        mass[nsteps] = m0
        mu1 = m1 / m0
        mean[nsteps] = mu1
        var[nsteps] = m2 / m0 - mu1 * mu1
        for i in range(n):
            snaps[nsnap - 1, i] = pi[i]
    return mass_arr, mean_arr, var_arr, snaps_arr, int(floored)
