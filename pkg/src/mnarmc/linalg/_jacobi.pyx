# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled one-sided Jacobi kernel.

Rows of ``G`` are the columns being orthogonalized; the same rotations are
applied to the rows of ``V``.  Both arrays are modified in place.
"""

from libc.math cimport sqrt, fabs


def jacobi_sweeps(double[:, ::1] G, double[:, ::1] V, double tol, double floor, int max_sweeps):
    """Cyclic-by-row one-sided Jacobi.

    Columns whose squared norm is at most ``floor`` are numerically zero and
    never rotated.

    Returns the number of sweeps performed, or -1 when ``max_sweeps`` was
    exhausted before a rotation-free sweep.
    """
    cdef Py_ssize_t n = G.shape[0]
    cdef Py_ssize_t m = G.shape[1]
    cdef Py_ssize_t nv = V.shape[1]
    cdef Py_ssize_t p, q, k
    cdef double alpha, beta, gamma, zeta, t, c, s, gp, gq
    cdef int sweep, rotated
    cdef double[::1] norms = _zeros(n)
    cdef double* rp
    cdef double* rq

    for sweep in range(1, max_sweeps + 1):
        for p in range(n):
            rp = &G[p, 0]
            alpha = 0.0
            for k in range(m):
                alpha += rp[k] * rp[k]
            norms[p] = alpha
        rotated = 0
        for p in range(n - 1):
            rp = &G[p, 0]
            for q in range(p + 1, n):
                alpha = norms[p]
                beta = norms[q]
                if alpha <= floor or beta <= floor:
                    continue
                rq = &G[q, 0]
                gamma = 0.0
                for k in range(m):
                    gamma += rp[k] * rq[k]
                if fabs(gamma) <= tol * sqrt(alpha) * sqrt(beta):
                    continue
                rotated = 1
                zeta = (beta - alpha) / (2.0 * gamma)
                if fabs(zeta) > 1e150:
                    t = 0.5 / zeta
                elif zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    gp = rp[k]
                    gq = rq[k]
                    rp[k] = c * gp - s * gq
                    rq[k] = s * gp + c * gq
                for k in range(nv):
                    gp = V[p, k]
                    gq = V[q, k]
                    V[p, k] = c * gp - s * gq
                    V[q, k] = s * gp + c * gq
                norms[p] = alpha - t * gamma
                norms[q] = beta + t * gamma
        if not rotated:
            return sweep
    return -1


cdef double[::1] _zeros(Py_ssize_t n):
    import numpy as np
    return np.zeros(n, dtype=np.float64)
