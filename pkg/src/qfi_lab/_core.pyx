# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cyclic Jacobi for complex Hermitian matrices and the
SLD pair sum over an eigenbasis.

Function signatures mirror :mod:`qfi_lab._pycore` exactly; the two are
selected between in :mod:`qfi_lab._backend`.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot

cnp.import_array()

ctypedef double complex cplx


cdef inline double cabs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef double off_norm2(cplx[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s += cabs2(a[i, j])
    return 2.0 * s


def jacobi_eigh(a_in, double tol=1e-15, int max_sweeps=100):
    """Return ``(eigenvalues, eigenvectors, sweeps)``; ``sweeps == -1`` on failure."""
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] a_arr = np.array(a_in, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] v_arr = np.eye(n, dtype=np.complex128)
    cdef cplx[:, ::1] a = a_arr
    cdef cplx[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double total2 = 0.0, r, theta, t, c, s, app, aqq
    cdef cplx e, ec, akp, akq, apk, aqk
    cdef int converged = 0

    with nogil:
        for p in range(n):
            for q in range(n):
                total2 += cabs2(a[p, q])
        # a zero matrix is already diagonal
        if total2 == 0.0:
            converged = 1
        while not converged and sweep < max_sweeps:
            if off_norm2(a, n) <= tol * tol * total2:
                converged = 1
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    r = sqrt(cabs2(a[p, q]))
                    if r == 0.0:
                        continue
                    app = a[p, p].real
                    aqq = a[q, q].real
                    # rotation angle of the equivalent real symmetric 2x2 block
                    theta = (aqq - app) / (2.0 * r)
                    if theta >= 0.0:
                        t = 1.0 / (theta + hypot(1.0, theta))
                    else:
                        t = -1.0 / (-theta + hypot(1.0, theta))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    e = a[p, q] / r
                    ec = e.conjugate()
                    # columns: A <- A U with U = [[c, s e], [-s conj(e), c]]
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * ec * akq
                        a[k, q] = s * e * akp + c * akq
                    # rows: A <- U^H A
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = c * apk - s * e * aqk
                        a[q, k] = s * ec * apk + c * aqk
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = app - t * r
                    a[q, q] = aqq + t * r
                    for k in range(n):
                        akp = v[k, p]
                        akq = v[k, q]
                        v[k, p] = c * akp - s * ec * akq
                        v[k, q] = s * e * akp + c * akq
        if not converged and off_norm2(a, n) <= tol * tol * total2:
            converged = 1

    w = np.real(np.diagonal(a_arr)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v_arr[:, order], (sweep if converged else -1)


def qfi_pair_sum(double[::1] w, cplx[:, ::1] dm, double cutoff):
    """Return ``(value, floor_hits, max_dropped)`` for the SLD spectral sum.

    ``dm`` is the derivative expressed in the eigenbasis of the state.
    ``max_dropped`` is the largest ``|dm[i, j]|`` among excluded pairs.
    """
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i, j
    cdef double total = 0.0, lam, mag, dropped = 0.0
    cdef long hits = 0
    with nogil:
        for i in range(n):
            for j in range(i, n):
                lam = w[i] + w[j]
                mag = cabs2(dm[i, j])
                if lam > cutoff:
                    if i == j:
                        total += 2.0 * mag / lam
                    else:
                        total += 4.0 * mag / lam
                else:
                    hits += 1
                    if sqrt(mag) > dropped:
                        dropped = sqrt(mag)
    return total, hits, dropped
