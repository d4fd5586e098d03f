"""Pure-Python fallback kernels, used when the compiled extension is absent.

Same algorithms and signatures as the Cython module ``_core``; row and
column updates are vectorised with numpy but the rotation loop runs in
the interpreter, so this path is several times to tens of times slower.
"""

import math

import numpy as np


def _off_norm2(a):
    # summed directly: total minus diagonal cancels below the tolerance
    iu = np.triu_indices(a.shape[0], 1)
    return 2.0 * float(np.sum(np.abs(a[iu]) ** 2))


def jacobi_eigh(a_in, tol=1e-15, max_sweeps=100):
    """Return ``(eigenvalues, eigenvectors, sweeps)``; ``sweeps == -1`` on failure."""
    a = np.array(a_in, dtype=np.complex128, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    total2 = float(np.sum(np.abs(a) ** 2))
    sweep = 0
    converged = total2 == 0.0
    while not converged and sweep < max_sweeps:
        if _off_norm2(a) <= tol * tol * total2:
            converged = True
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.hypot(1.0, theta))
                else:
                    t = -1.0 / (-theta + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                e = apq / r
                ec = e.conjugate()
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * ec * col_q
                a[:, q] = s * e * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * e * row_q
                a[q, :] = s * ec * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * ec * vq
                v[:, q] = s * e * vp + c * vq
    if not converged and _off_norm2(a) <= tol * tol * total2:
        converged = True
    w = np.real(np.diagonal(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], (sweep if converged else -1)


def qfi_pair_sum(w, dm, cutoff):
    """Return ``(value, floor_hits, max_dropped)`` for the SLD spectral sum."""
    w = np.asarray(w, dtype=float)
    lam = w[:, None] + w[None, :]
    mag = np.abs(np.asarray(dm)) ** 2
    upper = np.triu(np.ones(lam.shape, dtype=bool))
    keep = upper & (lam > cutoff)
    drop = upper & ~(lam > cutoff)
    weight = np.where(np.eye(len(w), dtype=bool), 2.0, 4.0)
    total = float(np.sum(weight[keep] * mag[keep] / lam[keep]))
    dropped = float(np.sqrt(mag[drop].max())) if drop.any() else 0.0
    return total, int(drop.sum()), dropped
