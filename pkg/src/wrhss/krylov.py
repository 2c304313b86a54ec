"""Restarted GMRES(m) with a Householder Arnoldi process.

The Krylov basis is held implicitly as the product of Householder
reflectors (Walker's variant), which keeps it orthonormal to working
precision regardless of the conditioning of the operator.  The small
least-squares problem is updated with Givens rotations so the residual
norm is known after every matrix-vector product.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class GmresResult:
    x: np.ndarray
    iterations: int
    relres: float
    converged: bool


def _reflector(z, j):
    """Unit vector w (zero above `j`) with (I - 2ww^H) z = beta e_j, and beta."""
    tail = z[j:]
    nrm = np.linalg.norm(tail)
    w = np.zeros_like(z)
    if nrm == 0.0:
        return w, 0.0
    lead = tail[0]
    phase = lead / abs(lead) if lead != 0 else 1.0
    beta = -phase * nrm
    w[j:] = tail
    w[j] -= beta
    wn = np.linalg.norm(w)
    if wn == 0.0:
        return np.zeros_like(z), tail[0]
    return w / wn, beta


def _reflect(w, z):
    return z - 2.0 * w * np.vdot(w, z)


def gmres_m(matvec, b, m=5, tol=1e-8, maxit=100000, x0=None, callback=None):
    """Solve ``A x = b`` with restarted GMRES(m).

    Stops at the first iterate with ``||b - A x|| / ||b|| < tol``, i.e.
    relative to the residual of the zero vector, whatever the initial guess
    `x0` (default zero).  ``iterations`` counts Arnoldi steps, i.e.
    products with ``A``; the residual refresh at each restart is not
    counted.  When `callback` is given it receives the explicit basis
    (columns) of every restart cycle.
    """
    if m < 1:
        raise ValueError("restart length must be at least 1")
    if not 0 < tol < 1:
        raise ValueError("tolerance must lie in (0, 1)")
    b = np.asarray(b, dtype=np.complex128)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.complex128)
    r = b - matvec(x) if x0 is not None else b.copy()
    r0 = np.linalg.norm(b)
    if r0 == 0.0:
        return GmresResult(np.zeros_like(b), 0, 0.0, True)
    relres = np.linalg.norm(r) / r0
    if relres < tol:
        return GmresResult(x, 0, float(relres), True)
    nsteps = 0
    while nsteps < maxit:
        ws = []
        hcols = np.zeros((m + 1, m), dtype=np.complex128)
        cs = np.zeros(m)
        sn = np.zeros(m, dtype=np.complex128)
        g = np.zeros(m + 1, dtype=np.complex128)
        w, beta = _reflector(r, 0)
        ws.append(w)
        g[0] = beta
        k = 0
        while k < m and nsteps < maxit:
            # v_k = P_0 ... P_k e_k
            v = np.zeros_like(b)
            v[k] = 1.0
            for wi in reversed(ws):
                v = _reflect(wi, v)
            z = matvec(v)
            nsteps += 1
            for wi in ws:
                z = _reflect(wi, z)
            if k + 1 < b.size:
                w, beta = _reflector(z, k + 1)
                z[k + 1] = beta
                z[k + 2:] = 0.0
                ws.append(w)
            col = z[:k + 2].copy() if k + 1 < b.size else np.append(z[:k + 1], 0)
            for i in range(k):
                t = cs[i] * col[i] + sn[i] * col[i + 1]
                col[i + 1] = -np.conj(sn[i]) * col[i] + cs[i] * col[i + 1]
                col[i] = t
            f, gg = col[k], col[k + 1]
            if gg == 0:
                c, s = 1.0, 0.0j
            elif f == 0:
                c, s = 0.0, np.conj(gg) / abs(gg)
            else:
                nrm = np.hypot(abs(f), abs(gg))
                c = abs(f) / nrm
                s = (f / abs(f)) * np.conj(gg) / nrm
            cs[k], sn[k] = c, s
            col[k] = c * f + s * gg
            col[k + 1] = 0.0
            hcols[:k + 2, k] = col
            g[k + 1] = -np.conj(s) * g[k]
            g[k] = c * g[k]
            k += 1
            if abs(g[k]) / r0 < tol:
                break
        y = np.zeros(k, dtype=np.complex128)
        for i in range(k - 1, -1, -1):
            y[i] = (g[i] - hcols[i, i + 1:k] @ y[i + 1:k]) / hcols[i, i]
        # sum_i y_i v_i = P_0 ... P_{k-1} [y; 0]
        u = np.zeros_like(b)
        u[:k] = y
        for i in range(k - 1, -1, -1):
            u = _reflect(ws[i], u)
        x = x + u
        if callback is not None:
            basis = np.empty((b.size, k), dtype=np.complex128)
            for j in range(k):
                v = np.zeros_like(b)
                v[j] = 1.0
                for wi in reversed(ws[:j + 1]):
                    v = _reflect(wi, v)
                basis[:, j] = v
            callback(basis)
        r = b - matvec(x)
        relres = np.linalg.norm(r) / r0
        if relres < tol:
            return GmresResult(x, nsteps, float(relres), True)
    return GmresResult(x, nsteps, float(relres), False)
