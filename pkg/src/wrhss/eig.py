"""Dense complex eigenvalues by Hessenberg reduction and shifted QR.

Only eigenvalues are computed.  The QR sweeps use a Wilkinson shift taken
from the trailing 2x2 block of the active window and deflate once a
subdiagonal entry drops below ``1e-14`` times its diagonal neighbours.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from numba import njit

DEFLATION_RTOL = 1e-14
MAX_ORDER = 2048


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    iterations: int
    converged: bool


@njit(cache=True)
def _hessenberg(a):
    n = a.shape[0]
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += abs(a[i, k]) ** 2
        alpha = np.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = a[k + 1, k]
        phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0.0j
        v = a[k + 1:, k].copy()
        v[0] += phase * alpha
        vn = 0.0
        for i in range(v.size):
            vn += abs(v[i]) ** 2
        if vn == 0.0:
            continue
        # a <- P a P with P = I - 2 v v^H / (v^H v)
        for j in range(k, n):
            s = 0.0j
            for i in range(v.size):
                s += np.conj(v[i]) * a[k + 1 + i, j]
            s *= 2.0 / vn
            for i in range(v.size):
                a[k + 1 + i, j] -= s * v[i]
        for i in range(n):
            s = 0.0j
            for j in range(v.size):
                s += a[i, k + 1 + j] * v[j]
            s *= 2.0 / vn
            for j in range(v.size):
                a[i, k + 1 + j] -= s * np.conj(v[j])
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a


@njit(cache=True)
def _givens(f, g):
    # (c, s) with [c s; -conj(s) c] [f; g] = [r; 0], c real
    if g == 0:
        return 1.0, 0.0j
    if f == 0:
        return 0.0, np.conj(g) / abs(g)
    af = abs(f)
    nrm = np.sqrt(af * af + abs(g) ** 2)
    c = af / nrm
    s = (f / af) * np.conj(g) / nrm
    return c, s


@njit(cache=True)
def _hqr(h, max_sweeps):
    n = h.shape[0]
    eig = np.zeros(n, dtype=np.complex128)
    cs = np.zeros(n, dtype=np.float64)
    ss = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    sweeps = 0
    its = 0
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += abs(h[i, j]) ** 2
    fro = np.sqrt(fro)
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            hi = -1
            break
        lo = 0
        for k in range(hi, 0, -1):
            ref = abs(h[k - 1, k - 1]) + abs(h[k, k])
            if ref == 0.0:
                ref = fro
            if abs(h[k, k - 1]) <= DEFLATION_RTOL * ref:
                h[k, k - 1] = 0.0
                lo = k
                break
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if sweeps >= max_sweeps:
            break
        sweeps += 1
        its += 1
        a = h[hi - 1, hi - 1]
        b = h[hi - 1, hi]
        c = h[hi, hi - 1]
        d = h[hi, hi]
        if its % 11 == 10:
            mu = d + 0.75 * abs(c)
        else:
            half = 0.5 * (a - d)
            disc = cmath.sqrt(half * half + b * c)
            m1 = 0.5 * (a + d) + disc
            m2 = 0.5 * (a + d) - disc
            mu = m1 if abs(m1 - d) < abs(m2 - d) else m2
        for k in range(lo, hi + 1):
            h[k, k] -= mu
        # QR of the active window by Givens rotations on rows
        for k in range(lo, hi):
            cc, sk = _givens(h[k, k], h[k + 1, k])
            cs[k] = cc
            ss[k] = sk
            for j in range(k, hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = cc * t1 + sk * t2
                h[k + 1, j] = -np.conj(sk) * t1 + cc * t2
        # RQ: apply the adjoint rotations on columns
        for k in range(lo, hi):
            cc = cs[k]
            sk = ss[k]
            top = min(k + 2, hi)
            for i in range(lo, top + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = cc * t1 + np.conj(sk) * t2
                h[i, k + 1] = -sk * t1 + cc * t2
        for k in range(lo, hi + 1):
            h[k, k] += mu
    converged = hi < 0
    if not converged:
        for k in range(hi + 1):
            eig[k] = h[k, k]
    return eig, sweeps, converged


def complex_eigenvalues(m):
    """All eigenvalues of a dense complex matrix, sorted by descending modulus.

    Non-convergence after ``100 * order`` QR sweeps is reported through
    ``converged=False``; unconverged entries are the current diagonal.
    """
    a = np.array(m, dtype=np.complex128, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("expected a non-empty square matrix")
    n = a.shape[0]
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds the dense limit {MAX_ORDER}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    eig, sweeps, ok = _hqr(_hessenberg(a), 100 * n)
    order = np.argsort(-np.abs(eig), kind="stable")
    return EigenResult(eig[order], int(sweeps), bool(ok))


class EigenNonConvergence(np.linalg.LinAlgError):
    pass


def spectral_radius(m):
    res = complex_eigenvalues(m)
    if not res.converged:
        raise EigenNonConvergence(
            f"QR iteration stalled after {res.iterations} sweeps")
    return float(np.abs(res.eigenvalues[0]))
