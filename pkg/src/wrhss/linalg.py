"""Complex vector/matrix primitives and direct solvers.

Every array handled here is ``complex128``; real inputs are embedded with a
zero imaginary part.  Operators act on the last axis so a whole waveform
(shape ``(levels, r)``) can be pushed through a single call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numba import njit

PIVOT_RTOL = 1e-14


class SingularPivotError(np.linalg.LinAlgError):
    """Raised when a band LU pivot falls below the singularity tolerance."""

    def __init__(self, index):
        super().__init__(f"pivot {index} is zero to working tolerance")
        self.index = index


def as_cvector(x, length=None):
    """Return `x` as a finite 1-D complex128 array, optionally checking its length."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-D vector")
    if length is not None and v.size != length:
        raise ValueError(f"vector has length {v.size}, expected {length}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def vector_norms(x):
    """Euclidean and max-modulus norms of a complex vector."""
    v = np.asarray(x, dtype=np.complex128).ravel()
    if v.size == 0:
        return 0.0, 0.0
    return float(np.linalg.norm(v)), float(np.max(np.abs(v)))


@dataclass(frozen=True, eq=False)
class Tridiagonal:
    """Tridiagonal matrix held as three complex bands.

    ``sub[i]`` multiplies ``x[i]`` in row ``i + 1`` and ``sup[i]`` multiplies
    ``x[i + 1]`` in row ``i``.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        for name in ("sub", "diag", "sup"):
            band = np.array(getattr(self, name), dtype=np.complex128)
            band.setflags(write=False)
            object.__setattr__(self, name, band)
        n = self.diag.size
        if n < 1:
            raise ValueError("tridiagonal order must be at least 1")
        if self.sub.size != n - 1 or self.sup.size != n - 1:
            raise ValueError("off-diagonal bands must have length n - 1")

    @classmethod
    def constant(cls, n, lower, diag, upper):
        """tridiag(lower, diag, upper) of order `n`."""
        return cls(np.full(n - 1, lower, dtype=np.complex128),
                   np.full(n, diag, dtype=np.complex128),
                   np.full(n - 1, upper, dtype=np.complex128))

    @property
    def order(self):
        return self.diag.size

    def matvec(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if x.shape[-1] != self.order:
            raise ValueError(f"operand has trailing size {x.shape[-1]}, "
                             f"expected {self.order}")
        y = self.diag * x
        y[..., 1:] += self.sub * x[..., :-1]
        y[..., :-1] += self.sup * x[..., 1:]
        return y

    def adjoint(self):
        return Tridiagonal(self.sup.conj(), self.diag.conj(), self.sub.conj())

    def scaled(self, c):
        return Tridiagonal(c * self.sub, c * self.diag, c * self.sup)

    def shifted(self, c):
        """Return ``self + c*I``."""
        return Tridiagonal(self.sub, self.diag + c, self.sup)

    def todense(self):
        return (np.diag(self.diag) + np.diag(self.sub, -1)
                + np.diag(self.sup, 1))

    def tosparse(self):
        return sp.diags([self.sub, self.diag, self.sup], [-1, 0, 1],
                        format="csc")


def tridiag_matvec(T, x):
    return T.matvec(x)


@dataclass(frozen=True, eq=False)
class KroneckerSum:
    """Matrix-free ``I (x) T + T (x) I`` for a tridiagonal factor ``T``.

    Vectors are the row-major flattening of an ``n x n`` grid, index
    ``i*n + j``; ``I (x) T`` acts along ``j`` and ``T (x) I`` along ``i``.
    """

    factor: Tridiagonal

    @property
    def n(self):
        return self.factor.order

    @property
    def order(self):
        return self.factor.order ** 2

    def matvec(self, x):
        x = np.asarray(x, dtype=np.complex128)
        n = self.n
        if x.shape[-1] != n * n:
            raise ValueError(f"operand has trailing size {x.shape[-1]}, "
                             f"which is not {n}^2")
        g = x.reshape(x.shape[:-1] + (n, n))
        y = self.factor.matvec(g)
        y += np.swapaxes(self.factor.matvec(np.swapaxes(g, -1, -2)), -1, -2)
        return y.reshape(x.shape)

    def adjoint(self):
        return KroneckerSum(self.factor.adjoint())

    def todense(self):
        t = self.factor.todense()
        eye = np.eye(self.n)
        return np.kron(eye, t) + np.kron(t, eye)

    def tosparse(self):
        t = self.factor.tosparse()
        eye = sp.identity(self.n, format="csc")
        return (sp.kron(eye, t) + sp.kron(t, eye)).tocsc()


def kronsum_matvec(K, x):
    return K.matvec(x)


def dense_operator(op):
    """Dense matrix of a `Tridiagonal` or `KroneckerSum`."""
    return op.todense()


# --- banded LU ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Banded:
    """Square band matrix in LAPACK layout.

    ``ab[ku + i - j, j] == A[i, j]`` for ``-ku <= i - j <= kl``.
    """

    kl: int
    ku: int
    ab: np.ndarray

    def __post_init__(self):
        ab = np.array(self.ab, dtype=np.complex128)
        if ab.ndim != 2 or ab.shape[0] != self.kl + self.ku + 1:
            raise ValueError("band storage must have kl + ku + 1 rows")
        object.__setattr__(self, "ab", ab)

    @property
    def order(self):
        return self.ab.shape[1]

    @classmethod
    def from_dense(cls, a, kl, ku):
        a = np.asarray(a, dtype=np.complex128)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("band matrix must be square")
        ab = np.zeros((kl + ku + 1, n), dtype=np.complex128)
        for j in range(n):
            lo, hi = max(0, j - ku), min(n, j + kl + 1)
            ab[ku + lo - j:ku + hi - j, j] = a[lo:hi, j]
        return cls(kl, ku, ab)

    @classmethod
    def from_tridiagonal(cls, T):
        n = T.order
        ab = np.zeros((3, n), dtype=np.complex128)
        ab[0, 1:] = T.sup
        ab[1] = T.diag
        ab[2, :-1] = T.sub
        return cls(1, 1, ab)

    def todense(self):
        n = self.order
        a = np.zeros((n, n), dtype=np.complex128)
        for j in range(n):
            lo, hi = max(0, j - self.ku), min(n, j + self.kl + 1)
            a[lo:hi, j] = self.ab[self.ku + lo - j:self.ku + hi - j, j]
        return a

    def matvec(self, x):
        return self.todense() @ np.asarray(x, dtype=np.complex128)


@njit(cache=True)
def _gbtrf(lu, kl, ku, tol):
    # lu has 2*kl + ku + 1 rows; A[i, j] lives at lu[kv + i - j, j].
    n = lu.shape[1]
    kv = ku + kl
    piv = np.zeros(n, dtype=np.int64)
    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        jp = 0
        best = abs(lu[kv, j])
        for i in range(1, km + 1):
            v = abs(lu[kv + i, j])
            if v > best:
                best = v
                jp = i
        piv[j] = j + jp
        if best < tol or best == 0.0:
            return piv, j
        ju = max(ju, min(j + ku + jp, n - 1))
        if jp != 0:
            for c in range(j, ju + 1):
                r1 = kv + j - c
                r2 = kv + j + jp - c
                tmp = lu[r1, c]
                lu[r1, c] = lu[r2, c]
                lu[r2, c] = tmp
        d = lu[kv, j]
        for i in range(1, km + 1):
            lu[kv + i, j] /= d
        for c in range(j + 1, ju + 1):
            ujc = lu[kv + j - c, c]
            if ujc != 0:
                for i in range(1, km + 1):
                    lu[kv + j + i - c, c] -= lu[kv + i, j] * ujc
    return piv, -1


@njit(cache=True)
def _gbtrs(lu, piv, kl, ku, b):
    n = lu.shape[1]
    kv = ku + kl
    x = b.copy()
    for j in range(n):
        p = piv[j]
        if p != j:
            tmp = x[j]
            x[j] = x[p]
            x[p] = tmp
        km = min(kl, n - 1 - j)
        xj = x[j]
        for i in range(1, km + 1):
            x[j + i] -= lu[kv + i, j] * xj
    for j in range(n - 1, -1, -1):
        x[j] /= lu[kv, j]
        xj = x[j]
        for i in range(max(0, j - kv), j):
            x[i] -= lu[kv + i - j, j] * xj
    return x


class BandedLU:
    """Band LU factorization with partial pivoting, reusable across right-hand sides."""

    def __init__(self, band):
        kl, ku, n = band.kl, band.ku, band.order
        lu = np.zeros((2 * kl + ku + 1, n), dtype=np.complex128)
        lu[kl:] = band.ab
        scale = np.max(np.abs(band.ab)) if band.ab.size else 0.0
        piv, info = _gbtrf(lu, kl, ku, PIVOT_RTOL * scale)
        if info >= 0:
            raise SingularPivotError(int(info))
        self.kl, self.ku, self.order = kl, ku, n
        self._lu, self._piv = lu, piv

    def solve(self, b):
        b = np.asarray(b, dtype=np.complex128)
        if b.shape[0] != self.order:
            raise ValueError(f"right-hand side has length {b.shape[0]}, "
                             f"expected {self.order}")
        if b.ndim == 1:
            return _gbtrs(self._lu, self._piv, self.kl, self.ku, b)
        out = np.empty_like(b)
        for k in range(b.shape[1]):
            out[:, k] = _gbtrs(self._lu, self._piv, self.kl, self.ku,
                               np.ascontiguousarray(b[:, k]))
        return out


def banded_lu_solve(band, b):
    """Solve ``band @ x = b`` by band LU with partial pivoting.

    Raises `SingularPivotError` carrying the offending column when a pivot
    is below ``1e-14`` times the largest band entry.
    """
    return BandedLU(band).solve(b)


# --- light operator algebra used by kernels and splittings -------------

@dataclass(frozen=True, eq=False)
class ScaledIdentity:
    """``c * I`` of unspecified order."""

    c: complex

    @property
    def is_zero(self):
        return self.c == 0

    def matvec(self, x):
        return self.c * np.asarray(x, dtype=np.complex128)

    def todense(self, order):
        return self.c * np.eye(order, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Shifted:
    """``shift * I + scale * op`` for a structured operator `op`."""

    op: object
    shift: complex = 0.0
    scale: complex = 1.0

    is_zero = False

    @property
    def order(self):
        return self.op.order

    def matvec(self, x):
        x = np.asarray(x, dtype=np.complex128)
        return self.shift * x + self.scale * self.op.matvec(x)

    def todense(self, order=None):
        a = self.op.todense()
        return self.shift * np.eye(a.shape[0]) + self.scale * a

    def tosparse(self):
        a = self.op.tosparse()
        return (self.shift * sp.identity(a.shape[0], format="csc")
                + self.scale * a).tocsc()
