"""Fast direct solvers for the shifted Hermitian and skew-Hermitian parts.

With ``H1 = tridiag(-1, 2, -1)`` and ``S1 = Re * tridiag(-1, 0, 1)`` of order
``n``, the orthonormal DST-I matrix ``V`` diagonalizes ``H1`` and
``C = tridiag(1, 0, 1)``, and

    S1 = D (i Re C) D^{-1},    D = diag(i^0, i^1, ..., i^{n-1}),

so both ``alpha*I + H`` and ``beta*I + S`` (and their 2-D Kronecker sums)
are solved by a transform, a pointwise division and an inverse transform.
``D`` is applied as an elementwise scaling.

Both a fast transform path (FFT based, O(n log n) per line) and a quadratic
reference path are available; they are compared against each other in the
tests.  Passing an `OpCounter` accumulates multiply-add estimates: exact
for the reference path, ``L log2 L`` with ``L = 2(n + 1)`` per line for the
fast path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft

FAST = "fast"
REFERENCE = "reference"


class OpCounter:
    """Accumulates estimated multiply-add counts of transform calls."""

    def __init__(self):
        self.ops = 0

    def add(self, k):
        self.ops += int(k)


@dataclass(frozen=True, eq=False)
class DstPlan:
    """Orthonormal DST-I of order `n`; applying it twice is the identity."""

    n: int
    scale: float = field(init=False)
    sines: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("transform order must be at least 1")
        object.__setattr__(self, "scale", math.sqrt(2.0 / (self.n + 1)))
        k = np.arange(1, self.n + 1)
        s = self.scale * np.sin(np.outer(k, k) * np.pi / (self.n + 1))
        s.setflags(write=False)
        object.__setattr__(self, "sines", s)

    def line_cost(self, path):
        if path == REFERENCE:
            return self.n * self.n
        m = 2 * (self.n + 1)
        return int(math.ceil(m * math.log2(m)))


@lru_cache(maxsize=32)
def get_plan(n):
    return DstPlan(n)


def _check_path(path):
    if path not in (FAST, REFERENCE):
        raise ValueError(f"unknown transform path {path!r}")


def dst1(plan, x, path=FAST, counter=None):
    """y_k = sqrt(2/(n+1)) sum_j x_j sin(jk pi/(n+1)) along the last axis."""
    _check_path(path)
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[-1] != plan.n:
        raise ValueError(f"transform of order {plan.n} applied to length "
                         f"{x.shape[-1]}")
    if counter is not None:
        counter.add(plan.line_cost(path) * (x.size // plan.n))
    if path == REFERENCE:
        return x @ plan.sines
    return scipy.fft.dst(x, type=1, axis=-1, norm="ortho")


def dst2(plan, x, path=FAST, counter=None):
    """Separable DST-I over the last two axes of an ``(..., n, n)`` array."""
    y = dst1(plan, x, path, counter)
    y = dst1(plan, np.swapaxes(y, -1, -2), path, counter)
    return np.swapaxes(y, -1, -2)


@lru_cache(maxsize=64)
def _cosines(n):
    c = np.cos(np.arange(1, n + 1) * np.pi / (n + 1))
    c.setflags(write=False)
    return c


def hermitian_eigenvalues(n):
    """Eigenvalues ``2 - 2 cos(j pi/(n+1))`` of tridiag(-1, 2, -1), ascending."""
    return 2.0 - 2.0 * _cosines(n)


@lru_cache(maxsize=64)
def _phases(n):
    p = 1j ** np.arange(n)
    p.setflags(write=False)
    return p


def _grid(d, n, v):
    v = np.asarray(v, dtype=np.complex128)
    r = n ** d
    if v.shape[-1] != r:
        raise ValueError(f"vector has trailing size {v.shape[-1]}, expected "
                         f"{r} = {n}^{d}")
    if d == 1:
        return v
    if d == 2:
        return v.reshape(v.shape[:-1] + (n, n))
    raise ValueError(f"unsupported dimension {d}")


def _diagonal_solve(d, n, rhs, denom, path, counter):
    plan = get_plan(n)
    g = _grid(d, n, rhs)
    if d == 1:
        y = dst1(plan, dst1(plan, g, path, counter) / denom, path, counter)
    else:
        y = dst2(plan, dst2(plan, g, path, counter)
                 / (denom[:, None] + denom[None, :]), path, counter)
    return y.reshape(np.shape(rhs))


def solve_shifted_hermitian(d, n, alpha, c, path=FAST, counter=None):
    """Solve ``(alpha*I + H) y = c`` for the centered diffusion matrix ``H``.

    `c` may carry leading batch axes (e.g. one row per time level).
    """
    if not alpha > 0:
        raise ValueError(f"shift must be positive, got {alpha}")
    lam = hermitian_eigenvalues(n)
    if d == 1:
        denom = alpha + lam
    else:
        # split the shift across the two axes so the 2-D denominator is
        # alpha + lam_j + lam_k
        denom = 0.5 * alpha + lam
    return _diagonal_solve(d, n, c, denom, path, counter)


def solve_shifted_skew_hermitian(d, n, beta, Re, b, path=FAST, counter=None):
    """Solve ``(beta*I + S) z = b`` for the centered convection matrix ``S``.

    ``S`` is ``Re * tridiag(-1, 0, 1)`` (d = 1) or its Kronecker sum (d = 2).
    """
    if not beta > 0:
        raise ValueError(f"shift must be positive, got {beta}")
    mu = 2j * Re * _cosines(n)
    ph = _phases(n)
    g = _grid(d, n, b)
    if d == 1:
        scaled = g / ph
        z = _diagonal_solve(1, n, scaled, beta + mu, path, counter) * ph
    else:
        dd = ph[:, None] * ph[None, :]
        z = _diagonal_solve(2, n, (g / dd).reshape(np.shape(b)),
                            0.5 * beta + mu, path, counter)
        z = (_grid(2, n, z) * dd).reshape(np.shape(b))
    return z
