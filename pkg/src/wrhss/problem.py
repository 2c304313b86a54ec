"""Unsteady convection-diffusion test problems ``B x' + A x = f``.

Centered differences on the unit interval/square with ``n`` interior points
per axis, ``h = 1/(n+1)`` and constant convection ``q`` give

    B = h^2 I,   A = tridiag(-1 - Re, 2, -1 + Re)          (d = 1)
                 A = I (x) T + T (x) I,  T as above         (d = 2)

with mesh Reynolds number ``Re = q h / 2``.  The Hermitian part ``H`` is the
``q``-independent diffusion stencil, the skew-Hermitian part
``S = Re * tridiag(-1, 0, 1)`` (or its Kronecker sum) carries the convection.

The forcing is manufactured so that ``x(t) = exp(-t) * 1`` solves the
semi-discrete system; Dirichlet data are folded into ``f``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .linalg import KroneckerSum, Tridiagonal


@dataclass(frozen=True)
class ProblemSpec:
    d: int = 2
    n: int = 127
    q: float = 2000.0
    dt: float = 1e-4
    levels_per_window: int = 5
    windows: int = 1
    alpha: float | None = None
    tau: float = 1.0
    tolerance: float = 1e-5
    gmres_restart: int = 5
    gmres_tol: float = 1e-8

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"unsupported dimension d={self.d}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not self.dt > 0:
            raise ValueError("time step must be positive")
        if self.levels_per_window < 1 or self.windows < 1:
            raise ValueError("need at least one level and one window")
        if not 0 < self.tolerance < 1 or not 0 < self.gmres_tol < 1:
            raise ValueError("tolerances must lie in (0, 1)")
        if self.gmres_restart < 1:
            raise ValueError("GMRES restart must be at least 1")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @property
    def h(self):
        return 1.0 / (self.n + 1)

    @property
    def reynolds(self):
        return self.q * self.h / 2.0

    @property
    def hss_alpha(self):
        """The HSS shift, defaulting to the mesh Reynolds number ``q h / 2``."""
        return self.reynolds if self.alpha is None else self.alpha

    @property
    def total_levels(self):
        return self.levels_per_window * self.windows

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class DiscreteProblem:
    spec: ProblemSpec
    h: float
    Re: float
    Bscale: float
    A: object
    H: object
    S: object

    @property
    def d(self):
        return self.spec.d

    @property
    def n(self):
        return self.spec.n

    @property
    def dt(self):
        return self.spec.dt

    @property
    def r(self):
        return self.spec.n ** self.spec.d

    @property
    def alpha(self):
        return self.spec.hss_alpha

    @property
    def x0(self):
        """Initial state ``x(0) = 1``."""
        return np.ones(self.r, dtype=np.complex128)

    def exact(self, t):
        return math.exp(-t) * np.ones(self.r, dtype=np.complex128)

    def forcing(self, start, count):
        """Forcing at levels ``start..start+count`` as rows.

        Level ``k`` sits at ``t = k dt``; integer level indices keep windowed
        and unwindowed runs on bitwise identical time points.
        """
        f0 = _forcing_profile(self)
        t = self.dt * (start + np.arange(count + 1))
        return np.exp(-t)[:, None] * f0[None, :]


def _operator(d, t):
    return t if d == 1 else KroneckerSum(t)


def build_problem(spec):
    n, Re = spec.n, spec.reynolds
    A = Tridiagonal.constant(n, -1.0 - Re, 2.0, -1.0 + Re)
    H = Tridiagonal.constant(n, -1.0, 2.0, -1.0)
    S = Tridiagonal.constant(n, -Re, 0.0, Re)
    return DiscreteProblem(spec=spec, h=spec.h, Re=Re, Bscale=spec.h ** 2,
                           A=_operator(spec.d, A), H=_operator(spec.d, H),
                           S=_operator(spec.d, S))


def _forcing_profile(p):
    one = np.ones(p.r, dtype=np.complex128)
    return -p.Bscale * one + p.A.matvec(one)


def manufactured_forcing(p, t):
    """``f(t) = B x'(t) + A x(t)`` for ``x(t) = exp(-t) 1``."""
    if t < 0:
        raise ValueError("time must be non-negative")
    return math.exp(-t) * _forcing_profile(p)


def hs_split(p):
    """Hermitian and skew-Hermitian parts ``(H, S)`` of ``A``."""
    return p.H, p.S


def hermitian_extremes(d, n):
    """Closed-form smallest and largest eigenvalues of ``H``."""
    lo = 4.0 * math.sin(math.pi / (2 * (n + 1))) ** 2
    hi = 4.0 * math.sin(n * math.pi / (2 * (n + 1))) ** 2
    return d * lo, d * hi


def hermitian_spectrum(d, n):
    """All eigenvalues of ``H`` (with multiplicity), ascending."""
    j = np.arange(1, n + 1)
    lam = 4.0 * np.sin(j * np.pi / (2 * (n + 1))) ** 2
    if d == 1:
        return lam
    return np.sort((lam[:, None] + lam[None, :]).ravel())
