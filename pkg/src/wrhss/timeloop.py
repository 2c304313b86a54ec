"""Backward-Euler discrete convolution form, metrics and windowing.

Backward Euler turns ``B x' + A x = f`` into

    (B/dt + A) x_{j+1} - (B/dt) x_j = f_{j+1},

i.e. a discrete convolution with the two-term kernel
``L0 = B/dt + A``, ``L1 = -B/dt``.  Level 0 is the initial condition: it is
data, never an unknown, and residuals and errors are taken over levels
``1..l`` only.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import splu

from .linalg import Banded, BandedLU, ScaledIdentity, Shifted

DIVERGENCE_RES = 1e8
DEFAULT_CAP = 7000


@dataclass(frozen=True, eq=False)
class Waveform:
    """Time levels ``x_0..x_l`` stored as rows of a complex array."""

    levels: np.ndarray
    dt: float

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=np.complex128)
        if lv.ndim != 2 or lv.shape[0] < 1 or lv.shape[1] < 1:
            raise ValueError("waveform needs shape (levels + 1, r)")
        object.__setattr__(self, "levels", lv)

    @property
    def count(self):
        """Number of levels after the initial one."""
        return self.levels.shape[0] - 1

    @property
    def r(self):
        return self.levels.shape[1]

    @classmethod
    def constant(cls, x0, count, dt):
        x0 = np.asarray(x0, dtype=np.complex128)
        return cls(np.repeat(x0[None, :], count + 1, axis=0), dt)


@dataclass(frozen=True, eq=False)
class ConvolutionKernel:
    L0: object
    L1: object

    @classmethod
    def backward_euler(cls, p):
        s = p.Bscale / p.dt
        return cls(Shifted(p.A, s), ScaledIdentity(-s))


def apply_convolution(k, x):
    """``(L x)_j = L0 x_j + L1 x_{j-1}`` for ``j >= 1``; level 0 passes through."""
    lv = x.levels
    out = np.empty_like(lv)
    out[0] = lv[0]
    out[1:] = k.L0.matvec(lv[1:]) + k.L1.matvec(lv[:-1])
    return Waveform(out, x.dt)


def residual(k, x, f):
    """Residual rows ``f_j - (L x)_j`` for ``j = 1..l``."""
    lv = x.levels
    return f[1:] - (k.L0.matvec(lv[1:]) + k.L1.matvec(lv[:-1]))


def sequence_norm(rows, p=2):
    rows = np.asarray(rows)
    if rows.size == 0:
        return 0.0
    if p == 2:
        return float(np.sqrt(np.sum(np.abs(rows) ** 2)))
    if p == np.inf:
        return float(np.max(np.abs(rows)))
    raise ValueError(f"unsupported sequence norm p={p}")


@dataclass(frozen=True)
class Metrics:
    err: float | None
    res: float | None
    norm2: float
    norm_inf: float


def sequence_metrics(x_approx, x_ref, r0norm=None, resid=None):
    """ERR, RES and the 2/inf sequence norms of ``x_approx - x_ref``.

    Norms run over levels ``1..l``.  A zero denominator makes the
    corresponding metric ``None``.
    """
    a = np.asarray(getattr(x_approx, "levels", x_approx))
    b = np.asarray(getattr(x_ref, "levels", x_ref))
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a[1:] - b[1:]
    n2, ninf = sequence_norm(diff, 2), sequence_norm(diff, np.inf)
    ref_inf = sequence_norm(b[1:], np.inf)
    err = ninf / ref_inf if ref_inf > 0 else None
    res = None
    if resid is not None and r0norm:
        res = sequence_norm(resid, 2) / r0norm
    return Metrics(err, res, n2, ninf)


class _LevelSolver:
    """Direct solves with ``B/dt + A``, factored once.

    Own banded LU for ``d = 1``; sparse LU (SuperLU) for the 2-D
    five-point matrix, whose bandwidth ``n`` makes a dense band costly.
    """

    def __init__(self, p):
        s = p.Bscale / p.dt
        if p.d == 1:
            self.solve = BandedLU(Banded.from_tridiagonal(p.A.shifted(s))).solve
        else:
            self.solve = splu(Shifted(p.A, s).tosparse()).solve

    def __call__(self, c):
        return self.solve(c)


def reference_solve(p, levels, x0=None, start=0):
    """Exact discrete solution, level by level, from `x0` at level `start`.

    """
    if levels < 1:
        raise ValueError("need at least one level")
    x0 = p.x0 if x0 is None else np.asarray(x0, dtype=np.complex128)
    solver = _LevelSolver(p)
    f = p.forcing(start, levels)
    s = p.Bscale / p.dt
    out = np.empty((levels + 1, p.r), dtype=np.complex128)
    out[0] = x0
    for j in range(1, levels + 1):
        out[j] = solver(s * out[j - 1] + f[j])
    return Waveform(out, p.dt)


@dataclass
class WindowResult:
    waveform: Waveform
    iterations: float
    res: float
    capped: bool = False
    diverged: bool = False


@dataclass
class SolveReport:
    scheme: str
    it: int
    it_mean: float
    err: float | None
    res: float
    wall_seconds: float
    per_window: list = field(default_factory=list)
    capped: bool = False
    diverged: bool = False
    params: dict = field(default_factory=dict)
    waveform: Waveform | None = field(default=None, repr=False)

    def to_dict(self):
        spec = self.params.get("spec", {})
        out = {
            "scheme": self.scheme,
            "d": spec.get("d"),
            "n": spec.get("n"),
            "q": spec.get("q"),
            "dt": spec.get("dt"),
            "levels": spec.get("levels_per_window"),
            "windows": spec.get("windows"),
        }
        for key in ("alpha", "tau", "m"):
            if key in self.params:
                out[key] = self.params[key]
        out.update(it=self.it, err=self.err, res=self.res,
                   wall_seconds=self.wall_seconds, capped=self.capped,
                   per_window=self.per_window)
        return out


def round_half_up(v):
    return int(math.floor(v + 0.5))


def run_windowed(p, scheme, eps=None, cap=DEFAULT_CAP, reference=None):
    """Run `scheme` over ``J`` windows of ``l_{t,J}`` levels each.

    `scheme` exposes ``label``, ``params`` and
    ``solve_window(x0, start, levels, eps, cap) -> WindowResult``.  Window
    ``i + 1`` starts from the last level of window ``i``.  ERR is measured
    against the exact discrete solution over the whole interval (computed
    here unless `reference` is supplied).
    """
    spec = p.spec
    eps = spec.tolerance if eps is None else eps
    L, J = spec.levels_per_window, spec.windows
    start = time.perf_counter()
    x0 = p.x0
    rows = [x0[None, :]]
    per_window = []
    last_res = 0.0
    for w in range(J):
        out = scheme.solve_window(x0, w * L, L, eps, cap)
        per_window.append({"iterations": out.iterations, "res": out.res,
                           "capped": out.capped, "diverged": out.diverged})
        rows.append(out.waveform.levels[1:])
        x0 = out.waveform.levels[-1]
        last_res = out.res
        if out.diverged:
            break
    wall = time.perf_counter() - start
    full = Waveform(np.concatenate(rows, axis=0), p.dt)
    diverged = any(w["diverged"] for w in per_window)
    err = None
    if not diverged:
        if reference is None:
            reference = reference_solve(p, full.count)
        err = sequence_metrics(full, reference).err
    its = [w["iterations"] for w in per_window]
    mean = float(np.mean(its))
    return SolveReport(
        scheme=scheme.label, it=round_half_up(mean), it_mean=mean, err=err,
        res=float(last_res), wall_seconds=wall, per_window=per_window,
        capped=any(w["capped"] for w in per_window), diverged=diverged,
        params={"spec": spec.to_dict(), **scheme.params}, waveform=full)
