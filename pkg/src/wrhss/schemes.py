"""Iteration schemes for the backward-Euler convolution equation.

A one-step splitting ``B = M_B - N_B``, ``A = M_A - N_A`` gives the
discrete waveform relaxation sweep

    (M_B/dt + M_A) x_{j+1}^{k+1} - (M_B/dt) x_j^{k+1}
        = (N_B/dt + N_A) x_{j+1}^{k} - (N_B/dt) x_j^{k} + f_{j+1},

run forward over the levels of a window.  A two-step splitting chains two
such sweeps through a half iterate.  For WR-HSS the halves are

    B = 0 - (-h^2 I),   A = (alpha I + H) - (alpha I - S)
    B = h^2 I - 0,      A = (alpha I + S) - (alpha I - H)

so each iteration solves, level by level,

    (alpha I + H) x_{j+1}^{k+1/2}
        = ((alpha - h^2/dt) I - S) x_{j+1}^{k} + (h^2/dt) x_j^{k} + f_{j+1}
    ((h^2/dt + alpha) I + S) x_{j+1}^{k+1}
        = (h^2/dt) x_j^{k+1} + (alpha I - H) x_{j+1}^{k+1/2} + f_{j+1}.

The first half has ``M_B = 0``, so its levels decouple and are solved in
one batched transform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .krylov import gmres_m
from .linalg import ScaledIdentity, Shifted
from .timeloop import (DEFAULT_CAP, DIVERGENCE_RES, ConvolutionKernel,
                       WindowResult, Waveform, reference_solve, residual,
                       run_windowed, sequence_norm)
from .transforms import solve_shifted_hermitian, solve_shifted_skew_hermitian

VARIANTS = ("standard", "reversed", "bad")


# --- constant stencils for the SOR splitting ----------------------------

@njit(cache=True)
def _lower_solve_1d(c, w, rhs):
    n = rhs.shape[0]
    x = np.empty_like(rhs)
    prev = 0.0j
    for j in range(n):
        prev = (rhs[j] - w * prev) / c
        x[j] = prev
    return x


@njit(cache=True)
def _lower_solve_2d(c, w, s, rhs):
    n = rhs.shape[0]
    x = np.empty_like(rhs)
    for i in range(n):
        prev = 0.0j
        for j in range(n):
            v = rhs[i, j] - w * prev
            if i > 0:
                v -= s * x[i - 1, j]
            prev = v / c
            x[i, j] = prev
    return x


@dataclass(frozen=True, eq=False)
class Stencil:
    """Constant 3-point (d = 1) or 5-point (d = 2) grid operator.

    ``west``/``east`` couple ``j -/+ 1`` along the fast axis, ``south``/
    ``north`` couple ``i -/+ 1`` along the slow axis (d = 2 only).
    """

    d: int
    n: int
    center: complex
    west: complex = 0.0
    east: complex = 0.0
    south: complex = 0.0
    north: complex = 0.0

    @property
    def order(self):
        return self.n ** self.d

    def _grid(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if self.d == 1:
            return x
        return x.reshape(x.shape[:-1] + (self.n, self.n))

    def matvec(self, x):
        g = self._grid(x)
        y = self.center * g
        y[..., 1:] += self.west * g[..., :-1]
        y[..., :-1] += self.east * g[..., 1:]
        if self.d == 2:
            y[..., 1:, :] += self.south * g[..., :-1, :]
            y[..., :-1, :] += self.north * g[..., 1:, :]
        return y.reshape(np.shape(x))

    def todense(self, order=None):
        eye = np.eye(self.order, dtype=np.complex128)
        return self.matvec(eye).T

    def shifted(self, c):
        return Stencil(self.d, self.n, self.center + c, self.west, self.east,
                       self.south, self.north)

    def lower_solve(self, rhs):
        """Forward substitution; the stencil must have no east/north part."""
        if self.east != 0 or self.north != 0:
            raise ValueError("stencil is not lower triangular")
        g = np.ascontiguousarray(self._grid(rhs))
        c, w, s = complex(self.center), complex(self.west), complex(self.south)
        if g.ndim == self.d:
            out = (_lower_solve_1d(c, w, g) if self.d == 1
                   else _lower_solve_2d(c, w, s, g))
        else:
            flat = g.reshape((-1,) + g.shape[-self.d:])
            out = np.stack([_lower_solve_1d(c, w, v) if self.d == 1
                            else _lower_solve_2d(c, w, s, v) for v in flat])
        return out.reshape(np.shape(rhs))


@njit(cache=True)
def _sor_sweep(x, f, c, w, s, e, nn, nc, b):
    """Fused WR-SOR sweep on ``(levels, rows, cols)`` grids.

    Per level: ``c y_p + w y_west + s y_south = nc x_p + e x_east
    + nn x_north + b y_{l-1,p} + f_p`` in lexicographic order.
    """
    nl, nr, nc_ = x.shape
    new = np.empty_like(x)
    new[0] = x[0]
    for lv in range(1, nl):
        for i in range(nr):
            for j in range(nc_):
                v = f[lv, i, j] + b * new[lv - 1, i, j] + nc * x[lv, i, j]
                if j + 1 < nc_:
                    v += e * x[lv, i, j + 1]
                if i + 1 < nr:
                    v += nn * x[lv, i + 1, j]
                if j > 0:
                    v -= w * new[lv, i, j - 1]
                if i > 0:
                    v -= s * new[lv, i - 1, j]
                new[lv, i, j] = v / c
    return new


@njit(cache=True)
def _stencil_residual_sq(x, f, c, w, e, s, nn, b):
    """``sum_l ||f_l - (K x_l - b x_{l-1})||^2`` for a 5-point stencil ``K``."""
    nl, nr, nc_ = x.shape
    acc = 0.0
    for lv in range(1, nl):
        for i in range(nr):
            for j in range(nc_):
                v = c * x[lv, i, j] - b * x[lv - 1, i, j]
                if j > 0:
                    v += w * x[lv, i, j - 1]
                if j + 1 < nc_:
                    v += e * x[lv, i, j + 1]
                if i > 0:
                    v += s * x[lv, i - 1, j]
                if i + 1 < nr:
                    v += nn * x[lv, i + 1, j]
                r = f[lv, i, j] - v
                acc += r.real * r.real + r.imag * r.imag
    return acc


# --- splittings -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OneStepSplitting:
    """``B = M_B - N_B``, ``A = M_A - N_A`` plus a solver for ``M_B/dt + M_A``.

    `solve` takes right-hand sides with leading batch axes.
    """

    MB: ScaledIdentity
    MA: object
    NB: ScaledIdentity
    NA: object
    solve: object


@dataclass(frozen=True, eq=False)
class TwoStepSplitting:
    first: OneStepSplitting
    second: OneStepSplitting


def one_step_wr_sweep(s, x, f):
    """One forward pass over levels ``1..l``; level 0 is copied."""
    lv = x.levels
    dt = x.dt
    rhs = (s.NA.matvec(lv[1:]) + s.NB.matvec(lv[1:] - lv[:-1]) / dt + f[1:])
    new = np.empty_like(lv)
    new[0] = lv[0]
    if s.MB.is_zero:
        new[1:] = s.solve(rhs)
    else:
        for j in range(1, lv.shape[0]):
            new[j] = s.solve(rhs[j - 1] + s.MB.matvec(new[j - 1]) / dt)
    return Waveform(new, dt)


def two_step_wr_sweep(s, x, f):
    half = one_step_wr_sweep(s.first, x, f)
    return one_step_wr_sweep(s.second, half, f)


def hss_splitting(p, alpha, variant="standard"):
    """Two-step splitting of WR-HSS (`standard`), its half-swapped form
    (`reversed`) and the variant with ``H`` and ``S`` exchanged (`bad`)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    d, n, Re, dt = p.d, p.n, p.Re, p.dt
    b = p.Bscale
    zero, minus_b, plus_b = (ScaledIdentity(0.0), ScaledIdentity(-b),
                             ScaledIdentity(b))
    a_plus_h, a_minus_h = Shifted(p.H, alpha), Shifted(p.H, alpha, -1.0)
    a_plus_s, a_minus_s = Shifted(p.S, alpha), Shifted(p.S, alpha, -1.0)

    def herm(shift):
        return lambda c: solve_shifted_hermitian(d, n, shift, c)

    def skew(shift):
        return lambda c: solve_shifted_skew_hermitian(d, n, shift, Re, c)

    # stationary Hermitian half / differential skew half
    h_half = OneStepSplitting(zero, a_plus_h, minus_b, a_minus_s, herm(alpha))
    s_half = OneStepSplitting(plus_b, a_plus_s, zero, a_minus_h,
                              skew(b / dt + alpha))
    if variant == "standard":
        return TwoStepSplitting(h_half, s_half)
    if variant == "reversed":
        return TwoStepSplitting(s_half, h_half)
    if variant == "bad":
        first = OneStepSplitting(zero, a_plus_s, minus_b, a_minus_h,
                                 skew(alpha))
        second = OneStepSplitting(plus_b, a_plus_h, zero, a_minus_s,
                                  herm(b / dt + alpha))
        return TwoStepSplitting(first, second)
    raise ValueError(f"unknown WR-HSS variant {variant!r}")


def sor_splitting(p, tau):
    """``A = (D/tau - L) - ((1 - tau)/tau D + U)``, ``B = h^2 I - 0``.

    ``A = D - L - U`` in natural lexicographic order; the inner systems
    ``(h^2/dt + D/tau - L) y = c`` are lower triangular.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    d, n, Re = p.d, p.n, p.Re
    diag = 2.0 * d
    low, up = -1.0 - Re, -1.0 + Re
    if d == 1:
        MA = Stencil(1, n, diag / tau, west=low)
        NA = Stencil(1, n, diag * (1 - tau) / tau, east=-up)
    else:
        MA = Stencil(2, n, diag / tau, west=low, south=low)
        NA = Stencil(2, n, diag * (1 - tau) / tau, east=-up, north=-up)
    inner = MA.shifted(p.Bscale / p.dt)
    return OneStepSplitting(ScaledIdentity(p.Bscale), MA, ScaledIdentity(0.0),
                            NA, inner.lower_solve)


# --- window solvers -------------------------------------------------------

class _RelaxationScheme:
    label = ""

    def __init__(self, p):
        self.p = p
        self.kernel = ConvolutionKernel.backward_euler(p)
        self.params = {}

    def sweep(self, x, f):
        raise NotImplementedError

    def residual_norm(self, x, f):
        return sequence_norm(residual(self.kernel, x, f))

    def solve_window(self, x0, start, levels, eps, cap):
        p = self.p
        f = p.forcing(start, levels)
        x = Waveform.constant(x0, levels, p.dt)
        r0 = self.residual_norm(x, f)
        if r0 == 0.0:
            return WindowResult(x, 0, 0.0)
        res = 1.0
        k = 0
        while k < cap:
            x = self.sweep(x, f)
            k += 1
            res = self.residual_norm(x, f) / r0
            if not np.isfinite(res) or res > DIVERGENCE_RES:
                return WindowResult(x, k, float(res), diverged=True)
            if res < eps:
                return WindowResult(x, k, float(res))
        return WindowResult(x, k, float(res), capped=True)


class WrHss(_RelaxationScheme):
    def __init__(self, p, alpha=None, variant="standard"):
        super().__init__(p)
        alpha = p.alpha if alpha is None else alpha
        self.splitting = hss_splitting(p, alpha, variant)
        self.label = "wr-hss" if variant == "standard" else f"wr-hss-{variant}"
        self.params = {"alpha": alpha, "variant": variant}

    def sweep(self, x, f):
        return two_step_wr_sweep(self.splitting, x, f)


class WrSor(_RelaxationScheme):
    label = "wr-sor"

    def __init__(self, p, tau=None):
        super().__init__(p)
        tau = p.spec.tau if tau is None else tau
        self.splitting = sor_splitting(p, tau)
        self.params = {"tau": tau}
        n = p.n
        self._shape = (n, n) if p.d == 2 else (1, n)
        b = p.Bscale / p.dt
        self._b = b
        ma, na = self.splitting.MA, self.splitting.NA
        self._sweep_coef = (complex(ma.center + b), complex(ma.west),
                            complex(ma.south), complex(na.east),
                            complex(na.north), complex(na.center), b)
        diag = 2.0 * p.d
        low, up = -1.0 - p.Re, -1.0 + p.Re
        self._res_coef = (diag + b, low, up,
                          low if p.d == 2 else 0.0, up if p.d == 2 else 0.0, b)

    def _grids(self, x, f):
        shape = (x.levels.shape[0],) + self._shape
        return x.levels.reshape(shape), np.ascontiguousarray(f).reshape(shape)

    def sweep(self, x, f):
        g, fg = self._grids(x, f)
        new = _sor_sweep(g, fg, *self._sweep_coef)
        return Waveform(new.reshape(x.levels.shape), x.dt)

    def residual_norm(self, x, f):
        g, fg = self._grids(x, f)
        return float(np.sqrt(_stencil_residual_sq(g, fg, *self._res_coef)))


class Dgmres:
    """Backward-Euler stepping with GMRES(m) on every level.

    Each level starts GMRES from zero, or from the previous level's
    solution with ``warm_start=True``; the tolerance is relative to the
    level's right-hand side either way.  The window's iteration figure is
    the mean matvec count per level.
    """

    label = "dgmres"

    def __init__(self, p, eta=None, m=None, warm_start=False):
        self.p = p
        self.warm_start = warm_start
        self.eta = p.spec.gmres_tol if eta is None else eta
        self.m = p.spec.gmres_restart if m is None else m
        s = p.Bscale / p.dt
        self.op = Shifted(p.A, s)
        self.kernel = ConvolutionKernel.backward_euler(p)
        self.params = {"m": self.m, "eta": self.eta,
                       "warm_start": warm_start}

    def solve_window(self, x0, start, levels, eps=None, cap=None):
        p = self.p
        f = p.forcing(start, levels)
        s = p.Bscale / p.dt
        lv = np.empty((levels + 1, p.r), dtype=np.complex128)
        lv[0] = x0
        steps = 0
        ok = True
        for j in range(1, levels + 1):
            out = gmres_m(self.op.matvec, s * lv[j - 1] + f[j], m=self.m,
                          tol=self.eta,
                          x0=lv[j - 1] if self.warm_start else None)
            lv[j] = out.x
            steps += out.iterations
            ok = ok and out.converged
        x = Waveform(lv, p.dt)
        r0 = sequence_norm(residual(self.kernel,
                                    Waveform.constant(x0, levels, p.dt), f))
        res = sequence_norm(residual(self.kernel, x, f)) / r0 if r0 else 0.0
        return WindowResult(x, steps / levels, float(res), capped=not ok)


class Direct:
    """Exact level-by-level solve; the ERR reference itself."""

    label = "direct"
    params = {}

    def __init__(self, p):
        self.p = p

    def solve_window(self, x0, start, levels, eps=None, cap=None):
        return WindowResult(reference_solve(self.p, levels, x0, start), 0, 0.0)


def wr_hss_solve(p, alpha=None, eps=None, cap=DEFAULT_CAP, variant="standard",
                 reference=None):
    return run_windowed(p, WrHss(p, alpha, variant), eps, cap, reference)


def wr_sor_solve(p, tau=None, eps=None, cap=DEFAULT_CAP, reference=None):
    return run_windowed(p, WrSor(p, tau), eps, cap, reference)


def dgmres_solve(p, eta=None, m=None, reference=None, warm_start=False):
    return run_windowed(p, Dgmres(p, eta, m, warm_start), reference=reference)


def direct_solve(p):
    return run_windowed(p, Direct(p))


def make_scheme(p, name, **kw):
    """Scheme object by CLI name."""
    if name == "wr-hss":
        return WrHss(p, kw.get("alpha"), "standard")
    if name.startswith("wr-hss-"):
        return WrHss(p, kw.get("alpha"), name[len("wr-hss-"):])
    if name == "wr-sor":
        return WrSor(p, kw.get("tau"))
    if name == "dgmres":
        return Dgmres(p, kw.get("eta"), kw.get("m"))
    if name == "direct":
        return Direct(p)
    raise ValueError(f"unknown scheme {name!r}")
