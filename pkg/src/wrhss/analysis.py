"""Frequency-domain convergence analysis of WR-HSS.

Laplace/Fourier transforming ``B x' + A x = f`` replaces the differential
operator by ``i omega B + A``.  Its HS splitting keeps ``H`` and moves
``i omega B`` into the skew part, so one WR-HSS iteration acts on every
frequency as

    K(omega, alpha) = (aI + i omega B + S)^{-1} (aI + H)^{-1}
                      (aI - H) (aI - i omega B - S),

whose spectral radius is bounded by

    sigma(alpha) = max_{lambda in lambda(H)} |(alpha - lambda)/(alpha + lambda)|

independently of omega.  The "bad" variant that puts ``i omega B`` with
``H`` has the per-frequency bound ``sigma_hat(alpha; omega)``, which tends
to 1 as ``|omega|`` grows.

All matrices here are dense, so orders are limited to ``n^d <= 2048``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .eig import MAX_ORDER, EigenNonConvergence, spectral_radius
from .problem import build_problem, hermitian_extremes, hermitian_spectrum
from .schemes import WrHss
from .timeloop import Waveform, reference_solve

OMEGA_C = 2000.0
OMEGA_POINTS = 2001
SCHEMES = ("wrhss", "bad")


def parallel_map(fn, items, threads=1):
    """``list(map(fn, items))``, optionally on a thread pool; order kept."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) < 2:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- closed-form bounds -------------------------------------------------

def sigma_upper_bound(alpha, spectrum):
    """``max |(alpha - l)/(alpha + l)|`` over the positive values `spectrum`.

    The ratio is quasiconvex in ``l``, so only the extremes matter; a pair
    ``(l_min, l_max)`` is as good as the full spectrum.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    lam = np.asarray(spectrum, dtype=float).ravel()
    if lam.size == 0 or not np.all(lam > 0):
        raise ValueError("eigenvalues must be positive")
    ends = np.array([lam.min(), lam.max()])
    return float(np.max(np.abs((alpha - ends) / (alpha + ends))))


def sigma_for_problem(p, alpha=None):
    alpha = p.alpha if alpha is None else alpha
    return sigma_upper_bound(alpha, hermitian_extremes(p.d, p.n))


def optimal_alpha(gmin, gmax):
    """``alpha* = sqrt(gmin gmax)`` and ``sigma(alpha*) = (sqrt(k)-1)/(sqrt(k)+1)``."""
    if not 0 < gmin <= gmax:
        raise ValueError(f"need 0 < gmin <= gmax, got ({gmin}, {gmax})")
    rk = math.sqrt(gmax / gmin)
    return math.sqrt(gmin * gmax), (rk - 1.0) / (rk + 1.0)


def bad_bound_sigma_hat(p, alpha, omega):
    """Bound for the bad variant at one frequency.

    Uses the eigenvalues ``lambda_j(H) + i omega h^2`` of ``i omega B + H``
    (normal, since ``B`` is a multiple of the identity).
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    lam = hermitian_spectrum(p.d, p.n) + 1j * omega * p.Bscale
    return float(np.max(np.abs((alpha - lam) / (alpha + lam))))


# --- dense iteration matrices --------------------------------------------

@dataclass(frozen=True, eq=False)
class DenseOperators:
    """Dense ``H``, ``S`` and the scalar ``b`` in ``B = b I``."""

    H: np.ndarray
    S: np.ndarray
    b: float

    @property
    def order(self):
        return self.H.shape[0]


def dense_operators(p):
    if p.r > MAX_ORDER:
        raise ValueError(f"dense analysis limited to order {MAX_ORDER}, "
                         f"problem has {p.r}")
    return DenseOperators(np.asarray(p.H.todense(), dtype=np.complex128),
                          np.asarray(p.S.todense(), dtype=np.complex128),
                          p.Bscale)


def _lu_solve(m, rhs):
    lu = scipy.linalg.lu_factor(m, check_finite=False)
    return scipy.linalg.lu_solve(lu, rhs, check_finite=False)


def freq_iteration_matrix(p, omega, alpha, scheme="wrhss", ops=None):
    """Per-frequency WR iteration matrix, assembled with dense LU solves."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    ops = dense_operators(p) if ops is None else ops
    eye = np.eye(ops.order, dtype=np.complex128)
    aI = alpha * eye
    wb = 1j * omega * ops.b * eye
    H, S = ops.H, ops.S
    if scheme == "wrhss":
        g = (aI - H) @ (aI - wb - S)
        return _lu_solve(aI + wb + S, _lu_solve(aI + H, g))
    if scheme == "bad":
        g = (aI - S) @ _lu_solve(aI + S, aI - wb - H)
        return _lu_solve(aI + wb + H, g)
    raise ValueError(f"unknown scheme {scheme!r}")


def cayley_factor(S, alpha):
    """``(aI - S)(aI + S)^{-1}``; unitary for skew-Hermitian ``S``."""
    S = np.asarray(S, dtype=np.complex128)
    eye = np.eye(S.shape[0])
    # the two factors commute, so the left solve gives the same matrix
    return _lu_solve(alpha * eye + S, alpha * eye - S)


def rho_at(p, omega, alpha, scheme="wrhss", ops=None):
    """Spectral radius of the per-frequency iteration matrix; NaN on failure."""
    try:
        return spectral_radius(freq_iteration_matrix(p, omega, alpha, scheme,
                                                     ops))
    except (EigenNonConvergence, np.linalg.LinAlgError):
        return float("nan")


# --- scans ----------------------------------------------------------------

@dataclass
class SpectralScan:
    """Grid axes (``omega``, ``alpha``, ``q``), values and metadata.

    `rho` and `sigma` have one entry per point of the product of the
    present axes, in C order of the axes as listed in `axes`.
    """

    axes: dict
    rho: np.ndarray | None = None
    sigma: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def flagged(self):
        """Indices of points where the eigensolver failed."""
        if self.rho is None:
            return []
        return [tuple(int(i) for i in ix)
                for ix in np.argwhere(np.isnan(self.rho))]

    def rows(self):
        """One dict per grid point with keys omega, alpha, q, rho, sigma."""
        names = list(self.axes)
        grids = [np.asarray(self.axes[k]) for k in names]
        out = []
        for ix in np.ndindex(*[len(g) for g in grids]):
            row = dict.fromkeys(("omega", "alpha", "q", "rho", "sigma"))
            for k, g, i in zip(names, grids, ix):
                row[k] = float(g[i])
            if self.rho is not None:
                row["rho"] = float(self.rho[ix])
            if self.sigma is not None:
                row["sigma"] = float(self.sigma[ix])
            out.append(row)
        return out


def omega_grid(omega_c=OMEGA_C, points=OMEGA_POINTS):
    if not omega_c > 0:
        raise ValueError("omega_c must be positive")
    if points < 1:
        raise ValueError("need at least one frequency")
    return np.linspace(-omega_c, omega_c, points)


@dataclass
class OmegaSweep:
    rho_min: float
    rho_max: float
    scan: SpectralScan


def omega_sweep(p, alpha=None, omega_c=OMEGA_C, points=OMEGA_POINTS,
                scheme="wrhss", threads=1):
    """Spectral radius over a symmetric frequency grid on ``[-omega_c, omega_c]``.

    Failed points come back as NaN, are listed in ``scan.flagged`` and are
    ignored by the extremes.
    """
    alpha = p.alpha if alpha is None else alpha
    ops = dense_operators(p)
    grid = omega_grid(omega_c, points)
    rho = np.array(parallel_map(lambda w: rho_at(p, w, alpha, scheme, ops),
                                grid, threads))
    scan = SpectralScan({"omega": grid}, rho=rho,
                        meta={"n": p.n, "d": p.d, "q": p.spec.q,
                              "alpha": alpha, "omega_c": omega_c,
                              "scheme": scheme})
    ok = rho[~np.isnan(rho)]
    if ok.size == 0:
        return OmegaSweep(float("nan"), float("nan"), scan)
    return OmegaSweep(float(ok.min()), float(ok.max()), scan)


def surface_scan(p, alpha_grid, omega_grid_, scheme="wrhss", threads=1):
    """``rho`` and ``sigma`` on the (alpha, omega) product grid."""
    alphas = np.asarray(alpha_grid, dtype=float)
    omegas = np.asarray(omega_grid_, dtype=float)
    if alphas.size == 0 or omegas.size == 0:
        raise ValueError("grids must be non-empty")
    ops = dense_operators(p)
    pts = [(a, w) for a in alphas for w in omegas]
    rho = np.array(parallel_map(lambda aw: rho_at(p, aw[1], aw[0], scheme, ops),
                                pts, threads)).reshape(alphas.size, omegas.size)
    ext = hermitian_extremes(p.d, p.n)
    sig = np.array([sigma_upper_bound(a, ext) for a in alphas])
    sigma = np.repeat(sig[:, None], omegas.size, axis=1)
    return SpectralScan({"alpha": alphas, "omega": omegas}, rho=rho,
                        sigma=sigma, meta={"n": p.n, "d": p.d, "q": p.spec.q,
                                           "scheme": scheme})


def reynolds_curve(spec, q_grid, omega_c=OMEGA_C, points=OMEGA_POINTS,
                   threads=1):
    """``rho(K)`` (max over the frequency grid) and ``sigma(qh/2)`` per ``q``.

    The shift follows ``alpha = qh/2`` at every point; ``meta['reynolds']``
    holds the matching mesh Reynolds numbers.
    """
    qs = np.asarray(q_grid, dtype=float)
    if qs.size == 0:
        raise ValueError("q grid must be non-empty")
    rho, sigma = [], []
    for q in qs:
        p = build_problem(spec.with_(q=float(q), alpha=None))
        rho.append(omega_sweep(p, p.alpha, omega_c, points,
                               threads=threads).rho_max)
        sigma.append(sigma_for_problem(p))
    h = spec.h
    return SpectralScan({"q": qs}, rho=np.array(rho), sigma=np.array(sigma),
                        meta={"n": spec.n, "d": spec.d, "omega_c": omega_c,
                              "reynolds": (qs * h / 2).tolist()})


# --- norm equivalence ---------------------------------------------------

def triple_norm_check(v, alpha, p=None, bscale=None):
    """Time- and frequency-domain norms of ``(alpha I + B d/dt + S) v``.

    `v` is a waveform sampled at ``t_j = j dt`` that vanishes outside the
    sampled window (so ``v_{-1} = 0``).  The time norm applies a backward
    difference; the frequency norm applies ``alpha + i omega_k b + S`` to
    the DFT at ``omega_k = 2 pi k/(N dt)``.  By Parseval the two agree up
    to the difference between ``i omega`` and ``(1 - exp(-i omega dt))/dt``,
    which is ``O(dt)`` for smooth `v`.

    ``S`` comes from `p` (zero when `p` is None); ``B = b I`` with `b` from
    `bscale`, else ``p.Bscale``, else 0.
    """
    lv = np.asarray(v.levels, dtype=np.complex128)
    dt = v.dt
    N = lv.shape[0]
    b = bscale if bscale is not None else (p.Bscale if p is not None else 0.0)
    skew = (lambda x: p.S.matvec(x)) if p is not None else (lambda x: 0.0 * x)

    prev = np.vstack([np.zeros_like(lv[:1]), lv[:-1]])
    tv = alpha * lv + b * (lv - prev) / dt + skew(lv)
    time_norm = math.sqrt(dt * float(np.sum(np.abs(tv) ** 2)))

    V = np.fft.fft(lv, axis=0)
    w = 2.0 * np.pi * np.fft.fftfreq(N, d=dt)
    fv = (alpha + 1j * w * b)[:, None] * V + skew(V)
    freq_norm = math.sqrt(dt / N * float(np.sum(np.abs(fv) ** 2)))
    return time_norm, freq_norm


def contraction_factors(p, alpha=None, sweeps=10):
    """Per-sweep reduction of the WR-HSS error in the time-domain triple norm.

    Runs `sweeps` standard WR-HSS sweeps on one window from the constant
    initial guess and returns ``|||e_{k+1}||| / |||e_k|||`` with
    ``e_k = x^{(k)} - x`` and the norm of `triple_norm_check`.  This is a
    discrete stand-in for the continuous-time contraction by ``sigma(alpha)``;
    the backward difference adds an ``O(dt)`` perturbation.
    """
    alpha = p.alpha if alpha is None else alpha
    levels = p.spec.levels_per_window
    scheme = WrHss(p, alpha)
    f = p.forcing(0, levels)
    ref = reference_solve(p, levels)
    x = Waveform.constant(p.x0, levels, p.dt)
    norms = []
    for _ in range(sweeps + 1):
        e = Waveform(x.levels - ref.levels, p.dt)
        norms.append(triple_norm_check(e, alpha, p)[0])
        x = scheme.sweep(x, f)
    norms = np.array(norms)
    return norms[1:] / norms[:-1]
