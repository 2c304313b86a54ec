import numpy as np
import pytest

from conftest import random_complex
from wrhss.linalg import Tridiagonal
from wrhss.problem import DiscreteProblem, ProblemSpec, build_problem
from wrhss.schemes import Direct, WrHss
from wrhss.timeloop import (ConvolutionKernel, Waveform, apply_convolution,
                            reference_solve, residual, round_half_up,
                            run_windowed, sequence_metrics, sequence_norm)


class _Scalar:
    """1x1 operator ``c``."""

    def __init__(self, c):
        self.c = c

    def matvec(self, x):
        return self.c * np.asarray(x, dtype=np.complex128)


def _block_oracle(p, levels):
    """Monolithic solve of the block lower-bidiagonal system."""
    r = p.r
    B = p.Bscale * np.eye(r)
    L0, L1 = B / p.dt + p.A.todense(), -B / p.dt
    big = np.zeros((levels * r, levels * r), dtype=complex)
    for j in range(levels):
        big[j * r:(j + 1) * r, j * r:(j + 1) * r] = L0
        if j:
            big[j * r:(j + 1) * r, (j - 1) * r:j * r] = L1
    rhs = p.forcing(0, levels)[1:].copy()
    rhs[0] -= L1 @ p.x0
    return np.linalg.solve(big, rhs.ravel()).reshape(levels, r)


def test_identity_kernel():
    x = Waveform(np.arange(6.0).reshape(3, 2), 0.1)
    k = ConvolutionKernel(_Scalar(1.0), _Scalar(0.0))
    np.testing.assert_array_equal(apply_convolution(k, x).levels, x.levels)


def test_scalar_kernel():
    x = Waveform(np.ones((3, 1)), 1.0)
    out = apply_convolution(ConvolutionKernel(_Scalar(2), _Scalar(-1)), x)
    np.testing.assert_array_equal(out.levels[1:], [[1], [1]])


def test_convolution_against_dense_blocks(rng):
    p = build_problem(ProblemSpec(d=1, n=5, q=30, dt=0.01))
    x = Waveform(random_complex(rng, 4, 5), p.dt)
    k = ConvolutionKernel.backward_euler(p)
    L0 = p.Bscale / p.dt * np.eye(5) + p.A.todense()
    L1 = -p.Bscale / p.dt * np.eye(5)
    lv = x.levels
    expect = np.array([L0 @ lv[j] + L1 @ lv[j - 1] for j in range(1, 4)])
    np.testing.assert_allclose(apply_convolution(k, x).levels[1:], expect,
                               atol=1e-12)
    f = random_complex(rng, 4, 5)
    np.testing.assert_allclose(residual(k, x, f), f[1:] - expect, atol=1e-12)


def test_sequence_norms():
    assert sequence_norm([[3.0, 4.0]]) == 5.0
    m = sequence_metrics(np.array([[0, 0], [3, 4.0]]), np.zeros((2, 2)))
    assert m.norm2 == 5.0 and m.norm_inf == 4.0 and m.err is None
    x = np.ones((3, 2))
    assert sequence_metrics(x, x).err == 0.0
    with pytest.raises(ValueError):
        sequence_metrics(np.ones((2, 2)), np.ones((3, 2)))


def test_metrics_res_uses_given_residual(rng):
    r = random_complex(rng, 3, 4)
    m = sequence_metrics(np.ones((4, 4)), np.ones((4, 4)), r0norm=2.0,
                         resid=r)
    assert m.res == pytest.approx(np.sqrt(np.sum(np.abs(r) ** 2)) / 2.0)


def test_scalar_toy_reference():
    # B = 1, A = 1, dt = 1, x0 = 1; the manufactured forcing -B + A is zero,
    # so (1 + 1) x1 = x0 gives x1 = 1/2
    one = Tridiagonal.constant(1, 0.0, 1.0, 0.0)
    p = DiscreteProblem(spec=ProblemSpec(d=1, n=1, dt=1.0), h=0.5, Re=0.0,
                        Bscale=1.0, A=one, H=one, S=one.scaled(0.0))
    np.testing.assert_array_equal(p.forcing(0, 2), 0.0)
    x = reference_solve(p, 2)
    np.testing.assert_allclose(x.levels[:, 0], [1.0, 0.5, 0.25])


@pytest.mark.parametrize("d", [1, 2])
def test_reference_matches_block_oracle(d):
    p = build_problem(ProblemSpec(d=d, n=4, q=45.0, dt=1e-2))
    ref = reference_solve(p, 3)
    np.testing.assert_allclose(ref.levels[1:], _block_oracle(p, 3),
                               atol=1e-11)


@pytest.mark.parametrize("d", [1, 2])
def test_reference_reproduces_forcing(d):
    p = build_problem(ProblemSpec(d=d, n=7, q=300.0, dt=1e-3))
    ref = reference_solve(p, 6)
    k = ConvolutionKernel.backward_euler(p)
    f = p.forcing(0, 6)
    assert np.max(np.abs(residual(k, ref, f))) <= 1e-11 * np.max(np.abs(f))


def test_backward_euler_first_order():
    errs = []
    for dt in (0.02, 0.01, 0.005):
        p = build_problem(ProblemSpec(d=1, n=8, q=10.0, dt=dt))
        levels = int(round(0.2 / dt))
        ref = reference_solve(p, levels)
        errs.append(np.max(np.abs(ref.levels[-1] - p.exact(0.2))))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 0.9) and np.all(rates < 1.1)


def test_round_half_up():
    assert round_half_up(2.5) == 3 and round_half_up(2.49) == 2
    assert round_half_up(86.0) == 86


def test_one_window_equals_unwindowed_sweeps():
    p = build_problem(ProblemSpec(d=1, n=16, q=200.0, dt=1e-3,
                                  levels_per_window=6, tolerance=1e-9))
    scheme = WrHss(p)
    rep = run_windowed(p, scheme)
    win = scheme.solve_window(p.x0, 0, 6, 1e-9, 7000)
    np.testing.assert_array_equal(rep.waveform.levels, win.waveform.levels)
    assert rep.it == win.iterations


def test_window_continuity_and_agreement():
    base = dict(d=1, n=16, q=200.0, dt=1e-3, tolerance=1e-8)
    pw = build_problem(ProblemSpec(levels_per_window=4, windows=3, **base))
    scheme = WrHss(pw)
    rep = run_windowed(pw, scheme)
    # continuity: window 2 started from the last level of window 1
    w2 = scheme.solve_window(rep.waveform.levels[4], 4, 4, 1e-8, 7000)
    np.testing.assert_array_equal(w2.waveform.levels, rep.waveform.levels[4:9])
    pu = build_problem(ProblemSpec(levels_per_window=12, windows=1, **base))
    one = run_windowed(pu, WrHss(pu))
    a, b = rep.waveform.levels[-1], one.waveform.levels[-1]
    assert np.linalg.norm(a - b) <= 10 * 1e-8 * np.linalg.norm(b)


def test_direct_run_has_zero_error():
    p = build_problem(ProblemSpec(d=2, n=6, levels_per_window=3, windows=2))
    rep = run_windowed(p, Direct(p))
    assert rep.err == 0.0 and rep.it == 0


def test_report_keys():
    p = build_problem(ProblemSpec(d=1, n=8, q=50.0, dt=1e-3))
    doc = run_windowed(p, WrHss(p)).to_dict()
    assert set(doc) == {"scheme", "d", "n", "q", "dt", "levels", "windows",
                        "alpha", "it", "err", "res", "wall_seconds", "capped",
                        "per_window"}
