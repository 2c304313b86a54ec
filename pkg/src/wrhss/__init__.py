"""Waveform relaxation with Hermitian/skew-Hermitian splitting (WR-HSS).

Solvers for ``B x' + A x = f`` from centered-difference convection-diffusion
discretizations, the competing WR-SOR and DGMRES schemes, fast sine
transform solvers and frequency-domain convergence analysis.
"""
from .analysis import (SpectralScan, bad_bound_sigma_hat, cayley_factor,
                       freq_iteration_matrix, omega_sweep, optimal_alpha,
                       reynolds_curve, sigma_upper_bound, surface_scan,
                       triple_norm_check)
from .eig import complex_eigenvalues, spectral_radius
from .krylov import gmres_m
from .problem import ProblemSpec, build_problem, manufactured_forcing
from .schemes import (dgmres_solve, direct_solve, hss_splitting,
                      one_step_wr_sweep, sor_splitting, two_step_wr_sweep,
                      wr_hss_solve, wr_sor_solve)
from .timeloop import (Waveform, apply_convolution, reference_solve,
                       run_windowed, sequence_metrics)
from .transforms import (solve_shifted_hermitian,
                         solve_shifted_skew_hermitian)

__all__ = [
    "ProblemSpec", "SpectralScan", "Waveform", "apply_convolution",
    "bad_bound_sigma_hat", "build_problem", "cayley_factor",
    "complex_eigenvalues", "dgmres_solve", "direct_solve",
    "freq_iteration_matrix", "gmres_m", "hss_splitting",
    "manufactured_forcing", "omega_sweep", "one_step_wr_sweep",
    "optimal_alpha", "reference_solve", "reynolds_curve", "run_windowed",
    "sequence_metrics", "sigma_upper_bound", "solve_shifted_hermitian",
    "solve_shifted_skew_hermitian", "sor_splitting", "spectral_radius",
    "surface_scan", "triple_norm_check", "two_step_wr_sweep",
    "wr_hss_solve", "wr_sor_solve",
]
