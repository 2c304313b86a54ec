# %% [markdown]
# # Parameter sensitivity: feasible alpha vs feasible tau
#
# A parameter value is feasible when one window of 5 levels reaches
# RES < 0.05 within 7000 sweeps.  The grids here are coarse; the CLI
# ``sweep`` command runs the full default grids.

# %%
import numpy as np

from wrhss import ProblemSpec, build_problem
from wrhss.cli import classify, feasible_interval

p = build_problem(ProblemSpec(d=2, n=63, q=2000.0, dt=1e-4,
                              levels_per_window=5, windows=1, tolerance=0.05))

# %%
taus = np.arange(1, 41) / 64
tau_ok = [classify(p, "tau", t, 0.05, 7000)["feasible"] for t in taus]
alphas = np.linspace(0.25, 100.0, 41)
alpha_ok = [classify(p, "alpha", a, 0.05, 7000)["feasible"] for a in alphas]

# %%
t_lo, t_hi, _ = feasible_interval(taus, tau_ok)
a_lo, a_hi, at_edge = feasible_interval(alphas, alpha_ok)
print(f"tau   feasible on [{t_lo:.4f}, {t_hi:.4f}]")
print(f"alpha feasible on [{a_lo:.4f}, {a_hi:.4f}{'+' if at_edge else ''}]")
print(f"length ratio {(a_hi - a_lo) / (t_hi - t_lo):.0f}")
