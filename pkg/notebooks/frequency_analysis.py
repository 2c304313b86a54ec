# %% [markdown]
# # Frequency-domain behaviour of WR-HSS
#
# For the 1-D convection-diffusion operator with n = 64 we compare the
# omega-independent bound sigma(alpha) with the actual spectral radius of
# the per-frequency iteration matrix over |omega| <= 2000.  Use fewer
# frequencies than the acceptance run to keep this quick.

# %%
import numpy as np

from wrhss import ProblemSpec, build_problem, omega_sweep
from wrhss.analysis import bad_bound_sigma_hat, optimal_alpha, sigma_for_problem
from wrhss.problem import hermitian_extremes

# %%
for q in (1.0, 10.0, 100.0, 1000.0):
    p = build_problem(ProblemSpec(d=1, n=64, q=q))
    sw = omega_sweep(p, p.alpha, omega_c=2000.0, points=201)
    print(f"q={q:6g}  Re={p.Re:7.3f}  alpha={p.alpha:7.3f}  "
          f"sigma={sigma_for_problem(p):.4f}  "
          f"rho in ({sw.rho_min:.4f}, {sw.rho_max:.4f})")

# %% [markdown]
# The bound only depends on alpha and the Hermitian part, so the optimal
# value is the geometric mean of its extreme eigenvalues.

# %%
gmin, gmax = hermitian_extremes(1, 64)
a_star, s_star = optimal_alpha(gmin, gmax)
print(f"alpha* = {a_star:.6f}, sigma(alpha*) = {s_star:.6f}")
p = build_problem(ProblemSpec(d=1, n=64, q=100.0))
for a in (a_star / 10, a_star, 10 * a_star):
    print(f"  alpha={a:9.5f}  sigma={sigma_for_problem(p, a):.6f}")

# %% [markdown]
# Putting the time derivative with the Hermitian half loses the uniform
# bound: sigma_hat creeps towards 1 as |omega| grows.

# %%
p = build_problem(ProblemSpec(d=1, n=64, q=1000.0))
for w in np.logspace(1, 6, 6):
    print(f"omega={w:9.0f}  sigma_hat={bad_bound_sigma_hat(p, p.alpha, w):.6f}")
