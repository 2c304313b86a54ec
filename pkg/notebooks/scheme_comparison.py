# %% [markdown]
# # WR-HSS, WR-SOR and DGMRES on a 2-D problem
#
# A reduced version of the desk-scale comparison (n = 63 instead of 255)
# that runs in a few seconds.  ERR is measured against the exact
# backward-Euler solution, so it isolates the iteration error.

# %%
from wrhss import (ProblemSpec, build_problem, dgmres_solve, reference_solve,
                   wr_hss_solve, wr_sor_solve)

spec = ProblemSpec(d=2, n=63, q=2000.0, dt=1e-4, levels_per_window=5,
                   windows=5, tolerance=1e-5)
p = build_problem(spec)
ref = reference_solve(p, spec.total_levels)
print(f"h={p.h:.5f}  Re={p.Re:.3f}  alpha=qh/2={p.alpha:.3f}")

# %%
runs = {
    "wr-hss": wr_hss_solve(p, reference=ref),
    "wr-hss (bad)": wr_hss_solve(p, variant="bad", reference=ref),
    "dgmres": dgmres_solve(p, eta=1e-8, m=5, reference=ref),
}
for tau in (0.05, 0.2, 0.4):
    runs[f"wr-sor tau={tau}"] = wr_sor_solve(p, tau, reference=ref)
for name, rep in runs.items():
    err = "diverged" if rep.err is None else f"{rep.err:.2e}"
    print(f"{name:18s} IT={rep.it:5d}  ERR={err:>9s}  capped={rep.capped}")

# %% [markdown]
# WR-SOR is very sensitive to tau: small values crawl, values past the
# feasible range blow up within a couple of sweeps.  WR-HSS with the
# default alpha needs no tuning.
#
# The "bad" splitting is not slower here: its weak spot is at frequencies
# with omega h^2 comparable to alpha, far above what a 5-level window of
# this step resolves.
