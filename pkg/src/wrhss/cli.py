"""Batch front-end: ``wrhss {analyze,solve,sweep,bench} --config run.json``.

A run is described by one JSON document (see `RunConfig`); tabular output
is CSV, reports are JSON.  Exit status is 0 on success, 2 for a bad
configuration and 3 for a runtime fault.  A diverged or capped iteration
is a result, not a fault.
"""
from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import analysis
from .problem import ProblemSpec, build_problem
from .schemes import make_scheme
from .timeloop import DEFAULT_CAP, reference_solve, run_windowed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

SCHEME_NAMES = ("wr-hss", "wr-hss-reversed", "wr-hss-bad", "wr-sor",
                "dgmres", "direct")
CSV_COLUMNS = ("omega", "alpha", "q", "rho", "sigma")

# default feasibility grids: tau on (0, 3] step 1/512, alpha on (0, 100]
# step 125/512
TAU_STEP, TAU_MAX = 1.0 / 512, 3.0
ALPHA_STEP, ALPHA_MAX = 125.0 / 512, 100.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs besides the subcommand and output directory.

    ``problem`` holds the `ProblemSpec` fields.  ``q_values`` lists the
    convection coefficients of an analyze run, ``sizes`` the grid sizes of a
    bench run.  A sweep varies ``parameter`` (``alpha`` for WR-HSS, ``tau``
    for WR-SOR) over ``grid`` (the default grid when empty) and classifies
    each value with tolerance ``sweep_tolerance``.
    """

    problem: ProblemSpec = field(default_factory=ProblemSpec)
    scheme: str = "wr-hss"
    schemes: tuple = ("wr-hss", "wr-sor", "dgmres")
    sizes: tuple = ()
    q_values: tuple = ()
    omega_c: float = analysis.OMEGA_C
    omega_points: int = analysis.OMEGA_POINTS
    alpha_grid: tuple = ()
    surface_omega_points: int = 81
    reynolds_q: tuple = ()
    parameter: str = "alpha"
    grid: tuple = ()
    sweep_tolerance: float = 0.05
    cap: int = DEFAULT_CAP
    seed: int | None = None

    def __post_init__(self):
        bad = [s for s in (self.scheme, *self.schemes) if s not in SCHEME_NAMES]
        if bad:
            raise ConfigError(f"unknown scheme(s) {bad}; known: "
                              f"{list(SCHEME_NAMES)}")
        if self.parameter not in ("alpha", "tau"):
            raise ConfigError("sweep parameter must be 'alpha' or 'tau'")
        if not self.omega_c > 0 or self.omega_points < 1:
            raise ConfigError("need omega_c > 0 and omega_points >= 1")
        if self.surface_omega_points < 1:
            raise ConfigError("surface_omega_points must be at least 1")
        if self.cap < 1:
            raise ConfigError("cap must be at least 1")
        if not 0 < self.sweep_tolerance < 1:
            raise ConfigError("sweep_tolerance must lie in (0, 1)")
        if any(not v > 0 for v in self.grid):
            raise ConfigError("sweep grid values must be positive")
        if any(not v > 0 for v in self.alpha_grid):
            raise ConfigError("alpha_grid values must be positive")
        if any(int(v) < 1 for v in self.sizes):
            raise ConfigError("sizes must be positive")
        if self.seed is not None and not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys {unknown}")
        kw = dict(data)
        prob = kw.pop("problem", {})
        if not isinstance(prob, dict):
            raise ConfigError("'problem' must be a JSON object")
        pknown = {f.name for f in fields(ProblemSpec)}
        punknown = sorted(set(prob) - pknown)
        if punknown:
            raise ConfigError(f"unknown problem keys {punknown}")
        try:
            spec = ProblemSpec(**prob)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid problem: {exc}") from exc
        for key in ("schemes", "sizes", "q_values", "alpha_grid",
                    "reynolds_q", "grid"):
            if key in kw:
                if not isinstance(kw[key], list):
                    raise ConfigError(f"'{key}' must be a list")
                kw[key] = tuple(kw[key])
        try:
            return cls(problem=spec, **kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self):
        out = asdict(self)
        for key, val in out.items():
            if isinstance(val, tuple):
                out[key] = list(val)
        return out


def load_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


# --- output helpers -------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c)) for c in columns])


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


def environment():
    return {"python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "platform": platform.platform()}


# --- commands -------------------------------------------------------------

def cmd_analyze(cfg, out, threads=1):
    """Bound/spectral-radius summary per ``q`` plus CSV scans."""
    if not cfg.q_values:
        raise ConfigError("analyze needs a non-empty q_values list")
    base = cfg.problem
    summary, scan_rows = [], []
    for q in cfg.q_values:
        p = build_problem(base.with_(q=float(q)))
        sw = analysis.omega_sweep(p, p.alpha, cfg.omega_c, cfg.omega_points,
                                  threads=threads)
        sigma = analysis.sigma_for_problem(p)
        summary.append({"q": float(q), "alpha": p.alpha, "sigma": sigma,
                        "rho_min": sw.rho_min, "rho_max": sw.rho_max,
                        "flagged": len(sw.scan.flagged)})
        for row in sw.scan.rows():
            row.update(alpha=p.alpha, q=float(q), sigma=sigma)
            scan_rows.append(row)
    write_csv(out / "summary.csv",
              ("q", "alpha", "sigma", "rho_min", "rho_max", "flagged"),
              summary)
    write_csv(out / "omega_scan.csv", CSV_COLUMNS, scan_rows)

    if cfg.alpha_grid:
        rows = []
        omegas = analysis.omega_grid(cfg.omega_c, cfg.surface_omega_points)
        for q in cfg.q_values:
            p = build_problem(base.with_(q=float(q)))
            scan = analysis.surface_scan(p, cfg.alpha_grid, omegas,
                                         threads=threads)
            for row in scan.rows():
                row["q"] = float(q)
                rows.append(row)
        write_csv(out / "surface_scan.csv", CSV_COLUMNS, rows)
    if cfg.reynolds_q:
        scan = analysis.reynolds_curve(base, cfg.reynolds_q, cfg.omega_c,
                                       cfg.omega_points, threads=threads)
        write_csv(out / "reynolds_curve.csv", CSV_COLUMNS, scan.rows())
    write_json(out / "summary.json", {"rows": summary,
                                      "config": cfg.to_dict()})
    return summary


def _scheme_kwargs(p, name):
    return {"alpha": p.alpha if name.startswith("wr-hss") else None,
            "tau": p.spec.tau, "eta": p.spec.gmres_tol,
            "m": p.spec.gmres_restart}


def run_scheme(p, name, cap, reference=None):
    scheme = make_scheme(p, name, **_scheme_kwargs(p, name))
    if name == "direct" and reference is None:
        reference = reference_solve(p, p.spec.total_levels)
    return run_windowed(p, scheme, p.spec.tolerance, cap, reference)


def cmd_solve(cfg, out, threads=1):
    p = build_problem(cfg.problem)
    rep = run_scheme(p, cfg.scheme, cfg.cap)
    doc = rep.to_dict()
    write_json(out / "report.json", doc)
    return doc


def default_grid(parameter):
    step, top = (TAU_STEP, TAU_MAX) if parameter == "tau" else (ALPHA_STEP,
                                                               ALPHA_MAX)
    # multiples of the step inside (0, top]
    return step * np.arange(1, int(np.floor(top / step + 1e-9)) + 1)


def classify(p, parameter, value, eps, cap):
    """Run one window set at one parameter value; feasible iff RES < eps."""
    if parameter == "alpha":
        scheme = make_scheme(p, "wr-hss", alpha=float(value))
    else:
        scheme = make_scheme(p, "wr-sor", tau=float(value))
    res_all = []
    x0, its, ok = p.x0, [], True
    L = p.spec.levels_per_window
    for w in range(p.spec.windows):
        r = scheme.solve_window(x0, w * L, L, eps, cap)
        its.append(r.iterations)
        res_all.append(r.res)
        ok = ok and not r.capped and not r.diverged and r.res < eps
        if not ok:
            break
        x0 = r.waveform.levels[-1]
    return {"parameter": parameter, "value": float(value), "feasible": ok,
            "it": float(np.mean(its)), "res": float(res_all[-1])}


def feasible_interval(values, flags):
    """Longest run of consecutive feasible grid values as ``(lo, hi)``.

    Returns ``None`` when nothing is feasible.  Ties go to the earliest run.
    """
    best, start = None, None
    for i, ok in enumerate(list(flags) + [False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if best is None or i - start > best[1] - best[0] + 1:
                best = (start, i - 1)
            start = None
    if best is None:
        return None
    return float(values[best[0]]), float(values[best[1]]), best[1] == len(values) - 1


def cmd_sweep(cfg, out, threads=1):
    spec = cfg.problem.with_(tolerance=cfg.sweep_tolerance)
    p = build_problem(spec)
    grid = (np.asarray(cfg.grid, dtype=float) if cfg.grid
            else default_grid(cfg.parameter))
    if grid.size == 0:
        raise ConfigError("sweep grid is empty")
    rows = analysis.parallel_map(
        lambda v: classify(p, cfg.parameter, v, cfg.sweep_tolerance, cfg.cap),
        grid, threads)
    write_csv(out / "feasibility.csv",
              ("parameter", "value", "feasible", "it", "res"), rows)
    iv = feasible_interval(grid, [r["feasible"] for r in rows])
    doc = {"parameter": cfg.parameter, "lower": None, "upper": None,
           "upper_label": None, "feasible_points": int(sum(r["feasible"]
                                                           for r in rows))}
    if iv is not None:
        lo, hi, at_edge = iv
        doc.update(lower=lo, upper=hi,
                   upper_label=f"{hi:g}+" if at_edge else f"{hi:.4f}")
    write_json(out / "interval.json", doc)
    return doc


BENCH_COLUMNS = ("scheme", "n", "it", "err", "res", "wall_seconds", "capped",
                 "error")


def cmd_bench(cfg, out, threads=1):
    sizes = cfg.sizes or (cfg.problem.n,)
    cells = [(int(n), s) for n in sizes for s in cfg.schemes]
    refs = {}

    def reference(n):
        if n not in refs:
            p = build_problem(cfg.problem.with_(n=n))
            refs[n] = reference_solve(p, p.spec.total_levels)
        return refs[n]

    # references first, so that concurrently run cells share them
    for n in sorted({n for n, _ in cells}):
        reference(n)

    def run(cell):
        n, name = cell
        row = dict.fromkeys(BENCH_COLUMNS)
        row.update(scheme=name, n=n)
        try:
            p = build_problem(cfg.problem.with_(n=n))
            rep = run_scheme(p, name, cfg.cap, refs[n])
            row.update(it=rep.it, err=rep.err, res=rep.res,
                       wall_seconds=rep.wall_seconds, capped=rep.capped)
        except Exception as exc:  # recorded per cell, run continues
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    rows = analysis.parallel_map(run, cells, threads)
    write_csv(out / "bench.csv", BENCH_COLUMNS, rows)
    write_json(out / "bench.json", {"rows": rows, "environment": environment(),
                                    "config": cfg.to_dict()})
    return rows


COMMANDS = {"analyze": cmd_analyze, "solve": cmd_solve, "sweep": cmd_sweep,
            "bench": cmd_bench}


def build_parser():
    ap = argparse.ArgumentParser(prog="wrhss", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run description")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=1,
                        help="concurrent grid cells / rows")
        sp.add_argument("--seed", type=int, default=None,
                        help="overrides the config seed")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = RunConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"wrhss: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        # nothing in the pipeline draws random numbers; the seed is fixed
        # anyway so that future randomized parts stay reproducible
        np.random.seed(0 if cfg.seed is None else cfg.seed % 2 ** 32)
        COMMANDS[args.command](cfg, out, args.threads)
    except ConfigError as exc:
        print(f"wrhss: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"wrhss: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
