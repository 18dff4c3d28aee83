"""Command-line surface: validate, eigen, simulate, sweep, verify.

Exit codes: 0 success/verified, 1 verification or constraint failure,
2 usage or parse error. The residual tolerance comes from --tol, falling
back to the TROPICA_TOL environment variable, then 1e-9.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import dynamics, spectral
from .model import (
    CONVENTIONS,
    EV,
    ConfigError,
    InvalidConfig,
    TrafficConfig,
    allocate,
    derive,
    parse_config,
    validate,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class DiagramPoint:
    """One sample of the fundamental diagram lambda(d)."""

    d: float
    region: str
    lambdas: tuple[float, ...]
    lambda_corollary: float | None
    d1: float
    d2: float
    r: float


def sweep_points(n: int, m: int, points: int, convention: str = EV) -> list[DiagramPoint]:
    """Evaluate the eigenvalue set on a uniform density grid over [0, 1]."""
    if points < 2:
        raise ValueError("points must be >= 2")
    rows = []
    for i in range(points):
        d = i / (points - 1)
        params = derive(allocate(n, m, d, convention))
        lambdas = tuple(lam for lam, _ in spectral.eigen_set(params))
        corollary = spectral.lambda_nonneg(params) if params.r >= 0.5 else None
        region = spectral.classify_region(params)
        rows.append(
            DiagramPoint(d, region.label, lambdas, corollary, params.d1, params.d2, params.r)
        )
    return rows


SWEEP_HEADER = "d,region,lambda_corollary,lambda_count,lambda_1,lambda_2,lambda_3,d1,d2,r"


def write_sweep_csv(rows: list[DiagramPoint], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(SWEEP_HEADER + "\n")
        for row in rows:
            lams = [f"{lam:.15g}" for lam in row.lambdas]
            assert len(lams) <= 3, "at most three eigenvalues per density"
            lams += [""] * (3 - len(lams))
            corollary = "" if row.lambda_corollary is None else f"{row.lambda_corollary:.15g}"
            handle.write(
                f"{row.d:.15g},{row.region},{corollary},{len(row.lambdas)},"
                f"{lams[0]},{lams[1]},{lams[2]},"
                f"{row.d1:.15g},{row.d2:.15g},{row.r:.15g}\n"
            )


def _tolerance(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("TROPICA_TOL")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            print(f"warning: ignoring non-numeric TROPICA_TOL={env!r}", file=sys.stderr)
    return DEFAULT_TOL


def _load_config(path: str) -> TrafficConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def _read_vector(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as handle:
        tokens = handle.read().replace(",", " ").split()
    return np.array([float(t) for t in tokens])


def _print_params(params) -> None:
    print(f"n = {params.n}, m = {params.m}")
    print(f"d = {params.d:.15g}")
    print(f"r = {params.r:.15g}, rho = {params.rho:.15g}")
    print(f"d1 = {params.d1:.15g}, d2 = {params.d2:.15g}")
    print(f"b_n = {params.b_n:.15g}, bbar_n = {params.bbar_n:.15g}")
    print(f"b_m = {params.b_m:.15g}, bbar_m = {params.bbar_m:.15g}")


def _cmd_validate(args) -> int:
    config = _load_config(args.config)
    print("config ok")
    _print_params(derive(config))
    return 0


def _cmd_eigen(args) -> int:
    tol = _tolerance(args)
    config = _load_config(args.config)
    params = derive(config)
    region = spectral.classify_region(params)
    print(f"region = {region.label} [{region.lo:.15g}, {region.hi:.15g})")
    worst = 0.0
    for lam, regime in spectral.eigen_set(params):
        reduced = spectral.reduced_eigenvector(params, regime)
        print(f"lambda = {lam:.15g} ({regime.value})")
        print(
            "  reduced x(1, n, n+1, n+m) = "
            + ", ".join(f"{v:.15g}" for v in reduced.vector)
        )
        full = spectral.extend_full(config, reduced)
        if args.full:
            print("  full x = " + ", ".join(f"{v:.15g}" for v in full.x))
        residuals = {
            "S": spectral.residual_reduced(config, reduced),
            "SS": spectral.residual_simplified(config, lam, full.x),
            "EV": spectral.residual_full(config, lam, full.x),
        }
        if lam > 0.0:
            z = spectral.z_transform(reduced, config.m, require_positive=True)
            residuals["SZ"] = spectral.residual_zshift(params, lam, z)
        worst = max(worst, max(residuals.values()))
        if args.verify:
            line = ", ".join(f"{name}={value:.3g}" for name, value in residuals.items())
            print(f"  residuals: {line}")
    if worst > tol:
        print(f"residual check FAILED: {worst:.3g} > {tol:.3g}", file=sys.stderr)
        return 1
    return 0


def _cmd_simulate(args) -> int:
    tol = _tolerance(args)
    config = _load_config(args.config)
    size = config.n + config.m
    pair = None
    if args.init == "zero":
        x0 = np.zeros(size)
    elif args.init == "eigen":
        if config.convention != EV:
            print("--init eigen requires the EV junction convention", file=sys.stderr)
            return 2
        params = derive(config)
        lam, regime = spectral.eigen_set(params)[0]
        pair = spectral.extend_full(config, spectral.reduced_eigenvector(params, regime))
        x0 = np.array(pair.x)
    else:
        if args.init_file is None:
            print("--init file requires --init-file PATH", file=sys.stderr)
            return 2
        x0 = _read_vector(args.init_file)
        if x0.shape != (size,):
            print(f"initial state must have {size} entries, got {x0.size}", file=sys.stderr)
            return 2

    traj = dynamics.simulate(config, x0, args.steps)
    dynamics.write_trajectory_csv(traj, args.out)
    print(f"wrote {len(traj.states)} states to {args.out}")

    window = args.window if args.window is not None else max(1, args.steps // 2)
    if 1 <= window < len(traj.states):
        summary = dynamics.growth_rate(traj, window)
        print(
            f"growth over last {window} steps: min={summary.lo:.15g} "
            f"mean={summary.mean:.15g} max={summary.hi:.15g}"
        )
    if pair is not None:
        deviation = dynamics.linearity_check(config, pair, args.steps)
        print(f"linearity deviation = {deviation:.3g} (lambda = {pair.lam:.15g})")
        if deviation > tol:
            print(f"linearity FAILED: {deviation:.3g} > {tol:.3g}", file=sys.stderr)
            return 1
    return 0


def _cmd_sweep(args) -> int:
    if args.points < 2:
        print("--points must be >= 2", file=sys.stderr)
        return 2
    try:
        rows = sweep_points(args.n, args.m, args.points, args.convention)
    except InvalidConfig as exc:
        print(f"bad sweep parameters: {exc}", file=sys.stderr)
        return 2
    write_sweep_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    tol = _tolerance(args)
    config = _load_config(args.config)
    params = derive(config)
    vector = _read_vector(args.x)
    size = config.n + config.m
    expected = size if args.system in ("EV", "SS") else 4
    if vector.shape != (expected,):
        print(
            f"system {args.system} needs a vector of length {expected}, got {vector.size}",
            file=sys.stderr,
        )
        return 2
    lam = getattr(args, "lambda")
    if args.system == "EV":
        residual = spectral.residual_full(config, lam, vector)
    elif args.system == "SS":
        residual = spectral.residual_simplified(config, lam, vector)
    elif args.system == "S":
        pair = spectral.ReducedEigenpair(lam, *vector, regime=spectral.Regime.FREE_FLOW)
        residual = spectral.residual_reduced(config, pair)
    else:
        z = spectral.ZVector(*vector)
        residual = spectral.residual_zshift(params, lam, z)
    print(f"residual({args.system}) = {residual:.15g}")
    if residual > tol:
        print(f"verification FAILED: {residual:.3g} > {tol:.3g}", file=sys.stderr)
        return 1
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropica",
        description="Min-plus junction dynamics: eigenvalues, simulation, fundamental diagrams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p):
        p.add_argument("--tol", type=float, default=None, help="residual tolerance (overrides TROPICA_TOL)")

    p_val = sub.add_parser("validate", help="check a config file and print derived quantities")
    p_val.add_argument("config")
    add_tol(p_val)
    p_val.set_defaults(func=_cmd_validate)

    p_eig = sub.add_parser("eigen", help="eigenvalue set, eigenvectors and residuals")
    p_eig.add_argument("config")
    p_eig.add_argument("--full", action="store_true", help="also print full eigenvectors")
    p_eig.add_argument("--verify", action="store_true", help="print residuals of all systems")
    add_tol(p_eig)
    p_eig.set_defaults(func=_cmd_eigen)

    p_sim = sub.add_parser("simulate", help="run the dynamics and export a trajectory CSV")
    p_sim.add_argument("config")
    p_sim.add_argument("--steps", type=int, default=100)
    p_sim.add_argument("--init", choices=("zero", "eigen", "file"), default="zero")
    p_sim.add_argument("--init-file", default=None)
    p_sim.add_argument("--window", type=int, default=None, help="growth estimation window")
    p_sim.add_argument("--out", default="trajectory.csv")
    add_tol(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_swp = sub.add_parser("sweep", help="fundamental diagram lambda(d) as CSV")
    p_swp.add_argument("--n", type=int, required=True)
    p_swp.add_argument("--m", type=int, required=True)
    p_swp.add_argument("--points", type=int, required=True)
    p_swp.add_argument("--convention", choices=CONVENTIONS, default=EV)
    p_swp.add_argument("--out", default="sweep.csv")
    add_tol(p_swp)
    p_swp.set_defaults(func=_cmd_sweep)

    p_ver = sub.add_parser("verify", help="residual of a user-supplied (lambda, x) pair")
    p_ver.add_argument("config")
    p_ver.add_argument("--lambda", type=float, required=True)
    p_ver.add_argument("--x", required=True, help="file with the vector entries")
    p_ver.add_argument("--system", choices=("EV", "SS", "S", "SZ"), required=True)
    add_tol(p_ver)
    p_ver.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InvalidConfig as exc:
        for violation in exc.violations:
            print(f"violation: {violation}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
