"""Command-line front end: solve, simulate, analyze, and dump CSV artifacts.

Every subcommand reads a flat key=value config, runs one stage of the
pipeline, and writes plain CSV files into the output directory (never plots,
never binary blobs).  A manifest.csv records tool version, config hash, seed,
and wall time for provenance; all other files are bitwise reproducible from
(config, seed).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import efficiency_sweep, impact_surface, information_efficiency
from .config import (
    RunConfig,
    config_family,
    config_grid,
    config_hash,
    config_noise,
    load_config,
    with_seed,
)
from .equilibrium import equilibrium_demand, solve_alpha_star
from .kernel import build_canonical_kernel
from .model import prior_mixture
from .objective import foc_terms, zero_impact_basis
from .options import bl_decompose, bl_reconstruct, demand_signature
from .orderflow import pathwise_posterior, price_schedule, simulate_order_flow
from .posterior import binary_moments_quadrature, posterior_moments

OUTPUT_DIR_ENV = "ADKYLE_OUTPUT_DIR"


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _resolve_outdir(args, cfg: RunConfig) -> Path:
    out = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or cfg.output_dir
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(args) -> RunConfig:
    return with_seed(load_config(args.config), args.seed)


def _manifest(outdir: Path, cfg: RunConfig, command: str, t0: float) -> None:
    rows = [
        ("tool_version", __version__),
        ("command", command),
        ("config_hash", config_hash(cfg)),
        ("seed", cfg.seed),
        ("n_samples", cfg.n_samples),
        ("n_paths", cfg.n_paths),
        ("wall_time_s", f"{time.perf_counter() - t0:.3f}"),
        ("created_utc", datetime.now(timezone.utc).isoformat()),
    ]
    _write_csv(outdir / "manifest.csv", ["key", "value"], rows)


def _pipeline(cfg: RunConfig):
    grid = config_grid(cfg)
    noise = config_noise(cfg, grid)
    family = config_family(cfg, grid)
    kern = build_canonical_kernel(family, noise, grid)
    return grid, noise, family, kern


def _solved(cfg: RunConfig):
    grid, noise, family, kern = _pipeline(cfg)
    eq = solve_alpha_star(
        kern, n_samples=cfg.n_samples, seed=cfg.seed,
        phi_tol=cfg.phi_tol, width_tol=cfg.width_tol,
    )
    beta, w_star = equilibrium_demand(eq, kern, family)
    return grid, noise, family, kern, eq, beta, w_star


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    grid, noise, family, kern, eq, beta, w_star = _solved(cfg)

    rows = [
        ("alpha_star", eq.alpha_star),
        ("alpha_raw", eq.alpha_raw),
        ("c", eq.c),
        ("I", eq.I),
        ("phi_residual", eq.phi_residual),
        ("bracket_hi", eq.mc_meta["bracket_hi"]),
        ("n_doublings", eq.mc_meta["n_doublings"]),
        ("n_bisections", eq.mc_meta["n_bisections"]),
        ("n_samples", cfg.n_samples),
        ("seed", cfg.seed),
    ]
    _write_csv(outdir / "equilibrium.csv", ["key", "value"], rows)
    header = ["x"] + [f"w_{lab}" for lab in family.labels]
    _write_csv(
        outdir / "demand_surface.csv",
        header,
        ((grid.nodes[j], *w_star[:, j]) for j in range(grid.n)),
    )
    _manifest(outdir, cfg, "solve", t0)
    print(f"solve: alpha_star={eq.alpha_star:.6f} alpha_raw={eq.alpha_raw:.6f} "
          f"c={eq.c:.6f} I={eq.I} -> {outdir}")
    return 0


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    grid, noise, family, kern, eq, beta, w_star = _solved(cfg)
    s = args.signal
    if not 0 <= s < family.I:
        raise ValueError(f"adkyle.cli: --signal {s} out of range for I={family.I}")

    path_rows, price_rows, post_rows = [], [], []
    for pid in range(args.paths):
        path = simulate_order_flow(w_star[s], s, noise, grid, seed=cfg.seed + pid)
        post = pathwise_posterior(path, w_star, noise, grid)
        price = price_schedule(post.pi, family)
        path_rows.extend((pid, grid.nodes[j], path.y[j]) for j in range(grid.n))
        price_rows.extend((pid, grid.nodes[j], price[j]) for j in range(grid.n))
        post_rows.extend(
            (pid, family.labels[i], post.log_lik[i], post.pi[i]) for i in range(family.I)
        )
    _write_csv(outdir / "paths.csv", ["path_id", "x", "y"], path_rows)
    _write_csv(outdir / "pathwise_prices.csv", ["path_id", "x", "price"], price_rows)
    _write_csv(outdir / "pathwise_posterior.csv",
               ["path_id", "signal", "log_lik", "pi"], post_rows)
    _manifest(outdir, cfg, "simulate", t0)
    print(f"simulate: {args.paths} path(s) under signal {family.labels[s]} -> {outdir}")
    return 0


def cmd_impact(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    grid, noise, family, kern, eq, beta, w_star = _solved(cfg)

    mbar = prior_mixture(family)
    gw = grid.quad_weights
    mu = float(np.dot(gw * grid.nodes, mbar))
    sbar = float(np.sqrt(np.dot(gw * np.square(grid.nodes - mu), mbar)))
    lo = max(mu - 3.0 * sbar, grid.nodes[1])
    hi = min(mu + 3.0 * sbar, grid.nodes[-2])
    i_lo = min(max(int(round((lo - grid.x_min) / grid.h)), 1), grid.n - 2)
    i_hi = min(max(int(round((hi - grid.x_min) / grid.h)), 1), grid.n - 2)
    idx = np.unique(np.round(np.linspace(i_lo, i_hi, cfg.n_sub)).astype(int))
    points = grid.nodes[idx]
    values, errs = impact_surface(
        points, points, w_star, family, noise, grid,
        n_paths=cfg.n_paths, seed=cfg.seed, conditioned_on=cfg.conditioned_on,
    )
    rows = [
        (points[a], points[b], values[a, b], errs[a, b])
        for a in range(len(points))
        for b in range(len(points))
    ]
    _write_csv(outdir / "impact_kernel.csv", ["x", "y", "lambda", "std_err"], rows)
    _manifest(outdir, cfg, "impact", t0)
    print(f"impact: {len(points)}x{len(points)} kernel estimates -> {outdir}")
    return 0


def cmd_efficiency(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    rows = efficiency_sweep(n_samples=cfg.n_samples, master_seed=cfg.seed)
    _write_csv(
        outdir / "efficiency.csv",
        ["I", "alpha_star", "ie", "std_err", "n_samples", "seed"],
        ((r.I, r.alpha_star, r.ie, r.std_err, r.n_samples, r.seed) for r in rows),
    )
    _manifest(outdir, cfg, "efficiency", t0)
    summary = " ".join(f"I={r.I}:{r.ie:.4f}" for r in rows)
    print(f"efficiency: {summary} -> {outdir}")
    return 0


def cmd_options(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    grid, noise, family, kern, eq, beta, w_star = _solved(cfg)
    s = args.signal
    if not 0 <= s < family.I:
        raise ValueError(f"adkyle.cli: --signal {s} out of range for I={family.I}")

    mbar = prior_mixture(family)
    mu = float(np.dot(grid.quad_weights * grid.nodes, mbar))
    k0 = float(grid.nodes[min(max(int(round((mu - grid.x_min) / grid.h)), 1), grid.n - 2)])
    strip = bl_decompose(w_star[s], grid, k0)
    recon = bl_reconstruct(strip, grid)
    max_err = float(np.max(np.abs(recon - w_star[s])))

    rows = [("bond", "", strip.bond), ("underlying", "", strip.underlying),
            ("k0", "", strip.k0), ("max_recon_err", "", max_err)]
    rows += [("put", k, d) for k, d in zip(strip.put_strikes, strip.put_density)]
    rows += [("call", k, d) for k, d in zip(strip.call_strikes, strip.call_density)]
    _write_csv(outdir / "strip.csv", ["component", "strike", "value"], rows)
    _write_csv(
        outdir / "signatures.csv",
        ["signal", "signature"],
        ((family.labels[i], demand_signature(w_star[i], family, grid)) for i in range(family.I)),
    )
    _manifest(outdir, cfg, "options", t0)
    print(f"options: signal {family.labels[s]} k0={strip.k0:.4f} "
          f"max_recon_err={max_err:.2e} -> {outdir}")
    return 0


def cmd_verify_foc(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    grid, noise, family, kern, eq, beta, w_star = _solved(cfg)
    basis = zero_impact_basis(w_star, noise, grid)
    directions = [
        ("own_demand", w_star[0]),
        ("payoff_row", family.eta[0]),
        ("zero_impact", basis[0]),
    ]
    rows, ok = [], True
    for name, v in directions:
        rep = foc_terms(
            w_star[0], v, w_star, family, 0, noise, grid,
            n_paths=cfg.n_paths, seed=cfg.seed,
        )
        tol = 4.0 * rep.std_err_fd + 1e-6
        passed = abs(rep.diff) <= tol
        ok &= passed
        rows.append((name, rep.payoff_term, rep.adverse_selection_term, rep.impact_term,
                     rep.analytic_total, rep.fd_total, rep.fd_epsilon, rep.diff,
                     rep.std_err_diff, rep.std_err_fd, rep.n_paths,
                     "pass" if passed else "fail"))
        print(f"verify-foc[{name}]: analytic={rep.analytic_total:+.6e} "
              f"fd={rep.fd_total:+.6e} diff={rep.diff:+.2e} "
              f"({'pass' if passed else 'FAIL'})")
    _write_csv(
        outdir / "foc_report.csv",
        ["direction", "payoff_term", "adverse_selection_term", "impact_term",
         "analytic_total", "fd_total", "fd_epsilon", "diff", "std_err_diff",
         "std_err_fd", "n_paths", "status"],
        rows,
    )
    _manifest(outdir, cfg, "verify-foc", t0)
    return 0 if ok else 1


def cmd_kernel_dump(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    grid, noise, family, kern = _pipeline(cfg)
    rows = []
    for name, mat in (("K", kern.K), ("Q", kern.Q), ("L", kern.L), ("L_pinv", kern.L_pinv)):
        rows.extend(
            (name, i, j, mat[i, j]) for i in range(kern.I) for j in range(kern.I)
        )
    rows.append(("c", 0, 0, kern.c))
    rows.append(("exchangeable", 0, 0, int(kern.exchangeable)))
    rows.append(("rank_tol", 0, 0, kern.rank_tol))
    _write_csv(outdir / "kernel.csv", ["matrix", "row", "col", "value"], rows)
    _manifest(outdir, cfg, "kernel dump", t0)
    print(f"kernel dump: I={kern.I} c={kern.c:.6f} "
          f"exchangeable={kern.exchangeable} -> {outdir}")
    return 0


def cmd_posterior_probe(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args)
    outdir = _resolve_outdir(args, cfg)
    grid, noise, family, kern = _pipeline(cfg)
    I = family.I
    alpha_bar = args.alpha_bar
    mom = posterior_moments(alpha_bar, I, 0, n_samples=cfg.n_samples, seed=cfg.seed)
    rows = [("m1", i, mom.m1[i]) for i in range(I)]
    rows += [("std_err_m1", i, mom.std_err_m1[i]) for i in range(I)]
    rows.append(("qcq_diag", 0, mom.qcq_diag))
    rows.append(("n_samples", 0, mom.n_samples))
    if I == 2:
        phi1, phi2 = binary_moments_quadrature(alpha_bar)
        rows.append(("phi1_quadrature", 0, phi1))
        rows.append(("phi2_quadrature", 0, phi2))
    ie, se = information_efficiency(alpha_bar, I, n_samples=cfg.n_samples, seed=cfg.seed)
    rows.append(("information_efficiency", 0, ie))
    rows.append(("ie_std_err", 0, se))
    _write_csv(outdir / "posterior_probe.csv", ["quantity", "index", "value"], rows)
    _manifest(outdir, cfg, "posterior probe", t0)
    print(f"posterior probe: alpha_bar={alpha_bar} I={I} "
          f"m1_true={mom.m1[0]:.6f} -> {outdir}")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", required=True, help="flat key=value config file")
    p.add_argument("--seed", type=int, default=None, help="override mc.seed")
    p.add_argument("-o", "--output-dir", default=None,
                   help=f"override output dir (also {OUTPUT_DIR_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adkyle",
        description="Equilibrium engine and simulator for insider trading "
                    "across a continuum of state-contingent claims.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the equilibrium and dump the demand surface")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="simulate order-flow paths and pathwise prices")
    _add_common(p)
    p.add_argument("--signal", type=int, default=0, help="realized signal index")
    p.add_argument("--paths", type=int, default=3, help="number of paths to write")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("impact", help="estimate the cross-asset price-impact kernel")
    _add_common(p)
    p.set_defaults(func=cmd_impact)

    p = sub.add_parser("efficiency", help="information-efficiency sweep over signal counts")
    _add_common(p)
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("options", help="option-strip decomposition and demand signatures")
    _add_common(p)
    p.add_argument("--signal", type=int, default=0, help="signal row to decompose")
    p.set_defaults(func=cmd_options)

    p = sub.add_parser("verify-foc", help="check first-order conditions against finite differences")
    _add_common(p)
    p.set_defaults(func=cmd_verify_foc)

    p = sub.add_parser("kernel", help="kernel inspection")
    ksub = p.add_subparsers(dest="kernel_command", required=True)
    kd = ksub.add_parser("dump", help="dump K, Q, L, L_pinv and scalars to CSV")
    _add_common(kd)
    kd.set_defaults(func=cmd_kernel_dump)

    p = sub.add_parser("posterior", help="posterior inspection")
    psub = p.add_subparsers(dest="posterior_command", required=True)
    pp = psub.add_parser("probe", help="moments of the canonical posterior at alpha_bar")
    _add_common(pp)
    pp.add_argument("--alpha-bar", type=float, required=True)
    pp.set_defaults(func=cmd_posterior_probe)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
