"""Command-line front end: equilibrium curves, regime comparisons, ex-ante
probability grids, and simulation reports as CSV/JSON artifacts.

Every command writes a `<output>.manifest.json` next to its output recording
the command, the full parameter set, grid sizes, tolerances, and the library
version; re-running the same invocation reproduces every output byte for
byte. Exit codes: 0 success, 2 parameter validation, 3 solver convergence,
4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    diversity_region,
    ex_ante_p_common,
    ex_ante_p_diverse,
    pi_dagger_sensitivity,
    solve_pi_dagger,
)
from .common_eq import closed_form_common_uniform, solve_common_equilibria
from .core import (
    ConvergenceError,
    InvariantViolation,
    ParameterError,
    RegimeError,
    uniform_belief,
    uniform_loss,
    validate_params,
)
from .diverse_eq import closed_form_diverse_uniform, solve_alpha_beta, solve_diverse_threshold
from .extensions import (
    asymmetric_sensitivity,
    solve_asymmetric,
    solve_group_common,
    solve_group_diverse,
)
from .montecarlo import SimConfig, simulate


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip form
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(command: str, args: argparse.Namespace, outputs: list[Path]) -> None:
    params = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")
    }
    manifest = {
        "command": command,
        "parameters": params,
        "seed": params.get("seed"),
        "grid_sizes": {k: v for k, v in params.items() if "grid" in k or k in ("cells", "n_samples")},
        "tolerances": {k: v for k, v in params.items() if "tol" in k},
        "version": __version__,
        "outputs": [str(p) for p in outputs],
    }
    _write_json(Path(str(outputs[0]) + ".manifest.json"), manifest)


def _summary_path(out: Path) -> Path:
    return out.with_name(out.stem + ".summary.json")


def cmd_common(args) -> None:
    params = validate_params(args.b, args.m)
    dist = uniform_loss(args.ell_bar)
    if args.pi is not None:
        beliefs = [args.pi]
    else:
        beliefs = np.linspace(0.0, args.pi_max, args.pi_grid, endpoint=False)
    rows = []
    for pi in beliefs:
        eqs = solve_common_equilibria(float(pi), params, dist, tol=args.tol)
        rows.append([float(pi), eqs.regime, eqs.ell_low, eqs.ell_high, eqs.ell_corner])
    out = Path(args.out)
    _write_csv(out, ["pi", "regime", "ell_low", "ell_high", "ell_corner"], rows)
    _write_manifest("common", args, [out])


def cmd_diverse(args) -> None:
    params = validate_params(args.b, args.m)
    F, G = uniform_loss(1.0), uniform_belief()
    sol = solve_diverse_threshold(
        params, F, G, tol=args.tol, max_iter=args.max_iter, n_knots=args.grid_n
    )
    ab = solve_alpha_beta(params, mode="exact" if args.alpha_beta == "exact" else "approximate")
    out = Path(args.out)
    _write_csv(out, ["ell", "pi_star_d"], zip(sol.threshold.knots, sol.threshold.values))
    summary = {
        "alpha": ab.alpha,
        "beta": ab.beta,
        "alpha_beta_mode": ab.mode,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "contraction_gamma": sol.contraction_gamma,
        "p_coop": sol.coop_prob,
    }
    _write_json(_summary_path(out), summary)
    _write_manifest("diverse", args, [out, _summary_path(out)])


def cmd_compare(args) -> None:
    params = validate_params(args.b, args.m)
    ab = solve_alpha_beta(params, mode="exact" if args.alpha_beta == "exact" else "approximate")
    pi_dagger = solve_pi_dagger(params, ab, tol=args.tol)
    grid = np.linspace(0.0, params.pi_low, args.grid, endpoint=True)
    rows = []
    for pi in grid:
        pi = min(float(pi), 1.0 - 1e-12)
        lc = closed_form_common_uniform(pi, params)
        ld = closed_form_diverse_uniform(pi, params, ab)
        rows.append([pi, lc, ld, lc - ld])
    out = Path(args.out)
    _write_csv(out, ["pi", "ell_star_c", "ell_star_d", "diff"], rows)
    _write_json(
        _summary_path(out),
        {"pi_dagger": pi_dagger, "alpha": ab.alpha, "beta": ab.beta,
         "alpha_beta_mode": ab.mode},
    )
    _write_manifest("compare", args, [out, _summary_path(out)])


def cmd_exante(args) -> None:
    out = Path(args.out)
    if args.b_range is not None or args.m_range is not None:
        if args.b_range is None or args.m_range is None:
            raise ParameterError("range mode needs both --b-range and --m-range")
        b_grid = np.linspace(args.b_range[0], args.b_range[1], args.cells)
        m_grid = np.linspace(args.m_range[0], args.m_range[1], args.cells)
        region = diversity_region(b_grid, m_grid)
        rows = []
        for i, b in enumerate(region.b_grid):
            for j, m in enumerate(region.m_grid):
                if not region.valid[i, j]:
                    continue
                rows.append([float(b), float(m), region.p_common[i, j],
                             region.p_diverse[i, j], int(region.diverse_wins[i, j])])
        _write_csv(out, ["b", "m", "p_c", "p_d", "diverse_wins"], rows)
    else:
        params = validate_params(args.b, args.m)
        rows = [[args.b, args.m,
                 ex_ante_p_common(params, "closed_form"),
                 ex_ante_p_common(params, "quadrature"),
                 ex_ante_p_diverse(params, method="closed_form"),
                 ex_ante_p_diverse(params, method="quadrature")]]
        _write_csv(out, ["b", "m", "p_c_closed", "p_c_quadrature",
                         "p_d_closed", "p_d_quadrature"], rows)
    _write_manifest("exante", args, [out])


def _asymmetric_row(pi1, pi2, params, dist):
    sol = solve_asymmetric(pi1, pi2, params, dist)
    try:
        deriv = asymmetric_sensitivity(pi1, pi2, params, dist)
    except (RegimeError, ParameterError):
        deriv = None
    return [pi1, pi2, sol.ell1_hat, sol.ell2_hat, deriv]


def cmd_asymmetric(args) -> None:
    params = validate_params(args.b, args.m)
    dist = uniform_loss(args.ell_bar)
    if args.sweep_pi2 is not None:
        lo, hi, count = args.sweep_pi2
        pi2s = np.linspace(float(lo), float(hi), int(count))
    else:
        pi2s = [args.pi2]
    rows = [_asymmetric_row(args.pi1, float(p2), params, dist) for p2 in pi2s]
    out = Path(args.out)
    _write_csv(out, ["pi1", "pi2", "ell1_hat", "ell2_hat", "d_ell1_d_pi2"], rows)
    _write_manifest("asymmetric", args, [out])


def cmd_group(args) -> None:
    params = validate_params(args.b, args.m)
    F, G = uniform_loss(1.0), uniform_belief()
    variant = args.variant.replace("-", "_")
    diverse_curve = solve_group_diverse(args.n, params, F, G, variant=variant)
    beliefs = np.linspace(0.0, 1.0, args.pi_grid, endpoint=False)
    rows = []
    for pi in beliefs:
        common = solve_group_common(args.n, float(pi), params, F, variant=variant)
        rows.append([args.n, float(pi), common.value, float(diverse_curve(float(pi)))])
    out = Path(args.out)
    _write_csv(out, ["n", "pi", "ell_n_common", "ell_n_diverse"], rows)
    _write_manifest("group", args, [out])


def cmd_simulate(args) -> None:
    params = validate_params(args.b, args.m)
    if args.scenario == "diverse":
        F = uniform_loss(1.0)
    else:
        F = uniform_loss(args.ell_bar)
    G = uniform_belief()
    config = SimConfig(
        n_samples=args.n_samples,
        seed=args.seed,
        scenario=args.scenario,
        pi=args.pi,
        pi1=args.pi1,
        pi2=args.pi2,
        equilibrium=args.equilibrium,
    )
    report = simulate(config, params, F, G)
    out = Path(args.out)
    _write_json(out, report.to_dict())
    _write_manifest("simulate", args, [out])


def cmd_reproduce_all(args) -> None:
    """Regenerate the data behind every illustration in one sweep."""
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    run = main  # re-enter through the parser so every artifact gets a manifest

    specs = [
        ["common", "--b", "3", "--m", "50", "--ell-bar", "8",
         "--pi-grid", "240", "--pi-max", "0.12",
         "--out", str(outdir / "regimes_shared_belief.csv")],
        ["diverse", "--b", "2", "--m", "8",
         "--out", str(outdir / "cutoff_dispersed_belief.csv")],
        ["compare", "--b", "2", "--m", "8",
         "--out", str(outdir / "threshold_comparison.csv")],
        ["exante", "--b", "2", "--m", "8",
         "--out", str(outdir / "exante_single_pair.csv")],
        ["exante", "--b-range", "2", "6", "--m-range", "1.2", "60", "--cells", "100",
         "--out", str(outdir / "exante_region.csv")],
        ["asymmetric", "--b", "3", "--m", "50", "--ell-bar", "8",
         "--pi1", "0.03", "--sweep-pi2", "0.05", "0.1", "11",
         "--out", str(outdir / "asymmetric_sweep.csv")],
        ["group", "--n", "2", "--b", "2", "--m", "8",
         "--out", str(outdir / "group_thresholds.csv")],
        ["simulate", "--scenario", "common", "--pi", "0.03",
         "--b", "3", "--m", "50", "--ell-bar", "8",
         "--n-samples", "100000", "--seed", "20240817",
         "--out", str(outdir / "simulation_common.json")],
    ]
    for spec in specs:
        code = run(spec)
        if code != 0:
            raise ConvergenceError(f"sub-command failed with exit code {code}: {spec}")

    # crossing-belief sensitivity sweeps (no dedicated sub-command)
    rows_b = []
    for b in np.linspace(2.2, 5.0, 15):
        params = validate_params(float(b), 20.0)
        ab = solve_alpha_beta(params, mode="approximate")
        rows_b.append([float(b), 20.0, solve_pi_dagger(params, ab)])
    path_b = outdir / "crossing_belief_vs_b.csv"
    _write_csv(path_b, ["b", "m", "pi_dagger"], rows_b)

    rows_m = []
    for m in np.linspace(5.0, 60.0, 15):
        params = validate_params(3.0, float(m))
        ab = solve_alpha_beta(params, mode="approximate")
        rows_m.append([3.0, float(m), solve_pi_dagger(params, ab)])
    path_m = outdir / "crossing_belief_vs_m.csv"
    _write_csv(path_m, ["b", "m", "pi_dagger"], rows_m)

    sens = pi_dagger_sensitivity(validate_params(3.0, 20.0))
    path_s = outdir / "crossing_belief_sensitivity.json"
    _write_json(path_s, {"b": 3.0, "m": 20.0,
                         "d_pi_dagger_db": sens[0], "d_pi_dagger_dm": sens[1]})
    _write_manifest("reproduce-all", args, [path_b, path_m, path_s])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trustpd",
        description="Threshold equilibria for a prisoner's dilemma with "
        "possibly-honest partners under shared or dispersed trust beliefs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    p = add("common", cmd_common, "equilibrium thresholds under a shared belief")
    p.add_argument("--b", type=float, default=3.0)
    p.add_argument("--m", type=float, default=50.0)
    p.add_argument("--ell-bar", type=float, default=8.0)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pi", type=float)
    group.add_argument("--pi-grid", type=int)
    p.add_argument("--pi-max", type=float, default=1.0, help="upper end of the belief grid")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)

    p = add("diverse", cmd_diverse, "belief cutoff under dispersed beliefs (uniform case)")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--grid-n", type=int, default=1001)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--alpha-beta", choices=("exact", "approx"), default="exact")
    p.add_argument("--out", required=True)

    p = add("compare", cmd_compare, "shared vs dispersed thresholds and the crossing belief")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--alpha-beta", choices=("exact", "approx"), default="approx")
    p.add_argument("--grid", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)

    p = add("exante", cmd_exante, "ex-ante cooperation probabilities (single pair or region grid)")
    p.add_argument("--b", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--b-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--m-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--cells", type=int, default=100)
    p.add_argument("--out", required=True)

    p = add("asymmetric", cmd_asymmetric, "equilibrium under asymmetric known beliefs")
    p.add_argument("--b", type=float, default=3.0)
    p.add_argument("--m", type=float, default=50.0)
    p.add_argument("--ell-bar", type=float, default=8.0)
    p.add_argument("--pi1", type=float, required=True)
    p.add_argument("--pi2", type=float)
    p.add_argument("--sweep-pi2", nargs=3, metavar=("LO", "HI", "N"))
    p.add_argument("--out", required=True)

    p = add("group", cmd_group, "group-game thresholds against n possibly-honest others")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--variant", choices=("consistent", "as-printed"), default="consistent")
    p.add_argument("--pi-grid", type=int, default=101)
    p.add_argument("--out", required=True)

    p = add("simulate", cmd_simulate, "Monte Carlo validation of a scenario")
    p.add_argument("--scenario", choices=("common", "diverse", "asymmetric"), required=True)
    p.add_argument("--n-samples", type=int, default=1000000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--ell-bar", type=float, default=1.0)
    p.add_argument("--pi", type=float)
    p.add_argument("--pi1", type=float)
    p.add_argument("--pi2", type=float)
    p.add_argument("--equilibrium", choices=("lowest", "highest", "corner"), default="lowest")
    p.add_argument("--out", required=True)

    p = add("reproduce-all", cmd_reproduce_all, "regenerate every illustration's data")
    p.add_argument("--outdir", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ParameterError, RegimeError) as exc:
        print(f"trustpd: parameter error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, InvariantViolation) as exc:
        print(f"trustpd: solver error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"trustpd: I/O error: {exc}", file=sys.stderr)
        return 4
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
