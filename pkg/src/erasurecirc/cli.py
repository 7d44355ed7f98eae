"""Command-line entry point: run experiments, emit CSV + manifest, verify.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 runtime
failure. Every data file <name>.csv is paired with <name>.manifest.json
recording the full configuration, the seed and the code version; a rerun
with the same flags reproduces the CSV byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__, verify as verify_mod
from .experiments import (
    CircuitConfig,
    default_t0 as experiments_default_t0,
    run_antipodal_mi,
    run_entropy_decay,
    run_io_mi_decay,
    run_perturbation,
    run_tau_sweep,
)
from . import dpmodel, scaling

USAGE_ERROR = 1
VERIFY_ERROR = 2
RUNTIME_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _manifest_path(out: str) -> str:
    base = out[:-4] if out.endswith(".csv") else out
    return base + ".manifest.json"


def _write_csv(path: str, header: list[str], rows) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(header)
            w.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(out: str, subcommand: str, config: dict, seed: int, t_start: float) -> None:
    manifest = {
        "config": config,
        "seed": seed,
        "subcommand": subcommand,
        "version": __version__,
        "duration_s": round(time.perf_counter() - t_start, 3),
    }
    path = _manifest_path(out)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _resolve_seed(args) -> int:
    if args.seed is None:
        return int.from_bytes(os.urandom(4), "big")
    return int(args.seed)


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _load_config_file(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment; keys match flag names."""
    values = {}
    with open(path) as f:
        for line_no, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_decay(args) -> int:
    seed = _resolve_seed(args)
    config = CircuitConfig(
        n=args.n, p=args.p, q=args.q, h=args.h, depth=args.depth,
        initial_state=args.init,
    )
    t_start = time.perf_counter()
    record = run_entropy_decay(config, seed, args.realizations, workers=args.workers)
    stats = record.series["entropy"]
    rows = [
        [t, repr(float(stats.mean[t])), repr(float(stats.stderr[t])),
         args.n, repr(args.p), repr(args.q), repr(args.h), args.realizations, seed]
        for t in range(config.depth + 1)
    ]
    _write_csv(args.out, ["t", "s_mean", "s_stderr", "n", "p", "q", "h", "realizations", "seed"], rows)
    _write_manifest(args.out, "decay", config.as_dict() | {"realizations": args.realizations}, seed, t_start)
    return 0


def _cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    t_start = time.perf_counter()
    if args.depth is not None:
        depth_fn = lambda n: args.depth  # noqa: E731
    else:
        depth_fn = lambda n: max(2, round(args.depth_scale * n**args.depth_power))  # noqa: E731
    if args.t0_power is not None:
        t0_fn = lambda n: args.t0_scale * n**args.t0_power  # noqa: E731
    else:
        t0_fn = experiments_default_t0
    rows_out = run_tau_sweep(
        args.n_list,
        args.p_list,
        seed,
        args.realizations,
        depth_fn=depth_fn,
        t0_fn=t0_fn,
        fraction=args.fraction,
        n_bootstrap=args.bootstrap,
        workers=args.workers,
    )
    rows = [
        [r.n, repr(r.p), repr(r.tau_mean), repr(r.tau_stderr),
         repr(r.censored_fraction), args.realizations, seed]
        for r in rows_out
    ]
    _write_csv(
        args.out,
        ["n", "p", "tau_mean", "tau_stderr", "censored_fraction", "realizations", "seed"],
        rows,
    )
    cfg = {
        "n_list": args.n_list, "p_list": args.p_list, "realizations": args.realizations,
        "depth": args.depth, "depth_scale": args.depth_scale, "depth_power": args.depth_power,
        "fraction": args.fraction, "bootstrap": args.bootstrap,
        "t0_power": args.t0_power, "t0_scale": args.t0_scale,
    }
    _write_manifest(args.out, "sweep", cfg, seed, t_start)
    return 0


def _cmd_dp(args) -> int:
    seed = _resolve_seed(args)
    t_start = time.perf_counter()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    res = dpmodel.run_dp_ensemble(
        args.n, args.depth, args.p, args.trajectories, rng, initial=args.init
    )
    rows = [
        [t, repr(float(res.density_mean[t])), repr(float(res.survival[t])),
         repr(float(res.absorbed[t])), repr(float(res.absorbed_stderr[t]))]
        for t in range(args.depth + 1)
    ]
    _write_csv(
        args.out,
        ["t", "density_mean", "survival_prob", "qbar_estimate", "qbar_stderr"],
        rows,
    )
    cfg = {"n": args.n, "p": args.p, "depth": args.depth,
           "trajectories": args.trajectories, "init": args.init}
    _write_manifest(args.out, "dp", cfg, seed, t_start)
    return 0


def _cmd_mi(args) -> int:
    seed = _resolve_seed(args)
    t_start = time.perf_counter()
    rows = []
    for n in args.n_list:
        for p in args.p_list:
            config = CircuitConfig(n=n, p=p, q=args.q, depth=1)
            res = run_antipodal_mi(
                config, seed, args.realizations, z_exponent=args.z, workers=args.workers
            )
            rows.append(
                [n, repr(p), repr(args.q), res.t_eval,
                 repr(res.mi_mean), repr(res.mi_stderr)]
            )
    _write_csv(args.out, ["n", "p", "q", "t_eval", "mi_mean", "mi_stderr"], rows)
    cfg = {"n_list": args.n_list, "p_list": args.p_list, "q": args.q,
           "z": args.z, "realizations": args.realizations}
    _write_manifest(args.out, "mi", cfg, seed, t_start)
    return 0


def _cmd_perturb(args) -> int:
    seed = _resolve_seed(args)
    t_start = time.perf_counter()
    base = CircuitConfig(n=args.n, p=args.p, depth=args.depth)
    result = run_perturbation(
        base, args.sweep, args.values, seed, args.realizations, workers=args.workers
    )
    rows = []
    for value, record in zip(result.values, result.records):
        stats = record.series["entropy"]
        cfg = record.config
        for t in range(cfg.depth + 1):
            rows.append(
                [t, repr(float(stats.mean[t])), repr(float(stats.stderr[t])),
                 cfg.n, repr(cfg.p), repr(cfg.q), repr(cfg.h), args.realizations, seed]
            )
    _write_csv(args.out, ["t", "s_mean", "s_stderr", "n", "p", "q", "h", "realizations", "seed"], rows)
    for value, sat, err in zip(result.values, result.saturation_mean, result.saturation_stderr):
        print(f"{args.sweep}={value}: saturation entropy {sat:.4f} +- {err:.4f}")
    cfg = {"n": args.n, "p": args.p, "sweep": args.sweep, "values": args.values,
           "depth": args.depth, "realizations": args.realizations}
    _write_manifest(args.out, "perturb", cfg, seed, t_start)
    return 0


def _cmd_phase_diagram(args) -> int:
    seed = _resolve_seed(args)
    t_start = time.perf_counter()
    ps = np.linspace(args.p_min, args.p_max, args.p_grid)
    qs = np.linspace(args.q_min, args.q_max, args.q_grid)
    kind = "referenced_bell" if args.reference == "bell" else "referenced_classical"
    rows = []
    for p in ps:
        for q in qs:
            config = CircuitConfig(
                n=args.n, p=float(p), q=float(q), depth=args.depth, initial_state=kind
            )
            res = run_io_mi_decay(
                config, seed, args.realizations,
                threshold=args.threshold, workers=args.workers,
            )
            rows.append(
                [args.n, repr(float(p)), repr(float(q)), repr(res.timescale_mean),
                 repr(res.timescale_stderr), repr(res.capped_fraction)]
            )
    _write_csv(
        args.out,
        ["n", "p", "q", "timescale_mean", "timescale_stderr", "capped_fraction"],
        rows,
    )
    cfg = {"n": args.n, "p_grid": args.p_grid, "q_grid": args.q_grid,
           "p_min": args.p_min, "p_max": args.p_max, "q_min": args.q_min,
           "q_max": args.q_max, "depth": args.depth, "threshold": args.threshold,
           "reference": args.reference, "realizations": args.realizations}
    _write_manifest(args.out, "phase-diagram", cfg, seed, t_start)
    return 0


def _parse_bounds(text: str) -> dict[str, tuple[float, float]]:
    """'z=1.2:1.8,nu=0.6:2.0' -> {'z': (1.2, 1.8), 'nu': (0.6, 2.0)}."""
    bounds = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, _, rng = part.partition("=")
        lo, _, hi = rng.partition(":")
        bounds[key.strip()] = (float(lo), float(hi))
    return bounds


def _read_csv_columns(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [r for r in reader if r]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    cols = {}
    for i, name in enumerate(header):
        vals = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals)
    return cols


def _curves_from_sweep(cols) -> list[scaling.DecayCurve]:
    curves = []
    for n in np.unique(cols["n"]):
        mask = (cols["n"] == n) & np.isfinite(cols["tau_mean"])
        if mask.sum() < 2:
            continue
        order = np.argsort(cols["p"][mask])
        curves.append(
            scaling.DecayCurve(
                times=cols["p"][mask][order],
                values=cols["tau_mean"][mask][order],
                std_errors=cols["tau_stderr"][mask][order],
                labels={"n": int(n)},
            )
        )
    return curves


def _curves_from_decay(cols, label_key: str) -> list[scaling.DecayCurve]:
    curves = []
    for v in np.unique(cols[label_key]):
        if v == 0:
            continue  # a zero noise value cannot be power-law rescaled
        mask = cols[label_key] == v
        order = np.argsort(cols["t"][mask])
        curves.append(
            scaling.DecayCurve(
                times=cols["t"][mask][order],
                values=cols["s_mean"][mask][order],
                std_errors=cols["s_stderr"][mask][order],
                labels={label_key: float(v)},
            )
        )
    return curves


def _cmd_collapse(args) -> int:
    seed = _resolve_seed(args)
    t_start = time.perf_counter()
    cols = _read_csv_columns(args.inp)
    if args.ansatz == "tau":
        spec = scaling.tau_crossing_spec()
        curves = _curves_from_sweep(cols)
    else:
        label_key = args.label
        if label_key == "auto":
            label_key = "h" if np.unique(cols["q"]).size == 1 else "q"
        spec = scaling.noise_collapse_spec(label_key=label_key)
        curves = _curves_from_decay(cols, label_key)
    if len(curves) < 2:
        raise ValueError("need at least two curves to collapse")
    bounds = _parse_bounds(args.bounds) if args.bounds else None
    fit = scaling.fit_collapse(curves, spec, bounds=bounds, n_restarts=args.restarts, seed=seed)
    names = list(fit.params)
    header = names + ["objective", "converged"]
    rows = [[repr(fit.params[k]) for k in names] + [repr(fit.objective), int(fit.converged)]]
    _write_csv(args.out, header, rows)
    for k in names:
        print(f"{k} = {fit.params[k]:.6g}")
    print(f"objective = {fit.objective:.6g} converged = {fit.converged}")
    cfg = {"in": args.inp, "ansatz": args.ansatz, "bounds": args.bounds,
           "restarts": args.restarts}
    _write_manifest(args.out, "collapse", cfg, seed, t_start)
    return 0


def _cmd_verify(args) -> int:
    report = verify_mod.run_verification(
        n_schedules=args.schedules,
        n_io=args.io_realizations,
        seed=args.seed if args.seed is not None else 0,
    )
    for check in report.checks:
        print(("ok   " if check.passed else "FAIL ") + check.name + (f": {check.detail}" if check.detail else ""))
    if not report.passed:
        return VERIFY_ERROR
    print(f"all {len(report.checks)} checks passed")
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _add_common(sub, *, realizations=100):
    sub.add_argument("--realizations", type=int, default=realizations)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--out", default=None)
    sub.add_argument("--config", default=None, help="key = value file; flags override")


def build_parser() -> _Parser:
    parser = _Parser(prog="erasurecirc", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub = subs.add_parser("decay", help="mean entropy versus time")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--p", type=float, default=None)
    sub.add_argument("--q", type=float, default=0.0)
    sub.add_argument("--h", type=float, default=0.0)
    sub.add_argument("--depth", type=int, default=None)
    sub.add_argument("--init", default="maximally_mixed",
                     choices=["maximally_mixed", "referenced_classical", "referenced_bell"])
    _add_common(sub)
    sub.set_defaults(func=_cmd_decay, required_opts=("n", "p", "depth", "out"))

    sub = subs.add_parser("sweep", help="tau(n, p) table")
    sub.add_argument("--n-list", dest="n_list", type=_int_list, default=None)
    sub.add_argument("--p-list", dest="p_list", type=_float_list, default=None)
    sub.add_argument("--depth", type=int, default=None, help="fixed depth; default 4 n^1.6")
    sub.add_argument("--depth-scale", type=float, default=4.0)
    sub.add_argument("--depth-power", type=float, default=1.6)
    sub.add_argument("--fraction", type=float, default=0.15)
    sub.add_argument("--bootstrap", type=int, default=100)
    sub.add_argument("--t0-power", dest="t0_power", type=float, default=None,
                     help="anchor t0 = t0-scale * n^power; default max(10, n/4)")
    sub.add_argument("--t0-scale", dest="t0_scale", type=float, default=0.125)
    _add_common(sub, realizations=200)
    sub.set_defaults(func=_cmd_sweep, required_opts=("n_list", "p_list", "out"))

    sub = subs.add_parser("dp", help="diffusion-reaction lattice observables")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--p", type=float, default=None)
    sub.add_argument("--depth", type=int, default=None)
    sub.add_argument("--trajectories", type=int, default=10000)
    sub.add_argument("--init", default="half", choices=["half", "full"])
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", required=True)
    sub.add_argument("--config", default=None)
    sub.set_defaults(func=_cmd_dp, required_opts=("n", "p", "depth", "out"))

    sub = subs.add_parser("mi", help="antipodal mutual information versus p")
    sub.add_argument("--n-list", dest="n_list", type=_int_list, default=None)
    sub.add_argument("--p-list", dest="p_list", type=_float_list, default=None)
    sub.add_argument("--q", type=float, default=0.0)
    sub.add_argument("--z", type=float, default=1.51)
    _add_common(sub)
    sub.set_defaults(func=_cmd_mi, required_opts=("n_list", "p_list", "out"))

    sub = subs.add_parser("perturb", help="S(t) family over a q or h sweep")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--p", type=float, default=0.081)
    sub.add_argument("--sweep", default=None, choices=["q", "h"])
    sub.add_argument("--values", type=_float_list, default=None)
    sub.add_argument("--depth", type=int, default=None)
    _add_common(sub)
    sub.set_defaults(func=_cmd_perturb, required_opts=("n", "sweep", "values", "depth", "out"))

    sub = subs.add_parser("phase-diagram", help="I/O MI decay timescale over a (p, q) grid")
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--p-grid", dest="p_grid", type=int, default=None)
    sub.add_argument("--q-grid", dest="q_grid", type=int, default=None)
    sub.add_argument("--p-min", type=float, default=0.0)
    sub.add_argument("--p-max", type=float, default=0.2)
    sub.add_argument("--q-min", type=float, default=0.0)
    sub.add_argument("--q-max", type=float, default=0.1)
    sub.add_argument("--depth", type=int, default=None)
    sub.add_argument("--threshold", type=float, default=1.0)
    sub.add_argument("--reference", default="classical", choices=["classical", "bell"])
    _add_common(sub, realizations=50)
    sub.set_defaults(func=_cmd_phase_diagram, required_opts=("n", "p_grid", "q_grid", "depth", "out"))

    sub = subs.add_parser("collapse", help="fit collapse exponents from a CSV")
    sub.add_argument("--in", dest="inp", default=None)
    sub.add_argument("--ansatz", default=None, choices=["tau", "noise"])
    sub.add_argument("--label", default="auto", help="noise ansatz grouping column (q or h)")
    sub.add_argument("--bounds", default=None, help="e.g. z=1.2:1.8,nu=0.6:2.0,p_c=0.05:0.12")
    sub.add_argument("--restarts", type=int, default=8)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", required=True)
    sub.add_argument("--config", default=None)
    sub.set_defaults(func=_cmd_collapse, required_opts=("inp", "ansatz", "out"))

    sub = subs.add_parser("verify", help="oracle-equivalence and identity suite")
    sub.add_argument("--schedules", type=int, default=200)
    sub.add_argument("--io-realizations", dest="io_realizations", type=int, default=100)
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=_cmd_verify)

    return parser


def _apply_config_file(parser, argv, args):
    """Overlay config-file values for options not given on the command line."""
    if getattr(args, "config", None) is None:
        return args
    values = _load_config_file(args.config)
    given = set()
    for token in argv:
        if token.startswith("--"):
            given.add(token[2:].split("=", 1)[0].replace("-", "_"))
    subparsers = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    actions = {
        a.dest: a for a in subparsers.choices[args.command]._actions if a.dest != "help"
    }
    for key, raw in values.items():
        if key not in actions:
            raise ValueError(f"unknown config key {key!r}")
        if key in given:
            continue
        convert = actions[key].type or str
        setattr(args, key, convert(raw))
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config_file(parser, argv, args)
    except (OSError, ValueError) as exc:
        print(f"erasurecirc: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    missing = [k for k in getattr(args, "required_opts", ()) if getattr(args, k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        print(f"erasurecirc: error: missing required options: {flags}", file=sys.stderr)
        return USAGE_ERROR
    try:
        return args.func(args)
    except scaling.CrossingError as exc:
        print(f"erasurecirc: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    except ValueError as exc:
        print(f"erasurecirc: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"erasurecirc: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
