"""Command-line entry point.

Subcommands:
  construct  build knockoffs for a design and write them as CSV
  run        run the screen + knockoff (or BH) pipeline on design/response CSVs
  simulate   multi-trial synthetic experiment with summary/trial CSVs
  verify     run the brute-force oracle battery

Exit codes: 0 success, 1 config error, 2 numerical/convergence error,
3 verification failure. All outputs are written atomically (temp file +
rename) with fixed 12-significant-digit formatting so reruns diff cleanly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .errors import (ConfigError, ConvergenceError, DegenerateInputError,
                     DimensionError, SingularDesignError, VerificationError)
from .knockoffs import construct_knockoffs, equicorrelated_s
from .model import Design, load_design_csv, load_response_csv, normalize_columns
from .oracles import (gram_check, stopping_ratio_exact, random_stopping_instance,
                      scalar_lasso_oracle, swap_antisymmetry_check)
from .pipeline import PipelineConfig, bh_baseline, knockoff_filter_highdim
from .simulate import CoefSpec, DesignSpec, MethodSpec, gen_design, run_experiment
from .solvers import LassoConfig, lasso

CONFIG_ERRORS = (ConfigError, DimensionError, FileNotFoundError, IsADirectoryError,
                 PermissionError, json.JSONDecodeError, KeyError, TypeError, ValueError)
NUMERIC_ERRORS = (ConvergenceError, SingularDesignError, DegenerateInputError,
                  np.linalg.LinAlgError, FloatingPointError)


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return format(float(x), ".12g")
    return str(x)


def write_csv_atomic(path: str, header, rows) -> None:
    """Write a CSV via a temp file in the target directory, then rename."""
    out_dir = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(out_dir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=out_dir)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(path: str) -> dict:
    if path is None:
        raise ConfigError("--config is required for this command")
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return cfg


def _design_spec(d: dict) -> DesignSpec:
    return DesignSpec(kind=d.get("kind", "ar"), n=int(d["n"]), p=int(d["p"]),
                      rho=float(d.get("rho", 0.0)),
                      nu=d.get("nu"), psi=np.asarray(d["psi"]) if "psi" in d else None)


def _pipeline_config(d: dict, args) -> PipelineConfig:
    d = dict(d)
    if args.q is not None:
        d["q"] = args.q
    if args.seed is not None:
        d.setdefault("seed", args.seed)
    return PipelineConfig(**d)


def _get_design(cfg: dict, seed: int) -> Design:
    if "design_csv" in cfg:
        return load_design_csv(cfg["design_csv"])
    if "design" in cfg:
        return gen_design(_design_spec(cfg["design"]), seed=seed)
    raise ConfigError("config must supply 'design_csv' or a 'design' spec")


def cmd_construct(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    X = normalize_columns(_get_design(cfg, seed))
    s = equicorrelated_s(X.values.T @ X.values)
    pair = construct_knockoffs(X, s, seed=seed)
    report = gram_check(pair)
    out = args.out or "."
    write_csv_atomic(os.path.join(out, "knockoffs.csv"),
                     [f"xt{j}" for j in range(pair.p)], pair.X_tilde.values)
    write_csv_atomic(os.path.join(out, "s.csv"), ["j", "s"],
                     [(j, pair.s[j]) for j in range(pair.p)])
    print(f"constructed knockoffs for n={X.n}, p={X.p}; "
          f"worst gram residual {report.worst():.3e}")
    return 0


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    X = _get_design(cfg, seed)
    if "response_csv" not in cfg:
        raise ConfigError("run config must supply 'response_csv'")
    y = load_response_csv(cfg["response_csv"])
    pcfg = _pipeline_config(cfg.get("pipeline", {}), args)
    method = cfg.get("method", "knockoff")
    if method == "knockoff":
        res = knockoff_filter_highdim(X, y, pcfg)
    elif method == "bh":
        res = bh_baseline(X, y, pcfg)
    else:
        raise ConfigError(f"unknown method {method!r} (expected 'knockoff' or 'bh')")
    out = args.out or "."
    sel = res.selection
    rows = [(j, sel.signs[j]) for j in sorted(sel.selected)]
    write_csv_atomic(os.path.join(out, "selection.csv"), ["index", "sign"], rows)
    write_csv_atomic(os.path.join(out, "screen.csv"), ["index", "entry_sign"],
                     [(j, res.screen.signs0[j]) for j in res.screen.s0])
    print(f"selected {len(sel.selected)} of {len(res.screen.s0)} screened features "
          f"(threshold {_fmt(sel.threshold)})")
    return 0


_SUMMARY_HEADER = ["method", "scoring", "metric", "mean", "se", "n_trials",
                   "n_failures", "sure_screen_rate"]


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    trials = args.trials if args.trials is not None else int(cfg.get("trials", 100))
    design = _design_spec(cfg["design"])
    coef = CoefSpec(**cfg.get("coefficients", {}))
    methods = []
    for m in cfg["methods"]:
        methods.append(MethodSpec(name=m["name"], kind=m["kind"],
                                  cfg=_pipeline_config(m.get("config", {}), args)))
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    report = run_experiment(design, coef, methods, trials, master_seed=seed,
                            sigma=float(cfg.get("sigma", 1.0)), threads=threads)
    out = args.out or "."
    summary_rows = []
    for ms in report.methods:
        for scoring, metrics in sorted(ms.scorings.items()):
            for name, (mean, se) in sorted(metrics.items()):
                summary_rows.append((ms.name, scoring, name, mean, se,
                                     ms.n_trials, ms.n_failures, ms.sure_screen_rate))
    write_csv_atomic(os.path.join(out, "summary.csv"), _SUMMARY_HEADER, summary_rows)
    trial_rows = []
    for r in report.trial_rows:
        if "error" in r:
            trial_rows.append((r["trial"], r["method"], "error", "", "", "", "", ""))
            continue
        s = r["full"]
        sure = "" if r.get("sure_screen") is None else r["sure_screen"]
        trial_rows.append((r["trial"], r["method"], "ok", s.fdp, s.fdp_dir,
                           s.power, s.n_selected, sure))
    write_csv_atomic(os.path.join(out, "trials.csv"),
                     ["trial", "method", "status", "fdp", "fdp_dir", "power",
                      "n_selected", "sure_screen"], trial_rows)
    for ms in report.methods:
        full = ms.scorings.get("full", {})
        bits = ", ".join(f"{k}={v[0]:.4f}±{v[1]:.4f}"
                         for k, v in sorted(full.items()) if k in ("fdp_dir", "power"))
        print(f"{ms.name}: {bits} ({ms.n_trials} trials, {ms.n_failures} failures)")
    return 0


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    failures = []

    worst = 0.0
    for i in range(20):
        x = rng.standard_normal((100, 20))
        X = normalize_columns(Design.from_matrix(x))
        s = equicorrelated_s(X.values.T @ X.values)
        pair = construct_knockoffs(X, s, seed=int(rng.integers(2**31)))
        worst = max(worst, gram_check(pair).worst())
    print(f"gram contract: worst residual {worst:.3e} over 20 designs "
          f"({'ok' if worst <= 1e-8 else 'FAIL'})")
    if worst > 1e-8:
        failures.append("gram contract")

    worst_excess = -np.inf
    for i in range(100):
        floor = float(rng.choice([0.3, 0.5, 0.7]))
        inst = random_stopping_instance(rng, floor, n_max=10)
        worst_excess = max(worst_excess, stopping_ratio_exact(inst) - 1.0 / floor)
    print(f"stopping-time bound: worst excess {worst_excess:.3e} "
          f"({'ok' if worst_excess <= 1e-12 else 'FAIL'})")
    if worst_excess > 1e-12:
        failures.append("stopping-time bound")

    worst_scalar = 0.0
    for i in range(50):
        x = rng.standard_normal(30)
        x /= np.linalg.norm(x)
        y = rng.standard_normal(30)
        lam = float(rng.uniform(0.01, 2.0))
        beta = lasso(x[:, None], y, LassoConfig(lam=lam))
        worst_scalar = max(worst_scalar,
                           abs(float(beta[0]) - scalar_lasso_oracle(x, y, lam)))
    print(f"scalar lasso: worst deviation {worst_scalar:.3e} "
          f"({'ok' if worst_scalar <= 1e-8 else 'FAIL'})")
    if worst_scalar > 1e-8:
        failures.append("scalar lasso")

    ok = True
    for i in range(10):
        x = rng.standard_normal((60, 8))
        X = normalize_columns(Design.from_matrix(x))
        s = equicorrelated_s(X.values.T @ X.values)
        pair = construct_knockoffs(X, s, seed=int(rng.integers(2**31)))
        y = pair.X.values @ rng.standard_normal(8) + rng.standard_normal(60)
        swap = [int(j) for j in np.flatnonzero(rng.random(8) < 0.5)]
        if not swap_antisymmetry_check("coef-diff", pair.X.values,
                                       pair.X_tilde.values, y, swap, 1e-8):
            ok = False
    print(f"swap antisymmetry (coef-diff): {'ok' if ok else 'FAIL'}")
    if not ok:
        failures.append("swap antisymmetry")

    if failures:
        raise VerificationError("verification failed: " + ", ".join(failures))
    print("all verification checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirfdr",
                                     description="Controlled variable selection "
                                                 "with directional error control.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("construct", cmd_construct), ("run", cmd_run),
                     ("simulate", cmd_simulate), ("verify", cmd_verify)):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--q", type=float, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
