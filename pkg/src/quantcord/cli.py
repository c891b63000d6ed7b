"""Command-line front end: ``quantcord analyze`` and ``quantcord synth``.

All computation happens before any file is written, so a failing run
leaves no partial outputs.  Outputs contain no timestamps; rerunning
with the same config and seed reproduces every file byte for byte.
"""

import argparse
import dataclasses
import json
import os
import platform
import sys

import numpy as np
import scipy
import yaml

from . import __version__
from .bootstrap import bootstrap
from .config import load_run_config, load_scenario
from .dataset import read_csv, write_csv
from .exceptions import QuantcordError
from .pipeline import CONSTANT_PROFILE, run_two_step

FLOAT_FMT = "%.17g"


def _fmt(x):
    if x is None:
        return ""
    x = float(x)
    if np.isnan(x):
        return ""
    return FLOAT_FMT % x


def _needed_columns(spec):
    names = list(spec.responses)
    for t in spec.step1_terms + spec.step2_terms:
        for c in (t.column, t.column2):
            if c and c not in names:
                names.append(c)
    return names


def _write_rows(path, header, rows):
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _profile_filename(covariate):
    safe = "".join(ch if ch.isalnum() or ch in "_-" else "" for ch in covariate)
    return f"phi_profile_{safe or 'constant'}.csv"


def _emit_analysis(out_dir, cfg, spec, boot_cfg, data, report, results, seeds):
    """Write every output table; returns the list of file names."""
    files = {}

    rows = []
    for tau, run, boot in results:
        for j, name in enumerate(spec.responses):
            fit = run.step1[j]
            se = boot.beta_se[name] if boot is not None else None
            for k, term in enumerate(fit.columns):
                rows.append([
                    _fmt(tau), name, term, _fmt(fit.beta[k]),
                    _fmt(se[k]) if se is not None else "",
                ])
    files["step1_coefficients.csv"] = (
        ["tau", "response", "term", "estimate", "se"], rows)

    rows = []
    for tau, run, boot in results:
        fit2 = run.step2
        for k, cat in enumerate(fit2.categories):
            for q, term in enumerate(fit2.columns):
                se = lo = hi = ""
                if boot is not None:
                    se = _fmt(boot.gamma_se[k, q])
                    lo = _fmt(boot.gamma_lower[k, q])
                    hi = _fmt(boot.gamma_upper[k, q])
                rows.append([
                    _fmt(tau), cat, term, _fmt(fit2.gamma[k, q]), se, lo, hi,
                ])
    files["step2_coefficients.csv"] = (
        ["tau", "category", "term", "estimate", "se", "ci_lower", "ci_upper"],
        rows)

    covariates = []
    for v in results[0][1].surface.varying:
        if v not in covariates:
            covariates.append(v)
    header = ["tau", "covariate", "value", "phi_hat", "ci_lower", "ci_upper",
              "phi_min", "phi_max", "out_of_bounds_flag"]
    for cov in covariates:
        rows = []
        for tau, run, boot in results:
            s = boot.surface if boot is not None else run.surface
            for i in range(s.m):
                if s.varying[i] != cov:
                    continue
                rows.append([
                    _fmt(tau), cov, _fmt(s.value[i]), _fmt(s.phi[i]),
                    _fmt(s.lower[i]) if s.lower is not None else "",
                    _fmt(s.upper[i]) if s.upper is not None else "",
                    _fmt(s.phi_min), _fmt(s.phi_max),
                    int(s.out_of_bounds[i]),
                ])
        files[_profile_filename(cov)] = (header, rows)

    meta = {
        "command": "analyze",
        "package_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "input": cfg.input,
        "n_rows": data.n,
        "dropped_rows": list(report.dropped_rows),
        "responses": list(spec.responses),
        "taus": list(spec.taus),
        "merged": spec.merged,
        "bootstrap": {
            "enabled": boot_cfg.enabled,
            "replicates": boot_cfg.replicates if boot_cfg.enabled else 0,
            "level": boot_cfg.level,
            "per_tau_seeds": seeds,
        },
        "replicate_failures": {
            _fmt(tau): (boot.failures if boot is not None else 0)
            for tau, _, boot in results
        },
        "winsorized_draws": {
            _fmt(tau): (int(boot.winsorized.sum()) if boot is not None else 0)
            for tau, _, boot in results
        },
        "outputs": sorted(files) + ["metadata.json", "summary.txt"],
    }

    written = []
    try:
        for name, (header, rows) in files.items():
            path = os.path.join(out_dir, name)
            _write_rows(path, header, rows)
            written.append(path)
        path = os.path.join(out_dir, "metadata.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
        path = os.path.join(out_dir, "summary.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_summary_text(spec, data, report, results))
        written.append(path)
    except BaseException:
        for p in written:
            if os.path.exists(p):
                os.unlink(p)
        raise
    return meta["outputs"]


def _summary_text(spec, data, report, results):
    """Human-readable recap, 3 decimals."""
    lines = [
        "quantcord analysis summary",
        f"rows used: {data.n} (dropped: {report.n_dropped})",
        f"responses: {spec.responses[0]}, {spec.responses[1]}"
        + ("  [merged discordant categories]" if spec.merged else ""),
        "",
    ]
    for tau, run, boot in results:
        lines.append(f"tau = {tau:g}")
        for j, name in enumerate(spec.responses):
            fit = run.step1[j]
            coefs = "  ".join(
                f"{c}={v:.3f}" for c, v in zip(fit.columns, fit.beta))
            lines.append(f"  quantile fit {name}: {coefs}")
        fit2 = run.step2
        for k, cat in enumerate(fit2.categories):
            coefs = "  ".join(
                f"{c}={v:.3f}" for c, v in zip(fit2.columns, fit2.gamma[k]))
            lines.append(f"  log-odds {cat} vs 00: {coefs}")
        s = boot.surface if boot is not None else run.surface
        seen = []
        for v in s.varying:
            if v not in seen:
                seen.append(v)
        for cov in seen:
            mask = np.array([v == cov for v in s.varying])
            label = "phi (constant model)" if cov == CONSTANT_PROFILE \
                else f"phi along {cov}"
            lines.append(
                f"  {label}: {np.min(s.phi[mask]):.3f} "
                f"to {np.max(s.phi[mask]):.3f} "
                f"(bounds {s.phi_min:.3f}, {s.phi_max:.3f})")
        if boot is not None:
            lines.append(
                f"  bootstrap: B={boot.B}, failures={boot.failures}, "
                f"level={boot.level:g}")
        lines.append("")
    return "\n".join(lines)


def _cmd_analyze(args):
    cfg = load_run_config(args.config)
    spec = cfg.spec
    if args.taus:
        spec = dataclasses.replace(spec, taus=tuple(sorted(set(args.taus))))
    if args.merged:
        spec = dataclasses.replace(spec, merged=True)
    boot_cfg = cfg.bootstrap
    if args.bootstrap is not None:
        if args.bootstrap > 0:
            boot_cfg = dataclasses.replace(
                boot_cfg, enabled=True, replicates=args.bootstrap)
        else:
            boot_cfg = dataclasses.replace(boot_cfg, enabled=False)
    if args.seed is not None:
        boot_cfg = dataclasses.replace(boot_cfg, seed=args.seed)
    out_dir = args.out or cfg.output_dir

    needed = _needed_columns(spec)
    data, report = read_csv(
        cfg.input,
        columns=needed,
        binary=[b for b in spec.binary if b in needed],
    )
    if report.n_dropped:
        print(
            f"dropped {report.n_dropped} rows with missing cells "
            f"(data rows {list(report.dropped_rows)})",
            file=sys.stderr,
        )

    results = []
    seeds = []
    for i, tau in enumerate(spec.taus):
        if boot_cfg.enabled:
            seed = boot_cfg.seed + i
            seeds.append(seed)
            boot = bootstrap(
                data, spec, tau,
                B=boot_cfg.replicates, seed=seed,
                level=boot_cfg.level, workers=boot_cfg.workers,
            )
            results.append((tau, boot.estimate, boot))
        else:
            results.append((tau, run_two_step(data, spec, tau), None))

    os.makedirs(out_dir, exist_ok=True)
    outputs = _emit_analysis(
        out_dir, cfg, spec, boot_cfg, data, report, results, seeds)
    print(f"wrote {len(outputs)} files to {out_dir}")
    return 0


def _cmd_synth(args):
    from .synthetic import generate, oracle_phi_gaussian

    scenario, taus = load_scenario(args.config)
    data = generate(scenario)

    if scenario.rho_by_group is not None:
        oracle = {
            "group_column": scenario.group_column,
            "groups": {
                str(g): {
                    "rho": scenario.rho_by_group[g],
                    "phi": {_fmt(t): oracle_phi_gaussian(scenario.rho_by_group[g], t)
                            for t in taus},
                }
                for g in (0, 1)
            },
        }
    else:
        oracle = {
            "rho": scenario.rho,
            "phi": {_fmt(t): oracle_phi_gaussian(scenario.rho, t) for t in taus},
        }
    sidecar = {
        "command": "synth",
        "package_version": __version__,
        "n": scenario.n,
        "seed": scenario.seed,
        "responses": list(scenario.response_names),
        "taus": list(taus),
        "oracle": oracle,
    }

    write_csv(args.out, data.columns, float_format=FLOAT_FMT)
    sidecar_path = args.out + ".oracle.json"
    try:
        with open(sidecar_path, "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except BaseException:
        if os.path.exists(args.out):
            os.unlink(args.out)
        raise
    print(f"wrote {args.out} (n={scenario.n}) and {sidecar_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quantcord",
        description="Quantile-level dependence analysis between two responses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the two-step analysis on a CSV")
    a.add_argument("--config", required=True, help="YAML run configuration")
    a.add_argument("--taus", nargs="+", type=float, default=None,
                   help="override the config tau list")
    a.add_argument("--bootstrap", type=int, default=None, metavar="B",
                   help="bootstrap replicates (0 disables)")
    a.add_argument("--seed", type=int, default=None,
                   help="override the bootstrap base seed")
    a.add_argument("--merged", action="store_true",
                   help="pool the discordant categories in step 2")
    a.add_argument("--out", default=None, help="output directory")
    a.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("synth", help="generate a synthetic fixture CSV")
    s.add_argument("--config", required=True, help="YAML scenario configuration")
    s.add_argument("--out", required=True, help="output CSV path")
    s.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QuantcordError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except yaml.YAMLError as err:
        print(f"error: invalid YAML: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
