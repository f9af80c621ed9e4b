"""Command-line entry point.

Subcommands:
  verify          run per-module invariant suites
  geometry        divergence/tensor report for configured density points
  filter          Monte-Carlo filtering comparison (CSV per trial + summary)
  counterexample  bump-series term table (CSV)

Outputs depend only on (config, seed); the thread count changes nothing
but wall time. Exit codes: 0 success, 1 failed checks or runtime
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import diagnostics, filtering, geometry, manifold
from .config import ConfigError, canonical_json, default_config, load_config, validate_config
from .deformed import make_family
from .grid import GridFunction, build_grid
from .measure import make_reference
from .sampling import centred
from .verify import run_suites

log = logging.getLogger("infogeo")

_CSV_COLUMNS = ["t", "mass", "mean_proj", "var_proj", "mean_dense", "var_dense",
                "mean_kb", "var_kb", "kl_dp", "kl_pd", "dmo"]


def _setup_logging():
    level = os.environ.get("INFOGEO_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load(args) -> dict:
    if args.config:
        return load_config(args.config)
    return validate_config(default_config())


def _fmt(value) -> str:
    return repr(float(value))


# -- verify -----------------------------------------------------------------


def cmd_verify(args) -> int:
    results = run_suites(args.filter)
    failures = []
    for res in results:
        mark = "ok  " if res.ok else "FAIL"
        tail = f"  [{res.detail}]" if res.detail else ""
        print(f"{mark} {res.suite}: {res.name}{tail}")
        if not res.ok:
            failures.append({"suite": res.suite, "name": res.name, "detail": res.detail})
    print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"checks": len(results), "failures": failures}, fh,
                      indent=2, sort_keys=True)
            fh.write("\n")
    return 1 if failures else 0


# -- geometry ---------------------------------------------------------------


def _build_point(spec: dict, fam, mu, grid):
    if spec["kind"] == "constant":
        dens = GridFunction.constant(grid, spec["value"])
        return manifold.ManifoldPoint.from_density(fam, mu, dens)
    if spec["kind"] == "gaussian":
        dens = filtering.gaussian_density(mu, grid, spec["mean"], spec["var"])
        return manifold.ManifoldPoint.from_density(fam, mu, dens)
    raise ConfigError(f"unknown point kind {spec['kind']!r}")


def cmd_geometry(args) -> int:
    cfg = _load(args)
    mu = make_reference(cfg["measure"]["t"], cfg["measure"]["variant"])
    grid = build_grid(1, cfg["grid"]["L"], cfg["grid"]["n"])
    fam = make_family("balanced")
    points = [_build_point(s, fam, mu, grid) for s in cfg["geometry"]["points"]]

    names = [f"p{i}" for i in range(len(points))]
    report = {"config": json.loads(canonical_json(cfg)), "points": {}}
    for name, pt in zip(names, points):
        report["points"][name] = {"mass": pt.mass, "level": pt.level}
    report["kl"] = {f"{a}|{b}": geometry.kl(points[i], points[j])
                    for i, a in enumerate(names) for j, b in enumerate(names) if i != j}
    pair = points[:2]
    report["jeffreys"] = geometry.jeffreys(*pair)
    report["duality_pairing"] = geometry.duality_pairing(*pair)
    report["chi2_mo"] = geometry.chi2_mo(pair[1], pair[0])
    if len(points) == 3:
        report["cosine_defect"] = geometry.cosine_defect(*points)

    # tensors at the first point along the centred coordinate direction
    w = mu.quadrature_weights(grid)
    u = centred(GridFunction(grid, grid.axis.copy()), w)
    report["fisher_rao"] = geometry.fisher_rao(points[0], u, u)
    report["amari_chentsov"] = geometry.amari_chentsov(points[0], u, u, u)

    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


# -- filter -----------------------------------------------------------------


def cmd_filter(args) -> int:
    cfg = _load(args)
    mu = make_reference(cfg["measure"]["t"], cfg["measure"]["variant"])
    grid = build_grid(1, cfg["grid"]["L"], cfg["grid"]["n"])
    model = filtering.make_model(cfg["model"]["name"], mu, **cfg["model"]["params"])
    k_proj = max(cfg["space"]["k"] - 2, 0)
    basis = filtering.make_basis(cfg["basis"]["name"], cfg["basis"]["m"], grid, mu,
                                 k_proj=k_proj)
    time_cfg = cfg["time"]
    out_dir = args.out or "filter_out"
    os.makedirs(out_dir, exist_ok=True)

    log.info("running %d trial(s) on %d thread(s)", args.trials, args.threads)
    results = filtering.run_trials(model, basis, grid, time_cfg["T"], time_cfg["dt"],
                                   time_cfg["dt_sim"], cfg["prior"]["mean"],
                                   cfg["prior"]["var"], args.seed, args.trials,
                                   threads=args.threads)
    for res in results:
        path = os.path.join(out_dir, f"trial_{res.trial:03d}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_COLUMNS)
            for row in res.rows:
                writer.writerow([_fmt(row[c]) for c in _CSV_COLUMNS])

    summary = filtering.summarize_trials(results)
    summary["seed"] = args.seed
    summary["config"] = json.loads(canonical_json(cfg))
    summary["backend"] = filtering.backend_name()
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(results)} trial file(s) and summary.json to {out_dir}")
    return 0 if all(r.ok for r in results) else 1


# -- counterexample ---------------------------------------------------------


def cmd_counterexample(args) -> int:
    cfg = _load(args)
    section = dict(cfg["counterexample"])
    if args.k is not None:
        section["k"] = args.k
    if getattr(args, "lambda_") is not None:
        section["lambda"] = args.lambda_
    if args.terms is not None:
        section["terms"] = args.terms
    if args.override_exponent is not None:
        section["override_exponent"] = args.override_exponent

    ce_cfg = diagnostics.CounterexampleConfig(
        k=section["k"], lam=section["lambda"], t=section["t"], m=section["m"],
        n_terms=section["terms"], zeta1=section["zeta1"], zeta2=section["zeta2"],
        local_nodes=section["local_nodes"],
        override_exponent=section.get("override_exponent"))
    result = diagnostics.dahlberg_terms(ce_cfg)

    rows = result.rows()
    lines = [["n", "A_n", "B_n", "ratio_A", "ratio_B"]]
    for row in rows:
        lines.append([str(row["n"]), _fmt(row["A_n"]), _fmt(row["B_n"]),
                      _fmt(row["ratio_A"]), _fmt(row["ratio_B"])])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh).writerows(lines)
    else:
        csv.writer(sys.stdout).writerows(lines)
    log.info("ratio_A -> %.6f (limit %.6f), ratio_B -> %.6f (limit %.6f), "
             "window bound %.6f, chart-side tail <= %.3e",
             result.ratio_a[-1], result.limit_a, result.ratio_b[-1],
             result.limit_b, result.epsilon_window, result.a_tail_bound)
    return 0


# -- entry ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infogeo",
                                     description="Deformed-chart information geometry toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (defaults used when omitted)")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads")

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--filter", help="run only suites whose name contains this")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("geometry", parents=[common], help="divergence/tensor report")
    p.set_defaults(fn=cmd_geometry)

    p = sub.add_parser("filter", parents=[common], help="filtering comparison runs")
    p.add_argument("--trials", type=int, default=1, help="number of replications")
    p.set_defaults(fn=cmd_filter)

    p = sub.add_parser("counterexample", parents=[common], help="bump-series table")
    p.add_argument("--k", type=int, help="derivative order")
    p.add_argument("--lambda", dest="lambda_", type=float, help="integrability exponent")
    p.add_argument("--terms", type=int, help="number of series terms")
    p.add_argument("--override-exponent", type=int,
                   help="replace the derivative order inside the amplitude base")
    p.set_defaults(fn=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
