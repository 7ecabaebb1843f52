"""Command-line driver.

    isoperim verify --suite core --seed 42 --resolution 256 --out out/
    isoperim weights analyze --space euclidean_box --weight norm
    isoperim profile --kind sphere --n 2 --eval 0.5
    isoperim report diff out1/report.json out2/report.json

Exit codes: 0 all checks pass, 1 at least one violation, 2 usage or config
error, 3 a case raised (numeric failure, degenerate extrapolation, ...).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from itertools import repeat
from pathlib import Path

import numpy as np

from . import __version__
from .errors import IsoperimError
from .profiles import PROFILE_KINDS, make_profile
from .spaces import Field, build_space
from .suites import SUITES, Settings, run_case, suite_cases
from .weights import analyze_weight, construct_weight, prototype_g

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3

CONFIG_KEYS = {"suite", "seed", "resolution", "tolerance", "exact_tolerance", "out", "jobs", "cases"}


class ConfigError(Exception):
    pass


# ----------------------------------------------------------------------------
# JSON helpers


def jsonable(obj):
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def report_hash(run: dict, results: list) -> str:
    body = {"run": {k: v for k, v in run.items() if k != "hash"}, "results": results}
    return hashlib.sha256(canonical(body).encode()).hexdigest()


# ----------------------------------------------------------------------------
# configuration


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r}")
    return cfg


def _typed(cfg: dict, key: str, kind, check=None):
    if key not in cfg:
        return None
    value = cfg[key]
    ok = isinstance(value, kind) and not (kind is int and isinstance(value, bool))
    if ok and check is not None:
        ok = check(value)
    if not ok:
        raise ConfigError(f"invalid value for config key {key!r}: {value!r}")
    return value


def resolve_settings(args, cfg: dict):
    """Merge config and flags (flags win); returns (settings, suite, cases, out, jobs)."""
    def pick(name, kind, check=None):
        flag = getattr(args, name, None)
        return flag if flag is not None else _typed(cfg, name, kind, check)

    suite = pick("suite", str, lambda v: v in SUITES) or "core"
    seed = pick("seed", int, lambda v: v >= 0)
    resolution = pick("resolution", int, lambda v: v >= 16)
    tolerance = pick("tolerance", (int, float), lambda v: 0 < v < 1)
    exact = _typed(cfg, "exact_tolerance", (int, float), lambda v: 0 < v < 1)
    defaults = Settings()
    settings = Settings(seed=defaults.seed if seed is None else seed,
                        resolution=defaults.resolution if resolution is None else resolution,
                        tolerance=defaults.tolerance if tolerance is None else float(tolerance),
                        exact_tolerance=defaults.exact_tolerance if exact is None else float(exact))
    cases = suite_cases(suite)
    chosen = _typed(cfg, "cases", list)
    if chosen is not None:
        unknown = [c for c in chosen if c not in cases]
        if unknown:
            raise ConfigError(f"case {unknown[0]!r} is not in suite {suite!r}")
        cases = [c for c in cases if c in chosen]
    out = pick("out", str) or "isoperim-out"
    jobs = getattr(args, "jobs", None)
    if jobs is None:
        jobs = _typed(cfg, "jobs", int, lambda v: v >= 1)
    if jobs is None:
        env = os.environ.get("ISOPERIM_JOBS")
        if env:
            try:
                jobs = int(env)
            except ValueError as exc:
                raise ConfigError(f"ISOPERIM_JOBS must be an integer, got {env!r}") from exc
    jobs = max(1, jobs or 1)
    return settings, suite, cases, out, jobs


# ----------------------------------------------------------------------------
# verify


def _run_one(name: str, settings: Settings) -> list[dict]:
    try:
        rows = run_case(name, settings)
    except (IsoperimError, ArithmeticError, ValueError, FloatingPointError) as exc:
        rows = [{"name": name, "kind": "error", "pass": False,
                 "error": f"{type(exc).__name__}: {exc}"}]
    for i, row in enumerate(rows):
        row["case"] = name
        row["id"] = f"{name}#{i:02d}"
    return rows


def run_cases(cases: list[str], settings: Settings, jobs: int) -> list[dict]:
    """Run cases, possibly in parallel; results are merged in case order."""
    if jobs == 1 or len(cases) <= 1:
        chunks = [_run_one(c, settings) for c in cases]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_one, cases, repeat(settings)))
    return [row for chunk in chunks for row in chunk]


def _csv_value(x) -> str:
    x = float(x)
    return repr(x) if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))


def write_outputs(out: Path, run: dict, rows: list[dict], meta: dict) -> dict:
    curves = out / "curves"
    curves.mkdir(parents=True, exist_ok=True)
    results = []
    for row in rows:
        curve = row.pop("_curve", None)
        if curve:
            fname = row["id"].replace("#", "-") + ".csv"
            with open(curves / fname, "w", newline="") as fh:
                wr = csv.writer(fh, lineterminator="\n")
                wr.writerow(["r", "lhs", "rhs", "ratio"])
                for c in curve:
                    wr.writerow([_csv_value(c[k]) for k in ("r", "lhs", "rhs", "ratio")])
            row["curve"] = f"curves/{fname}"
        results.append(jsonable(row))
    run = dict(run)
    run["hash"] = report_hash(run, results)
    report = {"run": run, "results": results}
    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n")
    (out / "metadata.json").write_text(json.dumps(jsonable(meta), sort_keys=True, indent=2) + "\n")
    return report


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    settings, suite, cases, out, jobs = resolve_settings(args, cfg)
    t0 = time.time()
    rows = run_cases(cases, settings, jobs)
    run = {"suite": suite, **asdict(settings)}
    meta = {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "jobs": jobs,
            "elapsed_s": round(time.time() - t0, 3), "version": __version__}
    report = write_outputs(Path(out), run, rows, meta)
    errors = [r for r in report["results"] if r["kind"] == "error"]
    failures = [r for r in report["results"] if not r["pass"] and r["kind"] != "error"]
    for r in errors + failures:
        tag = "ERROR" if r["kind"] == "error" else "FAIL"
        print(f"{tag} {r['id']} {r['name']}" + (f": {r['error']}" if "error" in r else ""))
    print(f"{len(report['results'])} checks, {len(failures)} failed, {len(errors)} errors; "
          f"report {Path(out) / 'report.json'} hash {report['run']['hash'][:16]}")
    if errors:
        return EXIT_ERROR
    return EXIT_FAIL if failures else EXIT_OK


# ----------------------------------------------------------------------------
# weights analyze, profile, report diff


def _space_from_args(args):
    params = {"resolution": args.resolution or 256}
    if args.space in ("euclidean_box", "sphere"):
        params["n"] = args.n
    if args.space in ("euclidean_box", "half_plane") and args.halfwidth is not None:
        params["halfwidth"] = args.halfwidth
    if args.space == "log_concave":
        params["p"] = args.p
    return build_space(args.space, **params)


def _profile_for(space):
    kind = {"euclidean_box": "euclidean", "half_plane": "half_plane"}.get(space.kind, space.kind)
    if kind == "euclidean":
        return make_profile(kind, n=space.dim)
    if kind == "sphere":
        return make_profile(kind, n=space.dim)
    if kind == "log_concave":
        return make_profile(kind, p=space.params["p"])
    return make_profile(kind)


def cmd_weights(args) -> int:
    space = _space_from_args(args)
    profile = _profile_for(space)
    if args.weight == "norm":
        pts = space.points
        if space.kind == "sphere":
            north = np.eye(pts.shape[1])[-1]
            dist = np.arccos(np.clip(pts @ north, -1.0, 1.0))
        else:
            dist = np.linalg.norm(pts, axis=1)
        w = Field(args.scale * dist)
    else:
        end = 200.0 if space.infinite else None
        g = prototype_g(profile, domain_end=end)
        w = construct_weight(space, g, profile=profile)
        w = Field(args.scale * w.values)
    analysis = analyze_weight(w, space, profile)
    print(json.dumps(jsonable(analysis.to_dict()), sort_keys=True, indent=2))
    return EXIT_OK


def cmd_profile(args) -> int:
    params = {}
    if args.kind in ("euclidean", "sphere"):
        params["n"] = args.n
    if args.kind == "log_concave":
        params["p"] = args.p
    prof = make_profile(args.kind, **params)
    if not args.eval and not args.phi:
        print(prof.label)
        return EXIT_OK
    for t in args.eval or []:
        print(repr(float(prof(t))))
    for t in args.phi or []:
        print(repr(float(prof.phi(t))))
    return EXIT_OK


def _load_report(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report {path}: {exc}") from exc


def cmd_report_diff(args) -> int:
    a, b = _load_report(args.a), _load_report(args.b)
    differences = []
    for key in sorted(set(a.get("run", {})) | set(b.get("run", {}))):
        if key != "hash" and a["run"].get(key) != b["run"].get(key):
            differences.append(f"run.{key}: {a['run'].get(key)!r} != {b['run'].get(key)!r}")
    ra = {r["id"]: r for r in a.get("results", [])}
    rb = {r["id"]: r for r in b.get("results", [])}
    for rid in sorted(set(ra) | set(rb)):
        if rid not in ra or rid not in rb:
            differences.append(f"{rid}: only in {'first' if rid in ra else 'second'} report")
        elif canonical(ra[rid]) != canonical(rb[rid]):
            keys = sorted(k for k in set(ra[rid]) | set(rb[rid]) if ra[rid].get(k) != rb[rid].get(k))
            flip = " (pass changed)" if ra[rid].get("pass") != rb[rid].get("pass") else ""
            differences.append(f"{rid}: differs in {', '.join(keys)}{flip}")
    for line in differences:
        print(line)
    print("identical" if not differences else f"{len(differences)} difference(s)")
    return EXIT_OK if not differences else EXIT_FAIL


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoperim", description="Numerical verification of isoperimetric "
                                     "weights, profiles, and the inequalities they control.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite and write report.json and curves/")
    v.add_argument("--suite", choices=SUITES)
    v.add_argument("--seed", type=int)
    v.add_argument("--resolution", type=int)
    v.add_argument("--tolerance", type=float)
    v.add_argument("--config", help="JSON config; flags override its values")
    v.add_argument("--out", help="output directory (default isoperim-out)")
    v.add_argument("--jobs", type=int, help="worker processes (default $ISOPERIM_JOBS or 1)")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("weights", help="weight diagnostics")
    wsub = w.add_subparsers(dest="action", required=True)
    wa = wsub.add_parser("analyze", help="C_iso, Marcinkiewicz norm and DT constant of a weight")
    wa.add_argument("--space", choices=("euclidean_box", "half_plane", "sphere", "log_concave"),
                    default="euclidean_box")
    wa.add_argument("--n", type=int, default=2)
    wa.add_argument("--p", type=float, default=2.0)
    wa.add_argument("--halfwidth", type=float)
    wa.add_argument("--resolution", type=int)
    wa.add_argument("--weight", choices=("norm", "prototype"), default="norm",
                    help="norm: distance to the origin (north pole on spheres); "
                         "prototype: weight built from the prototype g")
    wa.add_argument("--scale", type=float, default=1.0)
    wa.set_defaults(func=cmd_weights)

    p = sub.add_parser("profile", help="evaluate an isoperimetric profile or its Phi")
    p.add_argument("--kind", choices=PROFILE_KINDS, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--eval", type=float, action="append", metavar="T")
    p.add_argument("--phi", type=float, action="append", metavar="T")
    p.set_defaults(func=cmd_profile)

    r = sub.add_parser("report", help="report utilities")
    rsub = r.add_subparsers(dest="action", required=True)
    rd = rsub.add_parser("diff", help="compare two report.json files")
    rd.add_argument("a")
    rd.add_argument("b")
    rd.set_defaults(func=cmd_report_diff)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"isoperim: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IsoperimError) as exc:
        if args.command == "verify":
            print(f"isoperim: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_ERROR
        print(f"isoperim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
