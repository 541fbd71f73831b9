"""Command-line surface: analytic limit tables, flip-time sampling,
constructions, and percolation experiments, all reproducible from a run
manifest.

Precedence for every option: command-line flag, then (for the base seed) the
THRESHOLDWINDOW_SEED environment variable, then the --config JSON file, then
the built-in default.  Every command writes <out>.manifest.json recording the
resolved parameters and SHA-256 digests of all outputs; `rerun --manifest`
re-executes the run and verifies the digests.

Exit codes: 0 success, 2 validation error, 3 numerical tolerance not reached,
4 degenerate (no-flip) function.
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

import numpy as np

from . import __version__, kernels, montecarlo, percolation
from .construct import FiniteMeasure, build_plain, build_transitive
from .errors import NoFlipError, ToleranceError, UnsupportedLimitError
from .families import FamilySpec, limit_law

SEED_ENV = "THRESHOLDWINDOW_SEED"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3
EXIT_NOFLIP = 4

# families criteria 1-3 pin KS tolerances for; others get a generic 3x DKW gate
KS_TOLERANCES = {"majority": 0.02, "tribes": 0.03, "iterated-majority": 0.03}


def parse_grid(text: str) -> np.ndarray:
    """Parse 'lo:hi:step' into an inclusive grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must be lo:hi:step")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError("grid needs step > 0 and hi >= lo")
    return np.arange(lo, hi + step * 0.5, step)


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        writer.writerows(rows)


def write_json(path: str, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(out_prefix: str, command: str, params: dict, seed, outputs,
                   started: float) -> str:
    path = out_prefix + ".manifest.json"
    payload = {
        "command": command,
        "params": params,
        "base_seed": seed,
        "artifact_version": __version__,
        "kernel_backend": kernels.get_backend(),
        "wallclock_sec": round(time.time() - started, 3),
        "outputs": {os.path.basename(p): _sha256(p) for p in outputs},
    }
    write_json(path, payload)
    return path


FAMILY_ALIASES = {"itermaj": "iterated-majority"}


def family_spec_from_args(args) -> FamilySpec:
    family = FAMILY_ALIASES.get(args.family, args.family)
    return FamilySpec(family=family, n=args.n, p_bias=args.p_bias,
                      m=args.m, height=args.height, vertices=args.vertices,
                      p=args.p)


def _size_for_normalization(spec: FamilySpec) -> int:
    if spec.family in ("triangle", "connectivity", "clique"):
        return spec.vertices
    return spec.bit_count


def cmd_limit(args) -> int:
    spec = family_spec_from_args(args)
    extra = {}
    if spec.family == "clique":
        if args.p_n is None or args.lam is None:
            raise UnsupportedLimitError(
                "clique limits need --p-n and --lam (admissible sequence)")
        extra = {"p_n": args.p_n, "lam": args.lam}
    law = limit_law(spec, **extra)
    grid = parse_grid(args.xgrid)
    values = np.asarray(law.cdf(grid), dtype=float)
    size = _size_for_normalization(spec) if _has_size(spec) else None
    rows = [(spec.family, size if size is not None else "", repr(float(x)),
             repr(float(v))) for x, v in zip(grid, values)]
    out = args.out + ".csv"
    write_csv(out, ("family", "n", "x", "value"), rows)
    write_manifest(args.out, "limit", _limit_params(args), None, [out],
                   args._started)
    print(f"wrote {out}: law {law.name!r} on {len(grid)} grid points")
    return EXIT_OK


def _has_size(spec: FamilySpec) -> bool:
    try:
        spec.bit_count
        return True
    except ValueError:
        return False


def _limit_params(args):
    return {"family": args.family, "n": args.n, "p_bias": args.p_bias,
            "m": args.m, "height": args.height, "vertices": args.vertices,
            "p": args.p, "p_n": args.p_n, "lam": args.lam,
            "xgrid": args.xgrid, "out": args.out}


def cmd_sample(args) -> int:
    spec = family_spec_from_args(args)
    sample = montecarlo.sample_flip_times(spec, args.N, args.seed,
                                          workers=args.workers)
    rows = [(spec.family, sample.n, args.seed, k, repr(float(v)))
            for k, v in enumerate(sample.values)]
    sample_path = args.out + "_sample.csv"
    write_csv(sample_path, ("family", "n", "seed", "index", "value"), rows)
    summary = {
        "family": spec.family,
        "n": sample.n,
        "N": args.N,
        "seed": args.seed,
        "mean": float(sample.values.mean()),
    }
    size = _size_for_normalization(spec)
    try:
        law = limit_law(spec)
    except UnsupportedLimitError:
        law = None
        summary["ks_vs_limit"] = None
    if law is not None:
        a_n, b_n = law.normalization(size)
        rescaled = montecarlo.rescale(sample, a_n, b_n)
        ks = montecarlo.ks_distance(montecarlo.EmpiricalCdf(rescaled.values), law)
        dkw = montecarlo.dkw_bound(args.N, 0.99)
        tolerance = KS_TOLERANCES.get(spec.family, 3.0 * dkw)
        summary.update({
            "a_n": a_n, "b_n": b_n, "limit": law.name,
            "ks_vs_limit": ks, "dkw_99": dkw,
            "ks_tolerance": tolerance,
            "passes_tolerance": bool(ks < tolerance),
        })
        if args.rescale:
            rows = [(spec.family, sample.n, args.seed, k, repr(float(v)))
                    for k, v in enumerate(rescaled.values)]
            rescaled_path = args.out + "_rescaled.csv"
            write_csv(rescaled_path, ("family", "n", "seed", "index", "value"),
                      rows)
    summary_path = args.out + "_summary.json"
    write_json(summary_path, summary)
    outputs = [sample_path, summary_path]
    if law is not None and args.rescale:
        outputs.append(args.out + "_rescaled.csv")
    write_manifest(args.out, "sample", _sample_params(args), args.seed,
                   outputs, args._started)
    if law is not None:
        print(f"KS vs {law.name}: {summary['ks_vs_limit']:.5f} "
              f"(tolerance {summary['ks_tolerance']:.5f}, "
              f"{'pass' if summary['passes_tolerance'] else 'FAIL'})")
    else:
        print(f"sampled {args.N} flip times (no quantitative limit law)")
    return EXIT_OK


def _sample_params(args):
    return {"family": args.family, "n": args.n, "p_bias": args.p_bias,
            "m": args.m, "height": args.height, "vertices": args.vertices,
            "p": args.p, "N": args.N, "seed": args.seed,
            "rescale": args.rescale, "workers": args.workers, "out": args.out}


def cmd_construct(args) -> int:
    with open(args.measure) as fh:
        measure_payload = json.load(fh)
    measure = FiniteMeasure.from_pairs(measure_payload["atoms"])
    if args.mode == "plain":
        f = build_plain(measure, args.n, args.a_n)
    else:
        f = build_transitive(measure, args.n, args.a_n, args.budget, args.seed)
    desc = f.descriptor
    descriptor = {
        "mode": desc.mode,
        "n": desc.n,
        "a_n": desc.a_n,
        "atoms": [[x, q] for x, q in measure.atoms],
        "global_thresholds": list(desc.global_thresholds),
        "block_size": desc.block_size,
        "block_thresholds": [t if math.isfinite(t) else None
                             for t in desc.block_thresholds],
        "window_length": desc.window_length,
        "window_strings": list(desc.window_strings),
        "calibration": desc.calibration,
        "scaling_warnings": list(desc.scaling_warnings),
    }
    verification = None
    if args.N > 0:
        sample = montecarlo.sample_flip_times(f, args.N, args.seed,
                                              workers=args.workers)
        rescaled = montecarlo.rescale(sample, args.a_n, 0.5)
        xs = measure.positions
        grid = np.concatenate([xs - 1.0, xs + 1.0])
        ecdf = montecarlo.EmpiricalCdf(rescaled.values)
        verification = {
            "N": args.N,
            "checkpoints": [
                {"x": float(x), "empirical": float(ecdf(x)),
                 "target": float(measure.cdf(x))}
                for x in sorted(grid)],
        }
    payload = {"descriptor": descriptor, "verification": verification}
    out = args.out + ".json"
    write_json(out, payload)
    write_manifest(args.out, "construct", _construct_params(args), args.seed,
                   [out], args._started)
    print(f"wrote {out} ({desc.mode} construction on {desc.n} bits)")
    return EXIT_OK


def _construct_params(args):
    return {"measure": args.measure, "n": args.n, "a_n": args.a_n,
            "mode": args.mode, "budget": args.budget, "N": args.N,
            "seed": args.seed, "workers": args.workers, "out": args.out}


def cmd_percolation(args) -> int:
    params = _percolation_params(args)
    outputs = []
    if args.subcommand == "flip":
        grid = percolation.build_lattice(args.n)
        values = np.empty(args.N)
        from . import rng as _rng
        for k in range(args.N):
            labels = _rng.stream(args.seed, k).random(grid.num_sites)
            values[k] = percolation.crossing_flip_time(grid, labels).value
        r = percolation.window_width(args.n, args.r_choice)
        rows = [(args.n, args.seed, k, repr(float(v)),
                 repr(float((v - 0.5) / r)))
                for k, v in enumerate(values)]
        out = args.out + "_flip.csv"
        write_csv(out, ("n", "seed", "index", "value", "rescaled"), rows)
        outputs.append(out)
        summary = {"n": args.n, "N": args.N, "r": r,
                   "rescaling": {"a": 1.0 / r, "b": 0.5},
                   "median": float(np.median(values))}
        spath = args.out + "_summary.json"
        write_json(spath, summary)
        outputs.append(spath)
        print(f"median flip time {summary['median']:.4f} (r={r:.5f})")
    elif args.subcommand == "f-of-lambda":
        lams = parse_grid(args.lambdas)
        points, r = percolation.near_critical_crossing_curve(
            args.n, lams, args.r_choice, args.N, args.seed,
            estimator=args.estimator)
        rows = [(args.n, repr(float(p.lam)), repr(r), repr(p.estimate),
                 repr(p.stderr), args.N, args.seed) for p in points]
        out = args.out + "_f_of_lambda.csv"
        write_csv(out, ("n", "lambda", "r", "estimate", "stderr", "N", "seed"),
                  rows)
        outputs.append(out)
        print(f"f-hat over {len(points)} lambda values "
              f"(monotone: {all(b.estimate >= a.estimate for a, b in zip(points, points[1:]))})")
    elif args.subcommand == "g-of-t":
        ts = parse_grid(args.ts)
        points, r = percolation.dynamical_no_crossing_prob(
            args.n, ts, args.r_choice, args.N, args.seed)
        rows = [(args.n, repr(float(p.t)), repr(r), repr(p.estimate),
                 repr(p.stderr), args.N, args.seed) for p in points]
        out = args.out + "_g_of_t.csv"
        write_csv(out, ("n", "t", "r", "estimate", "stderr", "N", "seed"), rows)
        outputs.append(out)
        print(f"g-hat over {len(points)} times")
    elif args.subcommand == "pivotal":
        est = percolation.estimate_pivotal_count(args.n, args.N, args.seed,
                                                 method=args.method)
        out = args.out + "_pivotal.json"
        write_json(out, {"n": est.n, "N": est.num_samples, "mean": est.mean,
                         "stderr": est.stderr, "method": args.method})
        outputs.append(out)
        print(f"mean pivotal count {est.mean:.3f} +- {est.stderr:.3f}")
    else:
        raise ValueError(f"unknown percolation subcommand {args.subcommand!r}")
    write_manifest(args.out, f"percolation {args.subcommand}", params,
                   args.seed, outputs, args._started)
    return EXIT_OK


def _percolation_params(args):
    return {"subcommand": args.subcommand, "n": args.n, "N": args.N,
            "seed": args.seed, "r_choice": args.r_choice,
            "lambdas": getattr(args, "lambdas", None),
            "ts": getattr(args, "ts", None),
            "estimator": getattr(args, "estimator", None),
            "method": getattr(args, "method", None), "out": args.out}


def cmd_rerun(args) -> int:
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    params = manifest["params"]
    command = manifest["command"].split()
    argv = [command[0]]
    if len(command) > 1:
        argv.append(command[1])
    for key, value in params.items():
        if key == "subcommand" or value is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv.append(f"{flag}={value}")   # '=' form survives leading dashes
    code = main(argv)
    if code != EXIT_OK:
        return code
    out_dir = os.path.dirname(os.path.abspath(args.manifest))
    for name, digest in manifest["outputs"].items():
        fresh = _sha256(os.path.join(out_dir, name))
        if fresh != digest:
            print(f"rerun mismatch for {name}: {fresh} != {digest}",
                  file=sys.stderr)
            return 1
    print(f"rerun reproduced {len(manifest['outputs'])} outputs byte-for-byte")
    return EXIT_OK


def _add_family_options(parser):
    parser.add_argument("--family", required=True)
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--p-bias", dest="p_bias", type=float, default=None)
    parser.add_argument("--m", type=int, default=None)
    parser.add_argument("--height", type=int, default=None)
    parser.add_argument("--vertices", type=int, default=None)
    parser.add_argument("--p", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thresholdwindow",
        description="Scaling limits of threshold flip times for monotone "
                    "Boolean functions")
    parser.add_argument("--config", default=None,
                        help="JSON file supplying defaults for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p_limit = sub.add_parser("limit", help="tabulate an analytic limit CDF")
    _add_family_options(p_limit)
    p_limit.add_argument("--xgrid", default=None)
    p_limit.add_argument("--p-n", dest="p_n", type=float, default=None)
    p_limit.add_argument("--lam", type=float, default=None)
    p_limit.add_argument("--out", default=None)

    p_sample = sub.add_parser("sample", help="sample flip times")
    _add_family_options(p_sample)
    p_sample.add_argument("--N", type=int, default=None)
    p_sample.add_argument("--seed", type=int, default=None)
    p_sample.add_argument("--rescale", action="store_true", default=None)
    p_sample.add_argument("--workers", type=int, default=None)
    p_sample.add_argument("--out", default=None)

    p_con = sub.add_parser("construct", help="build a universal-limit function")
    p_con.add_argument("--measure", default=None,
                       help='JSON file {"atoms": [[x, q], ...]}')
    p_con.add_argument("--n", type=int, default=None)
    p_con.add_argument("--a-n", dest="a_n", type=float, default=None)
    p_con.add_argument("--mode", choices=("plain", "transitive"), default=None)
    p_con.add_argument("--budget", type=int, default=None)
    p_con.add_argument("--N", type=int, default=None)
    p_con.add_argument("--seed", type=int, default=None)
    p_con.add_argument("--workers", type=int, default=None)
    p_con.add_argument("--out", default=None)

    p_perc = sub.add_parser("percolation", help="near-critical percolation runs")
    p_perc.add_argument("subcommand",
                        choices=("flip", "f-of-lambda", "g-of-t", "pivotal"))
    p_perc.add_argument("--n", type=int, default=None)
    p_perc.add_argument("--N", type=int, default=None)
    p_perc.add_argument("--seed", type=int, default=None)
    p_perc.add_argument("--r-choice", dest="r_choice",
                        choices=percolation.R_CHOICES, default=None)
    p_perc.add_argument("--lambdas", default=None)
    p_perc.add_argument("--ts", default=None)
    p_perc.add_argument("--estimator", choices=("raw", "paired"), default=None)
    p_perc.add_argument("--method", choices=("fast", "brute"), default=None)
    p_perc.add_argument("--out", default=None)

    p_rerun = sub.add_parser("rerun", help="re-execute a manifest and verify")
    p_rerun.add_argument("--manifest", required=True)
    return parser


DEFAULTS = {
    "limit": {"xgrid": "-3:3:0.1", "out": "limit", "p_bias": 0.5, "m": 3,
              "height": 1, "p": 0.5},
    "sample": {"N": 1000, "seed": 1, "rescale": False, "workers": 1,
               "out": "sample", "p_bias": 0.5, "m": 3, "height": 1, "p": 0.5},
    "construct": {"mode": "plain", "budget": 4000, "N": 0, "seed": 1,
                  "workers": 1, "out": "construct"},
    "percolation": {"N": 1000, "seed": 1, "r_choice": "empirical",
                    "estimator": "raw", "method": "fast", "out": "percolation",
                    "lambdas": "-1.5:1.5:0.25", "ts": "0:10:1"},
}


def resolve_options(args):
    """flag > THRESHOLDWINDOW_SEED (seed only) > config file > default."""
    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    defaults = DEFAULTS.get(args.command, {})
    for key, value in vars(args).items():
        if key in ("command", "config") or value is not None:
            continue
        if key == "seed" and os.environ.get(SEED_ENV):
            setattr(args, key, int(os.environ[SEED_ENV]))
        elif key in config:
            setattr(args, key, config[key])
        elif key in defaults:
            setattr(args, key, defaults[key])
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args = resolve_options(args)
    args._started = time.time()
    handlers = {"limit": cmd_limit, "sample": cmd_sample,
                "construct": cmd_construct, "percolation": cmd_percolation,
                "rerun": cmd_rerun}
    try:
        return handlers[args.command](args)
    except NoFlipError as exc:
        print(f"degenerate function: {exc}", file=sys.stderr)
        return EXIT_NOFLIP
    except ToleranceError as exc:
        print(f"tolerance not reached: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ValueError, UnsupportedLimitError, KeyError, OSError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
