"""Command-line interface: ``dtmsig {gen,signature,test,mc,analytic}``.

Exit codes: 0 success (whatever the test decides), 2 invalid input or I/O
failure, 3 degenerate bootstrap under ``--strict``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (UniformShape, dtm_min, epsilon_m, standardness_constant,
                       uniform_volume_lower_bound, unit_ball_volume)
from .dtm import check_mass
from .isomorphism_test import (DegenerateBootstrapWarning, TestParams, estimate_level_power,
                               run_test)
from .measure_space import (MeasureSpaceError, load_distance_matrix, load_point_cloud,
                            load_weights, save_distance_matrix, save_point_cloud, save_weights)
from .signature import DTMCache
from .synth import GeneratorSpec, sample

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DEGENERATE = 3


class CLIError(Exception):
    pass


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest(subcommand: str, params: dict, inputs=(), outputs=(), seed=None, started=None) -> dict:
    return {
        "subcommand": subcommand,
        "version": __version__,
        "parameters": params,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "seed": seed,
        "timings": {"wall_seconds": None if started is None else round(time.perf_counter() - started, 6)},
    }


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _parse_kv(text: str) -> tuple[str, dict]:
    """'spiral:v=10,sigma=0.03' -> ('spiral', {'v': 10.0, 'sigma': 0.03})"""
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise CLIError(f"malformed parameter {item!r} in {text!r}")
        try:
            params[key.strip()] = float(value) if key.strip() != "which" else value.strip()
        except ValueError:
            raise CLIError(f"non-numeric value in {item!r}") from None
    return kind.strip(), params


def parse_shape(text: str) -> UniformShape:
    kind, p = _parse_kv(text)
    if "dim" not in p:
        raise CLIError(f"shape {text!r} needs dim=")
    dim = int(p.pop("dim"))
    try:
        return UniformShape(kind, dim, **p)
    except TypeError as exc:
        raise CLIError(f"bad shape parameters in {text!r}: {exc}") from None


def parse_generator(text: str, n: int, seed: int) -> GeneratorSpec:
    """'spiral:v=20' or 'uniform_shape:shape=ball,dim=2,radius=1'."""
    if text.partition(":")[0].strip() == "uniform_shape":
        shape_text = text.partition(":")[2].replace("shape=", "", 1)
        shape_kind, _, rest = shape_text.partition(",")
        return GeneratorSpec("uniform_shape", n, seed, {"shape": parse_shape(f"{shape_kind}:{rest}")})
    kind, p = _parse_kv(text)
    return GeneratorSpec(kind, n, seed, p)


def _load_space(path: str, matrix: bool, weights: str | None = None, strict_metric: bool = False):
    space = load_distance_matrix(path, strict_metric=strict_metric) if matrix else load_point_cloud(path)
    if weights:
        space = space.with_weights(load_weights(weights))
    return space


def cmd_gen(args) -> int:
    started = time.perf_counter()
    if args.kind == "spiral":
        params = {"v": args.v, "sigma": args.sigma}
    elif args.kind == "uniform_shape":
        params = {"shape": parse_shape(args.shape)}
    elif args.kind == "gaussian_mixture":
        means = [[float(x) for x in row.split(",")] for row in args.means.split(";")]
        params = {"means": means, "sigma": args.sigma}
    else:
        params = {"which": args.which}
    spec = GeneratorSpec(args.kind, args.n, args.seed, params)
    space = sample(spec)
    outputs = [args.out]
    if space.is_matrix:
        save_distance_matrix(space, args.out)
        wpath = str(Path(args.out).with_suffix(".weights.csv"))
        save_weights(space, wpath)
        outputs.append(wpath)
    else:
        save_point_cloud(space, args.out)
    manifest = _manifest("gen", spec.describe(), outputs=outputs, seed=args.seed, started=started)
    _emit({"manifest": manifest}, args.manifest)
    return EXIT_OK


def cmd_signature(args) -> int:
    started = time.perf_counter()
    m = check_mass(args.m)
    space = _load_space(args.input, args.matrix, args.weights, args.strict_metric)
    cache = DTMCache(space, m, workers=args.threads)
    sig = cache.full()
    out = Path(args.out)
    cdf_out = Path(args.cdf_out) if args.cdf_out else out.with_suffix(".cdf.csv")
    sig.dist.to_csv(out)
    sig.dist.cdf_curve_to_csv(cdf_out, n_points=args.grid)
    outputs = [out, cdf_out]
    if args.dtm_out:
        with open(args.dtm_out, "w") as fh:
            fh.write("index,value\n")
            for i, v in enumerate(cache.values):
                fh.write(f"{i},{float(v)!r}\n")
        outputs.append(args.dtm_out)
    inputs = [args.input] + ([args.weights] if args.weights else [])
    report = {"m": m, "n_points": space.n_points, "n_atoms": len(sig.dist), "mean": sig.mean()}
    manifest = _manifest("signature", {"m": m, "grid": args.grid}, inputs, outputs, started=started)
    _emit({"manifest": manifest, "report": report}, args.report)
    return EXIT_OK


def _params(args) -> TestParams:
    return TestParams(m=args.m, n=args.n, n_mc=args.nmc, alpha=args.alpha, seed=args.seed)


def cmd_test(args) -> int:
    started = time.perf_counter()
    params = _params(args)
    P = _load_space(args.p, args.matrix, args.weights_p, args.strict_metric)
    Q = _load_space(args.q, args.matrix, args.weights_q, args.strict_metric)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBootstrapWarning)
        report = run_test(P, Q, params, n_jobs=args.threads)
    outputs = []
    if args.boot_out:
        np.savetxt(args.boot_out, report.boot, delimiter=",", header="boot", comments="", fmt="%.17g")
        outputs.append(args.boot_out)
    inputs = [args.p, args.q] + [w for w in (args.weights_p, args.weights_q) if w]
    manifest = _manifest("test", _params_dict(params), inputs, outputs, params.seed, started)
    _emit({"manifest": manifest, "report": report.to_dict()}, args.out)
    for msg in report.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    if args.strict and report.warnings:
        return EXIT_DEGENERATE
    return EXIT_OK


def _params_dict(params: TestParams) -> dict:
    return {"m": params.m, "n": params.n, "n_mc": params.n_mc, "alpha": params.alpha,
            "seed": params.seed}


def cmd_mc(args) -> int:
    started = time.perf_counter()
    if args.reps < 1:
        raise CLIError("reps must be >= 1")
    params = _params(args)
    params.check_sizes(args.size, args.size)
    gen_p = parse_generator(args.gen_p, args.size, 0)
    gen_q = parse_generator(args.gen_q, args.size, 0)
    res = estimate_level_power(gen_p, gen_q, params, args.reps, n_jobs=args.threads)
    doc_params = _params_dict(params) | {"reps": args.reps, "size": args.size,
                                         "gen_p": gen_p.describe(), "gen_q": gen_q.describe()}
    manifest = _manifest("mc", doc_params, seed=params.seed, started=started)
    _emit({"manifest": manifest, "report": {"dtm": {"rate": res.rate, "ci": list(res.ci),
                                                     "rejections": res.rejections},
                                             "ks": {"rate": res.ks_rate, "ci": list(res.ks_ci),
                                                    "rejections": res.ks_rejections},
                                             "reps": res.reps}}, args.out)
    return EXIT_OK


def _try(fn, *a):
    try:
        return fn(*a)
    except ValueError as exc:
        return {"error": str(exc)}


def cmd_analytic(args) -> int:
    started = time.perf_counter()
    shape = parse_shape(args.shape)
    m = check_mass(args.m)
    report = {
        "shape": shape.describe(),
        "omega_d": unit_ball_volume(shape.dim),
        "epsilon_m": epsilon_m(shape, m),
        "dtm_min": _try(dtm_min, shape, m),
        "standardness": _try(lambda s: list(standardness_constant(s)), shape),
    }
    if args.other:
        other = parse_shape(args.other)
        report["other"] = other.describe()
        report["volume_lower_bound"] = _try(uniform_volume_lower_bound, shape, other, m)
    manifest = _manifest("analytic", {"shape": args.shape, "other": args.other, "m": m},
                         started=started)
    _emit({"manifest": manifest, "report": report}, args.out)
    return EXIT_OK


def _add_test_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=float, default=0.05, help="mass parameter in (0,1]")
    p.add_argument("--n", type=int, default=20, help="subsample size")
    p.add_argument("--nmc", type=int, default=1000, help="bootstrap replicates per space")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="JSON report path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtmsig", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a synthetic data set to CSV")
    g.add_argument("--kind", choices=["spiral", "uniform_shape", "gaussian_mixture", "graph_example"],
                   default="spiral")
    g.add_argument("--v", type=float, default=10.0, help="spiral angular speed")
    g.add_argument("--sigma", type=float, default=0.03, help="noise level")
    g.add_argument("--shape", default="ball:dim=2,radius=1", help="e.g. 'annulus:dim=2,inner=0.5,outer=1'")
    g.add_argument("--means", default="0,0", help="mixture means, e.g. '0,0;3,3'")
    g.add_argument("--which", choices=["mu", "nu"], default="mu", help="graph example variant")
    g.add_argument("--n", type=int, default=2000, help="number of points")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--manifest", help="write the run manifest here (default: stdout)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("signature", help="DTM-signature of a data set")
    s.add_argument("input")
    s.add_argument("--m", type=float, default=0.05)
    s.add_argument("--out", required=True, help="atom,weight CSV")
    s.add_argument("--cdf-out", help="sampled CDF CSV (default: <out>.cdf.csv)")
    s.add_argument("--dtm-out", help="per-point index,value CSV")
    s.add_argument("--grid", type=int, default=512, help="CDF sampling points")
    s.add_argument("--matrix", action="store_true", help="input is a distance matrix")
    s.add_argument("--weights", help="weight file for the input")
    s.add_argument("--strict-metric", action="store_true", help="check the triangle inequality")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--report", help="JSON summary path (default: stdout)")
    s.set_defaults(func=cmd_signature)

    t = sub.add_parser("test", help="bootstrap isomorphism test of two data sets")
    t.add_argument("p")
    t.add_argument("q")
    _add_test_flags(t)
    t.add_argument("--matrix", action="store_true", help="inputs are distance matrices")
    t.add_argument("--weights-p")
    t.add_argument("--weights-q")
    t.add_argument("--boot-out", help="dump the bootstrap sample as CSV")
    t.add_argument("--strict", action="store_true", help="exit 3 on a degenerate bootstrap")
    t.add_argument("--strict-metric", action="store_true")
    t.set_defaults(func=cmd_test)

    mc = sub.add_parser("mc", help="Monte Carlo level/power of the test and the KS baseline")
    mc.add_argument("--gen-p", default="spiral:v=10", help="e.g. 'spiral:v=10,sigma=0.03'")
    mc.add_argument("--gen-q", default="spiral:v=10")
    mc.add_argument("--size", type=int, default=2000, help="points per data set")
    mc.add_argument("--reps", type=int, default=100)
    _add_test_flags(mc)
    mc.set_defaults(func=cmd_mc)

    a = sub.add_parser("analytic", help="closed-form quantities for uniform shapes")
    a.add_argument("--shape", required=True, help="e.g. 'ball:dim=2,radius=1'")
    a.add_argument("--other", help="second shape for the volume lower bound")
    a.add_argument("--m", type=float, default=0.05)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analytic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, MeasureSpaceError, ValueError, IndexError, OSError) as exc:
        print(f"dtmsig {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
