"""Command-line interface: ``seqlocal <command> [options]``.

Exit codes: 0 on success (a rejected test is still a success), 2 for
validation or infeasible parameters, 3 for I/O or network failures.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import urllib.error
import urllib.request
from fractions import Fraction

import numpy as np

from . import __version__
from .er_null import sample_er, test_unoptimized
from .errors import SeqLocalError
from .graph import Graph, VertexSequence, dump_edge_list, dump_sequence, load_edge_list, load_sequence
from .orgm import OrgmParams, sample_orgm, split_edges
from .orgm_fit import ci_sweep, classify, fit_bandwidth, in_envelope_test, optimized_er_reference, sweep_to_csv
from .ordering import rcm_ordering, spectral_ordering
from .power import power_grid
from .random_seq import exact_seq_distribution, graph_randseq_variance, sampled_seq_distribution
from .stats import LOGARITHMIC, h_stat, micro_locality, z1

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3
MAX_SEED = 2**64 - 1


class IOFailure(Exception):
    pass


def jsonable(obj):
    """Plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating, Fraction)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def _text(obj, prefix="") -> str:
    lines = []
    for k, v in sorted(jsonable(obj).items()):
        if isinstance(v, dict):
            lines.append(_text(v, f"{prefix}{k}.").rstrip("\n"))
        else:
            lines.append(f"{prefix}{k}: {v}")
    return "\n".join(lines) + "\n"


def atomic_write(path: str, data: str):
    d = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc


def emit(args, data: str):
    if args.output:
        atomic_write(args.output, data)
    else:
        sys.stdout.write(data)


def emit_payload(args, payload: dict, csv_text: str | None = None):
    if args.format == "csv":
        if csv_text is None:
            raise SeqLocalError("this command has no CSV form; use --format json or text")
        emit(args, csv_text)
    elif args.format == "text":
        emit(args, _text(payload))
    else:
        emit(args, dumps(payload))


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc


def load_inputs(args) -> tuple[Graph, VertexSequence]:
    if not args.input:
        raise SeqLocalError("--input is required")
    g = load_edge_list(_read(args.input))
    if args.sequence:
        s = load_sequence(_read(args.sequence), g.n_vertices)
    else:
        s = VertexSequence.identity(g.n_vertices)
    return g, s


def _alpha(text):
    a = float(text)
    if not 0 < a < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return a


def _seed(text):
    s = int(text)
    if not 0 <= s <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


# commands

def cmd_stat(args):
    g, s = load_inputs(args)
    hv = h_stat(g, s)
    gv = h_stat(g, s, LOGARITHMIC)
    payload = {
        "n": g.n_vertices, "m": g.m_edges,
        "h1": hv.normalized, "z1": hv.z, "hg": gv.normalized, "zg": gv.z,
        "h_i": micro_locality(g, s),
    }
    csv_text = "vertex,h_i\n" + "".join(
        f"{i},{'' if h is None else repr(float(h))}\n" for i, h in enumerate(payload["h_i"]))
    emit_payload(args, payload, csv_text)


def cmd_test(args):
    g, s = load_inputs(args)
    if args.model == "er":
        rep = test_unoptimized(g, s, args.alpha, args.sided)
        emit_payload(args, rep.to_dict())
    elif args.model == "orgm":
        fit = fit_bandwidth(g, s, args.variant)
        r = args.r if args.r is not None else fit.r_star
        rep_in = in_envelope_test(g, s, r, args.variant, args.alpha)
        rep_all = test_unoptimized(g, s, args.alpha, "one-sided-lower")
        ref = None
        if args.reference_samples > 0:
            ref = optimized_er_reference(g.n_vertices, g.m_edges, args.reference_samples, args.seed,
                                         args.reference_method, simple=g.is_simple)
        payload = {
            "fit": fit.to_dict() | {"objective": None, "r_values": None},
            "r": r,
            "in_envelope": rep_in.to_dict(),
            "whole_graph": rep_all.to_dict(),
            "classification": classify(rep_all, rep_in, ref, args.alpha),
            "reference": None if ref is None else {
                "method": args.reference_method, "n_samples": args.reference_samples,
                "seed": args.seed, "alpha_quantile_h1": float(np.quantile(ref, args.alpha)),
            },
        }
        emit_payload(args, payload)
    else:
        obs = z1(g, s)
        if args.exact:
            summ = exact_seq_distribution(g, cap=args.cap)
        else:
            summ = sampled_seq_distribution(g, args.samples, args.seed)
        var = graph_randseq_variance(g)
        p = summ.p_value(obs)
        payload = {
            "statistic_kind": "z1",
            "observed_z1": obs,
            "z1_factor": obs / math.sqrt(var) if var > 0 else None,
            "p_value": p,
            "p_value_strict": summ.p_value(obs, strict=True),
            "p_value_se": None if summ.exhaustive else summ.p_value_se(obs),
            "alpha": args.alpha,
            "decision": "reject" if p < args.alpha else "not-reject",
            "null": {"model": "uniformly random vertex sequence",
                     "constraint": "fixed graph", "sidedness": "one-sided-lower",
                     "method": "exact enumeration" if summ.exhaustive else "Monte Carlo",
                     "seed": None if summ.exhaustive else args.seed},
            "variance_formula": var,
            "summary": summ.to_dict(),
        }
        emit_payload(args, payload, summ.histogram_csv())


def cmd_fit(args):
    g, s = load_inputs(args)
    fit = fit_bandwidth(g, s, args.variant)
    payload = fit.to_dict()
    payload["objective"] = [v if math.isfinite(v) else None for v in fit.objective]
    emit_payload(args, payload, fit.to_csv())


def cmd_sweep(args):
    g, s = load_inputs(args)
    r_values = None
    if args.r_min is not None or args.r_max is not None:
        r_values = range(args.r_min or 1, (args.r_max or g.n_vertices - 1) + 1)
    rows = ci_sweep(g, s, r_values, args.variant, args.alpha)
    emit_payload(args, {"variant": args.variant, "alpha": args.alpha, "rows": rows}, sweep_to_csv(rows))


def cmd_power(args):
    if args.grid == "r-eps":
        if args.n is None or args.m is None:
            raise SeqLocalError("--grid r-eps needs --n and --m")
        xs = args.x_values or [round(0.05 * k, 2) for k in range(1, 20)]
        ys = args.y_values or [round(0.1 * k, 1) for k in range(11)]
    else:
        if args.r_over_n is None or args.eps is None:
            raise SeqLocalError("--grid n-degree needs --r-over-n and --eps")
        xs = args.x_values or [20, 50, 100, 200, 500]
        ys = args.y_values or [2, 4, 8, 16]
    grid = power_grid(args.grid, xs, ys, n=args.n, m=args.m, r_over_n=args.r_over_n, eps=args.eps,
                      mode=args.mode, alpha=args.alpha, statistic=args.statistic,
                      n_samples=args.samples, seed=args.seed, simple=args.variant == "simple")
    if args.format in (None, "csv", "text"):
        emit(args, grid.to_csv())
    else:
        emit(args, dumps(json.loads(grid.to_json())))


def cmd_order(args):
    g, _ = load_inputs(args)
    res = (spectral_ordering if args.method == "spectral" else rcm_ordering)(g)
    if args.format == "json":
        emit(args, dumps({"method": res.method, "diagnostics": res.diagnostics,
                          "sequence": list(res.sequence.positions)}))
    else:
        emit(args, dump_sequence(res.sequence))


def cmd_sample(args):
    simple = args.variant == "simple"
    meta = {"model": args.model, "seed": args.seed, "n": args.n, "m": args.m, "variant": args.variant}
    if args.model == "er":
        g = sample_er(args.n, args.m, simple, args.seed)
    else:
        if args.r is None:
            raise SeqLocalError("sample orgm needs --r")
        if args.m_out is not None:
            m_in, m_out = args.m - args.m_out, args.m_out
        else:
            m_in, m_out = split_edges(args.n, args.m, args.r, args.eps if args.eps is not None else 0.0)
        p = OrgmParams.banded(args.n, args.r, m_in, m_out, simple)
        g = sample_orgm(p, args.seed)
        meta.update(r=args.r, eps=args.eps, m_in=m_in, m_out=m_out)
    emit(args, dump_edge_list(g))
    if args.output:
        atomic_write(args.output + ".json", dumps(meta))


def cmd_fetch(args):
    if not args.output:
        raise SeqLocalError("fetch needs --output")
    try:
        with urllib.request.urlopen(args.url, timeout=args.timeout) as resp:
            body = resp.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise IOFailure(f"download failed: {exc}") from exc
    d = os.path.dirname(os.path.abspath(args.output))
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
        with os.fdopen(fd, "wb") as fh:
            fh.write(body)
        os.replace(tmp, args.output)
    except OSError as exc:
        raise IOFailure(f"cannot write {args.output}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="edge list file")
    common.add_argument("--sequence", help="sequence file (default: identity)")
    common.add_argument("--alpha", type=_alpha, default=0.05)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--variant", choices=("simple", "multigraph"), default="simple")
    common.add_argument("--format", choices=("json", "csv", "text"),
                        help="default: json; plain sequence for order, csv for power")
    common.add_argument("--output", help="write here instead of stdout")

    ap = argparse.ArgumentParser(prog="seqlocal", description="Sequential locality of graphs.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stat", parents=[common], help="H1, z1, HG, zG and per-vertex locality")
    p.set_defaults(func=cmd_stat)

    p = sub.add_parser("test", parents=[common], help="hypothesis tests")
    p.add_argument("model", choices=("er", "orgm", "seq"))
    p.add_argument("--sided", choices=("two-sided", "one-sided-lower"), default="two-sided")
    p.add_argument("--r", type=int, help="bandwidth for the in-envelope test (default: fitted)")
    p.add_argument("--reference-samples", type=int, default=100,
                   help="optimized ER samples for the type III/IV split (0 disables)")
    p.add_argument("--reference-method", choices=("spectral", "rcm"), default="spectral")
    p.add_argument("--exact", action="store_true", help="enumerate all sequences (small N)")
    p.add_argument("--cap", type=int, default=9, help="largest N for --exact")
    p.add_argument("--samples", type=int, default=10000)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("fit", parents=[common], help="maximum-likelihood bandwidth")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep-r", parents=[common], help="in-envelope interval for each r")
    p.add_argument("--r-min", type=int)
    p.add_argument("--r-max", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("power", parents=[common], help="power grids")
    p.add_argument("--grid", choices=("r-eps", "n-degree"), default="r-eps")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--r-over-n", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--x-values", type=_floats, help="comma-separated r/N (or N) values")
    p.add_argument("--y-values", type=_floats, help="comma-separated eps (or 2M/N) values")
    p.add_argument("--mode", choices=("analytic", "empirical"), default="analytic")
    p.add_argument("--statistic", choices=("H1", "HG"), default="H1")
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("order", parents=[common], help="spectral or RCM ordering")
    p.add_argument("method", choices=("spectral", "rcm"))
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("sample", parents=[common], help="draw an ER or ORGM graph")
    p.add_argument("model", choices=("er", "orgm"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--m-out", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fetch", parents=[common], help="download a file")
    p.add_argument("url")
    p.add_argument("--timeout", type=float, default=60.0)
    p.set_defaults(func=cmd_fetch)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except IOFailure as exc:
        print(f"seqlocal: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SeqLocalError, ArithmeticError) as exc:
        print(f"seqlocal: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
