"""Command-line interface.

Exit codes: 0 ok, 2 usage, 3 graph parse error, 4 precondition violated,
5 size cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import formats
from .errors import PreconditionError, StarCLTError
from .graphs import (
    cartesian_power,
    cartesian_product,
    distance_k_graph,
    format_graph,
    read_graph,
    star_power,
    star_product,
)
from .harness import (
    DEFAULT_SCHEDULE,
    big_m,
    cartesian_baseline,
    convergence_scan,
    normalize_moments,
    sigma_count,
    star_vacuum_moments,
    walk_census,
)
from .jacobi import cauchy_from_jacobi, metric_d, moments_to_jacobi
from .measures import JacobiParams
from .vacuum import DENSE_CAP, lanczos_jacobi, vacuum_moments

EPILOG = """\
exit codes:
  0  success
  2  usage error (unknown verb, missing or invalid option, unreadable file)
  3  malformed graph file
  4  precondition violated (e.g. trivial distance-k graph, bad schedule)
  5  size cap exceeded
"""


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starclt",
        description="Distance-k graphs of star powers and their vacuum spectral laws.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def common(p, target=False):
        if target:
            p.add_argument("--graph", required=True, help="rooted-graph file")
        else:
            p.add_argument("--graph", required=True, action="append",
                           help="rooted-graph file (repeat to fold several graphs)")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
        p.add_argument("--seed", type=int, default=None, help="reserved; recorded in JSON output")
        if target:
            p.add_argument("--k", type=_positive, default=1, help="distance (default 1)")
            p.add_argument("--N", type=_positive, default=None,
                           help="analyse the distance-k graph of the N-fold star power")
            p.add_argument("--normalized", action="store_true",
                           help="scale by 1/sqrt(N*sigma); implies --N 1 if --N is absent")

    p = sub.add_parser("build", help="star or cartesian products/powers -> graph file")
    common(p)
    p.add_argument("--product", choices=("star", "cartesian"), default="star")
    p.add_argument("--N", type=_positive, default=None, help="power of a single input graph")

    p = sub.add_parser("distk", help="distance-k graph -> graph file")
    common(p, target=True)

    p = sub.add_parser("moments", help="vacuum moments -> CSV order,value")
    common(p, target=True)
    p.add_argument("--p", type=_positive, default=4, help="highest moment order (default 4)")
    p.add_argument("--method", choices=("explicit", "structured"), default="explicit")

    p = sub.add_parser("jacobi", help="Jacobi parameters -> CSV level,beta,gamma")
    common(p, target=True)
    p.add_argument("--depth", type=_positive, default=6)
    p.add_argument("--method", choices=("lanczos", "moments"), default="lanczos")

    p = sub.add_parser("cauchy", help="Cauchy transform on a line -> CSV re,im,g_re,g_im")
    common(p, target=True)
    p.add_argument("--depth", type=_positive, default=6)
    p.add_argument("--im", type=float, default=1.0)
    p.add_argument("--re-min", type=float, default=-5.0)
    p.add_argument("--re-max", type=float, default=5.0)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--R", type=float, default=20.0, help="metric grid half-width (JSON output)")
    p.add_argument("--h", type=float, default=0.01, help="metric grid step (JSON output)")

    p = sub.add_parser("census", help="type-1/type-2 length-4 walk census -> JSON")
    common(p, target=True)
    p.add_argument("--method", choices=("explicit", "structured"), default="explicit")

    p = sub.add_parser("scan", help="convergence scan over N -> CSV/JSON report")
    common(p, target=True)
    p.add_argument("--schedule", type=_int_list, default=list(DEFAULT_SCHEDULE))
    p.add_argument("--depth", type=_positive, default=6)
    p.add_argument("--method", choices=("explicit", "structured"), default="explicit")
    p.add_argument("--R", type=float, default=20.0)
    p.add_argument("--h", type=float, default=0.01)

    p = sub.add_parser("baseline", help="cartesian-power eigenvalue moments vs Gaussian limit -> CSV")
    common(p, target=True)
    p.add_argument("--schedule", type=_int_list, default=None, help="several N values")
    p.add_argument("--p", type=_positive, default=4)
    p.add_argument("--cap", type=_positive, default=DENSE_CAP)
    return parser


def _target(args):
    """Graph under study and the scale applied to its spectrum."""
    g = read_graph(args.graph)
    N = args.N if args.N is not None else (1 if args.normalized else None)
    G = distance_k_graph(star_power(g, N) if N else g, args.k)
    scale = 1
    if args.normalized:
        sigma = sigma_count(g, args.k)
        if sigma == 0:
            raise PreconditionError(f"no vertex at distance {args.k} from the root")
        scale = N * sigma
    return g, G, N, scale


def _emit(text, args):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_build(args):
    graphs = [read_graph(p) for p in args.graph]
    if args.N is not None:
        if len(graphs) != 1:
            raise PreconditionError("--N takes exactly one --graph")
        power = star_power if args.product == "star" else cartesian_power
        out = power(graphs[0], args.N)
    else:
        op = star_product if args.product == "star" else cartesian_product
        out = graphs[0]
        for h in graphs[1:]:
            out = op(out, h)
    return format_graph(out)


def cmd_distk(args):
    _, G, _, _ = _target(args)
    return format_graph(G)


def cmd_moments(args):
    g, G, N, scale = _target(args)
    if args.method == "structured":
        if N is None:
            raise PreconditionError("--method structured needs --N")
        m = star_vacuum_moments(g, args.k, N, args.p, "structured")
    else:
        m = vacuum_moments(G, args.p)
    if args.normalized:
        m = normalize_moments(m, scale)
    if args.json:
        return formats.moments_json(m, k=args.k, N=N, normalized=args.normalized, seed=args.seed) + "\n"
    return formats.moments_csv(m)


def _jacobi(args, G, scale):
    if args.method == "lanczos":
        j = lanczos_jacobi(G, args.depth)
    else:
        j = moments_to_jacobi(vacuum_moments(G, 2 * args.depth - 1), args.depth)
    if scale != 1:
        j = j.scaled(1 / math.sqrt(scale))
    return j


def cmd_jacobi(args):
    _, G, N, scale = _target(args)
    j = _jacobi(args, G, scale)
    if args.json:
        return formats.jacobi_json(j, k=args.k, N=N, normalized=args.normalized,
                                   method=args.method, seed=args.seed) + "\n"
    return formats.jacobi_csv(j)


def cmd_cauchy(args):
    _, G, N, scale = _target(args)
    args.method = "lanczos"
    j = _jacobi(args, G, scale)
    if args.step <= 0 or args.re_max < args.re_min:
        raise PreconditionError("need step > 0 and re-max >= re-min")
    count = int(round((args.re_max - args.re_min) / args.step))
    xs = args.re_min + args.step * np.arange(count + 1)
    vals = cauchy_from_jacobi(j, xs + 1j * args.im)
    if args.json:
        d = metric_d(j, JacobiParams.bernoulli(), R=args.R, h=args.h)
        doc = {
            "k": args.k, "N": N, "normalized": args.normalized, "depth": args.depth,
            "seed": args.seed, "im": args.im,
            "points": [{"re": float(x), "g_re": float(v.real), "g_im": float(v.imag)}
                       for x, v in zip(xs, vals)],
            "metric_to_bernoulli": d.to_dict(),
        }
        return _dump(doc)
    rows = [(formats.fmt_number(float(x)), formats.fmt_number(args.im),
             formats.fmt_number(float(v.real)), formats.fmt_number(float(v.imag)))
            for x, v in zip(xs, vals)]
    return formats._csv(("re", "im", "g_re", "g_im"), rows)


def cmd_census(args):
    g = read_graph(args.graph)
    N = args.N or 1
    c = walk_census(g, args.k, N, args.method)
    sigma, M = sigma_count(g, args.k), big_m(g, args.k)
    doc = {
        "k": args.k, "N": N, "sigma": sigma, "bigM": M, "seed": args.seed,
        "type1": c.type1, "type2": c.type2, "raw_m4": c.total,
        "type1_is_square": c.type1 == (N * sigma) ** 2,
        "type2_bound": N * sigma * M * sigma,
        "type2_within_bound": c.type2 <= N * sigma * M * sigma,
    }
    return _dump(doc)


def cmd_scan(args):
    g = read_graph(args.graph)
    report = convergence_scan(g, args.k, args.schedule, method=args.method,
                              depth=args.depth, R=args.R, h=args.h)
    if args.json:
        report.config["seed"] = args.seed
        return report.to_json() + "\n"
    return report.to_csv()


def cmd_baseline(args):
    g = read_graph(args.graph)
    Ns = args.schedule or [args.N or 1]
    rows, docs = [], []
    for N in Ns:
        res = cartesian_baseline(g, args.k, N, args.p, cap=args.cap)
        for j, (a, b) in enumerate(zip(res.empirical, res.limit)):
            rows.append((N, j, formats.fmt_number(a), formats.fmt_number(b)))
        docs.append({"N": N, "n": res.n,
                     "empirical": [formats.json_value(v) for v in res.empirical],
                     "limit": list(res.limit)})
    if args.json:
        return _dump({"k": args.k, "seed": args.seed, "results": docs})
    return formats._csv(("N", "order", "empirical", "limit"), rows)


COMMANDS = {
    "build": cmd_build, "distk": cmd_distk, "moments": cmd_moments, "jacobi": cmd_jacobi,
    "cauchy": cmd_cauchy, "census": cmd_census, "scan": cmd_scan, "baseline": cmd_baseline,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = COMMANDS[args.verb](args)
        _emit(text, args)
    except StarCLTError as exc:
        print(f"starclt {args.verb}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"starclt {args.verb}: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
