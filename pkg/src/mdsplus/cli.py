"""Command-line interface: ``mdsplus <subcommand> [flags]``.

Exit codes: 0 success, 2 malformed input data, 3 bad flags or domain errors.
Results go to stdout (or files); warnings and diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import noise, spike
from .matrix import MatrixError, check_distance_matrix, pairwise_sq_distances, read_csv_matrix, \
    write_csv_matrix
from .mds import classical_mds, mds_plus_from_spectrum, similarity_spectrum, svht_embed
from .simulate import METHODS, SpikedConfig, run_experiment

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FLAGS = 3


class UsageError(Exception):
    """Invalid flag value or combination (exit 3)."""


class InputError(Exception):
    """Unreadable or structurally invalid input data (exit 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def fmt(v: float) -> str:
    return format(float(v), ".12g")


def _float_list(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma separated numbers, got {text!r}") from None


def _positive(name: str, value):
    if value is None or not (value > 0) or not math.isfinite(value):
        raise UsageError(f"--{name} must be a positive number")
    return value


def _sigma_arg(text):
    if text is None:
        return None
    if text == "auto":
        return "auto"
    try:
        val = float(text)
    except ValueError:
        raise UsageError(f"--sigma must be a positive number or 'auto', got {text!r}") from None
    return _positive("sigma", val)


def _load(path, what):
    try:
        return read_csv_matrix(path)
    except OSError as exc:
        raise InputError(f"cannot read {what} {path}: {exc}") from None
    except MatrixError as exc:
        raise InputError(f"malformed {what} {path}: {exc}") from None


def _load_distances(path):
    d = _load(path, "distance CSV")
    try:
        return check_distance_matrix(d)
    except MatrixError as exc:
        raise InputError(f"invalid distance matrix {path}: {exc}") from None


def cmd_embed(args) -> int:
    if (args.points is None) == (args.distances is None):
        raise UsageError("give exactly one of a points CSV or --distances")
    if args.points is not None:
        pts = _load(args.points, "points CSV")
        delta = pairwise_sq_distances(pts)
        p = args.ambient_dim if args.ambient_dim is not None else pts.shape[1]
    else:
        delta = _load_distances(args.distances)
        p = args.ambient_dim
    if p is not None and p < 1:
        raise UsageError("--ambient-dim must be a positive integer")
    n = delta.shape[0]
    sigma = _sigma_arg(args.sigma)

    def need_p():
        if p is None:
            raise UsageError("--ambient-dim is required with --distances for this method")
        return p

    def resolve_sigma(dec):
        if sigma == "auto":
            if n < noise.MIN_SAMPLES:
                raise UsageError("too few samples to estimate noise")
            return noise.estimate_sigma(dec.values, n, need_p())
        return sigma

    if args.method == "classical":
        if args.lam is not None:
            raise UsageError("--lambda applies to --method svht only")
        if args.r is None:
            raise UsageError("--method classical needs --r (an integer or 'auto')")
    elif args.method == "svht":
        if args.r is not None:
            raise UsageError("--r applies to --method classical only")
        if args.lam is None and sigma is None:
            raise UsageError("--method svht needs --lambda or --sigma")
        if args.lam is not None and sigma is not None:
            raise UsageError("give only one of --lambda and --sigma")
    else:
        if args.r is not None or args.lam is not None:
            raise UsageError("--method optimal takes neither --r nor --lambda")
        need_p()
    if args.method == "classical" and args.r == "auto" and sigma is None:
        raise UsageError("--r auto needs --sigma")
    if args.lam is not None:
        _positive("lambda", args.lam)

    dec = similarity_spectrum(delta)
    beta = (n - 1) / p if p is not None else None
    sigma_used = None
    if args.method == "classical":
        if args.r == "auto":
            sigma_used = resolve_sigma(dec)
            params = spike.SpikeParams(beta=(n - 1) / need_p(), sigma=sigma_used)
            r = spike.optimal_embedding_dim(dec.values, params)
        else:
            try:
                r = int(args.r)
            except ValueError:
                raise UsageError(f"--r must be an integer or 'auto', got {args.r!r}") from None
            if r < 0:
                raise UsageError("--r must be nonnegative")
        emb = classical_mds(dec, r)
    elif args.method == "svht":
        if args.lam is not None:
            lam = args.lam
        else:
            sigma_used = resolve_sigma(dec)
            lam = spike.optimal_hard_threshold(spike.SpikeParams(beta=(n - 1) / need_p(),
                                                                 sigma=sigma_used))
        emb = svht_embed(dec, lam)
    else:
        s = sigma if sigma is not None else "auto"
        if s == "auto" and n < noise.MIN_SAMPLES:
            raise UsageError("too few samples to estimate noise")
        emb = mds_plus_from_spectrum(dec, n, p, s, warn=False)
        sigma_used = emb.sigma_used

    if sigma_used is not None:
        emb.sigma_used = sigma_used
    emb.beta = beta
    for msg in emb.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    if emb.r == 0 and not emb.warnings:
        print("warning: empty embedding (r = 0)", file=sys.stderr)

    side = emb.sidecar()
    if args.out is None:
        write_csv_matrix(sys.stdout, emb.coords)
        print(json.dumps(side, sort_keys=True), file=sys.stderr)
    else:
        out = Path(args.out)
        write_csv_matrix(out, emb.coords)
        out.with_suffix(".json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_estimate_sigma(args) -> int:
    if args.ambient_dim < 1:
        raise UsageError("--ambient-dim must be a positive integer")
    delta = _load_distances(args.distances)
    n = delta.shape[0]
    if n < noise.MIN_SAMPLES:
        raise UsageError("too few samples to estimate noise")
    dec = similarity_spectrum(delta)
    sigma_hat = noise.estimate_sigma(dec.values, n, args.ambient_dim)
    print(f"sigma_hat {fmt(sigma_hat)}")
    print(f"beta {fmt((n - 1) / args.ambient_dim)}")
    return EXIT_OK


def _params(args) -> spike.SpikeParams:
    _positive("beta", args.beta)
    _positive("sigma", args.sigma)
    return spike.SpikeParams(beta=args.beta, sigma=args.sigma)


def cmd_threshold(args) -> int:
    params = _params(args)
    print(f"lambda_star {fmt(spike.optimal_hard_threshold(params))}")
    print(f"bulk_edge {fmt(spike.bulk_edge(params))}")
    return EXIT_OK


def cmd_shrink(args) -> int:
    params = _params(args)
    values = _float_list(args.values)
    if any(v < 0 or not math.isfinite(v) for v in values):
        raise UsageError("--values must be nonnegative")
    for v in values:
        print(fmt(spike.optimal_shrinker(v, params)))
    return EXIT_OK


def _signal(text) -> list:
    xs = _float_list(text)
    if any(v <= 0 for v in xs) or any(b >= a for a, b in zip(xs, xs[1:])):
        raise UsageError("--signal must be positive and strictly descending")
    return xs


def cmd_theory_loss(args) -> int:
    params = _params(args)
    xs = _signal(args.signal)
    if args.r < 0:
        raise UsageError("--r must be nonnegative")
    print(f"mds_loss {fmt(spike.mds_asymptotic_loss(xs, args.r, params))}")
    print(f"mdsplus_loss {fmt(spike.mdsplus_asymptotic_loss(xs, params))}")
    print(f"regret {fmt(spike.regret(xs, args.r, params))}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    xs = _signal(args.signal)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    methods = ["mds_plus" if m == "optimal" else m for m in methods]
    if not methods or any(m not in METHODS for m in methods):
        raise UsageError("--methods must list some of: classical, svht, mds_plus")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    if args.estimate_sigma and args.n < noise.MIN_SAMPLES:
        raise UsageError("too few samples to estimate noise")
    try:
        config = SpikedConfig(n=args.n, p=args.p, spectrum=tuple(xs), sigma=args.sigma,
                              seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.r is not None and args.r < 0:
        raise UsageError("--r must be nonnegative")
    report = run_experiment(config, args.trials, methods, args.r,
                            estimate_noise=args.estimate_sigma, threads=args.threads)
    text = report.to_json() + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    if args.csv is not None:
        header, rows = report.trials_table()
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v)
                            for v in row])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mdsplus", description="Classical MDS, optimal hard thresholding "
                     "and optimal shrinkage (MDS+) for noisy high-dimensional data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="embed points or a distance matrix")
    p.add_argument("points", nargs="?", help="points CSV, one point per row")
    p.add_argument("--distances", help="squared-distance matrix CSV")
    p.add_argument("--method", choices=["classical", "svht", "optimal"], default="optimal")
    p.add_argument("--r", help="embedding dimension for classical MDS, or 'auto'")
    p.add_argument("--lambda", dest="lam", type=float, help="hard threshold for svht")
    p.add_argument("--ambient-dim", type=int, help="ambient dimension p")
    p.add_argument("--sigma", help="noise level, or 'auto' to estimate it")
    p.add_argument("--out", help="embedding CSV path; the JSON sidecar goes next to it")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("estimate-sigma", help="estimate the noise level from distances")
    p.add_argument("--distances", required=True)
    p.add_argument("--ambient-dim", type=int, required=True)
    p.set_defaults(func=cmd_estimate_sigma)

    p = sub.add_parser("threshold", help="optimal hard threshold and bulk edge")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("shrink", help="apply the optimal shrinker to singular values")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--values", required=True, help="comma separated singular values")
    p.set_defaults(func=cmd_shrink)

    p = sub.add_parser("simulate", help="Monte-Carlo comparison with the asymptotic losses")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--signal", required=True, help="comma separated signal singular values")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--r", type=int, help="classical MDS dimension (default: signal rank)")
    p.add_argument("--estimate-sigma", action="store_true",
                   help="use the median noise estimate instead of the true sigma")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--csv", help="also write per-trial records as CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("theory-loss", help="asymptotic losses of MDS and MDS+ and the regret")
    p.add_argument("--signal", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(func=cmd_theory_loss)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mdsplus: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except InputError as exc:
        print(f"mdsplus: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (spike.DomainError, ValueError) as exc:
        print(f"mdsplus: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
