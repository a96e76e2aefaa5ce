"""Command-line front end.

Exit codes: 0 success, 2 precondition violation, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import mpmath

from chizeta import graphio, moments
from chizeta.graph import GnmParams, sample_gnm, sample_gnp_half
from chizeta.harness import ConfigError, ExperimentConfig, StageError, run_experiment, write_report
from chizeta.logreal import set_precision
from chizeta.partition import OrderedPartition
from chizeta.profile import Profile
from chizeta.profile_opt import (
    BracketError,
    NonConvergence,
    first_moment_threshold,
    kstar_and_gap,
    optimal_profile,
)
from chizeta.rng import make_rng

EXIT_OK, EXIT_PRECONDITION, EXIT_NONCONVERGENCE = 0, 2, 3


class CliError(ValueError):
    pass


def _emit(args, payload, csv_rows: list[list] | None = None, csv_header: list[str] | None = None) -> None:
    if args.format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if csv_header:
            w.writerow(csv_header)
        w.writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    _write(args, text)


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_moments(args) -> None:
    w = moments.window_condition(args.n, args.eps)
    d = w.data
    payload = {
        "n": d.n,
        "alpha0": mpmath.nstr(d.alpha0, 20),
        "alpha": d.alpha,
        "log_mu_alpha": mpmath.nstr(d.mu_alpha.log, 20),
        "exponent": mpmath.nstr(d.exponent, 20),
        "window_holds": w.holds,
        "eps": args.eps,
    }
    _emit(args, payload, [[payload[k] for k in payload]], list(payload))


def cmd_fraction(args) -> None:
    if args.n_max < 1000:
        raise CliError(f"--n-max must be >= 1000, got {args.n_max}")
    ns, expo, holds = moments.window_scan(args.n_max, args.eps)
    frac = float(holds.mean())
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "exponent", "holds"])
        for n, e, h in zip(ns.tolist(), expo.tolist(), holds.tolist()):
            w.writerow([n, f"{e:.9f}", int(h)])
        out.write(f"# summary,n_max={args.n_max},eps={args.eps},fraction={frac:.6f},"
                  f"reference_low={moments.FRACTION_LOW:.6f},reference_high={moments.FRACTION_HIGH:.6f}\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _default_t(n: int, t: int | None) -> int:
    if t is not None:
        return t
    a = moments.alpha(n)
    if a < 3:
        raise CliError(f"alpha({n}) = {a}; pass --t explicitly")
    return a - 1


def cmd_threshold(args) -> None:
    t = _default_t(args.n, args.t)
    res = first_moment_threshold(args.n, t, args.method)
    payload = res.to_json()
    _emit(args, payload, [[payload[k] if not isinstance(payload[k], dict) else payload[k]["log10"]
                           for k in payload]], list(payload))


def cmd_profile(args) -> None:
    t = _default_t(args.n, args.t)
    if args.k is not None:
        k = args.k
    else:
        k = kstar_and_gap(args.n, args.eps, first_moment_threshold(args.n, t)).k_star
    if k < 1:
        raise CliError(f"k* = {k} is not positive at n={args.n}; pass --k")
    prof = optimal_profile(args.n, k, t)
    rows = [[u, c] for u, c in prof.items()]
    if args.format == "json":
        _emit(args, {"n": args.n, "k": k, "t": t, "profile": {str(u): c for u, c in rows}})
    else:
        _emit(args, None, rows, ["u", "k_u"])


def cmd_sample(args) -> None:
    if args.model == "half":
        g = sample_gnp_half(args.n, args.seed)
    else:
        g = sample_gnm(GnmParams(args.n, args.m), args.seed)
    if args.format == "csv":
        _emit(args, None, [list(e) for e in g.edges()], ["u", "v"])
    elif args.graph_format == "dimacs":
        _write(args, graphio.to_dimacs(g))
    else:
        _write(args, graphio.to_json(g) + "\n")


def cmd_solve(args) -> None:
    from chizeta import solver

    g = graphio.load_graph(args.graph)
    payload = {
        "graph_hash": graphio.graph_hash(g),
        "n": g.n,
        "chi": solver.chromatic_number(g),
        "zeta": None if args.no_zeta else solver.cochromatic_number(g),
        "t": args.t,
        "chi_t": None if args.t is None else solver.t_bounded_chromatic(g, args.t),
        "counts": None,
    }
    if args.profile:
        k = Profile.parse(args.profile)
        c = solver.count_colourings_with_profile(g, k)
        cc = solver.count_cocolourings_with_profile(g, k)
        payload["counts"] = {
            "profile": str(k),
            "colourings": {"ordered": c.ordered, "unordered": c.unordered},
            "cocolourings": {"ordered": cc.ordered, "unordered": cc.unordered},
        }
    flat = {k: v for k, v in payload.items() if not isinstance(v, dict)}
    _emit(args, payload, [list(flat.values())], list(flat))


def cmd_verify_prop(args) -> None:
    from chizeta import structure

    k = Profile.parse(args.profile)
    if args.mode in ("prop42", "ratio"):
        rep = structure.cocolouring_ratio_oracle(args.n, k, pairs=not args.no_pairs)
    else:
        if args.u_star is None or args.alpha is None:
            raise CliError("--mode secondmoment needs --u-star and --alpha")
        rep = structure.second_moment_ratio_tiny(args.n, k, args.u_star, args.alpha, args.c0)
    _emit(args, rep.to_json())


def random_partition(n: int, k: Profile, rng) -> OrderedPartition:
    perm = rng.permutation(n).tolist()
    parts, i = [], 0
    for s in k.sizes():
        parts.append(perm[i:i + s])
        i += s
    return OrderedPartition.from_lists(n, parts)


def cmd_classify_pairs(args) -> None:
    from chizeta import structure

    k = Profile.parse(args.profile)
    k.check(args.n, complete=True)
    rng = make_rng(args.seed, args.n, 0x7061697273)
    rows = []
    for i in range(args.pairs):
        pi = random_partition(args.n, k, rng)
        # a partner sharing a random number of parts with pi
        keep = int(rng.integers(0, k.k + 1))
        kept = pi.as_lists()[:keep]
        rest = sorted(v for p in pi.as_lists()[keep:] for v in p)
        rest = [rest[j] for j in rng.permutation(len(rest))]
        parts, j = list(kept), 0
        for s in [len(p) for p in pi.as_lists()[keep:]]:
            parts.append(rest[j:j + s])
            j += s
        pi2 = OrderedPartition.from_lists(args.n, sorted(parts, key=len, reverse=True))
        c = structure.classify_pair(pi, pi2, args.n, args.c0)
        rows.append({
            "pair": i,
            "ell": c.ell,
            "ell_u": {str(u): v for u, v in c.ell_u.items()},
            "lambda": str(c.lam),
            "band": c.band,
            "relevant": structure.is_relevant_pair(pi, pi2, args.alpha) if args.alpha else None,
            "pi": pi.as_lists(),
            "pi_prime": pi2.as_lists(),
        })
    header = ["pair", "ell", "lambda", "band", "relevant"]
    _emit(args, {"n": args.n, "profile": str(k), "c0": args.c0, "pairs": rows},
          [[r[h] for h in header] for r in rows], header)


def cmd_experiment(args) -> None:
    overrides = {
        "n_list": args.n_list,
        "eps": args.eps,
        "samples": args.samples,
        "t_override": args.t_override,
        "seed": args.seed if args.seed_given else None,
        "format": args.format if args.format_given else None,
        "out": args.out,
        "workers": args.workers,
    }
    text = ""
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    cfg = ExperimentConfig.parse_text(text, overrides)
    data = write_report(run_experiment(cfg), cfg.format, cfg.out)
    if not cfg.out:
        sys.stdout.write(data.decode())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed (default 0)")
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS, help="mpmath bits (default 256)")

    p = argparse.ArgumentParser(prog="chizeta", parents=[common],
                                description="Chromatic vs cochromatic number toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("moments", parents=[common], help="alpha_0, mu_alpha and the window condition")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("fraction", parents=[common], help="window condition over 3..n_max as CSV")
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--eps", type=float, default=0.001)
    s.set_defaults(func=cmd_fraction)

    s = sub.add_parser("threshold", parents=[common], help="first-moment threshold k_t(n)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--t", type=int, default=None, help="class-size bound (default alpha-1)")
    s.add_argument("--method", choices=["auto", "exact", "l0", "l0_raw"], default="auto")
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("profile", parents=[common], help="integer profile maximising the first moment")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--k", type=int, default=None, help="class count (default k*)")
    s.add_argument("--t", type=int, default=None)
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("sample", parents=[common], help="draw G(n,1/2) or G(n,m)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--model", choices=["half", "gnm"], default="half")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--graph-format", choices=["json", "dimacs"], default="json")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("solve", parents=[common], help="exact chi, zeta, chi_t for a graph file")
    s.add_argument("--graph", required=True, help="DIMACS (.col/.dimacs) or JSON graph")
    s.add_argument("--t", type=int, default=None)
    s.add_argument("--profile", default=None, help='count (co)colourings with profile "u:count,..."')
    s.add_argument("--no-zeta", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify-prop", parents=[common], help="exhaustive small-n oracles")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--profile", required=True)
    # "ratio" is an alias for the default mode
    s.add_argument("--mode", choices=["prop42", "ratio", "secondmoment"], default="prop42")
    s.add_argument("--u-star", type=int, default=None)
    s.add_argument("--alpha", type=int, default=None)
    s.add_argument("--c0", type=float, default=1 / 3)
    s.add_argument("--no-pairs", action="store_true")
    s.set_defaults(func=cmd_verify_prop)

    s = sub.add_parser("classify-pairs", parents=[common], help="overlap bands of random partition pairs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--pairs", type=int, default=10)
    s.add_argument("--c0", type=float, default=1 / 3)
    s.add_argument("--alpha", type=int, default=None, help="also decide relevance with this alpha")
    s.set_defaults(func=cmd_classify_pairs)

    s = sub.add_parser("experiment", parents=[common], help="run a full experiment")
    s.add_argument("--config", default=None, help="key = value config file")
    s.add_argument("--n-list", default=None, help="comma separated")
    s.add_argument("--eps", default=None)
    s.add_argument("--samples", default=None)
    s.add_argument("--t-override", default=None)
    s.add_argument("--workers", default=None)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    given = vars(args)
    args.seed_given = "seed" in given
    args.format_given = "format" in given
    args.seed = given.get("seed", 0)
    args.format = given.get("format", "json")
    args.out = given.get("out")
    set_precision(given.get("precision", 256))
    try:
        args.func(args)
    except StageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE if isinstance(e.cause, (NonConvergence, BracketError)) else EXIT_PRECONDITION
    except (NonConvergence, BracketError) as e:
        print(f"error: numerical non-convergence: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ValueError, ConfigError, OSError) as e:
        print(f"error: precondition violated: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
