"""Command line entry point.

Exit status: 0 on success, 1 when a check finds a violation (a counterexample
file is written), 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import builder, discretize, distance_sets, formats, hedgehog, ramsey
from .core_metric import as_rat, is_isometry, rat_str

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rat_arg(text: str) -> Fraction:
    try:
        return as_rat(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an exact rational like 2/3, got {text!r}") from None


def _rat_list(text: str) -> list[Fraction]:
    return [_rat_arg(t) for t in text.split(",") if t.strip()]


def _seed_range(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must look like 0..99, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError("empty seed range")
    return list(range(lo, hi + 1))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _counterexample_path(args, default_stem: str) -> str:
    if args.counterexample:
        return args.counterexample
    base = getattr(args, "in_path", None) or getattr(args, "fine", None)
    stem = os.path.splitext(base)[0] if base else default_stem
    return f"{stem}.counterexample.json"


def cmd_classify(args) -> int:
    rep = distance_sets.classify(args.m, workers=args.threads)
    if args.json:
        _write(args.json, rep.to_json() + "\n")
    _write(args.csv, rep.to_csv())
    print(
        f"m={rep.m} classes={rep.total} four_values={rep.four_values_count}", file=sys.stderr
    )
    return EXIT_OK


def cmd_fourvalues(args) -> int:
    S = distance_sets.as_distance_set(args.set)
    bad = distance_sets.four_values_counterexample(S)
    if bad is None:
        print("true")
    else:
        print("false " + " ".join(rat_str(Fraction(v)) for v in bad))
    return EXIT_OK


def cmd_build(args) -> int:
    try:
        A = builder.build_approx(
            args.alphabet, args.rounds, args.budget, seed=args.seed,
            size_cap=args.size_cap, completion=args.completion,
        )
    except builder.BuildCapExceeded as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    _write(args.out, formats.dumps(formats.approx_to_dict(A)))
    print(f"points={A.n} added_per_round={A.added_per_round} closed_at={A.closed_at}", file=sys.stderr)
    return EXIT_OK


def cmd_check_extension(args) -> int:
    X = formats.load_any(args.in_path)
    alphabet = args.alphabet
    if alphabet is None:
        if not isinstance(X, builder.ApproxSpace):
            raise UsageError("plain metric spaces need --alphabet")
        alphabet = X.alphabet
    bad = builder.check_extension(X, args.k, alphabet)
    print(f"unrealized={len(bad)}")
    if bad:
        path = _counterexample_path(args, "check-extension")
        _write(path, formats.dumps({
            "k": args.k,
            "unrealized": [{"subset": list(F), "profile": [rat_str(v) for v in f]} for F, f in bad],
        }))
        print(f"counterexample written to {path}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_ceil(args) -> int:
    X = formats.load_space(args.in_path)
    _write(args.out, formats.dumps(formats.space_to_dict(discretize.ceil_metric(X, args.m))))
    return EXIT_OK


def cmd_collapse(args) -> int:
    X = formats.load_space(args.in_path)
    _write(args.out, formats.dumps(formats.space_to_dict(discretize.collapse_metric(X, args.m))))
    return EXIT_OK


def cmd_dense_copy(args) -> int:
    X = formats.load_space(args.in_path)
    res = discretize.dense_discrete_copy(X, args.m, args.steps)
    _write(args.out, res.cover_csv())
    for line in res.trace:
        print(line, file=sys.stderr)
    if not res.ok:
        path = _counterexample_path(args, "dense-copy")
        _write(path, formats.dumps({"copy": res.copy, "diverged": res.diverged, "trace": res.trace}))
        print(f"counterexample written to {path}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_hedgehog(args) -> int:
    fine = formats.load_space(args.fine)
    G = hedgehog.build_Z(fine, args.m, args.max_tree)
    if args.graph:
        _write(args.graph, G.to_json() + "\n")
    if not args.verify:
        print(json.dumps({"points": G.n_points, "nodes": len(G.nodes)}))
        return EXIT_OK
    rep = hedgehog.verify(G, args.max_len)
    if args.census:
        _write(args.census, rep.census.to_csv(G))
    print(json.dumps(rep.summary(), sort_keys=True))
    if not rep.ok:
        path = _counterexample_path(args, "hedgehog")
        _write(path, formats.dumps({
            "metric_violations": [str(v) for v in rep.metric_violations],
            "extension_defects": [
                {"edge": [G.label(u), G.label(v)], "label": rat_str(G.delta(u, v)),
                 "distance": rat_str(rep.metric(u, v)),
                 "path": [G.label(x) for x in rep.metric.shortest_path(u, v)]}
                for u, v in rep.extension_defects
            ],
            "cycles": [
                {"vertices": [G.label(v) for v in r.vertices], "shape": r.shape, "problems": r.problems}
                for r in rep.census.violations
            ],
            "branches": [
                {"branch": [G.label(v) for v in b.branch],
                 "mismatches": [[i, j, rat_str(g), rat_str(w)] for i, j, g, w in b.mismatches]}
                for b in rep.branches if not b.ok
            ],
        }))
        print(f"counterexample written to {path}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_experiment(args) -> int:
    X = formats.load_space(args.in_path)
    targets = formats.load_targets(args.targets)
    kinds = [k for k in args.kinds.split(",") if k]
    rows = ramsey.experiment(X, targets, args.eps, args.k, args.seeds, kinds, timing=args.timing)
    _write(args.out, ramsey.report_csv(rows))
    for (kind, tid), rate in ramsey.success_rates(rows).items():
        print(f"{kind} target={tid} success={rat_str(rate)}", file=sys.stderr)
    return EXIT_OK


def cmd_embed_cm(args) -> int:
    X = formats.load_space(args.in_path)
    F = builder.kuratowski_embed(X, args.m)
    _write(args.out, formats.dumps(formats.steps_to_dict(F)))
    if not is_isometry(X, F.as_metric_space(), list(range(X.n))):
        path = _counterexample_path(args, "embed-cm")
        _write(path, formats.dumps(formats.space_to_dict(F.as_metric_space())))
        print(f"embedding is not isometric; image written to {path}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="urysohn", description="Finite experiments on grid Urysohn spaces.")
    p.add_argument("--threads", type=int, default=1, help="worker processes, 0 = auto")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("classify", help="similarity classes of m-element distance sets")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--csv", help="CSV output (default stdout)")
    c.add_argument("--json", help="also write the full JSON report")
    c.set_defaults(run=cmd_classify)

    c = sub.add_parser("fourvalues", help="test the 4-values condition")
    c.add_argument("--set", type=_rat_list, required=True, help='e.g. "1,2,3"')
    c.set_defaults(run=cmd_fourvalues)

    c = sub.add_parser("build", help="budgeted closure build")
    c.add_argument("--alphabet", type=_rat_list, required=True, help='e.g. "1/3,2/3,1"')
    c.add_argument("--rounds", type=int, required=True)
    c.add_argument("--budget", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--size-cap", type=int, default=builder.DEFAULT_SIZE_CAP)
    c.add_argument("--completion", choices=["random", "minimal"], default="random")
    c.add_argument("--out")
    c.set_defaults(run=cmd_build)

    c = sub.add_parser("check-extension", help="unrealized profiles over small subsets")
    c.add_argument("--in", dest="in_path", required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--alphabet", type=_rat_list)
    c.add_argument("--counterexample")
    c.set_defaults(run=cmd_check_extension)

    for verb, fn, text in (("ceil", cmd_ceil, "round distances up"), ("collapse", cmd_collapse, "collapse a fine grid space")):
        c = sub.add_parser(verb, help=text)
        c.add_argument("--in", dest="in_path", required=True)
        c.add_argument("--m", type=int, required=True)
        c.add_argument("--out")
        c.set_defaults(run=fn)

    c = sub.add_parser("dense-copy", help="finite run of the dense grid copy construction")
    c.add_argument("--in", dest="in_path", required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--steps", type=int, required=True)
    c.add_argument("--out", help="cover report CSV (default stdout)")
    c.add_argument("--counterexample")
    c.set_defaults(run=cmd_dense_copy)

    c = sub.add_parser("hedgehog", help="build and check the graph Z")
    c.add_argument("--fine", required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--max-tree", type=int, required=True)
    c.add_argument("--max-len", type=int, default=6)
    c.add_argument("--verify", action="store_true")
    c.add_argument("--graph", help="write the graph JSON here")
    c.add_argument("--census", help="write the cycle census CSV here")
    c.add_argument("--counterexample")
    c.set_defaults(run=cmd_hedgehog)

    c = sub.add_parser("experiment", help="monochromatic copy search over colorings")
    c.add_argument("--in", dest="in_path", required=True)
    c.add_argument("--targets", required=True)
    c.add_argument("--eps", type=_rat_arg, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--seeds", type=_seed_range, required=True, help="a..b, inclusive")
    c.add_argument("--kinds", default=",".join(ramsey.KINDS))
    c.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identical replay)")
    c.add_argument("--out")
    c.set_defaults(run=cmd_experiment)

    c = sub.add_parser("embed-cm", help="embed into step functions")
    c.add_argument("--in", dest="in_path", required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--out")
    c.add_argument("--counterexample")
    c.set_defaults(run=cmd_embed_cm)
    return p


def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k == "run":
            continue
        if isinstance(v, Fraction):
            v = rat_str(v)
        elif isinstance(v, list) and v and isinstance(v[0], Fraction):
            v = [rat_str(x) for x in v]
        elif isinstance(v, list) and len(v) > 6:
            v = f"{v[0]}..{v[-1]}"
        out[k] = v
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads == 0:
        args.threads = os.cpu_count() or 1
    print("config " + json.dumps(_config(args), sort_keys=True), file=sys.stderr)
    try:
        return args.run(args)
    except (UsageError, ValueError, OSError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
