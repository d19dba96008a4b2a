"""``zipent`` command line: load a spec, run one computation, print a report.

Exit codes: 0 success, 2 invalid input, 3 a check was falsified, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import CapExceededError, OracleDisagreementError, ZipEntError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FALSIFIED = 3
EXIT_USAGE = 64

SIG_DIGITS = 12

# report keys whose float leaves are entropies; --bits rescales these subtrees only
ENTROPY_KEYS = frozenset({
    "h_plus", "h_minus", "h_square", "h_s", "h_z", "h_S_top", "sup_h_S_mu", "gap_entropy",
    "per_depth", "fekete", "value", "values", "oracle_value", "trajectory", "h1", "h2",
    "lhs", "rhs", "block_entropies", "limsup_values", "value_at_target", "closed_form",
    "increments", "min_increment", "entropies",
})


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# presentation


def _real(x: float):
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0


def normalize(obj, bits: bool = False, scale: bool = False):
    """JSON-ready copy: rationals as "p/q", reals at 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): normalize(v, bits, scale or (bits and k in ENTROPY_KEYS)) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [normalize(v, bits, scale) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _real(x / math.log(2) if scale else x)
    return obj


def _leaves(obj, prefix=""):
    if isinstance(obj, dict):
        if not obj:
            yield prefix, ""
        for k, v in obj.items():
            yield from _leaves(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        if not obj:
            yield prefix, ""
        for i, v in enumerate(obj):
            yield from _leaves(v, f"{prefix}.{i}" if prefix else str(i))
    else:
        yield prefix, obj


def _scalar_text(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in _leaves(report):
            w.writerow([k, _scalar_text(v)])
        return buf.getvalue().rstrip("\n")
    return "\n".join(f"{k}: {_scalar_text(v)}" for k, v in _leaves(report))


# ---------------------------------------------------------------------------
# helpers


def _spec(args):
    from .specfile import load_spec

    if args.spec is None:
        raise UsageError("--spec is required")
    if not (args.spec.lstrip().startswith("{") or Path(args.spec).exists()):
        from .specfile import SHIPPED

        if args.spec not in SHIPPED:
            raise UsageError(f"spec file {args.spec!r} not found")
    return load_spec(args.spec)


def _json_arg(text: str, what: str):
    try:
        if text.lstrip().startswith(("{", "[")):
            return json.loads(text)
        return json.loads(Path(text).read_text())
    except FileNotFoundError:
        raise UsageError(f"{what} file {text!r} not found") from None


def _invariant_measure(spec):
    from .errors import NotInvariantError

    mu = spec.measure
    if not mu.invariant:
        raise NotInvariantError("P_Z differs from the fiber sums of P_S; the measure is not invariant")
    return mu


# ---------------------------------------------------------------------------
# subcommands; each returns (report, exit code)


def cmd_validate(args):
    from .alphabets import check_invariance_condition, validate_transition

    spec = _spec(args)
    report = validate_transition(spec.pair).to_dict()
    report.update(l=spec.pair.l, m=spec.pair.m)
    ok, violations = check_invariance_condition(spec.p_s, spec.p_z, spec.pair)
    report.update(p_s=spec.p_s.to_json(), p_z=spec.p_z.to_json(), invariant=ok, violations=violations)
    report["forbidden"] = [{"side": f.side, "word": "".join(f.word)} for f in spec.sub.forbidden]
    return report, EXIT_OK if ok else EXIT_FALSIFIED


def cmd_entropy(args):
    from .entropy import square_measure_entropy

    mu = _invariant_measure(_spec(args))
    return square_measure_entropy(mu, args.depth).to_dict(), EXIT_OK


def cmd_square(args):
    spec = _spec(args)
    if args.kind == "topological":
        from .entropy import square_topological_entropy

        return square_topological_entropy(spec.sub, args.n, args.method).to_dict(), EXIT_OK
    from .entropy import square_measure_entropy

    if spec.sub.forbidden:
        raise UsageError("measure square entropy is defined on full zip shifts; use --kind topological")
    rep = square_measure_entropy(_invariant_measure(spec), args.depth)
    full = rep.to_dict()
    report = {"h_square": full.pop("h_square"), "h_plus": full.pop("h_plus"), "h_minus": full.pop("h_minus")}
    report.update(full)
    return report, EXIT_OK


def cmd_topological(args):
    from .entropy import square_topological_entropy, topological_entropy_side

    spec = _spec(args)
    if args.side:
        method = args.method or "word-count"
        return topological_entropy_side(spec.sub, args.side, args.n, method).to_dict(), EXIT_OK
    return square_topological_entropy(spec.sub, args.n, args.method).to_dict(), EXIT_OK


def cmd_invariance(args):
    from .measure import verify_invariance

    spec = _spec(args)
    rep = verify_invariance(spec.measure, args.depth, args.cap)
    report = {"passed": rep.passed, **rep.to_dict(), "depth": args.depth}
    return report, EXIT_OK if rep.passed else EXIT_FALSIFIED


def cmd_mixing(args):
    from .measure import index_span, mixing_correlation, random_cylinder
    from .space import CylinderSpec

    spec = _spec(args)
    mu = _invariant_measure(spec)
    if args.random:
        if args.seed is None:
            raise UsageError("--seed is required with --random")
        rng = np.random.default_rng(args.seed)
        pairs = [
            (random_cylinder(mu.pair, rng, args.max_depth), random_cylinder(mu.pair, rng, args.max_depth))
            for _ in range(args.random)
        ]
    else:
        if args.a is None or args.b is None:
            raise UsageError("give --a and --b, or --random K --seed S")
        pairs = [(CylinderSpec(_json_arg(args.a, "cylinder")).check(mu.pair), CylinderSpec(_json_arg(args.b, "cylinder")).check(mu.pair))]
    rows, ok = [], True
    for a, b in pairs:
        span = index_span(a, b)
        ns = [args.n] if args.n is not None else list(range(0, max(span, 0) + args.extra + 1))
        gaps = {}
        for n in ns:
            res = mixing_correlation(a, b, n, mu)
            gaps[str(n)] = res.gap
            if n > span and res.gap != 0:
                ok = False
        rows.append({"a": a.to_json(), "b": b.to_json(), "span": span, "gaps": gaps})
    report = {"zero_beyond_span": ok, "pairs": rows}
    return report, EXIT_OK if ok else EXIT_FALSIFIED


def cmd_words(args):
    from .space import count_words_bruteforce, enumerate_words

    spec = _spec(args)
    if args.method == "bruteforce":
        count = count_words_bruteforce(spec.pair.alphabet(args.side), spec.sub.words_for(args.side), args.n)
        report = {"count": count}
    else:
        report = enumerate_words(spec.sub, args.side, args.n, return_words=args.list).to_dict()
    if "words" in report:
        report["words"] = "\n".join(report["words"])
    report.update(side=args.side.upper(), n=args.n)
    return report, EXIT_OK


def cmd_variational(args):
    from .validation import check_seed
    from .variational import intrinsic_ergodicity_probe, maximize_square_entropy

    spec = _spec(args)
    seed = check_seed(args.seed)
    try:
        rep = maximize_square_entropy(
            spec.pair, starts=args.starts, step=args.step, iters=args.iters, tol=args.tol, seed=seed,
            oracle=not args.no_oracle,
        )
        code = EXIT_OK
        report = rep.to_dict()
    except OracleDisagreementError as exc:
        return {"error": "oracle_disagreement", "detail": str(exc)}, EXIT_FALSIFIED
    if spec.sub.is_full:
        from .entropy import square_topological_entropy

        top = square_topological_entropy(spec.sub, args.n)
        report["h_S_top"] = top.h_square
        report["gap_entropy"] = top.h_square - rep.value
        if report["gap_entropy"] < -1e-9:
            code = EXIT_FALSIFIED
    if args.probe:
        report["probe"] = intrinsic_ergodicity_probe(spec.pair, starts=max(args.starts, 20), seed=seed).to_dict()
    return report, code


def _pair_arg(text: str):
    try:
        m, l = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected m,l but got {text!r}") from None
    return m, l


def cmd_classify(args):
    from .variational import classify_uniform, square_entropy_increments, uniform_square_entropy

    report = {}
    pairs = [_pair_arg(p) for p in args.pairs]
    if pairs:
        report["entropies"] = {f"{m},{l}": uniform_square_entropy(m, l) for m, l in pairs}
        report["comparisons"] = [
            {"first": f"{m1},{l1}", "second": f"{m2},{l2}", **classify_uniform(m1, l1, m2, l2).to_dict()}
            for i, (m1, l1) in enumerate(pairs)
            for (m2, l2) in pairs[i:]
        ]
    if args.monotonicity:
        mono = {}
        for n in args.n_values:
            inc = square_entropy_increments(n, range(2, args.m_max + 1))
            mono[str(n)] = {"min_increment": float(inc.min()), "all_positive": bool((inc > 0).all())}
        report["monotonicity"] = mono
    if not report:
        raise UsageError("give at least one m,l pair or --monotonicity")
    return report, EXIT_OK


def cmd_baker(args):
    from .baker import BakerSpec, coded_square_entropy, conjugacy_check, measure_preservation_mc
    from .validation import check_seed

    spec = _spec(args)
    seed = check_seed(args.seed)
    baker = BakerSpec(spec.pair)
    report, code = {}, EXIT_OK
    checks = ["conjugacy", "measure", "entropy"] if args.check == "all" else [args.check]
    if "conjugacy" in checks:
        rep = conjugacy_check(baker, args.samples, args.depth, seed, exact=args.exact)
        report["conjugacy"] = rep.to_dict()
        if rep.mismatches:
            code = EXIT_FALSIFIED
    if "measure" in checks:
        rects = measure_preservation_mc(baker, samples=args.samples, seed=seed)
        report["measure"] = [r.to_dict() for r in rects]
        if any(abs(r.z) > 3 for r in rects):
            code = EXIT_FALSIFIED
    if "entropy" in checks:
        ent = coded_square_entropy(baker, min(args.depth, 6)).to_dict()
        ent["closed_form"] = math.sqrt(math.log(baker.m) * math.log(baker.l))
        report["entropy"] = ent
    return report, code


def cmd_orbit(args):
    from .space import WindowPoint, apply_zip_shift, distance, expansivity_witness, iterated_preimages

    spec = _spec(args)
    x = WindowPoint.parse(_json_arg(args.point, "point"), spec.pair)
    report = {"point": x.to_json(), "iterates": [apply_zip_shift(x, k, spec.pair).to_json() for k in range(args.k + 1)]}
    if args.preimages:
        layer = iterated_preimages(x, args.preimages, spec.pair)
        report["preimages"] = [p.to_json() for p in layer]
    if args.compare:
        y = WindowPoint.parse(_json_arg(args.compare, "point"), spec.pair)
        w = expansivity_witness(x, y, args.K, spec.pair)
        report["distance"] = distance(x, y)
        report["expansivity"] = None if w is None else {"k": w[0], "separation": w[1]}
    return report, EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--bits", action="store_true", help="report entropies in bits instead of nats")
    with_spec = _Parser(add_help=False, parents=[common])
    with_spec.add_argument("--spec", help="spec JSON file, inline JSON, or a shipped example name")

    parser = _Parser(prog="zipent", description="Zip shift entropy toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("validate", parents=[with_spec], help="check tau and the measure law")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("entropy", parents=[with_spec], help="forward/backward measure entropy")
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("square", parents=[with_spec], help="square entropy")
    p.add_argument("--kind", choices=("measure", "topological"), default="measure")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--method", choices=("word-count", "spanning", "transfer-matrix"))
    p.set_defaults(func=cmd_square)

    p = sub.add_parser("topological", parents=[with_spec], help="topological entropy")
    p.add_argument("--side", choices=("S", "Z", "s", "z"))
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--method", choices=("word-count", "spanning", "transfer-matrix"))
    p.set_defaults(func=cmd_topological)

    p = sub.add_parser("invariance", parents=[with_spec], help="exhaustive cylinder invariance check")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--cap", type=int, default=10**6)
    p.set_defaults(func=cmd_invariance)

    p = sub.add_parser("mixing", parents=[with_spec], help="exact mixing correlations")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--n", type=int)
    p.add_argument("--random", type=int, default=0, metavar="K")
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--extra", type=int, default=3, help="n values past the index span to test")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("words", parents=[with_spec], help="count admissible words")
    p.add_argument("--side", choices=("S", "Z", "s", "z"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.add_argument("--method", choices=("dp", "bruteforce"), default="dp")
    p.set_defaults(func=cmd_words)

    p = sub.add_parser("variational", parents=[with_spec], help="maximize square entropy over invariant measures")
    p.add_argument("--starts", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--probe", action="store_true", help="also run the uniqueness probe")
    p.set_defaults(func=cmd_variational)

    p = sub.add_parser("classify", parents=[common], help="compare uniform (m,l) pairs")
    p.add_argument("pairs", nargs="*", metavar="m,l")
    p.add_argument("--monotonicity", action="store_true")
    p.add_argument("--m-max", type=int, default=64)
    p.add_argument("--n-values", type=int, nargs="+", default=[2, 3, 4])
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("baker", parents=[with_spec], help="baker's map checks")
    p.add_argument("--check", choices=("conjugacy", "measure", "entropy", "all"), default="conjugacy")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_baker)

    p = sub.add_parser("orbit", parents=[with_spec], help="iterate a point forward and backward")
    p.add_argument("--point", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--preimages", type=int, default=0)
    p.add_argument("--compare")
    p.add_argument("--K", type=int, default=10)
    p.set_defaults(func=cmd_orbit)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_USAGE
    try:
        report, code = args.func(args)
    except UsageError as exc:
        print(f"zipent {args.command}: error: {exc}", file=err)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"zipent {args.command}: {exc}", file=err)
        return EXIT_INVALID
    except (ZipEntError, ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        print(f"zipent {args.command}: invalid input: {exc}", file=err)
        return EXIT_INVALID
    report = normalize(report, bits=args.bits)
    report["unit"] = "bits" if args.bits else "nats"
    print(render(report, args.format), file=out)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
