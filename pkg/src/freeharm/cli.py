"""``freeharm`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

from . import estimator, posdef
from .errors import FreeharmError, InvalidLetterError, ResourceCapError
from .funcspace import RadialFunction, function_from_json, lq_norm, radial_chi, radial_log_norm
from .words import GroupContext, Word, enumerate_ball, format_word, is_cyclically_reduced, parse_word

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def load_function(path, d: int | None = None):
    """Read a sparse function ({"terms": ...}) or radial profile ({"coeffs": ...})."""
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"{path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from None
    if not isinstance(obj, dict) or "d" not in obj:
        raise UsageError(f"{path}: expected an object with a 'd' field")
    try:
        ctx = GroupContext(int(obj["d"]))
        if d is not None and d != ctx.d:
            raise UsageError(f"{path}: file has d={ctx.d} but --d {d} was given")
        if "terms" in obj:
            return function_from_json(obj, ctx)
        if "coeffs" in obj:
            return posdef.RadialProfile.from_json(obj, ctx)
    except InvalidLetterError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    raise UsageError(f"{path}: expected a 'terms' or 'coeffs' field")


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_radial(text: str, ctx: GroupContext) -> RadialFunction:
    m = re.fullmatch(r"chi(\d+)", text)
    if m:
        return radial_chi(ctx, int(m.group(1)))
    raise UsageError(f"unknown radial input {text!r}; expected chi<k>, e.g. chi1")


def _word_arg(text: str, d: int) -> Word:
    text = text.strip()
    if text.startswith("["):
        try:
            letters = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--word: malformed JSON ({exc.msg})") from None
        return Word(letters, d)
    return parse_word(text, d)


# ------------------------------------------------------------ commands


def cmd_estimate_norm(args) -> int:
    ctx = GroupContext(args.d)
    if args.function:
        f = load_function(args.function, args.d)
        if isinstance(f, posdef.RadialProfile):
            f = RadialFunction(ctx, f.coeffs)
        descriptor = args.function
    else:
        f = _parse_radial(args.radial or "chi1", ctx)
        descriptor = args.radial or "chi1"
    report = estimator.power_norm_sequence(f, args.q, estimator.doubling_schedule(args.max_n), descriptor=descriptor)
    _emit(args, _dump(report.to_dict()) if args.json else report.to_csv())
    # when f sits on one sphere every u_n obeys u_n <= (k+1) |f|_q
    if isinstance(f, RadialFunction):
        nz = [i for i, c in enumerate(f.coeffs) if c != 0]
        if len(nz) == 1:
            log_bound = math.log(nz[0] + 1) + radial_log_norm(f, args.q)
            if any(lu > log_bound + 1e-9 for lu in report.log_u):
                return EXIT_FAIL
    else:
        lengths = f.lengths()
        if len(lengths) == 1:
            bound = (lengths.pop() + 1) * lq_norm(f, args.q)
            if any(u > bound * (1 + 1e-9) for u in report.values()):
                return EXIT_FAIL
    return EXIT_OK


def cmd_verify_lemmas(args) -> int:
    cases = args.cases
    summaries = [
        estimator.lemma_conv_battery(args.seed, cases, rhs_factor=args.rhs_factor),
        estimator.split_pair_battery(args.seed, max(1, cases // 5)),
        estimator.rep_bound_battery(args.seed, max(1, cases // 5), rhs_factor=args.rhs_factor),
    ]
    if args.json:
        _emit(args, _dump([{**s.__dict__, "passed": s.passed} for s in summaries]))
    else:
        _emit(args, _csv([s.row() for s in summaries], ["check", "cases", "checks", "failures", "worst_ratio"]))
    return EXIT_OK if all(s.passed for s in summaries) else EXIT_FAIL


def cmd_pd_check(args) -> int:
    ctx = GroupContext(args.d)
    if args.function:
        phi = load_function(args.function, args.d)
        report = posdef.gram_matrix(phi, enumerate_ball(ctx, args.radius))
    else:
        if args.alpha is None:
            raise UsageError("pd-check needs --alpha or --function")
        report = posdef.pd_battery_phi_alpha(ctx, args.alpha, args.radius)
    if args.json:
        _emit(args, _dump(report.to_dict()))
    else:
        _emit(args, _csv([[len(report.base_set), repr(report.min_eigenvalue), report.psd]],
                         ["size", "min_eigenvalue", "psd"]))
    return EXIT_OK if report.psd else EXIT_FAIL


def _profile_from_args(args, ctx):
    if args.function:
        phi = load_function(args.function, args.d)
        if not isinstance(phi, posdef.RadialProfile):
            raise UsageError(f"{args.function}: a radial profile ('coeffs') is required here")
        return phi
    if args.alpha is None:
        raise UsageError("need --alpha (geometric profile) or --function")
    return posdef.RadialProfile.geometric(ctx, args.alpha)


def cmd_conditions(args) -> int:
    ctx = GroupContext(args.d)
    phi = _profile_from_args(args, ctx)
    reports = posdef.condition_battery(phi, args.p, args.max_k)
    broken = posdef.chain_violations(reports)
    if args.json:
        _emit(args, _dump({"reports": [r.to_dict() for r in reports], "chain_violations": broken}))
    else:
        chosen = next(r for r in reports if r.condition == args.condition)
        _emit(args, chosen.sweep_csv())
    return EXIT_FAIL if broken else EXIT_OK


def cmd_threshold(args) -> int:
    value = posdef.lp_threshold(GroupContext(args.d), args.p)
    _emit(args, _dump({"d": args.d, "p": args.p, "threshold": value}) if args.json else f"{value!r}\n")
    return EXIT_OK


def cmd_separation(args) -> int:
    w = posdef.separation_witness(GroupContext(args.d), args.q, args.p, args.alpha)
    if args.json:
        _emit(args, _dump(w.to_dict()))
    else:
        rows = [[k, repr(v) if isinstance(v, float) else v] for k, v in w.to_dict().items()]
        _emit(args, _csv(rows, ["key", "value"]))
    return EXIT_OK if w.separates else EXIT_FAIL


def cmd_trace_growth(args) -> int:
    ctx = GroupContext(args.d)
    if args.word:
        words = [_word_arg(args.word, args.d)]
    else:
        words = [w for w in enumerate_ball(ctx, args.max_k) if w and is_cyclically_reduced(w)]
    rows, ok = [], True
    for w in words:
        for r in posdef.trace_growth_check(ctx, w, args.max_n):
            rows.append([format_word(w), r.n, r.count, r.lower_bound, r.passed])
            ok &= r.passed
    if args.json:
        keys = ["word", "n", "count", "lower_bound", "pass"]
        _emit(args, _dump([dict(zip(keys, r)) for r in rows]))
    else:
        _emit(args, _csv(rows, ["word", "n", "count", "lower_bound", "pass"]))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_holder(args) -> int:
    if args.cases:
        s = posdef.holder_battery(args.seed, args.cases, rhs_factor=args.rhs_factor)
        if args.json:
            _emit(args, _dump({**s.__dict__, "passed": s.passed}))
        else:
            _emit(args, _csv([s.row()], ["check", "cases", "checks", "failures", "worst_ratio"]))
        return EXIT_OK if s.passed else EXIT_FAIL
    ctx = GroupContext(args.d)
    if args.function:
        phi = _profile_from_args(args, ctx)
    else:
        phi = posdef.RadialProfile.geometric(ctx, args.profile_alpha)
    if args.alpha is None or args.beta is None:
        raise UsageError("holder needs --alpha and --beta (or --cases for the randomized battery)")
    r = args.r if args.r is not None else posdef.conjugate_exponent_r(args.p, args.q)
    rep = posdef.holder_triple_check(phi, args.alpha, args.beta, args.p, args.q, r)
    rep = estimator._perturb(rep, args.rhs_factor)
    if args.json:
        _emit(args, _dump(rep.to_dict()))
    else:
        _emit(args, _csv([[repr(rep.lhs), repr(rep.rhs), rep.passed]], ["lhs", "rhs", "pass"]))
    return EXIT_OK if rep.passed else EXIT_FAIL


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freeharm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--d", type=int, default=2, help="rank of the free group (default 2)")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--json", action="store_true", help="JSON instead of CSV")
        sp.set_defaults(func=func)
        return sp

    sp = add("estimate-norm", cmd_estimate_norm, "u_n = |(f*f)^(*2n)|_q^(1/4n) along n = 1, 2, 4, ...")
    sp.add_argument("--radial", help="built-in radial input: chi<k>")
    sp.add_argument("--function", help="JSON function or radial profile")
    sp.add_argument("--q", type=float, default=2.0)
    sp.add_argument("--max-n", type=int, default=256)

    sp = add("verify-lemmas", cmd_verify_lemmas, "randomized convolution-inequality batteries")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=1000)
    sp.add_argument("--rhs-factor", type=float, default=1.0, help="scale right-hand sides (violation injection)")

    sp = add("pd-check", cmd_pd_check, "Gram-matrix positive definiteness on a ball")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--radius", type=int, default=2)
    sp.add_argument("--function", help="JSON function or radial profile")

    sp = add("conditions", cmd_conditions, "summability conditions (2)-(4) for a radial profile")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--alpha", type=float, help="use phi_alpha(s) = alpha^|s|")
    sp.add_argument("--function", help="JSON radial profile")
    sp.add_argument("--max-k", type=int, default=20)
    sp.add_argument("--condition", type=int, choices=(2, 3, 4), default=2, help="which sweep to print as CSV")

    sp = add("threshold", cmd_threshold, "(2d-1)^(-1/p)")
    sp.add_argument("--p", type=float, default=2.0)

    sp = add("separation", cmd_separation, "phi_alpha separating the q and p completions")
    sp.add_argument("--q", type=float, default=2.0)
    sp.add_argument("--p", type=float, default=4.0)
    sp.add_argument("--alpha", type=float)

    sp = add("trace-growth", cmd_trace_growth, "conjugacy-class sphere counts vs (2d-1)^(n-1)")
    sp.add_argument("--word", help="cyclically reduced word, text (abA) or JSON ([1,2,-1])")
    sp.add_argument("--max-n", type=int, default=3)
    sp.add_argument("--max-k", type=int, default=2, help="word length for the exhaustive run")

    sp = add("holder", cmd_holder, "|phi phi_a phi_b|_p <= |phi phi_a|_q |phi_b|_r")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--q", type=float, default=4.0)
    sp.add_argument("--r", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--profile-alpha", type=float, default=0.5, help="phi = phi_{profile-alpha}")
    sp.add_argument("--function", help="JSON radial profile for phi")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=0)
    sp.add_argument("--rhs-factor", type=float, default=1.0)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"freeharm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"freeharm: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except FreeharmError as exc:
        print(f"freeharm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
