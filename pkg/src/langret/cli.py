"""Command line entry point: ``langret <subcommand> ...``.

Every rational in JSON output is a string ``"p/q"`` (or ``"p"``).  Exit codes:
0 success, 1 bad input, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import exact_linalg as la
from .coweights import RootDatum, coweight_certificate_ok, load_datum_file, named_datum, retract_G
from .envelope import StepFunction, concave_envelope_hull, concave_envelope_pav, pool_slopes
from .fan import check_completeness, check_face_intersections, enumerate_fan, fan_svg_rank2
from .retraction import CertificateError, GuardExceeded, RetractionResult, certificate_ok, retract
from .root_data import ObtuseBasis, RootDataError, load_gram_file, make_system
from .verify import PlanError, Target, VerifyPlan, run_verify

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2
FACE_SWEEP_MAX_RANK = 6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _dump(obj, fmt: str) -> str:
    if fmt == "pretty":
        return json.dumps(obj, indent=2, ensure_ascii=False)
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _strs(v) -> list[str]:
    return [la.format_rational(x) for x in v]


def _basis(args) -> ObtuseBasis:
    if args.system and args.gram_file:
        raise UsageError("give either --system or --gram-file, not both")
    if args.gram_file:
        return load_gram_file(args.gram_file)
    if args.system:
        return make_system(args.system)
    raise UsageError("one of --system or --gram-file is required")


def _datum(args) -> RootDatum:
    if args.group and args.datum_file:
        raise UsageError("give either --group or --datum-file, not both")
    if args.datum_file:
        return load_datum_file(args.datum_file)
    if args.group:
        return named_datum(args.group)
    raise UsageError("one of --group or --datum-file is required")


def retract_payload(B: ObtuseBasis, x, r: RetractionResult) -> dict:
    return {
        "system": B.name,
        "value": _strs(r.value),
        "active_set": [j + 1 for j in r.active_set],
        "residual_coeffs": {str(j + 1): la.format_rational(c) for j, c in sorted(r.residual_coeffs.items())},
        "certificate_ok": certificate_ok(B, x, r),
        "used_fallback": r.used_fallback,
    }


def cmd_retract(args) -> int:
    B = _basis(args)
    x = la.parse_vector(args.vector)
    r = retract(B, x)
    print(_dump(retract_payload(B, x, r), args.format))
    return EXIT_OK


def cmd_fan(args) -> int:
    B = _basis(args)
    fan = enumerate_fan(B)
    out = {
        "system": B.name,
        "rank": B.rank,
        "cones": [{"J": [j + 1 for j in c.J], "generators": [_strs(g) for g in c.generators]} for c in fan],
    }
    if args.check:
        comp = check_completeness(B, args.samples, args.seed, fan=fan)
        out["simplicial"] = True  # enumerate_fan raises otherwise
        out["uncovered"] = comp["uncovered"]
        if B.rank <= FACE_SWEEP_MAX_RANK:
            faces = check_face_intersections(B, seed=args.seed, fan=fan)
            out["face_failures"] = faces["face_failures"]
        else:
            out["face_failures"] = []
            out["face_sweep"] = "skipped"
    if args.svg:
        Path(args.svg).write_text(fan_svg_rank2(B))
        out["svg"] = args.svg
    print(_dump(out, args.format))
    failed = args.check and (out["uncovered"] or out["face_failures"])
    return EXIT_FAILED if failed else EXIT_OK


def cmd_envelope(args) -> int:
    f = StepFunction(la.parse_vector(args.values), args.variant)
    env = concave_envelope_hull(f)
    pav = concave_envelope_pav(f)
    out = {
        "variant": f.variant,
        "envelope": _strs(env.values),
        "pools": [{"start": a, "stop": b, "slope": la.format_rational(m)} for a, b, m in pool_slopes(f.slopes())],
        "hull_pav_agree": env == pav,
    }
    print(_dump(out, args.format))
    return EXIT_OK if env == pav else EXIT_FAILED


def cmd_coweight(args) -> int:
    D = _datum(args)
    lam = la.parse_vector(args.coweight)
    mu, d = retract_G(D, lam)
    out = {
        "group": D.name,
        "value": _strs(mu),
        "d": _strs(d),
        "certificate_ok": coweight_certificate_ok(D, lam, mu, d),
    }
    print(_dump(out, args.format))
    return EXIT_OK


def cmd_verify(args) -> int:
    systems = [s for s in (args.systems or "").split(",") if s.strip()]
    targets = [Target.parse(s) for s in systems]
    for path in args.gram_file or ():
        B = load_gram_file(path)
        targets.append(Target.from_gram(B.gram, B.name))
    for path in args.datum_file or ():
        targets.append(Target.from_datum(load_datum_file(path)))
    plan = VerifyPlan.make(targets, trials=args.trials, seed=args.seed, checks=args.checks, workers=args.workers)
    report = run_verify(plan)
    print(report.to_json(include_timing=args.timing, indent=2 if args.format == "pretty" else None))
    return EXIT_OK if report.ok(allow_nonobtuse=args.allow_nonobtuse) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "pretty"), default="json", help="output style (default json)")

    p = _Parser(prog="langret", description="Exact retraction onto the dominant cone of a root system.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def system_args(sp):
        sp.add_argument("--system", help="catalog system, e.g. A3, G2")
        sp.add_argument("--gram-file", help='JSON file {"gram": [["2","-1"],...]}')

    sp = sub.add_parser("retract", parents=[common], help="retract a vector given in alpha-coordinates")
    system_args(sp)
    sp.add_argument("--vector", required=True, help='comma separated rationals, e.g. "1,-1/2"')
    sp.set_defaults(func=cmd_retract)

    sp = sub.add_parser("fan", parents=[common], help="list the linearity cones, optionally check or draw them")
    system_args(sp)
    sp.add_argument("--svg", help="write a drawing (rank 2 only)")
    sp.add_argument("--check", action="store_true", help="run simpliciality, coverage and face checks")
    sp.add_argument("--samples", type=int, default=10_000, help="coverage samples for --check")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_fan)

    sp = sub.add_parser("envelope", parents=[common], help="least concave majorant of f(0..n)")
    sp.add_argument("--values", required=True, help='f(0),...,f(n), e.g. "0,2,1,3"')
    sp.add_argument("--variant", choices=("gl", "sl"), default="gl")
    sp.set_defaults(func=cmd_envelope)

    sp = sub.add_parser("coweight-retract", parents=[common], help="retract a rational coweight of a root datum")
    sp.add_argument("--group", help="gl<n>, or a catalog name for its simply connected datum")
    sp.add_argument("--datum-file", help='JSON file {"rank": r, "coroots": [...], "roots": [...]}')
    sp.add_argument("--coweight", required=True)
    sp.set_defaults(func=cmd_coweight)

    sp = sub.add_parser("verify", parents=[common], help="seeded property checks")
    sp.add_argument("--systems", help="comma separated catalog names and gl<n>")
    sp.add_argument("--gram-file", action="append", help="custom basis (repeatable)")
    sp.add_argument("--datum-file", action="append", help="custom root datum (repeatable)")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--checks", default="all", help="'all' or a comma separated list")
    sp.add_argument("--workers", type=int, default=1, help="worker processes; output does not depend on it")
    sp.add_argument("--allow-nonobtuse", action="store_true",
                    help="hypothesis violations on non-obtuse bases do not fail the exit code")
    sp.add_argument("--timing", action="store_true", help="include elapsed time in the report")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, RootDataError, PlanError, GuardExceeded, ValueError, OSError) as exc:
        print(f"langret {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CertificateError as exc:
        print(f"langret {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
