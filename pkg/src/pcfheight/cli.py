"""Command-line front end.

Every output embeds a run manifest: JSON outputs under ``"manifest"``, CSV
outputs as leading ``#`` comment lines.  Exit codes: 0 success, 2 argument
error, 3 Undetermined-dominated result under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import re
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .arith import ArgumentError, Place, format_rational, parse_rational
from .polys import ComposedMap, MonicPoly

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ARGS, EXIT_UNDETERMINED = 0, 2, 3


@dataclass
class RunManifest:
    version: str
    subcommand: str
    params: dict
    seed: int | None
    timestamp: str
    input_hashes: dict = field(default_factory=dict)

    @classmethod
    def build(cls, args: argparse.Namespace, inputs: dict) -> "RunManifest":
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "func")}
        return cls(
            version=__version__,
            subcommand=" ".join(x for x in (args.command, getattr(args, "action", None)) if x),
            params=params,
            seed=getattr(args, "seed", None),
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            input_hashes={k: hashlib.sha256(v.encode()).hexdigest() for k, v in sorted(inputs.items())},
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


# -- input parsing ------------------------------------------------------------------


def parse_poly(text: str) -> list[Fraction]:
    """JSON array of rationals (strings or ints), constant first, below the leading 1."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"malformed polynomial JSON at position {exc.pos}: {text!r}") from None
    if not isinstance(data, list) or not data:
        raise ArgumentError(f"polynomial must be a non-empty JSON array, got {text!r}")
    out = []
    for tok in data:
        if isinstance(tok, bool) or not isinstance(tok, (str, int)):
            raise ArgumentError(f"bad coefficient token {json.dumps(tok)}")
        try:
            out.append(parse_rational(str(tok)))
        except ArgumentError:
            raise ArgumentError(f"bad coefficient token {json.dumps(tok)}") from None
    return out


def composed_map(poly: str, d: int, degree_check: int | None = None) -> ComposedMap:
    coeffs = parse_poly(poly)
    if degree_check is not None and degree_check != len(coeffs):
        raise ArgumentError(f"--degree-check {degree_check} but --poly has degree {len(coeffs)}")
    if d < 1:
        raise ArgumentError("d must be >= 1")
    if d * len(coeffs) < 2:
        raise ArgumentError("total degree d*deg(g) must be >= 2")
    return ComposedMap(MonicPoly(coeffs), d)


_Q = r"-?\d+(?:/\d+)?"


def parse_point(text: str):
    """A rational, or a Gaussian rational written ``a+bi`` / ``a-bi`` / ``bi``."""
    if re.fullmatch(_Q, text):
        return parse_rational(text)
    m = re.fullmatch(rf"^({_Q})?([+-])?(\d+(?:/\d+)?)?i$", text)
    if not m:
        raise ArgumentError(f"malformed point {text!r}")
    re_part = parse_rational(m.group(1)) if m.group(1) else Fraction(0)
    im = parse_rational(m.group(3)) if m.group(3) else Fraction(1)
    if m.group(2) == "-":
        im = -im
    return (re_part, im) if im != 0 else re_part


def parse_levels(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ArgumentError(f"bad level list {text!r}") from None


# -- output ---------------------------------------------------------------------------


def _write(args, text: str):
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_json(args, manifest: RunManifest, result: dict):
    doc = {"schema_version": SCHEMA_VERSION, "manifest": asdict(manifest), "result": result}
    _write(args, json.dumps(doc, indent=2, sort_keys=False, default=str) + "\n")


def emit_csv(args, manifest: RunManifest, header: list[str], rows: list[list]):
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    for k, v in asdict(manifest).items():
        buf.write(f"# {k}: {json.dumps(v, sort_keys=True, default=str)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _write(args, buf.getvalue())


# -- subcommands ----------------------------------------------------------------------------


def _enum_rows(rows):
    return [[r.d, format_rational(r.c), str(r.pcf).lower(), "" if r.tail is None else r.tail,
             "" if r.period is None else r.period, " ".join(format_rational(x) for x in r.orbit)]
            for r in rows]


ENUM_HEADER = ["d", "c", "pcf", "tail", "period", "orbit"]


def cmd_enumerate(args) -> int:
    from .pcf import unicritical_candidates, unicritical_enumerate

    rows = unicritical_enumerate(args.d, args.box, args.cap, args.jobs)
    emit_csv(args, RunManifest.build(args, {}), ENUM_HEADER, _enum_rows(rows))
    missing = len(unicritical_candidates(args.d, args.box)) - len(rows)
    return EXIT_UNDETERMINED if args.strict and missing else EXIT_OK


def cmd_sweep(args) -> int:
    from .pcf import unicritical_enumerate

    if args.dmax < 2:
        raise ArgumentError("dmax must be >= 2")
    rows = []
    for d in range(2, args.dmax + 1):
        rows.extend(unicritical_enumerate(d, None, args.cap, args.jobs))
    emit_csv(args, RunManifest.build(args, {}), ENUM_HEADER, _enum_rows(rows))
    return EXIT_OK


def cmd_green(args) -> int:
    from .dynamics import Undetermined, green_arch, green_nonarch, green_to_json

    F = composed_map(args.poly, args.d, args.degree_check)
    z = parse_point(args.z)
    v = Place.parse(args.place)
    if v.is_archimedean:
        gv = green_arch(F, z, args.tol, args.cap)
    else:
        if isinstance(z, tuple):
            raise ArgumentError("non-archimedean Green values need a rational point")
        gv = green_nonarch(F, z, v.prime, args.cap)
    emit_json(args, RunManifest.build(args, {"poly": args.poly}),
              {"map": str(F), "z": args.z, "place": str(v), "green": green_to_json(gv)})
    return EXIT_UNDETERMINED if args.strict and isinstance(gv, Undetermined) else EXIT_OK


def cmd_crit_height(args) -> int:
    from .dynamics import PcfFlag, crit_height

    F = composed_map(args.poly, args.d, args.degree_check)
    rep = crit_height(F, args.cap, args.tol, args.jobs)
    body = {"map": str(F), **rep.to_json(), "certificate": rep.certificate.to_json()}
    emit_json(args, RunManifest.build(args, {"poly": args.poly}), body)
    bad = rep.has_undetermined or rep.pcf_flag == PcfFlag.INCONCLUSIVE
    return EXIT_UNDETERMINED if args.strict and bad else EXIT_OK


def cmd_lemma_check(args) -> int:
    from .pcf import c3_constant, lemma3_check

    F = composed_map(args.poly, args.d, args.degree_check)
    v = Place.parse(args.place)
    if args.c3 is not None:
        c3 = float(args.c3) if v.is_archimedean else parse_rational(args.c3)
        c3_info = {"value": args.c3, "source": "user"}
    else:
        const = c3_constant(F.m, v)
        c3 = const.value
        c3_info = {**const.to_json(), "source": "derived"}
    res = lemma3_check(F.g, F.d, v, c3, args.cap, args.tol)
    body = {"map": str(F), "place": str(v), "C3": c3_info, "lambda_lower": res.lambda_lower,
            "rhs": res.rhs, "holds": res.holds}
    emit_json(args, RunManifest.build(args, {"poly": args.poly}), body)
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .pcf import psi_bound_experiment, theorem1_experiment

    if args.action == "theorem1":
        rep = theorem1_experiment(args.m, args.d, parse_levels(args.levels), args.samples, args.seed,
                                  args.cap, args.tol, args.jobs)
        emit_json(args, RunManifest.build(args, {}), rep.to_json())
    else:
        rep = psi_bound_experiment(args.m, args.samples, args.seed, Place.parse(args.place))
        emit_json(args, RunManifest.build(args, {}), rep.to_json())
    return EXIT_OK


def _family(args):
    from .charp import CharPFamily

    try:
        data = json.loads(args.g)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"malformed family JSON at position {exc.pos}: {args.g!r}") from None
    Place(args.p)  # rejects non-primes
    return CharPFamily.from_json(data, args.d, args.p)


def cmd_charp(args) -> int:
    from .charp import ff_family_pcf_test, specialization_scan

    F = _family(args)
    inputs = {"g": args.g}
    if args.action == "family-test":
        res = ff_family_pcf_test(F)
        emit_json(args, RunManifest.build(args, inputs), {"family": str(F), **res.to_json()})
        return EXIT_OK
    rows = specialization_scan(F, args.kmax, args.budget, args.seed, args.skip_zero)
    emit_csv(args, RunManifest.build(args, inputs),
             ["k", "count", "max_size", "mean_size", "sampled", "skipped_poles", "no_critical"],
             [[r.k, r.count, r.max_size, f"{r.mean_size:.6f}", str(r.sampled).lower(),
               r.skipped_poles, r.no_critical] for r in rows])
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    # a fresh parent per subcommand, so set_defaults on one never leaks into another
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output file (default stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=0, help="RNG seed for experiments and sampling")
    common.add_argument("--cap", type=int, default=10_000, help="iteration cap")
    common.add_argument("--tol", type=float, default=1e-9, help="archimedean enclosure width target")
    common.add_argument("--strict", action="store_true", help="exit 3 on Undetermined-dominated results")
    common.add_argument("--budget", type=int, default=100_000, help="max parameters per scan level")
    return common


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pcfheight", description="Certified critical heights of g(z^d).")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", parents=[_common()], help="PCF maps z^d + c under the height bound")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--box", type=int, default=None, help="use max(|p|, q) <= BOX instead of the bound")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sweep", parents=[_common()], help="enumerate for every d <= dmax")
    p.add_argument("--dmax", type=int, required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("green", parents=[_common()], help="local Green function at a point")
    p.add_argument("--poly", required=True, help='g below its leading 1, constant first, e.g. \'["-2"]\'')
    p.add_argument("--degree-check", type=int, default=None, help="expected deg g")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--z", required=True, help='rational "p/q" or Gaussian rational "a+bi"')
    p.add_argument("--place", default="inf", help="inf or a prime")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("crit-height", parents=[_common()], help="critical height report")
    p.add_argument("--poly", required=True)
    p.add_argument("--degree-check", type=int, default=None, help="expected deg g")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_crit_height)

    p = sub.add_parser("lemma-check", parents=[_common()], help="local lower bound for lambda_crit")
    p.add_argument("--poly", required=True)
    p.add_argument("--degree-check", type=int, default=None, help="expected deg g")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--place", default="inf")
    p.add_argument("--c3", default=None, help="override C3 (float at inf, rational log p coefficient at p)")
    p.set_defaults(func=cmd_lemma_check, tol=1e-4, cap=64)

    p = sub.add_parser("experiment", help="observational experiments")
    esub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = esub.add_parser("theorem1", parents=[_common()])
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--levels", default="2,4,6,8,10")
    e.add_argument("--samples", type=int, default=50)
    e.set_defaults(func=cmd_experiment, cap=200, tol=1e-6)
    e = esub.add_parser("psi", parents=[_common()])
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--samples", type=int, default=20_000)
    e.add_argument("--place", default="inf")
    e.set_defaults(func=cmd_experiment)

    p = sub.add_parser("charp", help="families over F_p(t)")
    csub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, helptext in (("family-test", "non-constant family test"), ("scan", "specialization scan")):
        c = csub.add_parser(name, parents=[_common()], help=helptext)
        c.add_argument("--p", type=int, required=True)
        c.add_argument("--g", required=True, help="JSON array of F_p(t) coefficients below the leading 1")
        c.add_argument("--d", type=int, required=True)
        if name == "scan":
            c.add_argument("--kmax", type=int, required=True)
            c.add_argument("--skip-zero", action="store_true", help="omit t0 = 0")
        c.set_defaults(func=cmd_charp)
    return ap


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
        return EXIT_ARGS
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"pcfheight {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ARGS


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
