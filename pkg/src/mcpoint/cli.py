"""Command-line interface: ``mcpoint <subcommand> ...``.

Output lines are ``key=value`` pairs.  Exit status: 0 success, 1 computation
or data error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .curves import CurveError, NotationError, QuotientCurve, prime_power
from .lattice import LatticeError, genus_from_basis, points_from_basis
from .lmfdb import FetchError, FetchRequest, fetch_levels
from .multiplicity import MultiplicityError, UNRAMIFIED_POLICIES, decompose
from .newforms import CoverageError, FixtureError, fixtures_path, load_fixtures
from .points import PointCountError, count_points, hws_bound, real_weil_poly_of_curve
from .polynomial import PolynomialError
from .scanner import ScanConfig, scan, write_tables

DATA_ERRORS = (CurveError, LatticeError, FetchError, MultiplicityError, CoverageError,
               FixtureError, PointCountError, PolynomialError)


class UsageError(Exception):
    pass


def parse_q(text: str) -> tuple[int, int]:
    """``"p^k"`` or a plain prime power, as ``(p, k)``."""
    try:
        if "^" in text:
            base, exp = text.split("^")
            p, k = int(base), int(exp)
            if k < 1 or prime_power(p) != (p, 1):
                raise ValueError
            return p, k
        pk = prime_power(int(text))
        if pk is None:
            raise ValueError
        return pk
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a prime power") from None


def parse_curve(text: str) -> QuotientCurve:
    try:
        return QuotientCurve.parse(text)
    except NotationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    except CurveError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    return out


def _mask(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bitmask {text!r}") from None


def _store_for(curve: QuotientCurve, args):
    return load_fixtures(fixtures_path(args.fixtures), curve.level.relevant_levels())


def cmd_count(args) -> None:
    store = _store_for(args.curve, args)
    dec = decompose(args.curve, store, args.policy)
    for p, k in args.q:
        print(count_points(dec, p, k).summary())


def cmd_genus(args) -> None:
    store = _store_for(args.curve, args)
    dec = decompose(args.curve, store, args.policy)
    print(f"curve={args.curve.notation()} genus={dec.genus}")


def cmd_decompose(args) -> None:
    store = _store_for(args.curve, args)
    dec = decompose(args.curve, store, args.policy)
    for label, m in dec.terms.items():
        print(f"label={label} dim={dec.dims[label]} multiplicity={m}")
    print(f"curve={args.curve.notation()} genus={dec.genus} classes={len(dec.terms)}")


def cmd_weil(args) -> None:
    store = _store_for(args.curve, args)
    dec = decompose(args.curve, store, args.policy)
    for p, k in args.q:
        h = real_weil_poly_of_curve(dec, p, k)
        print(f"curve={args.curve.notation()} q={p}^{k} genus={dec.genus} "
              f"real_weil_polynomial={str(h).replace(' ', '')} coeffs={','.join(map(str, h.coeffs))}")


def cmd_bound(args) -> None:
    p, k = args.q
    print(f"bound={hws_bound(args.genus, p, k)}")


def cmd_lattice(args) -> None:
    text = args.data
    if Path(text).is_file():
        text = Path(text).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
        data = {int(key, 0) if isinstance(key, str) else int(key): int(v) for key, v in raw.items()}
    except (json.JSONDecodeError, ValueError, AttributeError) as exc:
        raise UsageError(f"--data must be a JSON object from subset bitmask to integer: {exc}") from None
    fn = genus_from_basis if args.what == "genus" else points_from_basis
    value = fn(data, args.r, args.subgroup)
    print(f"r={args.r} subgroup={','.join(map(str, args.subgroup))} {args.what}={value}")


def cmd_scan(args) -> None:
    try:
        cfg = ScanConfig.from_file(args.config)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad scan config {args.config}: {exc}") from None
    if args.threads is not None:
        cfg.threads = args.threads
    if args.output is not None:
        cfg.output = args.output
    if args.fixtures is not None:
        cfg.fixtures = args.fixtures
    store = load_fixtures(fixtures_path(cfg.fixtures))
    rows = scan(cfg, store)
    write_tables(Path(cfg.output), rows, store, cfg)
    skipped = json.loads((Path(cfg.output) / "skips.json").read_text())
    print(f"rows={len(rows)} skipped_pairs={len(skipped)} output={cfg.output}")


def cmd_fetch(args) -> None:
    req = FetchRequest(set(args.levels), set(args.primes), Path(args.cache), offline=args.offline,
                       timeout=args.timeout)
    if args.url:
        req.base_url = args.url
    store = fetch_levels(req, output=Path(args.output) if args.output else None)
    print(f"levels={len(store.coverage)} records={len(store)}"
          + (f" output={args.output}" if args.output else ""))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcpoint", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def curve_cmd(name, func, helptext, with_q=True):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--curve", type=parse_curve, required=True, help='e.g. "(6,7){1,2;3}"')
        if with_q:
            sp.add_argument("--q", type=parse_q, action="append", required=True,
                            help="field size as p^k or a prime power; repeatable")
        sp.add_argument("--fixtures", help="fixture file or directory (default: $MCPOINT_FIXTURES or bundled)")
        sp.add_argument("--policy", choices=UNRAMIFIED_POLICIES, default="trivial",
                        help="Atkin-Lehner sign at primes not dividing a form's level")
        sp.set_defaults(func=func)
        return sp

    curve_cmd("count", cmd_count, "genus, point count and maximality")
    curve_cmd("genus", cmd_genus, "genus of the quotient", with_q=False)
    curve_cmd("decompose", cmd_decompose, "newform classes with multiplicities", with_q=False)
    curve_cmd("weil", cmd_weil, "real Weil polynomial")

    sp = sub.add_parser("bound", help="Hasse-Weil-Serre bound")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--q", type=parse_q, required=True)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("lattice", help="genus or point count from basis-subgroup data")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--data", required=True, help="JSON object (or file) mapping subset bitmask to value")
    sp.add_argument("--subgroup", type=lambda s: [_mask(t) for t in s.split(",") if t.strip()],
                    default=[], help="comma-separated generator bitmasks, e.g. 3 or 0b011,0b100")
    sp.add_argument("--what", choices=("genus", "points"), default="genus")
    sp.set_defaults(func=cmd_lattice)

    sp = sub.add_parser("scan", help="scan level pairs and write tables")
    sp.add_argument("--config", required=True)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--output")
    sp.add_argument("--fixtures")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("fetch", help="download newform data from the LMFDB")
    sp.add_argument("--levels", type=_int_list, required=True, help="e.g. 49,98,100-120")
    sp.add_argument("--primes", type=_int_list, required=True)
    sp.add_argument("--cache", required=True)
    sp.add_argument("--output", help="write a canonical fixture file here")
    sp.add_argument("--offline", action="store_true")
    sp.add_argument("--url", help="API base URL (default: $MCPOINT_LMFDB_URL or lmfdb.org)")
    sp.add_argument("--timeout", type=float, default=30.0)
    sp.set_defaults(func=cmd_fetch)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mcpoint: error: {exc}", file=sys.stderr)
        return 2
    except DATA_ERRORS as exc:
        print(f"mcpoint: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
