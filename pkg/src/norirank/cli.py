"""Command-line surface: instance parsing, report emission, and the
self-test corpus runner.

Exit codes: 0 certified/clean, 1 usage or internal error (and selftest
failure), 2 refuted, 3 cap exceeded, 4 non-compact, 5 unknown factor,
6 verdicts computed but flagged heuristic_regime (characteristic below the
configured threshold).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .certify import (
    AnalyzeOptions,
    RationalMat,
    analyze,
    check_dim_criterion,
    check_rank_bound,
    certify_fullness_per_type,
    certify_fullness_type_a,
    reduce_mod_ell,
    stabilize_lattice,
)
from .errors import (
    CapExceededError,
    NonCompactError,
    NoriRankError,
    SchemaError,
    UnknownFactorError,
)
from .gf import Mat, is_prime, make_field
from .grp import (
    DEFAULT_ORACLE_CAP,
    GroupInstance,
    composition_series,
    enumerate_group,
)
from .lietypes import AmbientSpec, LieTypeTag, rank_profile, tables_dump
from .selftest import SelftestConfig, run_selftest


def canonical_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


@dataclass
class InstanceFile:
    raw: dict
    digest: str
    rational: bool
    prime: int
    ext_degree: int
    dim: int
    group: Optional[GroupInstance]
    rational_gens: Optional[list[RationalMat]]
    ambient: Optional[AmbientSpec]


def _expect(cond: bool, pointer: str, message: str) -> None:
    if not cond:
        raise SchemaError(pointer, message)


def _parse_ambient(obj, prime: int, default_f: int, pointer: str) -> AmbientSpec:
    _expect(isinstance(obj, dict), pointer, "ambient must be an object")
    factors = obj.get("factors")
    _expect(isinstance(factors, list) and factors, pointer + "/factors",
            "nonempty list of [family, rank] pairs required")
    tags = []
    for i, fac in enumerate(factors):
        _expect(
            isinstance(fac, list) and len(fac) == 2 and isinstance(fac[0], str)
            and isinstance(fac[1], int),
            f"{pointer}/factors/{i}", "expected [family, rank]",
        )
        try:
            tags.append(LieTypeTag(fac[0], fac[1]))
        except ValueError as exc:
            raise SchemaError(f"{pointer}/factors/{i}", str(exc))
    sc = obj.get("simply_connected", True)
    _expect(isinstance(sc, bool), pointer + "/simply_connected", "expected a boolean")
    extra = obj.get("extra_dim", 0)
    _expect(isinstance(extra, int) and extra >= 0, pointer + "/extra_dim",
            "expected a nonnegative integer")
    f = obj.get("ext_degree", default_f)
    _expect(isinstance(f, int) and f >= 1, pointer + "/ext_degree", "expected an integer >= 1")
    return AmbientSpec(tuple(tags), sc, make_field(prime, f), extra)


def _parse_fraction(e, pointer: str) -> Fraction:
    if isinstance(e, int):
        return Fraction(e)
    if isinstance(e, str):
        try:
            return Fraction(e)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(pointer, f"not a rational: {e!r}")
    raise SchemaError(pointer, "rational entries must be integers or 'a/b' strings")


def parse_instance(path: str, warn=lambda msg: print(msg, file=sys.stderr)) -> InstanceFile:
    """Validated instance, or a SchemaError naming the first violation by
    JSON pointer."""
    with open(path, "rb") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("", f"not valid JSON: {exc}")
    _expect(isinstance(raw, dict), "", "instance must be a JSON object")
    digest = hashlib.sha256(canonical_bytes(raw)).hexdigest()

    prime = raw.get("prime")
    _expect(isinstance(prime, int) and is_prime(prime) and prime >= 5, "/prime",
            "a prime >= 5 is required")
    f = raw.get("ext_degree", 1)
    _expect(isinstance(f, int) and f >= 1, "/ext_degree", "expected an integer >= 1")
    n = raw.get("dim")
    _expect(isinstance(n, int) and n >= 1, "/dim", "expected an integer >= 1")
    gens_raw = raw.get("generators")
    _expect(isinstance(gens_raw, list) and gens_raw, "/generators",
            "nonempty list of matrices required")
    rational = bool(raw.get("rational", False))
    if rational:
        _expect(f == 1, "/ext_degree", "rational instances live over the prime field")

    ambient = None
    if raw.get("ambient") is not None:
        ambient = _parse_ambient(raw["ambient"], prime, f, "/ambient")

    if rational:
        mats = []
        for i, rows in enumerate(gens_raw):
            ptr = f"/generators/{i}"
            _expect(isinstance(rows, list) and len(rows) == n, ptr, f"expected {n} rows")
            out = []
            for ri, row in enumerate(rows):
                _expect(isinstance(row, list) and len(row) == n, f"{ptr}/{ri}",
                        f"expected {n} entries")
                out.append([_parse_fraction(e, f"{ptr}/{ri}/{ci}") for ci, e in enumerate(row)])
            mats.append(RationalMat(out))
        return InstanceFile(raw, digest, True, prime, 1, n, None, mats, ambient)

    field = make_field(prime, f)
    mats = []
    for i, rows in enumerate(gens_raw):
        ptr = f"/generators/{i}"
        _expect(isinstance(rows, list) and len(rows) == n, ptr,
                f"generator is not a {n}x{n} matrix")
        enc_rows = []
        for ri, row in enumerate(rows):
            _expect(isinstance(row, list) and len(row) == n, ptr,
                    f"generator is not a {n}x{n} matrix")
            enc = []
            for ci, e in enumerate(row):
                eptr = f"{ptr}/{ri}/{ci}"
                if f == 1:
                    _expect(isinstance(e, int), eptr, "prime-field entries are integers")
                    if not 0 <= e < prime:
                        warn(f"warning: entry {e} at {eptr} reduced mod {prime}")
                    enc.append(e % prime)
                else:
                    _expect(
                        isinstance(e, list) and len(e) <= f
                        and all(isinstance(c, int) for c in e),
                        eptr, f"extension-field entries are coefficient lists of length <= {f}",
                    )
                    if any(not 0 <= c < prime for c in e):
                        warn(f"warning: coefficients at {eptr} reduced mod {prime}")
                    enc.append(field.encode([c % prime for c in e]))
            enc_rows.append(tuple(enc))
        mats.append(Mat(field, tuple(enc_rows)))
    try:
        group = GroupInstance(field, n, tuple(mats), ambient)
    except NoriRankError as exc:
        raise SchemaError("/generators", str(exc))
    return InstanceFile(raw, digest, False, prime, f, n, group, None, ambient)


def _emit(obj) -> None:
    sys.stdout.write(canonical_bytes(obj).decode() + "\n")


def _analyze_options(args) -> AnalyzeOptions:
    return AnalyzeOptions(
        oracle_cap=args.oracle_cap,
        seed=args.seed,
        threshold_mult=args.threshold_mult,
        force_pure=args.pure,
        with_timings=getattr(args, "timings", False),
    )


def _cmd_analyze(args) -> int:
    inst = parse_instance(args.instance)
    if inst.rational:
        raise SchemaError("/rational", "use the reduce subcommand for rational instances")
    report = analyze(inst.group, _analyze_options(args))
    report.input_digest = inst.digest
    _emit(report.to_json())
    verdicts = [c["verdict"] for c in report.certificates]
    if "refuted" in verdicts:
        return 2
    if verdicts and report.flags.get("heuristic_regime"):
        return 6
    return 0


def _cmd_oracle(args) -> int:
    inst = parse_instance(args.instance)
    if inst.rational:
        raise SchemaError("/rational", "use the reduce subcommand for rational instances")
    e = enumerate_group(inst.group, cap=args.oracle_cap, force_pure=args.pure)
    factors = composition_series(e, inst.prime, cap=args.oracle_cap)
    profile = rank_profile(factors, inst.prime)
    _emit({
        "order": e.order,
        "factors": sorted(str(f) for f in factors),
        "profile": profile.to_json(),
        "input_digest": inst.digest,
    })
    return 0


_CRITERIA = {
    "rank": "rank_bound",
    "typea": "fullness_type_a",
    "pertype": "fullness_per_type",
    "dim": "dim_criterion",
}


def _cmd_certify(args) -> int:
    inst = parse_instance(args.instance)
    if inst.rational:
        raise SchemaError("/rational", "use the reduce subcommand for rational instances")
    report = analyze(inst.group, _analyze_options(args))
    report.input_digest = inst.digest
    wanted = _CRITERIA[args.criterion]
    cert = next((c for c in report.certificates if c["criterion"] == wanted), None)
    if cert is None:
        raise SchemaError("/ambient", "certificates need a declared ambient")
    _emit({"certificate": cert, "flags": report.flags, "input_digest": inst.digest})
    if cert["verdict"] == "refuted":
        return 2
    if report.flags.get("heuristic_regime"):
        return 6
    return 0


def _cmd_reduce(args) -> int:
    inst = parse_instance(args.instance)
    if not inst.rational:
        raise SchemaError("/rational", "reduce expects a rational instance")
    ell = args.ell or inst.prime
    basis, conj = stabilize_lattice(inst.rational_gens, ell, max_iter=args.max_iter)
    reduced = reduce_mod_ell(conj, ell, inst.ambient)
    out = {
        "prime": ell,
        "ext_degree": 1,
        "dim": inst.dim,
        "generators": [[list(r) for r in m.rows] for m in reduced.generators],
        "basis_change": [[str(e) for e in r] for r in basis.rows],
        "input_digest": inst.digest,
    }
    if inst.raw.get("ambient") is not None:
        out["ambient"] = inst.raw["ambient"]
    _emit(out)
    return 0


def _cmd_tables(args) -> int:
    data = tables_dump()
    if args.format == "json":
        _emit(data)
        return 0
    print(f"{'type':<6}{'dim':>6}{'rank':>6}")
    for tag, row in data["types"].items():
        print(f"{tag:<6}{row['dim']:>6}{row['rank']:>6}")
    print()
    families = sorted(next(iter(data["orders"].values())))
    print(f"{'q':<6}" + "".join(f"{fam:>16}" for fam in families))
    for q, row in data["orders"].items():
        print(f"{q:<6}" + "".join(f"{row[fam]:>16}" for fam in families))
    return 0


def _cmd_selftest(args) -> int:
    config = SelftestConfig(
        oracle_cap=args.oracle_cap,
        seed=args.seed,
        quick=args.quick,
        force_pure=args.pure,
    )
    return run_selftest(config, inject_fault=args.inject_fault)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="norirank",
        description="Rank/dimension invariants of matrix groups over finite "
                    "fields, with fullness certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, timings=False):
        p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP,
                       help="element cap for enumeration and the factor oracle")
        p.add_argument("--seed", type=int, default=1729,
                       help="seed for sampled sweeps and harvests")
        p.add_argument("--threshold-mult", type=int, default=1,
                       help="multiplier on the characteristic threshold")
        p.add_argument("--pure", action="store_true",
                       help="force the pure-Python engine")
        if timings:
            p.add_argument("--timings", action="store_true",
                           help="include timings in the report (breaks byte determinism)")

    p = sub.add_parser("analyze", help="run both routes and all certificates")
    p.add_argument("instance")
    common(p, timings=True)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("oracle", help="factor route only: enumerate and classify")
    p.add_argument("instance")
    common(p)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("certify", help="evaluate one criterion against the ambient")
    p.add_argument("instance")
    p.add_argument("--criterion", choices=sorted(_CRITERIA), required=True)
    common(p)
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("reduce", help="stabilize a lattice and reduce mod ell")
    p.add_argument("instance")
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--max-iter", type=int, default=16)
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("tables", help="dump dim/rank/order tables")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(fn=_cmd_tables)

    p = sub.add_parser("selftest", help="run the acceptance corpus")
    p.add_argument("--quick", action="store_true",
                   help="smaller stand-ins for the multi-million-element runs")
    p.add_argument("--inject-fault", choices=["order-formula", "dim-table"],
                   help="testing hook: break a formula and expect failures")
    common(p)
    p.set_defaults(fn=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"schema error {exc}", file=sys.stderr)
        return 1
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except NonCompactError as exc:
        print(f"non-compact: {exc}", file=sys.stderr)
        return 4
    except UnknownFactorError as exc:
        print(f"unknown factor: {exc}", file=sys.stderr)
        return 5
    except NoriRankError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
