"""Executable fullness/maximality criteria, the ell-adic lattice front door,
and the two-route analysis orchestrator.

Ambient groups are user declarations, never computed: the certifier checks a
declaration against computed rank data and refutes inconsistent ones.  A
"certified" verdict is issued only when every hypothesis of the relevant
criterion has been established by computation; verdicts computed below the
characteristic threshold still compute but carry heuristic_regime = true.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__ as _version
from .errors import (
    CrossCheckError,
    DomainTooLargeError,
    MissingAmbientError,
    NonCompactError,
    NotIntegralError,
    SingularReductionError,
)
from .gf import Field, Mat, make_field
from .grp import (
    DEFAULT_DOMAIN_CAP,
    DEFAULT_ORACLE_CAP,
    EnumeratedGroup,
    GroupInstance,
    composition_series,
    enumerate_group,
    group_order,
)
from .liealg import (
    DEFAULT_SAMPLE_SEED,
    NoriEnvelope,
    ZERO_ENVELOPE,
    envelope_from_matrices,
    nori_envelope,
    regime_threshold,
)
from .lietypes import (
    AmbientSpec,
    RankProfile,
    chevalley_order,
    rank_profile,
)


# --- certificates ---------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    criterion: str
    verdict: str  # "certified" | "refuted" | "inconclusive"
    evidence: dict

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "verdict": self.verdict,
            "evidence": self.evidence,
        }


def ambient_invariants(a: AmbientSpec) -> tuple[int, int, bool]:
    """(rank, dim, is_type_A) of a declared ambient."""
    return a.rank, a.dim, a.is_type_a


def check_rank_bound(profile: RankProfile, a: AmbientSpec, f: Optional[int] = None) -> Certificate:
    """Total rank must satisfy rk_ell <= f * rk(ambient); a violation means
    the declaration is wrong or the characteristic is below threshold."""
    f = a.field.f if f is None else f
    bound = f * a.rank
    ev = {
        "rk_ell": profile.rk_ell,
        "f": f,
        "ambient_rank": a.rank,
        "bound": bound,
        "slack": bound - profile.rk_ell,
    }
    verdict = "certified" if profile.rk_ell <= bound else "refuted"
    return Certificate("rank_bound", verdict, ev)


def _ambient_group_order(a: AmbientSpec) -> Optional[int]:
    """Order of the simply connected point group of a type-A ambient."""
    if not a.is_type_a or not a.semisimple:
        return None
    order = 1
    for t in a.factors:
        order *= chevalley_order("SL", t.rank + 1, a.field.q)
    return order


def certify_fullness_type_a(
    g: GroupInstance,
    profile: RankProfile,
    *,
    domain_cap: int = DEFAULT_DOMAIN_CAP,
    cross_check: bool = True,
) -> Certificate:
    """Rank saturation certifies fullness for simply connected type-A
    ambients.  Within stabilizer-chain range the verdict is cross-validated
    against the Chevalley order formula; a mismatch is a hard failure."""
    a = g.ambient
    if a is None:
        raise MissingAmbientError("fullness certificate needs a declared ambient")
    f = a.field.f
    bound = f * a.rank
    ev: dict = {
        "rk_ell": profile.rk_ell,
        "f": f,
        "ambient_rank": a.rank,
        "simply_connected": a.simply_connected,
        "type_a": a.is_type_a,
        "semisimple": a.semisimple,
    }
    if profile.rk_ell > bound:
        return Certificate("fullness_type_a", "refuted", ev | {"reason": "rank exceeds bound"})
    if not (a.simply_connected and a.is_type_a and a.semisimple):
        return Certificate(
            "fullness_type_a", "inconclusive", ev | {"reason": "hypotheses on ambient not met"}
        )
    if profile.rk_ell < bound:
        return Certificate(
            "fullness_type_a", "inconclusive", ev | {"reason": "rank below bound"}
        )
    if cross_check:
        expected = _ambient_group_order(a)
        try:
            actual = group_order(g, domain_cap)
        except DomainTooLargeError:
            actual = None
            ev["order_cross_check"] = "skipped (domain too large)"
        if actual is not None:
            ev["order_cross_check"] = {"group_order": actual, "chevalley_order": expected}
            if actual != expected:
                raise CrossCheckError(
                    f"rank-certified instance has order {actual}, formula gives {expected}"
                )
    return Certificate("fullness_type_a", "certified", ev)


def certify_fullness_per_type(g: GroupInstance, profile: RankProfile) -> Certificate:
    """Per-type rank saturation certifies fullness for simply connected
    semisimple ambients of any type."""
    a = g.ambient
    if a is None:
        raise MissingAmbientError("fullness certificate needs a declared ambient")
    ev: dict = {
        "simply_connected": a.simply_connected,
        "semisimple": a.semisimple,
        "f": a.field.f,
    }
    if profile.per_type is None:
        return Certificate(
            "fullness_per_type", "inconclusive",
            ev | {"reason": "per-type data unavailable from envelope route"},
        )
    expected = a.expected_per_type()
    ev["per_type"] = {str(t): r for t, r in sorted(profile.per_type.items())}
    ev["expected_per_type"] = {str(t): r for t, r in sorted(expected.items())}
    if profile.rk_ell > a.field.f * a.rank:
        return Certificate("fullness_per_type", "refuted", ev | {"reason": "rank exceeds bound"})
    if not (a.simply_connected and a.semisimple):
        return Certificate(
            "fullness_per_type", "inconclusive", ev | {"reason": "hypotheses on ambient not met"}
        )
    if dict(profile.per_type) == expected:
        return Certificate("fullness_per_type", "certified", ev)
    return Certificate(
        "fullness_per_type", "inconclusive", ev | {"reason": "per-type ranks below expected"}
    )


def check_dim_criterion(profile: RankProfile, a: AmbientSpec, f: Optional[int] = None) -> Certificate:
    """dim_ell >= f*dim(ambient) forces the ambient semisimple with equality;
    certified on exact equality for a semisimple declaration, refuted when
    the inequality holds but semisimplicity or equality fails."""
    f = a.field.f if f is None else f
    bound = f * a.dim
    ev = {
        "dim_ell": profile.dim_ell,
        "f": f,
        "ambient_dim": a.dim,
        "bound": bound,
        "ambient_semisimple": a.semisimple,
    }
    if profile.dim_ell < bound:
        return Certificate(
            "dim_criterion", "inconclusive", ev | {"reason": "hypothesis dim_ell >= f*dim not met"}
        )
    if a.semisimple and profile.dim_ell == bound:
        return Certificate("dim_criterion", "certified", ev)
    return Certificate(
        "dim_criterion", "refuted",
        ev | {"reason": "declaration inconsistent: requires semisimple ambient and equality"},
    )


# --- exact rational matrices and the lattice front door ---------------------------

class RationalMat:
    """Immutable matrix with Fraction entries."""

    __slots__ = ("n", "rows")

    def __init__(self, rows: Sequence[Sequence]):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.n = n
        self.rows = tuple(tuple(Fraction(e) for e in r) for r in rows)

    @classmethod
    def identity(cls, n: int) -> "RationalMat":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __mul__(self, other: "RationalMat") -> "RationalMat":
        bt = tuple(zip(*other.rows))
        return RationalMat(
            tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in self.rows)
        )

    def inv(self) -> "RationalMat":
        n = self.n
        a = [list(r) for r in self.rows]
        inv = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular rational matrix")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                inv[col], inv[piv] = inv[piv], inv[col]
            d = a[col][col]
            a[col] = [x / d for x in a[col]]
            inv[col] = [x / d for x in inv[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    c = a[r][col]
                    a[r] = [x - c * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - c * y for x, y in zip(inv[r], inv[col])]
        return RationalMat(tuple(tuple(r) for r in inv))

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [tuple(col) for col in zip(*self.rows)]

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMat) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"RationalMat({[[str(e) for e in r] for r in self.rows]})"


def val_ell(x: Fraction, ell: int) -> int:
    """ell-adic valuation; valuation of 0 is a large sentinel."""
    if x == 0:
        return 10**9
    v = 0
    num, den = x.numerator, x.denominator
    while num % ell == 0:
        num //= ell
        v += 1
    while den % ell == 0:
        den //= ell
        v -= 1
    return v


def _mat_min_val(m: RationalMat, ell: int) -> int:
    return min(val_ell(e, ell) for r in m.rows for e in r)


def _local_basis(cols: list[tuple[Fraction, ...]], n: int, ell: int) -> RationalMat:
    """Triangular Z_(ell)-basis of the lattice the columns span.

    DVR column elimination: in each row, the entry of minimal ell-valuation
    divides the others, so it clears the row; units at other primes are
    irrelevant for the local lattice.
    """
    work = [list(c) for c in cols]
    basis: list[list[Fraction]] = []
    for row in range(n):
        piv_idx = None
        piv_val = None
        for i, c in enumerate(work):
            if c[row] == 0:
                continue
            v = val_ell(c[row], ell)
            if piv_val is None or v < piv_val:
                piv_val, piv_idx = v, i
        if piv_idx is None:
            raise ValueError("columns do not span a full-rank lattice")
        piv = work.pop(piv_idx)
        unit = piv[row] / Fraction(ell) ** piv_val
        piv = [e / unit for e in piv]  # pivot entry becomes ell^v
        for c in work:
            if c[row] != 0:
                ratio = c[row] / piv[row]
                for r in range(n):
                    c[r] -= ratio * piv[r]
        basis.append(piv)
    # Reduce earlier columns against later pivots for a canonical triangle.
    for j in range(n - 1, -1, -1):
        for i in range(j):
            if basis[i][j] != 0:
                ratio = basis[i][j] / basis[j][j]
                basis[i] = [a - ratio * b for a, b in zip(basis[i], basis[j])]
    return RationalMat(tuple(zip(*basis)))


def stabilize_lattice(
    gens: Sequence[RationalMat], ell: int, max_iter: int = 16
) -> tuple[RationalMat, list[RationalMat]]:
    """Basis matrix B with every B^-1 g B ell-integral, plus the conjugated
    generators; found by iterating L <- L + sum_g g L from the standard
    lattice.  Raises NonCompact when the iteration diverges past max_iter or
    the valuation spread exceeds n * max_iter.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n = gens[0].n
    basis = RationalMat.identity(n)
    for _ in range(max_iter):
        binv = basis.inv()
        conj = [binv * g * basis for g in gens]
        if all(_mat_min_val(c, ell) >= 0 for c in conj):
            # Normalize the overall scale so min valuation in B is 0.
            s = _mat_min_val(basis, ell)
            if s != 0:
                scale = Fraction(ell) ** (-s)
                basis = RationalMat(tuple(tuple(e * scale for e in r) for r in basis.rows))
                binv = basis.inv()
                conj = [binv * g * basis for g in gens]
            return basis, conj
        cols = basis.columns()
        for g in gens:
            cols.extend((g * basis).columns())
        basis = _local_basis(cols, n, ell)
        if _mat_min_val(basis, ell) < -(n * max_iter):
            raise NonCompactError("valuation spread diverges; no stabilized lattice")
    raise NonCompactError(f"no stabilized lattice after {max_iter} iterations")


def reduce_mod_ell(
    gens: Sequence[RationalMat],
    ell: int,
    ambient: Optional[AmbientSpec] = None,
    name: Optional[str] = None,
) -> GroupInstance:
    """Entrywise reduction a/b -> a * b^-1 mod ell of ell-integral matrices."""
    field = make_field(ell, 1)
    mats = []
    for i, g in enumerate(gens):
        rows = []
        for r in g.rows:
            out = []
            for e in r:
                if val_ell(e, ell) < 0:
                    raise NotIntegralError(f"generator {i} entry {e} has negative valuation")
                out.append(e.numerator * pow(e.denominator, ell - 2, ell) % ell)
            rows.append(tuple(out))
        m = Mat(field, tuple(rows))
        if m.det() == 0:
            raise SingularReductionError(f"generator {i} is singular mod {ell}")
        mats.append(m)
    return GroupInstance(field, gens[0].n, tuple(mats), ambient, name)


# --- analysis orchestration ----------------------------------------------------------

@dataclass
class AnalyzeOptions:
    oracle_cap: int = DEFAULT_ORACLE_CAP
    domain_cap: int = DEFAULT_DOMAIN_CAP
    seed: int = DEFAULT_SAMPLE_SEED
    threshold_mult: int = 1
    sample_words: int = 400
    force_pure: bool = False
    with_timings: bool = False


@dataclass
class Report:
    profile: dict
    envelope: dict
    certificates: list[dict]
    flags: dict
    version: str = _version
    input_digest: Optional[str] = None
    timings: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "profile": self.profile,
            "envelope": self.envelope,
            "certificates": self.certificates,
            "flags": self.flags,
            "version": self.version,
            "input_digest": self.input_digest,
            "timings": self.timings,
        }


def sample_order_ell_elements(
    g: GroupInstance, *, words: int = 400, max_len: int = 24, seed: int = DEFAULT_SAMPLE_SEED
) -> list[Mat]:
    """Deterministic random-word harvest of order-ell elements, for groups
    past the enumeration cap.  Sound but incomplete: the resulting envelope
    can only shrink.  Found elements are enriched with word-conjugates, which
    preserve the order."""
    ell = g.field.ell
    rng = random.Random(seed)
    gens = list(g.generators) + [m.inv() for m in g.generators]
    ident = Mat.identity(g.field, g.n)
    found: list[Mat] = []
    seen = set()

    def random_word() -> Mat:
        w = rng.choice(gens)
        for _ in range(rng.randrange(1, max_len)):
            w = w * rng.choice(gens)
        return w

    for _ in range(words):
        x = random_word()
        if x != ident and (x**ell) == ident and x not in seen:
            seen.add(x)
            found.append(x)
    for u in list(found):
        for _ in range(8):
            w = random_word()
            c = w.inv() * u * w
            if c not in seen:
                seen.add(c)
                found.append(c)
    return found


def _profile_from_envelope(
    env: NoriEnvelope, ambient: Optional[AmbientSpec]
) -> Optional[RankProfile]:
    """Envelope-derived profile.  Types cannot be read off a bare Lie algebra,
    so per-type data is attributed from the declared ambient only when the
    total rank matches it exactly; a rank-0 envelope is the zero profile."""
    if env.rank == 0 and env.dim_ss == 0:
        return RankProfile(0, 0, {})
    if ambient is not None and env.rank == ambient.field.f * ambient.rank:
        return RankProfile(env.dim_ss, env.rank, ambient.expected_per_type())
    return RankProfile(env.dim_ss, env.rank, None)


def analyze(g: GroupInstance, options: Optional[AnalyzeOptions] = None) -> Report:
    """Run Route A (composition factors, within oracle cap) and Route B (the
    envelope), record agreement or divergence, and evaluate all four
    certificates against the declared ambient if present."""
    import time as _time

    opt = options or AnalyzeOptions()
    ell = g.field.ell
    flags: dict = {}
    timings: dict = {}

    t0 = _time.perf_counter()
    try:
        order = group_order(g, opt.domain_cap)
        flags["group_order"] = order
    except DomainTooLargeError:
        order = None
        flags["group_order"] = None
    timings["group_order_s"] = round(_time.perf_counter() - t0, 6)

    profile_a: Optional[RankProfile] = None
    factors = None
    envelope: NoriEnvelope
    t0 = _time.perf_counter()
    if order is not None and order <= opt.oracle_cap:
        e = enumerate_group(g, cap=opt.oracle_cap, force_pure=opt.force_pure)
        if e.order != order:
            raise CrossCheckError(
                f"enumeration order {e.order} != stabilizer-chain order {order}"
            )
        factors = composition_series(e, ell, cap=opt.oracle_cap)
        profile_a = rank_profile(factors, ell)
        flags["route_a"] = "ok"
        envelope = nori_envelope(e, seed=opt.seed, threshold_mult=opt.threshold_mult)
        flags["route_b"] = "exhaustive"
    else:
        flags["route_a"] = "cap_exceeded"
        harvest = sample_order_ell_elements(
            g, words=opt.sample_words, seed=opt.seed
        )
        envelope = envelope_from_matrices(
            harvest, seed=opt.seed, threshold_mult=opt.threshold_mult
        )
        flags["route_b"] = "sampled"
    timings["routes_s"] = round(_time.perf_counter() - t0, 6)

    if profile_a is not None:
        agree = (
            envelope.dim_ss == profile_a.dim_ell and envelope.rank == profile_a.rk_ell
        )
        flags["routes_agree"] = agree
        profile = profile_a
    else:
        flags["routes_agree"] = None
        profile = _profile_from_envelope(envelope, g.ambient)

    heuristic = envelope.heuristic_regime or flags.get("routes_agree") is False
    flags["heuristic_regime"] = heuristic

    certificates: list[Certificate] = []
    if g.ambient is not None and profile is not None:
        certificates.append(check_rank_bound(profile, g.ambient))
        certificates.append(
            certify_fullness_type_a(g, profile, domain_cap=opt.domain_cap)
        )
        certificates.append(certify_fullness_per_type(g, profile))
        certificates.append(check_dim_criterion(profile, g.ambient))

    profile_json: dict = {
        "dim_ell": profile.dim_ell if profile else None,
        "rk_ell": profile.rk_ell if profile else None,
        "per_type": (
            {str(t): r for t, r in sorted(profile.per_type.items())}
            if profile is not None and profile.per_type is not None
            else None
        ),
        "source": "composition" if profile_a is not None else "envelope",
    }
    if factors is not None:
        profile_json["factors"] = sorted(str(f) for f in factors)

    return Report(
        profile=profile_json,
        envelope=envelope.to_json(),
        certificates=[c.to_json() for c in certificates],
        flags=flags,
        timings=timings if opt.with_timings else None,
    )
