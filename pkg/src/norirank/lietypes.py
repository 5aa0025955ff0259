"""Lie-type tables: dimensions, ranks, Chevalley group orders, and the
simple-factor catalogue that turns composition factors into rank data.

Identification of simple groups purely by order is unsound in general
(famously |A_8| = |PSL_3(4)| = 20160), but inside the supported regime --
characteristic >= 5, bounded field size, and the four catalogue families --
the char-ell slice is collision-free, which `catalogue_collision_scan`
verifies.  Cross-characteristic coincidences (A_5 = PSL_2(5), A_6 = PSL_2(9))
are isomorphisms, not ambiguities: the char-ell reading wins when ell divides
as a Lie order, and everything else contributes zero rank anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping, Optional

from .errors import UnknownFactorError, UnsupportedFamilyError
from .gf import Field, is_prime

_RANK_BOUNDS = {
    "A": (1, None),
    "B": (2, None),
    "C": (2, None),
    "D": (3, None),
    "E": (6, 8),
    "F": (4, 4),
    "G": (2, 2),
}


@dataclass(frozen=True, order=True)
class LieTypeTag:
    """A Lie type, e.g. A1, C2, E8."""

    family: str
    rank: int

    def __post_init__(self):
        if self.family not in _RANK_BOUNDS:
            raise ValueError(f"unknown family {self.family!r}")
        lo, hi = _RANK_BOUNDS[self.family]
        if self.rank < lo or (hi is not None and self.rank > hi):
            raise ValueError(f"rank {self.rank} invalid for family {self.family}")

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "LieTypeTag":
        return cls(text[0].upper(), int(text[1:]))


def type_rank(tag: LieTypeTag) -> int:
    return tag.rank


def type_dim(tag: LieTypeTag) -> int:
    """Dimension of a simple algebraic group of the given type."""
    n = tag.rank
    if tag.family == "A":
        return n * (n + 2)
    if tag.family in ("B", "C"):
        return n * (2 * n + 1)
    if tag.family == "D":
        return n * (2 * n - 1)
    return {("E", 6): 78, ("E", 7): 133, ("E", 8): 248, ("F", 4): 52, ("G", 2): 14}[
        (tag.family, n)
    ]


def chevalley_order(kind: str, m: int, q: int) -> int:
    """Order of the simply connected classical group over F_q.

    kind: "SL" (m >= 2), "Sp" (m even >= 4), "SU" (m >= 3).  Spin and
    orthogonal families are not supported in this catalogue version.
    """
    if kind == "SL":
        if m < 2:
            raise UnsupportedFamilyError("SL needs m >= 2")
        out = q ** (m * (m - 1) // 2)
        for i in range(2, m + 1):
            out *= q**i - 1
        return out
    if kind == "Sp":
        if m < 4 or m % 2:
            raise UnsupportedFamilyError("Sp needs even m >= 4")
        n = m // 2
        out = q ** (n * n)
        for i in range(1, n + 1):
            out *= q ** (2 * i) - 1
        return out
    if kind == "SU":
        if m < 2:
            raise UnsupportedFamilyError("SU needs m >= 2")
        out = q ** (m * (m - 1) // 2)
        for i in range(2, m + 1):
            out *= q**i - (-1) ** i
        return out
    raise UnsupportedFamilyError(f"no order formula for {kind!r}")


@dataclass(frozen=True)
class CompositionFactor:
    """A classified simple factor.  kind is one of cyclic / alternating /
    lie_char_ell / other_simple."""

    kind: str
    order: int
    prime: Optional[int] = None
    alt_degree: Optional[int] = None
    tag: Optional[LieTypeTag] = None
    f: Optional[int] = None

    def __str__(self) -> str:
        if self.kind == "cyclic":
            return f"C{self.prime}"
        if self.kind == "alternating":
            return f"Alt{self.alt_degree}"
        if self.kind == "lie_char_ell":
            return f"{self.tag}(f={self.f})"
        return f"Simple({self.order})"


def Cyclic(p: int) -> CompositionFactor:
    return CompositionFactor("cyclic", p, prime=p)


def Alternating(m: int) -> CompositionFactor:
    import math

    return CompositionFactor("alternating", math.factorial(m) // 2, alt_degree=m)


def LieCharEll(tag: LieTypeTag, f: int, order: int) -> CompositionFactor:
    return CompositionFactor("lie_char_ell", order, tag=tag, f=f)


def OtherSimple(order: int) -> CompositionFactor:
    return CompositionFactor("other_simple", order)


_ALT_ORDERS = {60: 5, 360: 6, 2520: 7, 20160: 8, 181440: 9}

# Catalogue field-size bound: q = ell^f ranges over prime powers up to this.
CATALOGUE_Q_MAX = 10**4


def _char_ell_entries(ell: int) -> list[tuple[int, LieTypeTag, int]]:
    """(order, tag, f) for the supported simple groups of characteristic ell."""
    entries = []
    f = 1
    q = ell
    while q <= CATALOGUE_Q_MAX:
        entries.append((chevalley_order("SL", 2, q) // 2, LieTypeTag("A", 1), f))
        entries.append(
            (chevalley_order("SL", 3, q) // _gcd(3, q - 1), LieTypeTag("A", 2), f)
        )
        entries.append(
            (chevalley_order("SU", 3, q) // _gcd(3, q + 1), LieTypeTag("A", 2), f)
        )
        entries.append((chevalley_order("Sp", 4, q) // 2, LieTypeTag("C", 2), f))
        f += 1
        q *= ell
    return entries


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def classify_factor(order: int, ell: int) -> CompositionFactor:
    """Match a simple-factor order against the catalogue.

    Char-ell Lie entries take precedence (so 60 at ell=5 is PSL_2(5), the
    defined reading of A_5); alternating groups and cyclic primes contribute
    zero rank downstream.  No match raises UnknownFactorError.
    """
    if order < 1:
        raise ValueError("order must be positive")
    if is_prime(order):
        return Cyclic(order)
    for o, tag, f in _char_ell_entries(ell):
        if o == order:
            return LieCharEll(tag, f, order)
    if order in _ALT_ORDERS:
        return Alternating(_ALT_ORDERS[order])
    raise UnknownFactorError(order)


def catalogue_collision_scan(ell_max: int = 101) -> int:
    """Assert order-uniqueness of each char-ell catalogue slice; returns the
    number of entries checked.  Cross-checks the alternating orders too: the
    only overlap in range is 60 = |PSL_2(5)| = |A_5| at ell = 5, which is an
    isomorphism rather than an ambiguity.
    """
    checked = 0
    for ell in range(5, ell_max + 1):
        if not is_prime(ell):
            continue
        seen: dict[int, tuple] = {}
        for o, tag, f in _char_ell_entries(ell):
            if o in seen and seen[o] != (tag, f):
                raise AssertionError(
                    f"catalogue collision at ell={ell}: order {o} is both "
                    f"{seen[o]} and {(tag, f)}"
                )
            seen[o] = (tag, f)
            checked += 1
        for o in _ALT_ORDERS:
            if o in seen and not (o == 60 and ell == 5):
                raise AssertionError(
                    f"alternating order {o} collides with char-{ell} entry {seen[o]}"
                )
    return checked


@dataclass(frozen=True)
class RankProfile:
    """The triple (dim_ell, rk_ell, per-type ranks) of a finite group.

    per_type may be None for envelope-derived profiles, where the total rank
    is known but type attribution is unavailable; when present, the per-type
    ranks must sum to the total.
    """

    dim_ell: int
    rk_ell: int
    per_type: Optional[Mapping[LieTypeTag, int]]

    def __post_init__(self):
        if self.per_type is not None and self.rk_ell != sum(self.per_type.values()):
            raise ValueError("rk_ell must equal the sum of per-type ranks")

    def to_json(self) -> dict:
        return {
            "dim_ell": self.dim_ell,
            "rk_ell": self.rk_ell,
            "per_type": (
                {str(t): r for t, r in sorted(self.per_type.items())}
                if self.per_type is not None
                else None
            ),
        }

    def __add__(self, other: "RankProfile") -> "RankProfile":
        if self.per_type is None or other.per_type is None:
            raise ValueError("cannot add profiles without per-type data")
        per = dict(self.per_type)
        for t, r in other.per_type.items():
            per[t] = per.get(t, 0) + r
        return RankProfile(self.dim_ell + other.dim_ell, self.rk_ell + other.rk_ell, per)


ZERO_PROFILE = RankProfile(0, 0, {})


def rank_profile(factors: Iterable[CompositionFactor], ell: int) -> RankProfile:
    """Aggregate classified factors: dim_ell = sum f*dim(type), per-type rank
    f*rank(type); factors that are not Lie type in characteristic ell
    contribute zero everywhere.
    """
    dim_ell = 0
    per: dict[LieTypeTag, int] = {}
    for fac in factors:
        if fac.kind != "lie_char_ell":
            continue
        dim_ell += fac.f * type_dim(fac.tag)
        per[fac.tag] = per.get(fac.tag, 0) + fac.f * type_rank(fac.tag)
    return RankProfile(dim_ell, sum(per.values()), per)


@dataclass(frozen=True)
class AmbientSpec:
    """Declared Zariski-closure data for a group instance.

    factors lists the simple types of the semisimple part; extra_dim is the
    dimension of the declared radical (tori/unipotent parts), so extra_dim = 0
    means the ambient is declared semisimple.
    """

    factors: tuple[LieTypeTag, ...]
    simply_connected: bool
    field: Field
    extra_dim: int = 0

    def __post_init__(self):
        if not self.factors:
            raise ValueError("ambient needs at least one simple factor")
        if self.extra_dim < 0:
            raise ValueError("extra_dim must be >= 0")

    @property
    def rank(self) -> int:
        return sum(t.rank for t in self.factors)

    @property
    def dim(self) -> int:
        return sum(type_dim(t) for t in self.factors) + self.extra_dim

    @property
    def is_type_a(self) -> bool:
        return all(t.family == "A" for t in self.factors)

    @property
    def semisimple(self) -> bool:
        return self.extra_dim == 0

    def expected_per_type(self) -> dict[LieTypeTag, int]:
        """Per-type rank of the full point group over the declared field."""
        out: dict[LieTypeTag, int] = {}
        for t in self.factors:
            out[t] = out.get(t, 0) + self.field.f * t.rank
        return out

    def to_json(self) -> dict:
        return {
            "factors": [[t.family, t.rank] for t in self.factors],
            "simply_connected": self.simply_connected,
            "extra_dim": self.extra_dim,
        }


def tables_dump() -> dict:
    """dim/rank/order tables for the CLI `tables` subcommand."""
    tags = [LieTypeTag("A", n) for n in range(1, 9)]
    tags += [LieTypeTag("B", n) for n in range(2, 9)]
    tags += [LieTypeTag("C", n) for n in range(2, 9)]
    tags += [LieTypeTag("D", n) for n in range(3, 9)]
    tags += [LieTypeTag("G", 2), LieTypeTag("F", 4)]
    tags += [LieTypeTag("E", n) for n in (6, 7, 8)]
    orders = {}
    for q in (5, 7, 9, 11, 13, 25, 49):
        orders[str(q)] = {
            "SL2": chevalley_order("SL", 2, q),
            "SL3": chevalley_order("SL", 3, q),
            "SL4": chevalley_order("SL", 4, q),
            "Sp4": chevalley_order("Sp", 4, q),
            "SU3": chevalley_order("SU", 3, q),
        }
    return {
        "types": {str(t): {"dim": type_dim(t), "rank": t.rank} for t in tags},
        "orders": orders,
    }
