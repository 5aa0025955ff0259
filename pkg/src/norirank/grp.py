"""Generator-presented matrix groups: enumeration, order, the subgroup
generated by order-ell elements, and a composition-series oracle.

The oracle works at "desk scale" (default cap 2e6 elements) and never
guesses: abelian layers are peeled off through derived subgroups (their
factors are the prime multiset of the quotient order, which is rigorous), and
for perfect groups a maximal normal subgroup is found from normal closures of
conjugacy-class representatives, join-refined to a fixpoint.  At the fixpoint
the subgroup is provably maximal normal, so the quotient is simple and can be
classified by its order.  A seeded class-product sampler proves most closures
improper cheaply (all its membership deductions are exact); "proper" is only
ever concluded from an exact closure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Optional, Sequence

from . import engine as _eng
from .engine import Store, closure, normal_closure
from .errors import CapExceededError, DomainTooLargeError, SingularError
from .gf import Field, Mat, is_prime
from .lietypes import AmbientSpec, CompositionFactor, classify_factor

DEFAULT_ORACLE_CAP = 2_000_000
DEFAULT_DOMAIN_CAP = 2_000_000


@dataclass(frozen=True)
class GroupInstance:
    """A matrix group given by generators, with an optional declared ambient."""

    field: Field
    n: int
    generators: tuple[Mat, ...]
    ambient: Optional[AmbientSpec] = None
    name: Optional[str] = None

    def __post_init__(self):
        if not self.generators:
            raise ValueError("instance needs at least one generator")
        for i, m in enumerate(self.generators):
            if m.n != self.n or m.field != self.field:
                raise ValueError(f"generator {i} has mismatched shape or field")
            if m.det() == 0:
                raise SingularError(f"generator {i} is singular")

    def conjugated(self, c: Mat) -> "GroupInstance":
        ci = c.inv()
        return GroupInstance(
            self.field, self.n, tuple(ci * g * c for g in self.generators),
            self.ambient, self.name,
        )


class EnumeratedGroup:
    """Fully enumerated closure of a GroupInstance (immutable)."""

    def __init__(self, field: Field, n: int, eng, store: Store):
        self.field = field
        self.n = n
        self.engine = eng
        self.store = store

    @property
    def order(self) -> int:
        return len(self.store)

    def __len__(self) -> int:
        return len(self.store)

    def __contains__(self, m: Mat) -> bool:
        return self.engine.key(m) in self.store

    def matrices(self) -> Iterator[Mat]:
        for k in self.store.keys:
            yield self.engine.mat(k)

    def generator_mats(self) -> list[Mat]:
        return [self.engine.mat(k) for k in self.store.gens]


def enumerate_group(
    g: GroupInstance, cap: int = DEFAULT_ORACLE_CAP, force_pure: bool = False
) -> EnumeratedGroup:
    """Breadth-first closure of the generators; CapExceeded past cap."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    eng = _eng.engine_for(g.field, g.n, force_pure=force_pure)
    st = closure(eng, [eng.key(m) for m in g.generators], cap)
    if st is None:
        raise CapExceededError(f"enumeration exceeded cap {cap}")
    return EnumeratedGroup(g.field, g.n, eng, st)


# --- stabilizer chain -----------------------------------------------------

def group_order(g: GroupInstance, domain_cap: int = DEFAULT_DOMAIN_CAP) -> int:
    """Order via a deterministic stabilizer chain for the action on nonzero
    vectors of (F_q)^n.  Fast far beyond the enumeration cap; must agree with
    enumerate_group whenever both run.

    The base consists of standard basis vectors (a matrix fixing all of them
    is the identity, so the chain terminates).  Schreier generators of level
    i are products of level-i generators, so a non-trivial sifted residue
    joins the generator lists of levels i+1..j only (j = where sifting
    stopped); processing always completes the deepest dirty level first, so
    sifting runs against complete lower chains.  Transversals and orbits only
    grow, which keeps previously processed Schreier pairs valid.
    """
    field, n = g.field, g.n
    if field.q**n - 1 > domain_cap:
        raise DomainTooLargeError(
            f"action domain {field.q**n - 1} exceeds bound {domain_cap}"
        )
    ident = Mat.identity(field, n)
    basis = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    levels: list[dict] = []

    def new_level(mover: Mat) -> None:
        base = next(b for b in basis if mover.apply(b) != b)
        levels.append(
            {"base": base, "gens": [], "genset": set(), "orbit": {base: ident}, "pending": []}
        )

    def add_gen(idx: int, h: Mat) -> None:
        lv = levels[idx]
        if h in lv["genset"]:
            return
        lv["genset"].add(h)
        lv["gens"].append(h)
        gi = len(lv["gens"]) - 1
        lv["pending"].extend((p, gi) for p in list(lv["orbit"]))

    start_gens = [m for m in g.generators if not m.is_identity()]
    if not start_gens:
        return 1
    new_level(start_gens[0])
    for m in start_gens:
        add_gen(0, m)

    i = 0
    while i >= 0:
        lv = levels[i]
        if not lv["pending"]:
            i -= 1
            continue
        p, gi = lv["pending"].pop()
        gmat = lv["gens"][gi]
        t = lv["orbit"][p]
        img = gmat.apply(p)
        tt = lv["orbit"].get(img)
        if tt is None:
            lv["orbit"][img] = gmat * t
            lv["pending"].extend((img, k) for k in range(len(lv["gens"])))
            continue
        s = tt.inv() * (gmat * t)
        if s.is_identity():
            continue
        h, j = s, i + 1
        while j < len(levels):
            deeper = levels[j]
            pp = h.apply(deeper["base"])
            trans = deeper["orbit"].get(pp)
            if trans is None:
                break
            h = trans.inv() * h
            j += 1
        if h.is_identity():
            continue
        if j == len(levels):
            new_level(h)
        for k in range(i + 1, j + 1):
            add_gen(k, h)
        i = j

    order = 1
    for lv in levels:
        order *= len(lv["orbit"])
    return order


# --- order-ell subgroup ------------------------------------------------------

def plus_subgroup(e: EnumeratedGroup, ell: int) -> EnumeratedGroup:
    """Subgroup generated by all elements of exact order ell (normal, since
    the generating set is conjugation-invariant)."""
    eng = e.engine
    harvest = eng.order_ell_elements(e.store.keys, ell)
    st = eng.state([])
    st.run(e.order)
    for k in harvest:
        if not st.contains(k):
            st.add_gens([k])
            st.run(e.order)
    return EnumeratedGroup(e.field, e.n, eng, eng.store_from_state(st))


def order_ell_count(e: EnumeratedGroup, ell: int) -> int:
    return len(e.engine.order_ell_elements(e.store.keys, ell))


# --- composition series ----------------------------------------------------------

def _prime_multiset(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        while m % d == 0:
            out.append(d)
            m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _trivial_store(eng) -> Store:
    st = eng.state([])
    st.run(1)
    return eng.store_from_state(st)


def _derived_subgroup(eng, store: Store) -> Store:
    """Normal closure of the generators' commutators; never exceeds |G|."""
    gens = list(store.gens)
    seeds = []
    invs = [eng.inv_key(a) for a in gens]
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            c = eng.mul(eng.mul(invs[i], invs[j]), eng.mul(gens[i], gens[j]))
            if c != eng.identity_key:
                seeds.append(c)
    if not seeds:
        return _trivial_store(eng)
    out = normal_closure(eng, seeds, gens, cap=len(store))
    assert out is not None
    return out


def _improper_by_sampling(eng, cd, cid: int, half: int, rng: random.Random) -> bool:
    """Prove |normal closure of class cid| > half by covering classes with
    exact product memberships.  False means "not proven", never "proper"."""
    seen = {cid}
    covered = cd.sizes[cid]
    if covered > half:
        return True
    slist = [cid]
    for _ in range(16):
        grew = False
        for _ in range(64):
            c1 = rng.choice(slist)
            c2 = rng.choice(slist)
            x = cd.member(c1, rng.randrange(cd.sizes[c1]))
            y = cd.member(c2, rng.randrange(cd.sizes[c2]))
            c3 = cd.class_of(eng.mul(x, y))
            if c3 not in seen:
                seen.add(c3)
                slist.append(c3)
                covered += cd.sizes[c3]
                grew = True
                if covered > half:
                    return True
        if not grew:
            return False
    return False


def _max_normal(eng, store: Store) -> Optional[Store]:
    """A maximal proper normal subgroup of a perfect group, or None if simple.

    Candidates are exact normal closures of class representatives (abandoned
    once past |G|/2, the proper-subgroup bound); the best candidate is join-
    refined to a fixpoint.  At the fixpoint, any strictly larger proper normal
    subgroup would contain a class whose closure joins properly, so none
    exists and the result is maximal.
    """
    order = len(store)
    half = order // 2
    gens = list(store.gens)
    cd = eng.classes(store.keys, gens)
    rng = random.Random(0x5EED ^ order)
    ident = eng.identity_key
    by_size = sorted(range(len(cd.reps)), key=lambda c: (cd.sizes[c], c))
    ruled_out: set[int] = set()
    best: Optional[Store] = None
    while True:
        improved = False
        for cid in by_size:
            rep = cd.reps[cid]
            if rep == ident or cid in ruled_out:
                continue
            if best is not None and rep in best:
                continue
            if cd.sizes[cid] > half or _improper_by_sampling(eng, cd, cid, half, rng):
                ruled_out.add(cid)
                continue
            cand = normal_closure(eng, [rep], gens, cap=half)
            if cand is None:
                ruled_out.add(cid)
                continue
            if best is None:
                best = cand
                improved = True
                continue
            joined = closure(eng, list(best.gens) + list(cand.gens), cap=half)
            if joined is None:
                # join is the whole group; stays full as best grows, so cache
                ruled_out.add(cid)
                continue
            best = joined  # rep not in best, so the join grew strictly
            improved = True
        if not improved:
            return best


def composition_series(
    e: EnumeratedGroup, ell: int, cap: int = DEFAULT_ORACLE_CAP
) -> list[CompositionFactor]:
    """Multiset of composition factors, classified by order against the
    catalogue.  Invariant under refinement order (returned sorted by order).
    """
    if e.order > cap:
        raise CapExceededError(
            f"group of order {e.order} beyond composition oracle cap {cap}"
        )
    eng = e.engine
    cur = e.store
    orders: list[int] = []
    while True:
        order = len(cur)
        if order == 1:
            break
        if is_prime(order):
            orders.append(order)
            break
        derived = _derived_subgroup(eng, cur)
        if len(derived) < order:
            orders.extend(_prime_multiset(order // len(derived)))
            cur = derived
            continue
        top = _max_normal(eng, cur)
        if top is None:
            orders.append(order)
            break
        orders.append(order // len(top))
        cur = top
    return [classify_factor(o, ell) for o in sorted(orders)]
