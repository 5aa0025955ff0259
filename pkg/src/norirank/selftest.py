"""The built-in acceptance corpus: ten criteria, each printed as one
PASS/FAIL line by the CLI `selftest` subcommand and asserted individually by
tests/test_acceptance.py.

Detail strings are deterministic (no timings), so two selftest runs over the
same corpus produce identical bytes.  Time budgets are enforced as pass/fail
conditions but never printed.  --quick swaps the two multi-million-element
runs for their smaller stand-ins (recorded in the detail line) and performs
the determinism/mutation checks in-process instead of via subprocesses.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

from . import corpus, lietypes
from .certify import (
    certify_fullness_type_a,
    reduce_mod_ell,
    stabilize_lattice,
)
from .errors import CrossCheckError, NonCompactError
from .gf import Mat, make_field
from .grp import (
    DEFAULT_ORACLE_CAP,
    GroupInstance,
    composition_series,
    enumerate_group,
    group_order,
)
from .liealg import DEFAULT_SAMPLE_SEED, nil_exp, nil_log, nori_envelope
from .lietypes import rank_profile

RAISED_CAP = 6_000_000


@dataclass
class SelftestConfig:
    oracle_cap: int = DEFAULT_ORACLE_CAP
    raised_cap: int = RAISED_CAP
    seed: int = DEFAULT_SAMPLE_SEED
    quick: bool = False
    force_pure: bool = False


@dataclass
class CriterionResult:
    cid: str
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.cid} {self.name}: {self.detail}"


class Runner:
    """Caches per-instance analyses so criteria can share the heavy runs."""

    def __init__(self, config: SelftestConfig):
        self.config = config
        self._records: dict[str, dict] = {}

    def record(self, name: str, cap: Optional[int] = None) -> dict:
        rec = self._records.get(name)
        if rec is not None:
            return rec
        inst = corpus.instance(name)
        cap = cap or self.config.oracle_cap
        e = enumerate_group(inst, cap=cap, force_pure=self.config.force_pure)
        chain_order = group_order(inst)
        if chain_order != e.order:
            raise CrossCheckError(
                f"{name}: enumeration {e.order} != stabilizer chain {chain_order}"
            )
        factors = composition_series(e, inst.field.ell, cap=cap)
        profile = rank_profile(factors, inst.field.ell)
        envelope = nori_envelope(e, seed=self.config.seed)
        rec = {
            "instance": inst,
            "order": e.order,
            "factors": sorted(str(f) for f in factors),
            "profile": profile,
            "envelope": envelope,
        }
        self._records[name] = rec
        return rec


Criterion = Callable[[Runner], CriterionResult]


def _result(cid, name, ok, detail, t0, budget_s) -> CriterionResult:
    elapsed = time.perf_counter() - t0
    if ok and elapsed > budget_s:
        return CriterionResult(cid, name, False, detail + "; exceeded time budget")
    return CriterionResult(cid, name, ok, detail)


def c01_exp_log(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(r.config.seed)
    samples = 500
    checked = 0
    for ell in (5, 7, 11, 13):
        F = make_field(ell)
        for n in range(2, 5):
            if ell <= n:
                continue
            ident = Mat.identity(F, n)
            for _ in range(samples):
                rows = [[0] * n for _ in range(n)]
                for i in range(n):
                    for j in range(i + 1, n):
                        rows[i][j] = rng.randrange(ell)
                # conjugate by a random invertible to leave triangular form
                while True:
                    c = Mat(F, [[rng.randrange(ell) for _ in range(n)] for _ in range(n)])
                    if c.det() != 0:
                        break
                x = c.inv() * Mat(F, rows) * c
                if nil_log(nil_exp(x, 1)) != x:
                    return _result("c01", "exp-log-inversion", False,
                                   f"log(exp(x)) != x over F_{ell}, n={n}", t0, 5.0)
                u = c.inv() * (ident + Mat(F, rows)) * c
                if nil_exp(nil_log(u), 1) != u:
                    return _result("c01", "exp-log-inversion", False,
                                   f"exp(log(u)) != u over F_{ell}, n={n}", t0, 5.0)
                checked += 2
    return _result("c01", "exp-log-inversion", True,
                   f"{checked} exact round trips over ell in (5,7,11,13), n <= 4", t0, 5.0)


def c02_profile_basics(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    a = r.record("sl2_7")
    p = a["profile"]
    ok1 = (p.dim_ell, p.rk_ell, dict(p.per_type)) == (3, 1, {lietypes.LieTypeTag("A", 1): 1})
    b = r.record("sl2weil_5_2")
    q = b["profile"]
    ok2 = (q.dim_ell, q.rk_ell) == (6, 2)
    detail = (
        f"sl2_7 -> (dim,rk,per_type)=({p.dim_ell},{p.rk_ell},{p.to_json()['per_type']}); "
        f"weil-restricted sl2(F_25) -> ({q.dim_ell},{q.rk_ell})"
    )
    return _result("c02", "rank-profile-basics", ok1 and ok2, detail, t0, 60.0)


def c03_rank_scaling(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    cases = [("sl2_5", 2, 1), ("sl2_7", 2, 1), ("sl2_11", 2, 1),
             ("sl2ext_5_2", 2, 2), ("sl3_5", 3, 1)]
    note = ""
    if r.config.quick:
        note = "; quick: (3,7,1) substituted by (3,5,1) only"
    else:
        cases.append(("sl3_7", 3, 1))
    bad = []
    for name, m, f in cases:
        cap = r.config.raised_cap if name == "sl3_7" else None
        rec = r.record(name, cap=cap)
        expect = f * (m - 1)
        if rec["profile"].rk_ell != expect:
            bad.append(f"{name}: rk {rec['profile'].rk_ell} != {expect}")
    detail = f"rk = f*(m-1) on {len(cases)} full special linear groups{note}"
    if bad:
        detail = "; ".join(bad)
    return _result("c03", "rank-scaling", not bad, detail, t0, 600.0)


def c04_solvable_zero(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    names = [f"{kind}{d}_{ell}" for kind in ("borel", "torus", "unip")
             for d in (2, 3) for ell in (5, 7)]
    bad = []
    for name in names:
        rec = r.record(name)
        p, env = rec["profile"], rec["envelope"]
        if (p.dim_ell, p.rk_ell) != (0, 0) or (env.dim_ss, env.rank) != (0, 0):
            bad.append(name)
    detail = f"both routes zero on {len(names)} solvable subgroups"
    if bad:
        detail = "nonzero profile on: " + ", ".join(bad)
    return _result("c04", "solvable-zero-profile", not bad, detail, t0, 10.0)


def c05_dual_route(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    names = ["sl2_7", "sl2_11", "sl2_13", "borel2_7", "torus2_7", "unip2_7",
             "borel3_7", "torus3_7", "unip3_7", "block22_7", "principal3_7",
             "sl2weil_7_2"]
    note = ""
    if r.config.quick:
        note = "; quick: sl3_7 omitted"
    else:
        names.append("sl3_7")
    bad = []
    for name in names:
        cap = r.config.raised_cap if name == "sl3_7" else None
        rec = r.record(name, cap=cap)
        p, env = rec["profile"], rec["envelope"]
        if (env.dim_ss, env.rank) != (p.dim_ell, p.rk_ell):
            bad.append(f"{name}: envelope ({env.dim_ss},{env.rank}) vs factors ({p.dim_ell},{p.rk_ell})")
    detail = f"envelope (dim_ss, rank) = factor route (dim_ell, rk_ell) on {len(names)} instances{note}"
    if bad:
        detail = "; ".join(bad)
    return _result("c05", "dual-route-equivalence", not bad, detail, t0, 900.0)


def c06_random_rank_bound(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    count = 40 if r.config.quick else 200
    rng = random.Random(r.config.seed ^ 0xABCD)
    F = make_field(7)
    triage_cap = 50_000
    exact = sampled = 0
    worst = 0
    from .certify import sample_order_ell_elements
    from .liealg import envelope_from_matrices
    from .errors import CapExceededError

    for k in range(count):
        gens = []
        while len(gens) < 2:
            rows = [[rng.randrange(7) for _ in range(3)] for _ in range(3)]
            m = Mat(F, rows)
            d = m.det()
            if d == 0:
                continue
            # scale one row to force determinant 1
            rows[0] = [x * pow(d, 5, 7) % 7 for x in rows[0]]
            gens.append(Mat(F, rows))
        inst = GroupInstance(F, 3, tuple(gens))
        try:
            e = enumerate_group(inst, cap=triage_cap, force_pure=r.config.force_pure)
            factors = composition_series(e, 7)
            rk = rank_profile(factors, 7).rk_ell
            exact += 1
        except CapExceededError:
            harvest = sample_order_ell_elements(inst, words=200, seed=r.config.seed + k)
            rk = envelope_from_matrices(harvest, seed=r.config.seed).rank
            sampled += 1
        worst = max(worst, rk)
        if rk > 2:
            return _result("c06", "rank-bound-random-subgroups", False,
                           f"instance {k}: rank {rk} > 2", t0, 600.0)
    return _result("c06", "rank-bound-random-subgroups", True,
                   f"{count} random pairs in sl3(F_7): all ranks <= 2 "
                   f"({exact} exact, {sampled} sampled harvests, max rank {worst})",
                   t0, 600.0)


def c07_fullness(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    full_names = ["sl2_5", "sl2_7", "sl2_11", "sl2ext_5_2", "sl2weil_5_2", "block22_7"]
    if not r.config.quick:
        full_names.append("sl3_7")
    bad = []
    for name in full_names:
        cap = r.config.raised_cap if name == "sl3_7" else None
        rec = r.record(name, cap=cap)
        cert = certify_fullness_type_a(rec["instance"], rec["profile"])
        if cert.verdict != "certified":
            bad.append(f"{name}: {cert.verdict}")
    for name in ("borel2_7", "borel2_5", "block22_as_sl4_7"):
        inst = corpus.instance(name)
        if name.startswith("borel"):
            rec = r.record(name)
            profile = rec["profile"]
        else:
            e = enumerate_group(inst, force_pure=r.config.force_pure)
            profile = rank_profile(composition_series(e, inst.field.ell), inst.field.ell)
        cert = certify_fullness_type_a(inst, profile)
        if cert.verdict == "certified":
            bad.append(f"{name}: wrongly certified")
    note = "; quick: sl3_7 omitted" if r.config.quick else ""
    detail = (f"{len(full_names)} full instances certified with order cross-check; "
              f"borel and mismatched-ambient instances never certified{note}")
    if bad:
        detail = "; ".join(bad)
    return _result("c07", "fullness-certificates", not bad, detail, t0, 120.0)


def c08_rank_drop(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    cases = [("borel2_7", 1), ("torus2_7", 1), ("unip2_7", 1),
             ("borel2_11", 1), ("torus2_11", 1),
             ("borel3_7", 2), ("torus3_7", 2), ("unip3_7", 2),
             ("levi3_7", 2), ("parabolic3_7", 2), ("principal3_7", 2),
             ("borel3_11", 2), ("torus3_11", 2), ("levi3_11", 2),
             ("principal3_11", 2), ("block22_7", 3)]
    note = ""
    if r.config.quick:
        note = "; quick: parabolic3_11 and block22_11 omitted"
    else:
        cases += [("parabolic3_11", 2), ("block22_11", 3)]
    bad = []
    for name, ambient_rank in cases:
        rec = r.record(name)
        if not rec["profile"].rk_ell < ambient_rank:
            bad.append(f"{name}: rk {rec['profile'].rk_ell} !< {ambient_rank}")
    detail = f"strict rank drop on {len(cases)} proper subgroup instances{note}"
    if bad:
        detail = "; ".join(bad)
    return _result("c08", "proper-subgroup-rank-drop", not bad, detail, t0, 300.0)


def c09_lattice(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    basis, conj = stabilize_lattice(corpus.lattice_conjugated_unipotents(), 7, max_iter=2)
    inst = reduce_mod_ell(conj, 7)
    e = enumerate_group(inst, force_pure=r.config.force_pure)
    factors = composition_series(e, 7)
    p = rank_profile(factors, 7)
    sl27 = r.record("sl2_7")["profile"]
    ok = (p.dim_ell, p.rk_ell) == (sl27.dim_ell, sl27.rk_ell) and e.order == 336
    noncompact_ok = False
    try:
        stabilize_lattice(corpus.lattice_noncompact(), 5)
    except NonCompactError:
        noncompact_ok = True
    detail = (f"stabilized in <= 2 iterations, reduced profile = sl2_7 profile; "
              f"diag(5, 1/5) raises NonCompact: {noncompact_ok}")
    return _result("c09", "lattice-front-door", ok and noncompact_ok, detail, t0, 5.0)


def _micro_fullness(r: Runner) -> CriterionResult:
    """Tiny fullness check (with its order cross-check) so the determinism
    subset is sensitive to faults in the order formulas."""
    t0 = time.perf_counter()
    rec = r.record("sl2_5")
    cert = certify_fullness_type_a(rec["instance"], rec["profile"])
    ok = cert.verdict == "certified" and rec["order"] == 120
    return _result("c--", "micro-fullness", ok, f"sl2_5 verdict {cert.verdict}", t0, 60.0)


def _run_subset_lines(config: SelftestConfig) -> list[str]:
    """Fresh-runner execution of three cheap criteria, used by the in-process
    determinism check.  Exceptions become FAIL lines so injected faults that
    raise are still counted as detected failures."""
    runner = Runner(config)
    lines = []
    for crit in (c02_profile_basics, c04_solvable_zero, _micro_fullness):
        try:
            lines.append(crit(runner).line())
        except Exception as exc:
            lines.append(f"FAIL {crit.__name__}: error: {type(exc).__name__}: {exc}")
    return lines


def apply_fault(kind: str):
    """Inject an off-by-one into a formula or table (testing hook).
    Returns an undo callable.  Patches every namespace the name was
    from-imported into, so all consumers see the fault."""
    from . import certify as certify_mod

    if kind == "order-formula":
        orig = lietypes.chevalley_order

        def bad_order(kind_, m, q):
            return orig(kind_, m, q) + 1

        lietypes.chevalley_order = bad_order
        certify_mod.chevalley_order = bad_order

        def undo():
            lietypes.chevalley_order = orig
            certify_mod.chevalley_order = orig

        return undo
    if kind == "dim-table":
        orig = lietypes.type_dim

        def bad_dim(tag):
            return orig(tag) + 1

        lietypes.type_dim = bad_dim

        def undo():
            lietypes.type_dim = orig

        return undo
    raise ValueError(f"unknown fault {kind!r}")


def c10_determinism(r: Runner) -> CriterionResult:
    t0 = time.perf_counter()
    cfg = SelftestConfig(seed=r.config.seed, quick=True, force_pure=r.config.force_pure)
    if r.config.quick:
        first = _run_subset_lines(cfg)
        second = _run_subset_lines(cfg)
        identical = first == second
        mutations_detected = 0
        for fault in ("order-formula", "dim-table"):
            undo = apply_fault(fault)
            try:
                lines = _run_subset_lines(cfg)
                if any(line.startswith("FAIL") for line in lines):
                    mutations_detected += 1
            except Exception:
                mutations_detected += 1
            finally:
                undo()
        ok = identical and mutations_detected == 2
        detail = (f"in-process double run identical: {identical}; "
                  f"2/2 injected faults detected: {mutations_detected == 2}")
        return _result("c10", "determinism-and-mutation", ok, detail, t0, 1200.0)

    import subprocess
    import sys

    cmd = [sys.executable, "-m", "norirank.cli", "selftest", "--quick",
           "--seed", str(r.config.seed)]
    if r.config.force_pure:
        cmd.append("--pure")
    out1 = subprocess.run(cmd, capture_output=True)
    out2 = subprocess.run(cmd, capture_output=True)
    identical = out1.stdout == out2.stdout and out1.returncode == out2.returncode == 0
    mutations_detected = 0
    for fault in ("order-formula", "dim-table"):
        res = subprocess.run(cmd + ["--inject-fault", fault], capture_output=True)
        if res.returncode != 0:
            mutations_detected += 1
    ok = identical and mutations_detected == 2
    detail = (f"selftest --quick twice byte-identical: {identical}; "
              f"2/2 injected faults make it fail: {mutations_detected == 2}")
    return _result("c10", "determinism-and-mutation", ok, detail, t0, 1200.0)


CRITERIA: list[Criterion] = [
    c01_exp_log,
    c02_profile_basics,
    c03_rank_scaling,
    c04_solvable_zero,
    c05_dual_route,
    c06_random_rank_bound,
    c07_fullness,
    c08_rank_drop,
    c09_lattice,
    c10_determinism,
]


def run_selftest(
    config: Optional[SelftestConfig] = None,
    inject_fault: Optional[str] = None,
    emit=print,
) -> int:
    """Run every acceptance criterion; one PASS/FAIL line each.  Returns the
    process exit code (0 all passed, 1 otherwise)."""
    config = config or SelftestConfig()
    undo = apply_fault(inject_fault) if inject_fault else None
    try:
        runner = Runner(config)
        failures = 0
        for crit in CRITERIA:
            try:
                res = crit(runner)
            except Exception as exc:  # a criterion crashing is a failure, not an abort
                name = crit.__name__.split("_", 1)[1].replace("_", "-")
                res = CriterionResult(crit.__name__[:3], name, False,
                                      f"error: {type(exc).__name__}: {exc}")
            emit(res.line())
            if not res.ok:
                failures += 1
        emit(f"selftest: {len(CRITERIA) - failures}/{len(CRITERIA)} criteria passed")
        return 0 if failures == 0 else 1
    finally:
        if undo:
            undo()
