import random

import numpy as np
import pytest

from norirank import corpus
from norirank.errors import CharTooSmallError, NotNilpotentError, NotUnipotentError
from norirank.gf import Mat, make_field
from norirank.grp import enumerate_group
from norirank.liealg import (
    ZERO_ENVELOPE,
    LieAlgebra,
    batched_rank_mod_p,
    bracket_closure,
    envelope_from_matrices,
    killing_radical_quotient,
    lie_rank,
    nil_exp,
    nil_log,
    nori_envelope,
    nullspace_mod_p,
    rref_mod_p,
    span_basis_mod_p,
)


def rand_strict_upper(F, n, rng):
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rng.randrange(F.ell)
    return Mat(F, rows)


def rand_invertible(F, n, rng):
    while True:
        m = Mat(F, [[rng.randrange(F.ell) for _ in range(n)] for _ in range(n)])
        if m.det() != 0:
            return m


# --- exp / log ---------------------------------------------------------------------

def test_exp_zero_is_identity(F7):
    assert nil_exp(Mat.zero(F7, 3), 1).is_identity()


def test_exp_e12(F7):
    assert nil_exp(Mat(F7, [[0, 1], [0, 0]]), 1) == Mat(F7, [[1, 1], [0, 1]])


def test_exp_truncated_series_f5(F5):
    # 1 + x + x^2/2 with x^2 = E13 and 1/2 = 3 mod 5.
    x = Mat(F5, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert nil_exp(x, 1) == Mat(F5, [[1, 1, 3], [0, 1, 1], [0, 0, 1]])


def test_log_identity_is_zero(F7):
    assert nil_log(Mat.identity(F7, 2)).is_zero()


def test_log_truncates(F7):
    assert nil_log(Mat(F7, [[1, 1], [0, 1]])) == Mat(F7, [[0, 1], [0, 0]])


def test_roundtrip_m4_f11(F11):
    rng = random.Random(11)
    for _ in range(200):
        x = rand_strict_upper(F11, 4, rng)
        assert nil_log(nil_exp(x, 1)) == x


def test_exp_has_order_ell(F7):
    rng = random.Random(3)
    for _ in range(20):
        x = rand_strict_upper(F7, 3, rng)
        if x.is_zero():
            continue
        u = nil_exp(x, 1)
        assert (u**7).is_identity() and not u.is_identity()


def test_one_parameter_law_exhaustive():
    # exp(s x) exp(t x) = exp((s+t) x), exhaustive in s and t for small ell.
    for ell in (5, 7, 11, 13):
        F = make_field(ell)
        x = Mat(F, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        for s in range(ell):
            for t in range(ell):
                assert nil_exp(x, s) * nil_exp(x, t) == nil_exp(x, (s + t) % ell)


def test_exp_rejects_non_nilpotent(F7):
    with pytest.raises(NotNilpotentError):
        nil_exp(Mat.identity(F7, 2), 1)


def test_log_rejects_non_unipotent(F7):
    with pytest.raises(NotUnipotentError):
        nil_log(Mat.diagonal(F7, (3, 5)))


def test_char_too_small():
    F5 = make_field(5)
    with pytest.raises(CharTooSmallError):
        nil_exp(Mat.zero(F5, 5), 1)
    with pytest.raises(CharTooSmallError):
        nil_log(Mat.identity(F5, 6))


# --- linear algebra helpers -----------------------------------------------------------

def scalar_rank_mod_p(mat, p):
    a = [[int(x) % p for x in row] for row in mat]
    n = len(a)
    rank = 0
    for col in range(len(a[0])):
        piv = next((r for r in range(rank, n) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], p - 2, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for r in range(n):
            if r != rank and a[r][col]:
                c = a[r][col]
                a[r] = [(x - c * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def test_batched_rank_matches_scalar():
    rng = np.random.default_rng(5)
    for p in (5, 7, 11):
        mats = rng.integers(0, p, size=(200, 6, 6))
        got = batched_rank_mod_p(mats, p)
        for i in range(len(mats)):
            assert got[i] == scalar_rank_mod_p(mats[i], p)


def test_nullspace_and_rref():
    p = 7
    a = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    rows, pivots = rref_mod_p(a, p)
    assert len(rows) == 2 and pivots == [0, 1]
    ns = nullspace_mod_p(a, p)
    assert len(ns) == 1
    assert (a @ ns[0] % p == 0).all()


def test_span_basis_canonical_under_permutation():
    rng = np.random.default_rng(9)
    vecs = rng.integers(0, 7, size=(12, 9))
    b1, p1 = span_basis_mod_p(vecs, 7)
    b2, p2 = span_basis_mod_p(vecs[::-1], 7)
    assert p1 == p2 and (b1 == b2).all()


# --- bracket closure ----------------------------------------------------------------

def test_closure_single_nilpotent_is_abelian(F7):
    L = bracket_closure([Mat(F7, [[0, 1], [0, 0]])])
    assert L.dim == 1


def test_closure_e_f_gives_sl2(F7):
    # Oracle: [E12, E21] = H = diag(1, -1) directly.
    e = Mat(F7, [[0, 1], [0, 0]])
    f = Mat(F7, [[0, 0], [1, 0]])
    h = e * f - f * e
    assert h == Mat.diagonal(F7, (1, 6))
    L = bracket_closure([e, f])
    assert L.dim == 3
    # basis closed under brackets (matrix span mode)
    mats = L.basis_mats()
    vecs = L.basis
    for a in mats:
        for b in mats:
            comm = a * b - b * a
            v = np.array([x for row in comm.rows for x in row])
            merged, _ = span_basis_mod_p(np.vstack([vecs, v[None, :]]), 7)
            assert len(merged) == L.dim


def test_closure_order5_logs_of_sl3_f5():
    e = enumerate_group(corpus.sl3(5))
    keys = e.engine.order_ell_elements(e.store.keys, 5)
    logs = [nil_log(e.engine.mat(int(k))) for k in list(keys)[:500]]
    L = bracket_closure(logs)
    assert L.dim == 8


def test_closure_seed_order_invariance(F7):
    e = Mat(F7, [[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    f = Mat(F7, [[0, 0, 0], [1, 0, 0], [0, 0, 0]])
    g = Mat(F7, [[0, 0, 0], [0, 0, 1], [0, 0, 0]])
    L1 = bracket_closure([e, f, g])
    L2 = bracket_closure([g, e, f])
    assert L1.dim == L2.dim
    assert (L1.basis == L2.basis).all()


def test_closure_dim_invariant_under_conjugation(F7):
    rng = random.Random(77)
    seed = [Mat(F7, [[0, 1], [0, 0]]), Mat(F7, [[0, 0], [1, 0]])]
    c = rand_invertible(F7, 2, rng)
    ci = c.inv()
    conj = [ci * m * c for m in seed]
    assert bracket_closure(seed).dim == bracket_closure(conj).dim


# --- Killing radical quotient ----------------------------------------------------------

def test_killing_sl2_nondegenerate(F7):
    # Oracle: Gram of the Killing form in basis (e, h, f) has determinant
    # -128 = 5 mod 7, so the radical is trivial.
    L = bracket_closure([Mat(F7, [[0, 1], [0, 0]]), Mat(F7, [[0, 0], [1, 0]])])
    ad = L.ad_matrices()
    gram = np.einsum("ikj,ljk->il", ad, ad) % 7
    det = round(np.linalg.det(gram.astype(float)))
    assert det % 7 == (-128) % 7 == 5
    q = killing_radical_quotient(L)
    assert q.dim == 3
    assert q is L  # nondegenerate: unchanged


def test_killing_heisenberg_vanishes(F7):
    seed = [
        Mat(F7, [[0, 1, 0], [0, 0, 0], [0, 0, 0]]),
        Mat(F7, [[0, 0, 0], [0, 0, 1], [0, 0, 0]]),
    ]
    L = bracket_closure(seed)
    assert L.dim == 3
    assert killing_radical_quotient(L).dim == 0


def test_killing_zero_algebra(F7):
    L = bracket_closure([Mat.zero(F7, 2)])
    assert L.dim == 0
    assert killing_radical_quotient(L).dim == 0


def test_killing_idempotent_on_mixed_algebra(F7):
    # sl2 plus a commuting nilpotent line: radical = the line.
    seed = [
        Mat(F7, [[0, 1, 0], [0, 0, 0], [0, 0, 0]]),
        Mat(F7, [[0, 0, 0], [1, 0, 0], [0, 0, 0]]),
        Mat(F7, [[0, 0, 1], [0, 0, 0], [0, 0, 0]]),
    ]
    L = bracket_closure(seed)
    q1 = killing_radical_quotient(L)
    q2 = killing_radical_quotient(q1)
    assert q1.dim == q2.dim
    assert (q1.structure == q2.structure).all()


def test_quotient_structure_is_lie():
    # Antisymmetry and Jacobi survive the projection.
    F7 = make_field(7)
    seed = [
        Mat(F7, [[0, 1, 0], [0, 0, 0], [0, 0, 0]]),
        Mat(F7, [[0, 0, 0], [1, 0, 0], [0, 0, 0]]),
        Mat(F7, [[0, 0, 1], [0, 0, 0], [0, 0, 0]]),
        Mat(F7, [[0, 0, 0], [0, 0, 1], [0, 0, 0]]),
    ]
    q = killing_radical_quotient(bracket_closure(seed))
    S = q.structure
    d = q.dim
    assert ((S + S.transpose(1, 0, 2)) % 7 == 0).all()
    for a in range(d):
        for b in range(d):
            for c in range(d):
                # [[a,b],c] + [[b,c],a] + [[c,a],b] = 0
                total = (
                    S[a, b] @ S[:, c].reshape(d, d)
                    + S[b, c] @ S[:, a].reshape(d, d)
                    + S[c, a] @ S[:, b].reshape(d, d)
                ) % 7
                assert (total % 7 == 0).all()


# --- lie_rank -----------------------------------------------------------------------

def test_rank_zero_algebra(F7):
    L = bracket_closure([Mat.zero(F7, 2)])
    assert lie_rank(L) == 0


def test_rank_sl2_exhaustive_cross_check(F7):
    # Independent oracle: sweep all 343 elements as matrices and compute the
    # centralizer dimension from matrix commutators, no structure constants.
    L = killing_radical_quotient(
        bracket_closure([Mat(F7, [[0, 1], [0, 0]]), Mat(F7, [[0, 0], [1, 0]])])
    )
    assert lie_rank(L) == 1
    basis = [np.array(m.rows) for m in L.basis_mats()]
    best = 10
    for c0 in range(7):
        for c1 in range(7):
            for c2 in range(7):
                x = (c0 * basis[0] + c1 * basis[1] + c2 * basis[2]) % 7
                rows = []
                for b in basis:
                    comm = (x @ b - b @ x) % 7
                    rows.append(comm.reshape(-1))
                rank = scalar_rank_mod_p(np.array(rows), 7)
                best = min(best, 3 - rank)
    assert best == 1


def test_rank_sl3_f5():
    e = enumerate_group(corpus.sl3(5))
    env = nori_envelope(e)
    assert env.rank == 2
    # cross-check: the regular semisimple element diag(1, 2, -3) has a
    # 2-dimensional centralizer in sl3
    F5 = make_field(5)
    d = Mat.diagonal(F5, (1, 2, 2))  # -3 = 2 mod 5
    elems = [np.array(d.rows)]
    L = killing_radical_quotient(
        bracket_closure([nil_log(m) for m in _some_unipotents(corpus.sl3(5))])
    )
    basis = [np.array(m.rows) for m in L.basis_mats()]
    x = np.array(d.rows)
    rows = [((x @ b - b @ x) % 5).reshape(-1) for b in basis]
    assert L.dim - scalar_rank_mod_p(np.array(rows), 5) == 2


def _some_unipotents(inst):
    e = enumerate_group(inst)
    keys = list(e.engine.order_ell_elements(e.store.keys, inst.field.ell))[:400]
    return [e.engine.mat(int(k)) for k in keys]


# --- envelopes -----------------------------------------------------------------------

def test_envelope_sl2_7():
    e = enumerate_group(corpus.sl2(7))
    env = nori_envelope(e)
    assert (env.dim_full, env.dim_ss, env.rank) == (3, 3, 1)
    assert env.sample_seed is None  # exhaustive sweep


def test_envelope_torus_zero():
    env = nori_envelope(enumerate_group(corpus.torus2(7)))
    assert env == ZERO_ENVELOPE


def test_envelope_borel():
    env = nori_envelope(enumerate_group(corpus.borel2(7)))
    assert (env.dim_full, env.dim_ss, env.rank) == (1, 0, 0)


def test_envelope_weil_restricted_f25():
    env = nori_envelope(enumerate_group(corpus.instance("sl2weil_5_2")))
    assert (env.dim_full, env.dim_ss, env.rank) == (6, 6, 2)


def test_envelope_extension_field_instance_matches_weil():
    a = nori_envelope(enumerate_group(corpus.instance("sl2ext_5_2")))
    b = nori_envelope(enumerate_group(corpus.instance("sl2weil_5_2")))
    assert (a.dim_full, a.dim_ss, a.rank) == (b.dim_full, b.dim_ss, b.rank)


def test_envelope_char_too_small():
    # 5x5 permutation matrices over F_5: matrix side equals the characteristic.
    F5 = make_field(5)
    from norirank.grp import GroupInstance

    rows = [[1 if j == (i + 1) % 5 else 0 for j in range(5)] for i in range(5)]
    inst = GroupInstance(F5, 5, (Mat(F5, rows),))
    with pytest.raises(CharTooSmallError):
        nori_envelope(enumerate_group(inst))


def test_envelope_from_matrices_partial_harvest_shrinks():
    e = enumerate_group(corpus.sl2(7))
    keys = list(e.engine.order_ell_elements(e.store.keys, 7))
    full = envelope_from_matrices([e.engine.mat(int(k)) for k in keys])
    partial = envelope_from_matrices([e.engine.mat(int(keys[0]))])
    assert (full.dim_full, full.rank) == (3, 1)
    assert partial.dim_full <= full.dim_full and partial.rank <= full.rank
