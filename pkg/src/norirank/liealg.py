"""Exp/log of mod-ell nilpotents and the Lie-algebra side of the rank
computation: bracket closure of harvested logarithms, Killing-radical
quotient, and rank via minimal centralizer dimension.

Everything runs over the prime field: extension-field groups are Weil
restricted before their logarithms are harvested, which matches how the
dimension and rank invariants scale with the extension degree.  The
"characteristic sufficiently large" threshold is a knob, not a precondition:
computations below it proceed but are flagged heuristic_regime.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CharTooSmallError,
    NotNilpotentError,
    NotUnipotentError,
)
from .gf import Field, Mat, make_field

DEFAULT_SAMPLE_SEED = 1729
RANK_EXHAUSTIVE_LIMIT = 10**6
RANK_SAMPLE_SIZE = 10**4


# --- scalar exp/log ---------------------------------------------------------

def nil_exp(x: Mat, t: int = 1) -> Mat:
    """exp(t*x) = 1 + t*x + t^2 x^2/2 + ... truncated at x^{n-1}.

    Requires x^n = 0 and ell > n so every k! is invertible.  For x != 0 and
    t != 0 the result has order ell, and exp(s*x)exp(t*x) = exp((s+t)*x).
    """
    fld, n = x.field, x.n
    if fld.ell <= n:
        raise CharTooSmallError(f"need ell > n, got ell={fld.ell}, n={n}")
    if not (x**n).is_zero():
        raise NotNilpotentError("x^n != 0")
    acc = Mat.identity(fld, n)
    xk = Mat.identity(fld, n)
    coeff = 1
    for k in range(1, n):
        xk = xk * x
        coeff = fld.mul(coeff, fld.mul(t % fld.q, fld.inv(k % fld.ell)))
        acc = acc + xk.scale(coeff)
    return acc


def nil_log(u: Mat) -> Mat:
    """log(u) = (u-1) - (u-1)^2/2 + ... truncated at (u-1)^{n-1}.

    Requires (u-1)^n = 0 and ell > n; inverts nil_exp exactly.
    """
    fld, n = u.field, u.n
    if fld.ell <= n:
        raise CharTooSmallError(f"need ell > n, got ell={fld.ell}, n={n}")
    a = u - Mat.identity(fld, n)
    if not (a**n).is_zero():
        raise NotUnipotentError("(u-1)^n != 0")
    acc = Mat.zero(fld, n)
    ak = Mat.identity(fld, n)
    for k in range(1, n):
        ak = ak * a
        coeff = fld.inv(k % fld.ell)
        if k % 2 == 0:
            coeff = fld.neg(coeff)
        acc = acc + ak.scale(coeff)
    return acc


# --- small exact linear algebra mod p ------------------------------------------

def rref_mod_p(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p; returns (rows, pivot columns)."""
    a = np.mod(np.asarray(arr, dtype=np.int64), p).copy()
    if a.ndim != 2:
        a = a.reshape(len(a), -1)
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for rr in range(r, nrows):
            if a[rr, c]:
                piv = rr
                break
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, c]), p - 2, p) % p
        for rr in range(nrows):
            if rr != r and a[rr, c]:
                a[rr] = (a[rr] - a[rr, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def span_basis_mod_p(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """RREF basis of the row span, computed with vectorized elimination so
    large harvests (1e5+ rows) reduce quickly."""
    a = np.mod(np.asarray(arr, dtype=np.int64), p)
    if a.size == 0:
        return a.reshape(0, a.shape[-1] if a.ndim == 2 else 0), []
    a = a.reshape(len(a), -1).copy()
    ncols = a.shape[1]
    rows = []
    pivots: list[int] = []
    for c in range(ncols):
        nz = np.nonzero(a[:, c])[0]
        if len(nz) == 0:
            continue
        r = a[nz[0]] * pow(int(a[nz[0], c]), p - 2, p) % p
        a = (a - np.outer(a[:, c], r)) % p
        rows.append(r)
        pivots.append(c)
        if len(rows) == ncols:
            break
    if not rows:
        return np.zeros((0, ncols), dtype=np.int64), []
    basis = np.array(rows, dtype=np.int64)
    # Back-substitute to full RREF (rows are already zero below each pivot).
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        for j in range(i):
            if basis[j, c]:
                basis[j] = (basis[j] - basis[j, c] * basis[i]) % p
    return basis, pivots


def nullspace_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel of a (rows = basis vectors)."""
    a = np.asarray(a, dtype=np.int64)
    rows, pivots = rref_mod_p(a, p)
    ncols = a.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for i, c in enumerate(free):
        out[i, c] = 1
        for r, pc in enumerate(pivots):
            out[i, pc] = (-rows[r, c]) % p
    return out


def batched_rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a batch of small square matrices over F_p (vectorized
    Gaussian elimination across the batch)."""
    a = np.mod(np.asarray(mats, dtype=np.int64), p).copy()
    nb, d, _ = a.shape
    inv_table = np.array([0] + [pow(i, p - 2, p) for i in range(1, p)], dtype=np.int64)
    row = np.zeros(nb, dtype=np.int64)
    rows_idx = np.arange(d)[None, :]
    bidx = np.arange(nb)
    for col in range(d):
        eligible = (a[:, :, col] != 0) & (rows_idx >= row[:, None])
        has = eligible.any(axis=1)
        if not has.any():
            continue
        piv = eligible.argmax(axis=1)
        bsel = bidx[has]
        r1 = row[has]
        r2 = piv[has]
        tmp = a[bsel, r1, :].copy()
        a[bsel, r1, :] = a[bsel, r2, :]
        a[bsel, r2, :] = tmp
        pinv = inv_table[a[bsel, r1, col]]
        a[bsel, r1, :] = a[bsel, r1, :] * pinv[:, None] % p
        colv = a[bsel, :, col]
        mask = rows_idx > r1[:, None]
        factors = np.where(mask, colv, 0)
        a[bsel] = (a[bsel] - factors[:, :, None] * a[bsel, r1, :][:, None, :]) % p
        row[has] += 1
    return row


# --- Lie algebras ------------------------------------------------------------------

class LieAlgebra:
    """A Lie algebra over F_ell given by a basis and structure constants.

    For bracket-closure outputs the basis rows are the RREF of a space of
    n x n matrices and the bracket is the matrix commutator; quotients carry
    representative rows plus induced structure constants (their commutators
    as matrices may leave the span, so is_matrix_span is False there).
    structure[i, j, k] is the coefficient of b_k in [b_i, b_j].
    """

    def __init__(
        self,
        field: Field,
        n: int,
        basis: np.ndarray,
        structure: np.ndarray,
        is_matrix_span: bool,
    ):
        if field.f != 1:
            raise ValueError("Lie algebras are represented over the prime field")
        self.field = field
        self.n = n
        self.basis = np.asarray(basis, dtype=np.int64)
        self.dim = len(self.basis)
        self.structure = np.asarray(structure, dtype=np.int64)
        self.is_matrix_span = is_matrix_span

    def basis_mats(self) -> list[Mat]:
        return [
            Mat(self.field, tuple(map(tuple, row.reshape(self.n, self.n))))
            for row in self.basis
        ]

    def ad_matrices(self) -> np.ndarray:
        """ad(b_i) as a dim x dim matrix acting on coordinates."""
        # [b_i, b_j] = sum_k S[i,j,k] b_k, so ad(b_i)[k, j] = S[i, j, k].
        return self.structure.transpose(0, 2, 1)

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.dim}, n={self.n}, F_{self.field.ell})"


def _commutators(basis: np.ndarray, n: int, p: int) -> np.ndarray:
    d = len(basis)
    if d == 0:
        return np.zeros((0, n * n), dtype=np.int64)
    mats = basis.reshape(d, n, n)
    prod = np.einsum("aij,bjk->abik", mats, mats) % p
    comm = (prod - prod.transpose(1, 0, 2, 3)) % p
    iu = np.triu_indices(d, k=1)
    return comm[iu].reshape(-1, n * n)


def bracket_closure_array(vecs: np.ndarray, field: Field, n: int) -> LieAlgebra:
    """Smallest bracket-closed subspace of M_n(F_ell) containing the rows."""
    p = field.ell
    basis, pivots = span_basis_mod_p(np.asarray(vecs, dtype=np.int64).reshape(-1, n * n), p)
    while True:
        d = len(basis)
        if d == 0:
            break
        comms = _commutators(basis, n, p)
        merged, new_piv = span_basis_mod_p(np.vstack([basis, comms]), p)
        if len(merged) == d:
            basis, pivots = merged, new_piv
            break
        basis, pivots = merged, new_piv
    # Structure constants: RREF coordinates are just the pivot-column values.
    d = len(basis)
    structure = np.zeros((d, d, d), dtype=np.int64)
    if d:
        mats = basis.reshape(d, n, n)
        prod = np.einsum("aij,bjk->abik", mats, mats) % p
        comm = ((prod - prod.transpose(1, 0, 2, 3)) % p).reshape(d, d, n * n)
        structure = comm[:, :, pivots] % p
    return LieAlgebra(field, n, basis, structure, is_matrix_span=True)


def bracket_closure(seed: Sequence[Mat]) -> LieAlgebra:
    """Bracket closure of a seed list of matrices over a prime field.

    The result is reported in canonical RREF form, so it is independent of
    the seed ordering.
    """
    if not seed:
        raise ValueError("seed must be nonempty")
    fld, n = seed[0].field, seed[0].n
    if fld.f != 1:
        raise ValueError("bracket_closure expects prime-field matrices; Weil restrict first")
    vecs = np.array([[e for row in m.rows for e in row] for m in seed], dtype=np.int64)
    return bracket_closure_array(vecs, fld, n)


def killing_radical_quotient(L: LieAlgebra) -> LieAlgebra:
    """Quotient by the radical of the Killing form kappa(a,b) = tr(ad a ad b).

    The radical is an ideal (the form is invariant), so the induced bracket
    on a complement is well defined; in good characteristic the quotient is
    the semisimple part and the operation is idempotent.
    """
    p = L.field.ell
    d = L.dim
    if d == 0:
        return L
    ad = L.ad_matrices()
    gram = np.einsum("ikj,ljk->il", ad, ad) % p
    radical = nullspace_mod_p(gram, p)
    if len(radical) == 0:
        return L
    rad_rref, rad_pivots = rref_mod_p(radical, p)
    comp_idx = [c for c in range(d) if c not in rad_pivots]
    if not comp_idx:
        empty = np.zeros((0, L.n * L.n), dtype=np.int64)
        return LieAlgebra(L.field, L.n, empty, np.zeros((0, 0, 0), dtype=np.int64), False)

    def project(v: np.ndarray) -> np.ndarray:
        v = v.copy()
        for r, pc in enumerate(rad_pivots):
            if v[pc]:
                v = (v - v[pc] * rad_rref[r]) % p
        return v[comp_idx]

    dq = len(comp_idx)
    structure = np.zeros((dq, dq, dq), dtype=np.int64)
    for a in range(dq):
        for b in range(dq):
            structure[a, b] = project(L.structure[comp_idx[a], comp_idx[b]] % p)
    return LieAlgebra(L.field, L.n, L.basis[comp_idx], structure, is_matrix_span=False)


@dataclass(frozen=True)
class LieRankResult:
    rank: int
    sampled: bool
    seed: Optional[int]


def _min_centralizer_dim(
    L: LieAlgebra,
    exhaustive_limit: int = RANK_EXHAUSTIVE_LIMIT,
    sample_size: int = RANK_SAMPLE_SIZE,
    seed: int = DEFAULT_SAMPLE_SEED,
) -> LieRankResult:
    d = L.dim
    if d == 0:
        return LieRankResult(0, False, None)
    p = L.field.ell
    smat = L.structure.reshape(d, d * d)
    total = p**d

    def ranks_for(X: np.ndarray) -> np.ndarray:
        t = (X @ smat) % p  # [B, d*d] with index (j, k)
        adx = t.reshape(len(X), d, d).transpose(0, 2, 1)  # [B, k, j]
        return batched_rank_mod_p(adx, p)

    best = d
    if total <= exhaustive_limit:
        chunk = 1 << 14
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
            X = np.empty((len(idx), d), dtype=np.int64)
            t = idx.copy()
            for c in range(d):
                X[:, c] = t % p
                t //= p
            best = min(best, int((d - ranks_for(X)).min()))
        return LieRankResult(best, False, None)
    rng = np.random.default_rng(seed)
    remaining = sample_size
    while remaining > 0:
        batch = min(remaining, 1 << 14)
        X = rng.integers(0, p, size=(batch, d), dtype=np.int64)
        best = min(best, int((d - ranks_for(X)).min()))
        remaining -= batch
    return LieRankResult(best, True, seed)


def lie_rank(L: LieAlgebra, seed: int = DEFAULT_SAMPLE_SEED) -> int:
    """Minimum over elements of dim ker(ad x): exhaustive when |L| <= 1e6,
    else a deterministic seeded sample of 1e4 elements."""
    return _min_centralizer_dim(L, seed=seed).rank


# --- envelope ---------------------------------------------------------------------

@dataclass(frozen=True)
class NoriEnvelope:
    """(dim of bracket closure, dim after Killing quotient, rank)."""

    dim_full: int
    dim_ss: int
    rank: int
    heuristic_regime: bool
    sample_seed: Optional[int]

    def __post_init__(self):
        if not (0 <= self.rank <= self.dim_ss <= self.dim_full):
            raise ValueError("envelope must satisfy 0 <= rank <= dim_ss <= dim_full")

    def to_json(self) -> dict:
        return {
            "dim_full": self.dim_full,
            "dim_ss": self.dim_ss,
            "rank": self.rank,
            "heuristic_regime": self.heuristic_regime,
            "sample_seed": self.sample_seed,
        }


ZERO_ENVELOPE = NoriEnvelope(0, 0, 0, False, None)


def regime_threshold(side: int, dim_full: int, threshold_mult: int = 1) -> int:
    """Characteristic must exceed this for the non-heuristic regime."""
    return threshold_mult * max(side, 4 * dim_full)


def _wr_block_table(field: Field) -> np.ndarray:
    """code -> f x f multiplication block, for batch Weil restriction."""
    f = field.f
    out = np.zeros((field.q, f, f), dtype=np.int64)
    for a in range(field.q):
        xj = 1
        for j in range(f):
            col = field.decode(field.mul(a, xj))
            for i in range(f):
                out[a, i, j] = col[i]
            xj = field.mul(xj, field.ell)
    return out


def batch_weil_restrict(mats: np.ndarray, field: Field) -> np.ndarray:
    """[N, n, n] arrays of codes over F_{ell^f} -> [N, nf, nf] over F_ell."""
    if field.f == 1:
        return mats
    table = _wr_block_table(field)
    nb, n, _ = mats.shape
    f = field.f
    blocks = table[mats]  # [N, n, n, f, f]
    return blocks.transpose(0, 1, 3, 2, 4).reshape(nb, n * f, n * f)


def batch_nil_log(units: np.ndarray, p: int) -> np.ndarray:
    """Truncated log of a batch of unipotent matrices over F_p; returns
    [N, s*s] vectors.  Raises NotUnipotentError if any (u-1)^s != 0."""
    u = np.mod(np.asarray(units, dtype=np.int64), p)
    nb, s, _ = u.shape
    a = (u - np.eye(s, dtype=np.int64)) % p
    acc = np.zeros_like(a)
    ak = a.copy()
    for k in range(1, s):
        coeff = pow(k, p - 2, p)
        if k % 2 == 0:
            coeff = (-coeff) % p
        acc = (acc + coeff * ak) % p
        if k < s - 1:
            ak = np.einsum("bij,bjk->bik", ak, a) % p
    final = np.einsum("bij,bjk->bik", ak, a) % p
    if final.any():
        raise NotUnipotentError("batch contains a non-unipotent element")
    return acc.reshape(nb, s * s)


def envelope_from_logs(
    logs: np.ndarray,
    side: int,
    ell: int,
    *,
    seed: int = DEFAULT_SAMPLE_SEED,
    threshold_mult: int = 1,
) -> NoriEnvelope:
    prime = make_field(ell, 1)
    if len(logs) == 0:
        return ZERO_ENVELOPE
    L = bracket_closure_array(logs, prime, side)
    Lss = killing_radical_quotient(L)
    detail = _min_centralizer_dim(Lss, seed=seed)
    heuristic = not (ell > regime_threshold(side, L.dim, threshold_mult))
    return NoriEnvelope(
        L.dim, Lss.dim, detail.rank, heuristic,
        detail.seed if detail.sampled else None,
    )


def nori_envelope(
    e,
    *,
    seed: int = DEFAULT_SAMPLE_SEED,
    threshold_mult: int = 1,
) -> NoriEnvelope:
    """Harvest logs of every order-ell element of an enumerated group, close
    under brackets, quotient out the Killing radical, and read off the rank.

    A group with no order-ell elements yields the zero envelope (rank 0 by
    definition).  Extension-field groups are Weil restricted first.
    """
    field, n = e.field, e.n
    ell = field.ell
    side = n * field.f
    if ell <= side:
        raise CharTooSmallError(f"need ell > n*f = {side}, got ell={ell}")
    keys = e.engine.order_ell_elements(e.store.keys, ell)
    if len(keys) == 0:
        return ZERO_ENVELOPE
    mats = e.engine.decode_batch(list(keys))
    mats = batch_weil_restrict(mats, field)
    logs = batch_nil_log(mats, ell)
    return envelope_from_logs(logs, side, ell, seed=seed, threshold_mult=threshold_mult)


def envelope_from_matrices(
    mats: Sequence[Mat],
    *,
    seed: int = DEFAULT_SAMPLE_SEED,
    threshold_mult: int = 1,
) -> NoriEnvelope:
    """Envelope from an explicit list of order-ell elements (the documented
    sound-but-incomplete mode for groups past the enumeration cap: a partial
    harvest can only shrink the envelope)."""
    if not mats:
        return ZERO_ENVELOPE
    field, n = mats[0].field, mats[0].n
    side = n * field.f
    if field.ell <= side:
        raise CharTooSmallError(f"need ell > n*f = {side}, got ell={field.ell}")
    arr = np.array([[e for row in m.rows for e in row] for m in mats], dtype=np.int64)
    arr = arr.reshape(len(mats), n, n)
    arr = batch_weil_restrict(arr, field)
    logs = batch_nil_log(arr, field.ell)
    return envelope_from_logs(logs, side, field.ell, seed=seed, threshold_mult=threshold_mult)
