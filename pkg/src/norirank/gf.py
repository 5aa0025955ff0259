"""Exact arithmetic in F_{ell^f} and square matrices over it.

Field elements are encoded as integers in [0, ell^f): the base-ell digits of
the code, least significant first, are the coefficients of the residue
polynomial in the power basis of the field's modulus.  The prime-field case
(f = 1) is the plain residue.  All arithmetic is exact; there is no floating
point anywhere in the package.

Matrices are immutable and hashable (tuples of tuples of encoded entries),
so they can live in sets during group enumeration.
"""

from __future__ import annotations

import functools
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeError,
    NotPrimeError,
    OrderOverflowError,
    SingularError,
)

# Largest field for which flat q*q add/mul tables are built (the closure
# kernels need them; 256^2 int32 entries is 256 KiB).
TABLE_Q_MAX = 256


def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit inputs."""
    if m < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % p == 0:
            return m == p
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


# --- polynomial helpers over F_ell (coefficient tuples, low degree first) ---

def _poly_trim(p: Sequence[int]) -> tuple[int, ...]:
    i = len(p)
    while i > 0 and p[i - 1] == 0:
        i -= 1
    return tuple(p[:i])


def _poly_mul(a: Sequence[int], b: Sequence[int], ell: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % ell
    return _poly_trim(out)


def _poly_mod(a: Sequence[int], m: Sequence[int], ell: int) -> tuple[int, ...]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], ell - 2, ell)
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1] * inv_lead % ell
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % ell
        a.pop()
    return _poly_trim(a)


def _poly_irreducible(m: Sequence[int], ell: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(m)/2."""
    deg = len(m) - 1
    if deg == 1:
        return True
    # Root test covers all degree-1 factors.
    for r in range(ell):
        if sum(c * pow(r, i, ell) for i, c in enumerate(m)) % ell == 0:
            return False
    for d in range(2, deg // 2 + 1):
        for code in range(ell**d):
            div = []
            t = code
            for _ in range(d):
                div.append(t % ell)
                t //= ell
            div.append(1)
            if not _poly_mod(m, div, ell):
                return False
    return True


class Field:
    """The finite field F_{ell^f} with a fixed monic irreducible modulus."""

    __slots__ = (
        "ell", "f", "q", "modulus", "_xpow", "_tables", "__weakref__",
    )

    def __init__(self, ell: int, f: int, modulus: tuple[int, ...]):
        if f < 1:
            raise DegreeError(f"extension degree must be >= 1, got {f}")
        if not is_prime(ell) or ell < 5:
            raise NotPrimeError(f"characteristic must be a prime >= 5, got {ell}")
        if len(modulus) != f + 1 or modulus[-1] != 1:
            raise DegreeError("modulus must be monic of degree f")
        if any(not (0 <= c < ell) for c in modulus):
            raise DegreeError("modulus coefficients must be reduced mod ell")
        if f > 1 and not _poly_irreducible(modulus, ell):
            raise DegreeError(f"modulus {modulus} is reducible over F_{ell}")
        self.ell = ell
        self.f = f
        self.q = ell**f
        self.modulus = tuple(modulus)
        if f > 1:
            # x^f .. x^{2f-2} reduced mod the modulus, as coefficient tuples.
            xf = _poly_mod([0] * f + [1], modulus, ell)
            pows = [xf]
            for _ in range(f - 2):
                nxt = list(_poly_mul(pows[-1], (0, 1), ell))
                nxt = _poly_mod(nxt, modulus, ell)
                pows.append(nxt)
            self._xpow = [tuple(p) + (0,) * (f - len(p)) for p in pows]
        else:
            self._xpow = []
        self._tables = None

    # -- encoding ------------------------------------------------------------

    def encode(self, coeffs: Iterable[int]) -> int:
        """Coefficient list (low degree first) -> element code."""
        code = 0
        for i, c in enumerate(coeffs):
            if i >= self.f:
                raise ValueError("coefficient list longer than extension degree")
            code += (c % self.ell) * self.ell**i
        return code

    def decode(self, a: int) -> tuple[int, ...]:
        """Element code -> coefficient tuple of length f."""
        out = []
        for _ in range(self.f):
            out.append(a % self.ell)
            a //= self.ell
        return tuple(out)

    def elements(self) -> range:
        return range(self.q)

    # -- arithmetic ------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a + b) % self.ell
        ell = self.ell
        out, base = 0, 1
        for _ in range(self.f):
            out += ((a + b) % ell) * base
            a //= ell
            b //= ell
            base *= ell
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        if self.f == 1:
            return (-a) % self.ell
        ell = self.ell
        out, base = 0, 1
        for _ in range(self.f):
            out += ((-a) % ell) * base
            a //= ell
            base *= ell
        return out

    def mul(self, a: int, b: int) -> int:
        if self.f == 1:
            return a * b % self.ell
        ell, f = self.ell, self.f
        ca, cb = self.decode(a), self.decode(b)
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % ell
        out = list(prod[:f])
        for k in range(f, 2 * f - 1):
            c = prod[k]
            if c:
                red = self._xpow[k - f]
                for i in range(f):
                    out[i] = (out[i] + c * red[i]) % ell
        return self.encode(out)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.f == 1:
            return pow(a, self.ell - 2, self.ell)
        return self.pow(a, self.q - 2)

    # -- tables for the closure kernels ----------------------------------------

    def tables(self):
        """Flat q*q int32 (mul, add) tables plus a q-vector of negatives.

        Only available for q <= TABLE_Q_MAX; cached after first build.
        """
        if self._tables is None:
            if self.q > TABLE_Q_MAX:
                raise ValueError(f"tables unavailable for q={self.q} > {TABLE_Q_MAX}")
            q = self.q
            if self.f == 1:
                r = np.arange(q, dtype=np.int64)
                mul = (np.outer(r, r) % self.ell).astype(np.int32)
                add = ((r[:, None] + r[None, :]) % self.ell).astype(np.int32)
                neg = ((-r) % self.ell).astype(np.int32)
            else:
                mul = np.empty((q, q), dtype=np.int32)
                add = np.empty((q, q), dtype=np.int32)
                neg = np.empty(q, dtype=np.int32)
                for a in range(q):
                    neg[a] = self.neg(a)
                    for b in range(a, q):
                        m = self.mul(a, b)
                        s = self.add(a, b)
                        mul[a, b] = mul[b, a] = m
                        add[a, b] = add[b, a] = s
            self._tables = (
                np.ascontiguousarray(mul.reshape(-1)),
                np.ascontiguousarray(add.reshape(-1)),
                neg,
            )
        return self._tables

    # -- dunder ----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and self.ell == other.ell
            and self.f == other.f
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.ell, self.f, self.modulus))

    def __repr__(self) -> str:
        if self.f == 1:
            return f"Field(F_{self.ell})"
        return f"Field(F_{self.ell}^{self.f}, modulus={list(self.modulus)})"


@functools.lru_cache(maxsize=None)
def make_field(ell: int, f: int = 1) -> Field:
    """Field with the canonical modulus: the monic irreducible of degree f
    whose coefficient tuple, compared from the highest non-leading coefficient
    down to the constant term, is smallest.  Deterministic across runs.

    For f = 1 the modulus is x itself (unused).
    """
    if f < 1:
        raise DegreeError(f"extension degree must be >= 1, got {f}")
    if not is_prime(ell) or ell < 5:
        raise NotPrimeError(f"characteristic must be a prime >= 5, got {ell}")
    if f == 1:
        return Field(ell, 1, (0, 1))
    for code in range(ell**f):
        coeffs = []
        t = code
        for _ in range(f):
            coeffs.append(t % ell)
            t //= ell
        modulus = tuple(coeffs) + (1,)
        if _poly_irreducible(modulus, ell):
            return Field(ell, f, modulus)
    raise AssertionError("unreachable: irreducibles of every degree exist")


class Mat:
    """Immutable n x n matrix over a Field; entries are encoded codes."""

    __slots__ = ("field", "n", "rows", "_hash")

    def __init__(self, field: Field, rows: Sequence[Sequence[int]]):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        q = field.q
        self.field = field
        self.n = n
        self.rows = tuple(tuple(int(e) % q if 0 <= e < q else self._reduce(field, e) for e in r) for r in rows)
        self._hash = hash((field.ell, field.f, self.rows))

    @staticmethod
    def _reduce(field: Field, e: int) -> int:
        # Out-of-range codes only make sense on the prime field, where the
        # code is the residue itself.
        if field.f != 1:
            raise ValueError(f"entry code {e} out of range for {field!r}")
        return e % field.ell

    # -- constructors ----------------------------------------------------------

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        return cls(field, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, field: Field, n: int) -> "Mat":
        return cls(field, tuple((0,) * n for _ in range(n)))

    @classmethod
    def diagonal(cls, field: Field, entries: Sequence[int]) -> "Mat":
        n = len(entries)
        return cls(field, tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    # -- arithmetic ------------------------------------------------------------

    def __mul__(self, other: "Mat") -> "Mat":
        fld, n = self.field, self.n
        if fld.f == 1:
            ell = fld.ell
            bt = tuple(zip(*other.rows))
            return Mat(fld, tuple(
                tuple(sum(map(lambda x, y: x * y, row, col)) % ell for col in bt)
                for row in self.rows
            ))
        add, mul = fld.add, fld.mul
        bt = tuple(zip(*other.rows))
        out = []
        for row in self.rows:
            orow = []
            for col in bt:
                acc = 0
                for x, y in zip(row, col):
                    acc = add(acc, mul(x, y))
                orow.append(acc)
            out.append(tuple(orow))
        return Mat(fld, tuple(out))

    def __add__(self, other: "Mat") -> "Mat":
        add = self.field.add
        return Mat(self.field, tuple(
            tuple(add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)
        ))

    def __sub__(self, other: "Mat") -> "Mat":
        sub = self.field.sub
        return Mat(self.field, tuple(
            tuple(sub(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)
        ))

    def scale(self, c: int) -> "Mat":
        mul = self.field.mul
        return Mat(self.field, tuple(tuple(mul(c, a) for a in r) for r in self.rows))

    def __pow__(self, e: int) -> "Mat":
        if e < 0:
            return self.inv() ** (-e)
        result = Mat.identity(self.field, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def transpose(self) -> "Mat":
        return Mat(self.field, tuple(zip(*self.rows)))

    def trace(self) -> int:
        acc = 0
        for i in range(self.n):
            acc = self.field.add(acc, self.rows[i][i])
        return acc

    def is_identity(self) -> bool:
        return all(
            self.rows[i][j] == (1 if i == j else 0)
            for i in range(self.n) for j in range(self.n)
        )

    def is_zero(self) -> bool:
        return all(e == 0 for r in self.rows for e in r)

    # -- elimination-based ops ---------------------------------------------------

    def _elim(self):
        """Gaussian elimination; returns (det, inverse rows or None)."""
        fld, n = self.field, self.n
        a = [list(r) for r in self.rows]
        inv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        det = 1
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                return 0, None
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                inv[col], inv[piv] = inv[piv], inv[col]
                det = fld.neg(det)
            p = a[col][col]
            det = fld.mul(det, p)
            pinv = fld.inv(p)
            a[col] = [fld.mul(pinv, x) for x in a[col]]
            inv[col] = [fld.mul(pinv, x) for x in inv[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    c = a[r][col]
                    a[r] = [fld.sub(x, fld.mul(c, y)) for x, y in zip(a[r], a[col])]
                    inv[r] = [fld.sub(x, fld.mul(c, y)) for x, y in zip(inv[r], inv[col])]
        return det, inv

    def det(self) -> int:
        return self._elim()[0]

    def inv(self) -> "Mat":
        det, inv = self._elim()
        if det == 0:
            raise SingularError("matrix is singular")
        return Mat(self.field, tuple(tuple(r) for r in inv))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product (column vector of encoded entries)."""
        fld = self.field
        if fld.f == 1:
            ell = fld.ell
            return tuple(sum(map(lambda x, y: x * y, row, vec)) % ell for row in self.rows)
        out = []
        for row in self.rows:
            acc = 0
            for x, y in zip(row, vec):
                acc = fld.add(acc, fld.mul(x, y))
            out.append(acc)
        return tuple(out)

    # -- dunder ----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.rows == other.rows and self.field == other.field

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Mat({self.rows})"


def mat_order(m: Mat, cap: int) -> int:
    """Least k >= 1 with m^k = 1, or OrderOverflowError if k would exceed cap."""
    if m.det() == 0:
        raise SingularError("matrix is singular; order undefined")
    acc = m
    for k in range(1, cap + 1):
        if acc.is_identity():
            return k
        acc = acc * m
    raise OrderOverflowError(f"order exceeds cap {cap}")


def weil_restrict(m: Mat) -> Mat:
    """View a matrix over F_{ell^f} as an (n*f) x (n*f) matrix over F_ell.

    Each entry alpha becomes the f x f matrix of multiplication by alpha in
    the power basis of the modulus; block (i, j) of the result is the block
    for entry (i, j).  This is a ring homomorphism.
    """
    fld = m.field
    if fld.f == 1:
        return m
    prime = make_field(fld.ell, 1)
    f, n = fld.f, m.n
    blocks = {}
    for a in {e for row in m.rows for e in row}:
        cols = []
        xj = 1  # x^j as field element code
        for _ in range(f):
            cols.append(fld.decode(fld.mul(a, xj)))
            xj = fld.mul(xj, fld.ell)  # code of x is ell
        blocks[a] = tuple(tuple(cols[j][i] for j in range(f)) for i in range(f))
    big = [[0] * (n * f) for _ in range(n * f)]
    for i in range(n):
        for j in range(n):
            blk = blocks[m.rows[i][j]]
            for bi in range(f):
                for bj in range(f):
                    big[i * f + bi][j * f + bj] = blk[bi][bj]
    return Mat(prime, tuple(tuple(r) for r in big))


def gl_order(q: int, n: int) -> int:
    """|GL_n(F_q)|, used by divisibility property checks."""
    qn = q**n
    out = 1
    for i in range(n):
        out *= qn - q**i
    return out
