"""Closure-engine selection: compiled kernel when usable, pure Python otherwise.

The compiled kernel (`norirank._speedups`) packs an n x n matrix over F_q into
one 64-bit key (entry (i, j) at bit (i*n + j)*b, b = bitlength(q - 1)) and
needs q <= gf.TABLE_Q_MAX for its flat field tables.  Outside that regime, or
when the extension failed to build, the pure engine runs the identical
algorithms on Mat objects.  Both expose the same surface, so everything above
this module is engine-agnostic.

NORI_RANK_THREADS caps internal parallelism; the current kernels are
single-threaded, so any value >= 1 is equivalent.
"""

from __future__ import annotations

import os
from typing import Optional, Sequence

import numpy as np

from . import _fallback
from .gf import TABLE_Q_MAX, Field, Mat

try:
    from . import _speedups

    HAVE_SPEEDUPS = True
except ImportError:  # pragma: no cover - depends on build environment
    _speedups = None
    HAVE_SPEEDUPS = False

THREAD_CAP = max(1, int(os.environ.get("NORI_RANK_THREADS", "1") or 1))


class Store:
    """Finished enumeration: keys in insertion order + membership + gens."""

    __slots__ = ("keys", "_contains", "gens", "order")

    def __init__(self, keys, contains, gens):
        self.keys = keys
        self._contains = contains
        self.gens = list(gens)
        self.order = len(keys)

    def __contains__(self, k) -> bool:
        return self._contains(k)

    def __len__(self) -> int:
        return self.order


class _KernelClasses:
    def __init__(self, reps, sizes, offsets, grouped, cid):
        self.reps = reps
        self.sizes = sizes
        self._offsets = offsets
        self._grouped = grouped
        self._cid = cid

    def class_of(self, key) -> int:
        return self._cid.get_py(key)

    def member(self, cid: int, idx: int):
        return int(self._grouped[self._offsets[cid] + idx])

    def __len__(self) -> int:
        return len(self.reps)


class KernelEngine:
    """Packed-key engine backed by the compiled module."""

    kind = "kernel"

    def __init__(self, field: Field, n: int):
        self.field = field
        self.n = n
        self.bits = max(1, (field.q - 1).bit_length())
        mul, add, _ = field.tables()
        ident = Mat.identity(field, n)
        self._shifts = np.array(
            [(i * n + j) * self.bits for i in range(n) for j in range(n)],
            dtype=np.uint64,
        )
        self._mask = np.uint64((1 << self.bits) - 1)
        self.identity_key = self.key(ident)
        self.ctx = _speedups.Ctx(n, self.bits, field.q, mul, add, self.identity_key)

    # -- key conversion --------------------------------------------------------

    def key(self, mat: Mat) -> int:
        k, shift = 0, 0
        for row in mat.rows:
            for e in row:
                k |= e << shift
                shift += self.bits
        return k

    def mat(self, key: int) -> Mat:
        n, bits = self.n, self.bits
        mask = (1 << bits) - 1
        rows = []
        for i in range(n):
            rows.append(tuple((key >> ((i * n + j) * bits)) & mask for j in range(n)))
        return Mat(self.field, tuple(rows))

    def decode_batch(self, keys) -> np.ndarray:
        arr = np.asarray(keys, dtype=np.uint64)
        out = (arr[:, None] >> self._shifts[None, :]) & self._mask
        return out.astype(np.int64).reshape(len(arr), self.n, self.n)

    # -- arithmetic --------------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return _speedups.key_mul_py(self.ctx, a, b)

    def pow(self, a: int, e: int) -> int:
        return _speedups.key_pow_py(self.ctx, a, e)

    def inv_key(self, k: int) -> int:
        return self.key(self.mat(k).inv())

    # -- closure ops ----------------------------------------------------------------

    def state(self, gens: Sequence[int] = ()):
        st = _speedups.ClosureState(self.ctx, list(gens))
        return st

    def store_from_state(self, st) -> Store:
        return Store(st.elements(), st.contains, st.gens)

    def classes(self, keys, conj_keys: Sequence[int]):
        conj = np.array(list(conj_keys), dtype=np.uint64)
        conj_inv = np.array([self.inv_key(c) for c in conj_keys], dtype=np.uint64)
        return _KernelClasses(*_speedups.conj_classes(self.ctx, keys, conj, conj_inv))

    def order_ell_elements(self, keys, ell: int):
        return _speedups.filter_order_ell(self.ctx, keys, ell)

    def central_elements(self, keys, gens: Sequence[int]):
        return _speedups.filter_central(
            self.ctx, keys, np.array(list(gens), dtype=np.uint64)
        )


class PyEngine:
    """Pure-Python engine; keys are Mat objects themselves."""

    kind = "pure"

    def __init__(self, field: Field, n: int):
        self.field = field
        self.n = n
        self.identity_key = Mat.identity(field, n)

    def key(self, mat: Mat) -> Mat:
        return mat

    def mat(self, key: Mat) -> Mat:
        return key

    def decode_batch(self, keys) -> np.ndarray:
        out = np.empty((len(keys), self.n, self.n), dtype=np.int64)
        for i, k in enumerate(keys):
            out[i] = k.rows
        return out

    def mul(self, a: Mat, b: Mat) -> Mat:
        return a * b

    def pow(self, a: Mat, e: int) -> Mat:
        return a**e

    def inv_key(self, k: Mat) -> Mat:
        return k.inv()

    def state(self, gens: Sequence[Mat] = ()):
        return _fallback.ClosureState(self.mul, self.identity_key, gens)

    def store_from_state(self, st) -> Store:
        return Store(st.elements(), st.contains, st.gens)

    def classes(self, keys, conj_keys: Sequence[Mat]):
        pairs = [(c, c.inv()) for c in conj_keys]
        return _fallback.conj_classes(self.mul, keys, pairs)

    def order_ell_elements(self, keys, ell: int):
        return _fallback.filter_order_ell(self.mul, self.identity_key, keys, ell)

    def central_elements(self, keys, gens: Sequence[Mat]):
        return _fallback.filter_central(self.mul, keys, list(gens))


Engine = KernelEngine | PyEngine

_ENGINES: dict = {}


def kernel_fits(field: Field, n: int) -> bool:
    bits = max(1, (field.q - 1).bit_length())
    return HAVE_SPEEDUPS and field.q <= TABLE_Q_MAX and n * n * bits <= 64


def engine_for(field: Field, n: int, force_pure: bool = False) -> Engine:
    key = (field, n, bool(force_pure))
    eng = _ENGINES.get(key)
    if eng is None:
        if not force_pure and kernel_fits(field, n):
            eng = KernelEngine(field, n)
        else:
            eng = PyEngine(field, n)
        _ENGINES[key] = eng
    return eng


def closure(engine: Engine, gens, cap: int) -> Optional[Store]:
    """Subgroup closure of the generators; None once the cap is exceeded."""
    st = engine.state(gens)
    if not st.run(cap):
        return None
    return engine.store_from_state(st)


def normal_closure(engine: Engine, seeds, conj_keys, cap: int) -> Optional[Store]:
    """Normal closure of seeds under the group the conjugators generate.

    Conjugating the generating set suffices: if every generator's conjugate
    stays inside, the closure is conjugation-stable easily; in a finite group
    equality follows from the order.  None once the cap is exceeded.
    """
    pairs = [(c, engine.inv_key(c)) for c in conj_keys]
    st = engine.state(seeds)
    while True:
        if not st.run(cap):
            return None
        escaped = []
        for s in st.gens:
            for c, ci in pairs:
                t = engine.mul(ci, engine.mul(s, c))
                if not st.contains(t):
                    escaped.append(t)
        if not escaped:
            return engine.store_from_state(st)
        st.add_gens(escaped)
