# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled closure kernels over packed matrix keys.

A matrix over F_q (q <= 256) with side n and b bits per entry packs into one
unsigned 64-bit key when n*n*b <= 64.  Entry (i, j) sits at bit (i*n + j)*b.
Because q is always odd here, the all-ones key can never be a valid matrix,
so 2^64 - 1 serves as the hash-table sentinel even at full 64-bit width.

The contracts mirror norirank._fallback exactly; see that module for the
algorithmic comments.
"""

import numpy as np

ctypedef unsigned long long u64

cdef u64 EMPTY = <u64>0xFFFFFFFFFFFFFFFFULL


cdef inline u64 _mix(u64 z) noexcept:
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef class Ctx:
    """Packing context: side, bits per entry, and flat field tables."""
    cdef public int n, bits, q
    cdef object _mul_obj, _add_obj
    cdef const int[::1] mul
    cdef const int[::1] add
    cdef u64 emask
    cdef public u64 identity

    def __init__(self, int n, int bits, int q, mul_table, add_table, identity):
        self.n = n
        self.bits = bits
        self.q = q
        self._mul_obj = np.ascontiguousarray(mul_table, dtype=np.int32)
        self._add_obj = np.ascontiguousarray(add_table, dtype=np.int32)
        self.mul = self._mul_obj
        self.add = self._add_obj
        self.emask = (<u64>1 << bits) - 1
        self.identity = identity


cdef inline u64 key_mul(Ctx ctx, u64 a, u64 b) noexcept:
    cdef int n = ctx.n, bits = ctx.bits, q = ctx.q
    cdef u64 emask = ctx.emask
    cdef u64 out = 0
    cdef int i, j, k, acc, x, y
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                x = <int>((a >> ((i * n + k) * bits)) & emask)
                y = <int>((b >> ((k * n + j) * bits)) & emask)
                acc = ctx.add[acc * q + ctx.mul[x * q + y]]
            out |= (<u64>acc) << ((i * n + j) * bits)
    return out


cdef inline u64 key_pow(Ctx ctx, u64 a, long e) noexcept:
    cdef u64 result = ctx.identity
    cdef u64 base = a
    while e:
        if e & 1:
            result = key_mul(ctx, result, base)
        base = key_mul(ctx, base, base)
        e >>= 1
    return result


cdef class KeyTable:
    """Open-addressing hash set of u64 keys (linear probing)."""
    cdef u64[::1] keys
    cdef object _keys_obj
    cdef Py_ssize_t cap, used
    cdef u64 mask

    def __init__(self, Py_ssize_t initial=8192):
        cdef Py_ssize_t c = 64
        while c < initial:
            c <<= 1
        self._keys_obj = np.full(c, EMPTY, dtype=np.uint64)
        self.keys = self._keys_obj
        self.cap = c
        self.mask = <u64>(c - 1)
        self.used = 0

    cdef void _grow(self):
        cdef object old_obj = self._keys_obj
        cdef u64[::1] old = self.keys
        cdef Py_ssize_t oldcap = self.cap, i
        cdef u64 k, h
        self.cap <<= 2
        self._keys_obj = np.full(self.cap, EMPTY, dtype=np.uint64)
        self.keys = self._keys_obj
        self.mask = <u64>(self.cap - 1)
        for i in range(oldcap):
            k = old[i]
            if k != EMPTY:
                h = _mix(k) & self.mask
                while self.keys[h] != EMPTY:
                    h = (h + 1) & self.mask
                self.keys[h] = k

    cdef bint insert(self, u64 k):
        """True if k was absent and is now inserted."""
        cdef u64 h
        if self.used * 5 >= self.cap * 3:
            self._grow()
        h = _mix(k) & self.mask
        while True:
            if self.keys[h] == k:
                return False
            if self.keys[h] == EMPTY:
                self.keys[h] = k
                self.used += 1
                return True
            h = (h + 1) & self.mask

    cdef bint has(self, u64 k):
        cdef u64 h = _mix(k) & self.mask
        while True:
            if self.keys[h] == k:
                return True
            if self.keys[h] == EMPTY:
                return False
            h = (h + 1) & self.mask

    def contains(self, k) -> bool:
        return self.has(<u64>k)

    def __len__(self):
        return self.used


cdef class ValTable:
    """Open-addressing map u64 -> int64."""
    cdef u64[::1] keys
    cdef long long[::1] vals
    cdef object _keys_obj, _vals_obj
    cdef Py_ssize_t cap, used
    cdef u64 mask

    def __init__(self, Py_ssize_t initial=8192):
        cdef Py_ssize_t c = 64
        while c < initial:
            c <<= 1
        self._keys_obj = np.full(c, EMPTY, dtype=np.uint64)
        self._vals_obj = np.zeros(c, dtype=np.int64)
        self.keys = self._keys_obj
        self.vals = self._vals_obj
        self.cap = c
        self.mask = <u64>(c - 1)
        self.used = 0

    cdef void _grow(self):
        cdef u64[::1] oldk = self.keys
        cdef long long[::1] oldv = self.vals
        cdef Py_ssize_t oldcap = self.cap, i
        cdef u64 k, h
        self.cap <<= 2
        self._keys_obj = np.full(self.cap, EMPTY, dtype=np.uint64)
        self._vals_obj = np.zeros(self.cap, dtype=np.int64)
        self.keys = self._keys_obj
        self.vals = self._vals_obj
        self.mask = <u64>(self.cap - 1)
        for i in range(oldcap):
            k = oldk[i]
            if k != EMPTY:
                h = _mix(k) & self.mask
                while self.keys[h] != EMPTY:
                    h = (h + 1) & self.mask
                self.keys[h] = k
                self.vals[h] = oldv[i]

    cdef bint set_if_absent(self, u64 k, long long v):
        cdef u64 h
        if self.used * 5 >= self.cap * 3:
            self._grow()
        h = _mix(k) & self.mask
        while True:
            if self.keys[h] == k:
                return False
            if self.keys[h] == EMPTY:
                self.keys[h] = k
                self.vals[h] = v
                self.used += 1
                return True
            h = (h + 1) & self.mask

    cdef long long get(self, u64 k):
        cdef u64 h = _mix(k) & self.mask
        while True:
            if self.keys[h] == k:
                return self.vals[h]
            if self.keys[h] == EMPTY:
                return -1
            h = (h + 1) & self.mask

    def get_py(self, k) -> int:
        return self.get(<u64>k)

    def __len__(self):
        return self.used


cdef class ClosureState:
    """Incremental subgroup closure; same contract as the fallback class."""
    cdef Ctx ctx
    cdef KeyTable table
    cdef u64[::1] elems
    cdef unsigned short[::1] processed
    cdef object _elems_obj, _proc_obj
    cdef Py_ssize_t n_elems, alloc
    cdef public list gens
    cdef set _genset

    def __init__(self, Ctx ctx, gens=()):
        self.ctx = ctx
        self.table = KeyTable()
        self.alloc = 4096
        self._elems_obj = np.empty(self.alloc, dtype=np.uint64)
        self._proc_obj = np.zeros(self.alloc, dtype=np.uint16)
        self.elems = self._elems_obj
        self.processed = self._proc_obj
        self.n_elems = 0
        self.gens = []
        self._genset = set()
        self._append(ctx.identity)
        self.table.insert(ctx.identity)
        self.add_gens(gens)

    cdef void _append(self, u64 k):
        cdef object new_e, new_p
        if self.n_elems >= self.alloc:
            self.alloc <<= 1
            new_e = np.empty(self.alloc, dtype=np.uint64)
            new_p = np.zeros(self.alloc, dtype=np.uint16)
            new_e[: self.n_elems] = self._elems_obj[: self.n_elems]
            new_p[: self.n_elems] = self._proc_obj[: self.n_elems]
            self._elems_obj = new_e
            self._proc_obj = new_p
            self.elems = self._elems_obj
            self.processed = self._proc_obj
        self.elems[self.n_elems] = k
        self.processed[self.n_elems] = 0
        self.n_elems += 1

    def add_gens(self, new):
        cdef u64 g
        for k in new:
            g = <u64>k
            if g not in self._genset:
                self._genset.add(g)
                self.gens.append(int(g))
        if len(self.gens) > 60000:
            raise ValueError("generator list too long for closure state")

    def run(self, cap) -> bool:
        cdef Py_ssize_t limit = <Py_ssize_t>cap
        cdef Py_ssize_t i = 0
        cdef int ng = len(self.gens), p, gi
        cdef u64 e, y
        cdef object g_arr = np.array(self.gens, dtype=np.uint64)
        cdef u64[::1] gens = g_arr
        while i < self.n_elems:
            p = self.processed[i]
            if p < ng:
                e = self.elems[i]
                for gi in range(p, ng):
                    y = key_mul(self.ctx, e, gens[gi])
                    if self.table.insert(y):
                        self._append(y)
                        if self.n_elems > limit:
                            return False
                self.processed[i] = ng
            i += 1
        return True

    def contains(self, k) -> bool:
        return self.table.has(<u64>k)

    def __len__(self):
        return self.n_elems

    def elements(self):
        return np.array(self._elems_obj[: self.n_elems], dtype=np.uint64)


def conj_classes(Ctx ctx, elems_arr, conj_arr, conj_inv_arr):
    """Partition elems into conjugacy classes under the listed conjugators.

    Returns (reps, sizes, offsets, grouped, cid_table): grouped is elems
    reordered class-by-class, offsets[i] the start of class i, cid_table a
    ValTable mapping key -> class id.
    """
    cdef u64[::1] elems = np.ascontiguousarray(elems_arr, dtype=np.uint64)
    cdef u64[::1] conj = np.ascontiguousarray(conj_arr, dtype=np.uint64)
    cdef u64[::1] conj_inv = np.ascontiguousarray(conj_inv_arr, dtype=np.uint64)
    cdef Py_ssize_t nel = elems.shape[0]
    cdef int nc = conj.shape[0]
    cdef ValTable cid = ValTable(initial=max(8192, nel * 2))
    cdef object grouped_obj = np.empty(nel, dtype=np.uint64)
    cdef u64[::1] grouped = grouped_obj
    cdef Py_ssize_t pos = 0, qi, start
    cdef long long c = 0
    cdef Py_ssize_t idx
    cdef int t
    cdef u64 e, x, y
    reps, sizes, offsets = [], [], []
    for idx in range(nel):
        e = elems[idx]
        if cid.get(e) >= 0:
            continue
        start = pos
        cid.set_if_absent(e, c)
        grouped[pos] = e
        pos += 1
        qi = start
        while qi < pos:
            x = grouped[qi]
            qi += 1
            for t in range(nc):
                y = key_mul(ctx, key_mul(ctx, conj_inv[t], x), conj[t])
                if cid.set_if_absent(y, c):
                    grouped[pos] = y
                    pos += 1
        reps.append(int(e))
        sizes.append(int(pos - start))
        offsets.append(int(start))
        c += 1
    return reps, sizes, offsets, grouped_obj, cid


def filter_order_ell(Ctx ctx, elems_arr, long ell):
    cdef u64[::1] elems = np.ascontiguousarray(elems_arr, dtype=np.uint64)
    cdef Py_ssize_t i, nel = elems.shape[0], pos = 0
    cdef object out_obj = np.empty(nel, dtype=np.uint64)
    cdef u64[::1] out = out_obj
    cdef u64 e, ident = ctx.identity
    for i in range(nel):
        e = elems[i]
        if e != ident and key_pow(ctx, e, ell) == ident:
            out[pos] = e
            pos += 1
    return np.array(out_obj[:pos], dtype=np.uint64)


def filter_central(Ctx ctx, elems_arr, gens_arr):
    cdef u64[::1] elems = np.ascontiguousarray(elems_arr, dtype=np.uint64)
    cdef u64[::1] gens = np.ascontiguousarray(gens_arr, dtype=np.uint64)
    cdef Py_ssize_t i, nel = elems.shape[0], pos = 0
    cdef int t, ng = gens.shape[0]
    cdef object out_obj = np.empty(nel, dtype=np.uint64)
    cdef u64[::1] out = out_obj
    cdef u64 e
    cdef bint ok
    for i in range(nel):
        e = elems[i]
        ok = True
        for t in range(ng):
            if key_mul(ctx, e, gens[t]) != key_mul(ctx, gens[t], e):
                ok = False
                break
        if ok:
            out[pos] = e
            pos += 1
    return np.array(out_obj[:pos], dtype=np.uint64)


def key_mul_py(Ctx ctx, a, b):
    return int(key_mul(ctx, <u64>a, <u64>b))


def key_pow_py(Ctx ctx, a, e):
    return int(key_pow(ctx, <u64>a, <long>e))
