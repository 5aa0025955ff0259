"""Pure-Python twin of the compiled closure kernels.

Everything here is generic over an associative multiplication on hashable
keys, so the same code serves packed integer keys and Mat objects.  The
compiled module `norirank._speedups` implements the identical contracts for
packed 64-bit keys; `norirank.engine` picks one at import time.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence


class ClosureState:
    """Incremental subgroup closure under right multiplication.

    Maintains the closure of the identity under the current generator list;
    generators may be added between runs and only the new columns are
    reprocessed.  A finite group's positive words suffice, so inverses are
    never needed.
    """

    def __init__(self, mul: Callable, identity: Hashable, gens: Iterable = ()):
        self._mul = mul
        self.identity = identity
        self.elems: list = [identity]
        self.index: dict = {identity: 0}
        self._processed = [0]
        self.gens: list = []
        self._genset: set = set()
        self.add_gens(gens)

    def add_gens(self, new: Iterable) -> None:
        for g in new:
            if g not in self._genset:
                self._genset.add(g)
                self.gens.append(g)

    def run(self, cap: int) -> bool:
        """Close under the current generators; False once size exceeds cap."""
        mul = self._mul
        elems, index, processed = self.elems, self.index, self._processed
        gens = self.gens
        ng = len(gens)
        i = 0
        while i < len(elems):
            p = processed[i]
            if p < ng:
                e = elems[i]
                for gi in range(p, ng):
                    y = mul(e, gens[gi])
                    if y not in index:
                        index[y] = len(elems)
                        elems.append(y)
                        processed.append(0)
                        if len(elems) > cap:
                            return False
                processed[i] = ng
            i += 1
        return True

    def contains(self, k) -> bool:
        return k in self.index

    def __len__(self) -> int:
        return len(self.elems)

    def elements(self) -> list:
        return list(self.elems)


def close_normally(
    mul: Callable,
    identity: Hashable,
    seeds: Sequence,
    conj_pairs: Sequence[tuple],
    cap: int,
):
    """Smallest subgroup containing seeds and normalized by the group the
    conjugator pairs generate.  Returns the ClosureState, or None past cap.

    conj_pairs are (c, c_inverse); conjugating the generating set suffices
    because an automorphism image of the closure is the closure of the image.
    """
    st = ClosureState(mul, identity, seeds)
    while True:
        if not st.run(cap):
            return None
        escaped = []
        for s in st.gens:
            for c, ci in conj_pairs:
                t = mul(ci, mul(s, c))
                if not st.contains(t):
                    escaped.append(t)
        if not escaped:
            return st
        st.add_gens(escaped)


class ClassData:
    """Conjugacy class partition of an element list."""

    def __init__(self, reps: list, sizes: list, cid_of: dict, members: list):
        self.reps = reps
        self.sizes = sizes
        self._cid_of = cid_of
        self._members = members

    def class_of(self, key) -> int:
        return self._cid_of[key]

    def member(self, cid: int, idx: int):
        return self._members[cid][idx]

    def __len__(self) -> int:
        return len(self.reps)


def conj_classes(
    mul: Callable, elems: Sequence, conj_pairs: Sequence[tuple]
) -> ClassData:
    cid_of: dict = {}
    reps, sizes, members = [], [], []
    for e in elems:
        if e in cid_of:
            continue
        cid = len(reps)
        cid_of[e] = cid
        queue = [e]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for c, ci in conj_pairs:
                y = mul(ci, mul(x, c))
                if y not in cid_of:
                    cid_of[y] = cid
                    queue.append(y)
        reps.append(e)
        sizes.append(len(queue))
        members.append(queue)
    return ClassData(reps, sizes, cid_of, members)


def key_pow(mul: Callable, identity, a, e: int):
    result = identity
    base = a
    while e:
        if e & 1:
            result = mul(result, base)
        base = mul(base, base)
        e >>= 1
    return result


def filter_order_ell(mul: Callable, identity, elems: Sequence, ell: int) -> list:
    """Keys of exact order ell (ell prime, so x != 1 and x^ell = 1)."""
    out = []
    for e in elems:
        if e != identity and key_pow(mul, identity, e, ell) == identity:
            out.append(e)
    return out


def filter_central(mul: Callable, elems: Sequence, gens: Sequence) -> list:
    out = []
    for e in elems:
        if all(mul(e, g) == mul(g, e) for g in gens):
            out.append(e)
    return out
