"""The built-in instance corpus: full groups, their standard proper
subgroups, Weil restrictions, and the rational-matrix lattice examples.

Generator choices are frozen here after being verified against the order
formulas (tests assert the orders); every instance carries the ambient
declaration the certificates are checked against.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional

from .certify import RationalMat
from .gf import Field, Mat, make_field, weil_restrict
from .grp import GroupInstance
from .lietypes import AmbientSpec, LieTypeTag


def _ambient(field: Field, *factors: tuple[str, int], sc: bool = True, extra: int = 0) -> AmbientSpec:
    return AmbientSpec(tuple(LieTypeTag(f, r) for f, r in factors), sc, field, extra)


def _primitive_root(ell: int) -> int:
    for g in range(2, ell):
        seen, x = set(), 1
        for _ in range(ell - 1):
            x = x * g % ell
            seen.add(x)
        if len(seen) == ell - 1:
            return g
    raise AssertionError("no primitive root found")


def sl2(ell: int, f: int = 1) -> GroupInstance:
    """SL_2(F_{ell^f}): root-group generators over the prime subfield plus,
    for extensions, the same with the generator x of the field."""
    F = make_field(ell, f)
    gens = [Mat(F, [[1, 1], [0, 1]]), Mat(F, [[1, 0], [1, 1]])]
    if f > 1:
        x = F.encode([0, 1])
        gens += [Mat(F, [[1, x], [0, 1]]), Mat(F, [[1, 0], [x, 1]])]
    return GroupInstance(F, 2, tuple(gens), _ambient(F, ("A", 1)), f"sl2_{ell}^{f}" if f > 1 else f"sl2_{ell}")


def sl2_weil(ell: int, f: int = 2) -> GroupInstance:
    """SL_2(F_{ell^f}) Weil restricted into GL_{2f}(F_ell); the ambient still
    refers to SL_2 over the extension field."""
    inner = sl2(ell, f)
    F = make_field(ell, 1)
    gens = tuple(weil_restrict(m) for m in inner.generators)
    return GroupInstance(F, 2 * f, gens, _ambient(inner.field, ("A", 1)), f"sl2weil_{ell}^{f}")


def sl3(ell: int) -> GroupInstance:
    """SL_3(F_ell) = < elementary transvection, signed 3-cycle >."""
    F = make_field(ell)
    gens = (
        Mat(F, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
        Mat(F, [[0, 0, 1], [1, 0, 0], [0, 1, 0]]),
    )
    return GroupInstance(F, 3, gens, _ambient(F, ("A", 2)), f"sl3_{ell}")


def borel2(ell: int) -> GroupInstance:
    F = make_field(ell)
    g = _primitive_root(ell)
    gens = (Mat(F, [[1, 1], [0, 1]]), Mat.diagonal(F, (g, pow(g, ell - 2, ell))))
    return GroupInstance(F, 2, gens, _ambient(F, ("A", 1)), f"borel2_{ell}")


def torus2(ell: int) -> GroupInstance:
    F = make_field(ell)
    g = _primitive_root(ell)
    gens = (Mat.diagonal(F, (g, pow(g, ell - 2, ell))),)
    return GroupInstance(F, 2, gens, _ambient(F, ("A", 1)), f"torus2_{ell}")


def unipotent2(ell: int) -> GroupInstance:
    F = make_field(ell)
    return GroupInstance(
        F, 2, (Mat(F, [[1, 1], [0, 1]]),), _ambient(F, ("A", 1)), f"unip2_{ell}"
    )


def borel3(ell: int) -> GroupInstance:
    F = make_field(ell)
    g = _primitive_root(ell)
    gi = pow(g, ell - 2, ell)
    gens = (
        Mat(F, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
        Mat(F, [[1, 0, 0], [0, 1, 1], [0, 0, 1]]),
        Mat.diagonal(F, (g, gi, 1)),
        Mat.diagonal(F, (1, g, gi)),
    )
    return GroupInstance(F, 3, gens, _ambient(F, ("A", 2)), f"borel3_{ell}")


def torus3(ell: int) -> GroupInstance:
    F = make_field(ell)
    g = _primitive_root(ell)
    gi = pow(g, ell - 2, ell)
    gens = (Mat.diagonal(F, (g, gi, 1)), Mat.diagonal(F, (1, g, gi)))
    return GroupInstance(F, 3, gens, _ambient(F, ("A", 2)), f"torus3_{ell}")


def unipotent3(ell: int) -> GroupInstance:
    """Heisenberg group of upper unitriangular matrices."""
    F = make_field(ell)
    gens = (
        Mat(F, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
        Mat(F, [[1, 0, 0], [0, 1, 1], [0, 0, 1]]),
    )
    return GroupInstance(F, 3, gens, _ambient(F, ("A", 2)), f"unip3_{ell}")


def levi3(ell: int) -> GroupInstance:
    """GL_2 Levi block {diag(A, det(A)^-1)} inside SL_3."""
    F = make_field(ell)
    g = _primitive_root(ell)
    gens = (
        Mat(F, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
        Mat(F, [[1, 0, 0], [1, 1, 0], [0, 0, 1]]),
        Mat.diagonal(F, (g, 1, pow(g, ell - 2, ell))),
    )
    return GroupInstance(F, 3, gens, _ambient(F, ("A", 2)), f"levi3_{ell}")


def parabolic3(ell: int) -> GroupInstance:
    """Maximal parabolic (2,1 block upper triangular) of SL_3."""
    levi = levi3(ell)
    F = levi.field
    gens = levi.generators + (
        Mat(F, [[1, 0, 1], [0, 1, 0], [0, 0, 1]]),
        Mat(F, [[1, 0, 0], [0, 1, 1], [0, 0, 1]]),
    )
    return GroupInstance(F, 3, gens, _ambient(F, ("A", 2)), f"parabolic3_{ell}")


def principal3(ell: int) -> GroupInstance:
    """Image of SL_2 in SL_3 via the symmetric square (a principal PSL_2)."""
    F = make_field(ell)
    half = pow(2, ell - 2, ell)
    # Sym^2 of [[1,1],[0,1]] and [[1,0],[1,1]] in the basis x^2, xy, y^2,
    # rescaled so entries stay integral: use basis x^2, 2xy, y^2.
    up = Mat(F, [[1, 2, 1], [0, 1, 1], [0, 0, 1]])
    lo = Mat(F, [[1, 0, 0], [1, 1, 0], [1, 2, 1]])
    gens = (up, lo)
    return GroupInstance(F, 3, gens, _ambient(F, ("A", 2)), f"principal3_{ell}")


def block22(ell: int, mismatch_ambient: bool = False) -> GroupInstance:
    """SL_2 x SL_2 block diagonal inside SL_4.  With mismatch_ambient the
    declaration is the full SL_4, which the certificates must not certify."""
    F = make_field(ell)

    def emb(rows, off):
        m = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
        for i in range(2):
            for j in range(2):
                m[off + i][off + j] = rows[i][j]
        return Mat(F, m)

    gens = (
        emb([[1, 1], [0, 1]], 0),
        emb([[1, 0], [1, 1]], 0),
        emb([[1, 1], [0, 1]], 2),
        emb([[1, 0], [1, 1]], 2),
    )
    if mismatch_ambient:
        amb = _ambient(F, ("A", 3))
        return GroupInstance(F, 4, gens, amb, f"block22_as_sl4_{ell}")
    amb = _ambient(F, ("A", 1), ("A", 1))
    return GroupInstance(F, 4, gens, amb, f"block22_{ell}")


def _symplectic_form(F: Field) -> Mat:
    m1 = F.ell - 1
    return Mat(F, [[0, 0, 0, 1], [0, 0, 1, 0], [0, m1, 0, 0], [m1, 0, 0, 0]])


def symplectic_transvection(F: Field, v: tuple[int, ...], lam: int = 1) -> Mat:
    """x -> x + lam * Omega(x, v) * v for the standard antidiagonal form."""
    jv = _symplectic_form(F).apply(v)
    return Mat(F, tuple(
        tuple(F.add(1 if i == j else 0, F.mul(lam, F.mul(v[i], jv[j]))) for j in range(4))
        for i in range(4)
    ))


def sp4(ell: int) -> GroupInstance:
    """Sp_4(F_ell), generated by four symplectic transvections (the orders
    are asserted against the Chevalley formula in the tests)."""
    F = make_field(ell)
    gens = tuple(
        symplectic_transvection(F, v)
        for v in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 1, 0, 1)]
    )
    return GroupInstance(F, 4, gens, _ambient(F, ("C", 2)), f"sp4_{ell}")


# --- rational instances for the lattice front door --------------------------------

def lattice_conjugated_unipotents() -> list[RationalMat]:
    """SL_2(Z[1/7]) generators preserving a non-standard lattice at 7."""
    return [
        RationalMat([[1, Fraction(1, 7)], [0, 1]]),
        RationalMat([[1, 0], [7, 1]]),
    ]


def lattice_noncompact() -> list[RationalMat]:
    return [RationalMat([[5, 0], [0, Fraction(1, 5)]])]


_BUILDERS: dict[str, Callable[[], GroupInstance]] = {}


def _register(name: str, fn: Callable[[], GroupInstance]) -> None:
    _BUILDERS[name] = fn


for _ell in (5, 7, 11, 13):
    _register(f"sl2_{_ell}", (lambda e: lambda: sl2(e))(_ell))
    _register(f"borel2_{_ell}", (lambda e: lambda: borel2(e))(_ell))
    _register(f"torus2_{_ell}", (lambda e: lambda: torus2(e))(_ell))
    _register(f"unip2_{_ell}", (lambda e: lambda: unipotent2(e))(_ell))
for _ell in (5, 7, 11):
    _register(f"sl3_{_ell}", (lambda e: lambda: sl3(e))(_ell))
    _register(f"borel3_{_ell}", (lambda e: lambda: borel3(e))(_ell))
    _register(f"torus3_{_ell}", (lambda e: lambda: torus3(e))(_ell))
    _register(f"unip3_{_ell}", (lambda e: lambda: unipotent3(e))(_ell))
    _register(f"levi3_{_ell}", (lambda e: lambda: levi3(e))(_ell))
    _register(f"parabolic3_{_ell}", (lambda e: lambda: parabolic3(e))(_ell))
    _register(f"principal3_{_ell}", (lambda e: lambda: principal3(e))(_ell))
    _register(f"block22_{_ell}", (lambda e: lambda: block22(e))(_ell))
_register("sl2ext_5_2", lambda: sl2(5, 2))
_register("sl2ext_7_2", lambda: sl2(7, 2))
_register("sl2weil_5_2", lambda: sl2_weil(5, 2))
_register("sl2weil_7_2", lambda: sl2_weil(7, 2))
_register("sp4_5", lambda: sp4(5))
_register("block22_as_sl4_7", lambda: block22(7, mismatch_ambient=True))


def instance(name: str) -> GroupInstance:
    return _BUILDERS[name]()


def names() -> list[str]:
    return sorted(_BUILDERS)
