import random

import pytest

from norirank import corpus
from norirank.errors import CapExceededError, DomainTooLargeError
from norirank.gf import Mat, gl_order, make_field
from norirank.grp import (
    GroupInstance,
    composition_series,
    enumerate_group,
    group_order,
    plus_subgroup,
)
from norirank.lietypes import LieTypeTag, chevalley_order


def sl2(F):
    return GroupInstance(F, 2, (Mat(F, [[1, 1], [0, 1]]), Mat(F, [[1, 0], [1, 1]])))


# --- enumerate ---------------------------------------------------------------

def test_enumerate_trivial(F7):
    e = enumerate_group(GroupInstance(F7, 2, (Mat.identity(F7, 2),)))
    assert e.order == 1


def test_enumerate_sl2_5(F5):
    # BFS count must equal the order formula 5*(5^2 - 1).
    e = enumerate_group(sl2(F5))
    assert e.order == 120 == 5 * (5**2 - 1)


def test_enumerate_sl2_7(F7):
    e = enumerate_group(sl2(F7))
    assert e.order == 336 == 7 * (7**2 - 1)


def test_enumerate_cap_exceeded(F7):
    with pytest.raises(CapExceededError):
        enumerate_group(sl2(F7), cap=100)


def test_enumerate_closed_under_product_and_inverse(F5):
    e = enumerate_group(sl2(F5))
    mats = list(e.matrices())
    rng = random.Random(1)
    for _ in range(50):
        a, b = rng.choice(mats), rng.choice(mats)
        assert (a * b) in e
        assert a.inv() in e
    assert Mat.identity(F5, 2) in e


def test_enumerate_order_divides_gl_order(F5, F25):
    for inst in (sl2(F5), corpus.sl2(5, 2), corpus.borel2(5)):
        e = enumerate_group(inst)
        assert gl_order(inst.field.q, inst.n) % e.order == 0


def test_enumerate_pure_matches_kernel(F5):
    assert enumerate_group(sl2(F5), force_pure=True).order == enumerate_group(sl2(F5)).order


# --- group_order ------------------------------------------------------------------

def test_group_order_matches_enumeration_on_corpus():
    for name in ("sl2_5", "sl2_7", "borel2_7", "torus2_7", "levi3_7",
                 "principal3_7", "sl2ext_5_2", "sl2weil_5_2"):
        inst = corpus.instance(name)
        assert group_order(inst) == enumerate_group(inst).order, name


def test_group_order_formulas():
    assert group_order(corpus.sl3(7)) == chevalley_order("SL", 3, 7)
    assert group_order(corpus.sp4(5)) == chevalley_order("Sp", 4, 5)


def test_group_order_diagonal_torus(F7):
    g = GroupInstance(F7, 2, (Mat.diagonal(F7, (3, 5)),))
    assert group_order(g) == 6  # 3 generates F_7^x


def test_group_order_trivial(F7):
    assert group_order(GroupInstance(F7, 2, (Mat.identity(F7, 2),))) == 1


def test_group_order_domain_too_large():
    F = make_field(211)
    g = GroupInstance(F, 3, (Mat.identity(F, 3),))
    with pytest.raises(DomainTooLargeError):
        group_order(g, domain_cap=1000)


# --- plus_subgroup ------------------------------------------------------------------

def test_plus_subgroup_full_group(F7):
    e = enumerate_group(sl2(F7))
    assert plus_subgroup(e, 7).order == 336


def test_plus_subgroup_torus_trivial():
    e = enumerate_group(corpus.torus2(7))
    assert plus_subgroup(e, 7).order == 1


def test_plus_subgroup_borel_unipotent_radical():
    e = enumerate_group(corpus.borel2(7))
    assert e.order == 42
    assert plus_subgroup(e, 7).order == 7


def test_plus_subgroup_is_normal():
    # Exhaustive conjugation test at oracle scale.
    for name in ("borel2_7", "sl2_5", "borel3_5"):
        e = enumerate_group(corpus.instance(name))
        p = plus_subgroup(e, e.field.ell)
        pset = set(p.matrices())
        for h in e.matrices():
            hi = h.inv()
            for u in pset:
                assert (hi * u * h) in pset


# --- composition series ------------------------------------------------------------

def fstr(factors):
    return sorted(str(f) for f in factors)


def test_cs_sl2_5(F5):
    e = enumerate_group(sl2(F5))
    assert fstr(composition_series(e, 5)) == ["A1(f=1)", "C2"]


def test_cs_symmetric_group_3(F7):
    g = GroupInstance(F7, 3, (
        Mat(F7, [[0, 1, 0], [1, 0, 0], [0, 0, 1]]),
        Mat(F7, [[0, 0, 1], [1, 0, 0], [0, 1, 0]]),
    ))
    e = enumerate_group(g)
    assert e.order == 6
    assert fstr(composition_series(e, 7)) == ["C2", "C3"]


def test_cs_weil_restricted_sl2_25():
    e = enumerate_group(corpus.instance("sl2weil_5_2"))
    assert e.order == 15600
    facs = composition_series(e, 5)
    assert fstr(facs) == ["A1(f=2)", "C2"]
    lie = next(f for f in facs if f.kind == "lie_char_ell")
    assert lie.f == 2 and lie.tag == LieTypeTag("A", 1)


def test_cs_extension_field_instance_matches_weil_form():
    a = composition_series(enumerate_group(corpus.instance("sl2ext_5_2")), 5)
    b = composition_series(enumerate_group(corpus.instance("sl2weil_5_2")), 5)
    assert fstr(a) == fstr(b)


def test_cs_cap_exceeded():
    e = enumerate_group(corpus.sl3(5))
    with pytest.raises(CapExceededError):
        composition_series(e, 5, cap=1000)


def test_cs_block_product_additivity():
    # Factors of a block-diagonal product = disjoint union of the factors.
    e1 = enumerate_group(corpus.instance("sl2_7"))
    e2 = enumerate_group(corpus.instance("block22_7"))
    single = fstr(composition_series(e1, 7))
    double = fstr(composition_series(e2, 7))
    assert double == sorted(single + single)


def test_cs_invariant_under_generator_shuffle_and_conjugation(F5):
    base = corpus.sl3(5)
    e = enumerate_group(base)
    ref = fstr(composition_series(e, 5))
    shuffled = GroupInstance(base.field, base.n, tuple(reversed(base.generators)))
    assert fstr(composition_series(enumerate_group(shuffled), 5)) == ref
    c = Mat(F5, [[1, 2, 0], [0, 1, 3], [2, 0, 1]])
    assert c.det() != 0
    conj = base.conjugated(c)
    assert fstr(composition_series(enumerate_group(conj), 5)) == ref


def test_cs_solvable_groups_all_cyclic():
    for name in ("borel2_7", "borel3_5", "unip3_7", "torus3_7"):
        e = enumerate_group(corpus.instance(name))
        facs = composition_series(e, e.field.ell)
        assert all(f.kind == "cyclic" for f in facs), name
        prod = 1
        for f in facs:
            prod *= f.order
        assert prod == e.order


def test_cs_levi_gl2_11():
    # GL_2(11) = SL_2(11) extended by det: factors PSL_2(11), C2 (center),
    # and C2*C5 from the determinant quotient C10.
    e = enumerate_group(corpus.instance("levi3_11"))
    facs = composition_series(e, 11)
    assert fstr(facs) == ["A1(f=1)", "C2", "C2", "C5"]
    prod = 1
    for f in facs:
        prod *= f.order
    assert prod == e.order == (11**2 - 1) * (11**2 - 11)


def test_cs_pure_engine_matches_kernel():
    e_pure = enumerate_group(corpus.sl2(5), force_pure=True)
    e_kern = enumerate_group(corpus.sl2(5))
    assert fstr(composition_series(e_pure, 5)) == fstr(composition_series(e_kern, 5))
