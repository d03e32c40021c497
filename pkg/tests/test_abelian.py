import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clab.abelian import (CircleValue, FinAbGroup, GroupHom, abelian_structure, annihilator,
                          dual_group, hom_enumerate, subgroup_as_group, subgroup_closure, is_subgroup)
from clab.errors import DimensionMismatch, InvalidInput

orders = st.lists(st.integers(1, 6), min_size=0, max_size=3).filter(lambda o: math.prod(o) <= 64)


def test_circle_value_arithmetic():
    a = CircleValue.parse("3/4")
    assert str(a + CircleValue.parse("1/2")) == "1/4"
    assert str(-a) == "1/4"
    assert str(a * 3) == "1/4"
    assert CircleValue.parse("5/4") == CircleValue.of(1, 4)
    assert a.residue(8) == 6
    assert not CircleValue.of(0)


def test_circle_value_residue_needs_divisible_modulus():
    with pytest.raises(InvalidInput):
        CircleValue.parse("1/3").residue(4)


def test_trivial_group_forms():
    assert FinAbGroup(()).order == 1
    assert FinAbGroup((1, 1)).order == 1
    with pytest.raises(InvalidInput):
        FinAbGroup((0,))


def test_element_count_and_order():
    G = FinAbGroup((2, 3, 4))
    els = G.elements()
    assert len(els) == G.order == 24
    assert els == sorted(els)
    assert G.exponent == 12


def test_encode_decode_roundtrip():
    G = FinAbGroup((3, 4))
    idx = np.arange(G.order)
    assert np.array_equal(G.encode(G.decode(idx)), idx)
    assert G.index((2, 1)) == 9


def test_dual_examples():
    D1, c1 = dual_group(FinAbGroup((1,)))
    assert len(c1) == 1
    D4, c4 = dual_group(FinAbGroup((4,)))
    assert sorted(c.coefficients for c in c4) == [(0,), (1,), (2,), (3,)]
    assert len(dual_group(FinAbGroup((2, 2)))[1]) == 4


def test_character_evaluation():
    _, chars = dual_group(FinAbGroup((4,)))
    chi = [c for c in chars if c.coefficients == (1,)][0]
    assert str(chi((3,))) == "3/4"


def test_hom_examples():
    assert [h.generator_images for h in hom_enumerate(FinAbGroup((2,)), FinAbGroup((3,)))] == [((0,),)]
    imgs = [h.generator_images for h in hom_enumerate(FinAbGroup((2,)), FinAbGroup((4,)))]
    assert imgs == [((0,),), ((2,),)]
    assert len(hom_enumerate(FinAbGroup((2, 2)), FinAbGroup((2,)))) == 4


def test_hom_rejects_ill_defined():
    with pytest.raises(InvalidInput):
        GroupHom(FinAbGroup((2,)), FinAbGroup((4,)), ((1,),))


def test_annihilator_examples():
    K = FinAbGroup((4,))
    _, chars = dual_group(K)
    assert annihilator(K, []) == K.elements()
    assert annihilator(K, chars) == [(0,)]
    twice = [c for c in chars if c.coefficients == (2,)]
    assert annihilator(K, twice) == [(0,), (2,)]


def test_annihilator_wrong_group():
    _, chars = dual_group(FinAbGroup((2,)))
    with pytest.raises(DimensionMismatch):
        annihilator(FinAbGroup((4,)), chars)


def test_abelian_structure_invariants():
    G = FinAbGroup((4, 2, 6))
    orders_, gens = abelian_structure(G.elements(), G.add, G.zero)
    assert list(orders_) == [12, 2, 2]
    assert len(gens) == 3


def test_subgroup_as_group():
    K = FinAbGroup((4, 2))
    S = subgroup_closure(K, [(2, 1)])
    H, emb = subgroup_as_group(K, S)
    assert H.order == len(S) == 2
    assert sorted(emb(h) for h in H.elements()) == sorted(S)


@settings(max_examples=40, deadline=None)
@given(orders)
def test_double_dual_and_nondegenerate(o):
    G = FinAbGroup(tuple(o))
    D, chars = dual_group(G)
    DD, _ = dual_group(D)
    assert DD.cyclic_orders == D.cyclic_orders == G.cyclic_orders
    for x in G.elements():
        if any(x):
            assert any(c(x) for c in chars)


def _brute_homs(S, T):
    cands = []
    for imgs in itertools.product(T.elements(), repeat=S.rank):
        if all(not any(T.mul(n, y)) for n, y in zip(S.cyclic_orders, imgs)):
            cands.append(imgs)
    return cands


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 8), max_size=2).filter(lambda o: math.prod(o) <= 16),
       st.lists(st.integers(1, 8), max_size=2).filter(lambda o: math.prod(o) <= 16))
def test_hom_count(so, to):
    S, T = FinAbGroup(tuple(so)), FinAbGroup(tuple(to))
    homs = hom_enumerate(S, T)
    expect = math.prod(math.gcd(n, m) for n in so for m in to)
    assert len(homs) == expect
    assert sorted(h.generator_images for h in homs) == sorted(_brute_homs(S, T))


@settings(max_examples=40, deadline=None)
@given(orders, st.data())
def test_annihilator_is_subgroup(o, data):
    K = FinAbGroup(tuple(o))
    _, chars = dual_group(K)
    D = data.draw(st.lists(st.sampled_from(chars), max_size=3))
    A = annihilator(K, D)
    assert is_subgroup(K, A)
    zero = [c for c in chars if c.is_trivial]
    assert annihilator(K, zero) == K.elements()


@given(st.integers(-50, 50), st.integers(1, 30), st.integers(-5, 5))
def test_circle_mul_exact(p, q, n):
    v = CircleValue(Fraction(p, q))
    assert (v * n).value == (Fraction(p, q) * n) % 1
