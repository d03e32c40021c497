import itertools

import numpy as np
import pytest

from clab.abelian import FinAbGroup, GroupHom, dual_group, hom_enumerate
from clab.cocycle import (Cocycle, TransferFunction, cl_solve, cl_to_type2_witness, coboundary_solve,
                          compose_character, cube_difference, cube_transfer, derivative,
                          ergodicity_test, extension_build, is_coboundary, is_quasi_coboundary,
                          is_type, make_cocycle, mackey_reduce, quasi_coboundary_solve,
                          translate_derivative, translation, type_test)
from clab.errors import (ConsistencyError, NotCoboundary, NotQuasiCoboundary, NotTypeK,
                         PreconditionError)
from clab.examples import (example_char2, example_mackey_half, example_oddp, example_small_ergodic,
                           z4_on_z2)
from clab.randomized import make_rng, random_cocycle, random_instances, random_system
from clab.system import FiniteSystem, cube_system, ergodic_components, make_rotational

Z2 = FinAbGroup((2,))
Z4 = FinAbGroup((4,))


def rot2():
    return make_rotational(Z2, GroupHom(Z2, Z2, ((1,),)))


def test_make_cocycle_accepts_examples():
    make_cocycle(example_char2(2).rho.base, Z4, example_char2(2).rho.tables)
    make_cocycle(example_oddp(3, 1).rho.base, FinAbGroup((3,)), example_oddp(3, 1).rho.tables)


def test_make_cocycle_rejects_order_violation():
    with pytest.raises(ConsistencyError) as exc:
        make_cocycle(rot2(), Z4, [[1, 1]])
    assert exc.value.witness["relation"] == "order"
    assert list(exc.value.witness["sum"]) == [2]


def test_make_cocycle_rejects_commutation_violation():
    G = FinAbGroup((2, 2))
    Y = make_rotational(G, GroupHom(G, G, ((1, 0), (0, 1))))
    t = np.zeros((2, 4, 1), dtype=np.int64)
    t[0, :, 0] = [2, 0, 2, 0]  # order relation holds, commutation fails
    with pytest.raises(ConsistencyError) as exc:
        make_cocycle(Y, Z4, t)
    assert exc.value.witness["relation"] == "commutation"


def test_derivative_examples():
    Y = rot2()
    assert derivative(TransferFunction(Y, Z4, [[3], [3]])).is_zero()
    d = derivative(TransferFunction(Y, Z4, [[0], [1]]))
    assert d.tables[0, :, 0].tolist() == [1, 3]


def test_derivative_linear():
    rng = make_rng(1)
    for _ in range(20):
        Y = random_system(rng, 8)
        F = TransferFunction(Y, Z4, rng.integers(0, 4, (Y.m, 1)))
        G = TransferFunction(Y, Z4, rng.integers(0, 4, (Y.m, 1)))
        assert derivative(F + G).equals_ae(derivative(F) + derivative(G))


def test_translate_derivative_examples():
    rho = example_char2(1).rho
    assert translate_derivative(rho, (0,)).is_zero()
    assert translate_derivative(rho, (1,)).tables[0, :, 0].tolist() == [2, 2]


def test_translate_derivative_cocycle_identity():
    rho = example_oddp(3, 2).rho
    Z = rho.base.translation_group
    for a in Z.elements():
        for b in Z.elements():
            lhs = translate_derivative(rho, Z.add(a, b))
            Vb = translation(rho.base, b)
            da = translate_derivative(rho, a)
            rhs = da.with_tables(da.tables[:, Vb]) + translate_derivative(rho, b)
            assert lhs.equals_ae(rhs)


def test_translate_derivative_needs_rotational():
    Y = FiniteSystem(Z2, [[1, 0]])
    with pytest.raises(PreconditionError):
        translate_derivative(Cocycle(Y, Z4, np.zeros((1, 2, 1))), (1,))


def test_cube_difference_k0():
    rho = example_char2(2).rho
    assert cube_difference(rho, 0) is rho


def test_cube_difference_k2_displayed_form():
    # the signed vertex sum is minus the displayed difference of derivatives
    for b in (example_char2(2), example_oddp(3, 1), example_oddp(5, 1)):
        rho = b.rho
        C = cube_system(rho.base, 2)
        D = cube_difference(rho, 2)
        M = rho.fiber.moduli
        t = rho.tables
        for c in range(C.m):
            z, zs1, zs2, zs12 = C.vertices[c]
            displayed = (t[:, zs2] - t[:, z]) - (t[:, zs12] - t[:, zs1])
            assert np.array_equal(D.tables[:, c] % M, (-displayed) % M)


def test_cube_difference_of_coboundary():
    rng = make_rng(2)
    for _ in range(10):
        Y = random_system(rng, 6)
        F = TransferFunction(Y, Z4, rng.integers(0, 4, (Y.m, 1)))
        for k in (1, 2):
            D = cube_difference(derivative(F), k)
            assert D.equals_ae(derivative(cube_transfer(F, k)))


def test_coboundary_examples():
    Y = rot2()
    F = coboundary_solve(make_cocycle(Y, Z2, [["1/2", "1/2"]], circle=True))
    assert [str(F.value(y)) for y in range(2)] == ["0/1", "1/2"]
    bad = Cocycle(Y, Z4, [[[1], [1]]], circle=True, validate=False)
    with pytest.raises(NotCoboundary) as exc:
        coboundary_solve(bad)
    assert exc.value.witness["value"] == "1/2"


def test_coboundary_char2_n2():
    rho = example_char2(2).rho
    F = coboundary_solve(rho)
    Z = rho.base.translation_group
    weight = np.array([sum(z) for z in Z.elements()])
    assert np.array_equal((F.values[:, 0] - F.values[0, 0]) % 4, weight % 4)
    assert len(_exhaustive_coboundaries(rho)) == 4


def test_quasi_examples():
    rng = make_rng(4)
    for _ in range(20):
        Y = random_system(rng, 6)
        F = TransferFunction(Y, Z4, rng.integers(0, 4, (Y.m, 1)))
        homs = hom_enumerate(Y.gamma, Z4)
        c = homs[int(rng.integers(len(homs)))]
        sigma = derivative(F) + derivative(F).constant(c)
        F2, c2 = quasi_coboundary_solve(sigma)
        assert sigma.equals_ae(derivative(F2) + sigma.constant(c2))

    sig = make_cocycle(z4_on_z2(), Z4, [["1/4", "1/4"]], circle=True)
    F, c = quasi_coboundary_solve(sig)
    assert F.is_zero() and c.generator_images == ((1,),)

    bad = Cocycle(rot2(), Z4, [[[1], [1]]], circle=True, validate=False)
    with pytest.raises(NotQuasiCoboundary):
        quasi_coboundary_solve(bad)


def test_quasi_lexicographic_without_zero_preference():
    rho = example_char2(1).rho
    F, c = quasi_coboundary_solve(rho, prefer_zero=False)
    assert c.is_zero()
    F, c = quasi_coboundary_solve(translate_derivative(rho, (1,)))
    assert F.is_zero() and c.generator_images == ((2,),)


def test_type_examples():
    for b in (example_char2(2), example_oddp(3, 1)):
        assert type_test(b.rho, 2).is_zero()
    rng = make_rng(6)
    Y = random_system(rng, 6)
    F = TransferFunction(Y, Z4, rng.integers(0, 4, (Y.m, 1)))
    assert is_type(derivative(F), 0)


def test_type_negative_witness():
    rho = example_small_ergodic()
    with pytest.raises(NotTypeK) as exc:
        type_test(rho, 0)
    assert exc.value.witness["k"] == 0


def test_cl_examples():
    for n in (1, 2, 3):
        w = cl_solve(example_char2(n).rho)
        for z in w.Z.elements():
            assert w.F[z].is_zero()
            assert w.c[z].generator_images == tuple((((-1) ** zi - 1) % 4,) for zi in z)
    w = cl_solve(example_oddp(3, 1).rho)
    assert [w.c[z].generator_images for z in w.Z.elements()] == [((0,),), ((1,),), ((2,),)]
    zero = example_char2(2).rho.with_tables(np.zeros_like(example_char2(2).rho.tables))
    w = cl_solve(zero)
    assert all(w.F[z].is_zero() and w.c[z].is_zero() for z in w.Z.elements())


def test_cl_to_type2():
    for b in (example_char2(2), example_oddp(3, 1)):
        assert cl_to_type2_witness(b.rho, cl_solve(b.rho)).is_zero()


def test_cl_to_type2_random_quasi():
    rng = make_rng(8)
    Z = FinAbGroup((2, 4))
    Y = make_rotational(Z, GroupHom(Z, Z, ((1, 0), (0, 1))))
    for _ in range(5):
        F = TransferFunction(Y, Z4, rng.integers(0, 4, (Y.m, 1)))
        homs = hom_enumerate(Z, Z4)
        rho = derivative(F) + derivative(F).constant(homs[int(rng.integers(len(homs)))])
        w = cl_solve(rho)
        F2 = cl_to_type2_witness(rho, w)
        assert cube_difference(rho, 2).equals_ae(derivative(F2))


def test_ergodicity_examples():
    erg, cert = ergodicity_test(example_small_ergodic())
    assert erg and cert["components"] == 1
    X = extension_build(example_small_ergodic())
    orbit = [0]
    while len(orbit) < 5:
        orbit.append(int(X.actions[0, orbit[-1]]))
    assert orbit[4] == 0 and len(set(orbit[:4])) == 4

    rng = make_rng(9)
    Y = z4_on_z2()
    F = TransferFunction(Y, Z4, rng.integers(0, 4, (2, 1)))
    assert not ergodicity_test(derivative(F))[0]

    erg, cert = ergodicity_test(example_char2(2).rho)
    assert not erg and cert["witness"]["character"] == [1]


def test_ergodicity_needs_ergodic_base():
    Y = FiniteSystem(Z2, [[0, 1]])
    with pytest.raises(PreconditionError):
        ergodicity_test(Cocycle(Y, Z2, np.zeros((1, 2, 1))))


def test_oddp_not_ergodic_witness():
    rho = example_oddp(3, 1).rho
    erg, cert = ergodicity_test(rho)
    assert not erg
    chi = compose_character(rho, dual_group(rho.fiber)[1][1])
    assert is_coboundary(chi)


def test_extension_examples():
    X = extension_build(example_char2(1).rho)
    assert X.m == 8
    assert np.array_equal(X.actions[0][X.actions[0]], np.arange(8))
    rho0 = example_char2(1).rho.with_tables(np.zeros_like(example_char2(1).rho.tables))
    X0 = extension_build(rho0)
    assert X0.m == 2 * 4
    assert all(X0.actions[0, y * 4 + k] % 4 == k for y in range(2) for k in range(4))


def test_mackey_examples():
    rho = example_small_ergodic()
    X = extension_build(rho)
    m = mackey_reduce(rho, ergodic_components(X)[0])
    assert len(m.H) == rho.fiber.order and m.F.is_zero()

    rho = example_char2(2).rho
    comps = ergodic_components(extension_build(rho))
    assert [c.m for c in comps] == [4] * 4
    m = mackey_reduce(rho, comps[0])
    assert m.H == [(0,)] and m.rho_prime.is_zero()
    assert m.F.values[:, 0].tolist() == [0, 1, 1, 2]

    rho = example_mackey_half()
    m = mackey_reduce(rho, ergodic_components(extension_build(rho))[0])
    assert m.H == [(0,), (2,)]


def test_mackey_foreign_component():
    comp = ergodic_components(extension_build(example_char2(1).rho))[0]
    with pytest.raises(PreconditionError):
        mackey_reduce(example_char2(2).rho, comp)


def test_cocycle_json_roundtrip():
    rho = example_oddp(3, 1).rho
    back = Cocycle.from_json(rho.to_json())
    assert np.array_equal(back.tables, rho.tables)


# oracles

def _exhaustive_coboundaries(sigma):
    Y, K = sigma.base, sigma.fiber
    pos = Y.positive
    sols = []
    for vals in itertools.product(range(K.order), repeat=Y.m):
        F = TransferFunction(Y, K, K.element_array[list(vals)], sigma.circle)
        if F.values[~pos].any():
            continue
        if derivative(F).equals_ae(sigma):
            sols.append(F)
    return sols


def _exhaustive_quasi(sigma):
    return any(_exhaustive_coboundaries(sigma - sigma.constant(c)) for c in hom_enumerate(sigma.gamma, sigma.fiber))


def test_solvers_agree_with_exhaustive_search():
    for sigma in random_instances(seed=0, count=200, max_points=4, max_fiber=4):
        assert is_coboundary(sigma) == bool(_exhaustive_coboundaries(sigma))
        assert is_quasi_coboundary(sigma) == _exhaustive_quasi(sigma)


def test_moore_schmidt_random():
    rng = make_rng(12)
    for _ in range(200):
        Y = random_system(rng, 8)
        K = FinAbGroup([(2,), (4,), (2, 2), (8,), (2, 4)][int(rng.integers(5))])
        rho = random_cocycle(rng, Y, K, coboundary=bool(rng.random() < 0.7),
                             constant=bool(rng.random() < 0.3))
        chars = dual_group(K)[1]
        assert is_coboundary(rho) == all(is_coboundary(compose_character(rho, xi)) for xi in chars)


def test_quasi_implies_type1():
    for sigma in random_instances(seed=3, count=60, max_points=6, max_fiber=4):
        if is_quasi_coboundary(sigma):
            F, c = quasi_coboundary_solve(sigma)
            d = derivative(F)
            assert is_type(d + d.constant(c), 1)


def test_cohomology_invariance():
    rng = make_rng(13)
    for sigma in random_instances(seed=4, count=60, max_points=6, max_fiber=4):
        F = TransferFunction(sigma.base, sigma.fiber, sigma.fiber.element_array[
            rng.integers(sigma.fiber.order, size=sigma.base.m)])
        other = sigma + derivative(F)
        for k in (0, 1, 2):
            assert is_type(sigma, k) == is_type(other, k)


def test_differentiation_lowers_type():
    Z = FinAbGroup((2, 2))
    shipped = [example_char2(1).rho, example_char2(2).rho, example_oddp(3, 1).rho]
    rng = make_rng(14)
    rand = []
    for Zo in ((8,), (2, 4), (2, 2)):
        Zg = FinAbGroup(Zo)
        Y = make_rotational(Zg, GroupHom(Zg, Zg, tuple(Zg.generators())))
        for _ in range(3):
            rand.append(random_cocycle(rng, Y, FinAbGroup((8,)), circle=True))
    for rho in shipped + rand:
        circ = rho if rho.circle else Cocycle(rho.base, rho.fiber, rho.tables, circle=True)
        if not is_type(circ, 2):
            continue
        for z in circ.base.translation_group.elements():
            assert is_type(translate_derivative(circ, z), 1)
