from fractions import Fraction

import numpy as np
import pytest

from clab.abelian import FinAbGroup, GroupHom, dual_group
from clab.cocycle import extension_build
from clab.errors import InvalidAction, InvalidInput, NoGap, SizeGuardError
from clab.examples import example_char2
from clab.randomized import make_rng, orthogonal_observable, random_observable, random_system
from clab.system import (FactorPartition, FiniteSystem, PhaseAction, cube_system, eigen_residual,
                         ergodic_components, extract_joint_eigenfunction, gowers_norm, hkz_factor,
                         invariant_factor, kronecker_factor, make_rotational, rel_product,
                         singleton_partition)


def rot(n, step=1, gamma=None):
    Z = FinAbGroup((n,))
    G = gamma or Z
    return make_rotational(Z, GroupHom(G, Z, ((step,),)))


def trivial3():
    return FiniteSystem(FinAbGroup((2,)), [[0, 1, 2]])


def test_weights_must_be_invariant():
    with pytest.raises(InvalidInput):
        FiniteSystem(FinAbGroup((2,)), [[1, 0]], [Fraction(1, 3), Fraction(2, 3)])


def test_generator_order_checked():
    with pytest.raises(InvalidAction):
        FiniteSystem(FinAbGroup((2,)), [[1, 2, 0]])


def test_make_rotational_examples():
    assert rot(4).is_ergodic()
    X = rot(4, 2, FinAbGroup((2,)))
    assert sorted(np.bincount(X.orbit_labels()).tolist()) == [2, 2]
    Z = FinAbGroup((3,))
    assert make_rotational(Z, GroupHom(Z, Z, ((2,),))).is_ergodic()


def test_make_rotational_bad_weights():
    Z = FinAbGroup((2,))
    with pytest.raises(InvalidInput):
        make_rotational(Z, GroupHom(Z, Z, ((1,),)), [Fraction(1, 4), Fraction(3, 4)])


def test_invariant_factor_examples():
    assert invariant_factor(rot(4)).n_blocks == 1
    assert invariant_factor(trivial3()).n_blocks == 3
    X = extension_build(example_char2(1).rho)
    P = invariant_factor(X)
    assert X.m == 8
    assert sorted(np.bincount(P.block_of).tolist()) == [2, 2, 2, 2]


def test_rel_product_examples():
    X = rot(4)
    D = rel_product(X, singleton_partition(X))
    assert D.m == 4 and D.weights == X.weights
    assert rel_product(X, invariant_factor(X)).m == 16
    X2 = rot(4, 2, FinAbGroup((2,)))
    R = rel_product(X2, invariant_factor(X2))
    assert R.m == 8
    assert all(w == Fraction(1, 8) for w in R.weights)


def test_rel_product_weights_sum_to_one():
    rng = make_rng(3)
    for _ in range(10):
        X = random_system(rng)
        assert sum(rel_product(X, invariant_factor(X)).weights) == 1


def test_cube_examples():
    X = rot(3)
    C = cube_system(X, 2)
    assert C.m == 27
    labels = set(C.labels)
    for z in range(3):
        for s1 in range(3):
            for s2 in range(3):
                v = ((z,), ((z + s1) % 3,), ((z + s2) % 3,), ((z + s1 + s2) % 3,))
                assert v in labels
    assert cube_system(X, 0) is X
    assert cube_system(rot(2), 1).m == 4


def test_cube_counts_rotational():
    for n in (2, 3, 4, 5):
        for k in (0, 1, 2):
            assert cube_system(rot(n), k).m == n ** (k + 1)


def test_cube_guard(monkeypatch):
    monkeypatch.setenv("CLAB_MAX_ENUM", "10")
    with pytest.raises(SizeGuardError):
        cube_system(rot(5), 2)


def test_hkz_examples():
    assert hkz_factor(rot(5), 0).n_blocks == 1
    assert hkz_factor(rot(5), 1).n_blocks == 5
    comps = ergodic_components(extension_build(example_char2(1).rho))
    assert all(hkz_factor(c, 2).n_blocks == c.m == 2 for c in comps)


def test_kronecker_examples():
    chars, P = kronecker_factor(rot(4))
    assert len(chars) == 4 and P.n_blocks == 4
    chars, P = kronecker_factor(trivial3())
    assert P.n_blocks == 3
    assert all(c.is_trivial for c, _ in chars)
    comp = ergodic_components(extension_build(example_char2(1).rho))[0]
    assert len(kronecker_factor(comp)[0]) == 2


def test_kronecker_eigen_equation():
    X = rot(6)
    for chi, f in kronecker_factor(X)[0]:
        lam = np.exp(2j * np.pi * chi.residues(np.array([[1]]), 6)[0] / 6)
        assert np.allclose(f[X.actions[0]], lam * f)


def test_gowers_examples():
    X = rot(3)
    for k in (1, 2, 3):
        assert abs(gowers_norm(X, np.ones(3), k) - 1) < 1e-12
    f = np.exp(2j * np.pi * np.arange(3) / 3)
    assert gowers_norm(X, f, 1) < 1e-9
    assert abs(gowers_norm(X, f, 2) - 1) < 1e-9


def test_ergodic_component_examples():
    assert len(ergodic_components(rot(4))) == 1
    assert len(ergodic_components(trivial3())) == 3
    comps = ergodic_components(extension_build(example_char2(2).rho))
    assert [c.m for c in comps] == [4, 4, 4, 4]
    assert all(c.is_ergodic() for c in comps)


def test_partition_conditional_expectation():
    X = trivial3()
    P = FactorPartition(X, [0, 0, 1])
    assert np.allclose(P.conditional_expectation(np.array([1.0, 3.0, 5.0])), [2, 2, 5])
    assert P.refines(FactorPartition(X, [0, 0, 0]))


def test_tower_property_random():
    rng = make_rng(11)
    for _ in range(10):
        X = random_system(rng)
        P0, P1, P2 = (hkz_factor(X, k) for k in (0, 1, 2))
        assert P1.refines(P0) and P2.refines(P1)


def test_hkz1_equals_kronecker_random():
    rng = make_rng(5)
    for _ in range(15):
        X = random_system(rng, max_points=16)
        assert hkz_factor(X, 1) == kronecker_factor(X)[1]


def test_gowers_characteristic_random():
    rng = make_rng(7)
    for _ in range(10):
        X = random_system(rng)
        for k in (0, 1, 2):
            P = hkz_factor(X, k)
            for j in range(50):
                f = orthogonal_observable(rng, X, P) if j % 2 else random_observable(rng, X)
                small = gowers_norm(X, f, k + 1) < 1e-9
                ce = P.conditional_expectation(f)[X.positive]
                assert small == bool(np.all(np.abs(ce) < 1e-9))


def _z4_char(j, eps=0.0, seed=0):
    g = np.exp(2j * np.pi * j * np.arange(4) / 4)
    if eps:
        p = make_rng(seed).standard_normal(4) + 1j * make_rng(seed + 1).standard_normal(4)
        g = g + eps * p / np.linalg.norm(p)
    return g / np.sqrt(np.sum(np.abs(g) ** 2) / 4)


def test_extract_exact_character():
    X = rot(4)
    U = PhaseAction.koopman(X)
    f = extract_joint_eigenfunction(X, U, _z4_char(1))
    assert np.allclose(f, _z4_char(1), atol=1e-9)


def test_extract_perturbed_character():
    X = rot(4)
    U = PhaseAction.koopman(X)
    f = extract_joint_eigenfunction(X, U, _z4_char(1, 0.01))
    assert np.max(np.abs(f - _z4_char(1))) < 1e-6
    assert eigen_residual(X, U, f)[0] < 1e-9


def test_extract_degenerate_raises():
    X = rot(2)
    g = np.array([np.sqrt(2), 0.0])
    with pytest.raises(NoGap):
        extract_joint_eigenfunction(X, PhaseAction.koopman(X), g)


def test_phase_action_inconsistent():
    X = rot(2)
    U = PhaseAction.from_tables(X.gamma, X.actions, [["1/4", "0"]])
    with pytest.raises(InvalidAction):
        U.check()


def test_system_json_roundtrip():
    X = rot(4, 2, FinAbGroup((2,)))
    Y = FiniteSystem.from_json(X.to_json())
    assert np.array_equal(Y.actions, X.actions) and Y.weights == X.weights
