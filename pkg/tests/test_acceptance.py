"""Acceptance criteria 1-11; a PASS/FAIL line per criterion is printed in the summary."""
import itertools
import time

import numpy as np
import pytest

from clab.abelian import FinAbGroup, GroupHom, dual_group, hom_enumerate
from clab.cocycle import (Cocycle, TransferFunction, cl_solve, coboundary_solve, compose_character,
                          derivative, extension_build, is_coboundary, is_quasi_coboundary, is_type,
                          mackey_reduce, quasi_coboundary_solve, translate_derivative, type_test)
from clab.errors import NoGap, NotCoboundary, NotQuasiCoboundary
from clab.examples import example_char2, example_oddp, example_tdK
from clab.hostkra import host_kra_group, round_trip, structure_report, translational_certificate
from clab.randomized import (make_rng, orthogonal_observable, random_cocycle, random_instances,
                             random_observable, random_system)
from clab.system import (PhaseAction, eigen_residual, ergodic_components, extract_joint_eigenfunction,
                         gowers_norm, hkz_factor, kronecker_factor, make_rotational)
from clab.torus import TorusParams, heisenberg_check, verify_identity, weyl_report

ODDP = [(3, 1), (3, 2), (5, 1)]


def _check_identities(rho, c_of):
    rho.check()
    assert type_test(rho, 2).is_zero()
    w = cl_solve(rho)
    for z in w.Z.elements():
        assert w.F[z].is_zero()
        assert w.c[z].generator_images == c_of(z)


@pytest.mark.acceptance(1)
def test_criterion_1_char2_identities():
    t = time.perf_counter()
    for n in range(1, 7):
        # ((-1)^{z_i} - 1) mod 4 is 2 z_i
        _check_identities(example_char2(n).rho, lambda z: tuple(((2 * zi) % 4,) for zi in z))
    assert time.perf_counter() - t < 5


def _lambda_checks(G, X, cert):
    lam = np.array(cert.Lambda)
    assert len(lam) * X.m == G.n
    a, b = np.repeat(lam, len(lam)), np.tile(lam, len(lam))
    assert np.array_equal(G.mul(a, b), G.mul(b, a))
    e = int(G.mul(lam[:1], G.inv(lam[:1]))[0])
    assert set(lam.tolist()) & set(G.G2.tolist()) == {e}


@pytest.mark.acceptance(2)
def test_criterion_2_char2_host_kra():
    t = time.perf_counter()
    for n in (1, 2, 3):
        G = host_kra_group(example_char2(n).rho)
        assert G.n == 2 ** n * 4 * 2 ** n
        rep = structure_report(G)
        assert rep["g2_order"] == 4
        assert all(G.U[g] == 0 and len(set(G.Fk[g].ravel().tolist())) == 1 for g in G.G2)
        assert rep["commutator_order"] == 2
        X = extension_build(G.rho)
        _lambda_checks(G, X, translational_certificate(G, X, 0))
    assert time.perf_counter() - t < 30


@pytest.mark.acceptance(3)
def test_criterion_3_oddp():
    t = time.perf_counter()
    for p, n in ODDP:
        _check_identities(example_oddp(p, n).rho, lambda z: tuple((zi,) for zi in z))
        rep = structure_report(host_kra_group(example_oddp(p, n).rho))
        assert rep["commutator_order"] == rep["g2_order"] == p
        assert sorted(rep["commutator_subgroup"]) == sorted(host_kra_group(example_oddp(p, n).rho).G2.tolist())
    assert time.perf_counter() - t < 10


@pytest.mark.acceptance(4)
def test_criterion_4_round_trip():
    for rho in (example_char2(1).rho, example_char2(2).rho, example_oddp(3, 1).rho):
        res = round_trip(rho)
        assert res["cohomologous"]
        coboundary_solve(rho - res["rho_prime"])


@pytest.mark.acceptance(5)
def test_criterion_5_mackey():
    rho = example_char2(2).rho
    comps = ergodic_components(extension_build(rho))
    assert [c.m for c in comps] == [4, 4, 4, 4]
    weight = np.array([sum(z) for z in rho.base.translation_group.elements()])
    for comp in comps:
        m = mackey_reduce(rho, comp)
        assert m.H == [(0,)] and m.rho_prime.is_zero()
        assert len(set(((m.F.values[:, 0] - weight) % 4).tolist())) == 1


@pytest.mark.acceptance(6)
def test_criterion_6_factor_tower():
    t = time.perf_counter()
    rng = make_rng(606)
    for _ in range(10):
        X = random_system(rng, max_points=12)
        assert hkz_factor(X, 1) == kronecker_factor(X)[1]
    bundles = [example_char2(n) for n in (1, 2, 3)] + [example_oddp(p, n) for p, n in ODDP]
    for b in bundles:
        assert is_type(b.rho, 2)
        for comp in ergodic_components(extension_build(b.rho)):
            assert hkz_factor(comp, 1) == kronecker_factor(comp)[1]
            assert hkz_factor(comp, 2).n_blocks == comp.m
    assert time.perf_counter() - t < 60


@pytest.mark.acceptance(7)
def test_criterion_7_gowers_characteristic():
    rng = make_rng(707)
    for _ in range(10):
        X = random_system(rng, max_points=12)
        for k in (1, 2):
            P = hkz_factor(X, k)
            for j in range(50):
                f = orthogonal_observable(rng, X, P) if j % 2 else random_observable(rng, X)
                small = gowers_norm(X, f, k + 1) < 1e-9
                ce = P.conditional_expectation(f)[X.positive]
                assert small == bool(np.all(np.abs(ce) < 1e-9))


def _exhaustive(sigma):
    Y, K = sigma.base, sigma.fiber
    out = []
    for vals in itertools.product(range(K.order), repeat=Y.m):
        F = TransferFunction(Y, K, K.element_array[list(vals)], sigma.circle)
        if not F.values[~Y.positive].any() and derivative(F).equals_ae(sigma):
            out.append(F)
    return out


@pytest.mark.acceptance(8)
def test_criterion_8_solver_completeness():
    for sigma in random_instances(seed=808, count=200, max_points=4, max_fiber=4):
        brute = bool(_exhaustive(sigma))
        try:
            F = coboundary_solve(sigma)
            assert brute and derivative(F).equals_ae(sigma)
        except NotCoboundary:
            assert not brute
        homs = hom_enumerate(sigma.gamma, sigma.fiber)
        brute_q = any(_exhaustive(sigma - sigma.constant(c)) for c in homs)
        try:
            F, c = quasi_coboundary_solve(sigma)
            assert brute_q and (derivative(F) + sigma.constant(c)).equals_ae(sigma)
        except NotQuasiCoboundary:
            assert not brute_q


@pytest.mark.acceptance(9)
def test_criterion_9_moore_schmidt_and_type_lowering():
    rng = make_rng(909)
    for _ in range(200):
        Y = random_system(rng, 8)
        K = FinAbGroup([(2,), (4,), (2, 2), (8,), (2, 4)][int(rng.integers(5))])
        rho = random_cocycle(rng, Y, K, coboundary=bool(rng.random() < 0.7),
                             constant=bool(rng.random() < 0.3))
        chars = dual_group(K)[1]
        assert is_coboundary(rho) == all(is_coboundary(compose_character(rho, xi)) for xi in chars)
    cases = [example_char2(1).rho, example_char2(2).rho, example_oddp(3, 1).rho]
    for Zo in ((8,), (2, 4), (2, 2)):
        Z = FinAbGroup(Zo)
        Y = make_rotational(Z, GroupHom(Z, Z, tuple(Z.generators())))
        cases += [random_cocycle(rng, Y, FinAbGroup((8,)), circle=True) for _ in range(3)]
    for rho in cases:
        circ = rho if rho.circle else Cocycle(rho.base, rho.fiber, rho.tables, circle=True)
        for k in (1, 2):
            if is_type(circ, k):
                for z in circ.base.translation_group.elements():
                    assert is_type(translate_derivative(circ, z), k - 1)
    assert all(is_quasi_coboundary(s) <= is_type(s, 1)
               for s in random_instances(seed=910, count=60, max_points=6, max_fiber=4))


@pytest.mark.acceptance(10)
def test_criterion_10_torus():
    t = time.perf_counter()
    P = TorusParams()
    for kind in ("type-2", "cl", "cocycle-eq"):
        assert verify_identity(kind, P, 10_000, 1e-9)["max_residual"] < 1e-9
    w = weyl_report(P, N=100_000, max_freq=3, threshold=0.05)
    assert w["max_magnitude"] < 0.05 and len(w["table"]) == 48
    assert heisenberg_check(P, 10_000)["max_residual"] < 1e-9
    assert example_tdK(10_000)["max_residual"] < 1e-12
    assert time.perf_counter() - t < 30


@pytest.mark.acceptance(11)
def test_criterion_11_eigen_extraction():
    Z = FinAbGroup((4,))
    X = make_rotational(Z, GroupHom(Z, Z, ((1,),)))
    U = PhaseAction.koopman(X)
    chi = np.exp(2j * np.pi * np.arange(4) / 4)
    pert = make_rng(1111).standard_normal(4) + 1j * make_rng(1112).standard_normal(4)
    g = chi + 0.01 * pert / np.linalg.norm(pert)
    g = g / np.sqrt(np.mean(np.abs(g) ** 2))
    f = extract_joint_eigenfunction(X, U, g)
    assert np.max(np.abs(f - chi)) < 1e-6
    assert eigen_residual(X, U, f)[0] < 1e-9
    Y = make_rotational(FinAbGroup((2,)), GroupHom(FinAbGroup((2,)), FinAbGroup((2,)), ((1,),)))
    with pytest.raises(NoGap):
        extract_joint_eigenfunction(Y, PhaseAction.koopman(Y), np.array([np.sqrt(2), 0.0]))
