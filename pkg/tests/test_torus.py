import math

import numpy as np
import pytest

from clab.errors import InvalidInput, SizeGuardError
from clab.torus import (TorusParams, TorusPoint, closed_form_orbit, heisenberg_check, heisenberg_cocycle,
                        hk_law_check, skew_shift_orbit, verify_identity, weyl_frequencies, weyl_report,
                        weyl_test)

P = TorusParams()


def test_torus_point_reduces():
    p = TorusPoint((1.25, -0.25)) + TorusPoint((0.5, 0.5))
    assert p.coordinates == (0.75, 0.25)
    with pytest.raises(InvalidInput):
        TorusPoint((math.inf, 0.0))


def test_orbit_first_points():
    o = skew_shift_orbit(P, 3)
    a = P.alpha
    assert np.allclose(o[0], [0, 0])
    assert np.allclose(o[1], [(2 * a) % 1, a % 1])
    assert np.allclose(o[2], [(4 * a) % 1, (4 * a) % 1])


def test_orbit_matches_closed_form():
    o = skew_shift_orbit(P, 100_000, check=False)
    d = o - closed_form_orbit(P.alpha, 100_000)
    assert np.max(np.abs(d - np.round(d))) < 1e-9


def test_orbit_guards():
    with pytest.raises(SizeGuardError):
        skew_shift_orbit(P, 10**7 + 1)
    with pytest.raises(InvalidInput):
        skew_shift_orbit(P, 0)


def test_weyl_constant_sequence():
    rows = weyl_test(np.zeros((10, 2)), 2)
    assert len(rows) == 24
    assert all(abs(r["magnitude"] - 1) < 1e-12 for r in rows)


def test_weyl_zero_frequency_only():
    with pytest.raises(InvalidInput):
        weyl_frequencies(1, only=(0, 0))
    with pytest.raises(InvalidInput):
        weyl_test(np.zeros((3, 2)), 0)


def test_weyl_rational_periodic():
    rows = weyl_test(skew_shift_orbit(TorusParams(0.5), 1000), 2)
    assert [r["magnitude"] for r in rows if r["frequency"] == [2, 0]] == [pytest.approx(1.0)]


def test_weyl_irrational_threshold():
    rep = weyl_report(P)
    assert rep["passed"] and rep["max_magnitude"] < 0.05
    assert len(rep["table"]) == 48


@pytest.mark.parametrize("kind", ["cocycle-eq", "type-2", "cl"])
def test_identities(kind):
    rep = verify_identity(kind, P, 10_000, 1e-9)
    assert rep["passed"] and rep["max_residual"] < 1e-9


def test_identity_at_zero_exact():
    from clab.torus import skew_rho
    z = np.linspace(0, 1, 20)
    assert np.all(skew_rho(P.alpha, 0, z) == 0)


def test_identity_bad_args():
    with pytest.raises(InvalidInput):
        verify_identity("type-3", P)
    with pytest.raises(InvalidInput):
        verify_identity("cl", P, tol=1e-13)


def test_hk_law():
    rep = hk_law_check(P)
    assert rep["generic_verified"]
    assert not rep["displayed_matches"]
    assert rep["displayed_law_residual"] > 1e-3


def test_heisenberg_values():
    assert heisenberg_cocycle(P.alpha, P.beta, 0, 0.3, 0.7) == 0.0
    assert heisenberg_cocycle(P.alpha, P.beta, 1, 0.0, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_heisenberg_cocycle_equation():
    rep = heisenberg_check(P, 10_000)
    assert rep["passed"] and rep["max_residual"] < 1e-9
