"""Floating-point checks for the characteristic-zero examples.

The skew shift T(z, k) = (z + 2a, k + z + a) on the 2-torus, the Heisenberg
section cocycle, and Weyl sums.  Residuals are distances to the nearest
integer.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import InvalidInput, SizeGuardError

DEFAULT_ALPHA = math.sqrt(2) - 1
DEFAULT_BETA = (math.sqrt(5) - 1) / 2
MAX_ORBIT = 10**7
CLOSED_FORM_CHECK = 10**5
GUARD = 1e-12


@dataclass(frozen=True)
class TorusPoint:
    coordinates: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coordinates)
        if not all(math.isfinite(v) for v in c):
            raise InvalidInput("torus coordinates must be finite")
        object.__setattr__(self, "coordinates", tuple(v - math.floor(v) for v in c))

    def __add__(self, other):
        return TorusPoint(tuple(a + b for a, b in zip(self.coordinates, other.coordinates)))


@dataclass(frozen=True)
class TorusParams:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise InvalidInput("alpha and beta must be finite")


def circle_dist(v):
    """Distance from v to the nearest integer."""
    v = np.asarray(v, dtype=np.float64)
    return np.abs(v - np.round(v))


def _frac(v):
    return v - np.floor(v)


def closed_form_orbit(alpha, N):
    """(2 a n, a n^2) mod 1 evaluated exactly for the binary value of a."""
    a = Fraction(alpha)
    num, den = a.numerator, a.denominator
    out = np.empty((N, 2))
    for n in range(N):
        out[n, 0] = (2 * num * n % den) / den
        out[n, 1] = (num * n * n % den) / den
    return out


def skew_shift_orbit(params, N, check=True):
    """x(0..N-1) for the skew shift, iterated; compared with the closed form when N <= 1e5."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidInput(f"N must be a positive integer, got {N!r}")
    if N > MAX_ORBIT:
        raise SizeGuardError(f"N = {N} exceeds {MAX_ORBIT}")
    a = float(params.alpha)
    orbit = kernels.skew_orbit(_frac(2 * a), a, int(N))
    if check and N <= CLOSED_FORM_CHECK:
        res = float(circle_dist(orbit - closed_form_orbit(a, int(N))).max())
        if res >= 1e-9:
            raise InvalidInput(f"iterated and closed-form orbits differ by {res:.3e}")
    return orbit


def weyl_test(points, max_freq):
    """|N^-1 sum e(k . x(n))| for every nonzero k with |k_i| <= max_freq."""
    if not isinstance(max_freq, (int, np.integer)) or max_freq < 1:
        raise InvalidInput("max_freq must be >= 1")
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    d = pts.shape[1]
    rows = []
    for k in itertools.product(range(-max_freq, max_freq + 1), repeat=d):
        if not any(k):
            continue
        phase = pts @ np.array(k, dtype=np.float64)
        s = np.exp(2j * np.pi * phase).mean()
        rows.append({"frequency": list(k), "magnitude": float(abs(s))})
    return rows


def weyl_frequencies(max_freq, d=2, only=None):
    if only is not None:
        if not any(only):
            raise InvalidInput("only the zero frequency was requested")
        return [tuple(only)]
    return [k for k in itertools.product(range(-max_freq, max_freq + 1), repeat=d) if any(k)]


# skew shift cocycle rho_n(z) = n z + a n^2

def skew_rho(alpha, n, z):
    return n * z + alpha * n * n


def verify_identity(kind, params, samples=10_000, tol=1e-9, seed=0, n_range=20):
    """Max residual of one identity for the skew-shift cocycle at random samples."""
    if tol < 1e-12:
        raise InvalidInput("tol must be >= 1e-12")
    if samples < 1:
        raise InvalidInput("samples must be positive")
    rng = np.random.default_rng(seed)
    a = float(params.alpha)
    z, s1, s2 = rng.random((3, samples))
    n = rng.integers(-n_range, n_range + 1, size=samples)
    m = rng.integers(-n_range, n_range + 1, size=samples)
    if kind == "cocycle-eq":
        # rho_{m+n}(z) = rho_m(z + 2 a n) + rho_n(z)
        r = skew_rho(a, m + n, z) - skew_rho(a, m, z + 2 * a * n) - skew_rho(a, n, z)
        cols = {"z": z, "m": m, "n": n}
    elif kind == "type-2":
        # the cube difference vanishes, so F = 0 works
        r = (skew_rho(a, n, z) - skew_rho(a, n, z + s1) - skew_rho(a, n, z + s2)
             + skew_rho(a, n, z + s1 + s2))
        cols = {"z": z, "s1": s1, "s2": s2, "n": n}
    elif kind == "cl":
        # rho_n(z + u) - rho_n(z) = c_u(n) = n u, F = 0
        u = s1
        r = skew_rho(a, n, z + u) - skew_rho(a, n, z) - n * u
        cols = {"z": z, "u": u, "n": n}
    else:
        raise InvalidInput(f"unknown identity {kind!r}")
    res = circle_dist(r)
    worst = int(np.argmax(res))
    out = {"kind": kind, "samples": samples, "max_residual": float(res[worst]), "tolerance": tol,
           "worst_sample": {k: (int(v[worst]) if v.dtype.kind == "i" else float(v[worst]))
                            for k, v in cols.items()},
           "passed": bool(res[worst] < tol), "claim_ids": [f"skew.{kind}"]}
    return out


def hk_law_check(params, samples=2_000, seed=0, tol=1e-9):
    """Compare the displayed group law of (u, theta, m) elements with the action on the 2-torus.

    (u, theta, m)(z, k) = (z + u, k + theta + m z); composition of actions gives
    the generic law (u + u', theta + theta' + m u', m + m').
    """
    rng = np.random.default_rng(seed)
    a = float(params.alpha)
    u, t, u2, t2, z, k = rng.random((6, samples))
    m, m2 = rng.integers(-20, 21, size=(2, samples))
    n = rng.integers(-20, 21, size=samples)

    def act(g, x):
        return x[0] + g[0], x[1] + g[1] + g[2] * x[0]

    def dist(p, q):
        return np.maximum(circle_dist(p[0] - q[0]), circle_dist(p[1] - q[1]))

    g, h, x = (u, t, m), (u2, t2, m2), (z, k)
    composed = act(g, act(h, x))
    generic = act((u + u2, t + t2 + m * u2, m + m2), x)
    displayed = act((u + u2, t + t2 + u, m + m2), x)
    e_generic = dist(composed, generic)
    e_disp = dist(composed, displayed)
    inv_generic = (-u, -t + m * u, -m)
    inv_disp = (-u, -t - u, -m)
    e_inv_g = dist(act(g, act(inv_generic, x)), x)
    e_inv_d = dist(act(g, act(inv_disp, x)), x)
    # phi(n) = (2 a n, a n^2, n) acts as T^n and is a homomorphism under the generic law
    phi = (2 * a * n, a * n * n, n)
    Tn = (z + 2 * a * n, k + skew_rho(a, n, z))
    e_phi = dist(act(phi, x), Tn)
    phi_m = (2 * a * m, a * m * m, m)
    prod = (phi_m[0] + phi[0], phi_m[1] + phi[1] + phi_m[2] * phi[0], m + n)
    e_hom = dist(act(prod, x), act((2 * a * (m + n), a * (m + n) ** 2, m + n), x))
    rep = {
        "generic_law_residual": float(e_generic.max()),
        "displayed_law_residual": float(e_disp.max()),
        "generic_inverse_residual": float(e_inv_g.max()),
        "displayed_inverse_residual": float(e_inv_d.max()),
        "phi_action_residual": float(e_phi.max()),
        "phi_hom_residual": float(e_hom.max()),
        "generic_law": "(u + u', theta + theta' + m u', m + m')",
        "generic_inverse": "(-u, -theta + m u, -m)",
        "samples": samples,
        "claim_ids": ["skew.hk_law"],
    }
    rep["generic_verified"] = all(rep[k] < tol for k in ("generic_law_residual", "generic_inverse_residual",
                                                          "phi_action_residual", "phi_hom_residual"))
    rep["displayed_matches"] = rep["displayed_law_residual"] < tol and rep["displayed_inverse_residual"] < tol
    return rep


# Heisenberg section cocycle

def heisenberg_cocycle(alpha, beta, n, x, y):
    """n(n-1)/2 a b + n a {y} - (x + n a)({y} + n b - {y + n b}) mod 1."""
    n = np.asarray(n, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    fy = _frac(y)
    jump = fy + n * beta - _frac(y + n * beta)
    v = n * (n - 1) / 2 * alpha * beta + n * alpha * fy - (x + n * alpha) * jump
    v = _frac(v)
    return float(v) if v.ndim == 0 else v


def heisenberg_check(params, samples=10_000, seed=0, tol=1e-9, guard=GUARD):
    """rho_{m+n} = rho_m o S^n + rho_n with S^n(x, y) = (x + n a, y + n b), at random samples."""
    rng = np.random.default_rng(seed)
    a, b = float(params.alpha), float(params.beta)
    x, y = rng.random((2, samples))
    m, n = rng.integers(-20, 21, size=(2, samples))

    def bad_mask():
        out = np.zeros(samples, dtype=bool)
        for shift in (0, n, m, m + n):
            f = _frac(y + shift * b)
            out |= (f < guard) | (f > 1 - guard)
        return out

    bad = bad_mask()
    while bad.any():
        y[bad] = rng.random(int(bad.sum()))
        bad = bad_mask()
    lhs = heisenberg_cocycle(a, b, m + n, x, y)
    rhs = heisenberg_cocycle(a, b, m, x + n * a, y + n * b) + heisenberg_cocycle(a, b, n, x, y)
    res = circle_dist(np.asarray(lhs) - rhs)
    worst = int(np.argmax(res))
    return {"kind": "heisenberg-cocycle-eq", "samples": samples, "max_residual": float(res[worst]),
            "tolerance": tol, "passed": bool(res[worst] < tol),
            "worst_sample": {"m": int(m[worst]), "n": int(n[worst]), "x": float(x[worst]), "y": float(y[worst])},
            "claim_ids": ["heisenberg.cocycle-eq"]}


def weyl_report(params, N=100_000, max_freq=3, threshold=0.05):
    orbit = skew_shift_orbit(params, N)
    rows = weyl_test(orbit, max_freq)
    worst = max(rows, key=lambda r: r["magnitude"])
    return {"alpha": params.alpha, "N": N, "max_freq": max_freq, "threshold": threshold,
            "max_magnitude": worst["magnitude"], "worst_frequency": worst["frequency"],
            "passed": worst["magnitude"] < threshold, "table": rows, "claim_ids": ["skew.weyl"]}
