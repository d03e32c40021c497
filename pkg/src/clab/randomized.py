"""Seeded random systems, cocycles and observables for property checks.

All draws go through ``numpy.random.Generator(PCG64(seed))`` so a seed
reproduces the same instances on every platform.

Systems are disjoint unions of coset spaces Gamma/S with orbit-constant
weights; some orbits get weight zero.  Cocycles over an orbit Gamma.b are
built from a homomorphism h: Stab(b) -> K through a section r of the orbit map,
rho_gamma(x) = h(gamma + r(x) - r(gamma x)), then shifted by a random
coboundary and a constant homomorphism.  Every cohomology class arises this way.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .abelian import FinAbGroup, hom_enumerate, subgroup_as_group, subgroup_closure
from .cocycle import Cocycle
from .system import FiniteSystem

SMALL_GROUPS = [(2,), (3,), (4,), (2, 2), (5,), (6,), (2, 4), (3, 3), (8,)]
SMALL_FIBERS = [(2,), (3,), (4,), (2, 2)]


def make_rng(seed=0):
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def random_group(rng, max_order=8, choices=SMALL_GROUPS):
    opts = [c for c in choices if int(np.prod(c)) <= max_order]
    return FinAbGroup(_pick(rng, opts))


def random_subgroup(rng, G):
    gens = [G.element(int(rng.integers(G.order))) for _ in range(int(rng.integers(0, 3)))]
    return sorted(subgroup_closure(G, gens))


def coset_space(G, S):
    """Points are cosets of S, ordered by their least element; returns (reps, actions)."""
    Sarr = np.array(S, dtype=np.int64).reshape(len(S), G.rank)
    all_el = G.element_array
    coset_of = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for idx in range(G.order):
        if coset_of[idx] < 0:
            members = G.encode(all_el[idx] + Sarr)
            coset_of[members] = len(reps)
            reps.append(idx)
    acts = []
    for g in G.generators():
        shifted = G.encode(all_el[reps] + np.array(g))
        acts.append(coset_of[shifted])
    return reps, np.array(acts, dtype=np.int64).reshape(G.rank, len(reps))


def random_system(rng, max_points=12, gamma=None, zero_prob=0.2, max_orbits=4):
    """Disjoint union of coset spaces with random orbit weights."""
    G = gamma if gamma is not None else random_group(rng, max_order=min(8, max_points))
    blocks, labels, total = [], [], 0
    while len(blocks) < max_orbits:
        S = random_subgroup(rng, G)
        reps, acts = coset_space(G, S)
        if total + len(reps) > max_points:
            if blocks:
                break
            continue
        blocks.append((acts, total))
        labels += [(len(blocks) - 1, tuple(G.element(r))) for r in reps]
        total += len(reps)
        if rng.random() < 0.35:
            break
    acts = np.concatenate([a + off for a, off in blocks], axis=1)
    raw = [0 if rng.random() < zero_prob else int(rng.integers(1, 5)) for _ in blocks]
    if not any(raw):
        raw[0] = 1
    w = []
    for (a, _), r in zip(blocks, raw):
        w += [r] * a.shape[1]
    tot = sum(w)
    return FiniteSystem(G, acts, [Fraction(x, tot) for x in w], labels)


def _orbit_structure(Y):
    """Per orbit: base point, stabilizer, and the lex-first group element reaching each point."""
    G = Y.gamma
    els = G.elements()
    pos = np.empty((G.order, Y.m), dtype=np.int64)
    for j, g in enumerate(els):
        p = np.arange(Y.m)
        for i, a in enumerate(g):
            for _ in range(a):
                p = Y.actions[i][p]
        pos[j] = p  # pos[j, y] = g . y
    rep = np.full(Y.m, -1, dtype=np.int64)
    stab = {}
    for y in range(Y.m):
        if rep[y] >= 0:
            continue
        reach = pos[:, y]
        for j in range(G.order - 1, -1, -1):
            rep[reach[j]] = j
        stab[y] = [els[j] for j in range(G.order) if reach[j] == y]
    base = np.empty(Y.m, dtype=np.int64)
    for b in stab:
        base[pos[:, b]] = b
    return pos, rep, base, stab


def random_cocycle(rng, Y, K, circle=False, coboundary=True, constant=True):
    """A random cocycle Y -> K; see the module docstring for the construction."""
    G = Y.gamma
    pos, rep, base, stab = _orbit_structure(Y)
    els = G.element_array
    h_of = {}
    for b, S in stab.items():
        H, emb = subgroup_as_group(G, S)
        homs = hom_enumerate(H, K)
        hom = homs[int(rng.integers(len(homs)))]
        h_of[b] = {emb(x): hom(x) for x in H.elements()}
    tables = np.zeros((G.rank, Y.m, K.rank), dtype=np.int64)
    for i, e in enumerate(G.generators()):
        for y in range(Y.m):
            gy = int(Y.actions[i][y])
            s = G.reduce(np.array(e) + els[rep[y]] - els[rep[gy]])
            tables[i, y] = h_of[int(base[y])][tuple(int(v) for v in s)]
    if coboundary:
        b = K.element_array[rng.integers(K.order, size=Y.m)]
        tables = tables + b[Y.actions] - b[None, :, :]
    if constant:
        homs = hom_enumerate(G, K)
        c = homs[int(rng.integers(len(homs)))]
        tables = tables + np.array([c(e) for e in G.generators()])[:, None, :]
    tables = K.reduce(tables)
    return Cocycle(Y, K, tables, circle=circle)


def random_observable(rng, X, complex_values=True):
    v = rng.standard_normal(X.m)
    if complex_values:
        v = v + 1j * rng.standard_normal(X.m)
    return v


def orthogonal_observable(rng, X, partition, complex_values=True):
    """A random f with zero conditional expectation onto the given factor."""
    f = random_observable(rng, X, complex_values)
    return f - partition.conditional_expectation(f)


def random_instances(seed, count, max_points=4, max_fiber=4, circle=False):
    """(Y, rho) pairs for the solver oracles."""
    rng = make_rng(seed)
    out = []
    while len(out) < count:
        Y = random_system(rng, max_points=max_points)
        K = FinAbGroup(_pick(rng, [c for c in SMALL_FIBERS if int(np.prod(c)) <= max_fiber]))
        out.append(random_cocycle(rng, Y, K, circle=circle,
                                  coboundary=bool(rng.random() < 0.7), constant=bool(rng.random() < 0.5)))
    return out
