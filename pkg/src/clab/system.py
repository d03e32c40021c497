"""Finite measure-preserving Gamma-systems, cube systems and factors.

A :class:`FiniteSystem` is a weighted point set 0..m-1 with one permutation
per generator of Gamma.  Weights are exact: an int64 numerator array over a
common denominator.  Zero-weight points are kept but ignored by every
almost-everywhere statement.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .abelian import CircleValue, FinAbGroup, dual_group
from .errors import (InternalConsistencyError, InvalidAction, InvalidInput,
                     NoGap, SizeGuardError)

DEFAULT_MAX_ENUM = 10 ** 6
DEFAULT_MAX_CUBE = 3
GOWERS_TOL = 1e-9
_INT_LIMIT = 2 ** 62


def max_enum():
    """Enumeration cap, overridable with ``CLAB_MAX_ENUM``."""
    raw = os.environ.get("CLAB_MAX_ENUM")
    if raw is None:
        return DEFAULT_MAX_ENUM
    try:
        return int(float(raw))
    except ValueError as exc:
        raise InvalidInput(f"CLAB_MAX_ENUM={raw!r} is not a number") from exc


def guard(count, what):
    if count > max_enum():
        raise SizeGuardError(f"{what}: {count} items exceeds the cap {max_enum()} (set CLAB_MAX_ENUM)")


def _weights_from(weights, m):
    """(numerators, denominator) for weights given as rationals, strings or None."""
    if weights is None:
        return np.ones(m, dtype=np.int64), m
    fr = [Fraction(str(w)) if isinstance(w, str) else Fraction(w) for w in weights]
    if len(fr) != m:
        raise InvalidInput(f"{len(fr)} weights for {m} points")
    if any(w < 0 for w in fr):
        raise InvalidInput("weights must be nonnegative")
    den = math.lcm(*(w.denominator for w in fr)) if fr else 1
    num = [int(w * den) for w in fr]
    if sum(num) != den:
        raise InvalidInput(f"weights sum to {Fraction(sum(num), den)}, not 1")
    if den > _INT_LIMIT:
        raise InvalidInput("weight denominator too large")
    return np.array(num, dtype=np.int64), den


class FiniteSystem:
    """A finite measure-preserving Gamma-system.

    ``actions[i]`` is the permutation for the i-th standard generator of
    ``gamma``: point y goes to ``actions[i, y]``.
    """

    def __init__(self, gamma, actions, weights=None, labels=None, *, translation_group=None,
                 validate=True, _num=None, _den=None, vertices=None, root=None,
                 parent=None, parent_points=None):
        self.gamma = gamma
        acts = np.asarray(actions, dtype=np.int64)
        if acts.ndim == 1 and acts.size == 0:
            acts = acts.reshape(gamma.rank, 0)
        self.actions = acts
        self.m = acts.shape[1] if acts.ndim == 2 and acts.shape[0] else (
            len(_num) if _num is not None else len(weights) if weights is not None
            else len(labels) if labels is not None else 0)
        if acts.shape[0] == 0:
            self.actions = np.zeros((0, self.m), dtype=np.int64)
        if _num is not None:
            self.weight_num, self.weight_den = np.asarray(_num, dtype=np.int64), int(_den)
        else:
            self.weight_num, self.weight_den = _weights_from(weights, self.m)
        self._labels = list(labels) if labels is not None else None
        self.translation_group = translation_group
        self.vertices = vertices
        self.root = root
        self.parent = parent
        self.parent_points = parent_points
        self._cache = {}
        self.actions.setflags(write=False)
        self.weight_num.setflags(write=False)
        if validate:
            self._validate()

    def _validate(self):
        g, m = self.gamma.rank, self.m
        if self.actions.shape != (g, m):
            raise InvalidAction(f"need {g} generator permutations of {m} points, got shape {self.actions.shape}")
        ident = np.arange(m)
        for i, perm in enumerate(self.actions):
            if m and (perm.min() < 0 or perm.max() >= m or len(np.unique(perm)) != m):
                raise InvalidAction(f"generator {i} action is not a permutation")
            if not np.array_equal(self.weight_num[perm], self.weight_num):
                y = int(np.flatnonzero(self.weight_num[perm] != self.weight_num)[0])
                raise InvalidAction(f"generator {i} does not preserve the weight of point {y}")
            p = ident
            for _ in range(self.gamma.cyclic_orders[i]):
                p = perm[p]
            if not np.array_equal(p, ident):
                raise InvalidAction(f"generator {i} permutation order does not divide {self.gamma.cyclic_orders[i]}")
        for i in range(g):
            for j in range(i + 1, g):
                a, b = self.actions[i], self.actions[j]
                if not np.array_equal(a[b], b[a]):
                    raise InvalidAction(f"generators {i} and {j} do not commute")
        if self._labels is not None and len(self._labels) != m:
            raise InvalidInput("label count does not match point count")
        if self.translation_group is not None and self.translation_group.order != m:
            raise InvalidInput("translation group order does not match point count")

    # weights
    @property
    def weights(self):
        return [Fraction(int(a), self.weight_den) for a in self.weight_num]

    @property
    def weight_array(self):
        return self.weight_num / self.weight_den

    @property
    def positive(self):
        return self.weight_num > 0

    def weight(self, y):
        return Fraction(int(self.weight_num[y]), self.weight_den)

    # labels
    @property
    def labels(self):
        if self._labels is not None:
            return self._labels
        if self.vertices is not None:
            if "labels" not in self._cache:
                base = self.root.labels if self.root is not None and self.root.labels is not None else None
                if base is None:
                    out = [tuple(int(v) for v in row) for row in self.vertices]
                else:
                    out = [tuple(base[v] for v in row) for row in self.vertices.tolist()]
                self._cache["labels"] = out
            return self._cache["labels"]
        if self.translation_group is not None:
            return self.translation_group.elements()
        return None

    def label(self, y):
        labs = self.labels
        return labs[y] if labs is not None else y

    # group action
    def act(self, gamma_el, points=None):
        """Image of ``points`` (default all) under T^gamma."""
        pts = np.arange(self.m) if points is None else np.asarray(points, dtype=np.int64)
        for i, e in enumerate(self.gamma.check(gamma_el)):
            for _ in range(e):
                pts = self.actions[i][pts]
        return pts

    def orbit_labels(self):
        """Orbit id (lowest member index) of every point; zero-weight points are singletons."""
        if "orbits" not in self._cache:
            pos = self.positive
            a, b = [], []
            for perm in self.actions:
                sel = np.flatnonzero(pos)
                a.append(sel)
                b.append(perm[sel])
            a = np.concatenate(a) if a else np.zeros(0, dtype=np.int64)
            b = np.concatenate(b) if b else np.zeros(0, dtype=np.int64)
            self._cache["orbits"] = kernels.components(self.m, a, b)
        return self._cache["orbits"]

    def is_ergodic(self):
        orb = self.orbit_labels()[self.positive]
        return len(np.unique(orb)) == 1

    def to_json(self):
        out = {"gamma": self.gamma.to_json(), "points": self.m,
               "weights": [f"{w.numerator}/{w.denominator}" for w in self.weights],
               "actions": self.actions.tolist()}
        if self._labels is not None:
            out["labels"] = [_jsonable(x) for x in self._labels]
        if self.translation_group is not None:
            out["translation_group"] = self.translation_group.to_json()
        return out

    @classmethod
    def from_json(cls, obj):
        try:
            gamma = FinAbGroup.from_json(obj["gamma"])
            m = int(obj["points"])
            actions = obj["actions"]
            weights = obj.get("weights")
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed system JSON: {exc}") from exc
        tg = FinAbGroup.from_json(obj["translation_group"]) if obj.get("translation_group") else None
        labels = obj.get("labels")
        if labels is not None:
            labels = [_unjson(x) for x in labels]
        acts = np.asarray(actions, dtype=np.int64).reshape(gamma.rank, m)
        return cls(gamma, acts, weights, labels, translation_group=tg)

    def __repr__(self):
        return f"FiniteSystem(gamma={self.gamma}, points={self.m})"


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _unjson(x):
    if isinstance(x, list):
        return tuple(_unjson(v) for v in x)
    return x


@dataclass
class FactorPartition:
    """Gamma-invariant partition; ``block_of[y]`` is the lowest index in y's block."""

    system: FiniteSystem
    block_of: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.block_of = _canonical(np.asarray(self.block_of, dtype=np.int64))

    @property
    def blocks(self):
        order = np.argsort(self.block_of, kind="stable")
        _, starts = np.unique(self.block_of[order], return_index=True)
        return [sorted(chunk.tolist()) for chunk in np.split(order, starts[1:])]

    @property
    def n_blocks(self):
        return len(np.unique(self.block_of))

    def is_invariant(self):
        for perm in self.system.actions:
            # each block must map into a single block
            img = self.block_of[perm]
            pairs = np.unique(np.stack([self.block_of, img], axis=1), axis=0)
            if len(np.unique(pairs[:, 0])) != len(pairs):
                return False
        return True

    def refines(self, other):
        """True if every block of self sits inside a block of other."""
        pairs = np.unique(np.stack([self.block_of, other.block_of], axis=1), axis=0)
        return len(np.unique(pairs[:, 0])) == len(pairs)

    def __eq__(self, other):
        return isinstance(other, FactorPartition) and np.array_equal(self.block_of, other.block_of)

    def conditional_expectation(self, f):
        """Weighted block average of f (zero-weight blocks keep f)."""
        f = np.asarray(f, dtype=complex)
        w = self.system.weight_array
        _, inv = np.unique(self.block_of, return_inverse=True)
        num = np.bincount(inv, weights=(w * f).real) + 1j * np.bincount(inv, weights=(w * f).imag)
        den = np.bincount(inv, weights=w)
        out = f.copy()
        ok = den[inv] > 0
        out[ok] = num[inv][ok] / den[inv][ok]
        return out


def _canonical(labels):
    """Relabel so each block id is its lowest member index."""
    if labels.size == 0:
        return labels
    _, inv = np.unique(labels, return_inverse=True)
    mins = np.full(inv.max() + 1, len(labels), dtype=np.int64)
    np.minimum.at(mins, inv, np.arange(len(labels)))
    return mins[inv]


def singleton_partition(X):
    return FactorPartition(X, np.arange(X.m))


def make_rotational(Z, phi, weights=None):
    """Gamma acting on Z by z -> z + phi(gamma); points are Z in lexicographic order."""
    if phi.target != Z:
        raise InvalidInput("phi must map into Z")
    pts = Z.element_array
    actions = np.stack([Z.encode(pts + np.array(img, dtype=np.int64)) for img in phi.generator_images]) \
        if phi.source.rank else np.zeros((0, Z.order), dtype=np.int64)
    try:
        return FiniteSystem(phi.source, actions, weights, translation_group=Z)
    except InvalidAction as exc:
        raise InvalidInput(f"weights are not invariant: {exc}") from exc


def invariant_factor(X):
    if "invariant" not in X._cache:
        X._cache["invariant"] = FactorPartition(X, X.orbit_labels())
    return X._cache["invariant"]


def rel_product(X, P):
    """Relatively independent self-product of X over the partition P."""
    lab = P.block_of
    m = X.m
    _, blk = np.unique(lab, return_inverse=True)
    nb = blk.max() + 1 if m else 0
    block_w = np.bincount(blk, weights=None, minlength=nb) if m else np.zeros(0, dtype=np.int64)
    block_num = np.zeros(nb, dtype=np.int64)
    np.add.at(block_num, blk, X.weight_num)
    live_block = block_num > 0
    size = block_w.astype(np.int64)
    count = int(np.sum(size[live_block] ** 2))
    guard(count, "relative product")
    order = np.lexsort((np.arange(m), blk))
    start = np.zeros(nb, dtype=np.int64)
    if nb:
        start[1:] = np.cumsum(size)[:-1]
    xs_all = np.arange(m)[live_block[blk]] if m else np.zeros(0, dtype=np.int64)
    reps = size[blk[xs_all]]
    xs = np.repeat(xs_all, reps)
    offs = np.arange(len(xs)) - np.repeat(np.cumsum(reps) - reps, reps)
    xps = order[start[blk[xs]] + offs]
    # weights a_x a_x' / (D a_B) over the common denominator D * L
    L = math.lcm(*[int(v) for v in block_num[live_block]]) if live_block.any() else 1
    mult = [L // int(v) if v else 0 for v in block_num.tolist()]
    amax = int(X.weight_num.max()) if m else 0
    if amax * amax * max(mult, default=1) > _INT_LIMIT or X.weight_den * L > _INT_LIMIT:
        raise SizeGuardError("relative product weights overflow 64-bit exact arithmetic")
    mult = np.array(mult, dtype=np.int64)
    num = X.weight_num[xs] * X.weight_num[xps] * mult[blk[xs]]
    den = X.weight_den * L
    g = math.gcd(int(np.gcd.reduce(num)) if len(num) else 0, den)
    if g > 1:
        num //= g
        den //= g
    keys = xs * m + xps
    acts = np.empty((X.gamma.rank, len(xs)), dtype=np.int64)
    for i, perm in enumerate(X.actions):
        acts[i] = np.searchsorted(keys, perm[xs] * m + perm[xps])
    base_vert = X.vertices if X.vertices is not None else np.arange(m)[:, None]
    vertices = np.concatenate([base_vert[xs], base_vert[xps]], axis=1)
    root = X.root if X.vertices is not None else X
    return FiniteSystem(X.gamma, acts, validate=False, _num=num, _den=den,
                        vertices=vertices, root=root)


def cube_system(X, k, max_k=None):
    """Host-Kra cube system X^[k]; vertex j carries omega with bit i = omega_{i+1}."""
    cap = DEFAULT_MAX_CUBE if max_k is None else max_k
    if k < 0:
        raise InvalidInput("cube dimension must be >= 0")
    if k > cap:
        raise SizeGuardError(f"cube dimension {k} exceeds cap {cap}")
    if k == 0:
        return X
    key = ("cube", k)
    if key not in X._cache:
        prev = cube_system(X, k - 1, max_k=cap)
        X._cache[key] = rel_product(prev, invariant_factor(prev))
    return X._cache[key]


def cube_vertices(C, k):
    """Vertex array (points, 2^k) of a cube system, k = 0 allowed."""
    if k == 0:
        return np.arange(C.m)[:, None]
    return C.vertices


def popcounts(k):
    return np.array([bin(j).count("1") for j in range(2 ** k)], dtype=np.int64)


def hkz_factor(X, k):
    """Z^k: x_0 identified through shared x_* coordinates of X^[k+1]."""
    C = cube_system(X, k + 1)
    vert = C.vertices[C.positive]
    star = vert[:, 1:]
    _, sid = np.unique(star, axis=0, return_inverse=True)
    sid = np.asarray(sid).reshape(-1)
    lab = kernels.components(X.m + (sid.max() + 1 if len(sid) else 0), vert[:, 0], X.m + sid)
    return FactorPartition(X, lab[:X.m])


def kronecker_factor(X):
    """Eigenfunctions by orbit propagation and the partition they generate.

    Returns a list of (eigenvalue character, eigenfunction) pairs, one per
    consistent (character, orbit), and the factor partition.
    """
    if not X.positive.any():
        raise InvalidInput("system has no positive-weight point")
    G = X.gamma
    L = G.exponent
    mask = X.positive.astype(np.uint8)
    _, chars = dual_group(G)
    eig = []
    cols = []
    for lam in chars:
        steps = [c * (L // n) % L for c, n in zip(lam.coefficients, G.cyclic_orders)]
        tables = np.broadcast_to(np.array(steps, dtype=np.int64)[:, None, None], (G.rank, X.m, 1))
        F, base, fail = kernels.propagate(X.actions, np.ascontiguousarray(tables), [L], mask)
        ok = mask.astype(bool) & (fail[np.maximum(base, 0), 0] < 0)
        cols.append(np.where(ok, F[:, 0], -1))
        for root in np.unique(base[ok]):
            on = base == root
            f = np.zeros(X.m, dtype=complex)
            f[on] = np.exp(2j * np.pi * F[on, 0] / L)
            eig.append((lam, f))
    sig = np.stack([X.orbit_labels()] + cols, axis=1)
    _, inv = np.unique(sig, axis=0, return_inverse=True)
    lab = np.asarray(inv).reshape(-1)
    lab = np.where(X.positive, lab, -1 - np.arange(X.m))
    return eig, FactorPartition(X, lab)


def gowers_norm(X, f, k):
    if k < 1:
        raise InvalidInput("Gowers seminorm needs k >= 1")
    f = np.asarray(f, dtype=complex)
    if f.shape != (X.m,):
        raise InvalidInput("observable length does not match the system")
    C = cube_system(X, k)
    pos = C.positive
    vert = C.vertices[pos]
    odd = popcounts(k) % 2 == 1
    vals = f[vert]
    vals[:, odd] = np.conj(vals[:, odd])
    total = np.sum(C.weight_num[pos] * np.prod(vals, axis=1)) / C.weight_den
    if abs(total.imag) > GOWERS_TOL * max(1.0, abs(total)) or total.real < -GOWERS_TOL:
        raise InternalConsistencyError(f"cube average {total} is not a nonnegative real")
    # the root amplifies rounding noise, so averages below the rounding bound are zero
    scale = float(np.max(np.abs(f[X.positive]), initial=0.0)) ** (2 ** k)
    if total.real <= 64 * len(vert) * np.finfo(float).eps * scale:
        return 0.0
    return float(total.real ** (1.0 / 2 ** k))


def ergodic_components(X):
    orb = X.orbit_labels()
    out = []
    for root in np.unique(orb[X.positive]):
        pts = np.flatnonzero(orb == root)
        remap = np.full(X.m, -1, dtype=np.int64)
        remap[pts] = np.arange(len(pts))
        acts = remap[X.actions[:, pts]]
        num = X.weight_num[pts]
        s = int(num.sum())
        g = math.gcd(int(np.gcd.reduce(num)), s)
        labels = [X.label(int(p)) for p in pts]
        out.append(FiniteSystem(X.gamma, acts, labels=labels, validate=False,
                                _num=num // g, _den=s // g, parent=X, parent_points=pts))
    return out


@dataclass
class PhaseAction:
    """Unitary Gamma-action (U_i f)(x) = e(phase_i(x)/modulus) f(perm_i(x))."""

    gamma: FinAbGroup
    perms: np.ndarray
    phases: np.ndarray
    modulus: int

    def __post_init__(self):
        self.perms = np.asarray(self.perms, dtype=np.int64)
        self.phases = np.asarray(self.phases, dtype=np.int64) % self.modulus
        if self.perms.shape != self.phases.shape or self.perms.shape[0] != self.gamma.rank:
            raise InvalidAction("phase action needs one (perm, phase) table per generator")

    @classmethod
    def from_tables(cls, gamma, perms, circle_tables):
        vals = [[CircleValue.parse(v) for v in row] for row in circle_tables]
        M = math.lcm(1, *(v.denominator for row in vals for v in row))
        phases = [[v.residue(M) for v in row] for row in vals]
        return cls(gamma, perms, phases, M)

    @classmethod
    def koopman(cls, X):
        return cls(X.gamma, X.actions, np.zeros_like(X.actions), 1)

    @staticmethod
    def compose(a, b, M):
        """Operator U_a U_b as (perm, phase)."""
        pa, qa = a
        pb, qb = b
        return pb[pa], (qa + qb[pa]) % M

    def element(self, gamma_el):
        m = self.perms.shape[1]
        op = (np.arange(m), np.zeros(m, dtype=np.int64))
        for i, e in enumerate(self.gamma.check(gamma_el)):
            for _ in range(e):
                op = self.compose(op, (self.perms[i], self.phases[i]), self.modulus)
        return op

    def check(self):
        m = self.perms.shape[1]
        ident = (np.arange(m), np.zeros(m, dtype=np.int64))
        gens = [(self.perms[i], self.phases[i]) for i in range(self.gamma.rank)]
        for i, n in enumerate(self.gamma.cyclic_orders):
            op = ident
            for _ in range(n):
                op = self.compose(op, gens[i], self.modulus)
            if not (np.array_equal(op[0], ident[0]) and not op[1].any()):
                raise InvalidAction(f"U_{i} raised to its order {n} is not the identity")
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                a = self.compose(gens[i], gens[j], self.modulus)
                b = self.compose(gens[j], gens[i], self.modulus)
                if not (np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])):
                    raise InvalidAction(f"U_{i} and U_{j} do not commute")

    def apply(self, op, f):
        perm, phase = op
        return np.exp(2j * np.pi * phase / self.modulus) * f[perm]


def extract_joint_eigenfunction(X, U, g, tol=1e-9, max_iter=10_000):
    """Top eigenvector of A f = |Gamma|^-1 sum_gamma <f, U^gamma g> U^gamma g."""
    U.check()
    if U.perms.shape[1] != X.m:
        raise InvalidAction("phase action and system sizes differ")
    g = np.asarray(g, dtype=complex)
    w = X.weight_array
    norm = math.sqrt(float(np.sum(w * np.abs(g) ** 2)))
    if abs(norm - 1) > 1e-9:
        raise InvalidInput(f"guess must have unit norm, got {norm}")
    pos = X.positive
    sq = np.sqrt(w[pos])
    vecs = np.stack([sq * U.apply(U.element(gm), g)[pos] for gm in X.gamma.elements()], axis=1)
    B = vecs @ vecs.conj().T / X.gamma.order
    evals, evecs = np.linalg.eigh(B)
    gap = evals[-1] - (evals[-2] if len(evals) > 1 else 0.0)
    if gap < tol:
        raise NoGap(f"top eigenvalue {evals[-1]:.3g} is not isolated (gap {gap:.3g})")
    v = sq * g[pos]
    for _ in range(max_iter):
        nv = B @ v
        nv /= np.linalg.norm(nv)
        done = np.linalg.norm(nv - v) < tol * 1e-3
        v = nv
        if done:
            break
    top = evecs[:, -1]
    if abs(abs(np.vdot(top, v)) - 1) > max(tol, 1e-9):
        raise InternalConsistencyError("power iteration did not reach the top eigenvector")
    out = np.zeros(X.m, dtype=complex)
    out[pos] = v / sq
    lead = out[np.flatnonzero(np.abs(out) > 1e-12)[0]]
    return out * (abs(lead) / lead)


def eigen_residual(X, U, f):
    """max over generators of ||U_i f - lambda_i f|| with lambda_i = <U_i f, f>."""
    w = X.weight_array
    worst, lams = 0.0, []
    for i in range(X.gamma.rank):
        Uf = U.apply((U.perms[i], U.phases[i]), f)
        lam = np.sum(w * Uf * np.conj(f))
        lams.append(lam)
        worst = max(worst, math.sqrt(float(np.sum(w * np.abs(Uf - lam * f) ** 2))))
    return worst, lams
