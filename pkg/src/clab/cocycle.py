"""Cocycles over finite systems and the solvers built on them.

Fiber values are residue arrays of shape (points, rank).  A cyclic fiber
Z/M flagged ``circle=True`` is read as (1/M)Z/Z inside the circle; solvers
that need extra denominators (homomorphisms out of Gamma) lift to
Z/lcm(M, exp Gamma) first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .abelian import (CircleValue, FinAbGroup, GroupHom, annihilator, dual_group,
                      hom_enumerate, subgroup_as_group)
from .errors import (ConsistencyError, InternalConsistencyError, InvalidInput,
                     NotCL, NotCoboundary, NotQuasiCoboundary, NotTypeK,
                     PreconditionError)
from .system import (FiniteSystem, cube_system, ergodic_components, guard,
                     popcounts)


def _as_residues(K, circle, value):
    if circle:
        return (CircleValue.parse(value).residue(K.cyclic_orders[0]),)
    if isinstance(value, (int, np.integer)):
        value = (int(value),)
    return K.check(value)


def _fmt(K, circle, row):
    if circle:
        return str(CircleValue.of(int(row[0]), K.cyclic_orders[0]))
    return [int(v) for v in row]


@dataclass
class TransferFunction:
    """F: points -> fiber, stored as a (points, rank) residue array."""

    system: FiniteSystem
    fiber: FinAbGroup
    values: np.ndarray
    circle: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64).reshape(self.system.m, self.fiber.rank) \
            % self.fiber.moduli

    @classmethod
    def zero(cls, system, fiber, circle=False):
        return cls(system, fiber, np.zeros((system.m, fiber.rank), dtype=np.int64), circle)

    def is_zero(self):
        return not self.values[self.system.positive].any()

    def __add__(self, other):
        return TransferFunction(self.system, self.fiber, self.values + other.values, self.circle)

    def __sub__(self, other):
        return TransferFunction(self.system, self.fiber, self.values - other.values, self.circle)

    def __neg__(self):
        return TransferFunction(self.system, self.fiber, -self.values, self.circle)

    def compose(self, perm):
        """F o V for a point permutation V."""
        return TransferFunction(self.system, self.fiber, self.values[perm], self.circle)

    def equals_ae(self, other):
        pos = self.system.positive
        return np.array_equal(self.values[pos], other.values[pos])

    def value(self, y):
        row = self.values[y]
        if self.circle:
            return CircleValue.of(int(row[0]), self.fiber.cyclic_orders[0])
        return tuple(int(v) for v in row)

    def to_json(self):
        return [_fmt(self.fiber, self.circle, r) for r in self.values]


class Cocycle:
    """A (Y, K)-cocycle given by one table per generator of Gamma."""

    def __init__(self, base, fiber, tables, circle=False, validate=True):
        if circle and fiber.rank != 1:
            raise InvalidInput("circle mode needs a cyclic fiber Z/M")
        self.base = base
        self.fiber = fiber
        self.circle = circle
        t = np.asarray(tables, dtype=np.int64)
        self.tables = t.reshape(base.gamma.rank, base.m, fiber.rank) % fiber.moduli
        self.tables.setflags(write=False)
        if validate:
            self.check()

    @property
    def gamma(self):
        return self.base.gamma

    def check(self):
        """Raise ConsistencyError unless order and commutation relations hold a.e."""
        Y, K = self.base, self.fiber
        pos = Y.positive
        mods = K.moduli
        for i, n in enumerate(self.gamma.cyclic_orders):
            acc = np.zeros((Y.m, K.rank), dtype=np.int64)
            pts = np.arange(Y.m)
            for _ in range(n):
                acc = (acc + self.tables[i][pts]) % mods
                pts = Y.actions[i][pts]
            bad = np.flatnonzero(pos & acc.any(axis=1))
            if len(bad):
                y = int(bad[0])
                raise ConsistencyError(
                    f"order relation fails for generator {i} at point {y}",
                    {"relation": "order", "generator": i, "point": y,
                     "sum": _fmt(K, self.circle, acc[y])})
        for i in range(self.gamma.rank):
            for j in range(i + 1, self.gamma.rank):
                ti, tj = self.tables[i], self.tables[j]
                lhs = (ti[Y.actions[j]] + tj) % mods
                rhs = (tj[Y.actions[i]] + ti) % mods
                bad = np.flatnonzero(pos & (lhs != rhs).any(axis=1))
                if len(bad):
                    y = int(bad[0])
                    raise ConsistencyError(
                        f"commutation relation fails for generators {i},{j} at point {y}",
                        {"relation": "commutation", "generators": [i, j], "point": y})
        return True

    def value(self, gamma_el):
        """rho_gamma as a residue array, telescoped along e_1, e_2, ... in order."""
        Y = self.base
        acc = np.zeros((Y.m, self.fiber.rank), dtype=np.int64)
        pts = np.arange(Y.m)
        for i, e in enumerate(self.gamma.check(gamma_el)):
            for _ in range(e):
                acc = acc + self.tables[i][pts]
                pts = Y.actions[i][pts]
        return acc % self.fiber.moduli

    def with_tables(self, tables, validate=False):
        return Cocycle(self.base, self.fiber, tables, self.circle, validate=validate)

    def __add__(self, other):
        return self.with_tables(self.tables + other.tables)

    def __sub__(self, other):
        return self.with_tables(self.tables - other.tables)

    def __neg__(self):
        return self.with_tables(-self.tables)

    def is_zero(self):
        return not self.tables[:, self.base.positive].any()

    def equals_ae(self, other):
        pos = self.base.positive
        return np.array_equal(self.tables[:, pos], other.tables[:, pos])

    def constant(self, c):
        """The homomorphism c: Gamma -> fiber as a constant cocycle."""
        t = np.broadcast_to(c.matrix[:, None, :], (self.gamma.rank, self.base.m, self.fiber.rank))
        return self.with_tables(np.array(t))

    def lift(self, L):
        """Circle cocycle in Z/L for a multiple L of the current modulus."""
        if not self.circle:
            raise InvalidInput("only circle cocycles can be lifted")
        M = self.fiber.cyclic_orders[0]
        if L % M:
            raise InvalidInput(f"{L} is not a multiple of {M}")
        return Cocycle(self.base, FinAbGroup((L,)), self.tables * (L // M), True, validate=False)

    def entry(self, i, y):
        row = self.tables[i, y]
        if self.circle:
            return CircleValue.of(int(row[0]), self.fiber.cyclic_orders[0])
        return tuple(int(v) for v in row)

    def to_json(self, base_ref=None):
        return {"base": base_ref if base_ref is not None else self.base.to_json(),
                "fiber": {"cyclic": list(self.fiber.cyclic_orders), "circle": self.circle},
                "tables": [[_fmt(self.fiber, self.circle, r) for r in t] for t in self.tables]}

    @classmethod
    def from_json(cls, obj, base=None):
        try:
            if base is None:
                base = FiniteSystem.from_json(obj["base"])
            fib = obj["fiber"]
            K = FinAbGroup(tuple(fib["cyclic"]))
            circle = bool(fib.get("circle", False))
            tables = obj["tables"]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed cocycle JSON: {exc}") from exc
        return make_cocycle(base, K, tables, circle=circle)

    def __repr__(self):
        kind = f"(1/{self.fiber.cyclic_orders[0]})Z/Z" if self.circle else str(self.fiber)
        return f"Cocycle(base={self.base!r}, fiber={kind})"


def make_cocycle(Y, K, tables, circle=False):
    """Build and check a cocycle from nested per-generator, per-point values."""
    if len(tables) != Y.gamma.rank:
        raise InvalidInput(f"need {Y.gamma.rank} generator tables, got {len(tables)}")
    arr = np.zeros((Y.gamma.rank, Y.m, K.rank), dtype=np.int64)
    for i, t in enumerate(tables):
        if len(t) != Y.m:
            raise InvalidInput(f"table {i} has {len(t)} entries for {Y.m} points")
        for y, v in enumerate(t):
            arr[i, y] = _as_residues(K, circle, v)
    return Cocycle(Y, K, arr, circle)


def cocycle_from_function(Y, K, fn, circle=False, validate=True):
    """Tables from fn(i, label) giving rho_{e_i} at a point."""
    arr = np.zeros((Y.gamma.rank, Y.m, K.rank), dtype=np.int64)
    for i in range(Y.gamma.rank):
        for y in range(Y.m):
            arr[i, y] = _as_residues(K, circle, fn(i, Y.label(y)))
    return Cocycle(Y, K, arr, circle, validate=validate)


def derivative(F):
    Y = F.system
    tables = np.stack([F.values[perm] - F.values for perm in Y.actions]) if Y.gamma.rank else \
        np.zeros((0, Y.m, F.fiber.rank), dtype=np.int64)
    return Cocycle(Y, F.fiber, tables, F.circle, validate=False)


def translation(Y, z0):
    """Point permutation V_{z0} of a rotational system."""
    Z = Y.translation_group
    if Z is None:
        raise PreconditionError("base system is not rotational (no translation group)")
    z0 = Z.check(z0)
    return Z.encode(Z.element_array + np.array(z0, dtype=np.int64))


def translate_derivative(rho, z0):
    V = translation(rho.base, z0)
    return rho.with_tables(rho.tables[:, V] - rho.tables)


def cube_difference(rho, k):
    """Delta^[k] rho on the cube system X^[k]."""
    if k == 0:
        return rho
    C = cube_system(rho.base, k)
    signs = np.where(popcounts(k) % 2 == 1, -1, 1)
    tables = np.zeros((rho.gamma.rank, C.m, rho.fiber.rank), dtype=np.int64)
    for j, s in enumerate(signs):
        tables += s * rho.tables[:, C.vertices[:, j]]
    return Cocycle(C, rho.fiber, tables, rho.circle, validate=False)


def cube_transfer(F, k):
    """F^[k](x) = sum_omega (-1)^|omega| F(x_omega); d of it is Delta^[k] dF."""
    if k == 0:
        return F
    C = cube_system(F.system, k)
    signs = np.where(popcounts(k) % 2 == 1, -1, 1)
    vals = sum(s * F.values[C.vertices[:, j]] for j, s in enumerate(signs))
    return TransferFunction(C, F.fiber, vals, F.circle)


def coboundary_solve(sigma):
    """F with sigma = dF a.e., normalised to 0 at the lowest point of each orbit."""
    Y = sigma.base
    mask = Y.positive.astype(np.uint8)
    F, base, fail = kernels.propagate(Y.actions, sigma.tables, sigma.fiber.moduli, mask)
    bad = np.flatnonzero(fail[:, 0] >= 0)
    if len(bad):
        root = int(bad[0])
        i, y = int(fail[root, 0]), int(fail[root, 1])
        y2 = int(Y.actions[i, y])
        resid = (F[y] + sigma.tables[i, y] - F[y2]) % sigma.fiber.moduli
        raise NotCoboundary(
            f"orbit of point {root} is inconsistent at generator {i}, point {y}",
            {"orbit": root, "generator": i, "point": y,
             "value": _fmt(sigma.fiber, sigma.circle, resid)})
    F[~Y.positive] = 0
    return TransferFunction(Y, sigma.fiber, F, sigma.circle)


def is_coboundary(sigma):
    try:
        coboundary_solve(sigma)
        return True
    except NotCoboundary:
        return False


def hom_candidates(sigma):
    """Fiber for the homomorphism search and Hom(Gamma, fiber) in lexicographic order."""
    if sigma.circle:
        L = math.lcm(sigma.fiber.cyclic_orders[0], sigma.gamma.exponent)
        target = FinAbGroup((L,))
        sigma = sigma.lift(L)
    else:
        target = sigma.fiber
    homs = hom_enumerate(sigma.gamma, target)
    return sigma, homs


def constant_hom(sigma):
    """The homomorphism sigma equals if it is constant a.e., else None."""
    pos = sigma.base.positive
    if not pos.any():
        return None
    first = int(np.flatnonzero(pos)[0])
    rows = sigma.tables[:, first, :]
    if not np.array_equal(sigma.tables[:, pos], np.broadcast_to(rows[:, None, :], sigma.tables[:, pos].shape)):
        return None
    try:
        return GroupHom(sigma.gamma, sigma.fiber, tuple(tuple(int(v) for v in r) for r in rows))
    except InvalidInput:
        return None


def quasi_coboundary_solve(sigma, prefer_zero=True):
    """(F, c) with sigma = dF + c a.e.

    The zero transfer function is tried first (it is the witness the
    examples display); otherwise homomorphisms are scanned in lexicographic
    order and the first success is returned.  Circle cocycles come back
    lifted to Z/lcm(M, exp Gamma).
    """
    lifted, homs = hom_candidates(sigma)
    if prefer_zero:
        c = constant_hom(lifted)
        if c is not None:
            return TransferFunction.zero(lifted.base, lifted.fiber, lifted.circle), c
    for c in homs:
        try:
            return coboundary_solve(lifted - lifted.constant(c)), c
        except NotCoboundary:
            continue
    raise NotQuasiCoboundary(f"no homomorphism among {len(homs)} makes the cocycle a coboundary",
                             {"homomorphisms_tried": len(homs)})


def is_quasi_coboundary(sigma):
    try:
        quasi_coboundary_solve(sigma)
        return True
    except NotQuasiCoboundary:
        return False


def type_test(rho, k):
    """Certificate F^[k] with Delta^[k] rho = dF^[k]; raises NotTypeK."""
    D = cube_difference(rho, k)
    if D.is_zero():
        return TransferFunction.zero(D.base, D.fiber, D.circle)
    try:
        return coboundary_solve(D)
    except NotCoboundary as exc:
        raise NotTypeK(f"cocycle is not of type {k}: {exc}", dict(exc.witness, k=k)) from exc


def is_type(rho, k):
    try:
        type_test(rho, k)
        return True
    except NotTypeK:
        return False


@dataclass
class CLWitness:
    """Per z in Z: (F_z, c_z) with d_{V_z} rho = dF_z + c_z."""

    rho: Cocycle
    Z: FinAbGroup
    fiber: FinAbGroup
    circle: bool
    F: dict = field(repr=False)
    c: dict = field(repr=False)

    def lifted_rho(self):
        if self.rho.circle and self.fiber != self.rho.fiber:
            return self.rho.lift(self.fiber.cyclic_orders[0])
        return self.rho

    def verify(self):
        rho = self.lifted_rho()
        for z in self.Z.elements():
            lhs = translate_derivative(rho, z)
            rhs = derivative(self.F[z]) + rho.constant(self.c[z])
            if not lhs.equals_ae(rhs):
                raise InternalConsistencyError(f"Conze-Lesigne witness fails at z = {z}")
        return True

    def to_json(self):
        out = {}
        for z in self.Z.elements():
            c = self.c[z]
            imgs = [_fmt(self.fiber, self.circle, r) for r in c.matrix]
            out[",".join(map(str, z))] = {"F": self.F[z].to_json(), "c": imgs}
        return out


def cl_solve(rho):
    """Conze-Lesigne witness for a cocycle over a rotational base."""
    Y = rho.base
    Z = Y.translation_group
    if Z is None:
        raise PreconditionError("Conze-Lesigne solving needs a rotational base")
    guard(Z.order * Y.m, "Conze-Lesigne witness")
    gens_F, gens_c = [], []
    fiber, circle = rho.fiber, rho.circle
    for u in Z.generators():
        try:
            F, c = quasi_coboundary_solve(translate_derivative(rho, u))
        except NotQuasiCoboundary as exc:
            raise NotCL(f"d_V rho is not a quasi-coboundary for u = {u}", {"u": list(u)}) from exc
        gens_F.append(F)
        gens_c.append(c)
        fiber = F.fiber
    # all generator solutions share one lifted fiber; re-express unlifted ones
    gens_F = [_to_fiber(F, fiber) for F in gens_F]
    gens_c = [_hom_to_fiber(c, fiber) for c in gens_c]
    Fz = {Z.zero: TransferFunction.zero(Y, fiber, circle)}
    cz = {Z.zero: GroupHom.zero(rho.gamma, fiber)}
    # F_{z+u} = F_z o V_u + F_u, c_{z+u} = c_z + c_u
    for z in Z.elements():
        if z in Fz:
            continue
        j = max(i for i, v in enumerate(z) if v)
        prev = Z.sub(z, Z.generators()[j])
        V = translation(Y, Z.generators()[j])
        Fz[z] = Fz[prev].compose(V) + gens_F[j]
        cz[z] = cz[prev] + gens_c[j]
    w = CLWitness(rho, Z, fiber, circle, Fz, cz)
    w.verify()
    return w


def _to_fiber(F, fiber):
    if F.fiber == fiber:
        return F
    scale = fiber.cyclic_orders[0] // F.fiber.cyclic_orders[0]
    return TransferFunction(F.system, fiber, F.values * scale, F.circle)


def _hom_to_fiber(c, fiber):
    if c.target == fiber:
        return c
    scale = fiber.cyclic_orders[0] // c.target.cyclic_orders[0]
    return GroupHom(c.source, fiber, tuple((v[0] * scale,) for v in c.generator_images))


def cl_to_type2_witness(rho, w):
    """F^[2](z, z+s1, z+s2, z+s1+s2) = F_{s2}(z+s1) - F_{s2}(z).

    This is the sign that makes Delta^[2] rho = dF^[2] hold with
    Delta^[2] rho = rho(z) - rho(z+s1) - rho(z+s2) + rho(z+s1+s2).
    """
    rho_l = w.lifted_rho()
    Y = rho.base
    Z = w.Z
    C = cube_system(Y, 2)
    v = C.vertices
    s2 = Z.encode(Z.element_array[v[:, 2]] - Z.element_array[v[:, 0]])
    table = np.stack([w.F[z].values for z in Z.elements()])
    vals = table[s2, v[:, 1]] - table[s2, v[:, 0]]
    F2 = TransferFunction(C, w.fiber, vals, w.circle)
    if not cube_difference(rho_l, 2).equals_ae(derivative(F2)):
        raise InternalConsistencyError("Delta^[2] rho != dF^[2]: the Conze-Lesigne witness is invalid")
    return F2


def compose_character(rho, xi):
    """xi o rho as a circle cocycle in Z/exp(K) (Z/M itself for circle fibers)."""
    if rho.circle:
        return rho.with_tables(rho.tables * xi.coefficients[0])
    L = rho.fiber.exponent
    vals = xi.residues(rho.tables, L)[..., None]
    return Cocycle(rho.base, FinAbGroup((L,)), vals, True, validate=False)


def extension_build(rho):
    """Y x| K with T^gamma(y, k) = (T^gamma y, k + rho_gamma(y))."""
    Y, K = rho.base, rho.fiber
    n = K.order
    guard(Y.m * n, "extension")
    kk = K.element_array
    ys = np.repeat(np.arange(Y.m), n)
    ks = np.tile(np.arange(n), Y.m)
    acts = np.empty((rho.gamma.rank, Y.m * n), dtype=np.int64)
    for i in range(rho.gamma.rank):
        newk = K.encode(kk[ks] + rho.tables[i][ys])
        acts[i] = Y.actions[i][ys] * n + newk
    num = np.repeat(Y.weight_num, n)
    den = Y.weight_den * n
    g = math.gcd(int(np.gcd.reduce(num)), den)
    if rho.circle:
        klabs = [CircleValue.of(j, K.cyclic_orders[0]) for j in range(n)]
    else:
        klabs = K.elements()
    labels = [(Y.label(y), klabs[j]) for y in range(Y.m) for j in range(n)]
    X = FiniteSystem(rho.gamma, acts, labels=labels, validate=False, _num=num // g, _den=den // g)
    X.extension_of = rho
    return X


def ergodicity_test(rho):
    """(ergodic?, certificate) via coboundary checks of xi o rho, cross-checked by transitivity."""
    Y = rho.base
    if not Y.is_ergodic():
        raise PreconditionError("ergodicity test needs an ergodic base")
    _, chars = dual_group(rho.fiber)
    witness = None
    for xi in chars:
        if xi.is_trivial:
            continue
        try:
            F = coboundary_solve(compose_character(rho, xi))
        except NotCoboundary:
            continue
        witness = {"character": list(xi.coefficients), "F": F.to_json()}
        break
    ergodic = witness is None
    X = extension_build(rho)
    transitive = X.is_ergodic()
    if transitive != ergodic:
        raise InternalConsistencyError(
            f"character criterion says ergodic={ergodic} but the extension transitive={transitive}")
    n_comp = len(np.unique(X.orbit_labels()[X.positive]))
    return ergodic, {"ergodic": ergodic, "components": n_comp, "witness": witness}


@dataclass
class MackeyResult:
    H: list
    H_group: FinAbGroup
    embedding: GroupHom
    rho_prime: Cocycle
    F: TransferFunction
    annihilated: list

    def to_json(self):
        return {"H": [list(h) for h in self.H], "H_cyclic": list(self.H_group.cyclic_orders),
                "F": self.F.to_json(), "rho_prime_zero": self.rho_prime.is_zero(),
                "annihilated_characters": self.annihilated}


def mackey_reduce(rho, component):
    """Mackey group H, rho' = rho - dF valued in H and F, from one ergodic component."""
    Y, K = rho.base, rho.fiber
    n = K.order
    pts = getattr(component, "parent_points", None)
    parent = getattr(component, "parent", None)
    if pts is None or parent is None or parent.m != Y.m * n:
        raise PreconditionError("component must come from ergodic_components(extension_build(rho))")
    ys, ks = pts // n, pts % n
    covered = np.zeros(Y.m, dtype=bool)
    covered[ys] = True
    if not np.array_equal(covered, Y.positive):
        raise PreconditionError("component does not push down onto the full base")
    # fiber over y is a coset F(y) + H; F(y) is its smallest element
    order = np.lexsort((ks, ys))
    ys, ks = ys[order], ks[order]
    first = np.ones(len(ys), dtype=bool)
    first[1:] = ys[1:] != ys[:-1]
    Fidx = np.zeros(Y.m, dtype=np.int64)
    Fidx[ys[first]] = ks[first]
    kk = K.element_array
    F = TransferFunction(Y, K, kk[Fidx], rho.circle)
    y0 = int(ys[0])
    H = sorted(K.element(int(j)) for j in K.encode(kk[ks[ys == y0]] - kk[Fidx[y0]]))
    rho_p = rho - derivative(F)
    # independent route: H is the annihilator of {xi : xi o rho a coboundary}
    _, chars = dual_group(K)
    D = [xi for xi in chars if is_coboundary(compose_character(rho, xi))]
    if annihilator(K, D) != H:
        raise InternalConsistencyError("fiber stabilizer and annihilator disagree on the Mackey group")
    Hg, emb = subgroup_as_group(K, H)
    inv = {emb(h): h for h in Hg.elements()}
    pos = Y.positive
    tabs = np.zeros((rho.gamma.rank, Y.m, Hg.rank), dtype=np.int64)
    for i in range(rho.gamma.rank):
        for y in np.flatnonzero(pos):
            key = tuple(int(v) for v in rho_p.tables[i, y])
            if key not in inv:
                raise InternalConsistencyError("rho - dF leaves the Mackey group")
            tabs[i, y] = inv[key]
    rho_H = Cocycle(Y, Hg, tabs, False, validate=True)
    ergodic, _ = ergodicity_test(rho_H)
    if not ergodic:
        raise InternalConsistencyError("reduced cocycle is not ergodic")
    _check_component_iso(component, ys, ks, Fidx, K, rho_H, inv, order)
    return MackeyResult(H, Hg, emb, rho_H, F, [list(xi.coefficients) for xi in D])


def _check_component_iso(component, ys, ks, Fidx, K, rho_H, inv, order):
    """(y, k) -> (y, iota^-1(k - F(y))) must intertwine component and Y x| H."""
    Hg = rho_H.fiber
    X2 = extension_build(rho_H)
    kk = K.element_array
    hs = [inv[tuple(int(v) for v in r)] for r in K.reduce(kk[ks] - kk[Fidx[ys]])]
    image = np.empty(component.m, dtype=np.int64)
    image[order] = ys * Hg.order + np.array([Hg.index(h) for h in hs], dtype=np.int64)
    if len(np.unique(image)) != component.m or component.m != int(X2.positive.sum()):
        raise InternalConsistencyError("component and reduced extension differ in size")
    for i in range(component.gamma.rank):
        if not np.array_equal(image[component.actions[i]], X2.actions[i][image]):
            raise InternalConsistencyError("component map does not intertwine the actions")
