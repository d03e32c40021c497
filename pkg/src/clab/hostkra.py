"""Host-Kra groups of finite extensions, translational certificates and joinings.

An element (u, F) is stored as the index of u in Z plus the array of fiber
indices of F over the points of Z.  The law is
(u, F)(u', F') = (u + u', F o V_{u'} + F').
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .abelian import FinAbGroup, GroupHom, abelian_structure, hom_enumerate, subgroup_as_group
from .cocycle import (CLWitness, Cocycle, TransferFunction, coboundary_solve, ergodicity_test,
                      extension_build, mackey_reduce, translate_derivative)
from .errors import (CertificateError, InternalConsistencyError, InvalidInput, NotCLSystem,
                     NotCoboundary, NotTransitive, PreconditionError, StructuralError)
from .system import FiniteSystem, ergodic_components, guard, make_rotational

TABLE_LIMIT = 1024
FULL_ASSOC_LIMIT = 256
_I64 = 2 ** 62


class FiniteGroupTable:
    """A finite group given by its multiplication table."""

    def __init__(self, table, identity=None):
        self.table = np.asarray(table, dtype=np.int64)
        n = self.n = self.table.shape[0]
        if self.table.shape != (n, n):
            raise InvalidInput("multiplication table must be square")
        if identity is None:
            hits = [e for e in range(n) if np.array_equal(self.table[e], np.arange(n))
                    and np.array_equal(self.table[:, e], np.arange(n))]
            if not hits:
                raise InvalidInput("table has no identity")
            identity = hits[0]
        self.identity = int(identity)
        inv = np.argmax(self.table == self.identity, axis=1)
        if not np.all(self.table[np.arange(n), inv] == self.identity):
            raise InvalidInput("some element has no inverse")
        self.inverse = inv

    @classmethod
    def from_function(cls, elements, mul):
        index = {x: i for i, x in enumerate(elements)}
        table = [[index[mul(a, b)] for b in elements] for a in elements]
        return cls(table)

    def mul(self, a, b):
        return self.table[a, b]

    def commutator(self, a, b):
        """[a, b] = a b a^-1 b^-1."""
        t, inv = self.table, self.inverse
        return t[t[a, b], t[inv[a], inv[b]]]

    def closure(self, gens):
        seen = {self.identity}
        frontier = [self.identity]
        gens = [int(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def is_subgroup(self, S):
        S = np.asarray(sorted(set(int(s) for s in S)), dtype=np.int64)
        if self.identity not in S:
            return False
        prod = self.table[np.ix_(S, self.inverse[S])]
        return bool(np.isin(prod, S).all())

    def check_axioms(self, samples=10_000, seed=0):
        n = self.n
        t = self.table
        if n <= FULL_ASSOC_LIMIT:
            a = np.arange(n)
            lhs = t[t[a[:, None], a[None, :]][:, :, None], a[None, None, :]]
            rhs = t[a[:, None, None], t[a[:, None], a[None, :]][None, :, :]]
            ok = np.array_equal(lhs, rhs)
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, n, size=(3, samples))
            ok = np.array_equal(t[t[a, b], c], t[a, t[b, c]])
        return ok


class HKGroup:
    """The Host-Kra group of an extension Z x|_rho K with rho over a rotational base."""

    def __init__(self, rho, U, Fk):
        self.rho = rho
        Y = rho.base
        self.Z = Y.translation_group
        self.K = rho.fiber
        self.U = U
        self.Fk = Fk
        self.n = len(U)
        zarr = self.Z.element_array
        self._zarr = zarr
        self.V = self.Z.encode(zarr[:, None, :] + zarr[None, :, :])  # V[u][z] = z + u
        self._zneg = self.Z.encode(-zarr)
        karr = self.K.element_array
        self._kadd = self.K.encode(karr[:, None, :] + karr[None, :, :])
        self._kneg = self.K.encode(-karr)
        m, nk = Y.m, self.K.order
        self._int_keys = self.Z.order * float(nk) ** m < _I64
        if self._int_keys:
            self._pow = nk ** np.arange(m - 1, -1, -1, dtype=np.int64)
            self._keys = self._key(U, Fk)
            if np.any(np.diff(self._keys) <= 0):
                raise InternalConsistencyError("element keys are not strictly increasing")
        else:
            self._index = {self._bkey(u, f): i for i, (u, f) in enumerate(zip(U.tolist(), Fk))}
        self._cache = {}

    def _key(self, U, Fk):
        return U * (self.K.order ** self.rho.base.m) + Fk @ self._pow

    @staticmethod
    def _bkey(u, f):
        return (int(u), np.ascontiguousarray(f, dtype=np.int64).tobytes())

    def lookup(self, U, Fk):
        if self._int_keys:
            keys = self._key(U, Fk)
            idx = np.searchsorted(self._keys, keys)
            idx = np.minimum(idx, self.n - 1)
            if not np.array_equal(self._keys[idx], keys):
                raise StructuralError("product left the enumerated group (closure failure)")
            return idx
        try:
            return np.array([self._index[self._bkey(u, f)] for u, f in zip(U.tolist(), Fk)],
                            dtype=np.int64)
        except KeyError as exc:
            raise StructuralError("product left the enumerated group (closure failure)") from exc

    # arithmetic on element indices
    def raw_mul(self, a, b):
        a, b = np.atleast_1d(a), np.atleast_1d(b)
        U = self.Z.encode(self._zarr[self.U[a]] + self._zarr[self.U[b]])
        Fa = np.take_along_axis(self.Fk[a], self.V[self.U[b]], axis=1)
        return U, self._kadd[Fa, self.Fk[b]]

    def mul(self, a, b):
        if "table" in self._cache:
            return self._cache["table"][a, b]
        return self.lookup(*self.raw_mul(a, b))

    def inv(self, a):
        a = np.atleast_1d(a)
        nu = self._zneg[self.U[a]]
        F = self._kneg[np.take_along_axis(self.Fk[a], self.V[nu], axis=1)]
        return self.lookup(nu, F)

    def commutator(self, a, b):
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def table(self):
        if "table" not in self._cache:
            if self.n > TABLE_LIMIT:
                raise StructuralError(f"group of order {self.n} is too large for a full table")
            a = np.repeat(np.arange(self.n), self.n)
            b = np.tile(np.arange(self.n), self.n)
            self._cache["table"] = self.lookup(*self.raw_mul(a, b)).reshape(self.n, self.n)
        return self._cache["table"]

    def to_table(self):
        return FiniteGroupTable(self.table(), identity=self.identity)

    @property
    def identity(self):
        return int(self.lookup(np.array([0]), np.zeros((1, self.rho.base.m), dtype=np.int64))[0])

    def element(self, i):
        u = self.Z.element(int(self.U[i]))
        F = TransferFunction(self.rho.base, self.K, self.K.element_array[self.Fk[i]], self.rho.circle)
        return u, F

    def find(self, u, F):
        """Index of (u, F) given as a Z element and a TransferFunction."""
        return int(self.lookup(np.array([self.Z.index(u)]), self.K.encode(F.values)[None, :])[0])

    @property
    def H(self):
        return np.flatnonzero(self.U == 0)

    @property
    def G2(self):
        pos = self.rho.base.positive
        F = self.Fk[:, pos]
        const = (F == F[:, :1]).all(axis=1)
        return np.flatnonzero((self.U == 0) & const)

    def is_g2(self, idx):
        return np.isin(idx, self.G2)

    def generators(self):
        """A small generating set, greedy over the canonical order."""
        if "gens" in self._cache:
            return self._cache["gens"]
        gens, span = [], {self.identity}
        for g in range(self.n):
            if g in span:
                continue
            gens.append(g)
            span = set(self.closure(gens))
            if len(span) == self.n:
                break
        self._cache["gens"] = gens
        return gens

    def closure(self, gens):
        seen = {self.identity}
        frontier = np.array([self.identity])
        gens = np.asarray(gens, dtype=np.int64)
        while len(frontier) and len(gens):
            a = np.repeat(frontier, len(gens))
            b = np.tile(gens, len(frontier))
            prod = np.unique(self.mul(a, b))
            new = [int(x) for x in prod if int(x) not in seen]
            seen.update(new)
            frontier = np.array(new, dtype=np.int64)
        return sorted(seen)

    def brief_commutator(self, a, b):
        """(0, (d_{u'}F - d_u F') o V_{-u-u'}) as (u index, F indices)."""
        u, F = self.U[a], self.Fk[a]
        up, Fp = self.U[b], self.Fk[b]
        ka, kn = self._kadd, self._kneg
        dF = ka[F[self.V[up]], kn[F]]
        dFp = ka[Fp[self.V[u]], kn[Fp]]
        diff = ka[dF, kn[dFp]]
        w = self._zneg[self.Z.encode(self._zarr[u] + self._zarr[up])]
        return 0, diff[self.V[w]]


def host_kra_group(rho):
    """Enumerate G = {(u, F) : d_{V_u} rho - dF is a homomorphism}."""
    Y = rho.base
    Z = Y.translation_group
    if Z is None:
        raise PreconditionError("Host-Kra group needs a rotational base")
    pos = Y.positive
    if not pos.all() or len(set(Y.weight_num.tolist())) != 1:
        raise PreconditionError("Host-Kra group needs Haar (uniform) weights on Z")
    K = rho.fiber
    homs = hom_enumerate(rho.gamma, K)
    orbits = Y.orbit_labels()
    roots, orbit_idx = np.unique(orbits, return_inverse=True)
    orbit_idx = np.asarray(orbit_idx).reshape(-1)
    nconst = K.order ** len(roots)
    Us, Fs = [], []
    for ui, u in enumerate(Z.elements()):
        sigma = translate_derivative(rho, u)
        parts = []
        for c in homs:
            try:
                parts.append(K.encode(coboundary_solve(sigma - sigma.constant(c)).values))
            except NotCoboundary:
                continue
        if not parts:
            raise NotCLSystem(f"no solution F for u = {u}", {"u": list(u)})
        # every nonempty solution set is a coset of the same kernel
        guard(Z.order * len(parts) * nconst, "Host-Kra group")
        consts = K.element_array[_all_indices(K.order, len(roots))]  # (nconst, r, rank)
        base = K.element_array[np.array(parts)]  # (nc, m, rank)
        F = base[:, None, :, :] + consts[None, :, orbit_idx, :]
        Fk = K.encode(F.reshape(-1, Y.m, K.rank))
        Us.append(np.full(len(Fk), ui, dtype=np.int64))
        Fs.append(Fk)
    U = np.concatenate(Us)
    Fk = np.concatenate(Fs)
    order = np.lexsort(tuple(Fk[:, j] for j in range(Y.m - 1, -1, -1)) + (U,))
    U, Fk = U[order], Fk[order]
    keep = np.ones(len(U), dtype=bool)
    keep[1:] = (U[1:] != U[:-1]) | (Fk[1:] != Fk[:-1]).any(axis=1)
    return HKGroup(rho, U[keep], Fk[keep])


def _all_indices(base, r):
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(base)] * r), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def structure_report(G, check_axioms=True):
    """Commutators, [G,G], center, G2 and the short exact sequence."""
    gens = G.generators()
    ga = np.repeat(gens, len(gens))
    gb = np.tile(gens, len(gens))
    comms = G.commutator(ga, gb) if len(gens) else np.zeros(0, dtype=np.int64)
    g2 = set(G.G2.tolist())
    for a, b, c in zip(ga.tolist(), gb.tolist(), np.atleast_1d(comms).tolist()):
        u0, Fb = G.brief_commutator(a, b)
        if G.U[c] != u0 or not np.array_equal(G.Fk[c], Fb):
            raise StructuralError("commutator differs from the closed formula", {"pair": [a, b]})
        if c not in g2:
            raise StructuralError("commutator is not of the form (0, constant)", {"pair": [a, b]})
    comm_group = G.closure(sorted(set(np.atleast_1d(comms).tolist())))
    # center: elements commuting with every generator
    n = G.n
    central = np.ones(n, dtype=bool)
    allx = np.arange(n)
    for g in gens:
        gx = np.full(n, g)
        central &= G.mul(allx, gx) == G.mul(gx, allx)
    center = np.flatnonzero(central).tolist()
    if not set(comm_group) <= g2:
        raise StructuralError("[G,G] is not inside G2")
    if not g2 <= set(center):
        bad = sorted(g2 - set(center))[0]
        raise StructuralError("G2 is not central", {"element": bad})
    H = G.H
    Z = G.Z
    surjective = len(np.unique(G.U)) == Z.order
    if not surjective or n != len(H) * Z.order:
        raise StructuralError("|G| != |H| |Z| or the projection to Z is not onto")
    # projection is a homomorphism by construction of the law; spot check on generators
    prod_u = G.U[G.mul(ga, gb)] if len(gens) else np.zeros(0)
    if not np.array_equal(prod_u, Z.encode(Z.element_array[G.U[ga]] + Z.element_array[G.U[gb]])):
        raise StructuralError("projection (u, F) -> u is not a homomorphism")
    out = {"order": n, "z_order": Z.order, "h_order": int(len(H)), "g2_order": len(g2),
           "commutator_order": len(comm_group), "center_order": len(center),
           "commutator_subgroup": comm_group, "n_generators": len(gens),
           "commutators_in_g2": True, "g2_central": True, "short_exact": True}
    if check_axioms:
        out["axioms"] = check_group_axioms(G)
        if not out["axioms"]:
            raise StructuralError("group axioms fail")
    return out


def check_group_axioms(G, samples=10_000, seed=0):
    e = G.identity
    allx = np.arange(G.n)
    ee = np.full(G.n, e)
    if not (np.array_equal(G.mul(allx, ee), allx) and np.array_equal(G.mul(ee, allx), allx)):
        return False
    if not np.array_equal(G.mul(allx, G.inv(allx)), ee):
        return False
    if G.n <= FULL_ASSOC_LIMIT:
        return G.to_table().check_axioms()
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, G.n, size=(3, samples))
    return bool(np.array_equal(G.mul(G.mul(a, b), c), G.mul(a, G.mul(b, c))))


def act(G, X, g, x):
    """(u, F)(z, k) = (z + u, k + F(z)) on the extension points y * |K| + k."""
    nk = G.K.order
    z, k = x // nk, x % nk
    return G.V[G.U[g], z] * nk + G._kadd[k, G.Fk[g, z]]


def gamma_image(G, i):
    """phi(e_i) = (phi_Z(e_i), rho_{e_i}) as an element index of G."""
    Y = G.rho.base
    u = int(Y.actions[i, 0])  # translation by phi(e_i) sends 0 to it
    Fk = G.K.encode(G.rho.tables[i])
    return int(G.lookup(np.array([u]), Fk[None, :])[0])


@dataclass
class TranslationalCertificate:
    Lambda: list
    x0: int
    coset_map: dict = field(repr=False)
    report: dict = field(default_factory=dict)


def translational_certificate(G, X, x0=0):
    """Stabilizer Lambda of x0 and the bijection G/Lambda <-> X."""
    if X.m != G.rho.base.m * G.K.order:
        raise PreconditionError("X must be extension_build(rho) for the group's rho")
    if not X.positive[x0]:
        raise PreconditionError("base point must have positive weight")
    allg = np.arange(G.n)
    orbit = act(G, X, allg, np.full(G.n, x0))
    pos = np.flatnonzero(X.positive)
    if not np.array_equal(np.unique(orbit), pos):
        raise NotTransitive("G does not act transitively on the positive-weight points",
                            {"orbit_size": int(len(np.unique(orbit))), "points": int(len(pos))})
    # the action is a left action: (gh)x = g(hx), checked on generators
    gens = G.generators()
    for g in gens:
        for h in gens:
            gh = int(G.mul(np.array([g]), np.array([h]))[0])
            if act(G, X, gh, pos).tolist() != act(G, X, np.full(len(pos), g),
                                                  act(G, X, np.full(len(pos), h), pos)).tolist():
                raise CertificateError("(u, F)(z, k) = (z + u, k + F(z)) is not a group action")
    Lam = np.flatnonzero(orbit == x0)
    g2 = set(G.G2.tolist())
    inter = [int(l) for l in Lam if int(l) in g2]
    if inter != [G.identity]:
        raise CertificateError("Lambda meets G2 nontrivially", {"intersection": inter})
    la = np.repeat(Lam, len(Lam))
    lb = np.tile(Lam, len(Lam))
    if not np.array_equal(G.mul(la, lb), G.mul(lb, la)):
        raise CertificateError("Lambda is not abelian")
    if G.n != len(Lam) * len(pos):
        raise CertificateError("|G| != |Lambda| |X|")
    # Gamma acts through phi(gamma) = (phi_Z(gamma), rho_gamma)
    for i in range(G.rho.gamma.rank):
        gi = gamma_image(G, i)
        if not np.array_equal(act(G, X, np.full(len(pos), gi), pos), X.actions[i][pos]):
            raise CertificateError(f"generator {i} does not act through phi")
    coset_map = {}
    for g, x in zip(allg.tolist(), orbit.tolist()):
        coset_map.setdefault(x, g)
    report = {"lambda_order": int(len(Lam)), "points": int(len(pos)), "transitive": True,
              "lambda_abelian": True, "lambda_meets_g2_trivially": True,
              "index_matches": True, "gamma_acts_through_phi": True}
    return TranslationalCertificate(Lam.tolist(), int(x0), coset_map, report)


@dataclass
class TranslationalData:
    Z: FinAbGroup
    K: FinAbGroup
    rho: Cocycle
    witness: CLWitness
    section: list
    coset_of: np.ndarray = field(repr=False)
    g2_coords: dict = field(repr=False)


def translational_to_extension(T, Lambda, G2, phi, gamma):
    """Read Z = G/(G2 Lambda), K = G2, rho and a Conze-Lesigne witness off a group table.

    ``phi`` lists the images in T of the standard generators of ``gamma``.
    """
    n, t, inv = T.n, T.table, T.inverse
    Lambda = sorted(set(int(x) for x in Lambda))
    G2 = sorted(set(int(x) for x in G2))
    phi = [int(p) for p in phi]
    if len(phi) != gamma.rank:
        raise PreconditionError("phi needs one image per generator of Gamma")
    if not T.is_subgroup(G2):
        raise PreconditionError("G2 is not a subgroup")
    allx = np.arange(n)
    for g in G2:
        if not np.array_equal(t[g], t[:, g]):
            raise PreconditionError("G2 is not central")
    if n <= TABLE_LIMIT:
        comm = T.commutator(allx[:, None], allx[None, :])
        if not np.isin(comm, G2).all():
            raise PreconditionError("[G, G] is not contained in G2")
    if not T.is_subgroup(Lambda):
        raise PreconditionError("Lambda is not a subgroup")
    if set(Lambda) & set(G2) != {T.identity}:
        raise PreconditionError("Lambda meets G2 nontrivially")
    for i, a in enumerate(phi):
        for b in phi[i + 1:]:
            if t[a, b] != t[b, a]:
                raise PreconditionError("phi is not a homomorphism (images do not commute)")
        p = T.identity
        for _ in range(gamma.cyclic_orders[i]):
            p = t[p, a]
        if p != T.identity:
            raise PreconditionError("phi is not a homomorphism (order relation)")
    # N = G2 Lambda, with unique decomposition h = g2 lambda
    dec = {}
    for g2 in G2:
        for lam in Lambda:
            dec[int(t[g2, lam])] = g2
    N = np.array(sorted(dec), dtype=np.int64)
    coset_of = t[:, N].min(axis=1)
    reps = sorted(set(coset_of.tolist()))

    def qadd(a, b):
        return int(coset_of[t[a, b]])

    orders, gens = abelian_structure(reps, qadd, int(coset_of[T.identity]))
    Z = FinAbGroup(orders)
    rep_of = {}
    for z in Z.elements():
        g = int(coset_of[T.identity])
        for a, gen in zip(z, gens):
            for _ in range(a):
                g = qadd(g, gen)
        rep_of[g] = z
    if len(rep_of) != len(reps):
        raise InternalConsistencyError("quotient coordinates are not a bijection")
    korders, kgens = abelian_structure(G2, lambda a, b: int(t[a, b]), T.identity)
    K = FinAbGroup(korders)
    kcoord = {}
    for k in K.elements():
        g = T.identity
        for a, gen in zip(k, kgens):
            for _ in range(a):
                g = int(t[g, gen])
        kcoord[g] = k
    section = [None] * Z.order
    for r in reps:
        section[Z.index(rep_of[r])] = r
    zidx = {r: Z.index(rep_of[r]) for r in reps}

    def coset_index(g):
        return zidx[int(coset_of[g])]

    phiZ = GroupHom(gamma, Z, tuple(rep_of[int(coset_of[p])] for p in phi))
    Y = make_rotational(Z, phiZ)
    tables = np.zeros((gamma.rank, Z.order, K.rank), dtype=np.int64)
    for i, p in enumerate(phi):
        for zi, g in enumerate(section):
            h = int(t[p, g])
            s2 = section[coset_index(h)]
            tables[i, zi] = kcoord[dec[int(t[inv[s2], h])]]
    rho = Cocycle(Y, K, tables)
    Fz, cz = {}, {}
    for z0 in Z.elements():
        g0 = section[Z.index(z0)]
        vals = np.zeros((Z.order, K.rank), dtype=np.int64)
        for zi, g in enumerate(section):
            h = int(t[g0, g])
            s2 = section[coset_index(h)]
            vals[zi] = kcoord[dec[int(t[inv[s2], h])]]
        Fz[z0] = TransferFunction(Y, K, vals)
        imgs = []
        for p in phi:
            c = int(T.commutator(g0, p))
            imgs.append(K.neg(kcoord[c]))
        cz[z0] = GroupHom(gamma, K, tuple(imgs))
    w = CLWitness(rho, Z, K, False, Fz, cz)
    w.verify()
    return TranslationalData(Z, K, rho, w, section, coset_of, kcoord)


def round_trip(rho, x0=0):
    """rho -> Host-Kra group -> translational data -> rho', certified cohomologous to rho."""
    G = host_kra_group(rho)
    X = extension_build(rho)
    cert = translational_certificate(G, X, x0)
    T = G.to_table()
    phi = [gamma_image(G, i) for i in range(rho.gamma.rank)]
    data = translational_to_extension(T, cert.Lambda, G.G2.tolist(), phi, rho.gamma)
    # G2 Lambda = H, so cosets are read by their u; G2 elements by their constant
    Zo = G.Z
    zmap = np.zeros(data.Z.order, dtype=np.int64)
    for zi, g in enumerate(data.section):
        zmap[zi] = G.U[g]
    kmap = {}
    for g, k in data.g2_coords.items():
        kmap[k] = G.K.element(int(G.Fk[g, 0]))
    inv_z = np.empty(Zo.order, dtype=np.int64)
    inv_z[zmap] = np.arange(data.Z.order)
    tabs = np.zeros_like(rho.tables)
    for i in range(rho.gamma.rank):
        for z in range(Zo.order):
            tabs[i, z] = kmap[tuple(int(v) for v in data.rho.tables[i, inv_z[z]])]
    rho2 = Cocycle(rho.base, rho.fiber, tabs, rho.circle)
    F = coboundary_solve(rho - rho2)
    return {"group_order": G.n, "lambda_order": len(cert.Lambda), "Z_order": data.Z.order,
            "K_order": data.K.order, "cohomologous": True, "transfer": F.to_json(),
            "rho_prime": rho2}


# joinings

def product_cocycle(rho1, rho2):
    """rho1 x rho2 over the product rotation Z1 x Z2 into K1 x K2."""
    Y1, Y2 = rho1.base, rho2.base
    if Y1.gamma != Y2.gamma:
        raise PreconditionError("both factors must be Gamma-systems for the same Gamma")
    Z1, Z2 = Y1.translation_group, Y2.translation_group
    if Z1 is None or Z2 is None:
        raise PreconditionError("joining analysis needs rotational bases")
    Z = Z1.product(Z2)
    gam = Y1.gamma
    imgs = tuple(Z1.element(int(Y1.actions[i, 0])) + Z2.element(int(Y2.actions[i, 0]))
                 for i in range(gam.rank))
    Y = make_rotational(Z, GroupHom(gam, Z, imgs))
    K = rho1.fiber.product(rho2.fiber)
    m1, m2 = Y1.m, Y2.m
    t = np.concatenate([np.repeat(rho1.tables, m2, axis=1), np.tile(rho2.tables, (1, m1, 1))], axis=2)
    return Cocycle(Y, K, t)


def product_joining(X1, X2):
    """Independent coupling: product weights, diagonal action."""
    num = np.outer(X1.weight_num, X2.weight_num).ravel()
    den = X1.weight_den * X2.weight_den
    g = math.gcd(int(np.gcd.reduce(num)), den)
    return _joint(X1, X2, num // g, den // g)


def diagonal_joining(X):
    num = np.zeros(X.m * X.m, dtype=np.int64)
    num[np.arange(X.m) * X.m + np.arange(X.m)] = X.weight_num
    return _joint(X, X, num, X.weight_den)


def _joint(X1, X2, num, den, validate=True):
    m2 = X2.m
    acts = X1.actions[:, :, None] * m2 + X2.actions[:, None, :]
    acts = acts.reshape(X1.gamma.rank, -1)
    if validate:
        from fractions import Fraction
        return FiniteSystem(X1.gamma, acts, [Fraction(int(a), den) for a in num])
    return FiniteSystem(X1.gamma, acts, validate=False, _num=num, _den=den)


def joining_from_weights(X1, X2, weights):
    """Diagonal-action system on X1 x X2 with the given joint weights (not validated)."""
    from fractions import Fraction
    fr = [Fraction(w) if not isinstance(w, str) else Fraction(w) for w in weights]
    den = math.lcm(*(w.denominator for w in fr))
    num = np.array([int(w * den) for w in fr], dtype=np.int64)
    return _joint(X1, X2, num, den, validate=False)


def joining_good(X1, X2, joint):
    """Per ergodic component of a joining: coset check, Mackey reduction and certificate."""
    rho1 = getattr(X1, "extension_of", None)
    rho2 = getattr(X2, "extension_of", None)
    if rho1 is None or rho2 is None:
        raise PreconditionError("X1 and X2 must be built with extension_build")
    m1, m2 = X1.m, X2.m
    if joint.m != m1 * m2:
        raise PreconditionError("joint system is not on the product X1 x X2")
    diag = (X1.actions[:, :, None] * m2 + X2.actions[:, None, :]).reshape(X1.gamma.rank, -1)
    if not np.array_equal(joint.actions, diag):
        raise PreconditionError("joint action is not the diagonal action")
    for perm in joint.actions:
        if not np.array_equal(joint.weight_num[perm], joint.weight_num):
            raise PreconditionError("joint weights are not invariant")
    w = joint.weight_num.reshape(m1, m2)
    from fractions import Fraction
    for marg, X in ((w.sum(axis=1), X1), (w.sum(axis=0), X2)):
        got = [Fraction(int(a), joint.weight_den) for a in marg]
        if got != X.weights:
            raise PreconditionError("joint does not project onto the factor weights")
    rho = product_cocycle(rho1, rho2)
    K1, K2 = rho1.fiber, rho2.fiber
    Zf = rho.base.translation_group
    results = []
    for comp in ergodic_components(joint):
        pts = comp.parent_points
        x1, x2 = pts // m2, pts % m2
        y1, k1 = x1 // K1.order, x1 % K1.order
        y2, k2 = x2 // K2.order, x2 % K2.order
        zpts = y1 * rho2.base.m + y2
        kpts = k1 * K2.order + k2
        zmass = np.zeros(Zf.order, dtype=np.int64)
        np.add.at(zmass, zpts, comp.weight_num)
        support = np.flatnonzero(zmass)
        report = {"points": int(comp.m)}
        # pushdown must be uniform on a coset z0 + Z'
        z0 = Zf.element(int(support[0]))
        diffs = [Zf.sub(Zf.element(int(s)), z0) for s in support]
        if not (len(set(zmass[support].tolist())) == 1 and _is_subgroup(Zf, diffs)):
            report["coset"] = False
            results.append((comp, report))
            continue
        report["coset"] = True
        Zs, emb = subgroup_as_group(Zf, diffs)
        inv_emb = {emb(h): h for h in Zs.elements()}
        gam = rho.gamma
        phis = GroupHom(gam, Zs, tuple(inv_emb[Zf.element(int(rho.base.actions[i, 0]))]
                                       for i in range(gam.rank)))
        Ys = make_rotational(Zs, phis)
        zglob = np.array([Zf.index(Zf.add(z0, emb(h))) for h in Zs.elements()], dtype=np.int64)
        rho_s = Cocycle(Ys, rho.fiber, rho.tables[:, zglob], rho.circle)
        Es = extension_build(rho_s)
        loc = np.empty(Zf.order, dtype=np.int64)
        loc[zglob] = np.arange(Zs.order)
        img = loc[zpts] * rho.fiber.order + kpts
        target = None
        for c in ergodic_components(Es):
            if set(c.parent_points.tolist()) == set(img.tolist()):
                target = c
        if target is None:
            raise InternalConsistencyError("joining component is not a component of the restricted extension")
        mk = mackey_reduce(rho_s, target)
        report["mackey_order"] = len(mk.H)
        G = host_kra_group(mk.rho_prime)
        Xr = extension_build(mk.rho_prime)
        srep = structure_report(G, check_axioms=G.n <= FULL_ASSOC_LIMIT)
        cert = translational_certificate(G, Xr, 0)
        report.update({"hk_order": G.n, "g2_order": srep["g2_order"],
                       "commutator_order": srep["commutator_order"],
                       "lambda_order": cert.report["lambda_order"], "good": True})
        results.append((comp, report))
    return results


def _is_subgroup(Z, elements):
    s = set(elements)
    return Z.zero in s and all(Z.sub(a, b) in s for a in s for b in s)
