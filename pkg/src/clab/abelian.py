"""Finite abelian groups, characters, homomorphisms and exact circle values.

A group is a product of cyclic groups Z/N_1 x ... x Z/N_r; elements are
residue tuples and everything is ordered lexicographically on those tuples.
Circle values p/q mod 1 are exact (:class:`fractions.Fraction` underneath).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, InvalidInput

Element = tuple  # tuple[int, ...] of residues


def lcm(*values):
    return math.lcm(*values) if values else 1


@dataclass(frozen=True)
class CircleValue:
    """An exact point of R/Z, stored reduced in [0, 1)."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value) % 1)

    @classmethod
    def of(cls, numerator, denominator=1):
        return cls(Fraction(numerator, denominator))

    @classmethod
    def parse(cls, text):
        if isinstance(text, CircleValue):
            return text
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text))
        try:
            return cls(Fraction(str(text).strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"bad circle value {text!r}") from exc

    @property
    def numerator(self):
        return self.value.numerator

    @property
    def denominator(self):
        return self.value.denominator

    def __add__(self, other):
        return CircleValue(self.value + CircleValue.parse(other).value)

    def __sub__(self, other):
        return CircleValue(self.value - CircleValue.parse(other).value)

    def __neg__(self):
        return CircleValue(-self.value)

    def __mul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return CircleValue(self.value * n)

    __rmul__ = __mul__

    def __float__(self):
        return float(self.value)

    def __bool__(self):
        return self.value != 0

    def residue(self, modulus):
        """Numerator over ``modulus``; the denominator must divide it."""
        scaled = self.value * modulus
        if scaled.denominator != 1:
            raise InvalidInput(f"{self} is not in (1/{modulus})Z/Z")
        return int(scaled) % modulus

    def phase(self):
        return complex(np.exp(2j * np.pi * float(self.value)))

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"

    def __repr__(self):
        return f"CircleValue({self})"


@dataclass(frozen=True)
class FinAbGroup:
    """Z/N_1 x ... x Z/N_r."""

    cyclic_orders: tuple

    def __post_init__(self):
        orders = tuple(int(n) for n in self.cyclic_orders)
        if any(n < 1 for n in orders):
            raise InvalidInput(f"cyclic orders must be >= 1, got {orders}")
        object.__setattr__(self, "cyclic_orders", orders)

    @classmethod
    def cyclic(cls, n):
        return cls((n,))

    @classmethod
    def power(cls, n, rank):
        return cls((n,) * rank)

    @property
    def rank(self):
        return len(self.cyclic_orders)

    @cached_property
    def order(self):
        return math.prod(self.cyclic_orders)

    @cached_property
    def exponent(self):
        return lcm(*self.cyclic_orders)

    @cached_property
    def moduli(self):
        return np.array(self.cyclic_orders, dtype=np.int64)

    @cached_property
    def _strides(self):
        strides = np.ones(self.rank, dtype=np.int64)
        for i in range(self.rank - 2, -1, -1):
            strides[i] = strides[i + 1] * self.cyclic_orders[i + 1]
        return strides

    @property
    def zero(self):
        return (0,) * self.rank

    def generators(self):
        return [tuple(int(i == j) % n for j, n in enumerate(self.cyclic_orders))
                for i in range(self.rank)]

    def elements(self):
        return list(itertools.product(*(range(n) for n in self.cyclic_orders)))

    @cached_property
    def element_array(self):
        """All elements as an (order, rank) int64 array, lexicographic."""
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*(np.arange(n) for n in self.cyclic_orders), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)

    def check(self, x):
        x = tuple(int(v) for v in x)
        if len(x) != self.rank:
            raise DimensionMismatch(f"element {x} has length {len(x)}, group rank is {self.rank}")
        return tuple(v % n for v, n in zip(x, self.cyclic_orders))

    def add(self, a, b):
        return tuple((x + y) % n for x, y, n in zip(a, b, self.cyclic_orders))

    def sub(self, a, b):
        return tuple((x - y) % n for x, y, n in zip(a, b, self.cyclic_orders))

    def neg(self, a):
        return tuple((-x) % n for x, n in zip(a, self.cyclic_orders))

    def mul(self, k, a):
        return tuple((k * x) % n for x, n in zip(a, self.cyclic_orders))

    def order_of(self, a):
        return lcm(*(n // math.gcd(n, x) for x, n in zip(a, self.cyclic_orders)))

    def index(self, a):
        return int(sum(int(x) * int(s) for x, s in zip(a, self._strides)))

    def element(self, i):
        return tuple(int(v) for v in self.decode(np.int64(i)))

    def encode(self, arr):
        """Vectorised index of residue rows; arr has shape (..., rank)."""
        arr = np.asarray(arr, dtype=np.int64)
        if self.rank == 0:
            return np.zeros(arr.shape[:-1], dtype=np.int64)
        return (arr % self.moduli) @ self._strides

    def decode(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self._strides) % self.moduli

    def reduce(self, arr):
        return np.asarray(arr, dtype=np.int64) % self.moduli

    def product(self, other):
        return FinAbGroup(self.cyclic_orders + other.cyclic_orders)

    def to_json(self):
        return {"cyclic": list(self.cyclic_orders)}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "cyclic" not in obj:
            raise InvalidInput(f"group JSON must be an object with 'cyclic', got {obj!r}")
        return cls(tuple(obj["cyclic"]))

    def __str__(self):
        if self.rank == 0:
            return "0"
        return " x ".join(f"Z/{n}" for n in self.cyclic_orders)


@dataclass(frozen=True)
class Character:
    """x -> sum_i c_i x_i / N_i mod 1."""

    group: FinAbGroup
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", self.group.check(self.coefficients))

    def __call__(self, x):
        x = self.group.check(x)
        return CircleValue(sum(Fraction(c * v, n) for c, v, n in
                               zip(self.coefficients, x, self.group.cyclic_orders)))

    def residues(self, arr, modulus=None):
        """Vectorised numerator of the value over ``modulus`` (default: exponent)."""
        L = modulus or self.group.exponent
        weights = np.array([c * (L // n) for c, n in
                            zip(self.coefficients, self.group.cyclic_orders)], dtype=np.int64)
        if L % self.group.exponent:
            raise InvalidInput(f"modulus {L} is not a multiple of the group exponent")
        return (np.asarray(arr, dtype=np.int64) @ weights) % L if self.group.rank else \
            np.zeros(np.asarray(arr).shape[:-1], dtype=np.int64)

    @property
    def is_trivial(self):
        return not any(self.coefficients)

    def __add__(self, other):
        return Character(self.group, self.group.add(self.coefficients, other.coefficients))

    def __neg__(self):
        return Character(self.group, self.group.neg(self.coefficients))


def dual_group(G):
    """The dual group (same cyclic orders) and all |G| characters, lexicographic."""
    return FinAbGroup(G.cyclic_orders), [Character(G, c) for c in G.elements()]


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism fixed by the images of the standard generators."""

    source: FinAbGroup
    target: FinAbGroup
    generator_images: tuple

    def __post_init__(self):
        images = tuple(self.target.check(x) for x in self.generator_images)
        if len(images) != self.source.rank:
            raise DimensionMismatch("need one image per source generator")
        for n, img in zip(self.source.cyclic_orders, images):
            if any(self.target.mul(n, img)):
                raise InvalidInput(f"image {img} of a generator of order {n} is not killed by {n}")
        object.__setattr__(self, "generator_images", images)

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, (target.zero,) * source.rank)

    @cached_property
    def matrix(self):
        return np.array(self.generator_images, dtype=np.int64).reshape(self.source.rank, self.target.rank)

    def __call__(self, x):
        x = self.source.check(x)
        out = self.target.zero
        for coeff, img in zip(x, self.generator_images):
            out = self.target.add(out, self.target.mul(coeff, img))
        return out

    def apply(self, arr):
        """Vectorised image of residue rows."""
        arr = np.asarray(arr, dtype=np.int64)
        return (arr @ self.matrix) % self.target.moduli

    def __add__(self, other):
        return GroupHom(self.source, self.target, tuple(
            self.target.add(a, b) for a, b in zip(self.generator_images, other.generator_images)))

    def __neg__(self):
        return GroupHom(self.source, self.target,
                        tuple(self.target.neg(a) for a in self.generator_images))

    def is_zero(self):
        return not any(any(img) for img in self.generator_images)

    def to_json(self):
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "images": [list(x) for x in self.generator_images]}


def torsion_elements(T, n):
    """Elements t of T with n*t = 0, lexicographic."""
    return [t for t in T.elements() if not any(T.mul(n, t))]


def hom_enumerate(S, T):
    """All homomorphisms S -> T, lexicographic in the generator images."""
    choices = [torsion_elements(T, n) for n in S.cyclic_orders]
    return [GroupHom(S, T, images) for images in itertools.product(*choices)]


def annihilator(K, D):
    """{k in K : xi(k) = 0 for all xi in D}, sorted."""
    for xi in D:
        if xi.group != K:
            raise DimensionMismatch(f"character of {xi.group} used on {K}")
    return [k for k in K.elements() if all(not xi(k) for xi in D)]


def subgroup_closure(K, gens):
    """Subgroup of K generated by ``gens``, sorted."""
    seen = {K.zero}
    frontier = [K.zero]
    gens = [K.check(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = K.add(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def is_subgroup(K, elements):
    s = set(elements)
    return K.zero in s and all(K.add(a, b) in s for a in s for b in s)


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _element_order(x, add, zero):
    k, y = 1, x
    while y != zero:
        y = add(y, x)
        k += 1
    return k


def abelian_structure(elements, add, zero):
    """Decompose an abstract finite abelian group into cyclic factors.

    ``elements`` is a list of hashable elements closed under ``add``.
    Returns ``(orders, generators)`` with orders descending such that
    (a_1, ..., a_r) -> sum a_i g_i is a bijection from the product of Z/orders.
    """
    n = len(elements)
    orders = {x: _element_order(x, add, zero) for x in elements}
    # invariant factors from per-prime counts of p^j-torsion
    primary = []
    for p in _prime_factors(n):
        ppart = [x for x in elements if _is_prime_power(orders[x], p)]
        size_exp = round(math.log(len(ppart), p))
        counts, j = [0], 1
        while counts[-1] < size_exp:
            c = sum(1 for x in ppart if (p ** j) % orders[x] == 0)
            counts.append(round(math.log(c, p)))
            j += 1
        # number of factors with exponent >= j is counts[j] - counts[j-1]
        ge = [counts[j] - counts[j - 1] for j in range(1, len(counts))]
        exps = []
        for j in range(len(ge)):
            nxt = ge[j + 1] if j + 1 < len(ge) else 0
            exps += [j + 1] * (ge[j] - nxt)
        primary.append(sorted(exps, reverse=True))
    r = max((len(e) for e in primary), default=0)
    invariants = []
    for i in range(r):
        d = 1
        for p, exps in zip(_prime_factors(n), primary):
            if i < len(exps):
                d *= p ** exps[i]
        invariants.append(d)
    invariants.sort(reverse=True)

    def extend(chosen, span):
        if len(chosen) == len(invariants):
            return chosen
        d = invariants[len(chosen)]
        span_set = set(span)
        for g in elements:
            if orders[g] != d:
                continue
            multiples, y = [], g
            for _ in range(d - 1):
                if y in span_set:
                    break
                multiples.append(y)
                y = add(y, g)
            else:
                new_span = [add(s, m) for s in span for m in [zero] + multiples]
                found = extend(chosen + [g], new_span)
                if found is not None:
                    return found
        return None

    gens = extend([], [zero])
    if gens is None:  # pragma: no cover - structure theorem guarantees success
        raise InvalidInput("failed to decompose abelian group")
    return tuple(invariants), gens


def _is_prime_power(k, p):
    while k % p == 0:
        k //= p
    return k == 1


def subgroup_as_group(K, elements):
    """Present a subgroup of K as a FinAbGroup H with an embedding H -> K."""
    elements = [K.check(x) for x in elements]
    orders, gens = abelian_structure(elements, K.add, K.zero)
    H = FinAbGroup(orders)
    return H, GroupHom(H, K, tuple(gens))
