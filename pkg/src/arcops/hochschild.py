"""Hochschild and cyclic cochains of a finite Frobenius algebra, and
operations on the tensor algebra of a paired vector space.

Cochains are sparse tables on basis indices.  A Hochschild cochain of
arity n maps index tuples of length n to coordinate vectors; a cyclic
cochain of arity n + 1 maps index tuples to scalars.  Basis elements of
the test algebras all have even degree, so element Koszul signs are
omitted throughout.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .frobenius import GradedAlgebra

Vector = list


class ArityError(ValueError):
    """Operation called with incompatible arities or slot indices."""


def _vec(x) -> tuple:
    return tuple(Fraction(v) for v in x)


def _nonzero(v) -> bool:
    return any(v)


def _indices(dim: int, n: int):
    return itertools.product(range(dim), repeat=n)


# ----------------------------------------------------------------------
# Hochschild cochains A^{(x)n} -> A
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Cochain:
    arity: int
    dim: int
    table: dict = field(default_factory=dict, compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.arity, self.dim) == (other.arity, other.dim) and \
            self._clean() == other._clean()

    def __hash__(self):
        return hash((self.arity, self.dim, frozenset(self._clean().items())))

    def _clean(self) -> dict:
        return {k: v for k, v in self.table.items() if _nonzero(v)}

    def at(self, idx: Sequence[int]) -> tuple:
        return self.table.get(tuple(idx), (Fraction(0),) * self.dim)

    def __call__(self, *args: Vector) -> list:
        """Multilinear evaluation on coordinate vectors."""
        if len(args) != self.arity:
            raise ArityError(f"cochain of arity {self.arity} got {len(args)} inputs")
        out = [Fraction(0)] * self.dim
        supports = [[(i, x) for i, x in enumerate(a) if x] for a in args]
        for combo in itertools.product(*supports):
            c = Fraction(1)
            for _, x in combo:
                c *= x
            val = self.table.get(tuple(i for i, _ in combo))
            if val is None:
                continue
            for k, v in enumerate(val):
                if v:
                    out[k] += c * v
        return out

    def __add__(self, other: "Cochain") -> "Cochain":
        _same_shape(self, other)
        t = dict(self.table)
        for k, v in other.table.items():
            old = t.get(k, (Fraction(0),) * self.dim)
            t[k] = tuple(a + b for a, b in zip(old, v))
        return Cochain(self.arity, self.dim, t)

    def scale(self, s) -> "Cochain":
        s = Fraction(s)
        return Cochain(self.arity, self.dim,
                       {k: tuple(s * x for x in v) for k, v in self.table.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self._clean()


def _same_shape(f, g) -> None:
    if (f.arity, f.dim) != (g.arity, g.dim):
        raise ArityError("cochains of different shape")


def cochain_from_function(A: GradedAlgebra, n: int,
                          fn: Callable[[tuple], Vector]) -> Cochain:
    """Tabulate fn on all basis index tuples of length n."""
    table = {}
    for idx in _indices(A.dim, n):
        v = _vec(fn(idx))
        if _nonzero(v):
            table[idx] = v
    return Cochain(n, A.dim, table)


def element_cochain(A: GradedAlgebra, a: Vector) -> Cochain:
    return Cochain(0, A.dim, {(): _vec(a)} if _nonzero(a) else {})


def zero_cochain(A: GradedAlgebra, n: int) -> Cochain:
    return Cochain(n, A.dim, {})


def is_normalized(A: GradedAlgebra, f: Cochain) -> bool:
    u = A.unit_index
    return all(u not in idx for idx, v in f.table.items() if _nonzero(v))


def random_cochain(A: GradedAlgebra, n: int, rng: random.Random,
                   normalized: bool = False, span: int = 2) -> Cochain:
    def fn(idx):
        if normalized and A.unit_index in idx:
            return A.zero()
        return [rng.randint(-span, span) for _ in range(A.dim)]
    return cochain_from_function(A, n, fn)


def d_hoch(A: GradedAlgebra, f: Cochain) -> Cochain:
    """Hochschild coboundary with values in the bimodule A."""
    n = f.arity
    b = A.basis

    def fn(idx):
        a = [b(i) for i in idx]
        out = A.mul(a[0], f(*a[1:]))
        for i in range(1, n + 1):
            merged = a[:i - 1] + [A.mul(a[i - 1], a[i])] + a[i + 1:]
            sgn = -1 if i % 2 else 1
            out = [x + sgn * y for x, y in zip(out, f(*merged))]
        last = A.mul(f(*a[:n]), a[n])
        sgn = -1 if (n + 1) % 2 else 1
        return [x + sgn * y for x, y in zip(out, last)]
    return cochain_from_function(A, n + 1, fn)


def cup(A: GradedAlgebra, f: Cochain, g: Cochain) -> Cochain:
    n, m = f.arity, g.arity

    def fn(idx):
        a = [A.basis(i) for i in idx]
        return A.mul(f(*a[:n]), g(*a[n:]))
    return cochain_from_function(A, n + m, fn)


def brace(A: GradedAlgebra, f: Cochain, i: int, g: Cochain) -> Cochain:
    """Insert g into input i (1-based) of f."""
    n, m = f.arity, g.arity
    if not 1 <= i <= n:
        raise ArityError(f"insertion slot {i} outside 1..{n}")

    def fn(idx):
        a = [A.basis(k) for k in idx]
        inner = g(*a[i - 1:i - 1 + m])
        return f(*(a[:i - 1] + [inner] + a[i - 1 + m:]))
    return cochain_from_function(A, n + m - 1, fn)


def gerstenhaber_circle(A: GradedAlgebra, f: Cochain, g: Cochain) -> Cochain:
    n, m = f.arity, g.arity
    out = zero_cochain(A, n + m - 1)
    for i in range(1, n + 1):
        term = brace(A, f, i, g)
        out = out + (term if (i - 1) * (m - 1) % 2 == 0 else term.scale(-1))
    return out


def bracket(A: GradedAlgebra, f: Cochain, g: Cochain) -> Cochain:
    n, m = f.arity, g.arity
    left = gerstenhaber_circle(A, f, g)
    right = gerstenhaber_circle(A, g, f)
    return left - right if (n - 1) * (m - 1) % 2 == 0 else left + right


def sqcup(A: GradedAlgebra, f: Cochain, g: Cochain) -> Cochain:
    """(f, g) -> f(a_1..a_n) b g(c_1..c_m)."""
    n, m = f.arity, g.arity

    def fn(idx):
        a = [A.basis(k) for k in idx]
        return A.product([f(*a[:n]), a[n], g(*a[n + 1:])])
    return cochain_from_function(A, n + m + 1, fn)


def box(A: GradedAlgebra, f: Cochain, i: int, g: Cochain) -> Cochain:
    """Feed a_i g(a_{i+1}..a_{i+m}) a_{i+m+1} into input i (1-based) of f."""
    n, m = f.arity, g.arity
    if not 1 <= i <= n:
        raise ArityError(f"insertion slot {i} outside 1..{n}")

    def fn(idx):
        a = [A.basis(k) for k in idx]
        s = i - 1
        inner = A.product([a[s], g(*a[s + 1:s + 1 + m]), a[s + 1 + m]])
        return f(*(a[:s] + [inner] + a[s + m + 2:]))
    return cochain_from_function(A, n + m + 1, fn)


# ----------------------------------------------------------------------
# cyclic cochains A^{(x)n+1} -> k
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicCochain:
    arity: int
    dim: int
    table: dict = field(default_factory=dict, compare=False)

    def _clean(self) -> dict:
        return {k: v for k, v in self.table.items() if v}

    def __eq__(self, other) -> bool:
        if not isinstance(other, CyclicCochain):
            return NotImplemented
        return (self.arity, self.dim) == (other.arity, other.dim) and \
            self._clean() == other._clean()

    def __hash__(self):
        return hash((self.arity, self.dim, frozenset(self._clean().items())))

    def at(self, idx) -> Fraction:
        return self.table.get(tuple(idx), Fraction(0))

    def __call__(self, *args: Vector) -> Fraction:
        if len(args) != self.arity:
            raise ArityError(f"cyclic cochain of arity {self.arity} got {len(args)} inputs")
        total = Fraction(0)
        supports = [[(i, x) for i, x in enumerate(a) if x] for a in args]
        for combo in itertools.product(*supports):
            v = self.table.get(tuple(i for i, _ in combo))
            if v:
                c = v
                for _, x in combo:
                    c *= x
                total += c
        return total

    def __add__(self, other: "CyclicCochain") -> "CyclicCochain":
        _same_shape(self, other)
        t = dict(self.table)
        for k, v in other.table.items():
            t[k] = t.get(k, Fraction(0)) + v
        return CyclicCochain(self.arity, self.dim, t)

    def scale(self, s) -> "CyclicCochain":
        s = Fraction(s)
        return CyclicCochain(self.arity, self.dim, {k: s * v for k, v in self.table.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self._clean()


def cyclic_from_function(A: GradedAlgebra, n: int, fn) -> CyclicCochain:
    table = {}
    for idx in _indices(A.dim, n):
        v = Fraction(fn(idx))
        if v:
            table[idx] = v
    return CyclicCochain(n, A.dim, table)


def random_cyclic(A: GradedAlgebra, n: int, rng: random.Random,
                  normalized: bool = False, span: int = 2) -> CyclicCochain:
    """Random cochain of arity n; normalized means zero whenever a_i = 1 for i >= 1."""
    u = A.unit_index

    def fn(idx):
        if normalized and u in idx[1:]:
            return 0
        return rng.randint(-span, span)
    return cyclic_from_function(A, n, fn)


def dualize(A: GradedAlgebra, f: Cochain) -> CyclicCochain:
    """f -> (a_0, ..., a_n) -> integral of a_0 f(a_1, ..., a_n)."""
    def fn(idx):
        a = [A.basis(k) for k in idx]
        return A.trace(A.mul(a[0], f(*a[1:])))
    return cyclic_from_function(A, f.arity + 1, fn)


def undualize(A: GradedAlgebra, phi: CyclicCochain) -> Cochain:
    """Inverse of `dualize` for a symmetric pairing."""
    dual = A.dual_basis()

    def fn(idx):
        a = [A.basis(k) for k in idx]
        return [phi(dual[k], *a) for k in range(A.dim)]
    return cochain_from_function(A, phi.arity - 1, fn)


def d_cyc(A: GradedAlgebra, phi: CyclicCochain) -> CyclicCochain:
    """Cyclic (Hochschild) coboundary b on A-dual cochains."""
    n = phi.arity - 1

    def fn(idx):
        a = [A.basis(k) for k in idx]
        total = Fraction(0)
        for i in range(n + 1):
            merged = a[:i] + [A.mul(a[i], a[i + 1])] + a[i + 2:]
            total += (-1) ** i * phi(*merged)
        total += (-1) ** (n + 1) * phi(A.mul(a[n + 1], a[0]), *a[1:n + 1])
        return total
    return cyclic_from_function(A, n + 2, fn)


def connes_B(A: GradedAlgebra, phi: CyclicCochain) -> CyclicCochain:
    """Connes operator, lowering arity by one.

    (B phi)(a_0..a_{n-1}) = sum_i (-1)^{(n-1)i} phi(1, a_i..a_{n-1}, a_0..a_{i-1}).
    """
    n = phi.arity - 1
    if n < 1:
        return CyclicCochain(0, A.dim, {})
    one = A.one()

    def fn(idx):
        a = [A.basis(k) for k in idx]
        total = Fraction(0)
        for i in range(n):
            rot = a[i:] + a[:i]
            total += (-1) ** ((n - 1) * i) * phi(one, *rot)
        return total
    return cyclic_from_function(A, n, fn)


def normalize(A: GradedAlgebra, phi: CyclicCochain) -> CyclicCochain:
    """Kill every value with the unit in an input slot other than the first."""
    u = A.unit_index
    return CyclicCochain(phi.arity, phi.dim,
                         {k: v for k, v in phi.table.items() if u not in k[1:]})


# ----------------------------------------------------------------------
# tensor algebra TV: linear combinations of words
# ----------------------------------------------------------------------
# A "tensor" of TV^{(x)r} is a dict mapping r-tuples of words (tuples of
# basis indices) to Fractions.

def _acc(out: dict, key, c) -> None:
    v = out.get(key, Fraction(0)) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def word(*letters: int) -> dict:
    return {(tuple(letters),): Fraction(1)}


def tensor(*words: Sequence[int]) -> dict:
    return {tuple(tuple(w) for w in words): Fraction(1)}


def add_tensors(*xs: dict) -> dict:
    out: dict = {}
    for x in xs:
        for k, c in x.items():
            _acc(out, k, c)
    return out


def mu_tensor(x: dict, at: int = 0) -> dict:
    """Concatenate factors at and at + 1."""
    out: dict = {}
    for k, c in x.items():
        _acc(out, k[:at] + (k[at] + k[at + 1],) + k[at + 2:], c)
    return out


def delta(x: dict, at: int = 0) -> dict:
    """Reduced deconcatenation of factor `at`: both parts non-empty."""
    out: dict = {}
    for k, c in x.items():
        w = k[at]
        for i in range(1, len(w)):
            _acc(out, k[:at] + (w[:i], w[i:]) + k[at + 1:], c)
    return out


def delta_l(x: dict, l: int, at: int = 0) -> dict:
    """Iterated coproduct, splitting factor `at` into l + 1 parts (left iteration)."""
    for _ in range(l):
        x = delta(x, at)
    return x


def lozenge(x: dict, at: int = 0) -> dict:
    """TA -> TA (x) A (x) TA: pick a letter, keep possibly empty sides."""
    out: dict = {}
    for k, c in x.items():
        w = k[at]
        for i in range(len(w)):
            _acc(out, k[:at] + (w[:i], (w[i],), w[i + 1:]) + k[at + 1:], c)
    return out


def lozenge_l(x: dict, l: int, at: int = 0) -> dict:
    """Iterated lozenge producing TA (x) (A (x) TA)^l from factor `at`."""
    for _ in range(l):
        x = lozenge(x, at)
    return x


def boxtimes(x: dict, letter: int, at: int = 0) -> dict:
    """TA (x) TA -> TA inserting a middle letter: (u, v) -> u b v."""
    out: dict = {}
    for k, c in x.items():
        _acc(out, k[:at] + (k[at] + (letter,) + k[at + 1],) + k[at + 2:], c)
    return out


def permute(x: dict, perm: Sequence[int]) -> dict:
    """Factor perm[t] of the input becomes factor t of the output."""
    out: dict = {}
    for k, c in x.items():
        _acc(out, tuple(k[p] for p in perm), c)
    return out


def eta_m(pair: Callable[[int, int], Fraction], u: Sequence[int],
          v: Sequence[int]) -> Fraction:
    """Nested pairing of two equal-length words: prod eta(u_i, v_{m+1-i})."""
    if len(u) != len(v):
        return Fraction(0)
    total = Fraction(1)
    for a, b in zip(u, reversed(v)):
        total *= pair(a, b)
        if not total:
            break
    return total


# ----------------------------------------------------------------------
# normal forms and degrees for graph-induced operations on TV
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    """Splits per boundary, a factor order and one nested pairing per edge."""
    splits: tuple         # n_i per boundary: word i is cut into n_i + 1 parts
    order: tuple          # factor index pairs (left, right) fed to each eta^m
    degree: int

    def evaluate(self, words: Sequence[Sequence[int]], pair) -> Fraction:
        if len(words) != len(self.splits):
            raise ArityError("one word per boundary is required")
        kept = []
        for w, n in zip(words, self.splits):
            if n < 0:
                if len(w):
                    return Fraction(0)
            else:
                kept.append((tuple(w), n))
        x = {tuple(w for w, _ in kept): Fraction(1)}
        # split from the last boundary so earlier factor indices stay valid
        for b in reversed(range(len(kept))):
            x = delta_l(x, kept[b][1], at=b)
        total = Fraction(0)
        for k, c in x.items():
            val = c
            for left, right in self.order:
                val *= eta_m(pair, k[left], k[right])
                if not val:
                    break
            total += val
        return total


def normal_form(alpha) -> NormalForm:
    """Normal form of the functional sum_p y_tensor(alpha^p) for an arc graph.

    Every flag of alpha becomes one tensor factor; each edge pairs the
    factors of its two flags with a nested pairing.
    """
    core = alpha.core
    splits = tuple(s - 1 for s in core.sizes)
    order = tuple((a, b) for a, b in core.edges())
    return NormalForm(splits, order, len(order) - 1)


def op_degree(boundary_arities: Sequence[int]) -> Fraction:
    """l = (sum_i (n_i + 1)) / 2 - 1."""
    return Fraction(sum(n + 1 for n in boundary_arities), 2) - 1


__all__ = [
    "ArityError", "Cochain", "CyclicCochain", "cochain_from_function",
    "element_cochain", "zero_cochain", "random_cochain", "is_normalized",
    "d_hoch", "cup", "brace", "gerstenhaber_circle", "bracket", "sqcup", "box",
    "cyclic_from_function", "random_cyclic", "dualize", "undualize", "d_cyc",
    "connes_B", "normalize",
    "word", "tensor", "add_tensors", "mu_tensor", "delta", "delta_l", "lozenge",
    "lozenge_l", "boxtimes", "permute", "eta_m", "NormalForm", "normal_form",
    "op_degree",
]
