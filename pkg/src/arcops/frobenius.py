"""Finite graded Frobenius and quasi-Frobenius algebras over the rationals.

Elements are coordinate lists of Fractions in a fixed basis.  The
differential, when present, is stored as a matrix ``d[i][j]``: the
coefficient of basis element j in d(e_i).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

Vector = list  # list of Fraction


class NondegeneracyError(ValueError):
    """The pairing is singular where a Frobenius structure was required."""


class QuasiFrobeniusError(ValueError):
    """The differential or the integral breaks the quasi-Frobenius axioms."""


class CommutativityError(ValueError):
    """An evaluation needs a (graded) commutative algebra."""


# ----- exact linear algebra ----------------------------------------------

def rref(rows: Sequence[Sequence[Fraction]]) -> tuple:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(m)) if m[k][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c] != 0:
                f = m[k][c]
                m[k] = [a - f * b for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    rows = [r for r in rows if any(r)]
    return len(rref(rows)[1]) if rows else 0


def inverse(mat: Sequence[Sequence[Fraction]]) -> list:
    n = len(mat)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise NondegeneracyError("matrix is singular")
    return [row[n:] for row in red]


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list:
    """Basis of {v : rows . v = 0}, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -red[r][f]
        out.append(v)
    return out


def solve(mat_rows, rhs) -> Optional[list]:
    """One solution x of mat . x = rhs, or None."""
    ncols = len(mat_rows[0]) if mat_rows else 0
    aug = [list(r) + [b] for r, b in zip(mat_rows, rhs)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(piv):
        x[c] = red[r][ncols]
    return x


# ----- the algebra -------------------------------------------------------

@dataclass(frozen=True)
class GradedAlgebra:
    names: tuple
    degrees: tuple
    unit_index: int
    mul_table: tuple          # mul_table[i][j] = coordinates of e_i e_j
    integral: tuple
    d: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    # construction -----------------------------------------------------
    @classmethod
    def from_sparse(cls, names, degrees, unit, mul: dict, integral, d: Optional[dict] = None):
        n = len(names)
        if len(degrees) != n or len(integral) != n:
            raise ValueError("basis, degrees and integral must have equal length")
        if not 0 <= unit < n:
            raise IndexError("unit index out of range")
        table = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j, k), v in mul.items():
            table[i][j][k] += Fraction(v)
        dm = None
        if d is not None:
            dm = [[Fraction(0)] * n for _ in range(n)]
            for (i, j), v in d.items():
                dm[i][j] += Fraction(v)
            dm = tuple(tuple(r) for r in dm)
        return cls(tuple(names), tuple(degrees), unit,
                   tuple(tuple(tuple(c) for c in row) for row in table),
                   tuple(Fraction(v) for v in integral), dm)

    @property
    def dim(self) -> int:
        return len(self.names)

    def sparse_mul(self) -> dict:
        out = {}
        for i, row in enumerate(self.mul_table):
            for j, vec in enumerate(row):
                for k, v in enumerate(vec):
                    if v:
                        out[(i, j, k)] = v
        return out

    def sparse_d(self) -> dict:
        if self.d is None:
            return {}
        return {(i, j): v for i, row in enumerate(self.d) for j, v in enumerate(row) if v}

    # elements -----------------------------------------------------------
    def basis(self, i: int) -> Vector:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def zero(self) -> Vector:
        return [Fraction(0)] * self.dim

    def one(self) -> Vector:
        return self.basis(self.unit_index)

    def mul(self, a: Vector, b: Vector) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            row = self.mul_table[i]
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, c in enumerate(row[j]):
                    if c:
                        out[k] += xy * c
        return out

    def product(self, elems: Sequence[Vector]) -> Vector:
        acc = self.one()
        for e in elems:
            acc = self.mul(acc, e)
        return acc

    def trace(self, a: Vector) -> Fraction:
        return sum((x * w for x, w in zip(a, self.integral)), Fraction(0))

    def apply_d(self, a: Vector) -> Vector:
        out = [Fraction(0)] * self.dim
        if self.d is None:
            return out
        for i, x in enumerate(a):
            if x:
                for j, c in enumerate(self.d[i]):
                    if c:
                        out[j] += x * c
        return out

    def degree_of(self, a: Vector) -> Optional[int]:
        ds = {self.degrees[i] for i, x in enumerate(a) if x}
        return ds.pop() if len(ds) == 1 else None

    # Frobenius data -----------------------------------------------------
    def pairing_matrix(self) -> list:
        return [[self.trace(self.mul_table[i][j]) for j in range(self.dim)]
                for i in range(self.dim)]

    def pair(self, a: Vector, b: Vector) -> Fraction:
        return self.trace(self.mul(a, b))

    def inverse_pairing(self) -> list:
        if "inv" not in self._cache:
            self._cache["inv"] = inverse(self.pairing_matrix())
        return self._cache["inv"]

    def casimir(self) -> list:
        """Matrix C with C = sum_ij C[i][j] e_i (x) e_j."""
        return self.inverse_pairing()

    def dual_basis(self) -> list:
        """e^j with <e_i, e^j> = delta_ij."""
        inv = self.inverse_pairing()
        return [[inv[k][j] for k in range(self.dim)] for j in range(self.dim)]

    def coproduct(self, a: Vector) -> list:
        """Delta(a) as a matrix: sum_ij M[i][j] e_i (x) e_j."""
        c = self.casimir()
        n = self.dim
        out = [[Fraction(0)] * n for _ in range(n)]
        # Delta(a) = sum a c' (x) c''
        for i in range(n):
            for j in range(n):
                if c[i][j]:
                    left = self.mul(a, self.basis(i))
                    for k, v in enumerate(left):
                        if v:
                            out[k][j] += v * c[i][j]
        return out

    def euler(self) -> Vector:
        m = self.coproduct(self.one())
        out = self.zero()
        for i in range(self.dim):
            for j in range(self.dim):
                if m[i][j]:
                    prod = self.mul_table[i][j]
                    for k, v in enumerate(prod):
                        out[k] += m[i][j] * v
        return out

    def power(self, a: Vector, n: int) -> Vector:
        acc = self.one()
        for _ in range(n):
            acc = self.mul(acc, a)
        return acc

    def is_commutative(self) -> bool:
        """Graded commutativity e_i e_j = (-1)^{|i||j|} e_j e_i."""
        for i in range(self.dim):
            for j in range(self.dim):
                s = -1 if self.degrees[i] * self.degrees[j] % 2 else 1
                if list(self.mul_table[i][j]) != [s * x for x in self.mul_table[j][i]]:
                    return False
        return True

    def require_commutative(self, what: str) -> None:
        if not self.is_commutative():
            raise CommutativityError(f"{what} needs a commutative algebra")


# ----- verification ------------------------------------------------------

def verify_algebra(A: GradedAlgebra, frobenius: bool = True) -> list:
    """List of failed identities (empty when everything holds)."""
    fails = []
    n = A.dim
    e = [A.basis(i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if A.mul(A.mul(e[i], e[j]), e[k]) != A.mul(e[i], A.mul(e[j], e[k])):
                    fails.append(f"associativity fails at ({i},{j},{k})")
    one = A.one()
    for i in range(n):
        if A.mul(one, e[i]) != e[i] or A.mul(e[i], one) != e[i]:
            fails.append(f"unit law fails at {i}")
        for j in range(n):
            prod = A.mul_table[i][j]
            for k, v in enumerate(prod):
                if v and A.degrees[k] != A.degrees[i] + A.degrees[j]:
                    fails.append(f"degree not additive at ({i},{j})")
            s = -1 if A.degrees[i] * A.degrees[j] % 2 else 1
            if A.pair(e[i], e[j]) != s * A.pair(e[j], e[i]):
                fails.append(f"trace not graded symmetric at ({i},{j})")
    if A.d is not None:
        for i in range(n):
            if any(A.apply_d(A.apply_d(e[i]))):
                fails.append(f"d^2 != 0 on {i}")
            if A.trace(A.apply_d(e[i])):
                fails.append(f"integral of d({A.names[i]}) is nonzero")
            for j in range(n):
                lhs = A.apply_d(A.mul(e[i], e[j]))
                s = -1 if A.degrees[i] % 2 else 1
                rhs = [x + s * y for x, y in zip(A.mul(A.apply_d(e[i]), e[j]),
                                                A.mul(e[i], A.apply_d(e[j])))]
                if lhs != rhs:
                    fails.append(f"Leibniz fails at ({i},{j})")
    if frobenius and A.d is None:
        try:
            A.inverse_pairing()
        except NondegeneracyError:
            fails.append("pairing is degenerate")
            return fails
        fails.extend(_frobenius_identities(A))
    return fails


def _frobenius_identities(A: GradedAlgebra) -> list:
    fails = []
    n = A.dim
    e = [A.basis(i) for i in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if A.pair(A.mul(e[a], e[b]), e[c]) != A.pair(e[a], A.mul(e[b], e[c])):
                    fails.append(f"invariance fails at ({a},{b},{c})")
    # Delta(ab) = a Delta(b) = Delta(a) b
    for a in range(n):
        for b in range(n):
            dab = A.coproduct(A.mul(e[a], e[b]))
            left = _left_act(A, e[a], A.coproduct(e[b]))
            right = _right_act(A, A.coproduct(e[a]), e[b])
            if dab != left or dab != right:
                fails.append(f"Frobenius compatibility fails at ({a},{b})")
    # snake identity: contracting the Casimir with the pairing gives the identity
    c = A.casimir()
    eta = A.pairing_matrix()
    for i in range(n):
        for j in range(n):
            s = sum(eta[i][k] * c[k][j] for k in range(n))
            if s != (1 if i == j else 0):
                fails.append("Casimir is not dual to the pairing")
    return fails


def _left_act(A, a, mat):
    n = A.dim
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if mat[i][j]:
                for k, v in enumerate(A.mul(a, A.basis(i))):
                    out[k][j] += v * mat[i][j]
    return out


def _right_act(A, mat, b):
    n = A.dim
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if mat[i][j]:
                for k, v in enumerate(A.mul(A.basis(j), b)):
                    out[i][k] += v * mat[i][j]
    return out


def transfer_identity_holds(A: GradedAlgebra) -> bool:
    """int (mu Delta)(a) b c = int a b (mu Delta)(c) on basis triples."""
    A.require_commutative("the transfer identity")
    eu = A.euler()
    e = [A.basis(i) for i in range(A.dim)]
    for a in e:
        for b in e:
            for c in e:
                lhs = A.trace(A.product([A.mul(eu, a), b, c]))
                rhs = A.trace(A.product([a, b, A.mul(eu, c)]))
                if lhs != rhs:
                    return False
    return True


# ----- homology ----------------------------------------------------------

@dataclass(frozen=True)
class HomologySection:
    """Homology of (A, d) with an echelon-chosen section."""
    algebra: GradedAlgebra
    cycles: tuple        # basis of Z
    section: tuple       # s(h_k) in A, k = 0..dim H-1
    degrees: tuple

    @property
    def dim(self) -> int:
        return len(self.section)

    def project(self, z: Vector) -> Vector:
        """Class of the cycle z in the H basis."""
        A = self.algebra
        bnd = _boundaries(A)
        cols = [list(s) for s in self.section] + bnd
        mat = [[cols[c][r] for c in range(len(cols))] for r in range(A.dim)]
        x = solve(mat, list(z))
        if x is None:
            raise ValueError("element is not a cycle")
        return x[:self.dim]

    def homology_algebra(self) -> GradedAlgebra:
        A = self.algebra
        h = self.dim
        mul = {}
        for i in range(h):
            for j in range(h):
                prod = self.project(A.mul(list(self.section[i]), list(self.section[j])))
                for k, v in enumerate(prod):
                    if v:
                        mul[(i, j, k)] = v
        unit = self.project(A.one())
        if sum(1 for v in unit if v) != 1 or max(unit) != 1:
            raise QuasiFrobeniusError("unit class is not a basis vector of the section")
        integral = [A.trace(list(s)) for s in self.section]
        names = [f"[{_describe(A, s)}]" for s in self.section]
        return GradedAlgebra.from_sparse(names, list(self.degrees), unit.index(1), mul, integral)

    def transported_casimir(self) -> list:
        """(s (x) s)(C_H) as a matrix on A (x) A."""
        H = self.homology_algebra()
        ch = H.casimir()
        n = self.algebra.dim
        out = [[Fraction(0)] * n for _ in range(n)]
        for p in range(self.dim):
            for q in range(self.dim):
                if ch[p][q]:
                    for a, x in enumerate(self.section[p]):
                        for b, y in enumerate(self.section[q]):
                            if x and y:
                                out[a][b] += ch[p][q] * x * y
        return out


def _describe(A, vec) -> str:
    terms = []
    for i, v in enumerate(vec):
        if v:
            terms.append(A.names[i] if v == 1 else f"{v}*{A.names[i]}")
    return "+".join(terms) or "0"


def _boundaries(A: GradedAlgebra) -> list:
    imgs = [A.apply_d(A.basis(i)) for i in range(A.dim)]
    red, _ = rref([r for r in imgs if any(r)]) if any(any(r) for r in imgs) else ([], [])
    return red


def homology(A: GradedAlgebra) -> HomologySection:
    """Cycles modulo boundaries; the section is the echelon complement."""
    n = A.dim
    if A.d is None:
        sec = tuple(tuple(A.basis(i)) for i in range(n))
        return HomologySection(A, sec, sec, tuple(A.degrees))
    if any(any(A.apply_d(A.apply_d(A.basis(i)))) for i in range(n)):
        raise QuasiFrobeniusError("d does not square to zero")
    # Z = kernel of d: v with sum_i v_i d[i][j] = 0 for all j
    cols = [[A.d[i][j] for i in range(n)] for j in range(n)]
    cycles = nullspace(cols, n)
    # keep homogeneous basis vectors: split each cycle by degree
    homog = []
    for v in cycles:
        for deg in sorted(set(A.degrees)):
            w = [x if A.degrees[i] == deg else Fraction(0) for i, x in enumerate(v)]
            if any(w):
                homog.append(w)
    zbasis, _ = rref(homog) if homog else ([], [])
    bnd = _boundaries(A)
    # greedily extend the boundary span by cycle basis vectors
    chosen = []
    span = list(bnd)
    for z in zbasis:
        if rank(span + [z]) > rank(span):
            chosen.append(z)
            span.append(z)
    degs = tuple(A.degree_of(z) for z in chosen)
    sec = HomologySection(A, tuple(tuple(z) for z in zbasis), tuple(tuple(z) for z in chosen), degs)
    try:
        sec.homology_algebra().inverse_pairing()
    except NondegeneracyError as exc:
        raise QuasiFrobeniusError("induced pairing on homology is degenerate") from exc
    return sec


# ----- stock examples ----------------------------------------------------

def dual_numbers() -> GradedAlgebra:
    """k[x]/(x^2) with |x| = 0, int 1 = 0, int x = 1."""
    return GradedAlgebra.from_sparse(
        ["1", "x"], [0, 0], 0,
        {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1}, [0, 1])


def ground_field(trace_of_one=1) -> GradedAlgebra:
    return GradedAlgebra.from_sparse(["1"], [0], 0, {(0, 0, 0): 1}, [trace_of_one])


def group_algebra_z2() -> GradedAlgebra:
    """k[Z/2] with int(a + b s) = a."""
    return GradedAlgebra.from_sparse(
        ["1", "s"], [0, 0], 0,
        {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): 1}, [1, 0])


def truncated_polynomial(n: int) -> GradedAlgebra:
    """k[x]/(x^n) with the integral picking the top coefficient."""
    mul = {(i, j, i + j): 1 for i in range(n) for j in range(n) if i + j < n}
    integral = [0] * n
    integral[n - 1] = 1
    return GradedAlgebra.from_sparse(["1"] + [f"x{k}" for k in range(1, n)],
                                     [0] * n, 0, mul, integral)


def matrix_algebra_2() -> GradedAlgebra:
    """2x2 matrices with the matrix trace, basis 1, h = e11 - e22, e = e12, f = e21."""
    # coordinates of basis elements as matrices (a, b, c, d) = [[a, b], [c, d]]
    mats = [(1, 0, 0, 1), (1, 0, 0, -1), (0, 1, 0, 0), (0, 0, 1, 0)]

    def mm(x, y):
        a, b, c, d = x
        p, q, r, s = y
        return (a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)

    def coords(m):
        a, b, c, d = m
        return [Fraction(a + d, 2), Fraction(a - d, 2), b, c]

    mul = {}
    for i, x in enumerate(mats):
        for j, y in enumerate(mats):
            for k, v in enumerate(coords(mm(x, y))):
                if v:
                    mul[(i, j, k)] = v
    return GradedAlgebra.from_sparse(["1", "h", "e", "f"], [0] * 4, 0, mul, [2, 0, 0, 0])


def quasi_frobenius_example(bad_integral: bool = False) -> GradedAlgebra:
    """k[x]/(x^2) times an acyclic piece k<u, v> with d v = u.

    Basis 1, x, u, v with u the unit of the second factor (so the unit
    is 1 + u) and |v| = -1.  Homology is k[x]/(x^2).  With
    `bad_integral` the integral is nonzero on the exact element u.
    """
    names = ["1", "x", "u", "v"]
    degrees = [0, 0, 0, -1]
    mul = {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1,
           (2, 2, 2): 1, (2, 3, 3): 1, (3, 2, 3): 1}
    integral = [0, 1, 1 if bad_integral else 0, 0]
    d = {(3, 2): 1}
    # the unit of the product algebra is 1 + u; rewrite in a basis containing it
    return _product_with_unit(names, degrees, mul, integral, d)


def _product_with_unit(names, degrees, mul, integral, d) -> GradedAlgebra:
    # change basis: w0 = 1 + u, w1 = x, w2 = u, w3 = v
    n = len(names)
    P = [[Fraction(0)] * n for _ in range(n)]   # new basis vectors in old coordinates
    P[0][0] = P[0][2] = Fraction(1)
    P[1][1] = P[2][2] = P[3][3] = Fraction(1)
    Pinv = inverse([[P[r][c] for r in range(n)] for c in range(n)])  # old -> new coords

    def to_new(old):
        return [sum(Pinv[i][k] * old[k] for k in range(n)) for i in range(n)]

    def old_mul(a, b):
        out = [Fraction(0)] * n
        for (i, j, k), v in mul.items():
            out[k] += a[i] * b[j] * v
        return out

    new_mul = {}
    for i in range(n):
        for j in range(n):
            prod = to_new(old_mul(P[i], P[j]))
            for k, v in enumerate(prod):
                if v:
                    new_mul[(i, j, k)] = v
    new_int = [sum(P[i][k] * integral[k] for k in range(n)) for i in range(n)]
    new_d = {}
    for i in range(n):
        img = [Fraction(0)] * n
        for (a, b), v in d.items():
            img[b] += P[i][a] * v
        for k, v in enumerate(to_new(img)):
            if v:
                new_d[(i, k)] = v
    new_names = ["1+u", "x", "u", "v"]
    return GradedAlgebra.from_sparse(new_names, degrees, 0, new_mul, new_int, new_d)


__all__ = [
    "GradedAlgebra", "HomologySection", "NondegeneracyError", "QuasiFrobeniusError",
    "CommutativityError", "verify_algebra", "transfer_identity_holds", "homology",
    "dual_numbers", "ground_field", "group_algebra_z2", "quasi_frobenius_example",
    "truncated_polynomial", "matrix_algebra_2",
    "rref", "rank", "inverse", "nullspace", "solve",
]
