"""Correlation functions: exact multilinear forms attached to polygons,
partitioned arc graphs, ribbon graphs and tensor words.

A Multilinear is a sparse table over basis indices with one axis per
slot; slots carry labels (flag positions, pairs tagged by the input they
came from, or plain integers) so that compositions can be compared after
reordering.

Sign convention: the value of a partitioned basis element includes its
orientation sign relative to its underlying graph (see
``partition_gluing.orientation_sign``).  With this choice the signed
gluing of partitioned graphs is compatible with Casimir contraction, and
the value of an unpartitioned graph, a signed sum over its partitions, is
a plain sum of unsigned combinatorial values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .frobenius import GradedAlgebra
from .graph_core import ArcGraph, MarkedRibbonGraph, DomainError
from .hochschild import Cochain, CyclicCochain, cyclic_from_function, undualize
from .signs import permutation_sign
from .partition_gluing import (PartitionedArcGraph, orientation_sign, partition_term,
                               standard_marking, _with_marks, expand)


class ArityMismatch(ValueError):
    """Inputs do not match the slots of a correlator."""


class ContractViolation(ValueError):
    """A decoration fails a stated hypothesis such as cyclic invariance."""


# ----------------------------------------------------------------------
# multilinear forms
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Multilinear:
    slots: tuple
    dim: int
    table: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(set(self.slots)) != len(self.slots):
            raise ArityMismatch("slot labels must be distinct")

    @property
    def arity(self) -> int:
        return len(self.slots)

    def at(self, idx) -> Fraction:
        return self.table.get(tuple(idx), Fraction(0))

    def __call__(self, *args) -> Fraction:
        if len(args) != self.arity:
            raise ArityMismatch(f"expected {self.arity} inputs, got {len(args)}")
        total = Fraction(0)
        supports = [[(i, x) for i, x in enumerate(a) if x] for a in args]
        for combo in itertools.product(*supports):
            v = self.table.get(tuple(i for i, _ in combo))
            if v:
                for _, x in combo:
                    v *= x
                total += v
        return total

    def evaluate(self, inputs: dict) -> Fraction:
        """Evaluate on a dict slot label -> coordinate vector."""
        missing = [s for s in self.slots if s not in inputs]
        if missing:
            raise ArityMismatch(f"missing inputs for slots {missing!r}")
        return self(*(inputs[s] for s in self.slots))

    def reorder(self, slots: Sequence) -> "Multilinear":
        slots = tuple(slots)
        if sorted(map(repr, slots)) != sorted(map(repr, self.slots)) or \
                set(slots) != set(self.slots):
            raise ArityMismatch("reorder needs the same slot labels")
        where = [self.slots.index(s) for s in slots]
        return Multilinear(slots, self.dim,
                           {tuple(k[w] for w in where): v for k, v in self.table.items()})

    def relabel(self, mapping: Callable) -> "Multilinear":
        return Multilinear(tuple(mapping(s) for s in self.slots), self.dim, dict(self.table))

    def scale(self, s) -> "Multilinear":
        s = Fraction(s)
        if not s:
            return Multilinear(self.slots, self.dim, {})
        return Multilinear(self.slots, self.dim, {k: s * v for k, v in self.table.items()})

    def __add__(self, other: "Multilinear") -> "Multilinear":
        other = other.reorder(self.slots)
        t = dict(self.table)
        for k, v in other.table.items():
            w = t.get(k, Fraction(0)) + v
            if w:
                t[k] = w
            else:
                t.pop(k, None)
        return Multilinear(self.slots, self.dim, t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def _clean(self) -> dict:
        return {k: v for k, v in self.table.items() if v}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multilinear):
            return NotImplemented
        if self.dim != other.dim or set(self.slots) != set(other.slots):
            return False
        return self._clean() == other.reorder(self.slots)._clean()

    def __hash__(self):
        return hash((frozenset(self.slots), self.dim, len(self._clean())))

    def is_zero(self) -> bool:
        return not self._clean()

    def outer(self, other: "Multilinear") -> "Multilinear":
        if set(self.slots) & set(other.slots):
            raise ArityMismatch("outer product needs disjoint slot labels")
        t = {}
        for k1, v1 in self.table.items():
            for k2, v2 in other.table.items():
                v = v1 * v2
                if v:
                    t[k1 + k2] = v
        return Multilinear(self.slots + other.slots, self.dim, t)

    def transform(self, mats: dict) -> "Multilinear":
        """Apply a matrix to selected slots: new[.., k, ..] = sum_l M[k][l] old[.., l, ..]."""
        t = dict(self.table)
        for s, M in mats.items():
            ax = self.slots.index(s)
            nt = {}
            for key, v in t.items():
                l = key[ax]
                for k in range(self.dim):
                    c = M[k][l]
                    if c:
                        nk = key[:ax] + (k,) + key[ax + 1:]
                        nt[nk] = nt.get(nk, Fraction(0)) + c * v
            t = {k: v for k, v in nt.items() if v}
        return Multilinear(self.slots, self.dim, t)


def scalar(value, dim: int) -> Multilinear:
    value = Fraction(value)
    return Multilinear((), dim, {(): value} if value else {})


def contract(phi: Multilinear, psi: Multilinear, pairs: Sequence[tuple],
             C: Sequence[Sequence[Fraction]]) -> Multilinear:
    """Insert one copy of the Casimir C = sum C[p][q] e_p (x) e_q per slot pair.

    `pairs` lists (slot of phi, slot of psi).  The result has phi's
    remaining slots followed by psi's remaining slots.
    """
    if set(phi.slots) & set(psi.slots):
        raise ArityMismatch("contracted forms need disjoint slot labels")
    ia = [phi.slots.index(a) for a, _ in pairs]
    ib = [psi.slots.index(b) for _, b in pairs]
    if len(set(ia)) != len(ia) or len(set(ib)) != len(ib):
        raise ArityMismatch("a slot may be contracted only once")
    rest_a = [k for k in range(phi.arity) if k not in ia]
    rest_b = [k for k in range(psi.arity) if k not in ib]
    # group psi by its contracted indices
    by_b = {}
    for key, v in psi.table.items():
        by_b.setdefault(tuple(key[k] for k in ib), []).append((tuple(key[k] for k in rest_b), v))
    out = {}
    for key, v in phi.table.items():
        ps = [key[k] for k in ia]
        ra = tuple(key[k] for k in rest_a)
        choices = [[(q, C[p][q]) for q in range(phi.dim) if C[p][q]] for p in ps]
        for combo in itertools.product(*choices):
            w = v
            for _, c in combo:
                w *= c
            for rb, u in by_b.get(tuple(q for q, _ in combo), ()):
                k = ra + rb
                out[k] = out.get(k, Fraction(0)) + w * u
    slots = tuple(phi.slots[k] for k in rest_a) + tuple(psi.slots[k] for k in rest_b)
    return Multilinear(slots, phi.dim, {k: v for k, v in out.items() if v})


def self_contract(phi: Multilinear, pairs: Sequence[tuple], C) -> Multilinear:
    """Contract pairs of slots of a single form with the Casimir."""
    idx = [(phi.slots.index(a), phi.slots.index(b)) for a, b in pairs]
    used = [k for ab in idx for k in ab]
    if len(set(used)) != len(used):
        raise ArityMismatch("a slot may be contracted only once")
    rest = [k for k in range(phi.arity) if k not in used]
    out = {}
    for key, v in phi.table.items():
        w = v
        for a, b in idx:
            w *= C[key[a]][key[b]]
            if not w:
                break
        if w:
            k = tuple(key[r] for r in rest)
            out[k] = out.get(k, Fraction(0)) + w
    return Multilinear(tuple(phi.slots[k] for k in rest), phi.dim,
                       {k: v for k, v in out.items() if v})


def compose_correlators(phi: Multilinear, i: int, psi: Multilinear, C) -> Multilinear:
    """phi o_i psi: Casimir in slot i of phi and slot 0 of psi.

    Slots are positional: the result lists phi's slots 0..i-1, then psi's
    slots 1..m, then phi's slots i+1..n, renumbered 0..n+m-1.
    """
    n, m = phi.arity - 1, psi.arity - 1
    if not 1 <= i <= n or m < 0:
        raise ArityMismatch(f"slot {i} is not an input slot of an arity {n + 1} form")
    a = phi.relabel(lambda s: ("a", phi.slots.index(s)))
    b = psi.relabel(lambda s: ("b", psi.slots.index(s)))
    r = contract(a, b, [(("a", i), ("b", 0))], C)
    order = [("a", k) for k in range(i)] + [("b", k) for k in range(1, m + 1)] + \
            [("a", k) for k in range(i + 1, n + 1)]
    r = r.reorder(order)
    return Multilinear(tuple(range(len(order))), r.dim, dict(r.table))


def _tabulate(A: GradedAlgebra, slots: Sequence, fn) -> Multilinear:
    table = {}
    for idx in itertools.product(range(A.dim), repeat=len(slots)):
        v = Fraction(fn(idx))
        if v:
            table[idx] = v
    return Multilinear(tuple(slots), A.dim, table)


def trace_correlator(A: GradedAlgebra, n: int) -> Multilinear:
    """(a_0, ..., a_n) -> integral of a_0 a_1 ... a_n."""
    return _tabulate(A, range(n + 1), lambda idx: A.trace(A.product([A.basis(k) for k in idx])))


def pairing_form(A: GradedAlgebra) -> Multilinear:
    return trace_correlator(A, 1)


# ----------------------------------------------------------------------
# polygons and surfaces
# ----------------------------------------------------------------------

def y_polygon(A: GradedAlgebra, sides: Sequence) -> Fraction:
    if not sides:
        raise ArityMismatch("a polygon has at least one side")
    return A.trace(A.product(list(sides)))


def y_surface(A: GradedAlgebra, cycles: Sequence[Sequence], genus: int = 0) -> Fraction:
    """Integral of the product of all decorations times e^(1 - chi).

    `cycles` holds the decorations of each boundary cycle of the region in
    cyclic order.
    """
    chi = 2 - 2 * genus - len(cycles)
    if chi > 1:
        raise ArityMismatch("a region has at least one boundary cycle")
    if chi != 1:
        A.require_commutative("a correlator on a region that is not a disk")
    elems = [x for cyc in cycles for x in cyc]
    if chi == 1:
        return A.trace(A.product(elems))
    return A.trace(A.mul(A.product(elems), A.power(A.euler(), 1 - chi)))


# ----------------------------------------------------------------------
# partitioned arc graphs
# ----------------------------------------------------------------------

def _graph_of(gamma) -> ArcGraph:
    return gamma.graph if isinstance(gamma, PartitionedArcGraph) else gamma


def _marks(core) -> list:
    return [1] * len(core.iota) if core.marks is None else list(core.marks)


def angle_slots(gamma) -> tuple:
    """Positions of flags followed by an angle marked 1, in flag order."""
    core = _graph_of(gamma).core
    return tuple(p for p, m in enumerate(_marks(core)) if m == 1)


def region_slots(gamma) -> list:
    """Per region: (genus, [slot positions per cycle in cyclic order])."""
    core = _graph_of(gamma).core
    marks = _marks(core)
    out = []
    for genus, keys in core.regions:
        cycles = []
        for k in sorted(keys):
            if k < 0:
                cycles.append([])
                continue
            orbit = core.orbits[core.orbit[k]]
            cycles.append([core.iota[q] for q in orbit if marks[core.iota[q]] == 1])
        out.append((genus, cycles))
    return out


def y_partitioned_combinatorial(A: GradedAlgebra, gamma) -> Multilinear:
    """Product over regions of surface correlators, without orientation sign."""
    result = scalar(1, A.dim)
    for genus, cycles in region_slots(gamma):
        slots = [s for cyc in cycles for s in cyc]
        lengths = [len(c) for c in cycles]

        def fn(idx, lengths=lengths, genus=genus):
            elems = [A.basis(k) for k in idx]
            cyc, pos = [], 0
            for n in lengths:
                cyc.append(elems[pos:pos + n])
                pos += n
            return y_surface(A, cyc, genus)
        result = result.outer(_tabulate(A, slots, fn))
    return result.reorder(angle_slots(gamma))


def y_partitioned(A: GradedAlgebra, gamma, inputs: Optional[dict] = None,
                  oriented: bool = True):
    """Correlator of an angle marked partitioned graph.

    Returns the Multilinear over the 1-marked angles (slot = flag position)
    or, given `inputs` (slot -> vector), its value.  Unmarked graphs use the
    constant marking 1.
    """
    form = y_partitioned_combinatorial(A, gamma)
    if oriented and isinstance(gamma, PartitionedArcGraph):
        form = form.scale(orientation_sign(gamma))
    if inputs is None:
        return form
    return form.evaluate(inputs)


# ----------------------------------------------------------------------
# ribbon graphs and Feynman rules
# ----------------------------------------------------------------------

def y_ribbon(A: GradedAlgebra, gamma: MarkedRibbonGraph, inputs: Optional[dict] = None):
    """Product over vertices of the integral of the 1-marked angle decorations.

    Slots are flag names; the angle named by a flag follows it at its vertex.
    """
    marks = {f: 1 for fl in gamma.vertices for f in fl}
    if gamma.angle_marks is not None:
        marks = dict(gamma.angle_marks)
    result = scalar(1, A.dim)
    order = []
    for fl in gamma.vertices:
        slots = [f for f in fl if marks[f] == 1]
        order.extend(slots)
        result = result.outer(_tabulate(
            A, slots, lambda idx: A.trace(A.product([A.basis(k) for k in idx]))))
    if inputs is None:
        return result
    return result.evaluate(inputs)


def is_cyclic(phi: Multilinear) -> bool:
    n = phi.arity
    if n <= 1:
        return True
    rot = phi.slots[1:] + phi.slots[:1]
    moved = Multilinear(rot, phi.dim, dict(phi.table))
    return moved.reorder(phi.slots) == phi


def feynman(A: GradedAlgebra, gamma: MarkedRibbonGraph, decorations: Sequence[Multilinear],
            method: str = "direct") -> Fraction:
    """Contract one Casimir per edge into the vertex decorations.

    decorations[v] has one slot per flag of vertex v, in the vertex's cyclic
    order; each must be invariant under cyclic rotation.
    """
    if len(decorations) != len(gamma.vertices):
        raise ArityMismatch("one decoration per vertex is required")
    forms = []
    for v, (fl, phi) in enumerate(zip(gamma.vertices, decorations)):
        if phi.arity != len(fl):
            raise ArityMismatch(f"vertex {v} has valence {len(fl)}")
        if not is_cyclic(phi):
            raise ContractViolation(f"decoration of vertex {v} is not cyclic")
        forms.append(Multilinear(tuple(fl), phi.dim, dict(phi.table)))
    C = A.casimir()
    edges = [tuple(e) for e in gamma.edges]
    if method == "direct":
        flags = [f for fl in gamma.vertices for f in fl]
        pos = {f: k for k, f in enumerate(flags)}
        total = Fraction(0)
        choices = [[(p, q, C[p][q]) for p in range(A.dim) for q in range(A.dim) if C[p][q]]
                   for _ in edges]
        for combo in itertools.product(*choices):
            idx = [0] * len(flags)
            w = Fraction(1)
            for (a, b), (p, q, c) in zip(edges, combo):
                idx[pos[a]], idx[pos[b]] = p, q
                w *= c
            for fl, phi in zip(gamma.vertices, forms):
                w *= phi.at([idx[pos[f]] for f in fl])
                if not w:
                    break
            total += w
        return total
    if method != "sequential":
        raise ValueError("method is 'direct' or 'sequential'")
    # merge vertices edge by edge
    comps = {v: forms[v] for v in range(len(forms))}
    owner = {f: v for v, fl in enumerate(gamma.vertices) for f in fl}
    for a, b in edges:
        va, vb = owner[a], owner[b]
        if va == vb:
            comps[va] = self_contract(comps[va], [(a, b)], C)
        else:
            merged = contract(comps[va], comps[vb], [(a, b)], C)
            del comps[vb]
            comps[va] = merged
            for f, v in owner.items():
                if v == vb:
                    owner[f] = va
    total = Fraction(1)
    for phi in comps.values():
        total *= phi.at(())
    return total


# ----------------------------------------------------------------------
# tensor words: pairing correlators and the vector action
# ----------------------------------------------------------------------

def y_tensor(gamma, words: Sequence[Sequence[int]], pair: Callable[[int, int], Fraction],
             oriented: bool = True) -> Fraction:
    """Product over edges of the pairing of the letters at its two flags."""
    core = _graph_of(gamma).core
    if len(words) != len(core.sizes):
        raise ArityMismatch("one word per boundary is required")
    if any(len(w) != s for w, s in zip(words, core.sizes)):
        return Fraction(0)
    letters = [x for w in words for x in w]
    total = Fraction(1)
    for p, q in core.edges():
        total *= pair(letters[p], letters[q])
        if not total:
            return total
    if oriented and isinstance(gamma, PartitionedArcGraph):
        total *= orientation_sign(gamma)
    return total


def act_vector(gamma, in_words: dict) -> dict:
    """Action of an in/out graph on words: returns {out words tuple: coefficient}.

    `in_words` maps each In label to a word.  Its letters decorate the
    flags last to first, which is the order in which an Out boundary meets
    them after gluing, so the one-arc annulus acts as the identity.  Each
    Out boundary reads the letters across its flags first to last.
    """
    g = _graph_of(gamma)
    core = g.core
    if core.io is None:
        raise DomainError("the vector action needs io marks")
    ins = [lab for lab, x in enumerate(core.io) if x == "in"]
    outs = [lab for lab, x in enumerate(core.io) if x == "out"]
    if sorted(in_words) != ins:
        raise ArityMismatch("one word per In boundary is required")
    letter = {}
    for lab in ins:
        w = tuple(in_words[lab])
        if len(w) != core.sizes[lab]:
            return {}
        top = core.offsets[lab] + len(w) - 1
        for k, x in enumerate(w):
            letter[top - k] = x
    out = []
    for lab in outs:
        lo = core.offsets[lab]
        w = []
        for p in range(lo, lo + core.sizes[lab]):
            q = core.iota[p]
            if q not in letter:
                raise DomainError("an Out flag is not joined to an In boundary")
            w.append(letter[q])
        out.append(tuple(w))
    sign = orientation_sign(gamma) if isinstance(gamma, PartitionedArcGraph) else 1
    return {tuple(out): Fraction(sign)}


def act_graph(alpha: ArcGraph, in_words: dict) -> dict:
    """alpha(a) = sum over partitions p of alpha^p(a); empty words count as
    the unit of k and only hit empty boundaries."""
    weight = sum(len(w) for w in in_words.values())
    out = {}
    for term, c in expand(alpha, max(weight, alpha.n_arcs)):
        for words, v in act_vector(term, in_words).items():
            out[words] = out.get(words, 0) + c * v
    return {k: v for k, v in out.items() if v}


def act_sum(x, in_words: dict) -> dict:
    """Linear extension of act_graph to a formal sum of graphs."""
    out = {}
    for g, c in x:
        for words, v in act_graph(g, in_words).items():
            out[words] = out.get(words, 0) + c * v
    return {k: v for k, v in out.items() if v}


# ----------------------------------------------------------------------
# Hochschild decorations
# ----------------------------------------------------------------------

def _boundary_ones(core, marks) -> list:
    return [sum(1 for p in range(core.offsets[lab], core.offsets[lab] + s) if marks[p] == 1)
            for lab, s in enumerate(core.sizes)]


def contributing_partitions(alpha: ArcGraph, counts: dict, bound: Optional[int] = None):
    """Multiplicity vectors p with exactly counts[lab] one-marked angles at lab.

    Each new partitioning angle is marked 1, so a flag of multiplicity n
    adds n - 1 such angles at its boundary.  `counts` may leave boundaries
    out; those are unconstrained up to `bound`.
    """
    g = _with_marks(alpha)
    core = g.core
    ones = _boundary_ones(core, core.marks)
    edges = core.edges()
    need = {lab: c - ones[lab] for lab, c in counts.items()}
    if any(v < 0 for v in need.values()):
        return []
    if bound is None:
        bound = max(list(counts.values()) + [1])
    out = []
    cur = [0] * len(edges)
    left = dict(need)

    def rec(e):
        if e == len(edges):
            if all(v == 0 for v in left.values()):
                out.append(tuple(cur))
            return
        p, q = edges[e]
        la, lb = core.label[p], core.label[q]
        for m in range(1, bound + 1):
            extra = m - 1
            ok = True
            for lab in (la, lb):
                if lab in left and left[lab] - extra * ((la == lab) + (lb == lab)) < 0:
                    ok = False
            if not ok:
                break
            for lab in {la, lb}:
                if lab in left:
                    left[lab] -= extra * ((la == lab) + (lb == lab))
            cur[e] = m
            rec(e + 1)
            for lab in {la, lb}:
                if lab in left:
                    left[lab] += extra * ((la == lab) + (lb == lab))
    rec(0)
    return out


def boundary_slots(gamma, lab: int) -> list:
    """1-marked angles of a boundary in decoration order: the outside angle
    first, then the inner ones.

    Component 0 of a dualized cochain decorates the outside angle and
    component k >= 1 the k-th inner 1-marked angle, counted against the
    boundary at In boundaries (and at boundaries without io marks) and
    along it at Out boundaries.  With this order the one-arc annulus acts
    as the identity and products come out in argument order.
    """
    core = _graph_of(gamma).core
    marks = _marks(core)
    lo, s = core.offsets[lab], core.sizes[lab]
    inner = [p for p in range(lo, lo + s - 1) if marks[p] == 1]
    if core.io is None or core.io[lab] != "out":
        inner.reverse()
    outside = [lo + s - 1] if s and marks[lo + s - 1] == 1 else []
    return outside + inner


def decoration_sign(gamma, labels: Sequence[int]) -> int:
    """Sign of the permutation taking the decorated angles from edge order
    (both ends of each edge in turn) to decoration order (boundaries in the
    given order, each as in boundary_slots)."""
    core = _graph_of(gamma).core
    dec = [q for lab in labels for q in boundary_slots(gamma, lab)]
    wanted = set(dec)
    rank = {}
    for e in core.edges():
        for q in e:
            if q in wanted and q not in rank:
                rank[q] = len(rank)
    seq = [rank[q] for q in dec]
    return permutation_sign(seq)


def _cyclic_of(A: GradedAlgebra, f) -> CyclicCochain:
    from .hochschild import dualize
    if isinstance(f, CyclicCochain):
        return f
    return dualize(A, f)


def hochschild_form(A: GradedAlgebra, alpha: ArcGraph, cochains: dict,
                    open_boundary: Optional[int] = None, open_arity: Optional[int] = None,
                    partition: Optional[Sequence[int]] = None):
    """Sum over contributing partitions of the decorated correlators.

    `cochains` maps boundary labels to Cochain or CyclicCochain.  With
    `open_boundary`, that boundary is left undecorated and the result is a
    CyclicCochain of arity open_arity + 1 (outside angle first).  Otherwise
    the result is a scalar.  `partition` keeps only that one summand.
    """
    g = _with_marks(alpha)
    core = g.core
    phis = {lab: _cyclic_of(A, f) for lab, f in cochains.items()}
    counts = {lab: phi.arity for lab, phi in phis.items()}
    labels = set(range(len(core.sizes)))
    if open_boundary is not None:
        counts[open_boundary] = open_arity + 1
    if set(counts) != labels:
        raise ArityMismatch("every boundary needs a cochain or must be open")
    D = A.dual_basis()
    dual = [[D[k][l] for l in range(A.dim)] for k in range(A.dim)]
    total = {}
    bound = max(counts.values()) if counts else 1
    order = sorted(labels)
    parts = contributing_partitions(g, counts, bound)
    if partition is not None:
        parts = [p for p in parts if tuple(p) == tuple(partition)]
    for p in parts:
        # the orientation sign of alpha^p cancels the partitioning sign; what
        # remains is the Koszul sign of the decorated angles as odd lines
        _, term = partition_term(g, p, angle=True)
        sign = decoration_sign(term, order)
        form = y_partitioned_combinatorial(A, term).scale(sign)
        mats = {s: dual for lab in phis for s in boundary_slots(term, lab)}
        form = form.transform(mats)
        # contract each decorated boundary against its cochain
        for key, v in form.table.items():
            w = v
            for lab, phi in phis.items():
                idx = tuple(key[form.slots.index(s)] for s in boundary_slots(term, lab))
                w *= phi.at(idx)
                if not w:
                    break
            if not w:
                continue
            if open_boundary is None:
                okey = ()
            else:
                okey = tuple(key[form.slots.index(s)]
                             for s in boundary_slots(term, open_boundary))
            total[okey] = total.get(okey, Fraction(0)) + w
    if open_boundary is None:
        return total.get((), Fraction(0))
    return CyclicCochain(open_arity + 1, A.dim, {k: v for k, v in total.items() if v})


def y_hochschild(A: GradedAlgebra, alpha: ArcGraph, cochains: Sequence) -> Fraction:
    """Y(alpha)(f_0, ..., f_n): zero when no partition matches the arities."""
    if len(cochains) != len(alpha.boundaries):
        raise ArityMismatch("one cochain per boundary is required")
    return hochschild_form(A, alpha, dict(enumerate(cochains)))


def hochschild_operation(A: GradedAlgebra, alpha: ArcGraph, inputs: dict,
                         out_arity: int, out: int = 0,
                         partition: Optional[Sequence[int]] = None) -> Cochain:
    """The cochain g with Y(alpha)(f_out, inputs) = <f_out, g> for every f_out."""
    phi = hochschild_form(A, alpha, inputs, open_boundary=out, open_arity=out_arity,
                          partition=partition)
    # the open slots hold basis elements; the dualized cochain pairs against
    # the dual basis, so convert back through the pairing
    return undualize(A, phi)


# ----------------------------------------------------------------------
# polygons as a cyclic operad
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Polygon:
    """Sides in cyclic order; a side is an input label or None (undecorated)."""
    sides: tuple

    @property
    def labels(self) -> list:
        return [s for s in self.sides if s is not None]

    @property
    def arity(self) -> int:
        return len(self.labels) - 1

    def rotate_to(self, label) -> tuple:
        k = self.sides.index(label)
        return self.sides[k:] + self.sides[:k]


def polygon(n: int, order: Optional[Sequence[int]] = None, with_gaps: bool = False) -> Polygon:
    """The (n+1)-gon with labels in `order`; with gaps, a 2(n+1)-gon whose
    undecorated sides alternate with the labelled ones."""
    order = tuple(range(n + 1)) if order is None else tuple(order)
    if sorted(order) != list(range(n + 1)):
        raise ArityMismatch("labels must be a permutation of 0..n")
    if with_gaps:
        return Polygon(tuple(x for s in order for x in (s, None)))
    return Polygon(order)


def glue_polygons(P: Polygon, i: int, Q: Polygon) -> Polygon:
    """Glue side i of P to side 0 of Q; adjacent undecorated sides merge."""
    n, m = P.arity, Q.arity
    if not 1 <= i <= n:
        raise ArityMismatch(f"side {i} is not an input side")
    q = Q.rotate_to(0)[1:]

    def relabel_p(s):
        return s if s is None or s < i else s + m - 1

    def relabel_q(s):
        return None if s is None else s + i - 1

    p = P.rotate_to(i)[1:]
    seq = [relabel_q(s) for s in q] + [relabel_p(s) for s in p]
    # merge runs of undecorated sides cyclically
    merged = []
    for s in seq:
        if s is None and merged and merged[-1] is None:
            continue
        merged.append(s)
    if len(merged) > 1 and merged[0] is None and merged[-1] is None:
        merged.pop()
    return Polygon(tuple(merged))


def y_poly(A: GradedAlgebra, P: Polygon) -> Multilinear:
    """Integral of the decorations in cyclic order; slots are the labels 0..n."""
    labels = P.labels
    # slot k of the tabulation is label k; multiply in cyclic side order
    return _tabulate(A, range(len(labels)), lambda idx: A.trace(
        A.product([A.basis(idx[s]) for s in labels])))


# ----------------------------------------------------------------------
# A-infinity seeds on dissected polygons
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Dissection:
    """An (n+1)-gon with vertices 0..n and non-crossing diagonals.

    Side k joins vertex k and vertex k+1 (mod n+1); side 0 is the output.
    """
    n: int
    diagonals: tuple = ()

    def pieces(self) -> list:
        """Each piece as the cyclic list of its sides: ("side", k) or ("diag", d)."""
        N = self.n + 1
        pieces = [list(range(N))]
        # split vertex cycles by each diagonal in turn
        for d in self.diagonals:
            a, b = d
            for k, cyc in enumerate(pieces):
                if a in cyc and b in cyc:
                    ia, ib = cyc.index(a), cyc.index(b)
                    if ia > ib:
                        ia, ib = ib, ia
                    one = cyc[ia:ib + 1]
                    two = cyc[ib:] + cyc[:ia + 1]
                    pieces[k:k + 1] = [one, two]
                    break
        diag = {tuple(sorted(d)) for d in self.diagonals}
        out = []
        for cyc in pieces:
            sides = []
            for t in range(len(cyc)):
                u, v = cyc[t], cyc[(t + 1) % len(cyc)]
                e = tuple(sorted((u, v)))
                if e in diag:
                    sides.append(("diag", e))
                else:
                    k = u if (v - u) % N == 1 else v
                    sides.append(("side", k))
            out.append(sides)
        return out


def _crosses(d1, d2) -> bool:
    a, b = sorted(d1)
    c, d = sorted(d2)
    return (a < c < b < d) or (c < a < d < b)


def all_diagonals(n: int) -> list:
    N = n + 1
    return [(a, b) for a in range(N) for b in range(a + 2, N) if not (a == 0 and b == N - 1)]


def poly_infty_differential(P: Dissection) -> dict:
    """Insert one diagonal; the new diagonal's line is moved into its sorted place."""
    out = {}
    have = sorted(tuple(sorted(d)) for d in P.diagonals)
    for d in all_diagonals(P.n):
        if d in have or any(_crosses(d, e) for e in have):
            continue
        new = sorted(have + [d])
        sign = (-1) ** new.index(d)
        key = Dissection(P.n, tuple(new))
        out[key] = out.get(key, 0) + sign
    return {k: v for k, v in out.items() if v}


def seed_correlator(A: GradedAlgebra, mu: Callable, k: int) -> Multilinear:
    """Y(o_k)(a_0, ..., a_k) = <a_0, mu_k(a_1, ..., a_k)>, checked cyclic."""
    phi = _tabulate(A, range(k + 1),
                    lambda idx: A.pair(A.basis(idx[0]), mu(k, [A.basis(j) for j in idx[1:]])))
    if not is_cyclic(phi):
        raise ContractViolation(f"the arity {k} seed correlator is not cyclically invariant")
    return phi


def y_poly_infty(A: GradedAlgebra, P: Dissection, mu: Callable) -> Multilinear:
    """Casimir composition of seed correlators over the pieces of P.

    `mu(k, elems)` returns mu_k of a list of k vectors.  Slots are side
    numbers 0..n.
    """
    C = A.casimir()
    forms = []
    for piece in P.pieces():
        k = len(piece) - 1
        seed = seed_correlator(A, mu, k)
        forms.append(Multilinear(tuple(piece), A.dim, dict(seed.table)))
    acc = forms[0]
    rest = forms[1:]
    while rest:
        for t, f in enumerate(rest):
            shared = [s for s in f.slots if s[0] == "diag" and s in acc.slots]
            if shared:
                d = shared[0]
                a = acc.relabel(lambda s: ("L", s) if s[0] == "diag" else s)
                b = f.relabel(lambda s: ("R", s) if s[0] == "diag" else s)
                acc = contract(a, b, [(("L", d), ("R", d))], C)
                acc = acc.relabel(lambda s: s[1] if s[0] in ("L", "R") else s)
                del rest[t]
                break
        else:
            raise AssertionError("dissection pieces are not connected")
    acc = acc.reorder([("side", k) for k in range(P.n + 1)])
    return Multilinear(tuple(range(P.n + 1)), A.dim, dict(acc.table))


# ----------------------------------------------------------------------
# cylinder
# ----------------------------------------------------------------------

def y_cylinder(A: GradedAlgebra, n: int, m: int, i: int, j: int) -> Multilinear:
    """Cut cylinder correlator: slots ("a", 1..n) then ("b", 1..m)."""
    A.require_commutative("the cylinder correlator")
    if not (1 <= i <= n and 1 <= j <= m):
        raise ArityMismatch("cut indices out of range")

    def fn(idx):
        a = [A.basis(k) for k in idx[:n]]
        b = [A.basis(k) for k in idx[n:]]
        rot = b[j - 1:] + b[:j - 1]
        M = A.coproduct(a[i - 1])
        total = Fraction(0)
        for p in range(A.dim):
            for q in range(A.dim):
                if M[p][q]:
                    word = a[:i - 1] + [A.basis(p)] + rot + [A.basis(q)] + a[i:]
                    total += M[p][q] * A.trace(A.product(word))
        return total
    slots = [("a", k) for k in range(1, n + 1)] + [("b", k) for k in range(1, m + 1)]
    return _tabulate(A, slots, fn)


def euler_correlator(A: GradedAlgebra, n: int, m: int) -> Multilinear:
    slots = [("a", k) for k in range(1, n + 1)] + [("b", k) for k in range(1, m + 1)]
    e = A.euler()
    return _tabulate(A, slots, lambda idx: A.trace(A.mul(A.product([A.basis(k) for k in idx]), e)))


__all__ = [
    "ArityMismatch", "ContractViolation", "Multilinear", "scalar", "contract",
    "self_contract", "compose_correlators", "trace_correlator", "pairing_form",
    "y_polygon", "y_surface", "angle_slots", "region_slots", "y_partitioned",
    "y_partitioned_combinatorial", "y_ribbon", "is_cyclic", "feynman", "y_tensor",
    "act_vector", "act_graph", "act_sum", "contributing_partitions", "decoration_sign", "boundary_slots", "hochschild_form",
    "y_hochschild", "hochschild_operation", "Polygon", "polygon", "glue_polygons",
    "y_poly", "Dissection", "all_diagonals", "poly_infty_differential",
    "seed_correlator", "y_poly_infty", "y_cylinder", "euler_correlator",
]
