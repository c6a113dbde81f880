"""Arc graphs, marked ribbon graphs, and the cell differential.

An arc graph on a surface with labelled boundary components is stored as

* the flags at each boundary in their linear order (index = label),
* the arc involution, given as a tuple of flag pairs,
* the complementary regions, each a genus plus a set of boundary cycles,
* the genus of the surface,
* optionally an angle marking (angle named by the flag it follows) and
  an in/out marking of the boundaries.

Flags carry a total order: by boundary label, then by position.  Since
boundary labels are fixed, two graphs are isomorphic exactly when their
positional data agree, which is what :func:`graph_key` records.  All
algorithms work on positions and rebuild graphs with positional flag
names ``"<label>.<index>"``; user supplied names are only preserved by
the file format round-trip.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Iterator, Optional, Sequence

ARC = "arc"
ANGLE = "angle"
BOUNDARY = "boundary"

FAMILIES = ("all", "exhaustive", "quasi_filling", "in_out", "bar_in_out", "l_arc")


class StructuralError(ValueError):
    """Input is not even a well-formed graph (dangling or repeated flags)."""


class DomainError(ValueError):
    """Operation is not defined on this input."""


class MarkingMissingError(DomainError):
    """An angle or in/out marking was required but absent."""


class CapExceededError(RuntimeError):
    """Enumeration would exceed the configured resource cap."""


@dataclass(frozen=True)
class Region:
    genus: int
    cycles: tuple

    @property
    def euler_char(self) -> int:
        return 2 - 2 * self.genus - len(self.cycles)

    @property
    def is_disk(self) -> bool:
        return self.genus == 0 and len(self.cycles) == 1


@dataclass(frozen=True)
class ArcGraph:
    boundaries: tuple
    arcs: tuple
    regions: tuple
    genus: int
    angle_marks: Optional[tuple] = None
    io: Optional[tuple] = None

    # ----- flag bookkeeping -------------------------------------------
    @cached_property
    def flag_order(self) -> tuple:
        return tuple(f for flags in self.boundaries for f in flags)

    @cached_property
    def position(self) -> dict:
        return {f: p for p, f in enumerate(self.flag_order)}

    @cached_property
    def location(self) -> dict:
        return {f: (lab, k) for lab, flags in enumerate(self.boundaries)
                for k, f in enumerate(flags)}

    @cached_property
    def iota(self) -> dict:
        out = {}
        for a, b in self.arcs:
            out[a] = b
            out[b] = a
        return out

    @property
    def n_boundaries(self) -> int:
        return len(self.boundaries)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @cached_property
    def marks(self) -> Optional[dict]:
        return None if self.angle_marks is None else dict(self.angle_marks)

    def succ(self, f: str) -> str:
        lab, k = self.location[f]
        flags = self.boundaries[lab]
        return flags[(k + 1) % len(flags)]

    def is_outside(self, f: str) -> bool:
        """True when the angle following `f` is the outside angle."""
        lab, k = self.location[f]
        return k == len(self.boundaries[lab]) - 1

    def edges(self) -> list:
        """Arcs as (earlier flag, later flag), in the linear order of edges."""
        pos = self.position
        es = [tuple(sorted(a, key=pos.__getitem__)) for a in self.arcs]
        return sorted(es, key=lambda e: pos[e[0]])

    # ----- positional view --------------------------------------------
    @cached_property
    def core(self) -> "_Core":
        return _Core.from_graph(self)

    def key(self) -> tuple:
        return graph_key(self)

    @property
    def weight(self) -> int:
        return self.n_arcs


def _flag_name(label: int, k: int) -> str:
    return f"{label}.{k}"


class _Core:
    """Positional data of an arc graph: sizes, involution, orbits, regions."""

    __slots__ = ("sizes", "offsets", "label", "iota", "orbit", "orbits",
                 "regions", "genus", "marks", "io")

    def __init__(self, sizes, iota, regions, genus, marks=None, io=None):
        self.sizes = tuple(sizes)
        self.offsets = list(itertools.accumulate((0,) + self.sizes))
        self.label = [lab for lab, s in enumerate(self.sizes) for _ in range(s)]
        self.iota = tuple(iota)
        self.genus = genus
        self.marks = None if marks is None else tuple(marks)
        self.io = None if io is None else tuple(io)
        self.orbits = []
        self.orbit = [None] * len(self.iota)
        for p in range(len(self.iota)):
            if self.orbit[p] is not None:
                continue
            cyc = []
            q = p
            while self.orbit[q] is None:
                self.orbit[q] = len(self.orbits)
                cyc.append(q)
                q = self.next_in_region(q)
            self.orbits.append(cyc)
        # regions: list of (genus, frozenset of cycle keys)
        self.regions = [(g, frozenset(ks)) for g, ks in regions]

    @classmethod
    def from_graph(cls, g: ArcGraph) -> "_Core":
        pos = g.position
        iota = [pos[g.iota[f]] for f in g.flag_order]
        regions = []
        for r in g.regions:
            keys = []
            for cyc in r.cycles:
                keys.append(_cycle_key_of_sides(cyc, pos))
            regions.append((r.genus, keys))
        marks = None
        if g.angle_marks is not None:
            m = g.marks
            marks = [m[f] for f in g.flag_order]
        return cls([len(b) for b in g.boundaries], iota, regions, g.genus,
                   marks, g.io)

    def succ(self, p: int) -> int:
        lab = self.label[p]
        lo, s = self.offsets[lab], self.sizes[lab]
        return lo + (p - lo + 1) % s

    def pred(self, p: int) -> int:
        lab = self.label[p]
        lo, s = self.offsets[lab], self.sizes[lab]
        return lo + (p - lo - 1) % s

    def is_first(self, p: int) -> bool:
        return p == self.offsets[self.label[p]]

    def is_last(self, p: int) -> bool:
        lab = self.label[p]
        return p == self.offsets[lab] + self.sizes[lab] - 1

    def next_in_region(self, p: int) -> int:
        return self.succ(self.iota[p])

    def cycle_keys(self) -> list:
        keys = [min(c) for c in self.orbits]
        keys += [-1 - lab for lab, s in enumerate(self.sizes) if s == 0]
        return keys

    def cycle_key_of(self, p: int) -> int:
        return min(self.orbits[self.orbit[p]])

    def region_of_key(self) -> dict:
        return {k: i for i, (_, ks) in enumerate(self.regions) for k in ks}

    def edges(self) -> list:
        return sorted((p, q) for p, q in enumerate(self.iota) if p < q)

    def key(self) -> tuple:
        regs = tuple(sorted((g, tuple(sorted(ks))) for g, ks in self.regions))
        return (self.sizes, self.iota, regs, self.genus,
                self.marks or (), self.io or ())

    def build(self) -> ArcGraph:
        return build_graph(self.sizes, self.iota, self.regions, self.genus,
                           self.marks, self.io)


def _cycle_key_of_sides(cyc, pos) -> int:
    flags = [s[1] for s in cyc if s[0] == ARC]
    if flags:
        return min(pos[f] for f in flags)
    if len(cyc) == 1 and cyc[0][0] == BOUNDARY:
        return -1 - int(cyc[0][1])
    raise StructuralError(f"malformed region cycle {cyc!r}")


def build_graph(sizes: Sequence[int], iota: Sequence[int], regions, genus: int,
                marks: Optional[Sequence[int]] = None,
                io: Optional[Sequence[str]] = None) -> ArcGraph:
    """Assemble an ArcGraph with positional flag names.

    `regions` is a list of (genus, cycle keys); a cycle key is the smallest
    flag position on the cycle, or ``-1 - label`` for an empty boundary.
    """
    names = [_flag_name(lab, k) for lab, s in enumerate(sizes) for k in range(s)]
    offsets = list(itertools.accumulate((0,) + tuple(sizes)))
    label = [lab for lab, s in enumerate(sizes) for _ in range(s)]

    def succ(p):
        lab = label[p]
        return offsets[lab] + (p - offsets[lab] + 1) % sizes[lab]

    def cycle_sides(key):
        if key < 0:
            return ((BOUNDARY, -1 - key),)
        sides = []
        q = key
        while True:
            sides.append((ARC, names[q]))
            sides.append((ANGLE, names[iota[q]]))
            q = succ(iota[q])
            if q == key:
                break
        return tuple(sides)

    order = []
    for g, keys in regions:
        ks = sorted(keys, key=_key_order)
        order.append((tuple(_key_order(k) for k in ks), g, ks))
    order.sort()
    regs = [Region(g, tuple(cycle_sides(k) for k in ks)) for _, g, ks in order]
    arcs = tuple((names[p], names[q]) for p, q in enumerate(iota) if p < q)
    bnds = tuple(tuple(names[offsets[lab]:offsets[lab] + s]) for lab, s in enumerate(sizes))
    am = None if marks is None else tuple((names[p], int(m)) for p, m in enumerate(marks))
    return ArcGraph(bnds, arcs, tuple(regs), genus, am,
                    None if io is None else tuple(io))


def _key_order(k: int):
    # flags before empty boundaries, each in natural order
    return (1, -1 - k) if k < 0 else (0, k)


def graph_key(g: ArcGraph) -> tuple:
    """Sortable isomorphism invariant; equal keys iff isomorphic graphs."""
    return g.core.key()


def canonical(g: ArcGraph) -> ArcGraph:
    return g.core.build()


# ----------------------------------------------------------------------
# validation and classification
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def __bool__(self) -> bool:
        return self.ok


def check_structure(g: ArcGraph) -> None:
    """Raise StructuralError unless flags, arcs and sides resolve."""
    seen = set()
    for flags in g.boundaries:
        for f in flags:
            if f in seen:
                raise StructuralError(f"flag {f!r} appears twice")
            seen.add(f)
    in_arcs = set()
    for arc in g.arcs:
        if len(arc) != 2:
            raise StructuralError(f"arc {arc!r} is not a pair")
        a, b = arc
        for f in (a, b):
            if f not in seen:
                raise StructuralError(f"arc references unknown flag {f!r}")
            if f in in_arcs:
                raise StructuralError(f"flag {f!r} lies on two arcs")
            in_arcs.add(f)
        if a == b:
            raise StructuralError(f"arc {arc!r} has a fixed point")
    if in_arcs != seen:
        missing = sorted(seen - in_arcs)
        raise StructuralError(f"flags without an arc: {missing}")
    for r in g.regions:
        if r.genus < 0:
            raise StructuralError("negative region genus")
        for cyc in r.cycles:
            for side in cyc:
                kind, ref = side
                if kind in (ARC, ANGLE) and ref not in seen:
                    raise StructuralError(f"side references unknown flag {ref!r}")
                if kind == BOUNDARY and not (0 <= int(ref) < g.n_boundaries):
                    raise StructuralError(f"side references unknown boundary {ref!r}")
                if kind not in (ARC, ANGLE, BOUNDARY):
                    raise StructuralError(f"unknown side kind {kind!r}")
    if g.genus < 0:
        raise StructuralError("negative genus")
    if g.angle_marks is not None:
        for f, m in g.angle_marks:
            if f not in seen:
                raise StructuralError(f"angle mark on unknown flag {f!r}")
    if g.io is not None and len(g.io) != g.n_boundaries:
        raise StructuralError("io marking must cover every boundary")


def euler_defect(g: ArcGraph) -> int:
    lhs = sum(r.euler_char for r in g.regions) - g.n_arcs
    return lhs - (2 - 2 * g.genus - g.n_boundaries)


def boundary_parallel_arcs(core: _Core) -> list:
    """Flags whose arc cuts a one-gon disk off the surface."""
    reg = core.region_of_key()
    bad = []
    for cyc in core.orbits:
        if len(cyc) == 1:
            g, ks = core.regions[reg[cyc[0]]]
            if g == 0 and len(ks) == 1:
                bad.append(cyc[0])
    return bad


def parallel_pairs(core: _Core) -> list:
    """Pairs of distinct arcs cobounding a rectangle away from the outside angles."""
    reg = core.region_of_key()
    out = []
    for cyc in core.orbits:
        if len(cyc) != 2:
            continue
        g, ks = core.regions[reg[min(cyc)]]
        if g != 0 or len(ks) != 1:
            continue
        a, b = cyc
        if core.iota[a] == b:
            continue
        if core.is_last(core.iota[a]) or core.is_last(core.iota[b]):
            continue
        out.append((a, b))
    return out


def _connected(core: _Core) -> bool:
    n = len(core.sizes)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for p, q in enumerate(core.iota):
        union(core.label[p], core.label[q])
    for _, ks in core.regions:
        labs = [(-1 - k) if k < 0 else core.label[k] for k in ks]
        for a, b in zip(labs, labs[1:]):
            union(a, b)
    return len({find(x) for x in range(n)}) <= 1


def validate(g: ArcGraph) -> ValidationReport:
    """Check every arc graph invariant; structural problems raise instead."""
    check_structure(g)
    core = g.core
    bad = []
    if g.n_arcs == 0:
        bad.append("no_arcs: a graph needs at least one arc")
    # stored cycles must be exactly the orbits, with the walk's side order
    stored = {}
    pos = g.position
    for r in g.regions:
        for cyc in r.cycles:
            k = _cycle_key_of_sides(cyc, pos)
            if k in stored:
                bad.append(f"cycles_mismatch: cycle {k} listed twice")
            stored[k] = cyc
    expected = set(core.cycle_keys())
    if set(stored) != expected:
        bad.append("cycles_mismatch: region cycles are not the orbits of the walk")
    else:
        ref = build_graph(core.sizes, core.iota,
                          [(0, [k]) for k in expected], 0)
        names = {f: g.flag_order[i] for i, f in enumerate(ref.flag_order)}
        for r in ref.regions:
            (cyc,) = r.cycles
            want = tuple((kind, names.get(ref_, ref_)) for kind, ref_ in cyc)
            have = stored[_cycle_key_of_sides(want, pos)]
            if not _same_cyclic(want, have):
                bad.append("cycles_mismatch: side order disagrees with the walk")
                break
    if not bad or all(not b.startswith("cycles_mismatch") for b in bad):
        if boundary_parallel_arcs(core):
            bad.append("boundary_parallel: an arc cuts off a one-gon")
        if parallel_pairs(core):
            bad.append("parallel_arcs: two arcs cobound an inner rectangle")
        if not _connected(core):
            bad.append("disconnected: regions and arcs do not form one surface")
    if euler_defect(g) != 0:
        bad.append("euler: region Euler characteristics do not sum correctly")
    if g.angle_marks is not None:
        if set(g.marks) != set(g.flag_order) or any(m not in (0, 1) for m in g.marks.values()):
            bad.append("angle_marks: marking must be a total map to {0,1}")
    if g.io is not None and any(x not in ("in", "out") for x in g.io):
        bad.append("io: labels must be 'in' or 'out'")
    return ValidationReport(not bad, tuple(bad))


def _same_cyclic(a, b) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = tuple(b) + tuple(b)
    return any(doubled[i:i + len(a)] == tuple(a) for i in range(len(b)))


def is_valid(g: ArcGraph) -> bool:
    return validate(g).ok


def twisted_boundaries(core: _Core) -> frozenset:
    """Boundaries where first and last arcs cobound a rectangle across the outside angle."""
    reg = core.region_of_key()
    out = set()
    for lab, s in enumerate(core.sizes):
        if s < 2:
            continue
        first = core.offsets[lab]
        last = first + s - 1
        x = core.iota[last]
        if x == first:
            continue
        cyc = core.orbits[core.orbit[x]]
        if len(cyc) != 2:
            continue
        g, ks = core.regions[reg[min(cyc)]]
        if g == 0 and len(ks) == 1:
            out.add(lab)
    return frozenset(out)


@dataclass(frozen=True)
class Classification:
    exhaustive: bool
    quasi_filling: bool
    twisted_at: frozenset
    in_out_only: Optional[bool] = None
    hits_all_in: Optional[bool] = None
    untwisted_at_in: Optional[bool] = None


def is_exhaustive(g: ArcGraph) -> bool:
    return all(len(b) > 0 for b in g.boundaries)


def is_quasi_filling(g: ArcGraph) -> bool:
    return all(r.is_disk for r in g.regions)


def _need_io(g: ArcGraph) -> tuple:
    if g.io is None:
        raise MarkingMissingError("in/out predicates need an io marking")
    return g.io


def in_out_only(g: ArcGraph) -> bool:
    io = _need_io(g)
    loc = g.location
    return all(io[loc[a][0]] != io[loc[b][0]] for a, b in g.arcs)


def hits_all_in(g: ArcGraph) -> bool:
    io = _need_io(g)
    return all(len(b) > 0 for lab, b in enumerate(g.boundaries) if io[lab] == "in")


def untwisted_at_in(g: ArcGraph) -> bool:
    io = _need_io(g)
    tw = twisted_boundaries(g.core)
    return not any(io[lab] == "in" for lab in tw)


def classify(g: ArcGraph, require_io: bool = False) -> Classification:
    if require_io:
        _need_io(g)
    tw = twisted_boundaries(g.core)
    if g.io is None:
        return Classification(is_exhaustive(g), is_quasi_filling(g), tw)
    return Classification(is_exhaustive(g), is_quasi_filling(g), tw,
                          in_out_only(g), hits_all_in(g), untwisted_at_in(g))


def in_family(g: ArcGraph, family: str) -> bool:
    if family == "all":
        return True
    if family == "exhaustive":
        return is_exhaustive(g)
    if family == "quasi_filling":
        return is_quasi_filling(g)
    if family == "in_out":
        return in_out_only(g)
    if family == "bar_in_out":
        return in_out_only(g) and hits_all_in(g)
    if family == "l_arc":
        return in_out_only(g) and hits_all_in(g) and untwisted_at_in(g)
    raise ValueError(f"unknown family {family!r}")


def relabel(g: ArcGraph, perm: Sequence[int]) -> ArcGraph:
    """Move boundary `lab` to label ``perm[lab]``."""
    n = g.n_boundaries
    if sorted(perm) != list(range(n)):
        raise ValueError("perm must be a permutation of the labels")
    inv = [0] * n
    for a, b in enumerate(perm):
        inv[b] = a
    bnds = tuple(g.boundaries[inv[b]] for b in range(n))
    regions = []
    for r in g.regions:
        cycles = tuple(
            tuple((BOUNDARY, perm[int(ref)]) if kind == BOUNDARY else (kind, ref)
                  for kind, ref in cyc)
            for cyc in r.cycles)
        regions.append(Region(r.genus, cycles))
    io = None if g.io is None else tuple(g.io[inv[b]] for b in range(n))
    return ArcGraph(bnds, g.arcs, tuple(regions), g.genus, g.angle_marks, io)


# ----------------------------------------------------------------------
# formal sums
# ----------------------------------------------------------------------

class FormalSum:
    """Integer combination of graphs, keyed by isomorphism class."""

    def __init__(self, items: Iterable = ()):
        self.terms: dict = {}
        for obj, c in items:
            self.add(obj, c)

    def add(self, obj, coeff: int = 1) -> "FormalSum":
        if coeff == 0:
            return self
        k = obj.key()
        if k in self.terms:
            o, c = self.terms[k]
            c += coeff
            if c:
                self.terms[k] = (o, c)
            else:
                del self.terms[k]
        else:
            self.terms[k] = (obj, coeff)
        return self

    def __iter__(self) -> Iterator:
        for k in sorted(self.terms):
            yield self.terms[k]

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = FormalSum(self)
        for obj, c in other:
            out.add(obj, c)
        return out

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + other.scale(-1)

    def scale(self, s: int) -> "FormalSum":
        return FormalSum((o, c * s) for o, c in self)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficients(self) -> dict:
        return {k: c for k, (_, c) in self.terms.items()}

    def coeff(self, obj) -> int:
        t = self.terms.get(obj.key())
        return 0 if t is None else t[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalSum) and self.coefficients() == other.coefficients()

    def truncate(self, max_weight: int) -> "FormalSum":
        return FormalSum((o, c) for o, c in self if o.weight <= max_weight)

    def map(self, fn: Callable) -> "FormalSum":
        """Apply a linear map given on basis elements as FormalSum or object."""
        out = FormalSum()
        for o, c in self:
            img = fn(o)
            if img is None:
                continue
            if isinstance(img, FormalSum):
                for o2, c2 in img:
                    out.add(o2, c * c2)
            else:
                out.add(img, c)
        return out

    def __repr__(self) -> str:
        return f"FormalSum({len(self.terms)} terms)"


# ----------------------------------------------------------------------
# arc removal and the differential
# ----------------------------------------------------------------------

def remove_arc_core(core: _Core, edge: tuple) -> _Core:
    """Delete one arc and merge the regions on its two sides."""
    x, y = edge
    keep = [p for p in range(len(core.iota)) if p not in (x, y)]
    new_of = {p: i for i, p in enumerate(keep)}
    sizes = list(core.sizes)
    sizes[core.label[x]] -= 1
    sizes[core.label[y]] -= 1
    iota = [new_of[core.iota[p]] for p in keep]
    marks = None
    if core.marks is not None:
        marks = [core.marks[p] for p in keep]
    reg = core.region_of_key()
    kx, ky = core.cycle_key_of(x), core.cycle_key_of(y)
    affected = sorted({reg[kx], reg[ky]})
    probe = _Core(sizes, iota, [], 0)
    old_sets = {}
    for cyc in core.orbits:
        if x in cyc or y in cyc:
            continue
        old_sets[frozenset(new_of[p] for p in cyc)] = min(cyc)
    mapped = {}
    for cyc in probe.orbits:
        s = frozenset(cyc)
        mapped[min(cyc)] = s in old_sets
    regions = []
    for i, (g, ks) in enumerate(core.regions):
        if i in affected:
            continue
        regions.append((g, [k if k < 0 else new_of[k] for k in ks]))
    chi = sum(2 - 2 * core.regions[i][0] - len(core.regions[i][1]) for i in affected) - 1
    merged = []
    for i in affected:
        for k in core.regions[i][1]:
            if k in (kx, ky):
                continue
            merged.append(k if k < 0 else new_of[k])
    merged += [k for k, old in mapped.items() if not old]
    for lab in (core.label[x], core.label[y]):
        if sizes[lab] == 0 and (-1 - lab) not in merged:
            merged.append(-1 - lab)
    twice_g = 2 - len(merged) - chi
    if twice_g < 0 or twice_g % 2:
        raise AssertionError("arc removal broke the Euler identity")
    regions.append((twice_g // 2, merged))
    return _Core(sizes, iota, regions, core.genus, marks, core.io)


def remove_arc(g: ArcGraph, edge: tuple) -> ArcGraph:
    """Remove the arc through the given flag pair (flag names)."""
    pos = g.position
    return remove_arc_core(g.core, (pos[edge[0]], pos[edge[1]])).build()


def differential(g: ArcGraph, family: str = "all") -> FormalSum:
    """Signed sum over arcs of the graph with that arc removed.

    The summand for the edge in place j of the linear edge order has sign
    (-1)**j: the Koszul sign of moving that edge's degree one line to
    the front.  Summands outside `family` or with no arcs are dropped;
    angle markings are dropped, in/out markings kept.
    """
    core = g.core
    if core.marks is not None:
        core = _Core(core.sizes, core.iota, core.regions, core.genus, None, core.io)
    out = FormalSum()
    for j, e in enumerate(core.edges()):
        if len(core.iota) == 2:
            continue
        h = remove_arc_core(core, e).build()
        if not in_family(h, family):
            continue
        out.add(h, -1 if j % 2 else 1)
    return out


def differential_sum(x: FormalSum, family: str = "all") -> FormalSum:
    return x.map(lambda g: differential(g, family))


# ----------------------------------------------------------------------
# enumeration
# ----------------------------------------------------------------------

def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _matchings(items: list) -> Iterator[list]:
    if not items:
        yield []
        return
    a = items[0]
    for i in range(1, len(items)):
        b = items[i]
        rest = items[1:i] + items[i + 1:]
        for m in _matchings(rest):
            yield [(a, b)] + m


def _set_partitions(items: list, blocks: int) -> Iterator[list]:
    """Partitions of `items` into exactly `blocks` non-empty blocks."""
    n = len(items)
    if blocks > n or blocks < 1 and n:
        return
    if n == 0:
        if blocks == 0:
            yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, blocks - 1):
        yield [[first]] + part
    for part in _set_partitions(rest, blocks):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def default_io(n_boundaries: int) -> tuple:
    """Boundary 0 is the output, every other boundary an input."""
    return ("out",) + ("in",) * (n_boundaries - 1)


def enumerate_graphs(genus: int, n: int, max_edges: int, family: str = "all",
                     io: Optional[Sequence[str]] = None,
                     cap: int = 200000, min_edges: int = 1) -> list:
    """All arc graphs of a family on the surface of genus `genus` with n+1 boundaries.

    The list is complete and duplicate free up to label preserving
    isomorphism, sorted by :func:`graph_key`.  `cap` bounds the number of
    candidate configurations examined; exceeding it raises.
    """
    if genus < 0 or n < 0 or max_edges < 1:
        raise ValueError("need genus >= 0, n >= 0, max_edges >= 1")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    r = n + 1
    if family in ("in_out", "bar_in_out", "l_arc") and io is None:
        io = default_io(r)
    io = None if io is None else tuple(io)
    chi_surface = 2 - 2 * genus - r
    found = {}
    budget = [cap]

    def spend():
        budget[0] -= 1
        if budget[0] < 0:
            raise CapExceededError(f"enumeration exceeded cap={cap}")

    for E in range(min_edges, max_edges + 1):
        for sizes in _compositions(2 * E, r):
            if family in ("exhaustive",) and min(sizes) == 0:
                continue
            if family in ("bar_in_out", "l_arc") and any(
                    s == 0 for lab, s in enumerate(sizes) if io[lab] == "in"):
                continue
            label = [lab for lab, s in enumerate(sizes) for _ in range(s)]
            for m in _matchings(list(range(2 * E))):
                spend()
                if io is not None and family in ("in_out", "bar_in_out", "l_arc"):
                    if any(io[label[a]] == io[label[b]] for a, b in m):
                        continue
                iota = [0] * (2 * E)
                for a, b in m:
                    iota[a], iota[b] = b, a
                probe = _Core(sizes, iota, [], genus)
                # cheap rejection: one-gon orbits whose arc sits inside a disk
                keys = probe.cycle_keys()
                c = len(keys)
                # sum over regions of chi = chi_surface + E
                target = chi_surface + E
                if family == "quasi_filling":
                    if c != target:
                        continue
                    blockings = [([[k] for k in keys], [0] * c)]
                    candidates = ((b, gs) for b, gs in blockings)
                else:
                    candidates = _region_assignments(keys, target, genus)
                for blocks, gs in candidates:
                    spend()
                    core = _Core(sizes, iota, list(zip(gs, blocks)), genus, None, io)
                    if boundary_parallel_arcs(core) or parallel_pairs(core):
                        continue
                    if not _connected(core):
                        continue
                    g = core.build()
                    if family != "all" and not in_family(g, family):
                        continue
                    found[core.key()] = g
    return [found[k] for k in sorted(found)]


def _region_assignments(keys: list, target: int, genus: int):
    c = len(keys)
    # sum_R (2 - 2 g_R - b_R) = target  ->  2 #R - 2 sum g_R = target + c
    for nreg in range(1, c + 1):
        twice = 2 * nreg - target - c
        if twice < 0 or twice % 2:
            continue
        gsum = twice // 2
        if gsum > genus:
            continue
        for blocks in _set_partitions(keys, nreg):
            for gs in _compositions(gsum, nreg):
                yield blocks, list(gs)


# ----------------------------------------------------------------------
# marked ribbon graphs
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class MarkedRibbonGraph:
    """Ribbon graph with one marked flag per cycle.

    `vertices` lists each vertex's flags in cyclic order, `edges` the flag
    pairs, `marks[i]` the marked flag of cycle i.  Cycles are the orbits of
    f -> successor at its vertex of the flag opposite f.  `angle_marks`
    names an angle by the flag it follows at its vertex.
    """
    vertices: tuple
    edges: tuple
    marks: tuple
    angle_marks: Optional[tuple] = None
    role: str = "marked"

    @cached_property
    def iota(self) -> dict:
        out = {}
        for a, b in self.edges:
            out[a] = b
            out[b] = a
        return out

    @cached_property
    def vertex_of(self) -> dict:
        return {f: v for v, fl in enumerate(self.vertices) for f in fl}

    def sigma(self, f: str) -> str:
        fl = self.vertices[self.vertex_of[f]]
        return fl[(fl.index(f) + 1) % len(fl)]

    def sigma_inv(self, f: str) -> str:
        fl = self.vertices[self.vertex_of[f]]
        return fl[(fl.index(f) - 1) % len(fl)]

    def cycle_step(self, f: str) -> str:
        return self.sigma(self.iota[f])

    def cycle(self, i: int) -> tuple:
        start = self.marks[i]
        out = [start]
        f = self.cycle_step(start)
        while f != start:
            out.append(f)
            f = self.cycle_step(f)
        return tuple(out)

    def cycles(self) -> list:
        return [self.cycle(i) for i in range(len(self.marks))]

    @property
    def genus(self) -> int:
        twice = 2 - len(self.vertices) + len(self.edges) - len(self.marks)
        return twice // 2

    def check(self) -> None:
        flags = [f for fl in self.vertices for f in fl]
        if len(set(flags)) != len(flags):
            raise StructuralError("repeated flag in ribbon graph")
        if set(self.iota) != set(flags) or len(self.iota) != len(flags):
            raise StructuralError("edges must pair all flags")
        covered = []
        for i in range(len(self.marks)):
            covered.extend(self.cycle(i))
        if sorted(covered) != sorted(flags):
            raise StructuralError("marks must pick exactly one flag per cycle")
        twice = 2 - len(self.vertices) + len(self.edges) - len(self.marks)
        if twice < 0 or twice % 2:
            raise StructuralError("inconsistent genus")
        if self.role == "marked":
            marked_vertices = {self.vertex_of[m] for m in self.marks}
            for v, fl in enumerate(self.vertices):
                if len(fl) == 2 and v not in marked_vertices:
                    raise StructuralError("unmarked valence two vertex in marked role")

    def partitioning_vertices(self) -> list:
        marked = {self.vertex_of[m] for m in self.marks}
        return [v for v, fl in enumerate(self.vertices) if len(fl) == 2 and v not in marked]

    def flag_order(self) -> list:
        return [f for i in range(len(self.marks)) for f in self.cycle(i)]

    def key(self) -> tuple:
        order = self.flag_order()
        pos = {f: p for p, f in enumerate(order)}
        lengths = tuple(len(self.cycle(i)) for i in range(len(self.marks)))
        iota = tuple(pos[self.iota[f]] for f in order)
        am = ()
        if self.angle_marks is not None:
            m = dict(self.angle_marks)
            am = tuple(m[f] for f in order)
        return (lengths, iota, am, self.role)

    @property
    def weight(self) -> int:
        return len(self.edges)


def dual_ribbon(g: ArcGraph, role: Optional[str] = None) -> MarkedRibbonGraph:
    """Ribbon graph with a vertex per region and an edge per arc."""
    if not is_quasi_filling(g):
        raise DomainError("dual graph only exists for quasi-filling graphs")
    verts = []
    for r in g.regions:
        (cyc,) = r.cycles
        verts.append(tuple(ref for kind, ref in cyc if kind == ARC))
    marks = tuple(b[0] for b in g.boundaries)
    am = None
    if g.angle_marks is not None:
        m = g.marks
        am = tuple((f, m[g.iota[f]]) for f in g.flag_order)
    if role is None:
        role = "marked" if not parallel_pairs(g.core) else "partitioned"
    return MarkedRibbonGraph(tuple(verts), tuple(g.arcs), marks, am, role)


def arc_from_dual(gamma: MarkedRibbonGraph) -> ArcGraph:
    """Inverse of :func:`dual_ribbon`: boundaries are the marked cycles."""
    bnds = tuple(gamma.cycle(i) for i in range(len(gamma.marks)))
    regions = []
    for fl in gamma.vertices:
        cyc = []
        for f in fl:
            cyc.append((ARC, f))
            cyc.append((ANGLE, gamma.iota[f]))
        regions.append(Region(0, (tuple(cyc),)))
    chi = len(gamma.vertices) - len(gamma.edges)
    twice_g = 2 - len(bnds) - chi
    am = None
    if gamma.angle_marks is not None:
        m = dict(gamma.angle_marks)
        am = tuple((q, m[gamma.iota[q]]) for fl in bnds for q in fl)
    return ArcGraph(bnds, tuple(gamma.edges), tuple(regions), twice_g // 2, am)


def _fresh(taken: set, base: str) -> str:
    k = 0
    while f"{base}~{k}" in taken:
        k += 1
    name = f"{base}~{k}"
    taken.add(name)
    return name


def insert_vertex(gamma: MarkedRibbonGraph, edge: tuple,
                  names: Optional[tuple] = None) -> tuple:
    """Subdivide `edge` = (f1, f2) by a new valence two vertex.

    Returns (new graph, index of the new vertex).  Cycles keep their marks
    and gain the two new flags.
    """
    f1, f2 = edge
    if gamma.iota.get(f1) != f2:
        raise DomainError(f"{edge!r} is not an edge")
    taken = set(gamma.iota)
    if names is None:
        n1, n2 = _fresh(taken, f1), _fresh(taken, f2)
    else:
        n1, n2 = names
    edges = [e for e in gamma.edges if set(e) != {f1, f2}]
    edges += [(f1, n1), (f2, n2)]
    verts = gamma.vertices + ((n1, n2),)
    am = gamma.angle_marks
    if am is not None:
        am = am + ((n1, 0), (n2, 0))
    role = "partitioned"
    return MarkedRibbonGraph(verts, tuple(edges), gamma.marks, am, role), len(verts) - 1


def remove_vertex(gamma: MarkedRibbonGraph, v: int,
                  role: Optional[str] = None) -> MarkedRibbonGraph:
    """Dissolve a valence two vertex, joining its two edges.

    A mark sitting on a removed flag moves to that flag's predecessor on
    its cycle.
    """
    fl = gamma.vertices[v]
    if len(fl) != 2:
        raise DomainError("only valence two vertices can be removed")
    n1, n2 = fl
    f1, f2 = gamma.iota[n1], gamma.iota[n2]
    if f1 == n2:
        raise DomainError("vertex carries a loop; removing it leaves no edge")
    pred = {n1: f2, n2: f1}
    marks = tuple(pred.get(m, m) for m in gamma.marks)
    edges = [e for e in gamma.edges if n1 not in e and n2 not in e]
    edges.append((f1, f2))
    verts = gamma.vertices[:v] + gamma.vertices[v + 1:]
    am = gamma.angle_marks
    if am is not None:
        am = tuple((f, m) for f, m in am if f not in (n1, n2))
    if role is None:
        role = gamma.role
    return MarkedRibbonGraph(verts, tuple(edges), marks, am, role)


def canonical_ribbon(gamma: MarkedRibbonGraph) -> MarkedRibbonGraph:
    """Rename flags positionally: ``"<cycle>.<index from mark>"``."""
    order = gamma.flag_order()
    names = {}
    for i in range(len(gamma.marks)):
        for k, f in enumerate(gamma.cycle(i)):
            names[f] = f"{i}.{k}"
    verts = []
    seen = set()
    for f in order:
        v = gamma.vertex_of[f]
        if v in seen:
            continue
        seen.add(v)
        fl = gamma.vertices[v]
        j = fl.index(f)
        verts.append(tuple(names[x] for x in fl[j:] + fl[:j]))
    pos = {f: p for p, f in enumerate(order)}
    edges = sorted(tuple(sorted(e, key=pos.__getitem__)) for e in gamma.edges)
    edges.sort(key=lambda e: pos[e[0]])
    edges = tuple((names[a], names[b]) for a, b in edges)
    am = None
    if gamma.angle_marks is not None:
        m = dict(gamma.angle_marks)
        am = tuple((names[f], m[f]) for f in order)
    marks = tuple(names[m] for m in gamma.marks)
    return MarkedRibbonGraph(tuple(verts), edges, marks, am, gamma.role)
