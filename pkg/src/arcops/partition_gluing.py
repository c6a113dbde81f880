"""Partitioning operators and gluings of partitioned arc graphs.

A partitioned arc graph is stored as its expanded graph: an ArcGraph in
which each edge of the underlying graph appears as a block of parallel
copies.  Everything else (underlying graph, multiplicities, partitioning
angles, degree) is derived from the expanded graph, so the expanded
graph's key is the isomorphism invariant.

Signs of the partitioning operator are Koszul signs of degree one lines:

* ``"cyclic"``: lines indexed by all edges but the last one;
* ``"prop"``: lines indexed by the inner angles at the In boundaries.

Gluing matches the flags at the two boundaries with the first read last
to first.  Closed loops make a gluing zero; ``mode="topological"`` also
kills gluings of two twisted boundaries.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterator, Optional, Sequence

from .graph_core import (ArcGraph, DomainError, FormalSum, MarkedRibbonGraph,
                         MarkingMissingError, _Core, _connected,
                         boundary_parallel_arcs, canonical_ribbon, dual_ribbon,
                         insert_vertex, parallel_pairs, remove_arc_core,
                         twisted_boundaries)
from .signs import koszul_sign

MODES = ("algebraic", "topological")


# ----------------------------------------------------------------------
# ordered partitions
# ----------------------------------------------------------------------

def ordered_partitions(n: int, k: int) -> Iterator[tuple]:
    """All (n_1..n_k) with n_i >= 1 summing to n; there are C(n-1, k-1)."""
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in ordered_partitions(n - first, k - 1):
            yield (first,) + rest


def count_ordered_partitions(n: int, k: int) -> int:
    return comb(n - 1, k - 1) if n >= k >= 1 else int(n == k == 0)


# ----------------------------------------------------------------------
# partitioned graphs
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionedArcGraph:
    graph: ArcGraph

    def key(self) -> tuple:
        return self.graph.key()

    @property
    def core(self) -> _Core:
        return self.graph.core

    @property
    def weight(self) -> int:
        return self.graph.n_arcs

    @cached_property
    def edge_classes(self) -> list:
        """Parallel classes of expanded edges, ordered like underlying edges."""
        core = self.core
        edges = core.edges()
        idx = {}
        for i, (p, q) in enumerate(edges):
            idx[p] = idx[q] = i
        parent = list(range(len(edges)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in parallel_pairs(core):
            parent[find(idx[a])] = find(idx[b])
        groups = {}
        for i, e in enumerate(edges):
            groups.setdefault(find(i), []).append(e)
        return sorted(groups.values(), key=lambda g: g[0][0])

    @property
    def mult(self) -> tuple:
        return tuple(len(c) for c in self.edge_classes)

    @property
    def degree(self) -> int:
        return len(self.edge_classes) - 1

    @cached_property
    def underlying_core(self) -> _Core:
        core = self.core
        core = _Core(core.sizes, core.iota, core.regions, core.genus, None, core.io)
        while True:
            pairs = parallel_pairs(core)
            if not pairs:
                return core
            a, _ = pairs[0]
            core = remove_arc_core(core, tuple(sorted((a, core.iota[a]))))

    def underlying(self) -> ArcGraph:
        return self.underlying_core.build()

    @cached_property
    def partitioning_angles(self) -> frozenset:
        """Angles (named by the flag they follow) inside parallel rectangles."""
        core = self.core
        out = set()
        for a, b in parallel_pairs(core):
            out.add(core.iota[a])
            out.add(core.iota[b])
        return frozenset(out)

    def non_partitioning_count(self) -> int:
        return len(self.core.iota) - len(self.partitioning_angles)

    def twisted_at(self) -> frozenset:
        return twisted_boundaries(self.underlying_core)

    def angle_twisted_at(self) -> frozenset:
        """Twisted in the angle marked sense: also both outer edges doubled."""
        core = self.core
        classes = self.edge_classes
        size_of = {}
        for cls in classes:
            for p, q in cls:
                size_of[p] = size_of[q] = len(cls)
        out = set()
        for lab in self.twisted_at():
            first = core.offsets[lab]
            last = first + core.sizes[lab] - 1
            if size_of[first] >= 2 and size_of[last] >= 2:
                out.add(lab)
        return frozenset(out)

    def is_quasi_filling(self) -> bool:
        return all(g == 0 and len(ks) == 1 for g, ks in self.core.regions)


def as_partitioned(g: ArcGraph) -> PartitionedArcGraph:
    return PartitionedArcGraph(g.core.build())


def underlying(gamma: PartitionedArcGraph) -> ArcGraph:
    return gamma.underlying()


# ----------------------------------------------------------------------
# expansion: inserting parallel copies
# ----------------------------------------------------------------------

def _expand_core(core: _Core, mult: Sequence[int], new_mark: int = 1,
                 only: Optional[dict] = None):
    """Replace edge i (in edge order) by mult[i] parallel copies.

    Copies sit in order at the earlier flag and in reverse order at the
    later flag.  Returns (core, origin) where origin maps each old flag
    position to the position of its surviving original copy, and
    ``blocks`` maps old positions to the list of new positions.
    """
    edges = core.edges()
    if only is not None:
        mult = [only.get(e, 1) for e in edges]
    tags_of = {}
    for (a, b), n in zip(edges, mult):
        if n < 1:
            raise ValueError("multiplicities must be positive")
        tags_of[a] = [(a, j, 0) for j in range(n)]
        tags_of[b] = [(a, j, 1) for j in reversed(range(n))]
    order = []
    sizes = []
    for lab, s in enumerate(core.sizes):
        lo = core.offsets[lab]
        cnt = 0
        for p in range(lo, lo + s):
            order.extend(tags_of[p])
            cnt += len(tags_of[p])
        sizes.append(cnt)
    pos = {t: i for i, t in enumerate(order)}
    iota = [pos[(a, j, 1 - s)] for a, j, s in order]
    blocks = {p: [pos[t] for t in tags] for p, tags in tags_of.items()}
    origin = {}
    for (a, b), n in zip(edges, mult):
        origin[a] = pos[(a, 0, 0)]
        origin[b] = pos[(a, n - 1, 1)]
    marks = None
    if core.marks is not None:
        marks = [new_mark] * len(order)
        for p, blk in blocks.items():
            marks[blk[-1]] = core.marks[p]
    probe = _Core(sizes, iota, [], core.genus)
    regions = []
    used = set()
    for g, ks in core.regions:
        keys = []
        for k in ks:
            if k < 0:
                keys.append(k)
            else:
                nk = probe.cycle_key_of(origin[k])
                keys.append(nk)
                used.add(nk)
        regions.append((g, keys))
    for cyc in probe.orbits:
        k = min(cyc)
        if k not in used:
            regions.append((0, [k]))
    return _Core(sizes, iota, regions, core.genus, marks, core.io), origin, blocks


def expansion_sign(core: _Core, new: _Core, origin: dict, blocks: dict,
                   setting: str) -> int:
    """Koszul sign of the shuffle placing the new lines among the old ones."""
    if setting == "cyclic":
        old_edges = core.edges()
        target = [e[0] for e in new.edges()][:-1]
        originals = [origin[a] for a, _ in old_edges[:-1]]
        rest = [t for t in target if t not in set(originals)]
        return koszul_sign(originals + rest, target)
    if setting == "prop":
        if core.io is None:
            raise MarkingMissingError("the prop sign convention needs io marks")

        def inner_in(c: _Core):
            return [p for p in range(len(c.iota))
                    if c.io[c.label[p]] == "in" and not c.is_last(p)]

        originals = [blocks[p][-1] for p in inner_in(core)]
        target = inner_in(new)
        rest = [t for t in target if t not in set(originals)]
        return koszul_sign(originals + rest, target)
    raise ValueError(f"unknown sign setting {setting!r}")


def _default_setting(g: ArcGraph) -> str:
    return "prop" if g.io is not None else "cyclic"


def partition_term(alpha: ArcGraph, p: Sequence[int], angle: bool = False,
                   setting: Optional[str] = None) -> tuple:
    """The summand (sign, alpha^p) of the partitioning operator."""
    setting = setting or _default_setting(alpha)
    core = alpha.core
    if angle:
        core = _with_marks(alpha).core
    else:
        core = _Core(core.sizes, core.iota, core.regions, core.genus, None, core.io)
    if len(p) != len(core.edges()):
        raise ValueError("one multiplicity per edge is required")
    new, origin, blocks = _expand_core(core, p, new_mark=1)
    sign = expansion_sign(core, new, origin, blocks, setting)
    return sign, PartitionedArcGraph(new.build())


def standard_marking(g: ArcGraph) -> tuple:
    """Constant 1, or for in/out graphs: 1 on In and outside angles, 0 else."""
    out = []
    for lab, flags in enumerate(g.boundaries):
        for k, f in enumerate(flags):
            if g.io is None or g.io[lab] == "in" or k == len(flags) - 1:
                out.append((f, 1))
            else:
                out.append((f, 0))
    return tuple(out)


def _with_marks(g: ArcGraph) -> ArcGraph:
    if g.angle_marks is not None:
        return g
    from dataclasses import replace
    return replace(g, angle_marks=standard_marking(g))


def expand(alpha: ArcGraph, max_weight: int, angle: bool = False,
           setting: Optional[str] = None, min_weight: int = 0) -> FormalSum:
    """Partitioning operator truncated at total weight `max_weight`."""
    k = alpha.n_arcs
    out = FormalSum()
    for n in range(max(k, min_weight), max_weight + 1):
        for p in ordered_partitions(n, k):
            s, term = partition_term(alpha, p, angle, setting)
            out.add(term, s)
    return out


def expand_angle(alpha: ArcGraph, max_weight: int,
                 setting: Optional[str] = None) -> FormalSum:
    """Angle marked partitioning; synthesises the standard marking if needed."""
    return expand(alpha, max_weight, angle=True, setting=setting)


def expand_ribbon(gamma: MarkedRibbonGraph, max_weight: int) -> FormalSum:
    """Partitioning of a marked ribbon graph by inserting valence two vertices."""
    order = gamma.flag_order()
    pos = {f: i for i, f in enumerate(order)}
    edges = sorted((tuple(sorted(e, key=pos.__getitem__)) for e in gamma.edges),
                   key=lambda e: pos[e[0]])
    k = len(edges)
    out = FormalSum()
    for n in range(k, max_weight + 1):
        for p in ordered_partitions(n, k):
            g = gamma
            firsts = []
            for (f1, f2), m in zip(edges, p):
                cur = (f1, f2)
                for _ in range(m - 1):
                    g, v = insert_vertex(g, cur)
                    n1, n2 = g.vertices[v]
                    cur = (n2, f2)
                firsts.append(f1)
            g = MarkedRibbonGraph(g.vertices, g.edges, g.marks, g.angle_marks,
                                  "partitioned" if n > k or gamma.role == "partitioned"
                                  else gamma.role)
            out.add(canonical_ribbon(g), _ribbon_sign(gamma, g, edges))
    return out


def _ribbon_sign(gamma: MarkedRibbonGraph, g: MarkedRibbonGraph, old_edges) -> int:
    order = g.flag_order()
    pos = {f: i for i, f in enumerate(order)}
    new_edges = sorted((tuple(sorted(e, key=pos.__getitem__)) for e in g.edges),
                       key=lambda e: pos[e[0]])
    target = [pos[e[0]] for e in new_edges][:-1]
    originals = []
    for f1, _ in old_edges[:-1]:
        # the original edge survives as the sub-edge at its first flag
        e = next(e for e in new_edges if f1 in e)
        originals.append(pos[e[0]])
    rest = [t for t in target if t not in set(originals)]
    return koszul_sign(originals + rest, target)


def dual_of_sum(x: FormalSum) -> FormalSum:
    return x.map(lambda t: canonical_ribbon(dual_ribbon(t.graph, role="partitioned"
                                                        if t.weight > t.degree + 1
                                                        else None)))


# ----------------------------------------------------------------------
# gluing
def orientation_sign(gamma: PartitionedArcGraph, setting: Optional[str] = None) -> int:
    """Sign of gamma as a summand of the partitioning of its underlying graph.

    A partitioned graph written in its edge order differs from the
    orientation induced by its underlying graph by this sign.
    """
    core = gamma.core
    setting = setting or ("prop" if core.io is not None else "cyclic")
    base = gamma.underlying_core
    new, origin, blocks = _expand_core(base, gamma.mult)
    if new.sizes != core.sizes or new.iota != core.iota:
        raise AssertionError("partitioned graph is not an expansion of its underlying graph")
    return expansion_sign(base, new, origin, blocks, setting)


def glue_sign(gamma: PartitionedArcGraph, delta: PartitionedArcGraph,
              result: PartitionedArcGraph, setting: Optional[str] = None) -> int:
    """Sign attached to a gluing: inputs and output are compared in the
    orientation induced from their underlying graphs."""
    return (orientation_sign(gamma, setting) * orientation_sign(delta, setting)
            * orientation_sign(result, setting))


# ----------------------------------------------------------------------

class GlueResult:
    """Outcome of one gluing: a core or zero, with the closed loop count."""

    __slots__ = ("core", "loops", "reason", "chains", "keep")

    def __init__(self, core, loops=0, reason="", chains=None, keep=None):
        self.core = core
        self.loops = loops
        self.reason = reason
        self.chains = chains
        self.keep = keep

    @property
    def is_zero(self) -> bool:
        return self.core is None


def disjoint_union(a: _Core, b: _Core) -> _Core:
    shift = len(a.iota)
    nb = len(a.sizes)
    iota = list(a.iota) + [q + shift for q in b.iota]
    regions = [(g, list(ks)) for g, ks in a.regions]
    for g, ks in b.regions:
        regions.append((g, [k - nb if k < 0 else k + shift for k in ks]))
    marks = None
    if a.marks is not None and b.marks is not None:
        marks = list(a.marks) + list(b.marks)
    io = None
    if a.io is not None and b.io is not None:
        io = list(a.io) + list(b.io)
    return _Core(list(a.sizes) + list(b.sizes), iota, regions,
                 a.genus + b.genus, marks, io)


def seam_glue(core: _Core, i: int, j: int, label_order: Optional[Sequence[int]] = None,
              allow_loops: bool = False, marks_fill: Optional[dict] = None) -> GlueResult:
    """Identify boundaries i and j of one (possibly disconnected) core.

    Flags at i, read last to first, meet the flags at j read first to
    last.  The remaining boundaries are renumbered in `label_order`
    (default: increasing old label).  Closed loops give zero unless
    `allow_loops`, in which case they are deleted and counted.
    """
    if i == j:
        raise ValueError("cannot glue a boundary to itself")
    U = list(range(core.offsets[i], core.offsets[i] + core.sizes[i]))
    W = list(range(core.offsets[j], core.offsets[j] + core.sizes[j]))
    K = len(U)
    if K != len(W):
        return GlueResult(None, 0, "unmatched")
    partner = {}
    for t in range(K):
        partner[U[K - 1 - t]] = W[t]
        partner[W[t]] = U[K - 1 - t]
    seam = set(partner)
    # follow strands through the seam
    visited = set()
    new_pairs = []
    pieces = []
    for x in range(len(core.iota)):
        if x in seam or x in visited:
            continue
        visited.add(x)
        y = core.iota[x]
        chain = [min(x, y)]
        while y in seam:
            visited.add(y)
            z = partner[y]
            visited.add(z)
            y = core.iota[z]
            chain.append(min(z, y))
        visited.add(y)
        new_pairs.append((x, y))
        pieces.append(chain)
    loops = 0
    left = seam - visited
    while left:
        start = min(left)
        y = start
        while True:
            left.discard(y)
            z = partner[y]
            left.discard(z)
            y = core.iota[z]
            if y == start:
                break
        loops += 1
    if loops and not allow_loops:
        return GlueResult(None, loops, "closed loop")
    # region bookkeeping through the seam angle pairs
    reg = core.region_of_key()
    nreg = len(core.regions)
    parent = list(range(nreg))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def region_of_angle(q):
        return reg[core.cycle_key_of(core.iota[q])]

    chi = [2 - 2 * g - len(ks) for g, ks in core.regions]
    pair_count = [0] * nreg
    if K:
        for t in range(K - 1):
            ra, rb = region_of_angle(U[t]), region_of_angle(W[K - 2 - t])
            parent[find(ra)] = find(rb)
        parent[find(region_of_angle(U[K - 1]))] = find(region_of_angle(W[K - 1]))
        for t in range(K - 1):
            pair_count[region_of_angle(U[t])] += 1
        pair_count[region_of_angle(U[K - 1])] += 1
    else:
        ra, rb = reg[-1 - i], reg[-1 - j]
        parent[find(ra)] = find(rb)
    # new boundaries
    labels = [lab for lab in range(len(core.sizes)) if lab not in (i, j)]
    if label_order is None:
        label_order = labels
    if sorted(label_order) != labels:
        raise ValueError("label_order must list the surviving labels")
    new_label = {old: new for new, old in enumerate(label_order)}
    keep = []
    for old in label_order:
        lo = core.offsets[old]
        keep.extend(range(lo, lo + core.sizes[old]))
    new_pos = {p: k for k, p in enumerate(keep)}
    iota = [0] * len(keep)
    for x, y in new_pairs:
        iota[new_pos[x]] = new_pos[y]
        iota[new_pos[y]] = new_pos[x]
    sizes = [core.sizes[old] for old in label_order]
    marks = None
    if core.marks is not None:
        marks = [core.marks[p] for p in keep]
        if marks_fill:
            for p, m in marks_fill.items():
                if p in new_pos:
                    marks[new_pos[p]] = m
    io = None if core.io is None else [core.io[old] for old in label_order]
    probe = _Core(sizes, iota, [], 0)
    cls_cycles = {}
    for cyc in probe.orbits:
        old_flag = keep[cyc[0]]
        root = find(reg[core.cycle_key_of(old_flag)])
        cls_cycles.setdefault(root, []).append(min(cyc))
    for r, (g, ks) in enumerate(core.regions):
        for k in ks:
            if k < 0 and (-1 - k) not in (i, j):
                cls_cycles.setdefault(find(r), []).append(-1 - new_label[-1 - k])
    cls_chi = {}
    for r in range(nreg):
        root = find(r)
        cls_chi[root] = cls_chi.get(root, 0) + chi[r] - pair_count[r]
    regions = []
    for root, c in cls_chi.items():
        ks = cls_cycles.get(root, [])
        twice = 2 - len(ks) - c
        if twice < 0 or twice % 2:
            raise AssertionError("gluing broke the Euler identity")
        regions.append((twice // 2, ks))
    chi_total = sum(2 - 2 * g - len(ks) for g, ks in regions) - len(iota) // 2
    twice_genus = 2 - len(sizes) - chi_total
    out = _Core(sizes, iota, regions, twice_genus // 2 if twice_genus >= 0 else 0, marks, io)
    chains = {min(new_pos[x], new_pos[y]): chain for (x, y), chain in zip(new_pairs, pieces)}
    return GlueResult(out, loops, chains=chains, keep=keep)


def _glue_labels(n_a: int, i: int, n_b: int, j: int) -> list:
    """Operadic splice: delta's other labels fill slot i, gamma's later ones shift."""
    a = list(range(n_a))
    b = [n_a + lab for lab in range(n_b) if lab != j]
    return a[:i] + b + a[i + 1:]


def _finish(res: GlueResult) -> Optional[PartitionedArcGraph]:
    if res.is_zero:
        return None
    core = res.core
    if not core.iota:
        return None
    if boundary_parallel_arcs(core):
        return None
    if not _connected(core):
        raise DomainError("gluing produced a disconnected surface")
    return PartitionedArcGraph(core.build())


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")


def glue(gamma: PartitionedArcGraph, i: int, delta: PartitionedArcGraph, j: int = 0,
         mode: str = "algebraic") -> Optional[PartitionedArcGraph]:
    """gamma o_i delta on expanded graphs; None stands for zero."""
    _check_mode(mode)
    a, b = gamma.core, delta.core
    if not (0 <= i < len(a.sizes)) or not (0 <= j < len(b.sizes)):
        raise IndexError("boundary index out of range")
    if mode == "topological" and i in gamma.twisted_at() and j in delta.twisted_at():
        return None
    u = disjoint_union(a, b)
    order = _glue_labels(len(a.sizes), i, len(b.sizes), j)
    return _finish(seam_glue(u, i, len(a.sizes) + j, order))


def merges_classes(gamma: PartitionedArcGraph, i: int, delta: PartitionedArcGraph,
                   j: int = 0) -> bool:
    """True when the gluing makes strands of different parallel classes parallel.

    Such summands lie strictly below the top filtration degree.
    """
    a, b = gamma.core, delta.core
    u = disjoint_union(a, b)
    order = _glue_labels(len(a.sizes), i, len(b.sizes), j)
    res = seam_glue(u, i, len(a.sizes) + j, order)
    r = _finish(res)
    if r is None:
        return False
    shift = len(a.iota)
    cls = {}
    for n, c in enumerate(gamma.edge_classes):
        for e in c:
            cls[e[0]] = ("a", n)
    for n, c in enumerate(delta.edge_classes):
        for e in c:
            cls[e[0] + shift] = ("b", n)
    signatures = {tuple(cls[p] for p in chain) for chain in res.chains.values()}
    return len(r.edge_classes) < len(signatures)


def glue_loops(gamma: PartitionedArcGraph, i: int, delta: PartitionedArcGraph,
               j: int = 0) -> tuple:
    """Algebraic gluing with closed loops deleted; returns (graph or None, loops)."""
    a, b = gamma.core, delta.core
    u = disjoint_union(a, b)
    order = _glue_labels(len(a.sizes), i, len(b.sizes), j)
    res = seam_glue(u, i, len(a.sizes) + j, order, allow_loops=True)
    if res.is_zero:
        return None, res.loops
    if not res.core.iota or boundary_parallel_arcs(res.core):
        return None, res.loops
    return PartitionedArcGraph(res.core.build()), res.loops


def self_glue(gamma: PartitionedArcGraph, i: int, j: int,
              mode: str = "algebraic") -> Optional[PartitionedArcGraph]:
    _check_mode(mode)
    n = len(gamma.core.sizes)
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise IndexError("need two distinct boundary labels")
    if mode == "topological":
        tw = gamma.twisted_at()
        if i in tw and j in tw:
            return None
    return _finish(seam_glue(gamma.core, i, j))


# ----------------------------------------------------------------------
# angle marked gluing
# ----------------------------------------------------------------------

def angle_blocks(core: _Core, lab: int) -> list:
    """Runs of flags at a boundary separated by inner angles marked 1."""
    if core.marks is None:
        raise MarkingMissingError("angle gluing needs angle marks")
    lo, s = core.offsets[lab], core.sizes[lab]
    blocks = []
    cur = []
    for p in range(lo, lo + s):
        cur.append(p)
        if p == lo + s - 1 or core.marks[p] == 1:
            blocks.append(cur)
            cur = []
    return blocks


def _fan_out(core: _Core, i: int, j: int) -> Optional[tuple]:
    """Duplicate lone flags so facing blocks have equal size.

    Returns (core, marks to force to 0 after gluing) or None when the
    boundaries are not perfectly angle matched.
    """
    out = _fan_out_traced(core, i, j)
    return None if out is None else out[:2]


def _fan_out_traced(core: _Core, i: int, j: int) -> Optional[tuple]:
    """As `_fan_out`, plus a map from new positions of surviving old angles
    to their old positions."""
    bi, bj = angle_blocks(core, i), angle_blocks(core, j)
    if len(bi) != len(bj):
        return None
    m = len(bi)
    want = {}
    for s in range(m):
        x, y = bi[m - 1 - s], bj[s]
        if len(x) == len(y):
            if len(x) > 1:
                return None
            continue
        if len(x) > 1 and len(y) > 1:
            return None
        lone, n = (x[0], len(y)) if len(x) == 1 else (y[0], len(x))
        other = core.iota[lone]
        if core.label[other] in (i, j):
            # both ends of the fanned arc on the seam: no perfect gluing
            return None
        want[tuple(sorted((lone, other)))] = n
    if not want:
        return core, {}, {p: p for p in range(len(core.iota))}
    new, origin, blocks = _expand_core(core, None, new_mark=0, only=want)
    zero = {}
    for (p, q), n in want.items():
        far = q if core.label[p] in (i, j) else p
        for x in blocks[far][:-1]:
            zero[x] = 0
    back = {blk[-1]: p for p, blk in blocks.items()}
    return new, zero, back


def angle_glue(gamma: PartitionedArcGraph, i: int, delta: PartitionedArcGraph,
               j: int = 0, mode: str = "topological") -> Optional[PartitionedArcGraph]:
    """Gluing of angle marked partitioned graphs along angle matched boundaries."""
    _check_mode(mode)
    a, b = gamma.core, delta.core
    if a.marks is None or b.marks is None:
        raise MarkingMissingError("angle gluing needs angle marks on both graphs")
    if mode == "topological" and i in gamma.angle_twisted_at() \
            and j in delta.angle_twisted_at():
        return None
    u = disjoint_union(a, b)
    jj = len(a.sizes) + j
    fan = _fan_out(u, i, jj)
    if fan is None:
        return None
    u2, zero = fan
    order = _glue_labels(len(a.sizes), i, len(b.sizes), j)
    return _finish(seam_glue(u2, i, jj, order, marks_fill=zero))


class GlueTrace:
    """A gluing with provenance for every angle of the result.

    `origin` maps result positions of inherited angles to ("a", p) or
    ("b", p), positions in the first or second input.  `seam` lists the
    pairs of input angles that merge across the seam.
    """

    __slots__ = ("result", "origin", "seam", "loops")

    def __init__(self, result, origin=None, seam=None, loops=0):
        self.result = result
        self.origin = origin or {}
        self.seam = seam or []
        self.loops = loops


def traced_glue(gamma: PartitionedArcGraph, i: int, delta: PartitionedArcGraph,
                j: int = 0, angle: bool = False, mode: str = "algebraic") -> GlueTrace:
    """`glue` (or `angle_glue` when `angle`) with angle provenance."""
    _check_mode(mode)
    a, b = gamma.core, delta.core
    if mode == "topological":
        tw_a = gamma.angle_twisted_at() if angle else gamma.twisted_at()
        tw_b = delta.angle_twisted_at() if angle else delta.twisted_at()
        if i in tw_a and j in tw_b:
            return GlueTrace(None)
    u = disjoint_union(a, b)
    jj = len(a.sizes) + j
    zero = {}
    back = {p: p for p in range(len(u.iota))}
    if angle:
        fan = _fan_out_traced(u, i, jj)
        if fan is None:
            return GlueTrace(None)
        u, zero, back = fan
    order = _glue_labels(len(a.sizes), i, len(b.sizes), j)
    res = seam_glue(u, i, jj, order, marks_fill=zero)
    out = _finish(res)
    if out is None:
        return GlueTrace(None, loops=res.loops)
    shift = len(a.iota)

    def side(p):
        return ("a", p) if p < shift else ("b", p - shift)

    origin = {k: side(back[p]) for k, p in enumerate(res.keep) if p in back}
    U = list(range(u.offsets[i], u.offsets[i] + u.sizes[i]))
    W = list(range(u.offsets[jj], u.offsets[jj] + u.sizes[jj]))
    K = len(U)
    pairs = [(U[t], W[K - 2 - t]) for t in range(K - 1)]
    if K:
        pairs.append((U[K - 1], W[K - 1]))
    seam = [(side(back[x]), side(back[y])) for x, y in pairs if x in back and y in back]
    return GlueTrace(out, origin, seam, res.loops)


def angle_self_glue(gamma: PartitionedArcGraph, i: int, j: int,
                    mode: str = "topological") -> Optional[PartitionedArcGraph]:
    _check_mode(mode)
    if mode == "topological":
        tw = gamma.angle_twisted_at()
        if i in tw and j in tw:
            return None
    fan = _fan_out(gamma.core, i, j)
    if fan is None:
        return None
    core, zero = fan
    return _finish(seam_glue(core, i, j, marks_fill=zero))


# ----------------------------------------------------------------------
# PROP composition
# ----------------------------------------------------------------------

def prop_compose(graphs: Sequence[PartitionedArcGraph], pairs: Sequence[tuple],
                 mode: str = "topological", angle: bool = False,
                 order: Optional[Sequence[int]] = None) -> Optional[PartitionedArcGraph]:
    """Glue Out boundaries to In boundaries across a collection of graphs.

    `pairs` lists ((graph index, out label), (graph index, in label)).
    The gluings are carried out one after the other (in `order`, default
    list order) as self gluings of the disjoint union; the surviving
    boundaries are numbered by (graph index, old label).
    """
    _check_mode(mode)
    if not graphs:
        raise ValueError("need at least one graph")
    for (ga, la), (gb, lb) in pairs:
        for g, lab in ((ga, la), (gb, lb)):
            if not (0 <= g < len(graphs)) or not (0 <= lab < len(graphs[g].core.sizes)):
                raise IndexError("pair refers to a missing boundary")
    core = graphs[0].core
    base = [0]
    for g in graphs[1:]:
        base.append(len(core.sizes))
        core = disjoint_union(core, g.core)
    # current label of every original (graph, label)
    current = {}
    lab = 0
    for gi, g in enumerate(graphs):
        for l0 in range(len(g.core.sizes)):
            current[(gi, l0)] = lab
            lab += 1
    seq = list(range(len(pairs))) if order is None else list(order)
    for t in seq:
        (ga, la), (gb, lb) = pairs[t]
        i, j = current[(ga, la)], current[(gb, lb)]
        if mode == "topological":
            probe = PartitionedArcGraph(_build_unchecked(core))
            tw = probe.angle_twisted_at() if angle else probe.twisted_at()
            if i in tw and j in tw:
                return None
        zero = {}
        if angle:
            fan = _fan_out(core, i, j)
            if fan is None:
                return None
            core, zero = fan
        res = seam_glue(core, i, j, marks_fill=zero)
        if res.is_zero:
            return None
        core = res.core
        for key_, v in list(current.items()):
            if v in (i, j):
                current[key_] = None
            elif v is not None:
                current[key_] = v - (v > i) - (v > j)
    if not _connected(core):
        raise DomainError("composition produced a disconnected surface")
    return _finish(GlueResult(core))


def _build_unchecked(core: _Core) -> ArcGraph:
    return core.build()


# ----------------------------------------------------------------------
# sums, the composition of plain graphs, and the associated graded
# ----------------------------------------------------------------------

def compose_sums(x: FormalSum, i: int, y: FormalSum, j: int = 0,
                 mode: str = "algebraic", angle: bool = False,
                 setting: Optional[str] = None) -> FormalSum:
    """Bilinear extension of the gluing, with the orientation sign."""
    out = FormalSum()
    op = angle_glue if angle else glue
    for a, ca in x:
        for b, cb in y:
            r = op(a, i, b, j, mode)
            if r is not None:
                out.add(r, ca * cb * glue_sign(a, b, r, setting))
    return out


def self_glue_sum(x: FormalSum, i: int, j: int, mode: str = "algebraic",
                  angle: bool = False, setting: Optional[str] = None) -> FormalSum:
    out = FormalSum()
    op = angle_self_glue if angle else self_glue
    for a, ca in x:
        r = op(a, i, j, mode)
        if r is not None:
            out.add(r, ca * orientation_sign(a, setting) * orientation_sign(r, setting))
    return out


def seam_partitions(alpha: ArcGraph, lab: int, max_seam: int, max_rest: int,
                    angle: bool = False, setting: Optional[str] = None) -> Iterator[tuple]:
    """Partitions p of alpha with at most `max_seam` expanded flags at `lab`
    and total weight of the other edges at most `max_rest` (extra copies).

    Yields (sign, partitioned graph, p).
    """
    core = alpha.core
    edges = core.edges()
    at = [sum(core.label[x] == lab for x in e) for e in edges]
    seam_idx = [t for t, c in enumerate(at) if c]
    rest_idx = [t for t, c in enumerate(at) if not c]
    base_seam = sum(at)

    def seam_choices(t, budget):
        if t == len(seam_idx):
            yield {}
            return
        c = at[seam_idx[t]]
        n = 1
        while c * (n - 1) <= budget:
            for rest in seam_choices(t + 1, budget - c * (n - 1)):
                d = dict(rest)
                d[seam_idx[t]] = n
                yield d
            n += 1

    def rest_choices(t, budget):
        if t == len(rest_idx):
            yield {}
            return
        for extra in range(budget + 1):
            for rest in rest_choices(t + 1, budget - extra):
                d = dict(rest)
                d[rest_idx[t]] = 1 + extra
                yield d

    for sp in seam_choices(0, max_seam - base_seam):
        for rp in rest_choices(0, max_rest):
            p = [sp.get(t, rp.get(t, 1)) for t in range(len(edges))]
            s, term = partition_term(alpha, p, angle, setting)
            yield s, term, tuple(p)


def partition_product(alpha: ArcGraph, i: int, beta: ArcGraph, j: int = 0,
                      max_weight: int = 6, mode: str = "algebraic",
                      angle: bool = False, seam_cap: Optional[int] = None,
                      setting: Optional[str] = None,
                      rest_cap: Optional[int] = None) -> FormalSum:
    """P(alpha) o_i P(beta), keeping result terms of weight <= max_weight.

    Only partitions with at most `seam_cap` flags on the glued boundary
    are generated (default 2 * max_weight); every result arc crosses the
    seam at most twice when one side has no arc returning to the seam,
    which makes this bound exhaustive for such pairs.
    """
    if seam_cap is None:
        seam_cap = 2 * max_weight
    if rest_cap is None:
        rest_cap = max_weight
    out = FormalSum()
    left = list(seam_partitions(alpha, i, seam_cap, rest_cap, angle, setting))
    right = list(seam_partitions(beta, j, seam_cap, rest_cap, angle, setting))
    by_count = {}
    for s, t, p in right:
        by_count.setdefault(t.core.sizes[j], []).append((s, t))
    op = angle_glue if angle else glue
    for s1, t1, _ in left:
        k1 = t1.core.sizes[i]
        candidates = right if angle else by_count.get(k1, [])
        for item in candidates:
            s2, t2 = item[0], item[1]
            # without closed loops the glued weight is w1 + w2 - K
            if not angle and t1.weight + t2.weight - k1 > max_weight:
                continue
            if angle:
                # fanning out keeps weight minus seam size on each side
                k2 = t2.core.sizes[j]
                if t1.weight - k1 + t2.weight - k2 + max(k1, k2) > max_weight:
                    continue
            r = op(t1, i, t2, j, mode)
            if r is not None and r.weight <= max_weight:
                # s1, s2 are the orientation signs of t1, t2, so the glue
                # sign s1 * s2 * o(r) leaves o(r) on the product
                out.add(r, orientation_sign(r, setting))
    return out


def compose_graphs(alpha: ArcGraph, i: int, beta: ArcGraph, j: int = 0,
                   mode: str = "algebraic", angle: bool = False,
                   seam_cap: Optional[int] = None,
                   setting: Optional[str] = None) -> FormalSum:
    """alpha o_i beta for unpartitioned graphs.

    The composite is read off from the product of partitioning operators:
    its summands are the classes of underlying graphs, each with the
    coefficient of its lowest weight representative divided by the sign
    that representative carries in its own partitioning.
    """
    a_seam = len(alpha.boundaries[i])
    b_seam = len(beta.boundaries[j])
    cap = seam_cap if seam_cap is not None else 2 * (a_seam + b_seam)
    w = alpha.n_arcs + beta.n_arcs + 2 * cap
    prod = partition_product(alpha, i, beta, j, max_weight=w, mode=mode,
                             angle=angle, seam_cap=cap, setting=setting, rest_cap=0)
    best = {}
    for t, c in prod:
        u = t.underlying()
        k = u.key()
        if k not in best or t.weight < best[k][0].weight:
            best[k] = (t, c, u)
    out = FormalSum()
    for k, (t, c, u) in best.items():
        if angle:
            u = _restore_marks(u)
        s, ref = partition_term(u, t.mult, angle, setting)
        if ref.key() != t.key():
            raise AssertionError("minimal term is not a partition of its underlying graph")
        out.add(u, c * s)
    return out


def _restore_marks(u: ArcGraph) -> ArcGraph:
    from dataclasses import replace
    return replace(u, angle_marks=standard_marking(u))


def graded_compose(x: FormalSum, i: int, y: FormalSum, j: int = 0,
                   mode: str = "algebraic", angle: bool = False) -> FormalSum:
    """Composition followed by projection to the top filtration degree."""
    dx = {t.degree for t, _ in x}
    dy = {t.degree for t, _ in y}
    if len(dx) > 1 or len(dy) > 1:
        raise ValueError("graded composition needs homogeneous inputs")
    if not dx or not dy:
        return FormalSum()
    top = dx.pop() + dy.pop()
    full = compose_sums(x, i, y, j, mode, angle)
    return FormalSum((t, c) for t, c in full if t.degree >= top)


def degree_of_sum(x: FormalSum) -> Optional[int]:
    ds = {t.degree for t, _ in x}
    return ds.pop() if len(ds) == 1 else None


__all__ = [
    "PartitionedArcGraph", "FormalSum", "ordered_partitions", "count_ordered_partitions",
    "expand", "expand_angle", "expand_ribbon", "partition_term", "underlying",
    "standard_marking", "glue", "glue_loops", "self_glue", "angle_glue",
    "angle_self_glue", "prop_compose", "compose_sums", "partition_product",
    "compose_graphs", "graded_compose", "as_partitioned", "dual_of_sum",
    "angle_blocks", "expansion_sign", "seam_glue", "disjoint_union",
    "orientation_sign", "glue_sign", "GlueTrace", "traced_glue", "self_glue_sum", "merges_classes",
]
