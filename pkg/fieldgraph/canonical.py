"""Canonical labeling, isomorphism testing and automorphism groups of weighted multigraphs.

The search follows the individualization-refinement scheme:

* an ordered partition is refined to an equitable one, splitting cells by the multiset
  of edge weights each vertex sends into a splitter cell;
* the first smallest non-singleton cell is the target; each of its vertices is
  individualized in turn and the search recurses;
* leaves (discrete partitions) are compared through their refinement traces and the
  relabeled edge list. The least (trace, certificate) pair is the canonical leaf;
* a leaf equal to the first or the best leaf yields an automorphism, after which the
  search jumps back to the common ancestor. Children lying in one orbit of the
  automorphisms fixing the current individualized vertices are explored once.

|Aut| is the product, along the first path, of the orbit length of the first child in
its target cell under the stabilizer of the preceding base points.
"""
from __future__ import annotations

import hashlib
import logging
import math
import struct
import sys
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from fieldgraph.errors import FieldGraphError, OracleSizeError, ValidationError
from fieldgraph.ff_core import FieldModel, reciprocal_map
from fieldgraph.graph_build import FieldGraph, build_graph

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = b'FGCF'
BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric matrix of edge multiplicities; the diagonal holds loop counts"""

    n: int
    weight: np.ndarray
    vertex_colors: Optional[tuple] = None

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=np.int64)
        if w.shape != (self.n, self.n):
            raise ValidationError(f'weight matrix has shape {w.shape}, expected {(self.n, self.n)}')
        if self.n < 1:
            raise ValidationError('a weighted graph needs at least one vertex')
        if (w < 0).any() or not np.array_equal(w, w.T):
            raise ValidationError('weights must be symmetric and nonnegative')
        if self.vertex_colors is not None and len(self.vertex_colors) != self.n:
            raise ValidationError('one colour per vertex is required')
        w.setflags(write=False)
        object.__setattr__(self, 'weight', w)

    @classmethod
    def from_field_graph(cls, g: FieldGraph, mode='default', vertex_colors=None) -> 'WeightedGraph':
        """Kind tags dropped (default, simple) or folded into the weight (strict)"""
        return cls(g.n, g.weight_matrix(mode), vertex_colors)

    @classmethod
    def from_matrix(cls, weight, vertex_colors=None) -> 'WeightedGraph':
        w = np.asarray(weight, dtype=np.int64)
        return cls(w.shape[0], w, None if vertex_colors is None else tuple(vertex_colors))

    @property
    def colors(self):
        return self.vertex_colors if self.vertex_colors is not None else (0,) * self.n

    @cached_property
    def neighbours(self):
        """Per vertex: (neighbour, weight) pairs, loops excluded"""
        out = []
        for u in range(self.n):
            row = self.weight[u]
            out.append(tuple((int(v), int(row[v])) for v in np.flatnonzero(row) if v != u))
        return tuple(out)

    @cached_property
    def edge_list(self):
        """(u, v, w) with u <= v, loops included"""
        us, vs = np.nonzero(np.triu(self.weight))
        return tuple((int(u), int(v), int(self.weight[u, v])) for u, v in zip(us, vs))

    def relabel(self, sigma: Sequence[int]) -> 'WeightedGraph':
        """Graph whose vertex sigma[u] plays the role of u"""
        inv = np.argsort(np.asarray(sigma))
        colors = None
        if self.vertex_colors is not None:
            colors = tuple(self.vertex_colors[i] for i in inv)
        return WeightedGraph(self.n, self.weight[np.ix_(inv, inv)], colors)


@dataclass(frozen=True)
class CanonicalForm:
    """Row-major weight matrix of the canonical relabeling, prefixed by n and the colours"""

    data: bytes

    def hex_digest(self):
        return hashlib.sha256(self.data).hexdigest()


@dataclass(frozen=True)
class AutGroup:
    n: int
    generators: tuple
    order: int
    base: tuple = ()
    orbit_sizes: tuple = ()

    def recompute_order(self):
        return math.prod(self.orbit_sizes)

    def preserves(self, g: WeightedGraph):
        return all(preserves_weights(gen, g) for gen in self.generators)


@dataclass(frozen=True)
class SearchResult:
    labeling: tuple
    form: CanonicalForm
    group: AutGroup
    nodes: int = 0


def preserves_weights(perm: Sequence[int], g: WeightedGraph, target: WeightedGraph = None) -> bool:
    """w_target[perm u][perm v] == w[u][v] for all u, v, colours included"""
    target = g if target is None else target
    sigma = np.asarray(perm)
    if sigma.shape != (g.n,) or target.n != g.n or sorted(perm) != list(range(g.n)):
        return False
    if any(target.colors[sigma[u]] != g.colors[u] for u in range(g.n)):
        return False
    return bool(np.array_equal(target.weight[np.ix_(sigma, sigma)], g.weight))


class _UnionFind:
    __slots__ = ('parent',)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, v):
        parent = self.parent
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def absorb(self, perm):
        for v, image in enumerate(perm):
            if v != image:
                a, b = self.find(v), self.find(image)
                if a != b:
                    self.parent[max(a, b)] = min(a, b)


class _Frame:
    __slots__ = ('seq', 'orbits')

    def __init__(self, seq):
        self.seq = seq
        self.orbits = None


def _fixes(perm, seq):
    return all(perm[v] == v for v in seq)


def _common_prefix(a, b):
    length = 0
    for x, y in zip(a, b):
        if x != y:
            break
        length += 1
    return length


class _Search:
    """Mutable state of one canonical search"""

    def __init__(self, g: WeightedGraph):
        self.g = g
        self.n = g.n
        self.nbrs = g.neighbours
        self.generators = []
        self.stack = []
        self.first = None
        self.best = None
        self.orbit_sizes = {}
        self.base = ()
        self.nodes = 0

    # -- partitions ---------------------------------------------------------

    def _initial(self):
        colors = self.g.colors
        diag = self.g.weight.diagonal()
        keys = [(colors[v], int(diag[v])) for v in range(self.n)]
        lab = sorted(range(self.n), key=lambda v: (keys[v], v))
        cell_of = [0] * self.n
        cell_end = [0] * self.n
        cells = []
        start = 0
        for i in range(1, self.n + 1):
            if i == self.n or keys[lab[i]] != keys[lab[start]]:
                for v in lab[start:i]:
                    cell_of[v] = start
                cell_end[start] = i
                cells.append((start, keys[lab[start]], i - start))
                start = i
        step = self._refine(lab, cell_of, cell_end, [c[0] for c in cells])
        return lab, cell_of, cell_end, (tuple((k, size) for _, k, size in cells), step)

    def _refine(self, lab, cell_of, cell_end, active):
        """Refine in place to the coarsest equitable partition; returns the trace"""
        nbrs = self.nbrs
        queue = deque(sorted(active))
        queued = set(active)
        trace = []
        while queue:
            w = queue.popleft()
            queued.discard(w)
            sig = {}
            for u in lab[w:cell_end[w]]:
                for v, wt in nbrs[u]:
                    if v in sig:
                        sig[v].append(wt)
                    else:
                        sig[v] = [wt]
            touched = {}
            for v in sig:
                c = cell_of[v]
                if cell_end[c] - c > 1:
                    touched.setdefault(c, []).append(v)
            for c in sorted(touched):
                end = cell_end[c]
                members = touched[c]
                keyed = {}
                for v in members:
                    keyed.setdefault(tuple(sorted(sig[v])), []).append(v)
                if len(members) < end - c:
                    hit = set(members)
                    keyed[()] = [v for v in lab[c:end] if v not in hit]
                if len(keyed) == 1:
                    continue
                keys = sorted(keyed)
                starts = []
                pos = c
                for key in keys:
                    start = pos
                    for v in sorted(keyed[key]):
                        lab[pos] = v
                        cell_of[v] = start
                        pos += 1
                    cell_end[start] = pos
                    starts.append(start)
                trace.append((c, tuple((key, len(keyed[key])) for key in keys)))
                if c in queued:
                    fresh = starts[1:]
                else:
                    largest = max(starts, key=lambda s: cell_end[s] - s)
                    fresh = [s for s in starts if s != largest]
                for s in fresh:
                    queue.append(s)
                    queued.add(s)
        return tuple(trace)

    def _target_cell(self, cell_end):
        best = None
        i = 0
        while i < self.n:
            end = cell_end[i]
            size = end - i
            if size > 1 and (best is None or size < best[1] - best[0]):
                best = (i, end)
                if size == 2:
                    break
            i = end
        return best

    def _individualize(self, lab, cell_of, cell_end, start, v):
        lab, cell_of, cell_end = lab[:], cell_of[:], cell_end[:]
        end = cell_end[start]
        i = lab.index(v, start, end)
        lab[start], lab[i] = lab[i], lab[start]
        cell_end[start] = start + 1
        cell_end[start + 1] = end
        for u in lab[start + 1:end]:
            cell_of[u] = start + 1
        step = self._refine(lab, cell_of, cell_end, [start])
        return lab, cell_of, cell_end, (start, step)

    # -- leaves ---------------------------------------------------------------

    def _certificate(self, lab):
        pos = [0] * self.n
        for i, v in enumerate(lab):
            pos[v] = i
        cert = []
        for u, v, w in self.g.edge_list:
            a, b = pos[u], pos[v]
            cert.append((a, b, w) if a <= b else (b, a, w))
        cert.sort()
        return tuple(cert)

    def _add_generator(self, lab, target_lab):
        perm = [0] * self.n
        for v, image in zip(lab, target_lab):
            perm[v] = image
        perm = tuple(perm)
        if all(v == image for v, image in enumerate(perm)):
            return
        self.generators.append(perm)
        for frame in self.stack:
            if not _fixes(perm, frame.seq):
                break
            if frame.orbits is not None:
                frame.orbits.absorb(perm)

    def _leaf(self, lab, seq, traces):
        cert = self._certificate(lab)
        leaf = (traces, cert, lab, seq)
        if self.first is None:
            self.first = self.best = leaf
            self.base = tuple(seq)
            return None
        if traces == self.first[0] and cert == self.first[1]:
            self._add_generator(lab, self.first[2])
            return _common_prefix(seq, self.first[3])
        best_traces, best_cert = self.best[0], self.best[1]
        if traces < best_traces or (traces == best_traces and cert < best_cert):
            self.best = leaf
            return None
        if traces == best_traces and cert == best_cert:
            self._add_generator(lab, self.best[2])
            return _common_prefix(seq, self.best[3])
        return None

    # -- tree ------------------------------------------------------------------

    def _orbits(self, frame):
        if frame.orbits is None:
            frame.orbits = _UnionFind(self.n)
            for perm in self.generators:
                if _fixes(perm, frame.seq):
                    frame.orbits.absorb(perm)
        return frame.orbits

    def _node(self, lab, cell_of, cell_end, seq, traces):
        self.nodes += 1
        target = self._target_cell(cell_end)
        if target is None:
            return self._leaf(lab, seq, traces)
        depth = len(seq)
        start, end = target
        cell = sorted(lab[start:end])
        on_first_path = self.first is None or seq == list(self.first[3][:depth])
        frame = _Frame(seq)
        self.stack.append(frame)
        try:
            explored = []
            for v in cell:
                if explored:
                    orbits = self._orbits(frame)
                    root = orbits.find(v)
                    if any(orbits.find(u) == root for u in explored):
                        continue
                explored.append(v)
                clab, ccell_of, ccell_end, step = self._individualize(lab, cell_of, cell_end, start, v)
                ctraces = traces + [step]
                if self.first is not None:
                    size = len(ctraces)
                    if ctraces != self.first[0][:size] and ctraces > self.best[0][:size]:
                        continue
                jump = self._node(clab, ccell_of, ccell_end, seq + [v], ctraces)
                if jump is not None and jump < depth:
                    if on_first_path:
                        raise FieldGraphError('search jumped above a first-path node')
                    return jump
            if on_first_path:
                orbits = self._orbits(frame)
                root = orbits.find(explored[0])
                self.orbit_sizes[depth] = sum(1 for u in cell if orbits.find(u) == root)
        finally:
            self.stack.pop()
        return None

    def run(self) -> SearchResult:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 4 * self.n + 200))
        try:
            lab, cell_of, cell_end, step = self._initial()
            self._node(lab, cell_of, cell_end, [], [step])
        finally:
            sys.setrecursionlimit(limit)
        sizes = tuple(self.orbit_sizes[d] for d in sorted(self.orbit_sizes))
        group = AutGroup(self.n, tuple(self.generators), math.prod(sizes), self.base, sizes)
        labeling = tuple(self.best[2])
        logger.debug('canonical search on %d vertices: %d nodes, %d generators, |Aut| = %d',
                     self.n, self.nodes, len(self.generators), group.order)
        return SearchResult(labeling, _serialize(self.g, labeling), group, self.nodes)


def _serialize(g: WeightedGraph, labeling) -> CanonicalForm:
    order = np.asarray(labeling)
    matrix = g.weight[np.ix_(order, order)]
    dtype = np.dtype('>u1') if matrix.max(initial=0) < 256 else np.dtype('>u2')
    colors = np.asarray([g.colors[v] for v in labeling], dtype='>u4')
    header = MAGIC + struct.pack('>BBI', FORMAT_VERSION, dtype.itemsize, g.n)
    return CanonicalForm(header + colors.tobytes() + matrix.astype(dtype).tobytes())


def canonical_search(g: WeightedGraph) -> SearchResult:
    result = _Search(g).run()
    if not result.group.preserves(g):
        raise FieldGraphError('search produced a generator that does not preserve the weights')
    return result


def canonical_form(g: WeightedGraph) -> CanonicalForm:
    return canonical_search(g).form


def automorphism_group(g: WeightedGraph) -> AutGroup:
    return canonical_search(g).group


def find_isomorphism(g1: WeightedGraph, g2: WeightedGraph) -> Optional[tuple]:
    """sigma with w2[sigma u][sigma v] == w1[u][v], verified, or None"""
    if g1.n != g2.n:
        return None
    r1, r2 = canonical_search(g1), canonical_search(g2)
    if r1.form != r2.form:
        return None
    sigma = [0] * g1.n
    for u, v in zip(r1.labeling, r2.labeling):
        sigma[u] = v
    if not preserves_weights(sigma, g1, g2):
        raise FieldGraphError('canonical forms agree but the induced map is not an isomorphism')
    return tuple(sigma)


def are_isomorphic(g1: WeightedGraph, g2: WeightedGraph) -> bool:
    return g1.n == g2.n and canonical_form(g1) == canonical_form(g2)


def _brute_force(g1: WeightedGraph, g2: WeightedGraph, stop_at_first: bool):
    """Backtracking over all bijections; returns (count, first mapping)"""
    n = g1.n
    if n > BRUTE_FORCE_LIMIT:
        raise OracleSizeError(f'brute force is limited to {BRUTE_FORCE_LIMIT} vertices, got {n}')
    if g2.n != n:
        return 0, None
    w1, w2 = g1.weight.tolist(), g2.weight.tolist()
    c1, c2 = g1.colors, g2.colors
    image = [-1] * n
    used = [False] * n
    count = 0
    first = None

    def extend(u):
        nonlocal count, first
        if u == n:
            count += 1
            if first is None:
                first = tuple(image)
            return stop_at_first
        for v in range(n):
            if used[v] or c1[u] != c2[v] or w1[u][u] != w2[v][v]:
                continue
            if any(w1[u][t] != w2[v][image[t]] for t in range(u)):
                continue
            image[u], used[v] = v, True
            if extend(u + 1):
                return True
            image[u], used[v] = -1, False
        return False

    extend(0)
    return count, first


def brute_force_iso(g1: WeightedGraph, g2: WeightedGraph) -> Optional[tuple]:
    """Exhaustive isomorphism oracle for n <= 10"""
    return _brute_force(g1, g2, stop_at_first=True)[1]


def brute_force_aut_order(g: WeightedGraph) -> int:
    """Number of weight-preserving permutations, by exhaustion"""
    return _brute_force(g, g, stop_at_first=False)[0]


def field_weighted_graph(model: FieldModel, mode='default', variant='full') -> WeightedGraph:
    return WeightedGraph.from_field_graph(build_graph(model, variant), mode)


def known_automorphisms(model: FieldModel, mode='default') -> list:
    """Frobenius powers y -> y^(p^i), i < k, and negation, as permutations of codes"""
    elems = list(model.elements())
    perms = []
    current = [y for y in elems]
    for _ in range(model.k):
        perms.append(tuple(y.code for y in current))
        current = [y.frobenius() for y in current]
    perms.append(tuple((-y).code for y in elems))
    g = field_weighted_graph(model, mode)
    for perm in perms:
        if not preserves_weights(perm, g):
            raise FieldGraphError(f'field automorphism {perm} does not preserve the graph of {model}')
    return perms


def reciprocal_isomorphism(model_f: FieldModel, model_g: FieldModel, mode='default') -> Optional[tuple]:
    """The map a(x) -> a(t^-1) when it is a graph isomorphism X_f -> X_g, else None"""
    sigma = reciprocal_map(model_f, model_g)
    g1 = field_weighted_graph(model_f, mode)
    g2 = field_weighted_graph(model_g, mode)
    return sigma if preserves_weights(sigma, g1, g2) else None
