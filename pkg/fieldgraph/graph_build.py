"""Graphs attached to a model: the digraph, the multigraph, its partial graphs and the cover.

Vertices are element codes. Multiplicities are kept: forgetting orientation turns every
directed edge into its own undirected edge, so an antiparallel pair becomes a double edge.
"""
from __future__ import annotations

import enum
import logging
import re
from collections import Counter, namedtuple
from dataclasses import dataclass, replace
from functools import lru_cache

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix

from fieldgraph.errors import (MixedModelError, ValidationError,
                               ZeroInversionError)
from fieldgraph.ff_core import FieldElem, FieldModel

logger = logging.getLogger(__name__)

MODES = ('default', 'strict', 'simple')
VARIANTS = ('full', 'additive', 'multiplicative', 'core', 'cover')

# strict mode packs the two edge classes into one integer weight
STRICT_MULTIPLICATIVE_WEIGHT = 256

_CORE = re.compile(r'^core\s*\(\s*(\d+)\s*\)$')


class EdgeClass(enum.Enum):
    ADDITIVE = 'additive'
    MULTIPLICATIVE = 'multiplicative'


@dataclass(frozen=True)
class EdgeKind:
    edge_class: EdgeClass
    gen_index: int

    @property
    def is_additive(self):
        return self.edge_class is EdgeClass.ADDITIVE


Edge = namedtuple('Edge', 'source target kind')


@dataclass(frozen=True)
class FieldGraph:
    """Edge multiset over vertices 0..n-1; labels[v] is the element code (or pair) behind v"""

    n: int
    directed: bool
    edges: tuple
    model: FieldModel
    variant: str
    labels: tuple

    def __post_init__(self):
        for e in self.edges:
            if not (0 <= e.source < self.n and 0 <= e.target < self.n):
                raise ValidationError(f'edge {e} leaves the vertex range of {self.variant} graph')
            if e.kind.gen_index >= self.model.k:
                raise ValidationError(f'generator index {e.kind.gen_index} >= k = {self.model.k}')

    def edge_counts(self) -> Counter:
        return Counter(e.kind.edge_class for e in self.edges)

    def out_degrees(self):
        deg = [0] * self.n
        for e in self.edges:
            deg[e.source] += 1
        return deg

    def in_degrees(self):
        deg = [0] * self.n
        for e in self.edges:
            deg[e.target] += 1
        return deg

    def degrees(self):
        """Weighted degree with orientation forgotten; a loop counts twice"""
        return [a + b for a, b in zip(self.out_degrees(), self.in_degrees())]

    def weight_matrix(self, mode='default') -> np.ndarray:
        """Symmetric multiplicity matrix, diagonal = loop count"""
        if mode not in MODES:
            raise ValidationError(f'unknown canonical mode {mode!r}')
        w = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v, kind in self.edges:
            step = 1
            if mode == 'strict' and not kind.is_additive:
                step = STRICT_MULTIPLICATIVE_WEIGHT
            w[u, v] += step
            if u != v:
                w[v, u] += step
        if mode == 'simple':
            w = (w > 0).astype(np.int64)
        return w

    def csgraph(self) -> csr_matrix:
        """0/1 adjacency for breadth-first searches; multiplicity ignored"""
        if not self.edges:
            return csr_matrix((self.n, self.n), dtype=np.int8)
        src = np.fromiter((e.source for e in self.edges), dtype=np.int64, count=len(self.edges))
        dst = np.fromiter((e.target for e in self.edges), dtype=np.int64, count=len(self.edges))
        if not self.directed:
            src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        mat = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(self.n, self.n))
        mat.data[:] = 1
        return mat

    def to_networkx(self):
        """MultiGraph / MultiDiGraph keyed by edge index"""
        graph = nx.MultiDiGraph() if self.directed else nx.MultiGraph()
        graph.add_nodes_from(range(self.n))
        for idx, (u, v, kind) in enumerate(self.edges):
            graph.add_edge(u, v, key=idx, kind=kind)
        return graph


class CoverGraph(FieldGraph):
    """Cover C_f on K_f x K_f^x; vertex index = code(y) * (q - 1) + code(z) - 1"""

    @property
    def fiber_size(self):
        return self.model.order - 1

    def index(self, y_code, z_code):
        if z_code == 0:
            raise ZeroInversionError('cover vertices need z != 0')
        return y_code * self.fiber_size + z_code - 1

    def pair(self, v):
        y, rank = divmod(v, self.fiber_size)
        return y, rank + 1

    def project(self, v):
        return v // self.fiber_size


@lru_cache(maxsize=64)
def _tables(model: FieldModel):
    """Per generator: additive and multiplicative successor of every code"""
    elems = list(model.elements())
    add = tuple(tuple((y + s).code for y in elems) for s in model.S)
    mul = tuple(tuple((s * y).code for y in elems) for s in model.S)
    return add, mul


def _additive_edges(model, gens):
    add, _ = _tables(model)
    kinds = [EdgeKind(EdgeClass.ADDITIVE, i) for i in range(model.k)]
    return [Edge(y, add[i][y], kinds[i]) for y in range(model.order) for i in gens]


def _multiplicative_edges(model, gens):
    _, mul = _tables(model)
    kinds = [EdgeKind(EdgeClass.MULTIPLICATIVE, i) for i in range(model.k)]
    return [Edge(y, mul[i][y], kinds[i]) for y in range(1, model.order) for i in gens]


def build_digraph(model: FieldModel) -> FieldGraph:
    """Directed X_f: y -> y + s for every y, y -> s*y for every y != 0"""
    gens = range(model.k)
    edges = _additive_edges(model, gens) + _multiplicative_edges(model, gens)
    logger.debug('built digraph of %s with %d edges', model, len(edges))
    return FieldGraph(model.order, True, tuple(edges), model, 'full', tuple(range(model.order)))


def to_undirected(g: FieldGraph) -> FieldGraph:
    if not g.directed:
        raise ValidationError('graph is already undirected')
    return replace(g, directed=False)


def parse_variant(variant):
    """'full', 'additive', 'multiplicative', 'cover' or 'core(i)' -> (name, index)"""
    if isinstance(variant, tuple):
        name, index = variant
    else:
        text = str(variant).strip().lower()
        match = _CORE.match(text)
        name, index = ('core', int(match.group(1))) if match else (text, None)
    if name not in VARIANTS or (name == 'core') != (index is not None):
        raise ValidationError(f'invalid graph variant {variant!r}')
    return name, index


def build_subgraph(model: FieldModel, variant, directed=False) -> FieldGraph:
    """Additive, multiplicative (0 removed) or core(i) partial graph"""
    name, index = parse_variant(variant)
    if name == 'additive':
        edges = _additive_edges(model, range(model.k))
        graph = FieldGraph(model.order, True, tuple(edges), model, 'additive', tuple(range(model.order)))
    elif name == 'multiplicative':
        # x = 0 sends every unit to 0, which is not a vertex here
        edges = [Edge(u - 1, v - 1, kind) for u, v, kind in _multiplicative_edges(model, range(model.k)) if v]
        graph = FieldGraph(model.order - 1, True, tuple(edges), model, 'multiplicative',
                           tuple(range(1, model.order)))
    elif name == 'core':
        if not 0 <= index < model.k:
            raise ValidationError(f'core index {index} outside [0, {model.k - 1}]')
        edges = _additive_edges(model, [index]) + _multiplicative_edges(model, [index])
        graph = FieldGraph(model.order, True, tuple(edges), model, f'core({index})', tuple(range(model.order)))
    else:
        raise ValidationError(f'{variant!r} is not a subgraph variant')
    return graph if directed else to_undirected(graph)


def build_cover(model: FieldModel) -> CoverGraph:
    """Directed cover: (y, z) -> (y + s, z) and, for y != 0 and s != 0, (y, z) -> (s*y, s*z)"""
    add, mul = _tables(model)
    q, fiber = model.order, model.order - 1
    additive = [EdgeKind(EdgeClass.ADDITIVE, i) for i in range(model.k)]
    multiplicative = [EdgeKind(EdgeClass.MULTIPLICATIVE, i) for i in range(model.k)]
    edges = []
    for y in range(q):
        for z in range(1, q):
            here = y * fiber + z - 1
            for i in range(model.k):
                edges.append(Edge(here, add[i][y] * fiber + z - 1, additive[i]))
            if y:
                for i in range(model.k):
                    if not mul[i][y]:
                        continue
                    edges.append(Edge(here, mul[i][y] * fiber + mul[i][z] - 1, multiplicative[i]))
    labels = tuple((y, z) for y in range(q) for z in range(1, q))
    logger.debug('built cover of %s: %d vertices, %d edges', model, len(labels), len(edges))
    return CoverGraph(q * fiber, True, tuple(edges), model, 'cover', labels)


def build_graph(model: FieldModel, variant='full', directed=False) -> FieldGraph:
    """Any variant by name, undirected unless asked otherwise"""
    name, _ = parse_variant(variant)
    if name == 'full':
        graph = build_digraph(model)
    elif name == 'cover':
        graph = build_cover(model)
    else:
        return build_subgraph(model, variant, directed=directed)
    return graph if directed else to_undirected(graph)


def deck_transform(cover: CoverGraph, a: FieldElem) -> tuple:
    """F_a(y, z) = (y, a*z) as a permutation of cover vertices"""
    if a.model != cover.model:
        raise MixedModelError(f'{a} does not belong to {cover.model}')
    if a.is_zero:
        raise ZeroInversionError('deck transformations need a != 0')
    model = cover.model
    scaled = [0] + [(a * model.from_code(z)).code for z in range(1, model.order)]
    return tuple(cover.index(y, scaled[z]) for y, z in (cover.pair(v) for v in range(cover.n)))


def _stars(g: FieldGraph, project):
    """Per vertex: multiset of (projected other end, kind, role)"""
    stars = [Counter() for _ in range(g.n)]
    for u, v, kind in g.edges:
        if g.directed:
            stars[u][(project(v), kind, 'out')] += 1
            stars[v][(project(u), kind, 'in')] += 1
        else:
            stars[u][(project(v), kind, 'end')] += 1
            stars[v][(project(u), kind, 'end')] += 1
    return stars


def verify_covering(cover: CoverGraph, base: FieldGraph) -> bool:
    """pi maps edges to edges of the same kind and is a bijection on every star"""
    if cover.model != base.model:
        raise MixedModelError(f'cover of {cover.model} does not sit over {base.model}')
    if base.variant != 'full':
        raise ValidationError(f'covering base must be the full graph, not {base.variant}')
    directed = cover.directed and base.directed
    c = replace(cover, directed=directed)
    b = replace(base, directed=directed)

    def key(u, v, kind):
        return (u, v, kind) if directed else (min(u, v), max(u, v), kind)

    base_edges = {key(*e) for e in b.edges}
    if any(key(c.project(u), c.project(v), kind) not in base_edges for u, v, kind in c.edges):
        return False
    base_stars = _stars(b, lambda v: v)
    cover_stars = _stars(c, c.project)
    return all(star == base_stars[c.project(v)] for v, star in enumerate(cover_stars))
