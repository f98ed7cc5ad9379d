"""Connectivity, distances, girth and Eulerian circuits of field graphs."""
from __future__ import annotations

import logging
import math
from collections import Counter, deque
from dataclasses import asdict, dataclass
from typing import List

import networkx as nx
from scipy.sparse.csgraph import connected_components, shortest_path

from fieldgraph.errors import (DirectedGraphError, DisconnectedGraphError,
                               NotEulerianError, ValidationError)
from fieldgraph.ff_core import FieldModel, is_normal, is_primitive
from fieldgraph.graph_build import (FieldGraph, build_cover,
                                    build_digraph, build_subgraph,
                                    to_undirected)

logger = logging.getLogger(__name__)

INFINITE_GIRTH = math.inf


def diameter_bound(p, k):
    """Strict upper bound on the diameter of X_f"""
    return 2 * p * (2 * k + 1) - 2 * k - 4


def directed_diameter_bound(p, k):
    """Strict upper bound on the diameter of the digraph"""
    return (p - 1) * (k * k + 4 * k + 1) + k


def _partition(labels) -> List[list]:
    groups = {}
    for v, label in enumerate(labels):
        groups.setdefault(label, []).append(v)
    return sorted(groups.values())


def components(g: FieldGraph) -> List[list]:
    """Connected components, orientation ignored; sorted by smallest vertex"""
    _, labels = connected_components(g.csgraph(), directed=g.directed, connection='weak')
    return _partition(labels)


def strong_components(g: FieldGraph) -> List[list]:
    if not g.directed:
        raise ValidationError('strong components need a directed graph')
    _, labels = connected_components(g.csgraph(), directed=True, connection='strong')
    return _partition(labels)


def diameter(g: FieldGraph) -> int:
    """Largest shortest-path length; a multi-edge counts as one step"""
    parts = strong_components(g) if g.directed else components(g)
    if len(parts) > 1:
        raise DisconnectedGraphError(f'{g.variant} graph of {g.model} has {len(parts)} components', parts)
    if g.n == 1:
        return 0
    dist = shortest_path(g.csgraph(), method='D', directed=g.directed, unweighted=True)
    return int(dist.max())


def _simple_girth(n, neighbours) -> float:
    """Shortest cycle of a simple graph by breadth-first search from every vertex"""
    best = INFINITE_GIRTH
    for root in range(n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for v in neighbours[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def girth(g: FieldGraph, simple=False):
    """Shortest closed walk with distinct edges: loop -> 1, parallel pair -> 2.

    With simple=True loops and multiplicities are dropped first.
    """
    if g.directed:
        raise DirectedGraphError('girth is defined on the undirected graph')
    pairs = Counter()
    for u, v, _ in g.edges:
        if u == v:
            if not simple:
                return 1
            continue
        pairs[(min(u, v), max(u, v))] += 1
    if not simple and any(m > 1 for m in pairs.values()):
        return 2
    neighbours = [[] for _ in range(g.n)]
    for u, v in pairs:
        neighbours[u].append(v)
        neighbours[v].append(u)
    return _simple_girth(g.n, neighbours)


def girth_witness(model: FieldModel):
    """(a, a + x) with a = x(x - 1)^{-1}: joined by an additive and a multiplicative edge"""
    if model.k < 2:
        raise ValidationError('the girth-2 witness needs k >= 2')
    x = model.x
    a = x * (x - model.one).inverse()
    if a + x != a * x:
        raise AssertionError(f'a + x != a * x for a = {a} in {model}')
    return a.code, (a + x).code


def _without_isolated(g: FieldGraph):
    graph = g.to_networkx()
    graph.remove_nodes_from(list(nx.isolates(graph)))
    return graph


def eulerian_check(g: FieldGraph) -> bool:
    """Undirected: connected up to isolated vertices and even degrees; directed: strongly
    connected and balanced"""
    graph = _without_isolated(g)
    if graph.number_of_edges() == 0:
        return True
    return nx.is_eulerian(graph)


def eulerian_circuit(g: FieldGraph, source=None) -> list:
    """Hierholzer circuit as (u, v, edge index) triples covering every edge once"""
    if not eulerian_check(g):
        raise NotEulerianError(f'{g.variant} graph of {g.model} is not Eulerian')
    graph = _without_isolated(g)
    if source is None and graph.number_of_nodes():
        source = min(graph.nodes)
    return [(u, v, key) for u, v, key in nx.eulerian_circuit(graph, source=source, keys=True)]


def verify_circuit(g: FieldGraph, circuit) -> bool:
    """Closed walk using every edge index exactly once, consistent with the edge endpoints"""
    if sorted(key for _, _, key in circuit) != list(range(len(g.edges))):
        return False
    for (u, v, key), (nxt, _, _) in zip(circuit, circuit[1:] + circuit[:1]):
        source, target, _ = g.edges[key]
        if g.directed and (u, v) != (source, target):
            return False
        if not g.directed and {u, v} != {source, target}:
            return False
        if v != nxt:
            return False
    return True


@dataclass(frozen=True)
class GraphReport:
    connected: bool
    strongly_connected: bool
    diameter: int
    directed_diameter: int
    girth: float
    eulerian: bool
    directed_eulerian: bool
    diameter_bound: int
    directed_diameter_bound: int

    @property
    def within_bounds(self):
        return (self.diameter < self.diameter_bound
                and self.directed_diameter < self.directed_diameter_bound)

    def to_dict(self):
        return asdict(self)


def analyze(model: FieldModel) -> GraphReport:
    """Connectivity, diameters, girth and Eulerian flags of X_f and its digraph"""
    digraph = build_digraph(model)
    graph = to_undirected(digraph)
    connected = len(components(graph)) == 1
    strongly = len(strong_components(digraph)) == 1
    return GraphReport(
        connected=connected,
        strongly_connected=strongly,
        diameter=diameter(graph) if connected else -1,
        directed_diameter=diameter(digraph) if strongly else -1,
        girth=girth(graph),
        eulerian=eulerian_check(graph),
        directed_eulerian=eulerian_check(digraph),
        diameter_bound=diameter_bound(model.p, model.k),
        directed_diameter_bound=directed_diameter_bound(model.p, model.k),
    )


@dataclass(frozen=True)
class FieldPropertyRecord:
    additive_connected: bool
    multiplicative_connected: bool
    normal: bool
    primitive: bool
    cover_connected: object = None

    @property
    def consistent(self):
        """The three biconditionals; the cover one only when it was computed"""
        ok = (self.additive_connected == self.normal
              and self.multiplicative_connected == self.primitive)
        if self.cover_connected is not None:
            ok = ok and self.cover_connected == self.primitive
        return ok


def field_property_equivalences(model: FieldModel, include_cover=True) -> FieldPropertyRecord:
    """Graph-side and field-side flags computed independently"""
    record = FieldPropertyRecord(
        additive_connected=len(components(build_subgraph(model, 'additive'))) == 1,
        multiplicative_connected=len(components(build_subgraph(model, 'multiplicative'))) == 1,
        normal=is_normal(model),
        primitive=is_primitive(model),
        cover_connected=len(components(to_undirected(build_cover(model)))) == 1 if include_cover else None,
    )
    if not record.consistent:
        logger.error('field/graph equivalence violated for %s: %s', model, record)
    return record
