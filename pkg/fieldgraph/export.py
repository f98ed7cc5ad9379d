"""DOT rendering of field graphs: vertices on a circle, additive edges orange, multiplicative blue."""
from __future__ import annotations

import math

from graphviz import Digraph, Graph

from fieldgraph.ff_core import make_model
from fieldgraph.graph_build import CoverGraph, FieldGraph, build_graph

ADDITIVE_SHADES = ('#f28e2b', '#f5a623', '#e8590c', '#ffb55a', '#d9480f', '#ffc078')
MULTIPLICATIVE_SHADES = ('#1f77b4', '#4dabf7', '#1864ab', '#74c0fc', '#364fc7', '#a5d8ff')
RADIUS = 4.0


def edge_color(kind) -> str:
    shades = ADDITIVE_SHADES if kind.is_additive else MULTIPLICATIVE_SHADES
    return shades[kind.gen_index % len(shades)]


def _label(g: FieldGraph, v):
    if isinstance(g, CoverGraph):
        y, z = g.pair(v)
        return f'{y},{z}'
    return str(g.labels[v])


def to_dot(g: FieldGraph) -> str:
    """DOT text; node order is vertex order, edges are emitted one per multiplicity"""
    dot = Digraph(name=g.variant) if g.directed else Graph(name=g.variant)
    dot.attr(layout='neato', splines='true', label=f'{g.variant} graph of {g.model}')
    dot.attr('node', shape='circle', fontsize='10', width='0.3', fixedsize='true')
    for v in range(g.n):
        angle = 2 * math.pi * v / g.n
        pos = f'{RADIUS * math.cos(angle):.4f},{RADIUS * math.sin(angle):.4f}!'
        dot.node(str(v), label=_label(g, v), pos=pos)
    for u, v, kind in g.edges:
        dot.edge(str(u), str(v), color=edge_color(kind),
                 tooltip=f'{kind.edge_class.value} s{kind.gen_index}')
    return dot.source


def export_dot(p, f, variant='full') -> str:
    return to_dot(build_graph(make_model(p, f), variant))
