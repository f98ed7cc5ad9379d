"""Isomorphism census of all models of a given (p, k), per-model reports and the theorem suite."""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional

from fieldgraph.canonical import (WeightedGraph, canonical_search,
                                  known_automorphisms, reciprocal_isomorphism)
from fieldgraph.errors import (FieldGraphError, LimitExceededError,
                               ValidationError)
from fieldgraph.ff_core import (FieldModel, Poly, check_prime,
                                enumerate_irreducibles, format_poly,
                                is_normal, is_primitive, make_model,
                                reciprocal)
from fieldgraph.graph_algo import (analyze, eulerian_circuit,
                                   field_property_equivalences, girth_witness,
                                   verify_circuit)
from fieldgraph.graph_build import (MODES, build_cover, build_digraph,
                                    build_graph, deck_transform,
                                    to_undirected, verify_covering)
from fieldgraph.spectral import check_lower_bounds

logger = logging.getLogger(__name__)

CENSUS_LIMIT = 700
COVER_LIMIT = 64
SPECTRAL_LIMIT = 625
CENSUS_VARIANTS = ('full', 'additive', 'multiplicative')

CSV_COLUMNS = ('p', 'k', 'polynomial', 'class_id', 'aut_order', 'primitive', 'normal', 'reciprocal_partner')


@dataclass(frozen=True)
class CensusRow:
    p: int
    k: int
    polynomial: str
    class_id: int
    aut_order: int
    primitive: bool
    normal: bool
    reciprocal_partner: Optional[str] = None
    reciprocal_isomorphic: Optional[bool] = None

    def to_dict(self):
        return asdict(self)


def _partner(f: Poly) -> Optional[Poly]:
    return reciprocal(f) if f.coeffs[0] else None


def analyse_polynomial(p, coeffs, mode='default', variant='full'):
    """Canonical form bytes and |Aut| of one model; module level so worker processes can run it"""
    model = FieldModel(p, Poly(p, tuple(coeffs)))
    result = canonical_search(WeightedGraph.from_field_graph(build_graph(model, variant), mode))
    logger.debug('%s: |Aut| = %d after %d nodes', model, result.group.order, result.nodes)
    return result.form.data, result.group.order


def _check_request(p, k, mode, variant, limit):
    check_prime(p)
    if k < 1:
        raise ValidationError(f'degree must be at least 1, got {k}')
    if mode not in MODES:
        raise ValidationError(f'unknown canonical mode {mode!r}')
    if variant not in CENSUS_VARIANTS:
        raise ValidationError(f'census variant must be one of {CENSUS_VARIANTS}, got {variant!r}')
    if p ** k > limit:
        raise LimitExceededError(f'p^k = {p ** k} exceeds the census limit {limit}')


def classify(p, k, mode='default', limit=CENSUS_LIMIT, cache=None, workers=1, variant='full') -> List[CensusRow]:
    """One row per irreducible monic polynomial, grouped by canonical form.

    cache, when given, provides load(p, k, polynomial, mode, variant) -> (form, order) or
    None and store(p, k, polynomial, mode, variant, form, order). Results are collected in
    polynomial order whatever the worker count.
    """
    _check_request(p, k, mode, variant, limit)
    polys = enumerate_irreducibles(p, k)
    texts = [format_poly(f) for f in polys]
    results = [cache.load(p, k, text, mode, variant) if cache is not None else None for text in texts]
    pending = [i for i, hit in enumerate(results) if hit is None]
    logger.info('census %d^%d (%s, %s): %d polynomials, %d cached',
                p, k, mode, variant, len(polys), len(polys) - len(pending))

    args = [(p, polys[i].coeffs, mode, variant) for i in pending]
    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            computed = pool.map(analyse_polynomial, *zip(*args))
            for i, value in zip(pending, computed):
                _collect(results, i, value, cache, p, k, texts[i], mode, variant)
    else:
        for i, arg in zip(pending, args):
            _collect(results, i, analyse_polynomial(*arg), cache, p, k, texts[i], mode, variant)

    class_of = {}
    rows = []
    for i, (f, text) in enumerate(zip(polys, texts)):
        form, order = results[i]
        class_id = class_of.setdefault(form, i)
        model = FieldModel(p, f)
        partner = _partner(f)
        rows.append(CensusRow(p, k, text, class_id, order, is_primitive(model), is_normal(model),
                              format_poly(partner) if partner is not None else None))
    return _mark_reciprocal_pairs(rows, mode, variant)


def _collect(results, i, value, cache, p, k, text, mode, variant):
    results[i] = value
    if cache is not None:
        cache.store(p, k, text, mode, variant, value[0], value[1])
    logger.info('%s: |Aut| = %d', text, value[1])


def _mark_reciprocal_pairs(rows, mode, variant):
    """Classes of size 2 made of a reciprocal pair: is the field isomorphism a graph isomorphism?"""
    if variant != 'full':
        return rows
    by_text = {row.polynomial: row for row in rows}
    marked = []
    for row in rows:
        partner = by_text.get(row.reciprocal_partner)
        explained = None
        if partner is not None and partner is not row and partner.class_id == row.class_id:
            sigma = reciprocal_isomorphism(make_model(row.p, row.polynomial),
                                           make_model(row.p, partner.polynomial), mode)
            explained = sigma is not None
        marked.append(CensusRow(**{**row.to_dict(), 'reciprocal_isomorphic': explained}))
    return marked


def classes(rows: List[CensusRow]) -> List[List[CensusRow]]:
    groups = {}
    for row in rows:
        groups.setdefault(row.class_id, []).append(row)
    return [groups[c] for c in sorted(groups)]


def census_findings(rows: List[CensusRow]) -> List[str]:
    """Notable departures from the observed pattern; reported, never raised"""
    findings = []
    for members in classes(rows):
        names = ', '.join(r.polynomial for r in members)
        if len(members) > 2:
            findings.append(f'class of size {len(members)}: {names}')
        if len(members) == 2 and members[0].reciprocal_partner != members[1].polynomial:
            findings.append(f'isomorphic pair is not a reciprocal pair: {names}')
        if len({r.aut_order for r in members}) > 1:
            findings.append(f'automorphism orders differ inside class: {names}')
        if len({r.primitive for r in members}) > 1:
            findings.append(f'primitive flag differs inside class: {names}')
        if len({r.normal for r in members}) > 1:
            findings.append(f'normal flag differs inside class: {names}')
    for message in findings:
        logger.warning(message)
    return findings


def render_csv(rows: List[CensusRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([row.p, row.k, row.polynomial, row.class_id, str(row.aut_order),
                         str(row.primitive).lower(), str(row.normal).lower(),
                         row.reciprocal_partner or ''])
    return out.getvalue()


def render_markdown(rows: List[CensusRow]) -> str:
    """One table per (p, k), one line per isomorphism class"""
    lines = []
    for (p, k) in sorted({(r.p, r.k) for r in rows}):
        lines += [f'## {p}^{k}', '', '| Polynomials | Order of Aut |', '| --- | ---: |']
        for members in classes([r for r in rows if (r.p, r.k) == (p, k)]):
            names = ', '.join(f'${r.polynomial}$' for r in members)
            lines.append(f'| {names} | {members[0].aut_order} |')
        lines.append('')
    return '\n'.join(lines)


@dataclass(frozen=True)
class ModelReport:
    p: int
    k: int
    polynomial: str
    connected: bool
    strongly_connected: bool
    diameter: int
    diameter_bound: int
    directed_diameter: int
    directed_diameter_bound: int
    girth: float
    eulerian: bool
    directed_eulerian: bool
    primitive: bool
    normal: bool
    aut_order: int
    reciprocal_partner: Optional[str]
    partner_isomorphic: Optional[bool]
    lambda1: Optional[float] = None
    lambda1_bounds: Optional[dict] = None
    cover_connected: Optional[bool] = None

    def to_dict(self):
        data = asdict(self)
        data['aut_order'] = str(self.aut_order)
        if self.girth == float('inf'):
            data['girth'] = None
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        width = max(len(key) for key in self.to_dict())
        out = []
        for key, value in self.to_dict().items():
            if isinstance(value, dict):
                value = ', '.join(f'{name} {bound:.6g}' for name, bound in value.items())
            elif isinstance(value, float):
                value = f'{value:.12g}'
            out.append(f'{key.ljust(width)}  {value}')
        return '\n'.join(out)


def report(p, f, mode='default', cover_limit=COVER_LIMIT, spectral_limit=SPECTRAL_LIMIT) -> ModelReport:
    """Every per-model result in one record; the spectral part only up to spectral_limit vertices"""
    model = make_model(p, f)
    graphs = analyze(model)
    g = WeightedGraph.from_field_graph(build_graph(model), mode)
    own = canonical_search(g)
    aut = own.group.order
    partner = _partner(model.f)
    partner_isomorphic = None
    if partner is not None:
        partner_model = FieldModel(p, partner)
        if partner_model == model:
            partner_isomorphic = True
        else:
            other = WeightedGraph.from_field_graph(build_graph(partner_model), mode)
            partner_isomorphic = canonical_search(other).form == own.form
    lam = bounds = None
    if 2 <= model.order <= spectral_limit:
        record = check_lower_bounds(model)
        lam, bounds = record.lambda1, record.bounds
    cover = None
    if model.order <= cover_limit:
        cover = field_property_equivalences(model, include_cover=True).cover_connected
    return ModelReport(
        p=p, k=model.k, polynomial=format_poly(model.f),
        connected=graphs.connected, strongly_connected=graphs.strongly_connected,
        diameter=graphs.diameter, diameter_bound=graphs.diameter_bound,
        directed_diameter=graphs.directed_diameter, directed_diameter_bound=graphs.directed_diameter_bound,
        girth=graphs.girth, eulerian=graphs.eulerian, directed_eulerian=graphs.directed_eulerian,
        primitive=is_primitive(model), normal=is_normal(model), aut_order=aut,
        reciprocal_partner=format_poly(partner) if partner is not None else None,
        partner_isomorphic=partner_isomorphic, lambda1=lam, lambda1_bounds=bounds,
        cover_connected=cover,
    )


def check_cover(model: FieldModel) -> List[str]:
    """Covering map and every deck transformation, on the directed cover"""
    failures = []
    cover = build_cover(model)
    if not verify_covering(cover, build_digraph(model)):
        failures.append(f'{model}: projection is not a covering map')
    edges = {(u, v, kind) for u, v, kind in cover.edges}
    for a in list(model.elements())[1:]:
        sigma = deck_transform(cover, a)
        if any((sigma[u], sigma[v], kind) not in edges for u, v, kind in cover.edges):
            failures.append(f'{model}: F_{a} is not a deck transformation')
    return failures


def _check_model(model: FieldModel, cover_limit, spectral_limit) -> List[str]:
    failures = []
    if model.x.is_zero:
        logger.info('skipping %s: x = 0 has no strongly connected graph', model)
        return failures
    name = str(model)
    graphs = analyze(model)
    if not (graphs.connected and graphs.strongly_connected):
        failures.append(f'{name}: not (strongly) connected')
    if not (graphs.eulerian and graphs.directed_eulerian):
        failures.append(f'{name}: not Eulerian')
    if not graphs.within_bounds:
        failures.append(f'{name}: diameter {graphs.diameter}/{graphs.directed_diameter} outside bounds')
    digraph = build_digraph(model)
    for g in (digraph, to_undirected(digraph)):
        if not verify_circuit(g, eulerian_circuit(g)):
            failures.append(f'{name}: Eulerian circuit failed verification')
    if model.k >= 2:
        if graphs.girth != 2:
            failures.append(f'{name}: girth {graphs.girth} != 2')
        girth_witness(model)
    include_cover = model.order <= cover_limit
    if not field_property_equivalences(model, include_cover).consistent:
        failures.append(f'{name}: field/graph equivalences violated')
    if include_cover:
        failures += check_cover(model)
    if model.order <= spectral_limit:
        known_automorphisms(model)
        order = canonical_search(WeightedGraph.from_field_graph(build_graph(model))).group.order
        divisor = 2 * model.k if model.p % 2 else model.k
        if order % divisor:
            failures.append(f'{name}: |Aut| = {order} not divisible by {divisor}')
        if model.order >= 2:
            bounds = check_lower_bounds(model)
            if not bounds.holds:
                failures.append(f'{name}: lambda_1 bounds {bounds.violations} violated')
    return failures


def verify_theorems(p, k, cover_limit=COVER_LIMIT, spectral_limit=SPECTRAL_LIMIT) -> List[str]:
    """Structural theorem suite over every model of (p, k); returns the failures"""
    failures = []
    for f in enumerate_irreducibles(p, k):
        model = FieldModel(p, f)
        try:
            failures += _check_model(model, cover_limit, spectral_limit)
        except (FieldGraphError, AssertionError) as exc:
            failures.append(f'{model}: {exc}')
    logger.info('theorem suite %d^%d: %d failures', p, k, len(failures))
    return failures
