"""Laplacian spectra of field graphs, spectral gap bounds and the x^2 + 1 eigenfunctions."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
import scipy.linalg

from fieldgraph.errors import (AsymmetricMatrixError, DirectedGraphError,
                               DisconnectedGraphError,
                               VanishingEigenfunctionError, ValidationError)
from fieldgraph.ff_core import FieldModel, check_prime, is_normal, make_model
from fieldgraph.graph_algo import components, diameter
from fieldgraph.graph_build import FieldGraph, build_graph

logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-9
MEMBERSHIP_TOL = 1e-6
# LAPACK divide-and-conquer pays off from here on
DRIVER_THRESHOLD = 128


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    tol: float = EIGEN_TOL
    residual: float = 0.0

    @property
    def n(self):
        return len(self.eigenvalues)

    def __getitem__(self, index):
        return float(self.eigenvalues[index])

    def contains(self, value, tol=MEMBERSHIP_TOL) -> bool:
        return bool(np.any(np.abs(self.eigenvalues - value) <= tol))

    def multiplicity(self, value, tol=MEMBERSHIP_TOL) -> int:
        return int(np.count_nonzero(np.abs(self.eigenvalues - value) <= tol))

    def zero_multiplicity(self, tol=MEMBERSHIP_TOL) -> int:
        return self.multiplicity(0.0, tol)

    def to_list(self) -> List[float]:
        return [float(x) for x in self.eigenvalues]


def laplacian(g: FieldGraph) -> np.ndarray:
    """L = D - A with multiplicities; loops contribute to neither D nor A"""
    if g.directed:
        raise DirectedGraphError('the Laplacian is defined on the undirected graph')
    adjacency = g.weight_matrix('default').astype(float)
    np.fill_diagonal(adjacency, 0.0)
    return np.diag(adjacency.sum(axis=1)) - adjacency


def eigenvalues(matrix, tol=EIGEN_TOL) -> Spectrum:
    """All eigenvalues of a real symmetric matrix, ascending"""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise AsymmetricMatrixError(f'expected a square matrix, got shape {a.shape}')
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if not np.allclose(a, a.T, rtol=0.0, atol=tol * scale):
        raise AsymmetricMatrixError('matrix is not symmetric')
    if a.shape[0] >= DRIVER_THRESHOLD:
        w, v = scipy.linalg.eigh(a, check_finite=False, driver='evd')
    else:
        w, v = np.linalg.eigh(a)
    residual = float(np.linalg.norm(a @ v - v * w, axis=0).max(initial=0.0))
    norm = max(1.0, float(np.linalg.norm(a, 2))) if a.size else 1.0
    if residual > tol * norm * a.shape[0]:
        logger.warning('eigensolver residual %.3g above tolerance on %d x %d matrix',
                       residual, a.shape[0], a.shape[1])
    return Spectrum(np.sort(w), tol, residual)


def spectrum(g: FieldGraph, tol=EIGEN_TOL) -> Spectrum:
    return eigenvalues(laplacian(g), tol)


def lambda1(g: FieldGraph, tol=EIGEN_TOL) -> float:
    """Second-smallest Laplacian eigenvalue of a connected graph"""
    parts = components(g)
    if len(parts) > 1:
        raise DisconnectedGraphError(f'{g.variant} graph of {g.model} is disconnected', parts)
    if g.n < 2:
        raise ValidationError('lambda_1 needs at least two vertices')
    return spectrum(g, tol)[1]


def explicit_eigenvalue(p, l):
    """8 sin^2(pi l / p)"""
    return 8.0 * math.sin(math.pi * l / p) ** 2


def _check_three_mod_four(p):
    check_prime(p)
    if p % 4 != 3:
        raise ValidationError(f'x^2 + 1 family needs p = 3 mod 4, got {p}')


def eigenfunction(p, l) -> np.ndarray:
    """g(v + iw) = 4 cos(2 pi l v / p) cos(2 pi l w / p), indexed by code v + w p"""
    codes = np.arange(p * p)
    v, w = codes % p, codes // p
    return 4.0 * np.cos(2 * np.pi * l * v / p) * np.cos(2 * np.pi * l * w / p)


def verify_explicit_eigenfunction(p, l, tol=EIGEN_TOL) -> float:
    """Apply the Laplacian of X_{x^2+1} to g and check L g = 8 sin^2(pi l / p) g pointwise"""
    _check_three_mod_four(p)
    if not 1 <= l <= p - 1:
        raise ValidationError(f'l must lie in [1, {p - 1}], got {l}')
    g = eigenfunction(p, l)
    if np.allclose(g, 0.0, atol=tol):
        raise VanishingEigenfunctionError(f'eigenfunction vanishes for p={p}, l={l}')
    value = explicit_eigenvalue(p, l)
    lg = laplacian(build_graph(make_model(p, 'x^2+1'))) @ g
    error = float(np.abs(lg - value * g).max())
    if error > tol:
        raise ValidationError(f'L g != {value:.12g} g for p={p}, l={l}: max error {error:.3g}')
    return value


@dataclass(frozen=True)
class LowerBoundRecord:
    """lambda_1 against the general, diameter-based and normal-case lower bounds"""

    p: int
    k: int
    lambda1: float
    diameter: int
    normal: bool
    bounds: dict = field(default_factory=dict)

    @property
    def violations(self):
        return [name for name, bound in self.bounds.items() if self.lambda1 < bound - MEMBERSHIP_TOL]

    @property
    def holds(self):
        return not self.violations


def lower_bounds(p, k, d, normal) -> dict:
    q1 = p ** k - 1
    bounds = {
        'general': 1.0 / (p ** (k + 1) * (2 * k + 1)),
        'via_diameter_bound': 1.0 / (p * (2 * k + 1) * q1),
        'via_diameter': 2.0 / (d * q1) if d else 0.0,
    }
    if normal:
        bounds['normal'] = 4.0 * math.sin(math.pi / p) ** 2
    return bounds


def check_lower_bounds(model: FieldModel, tol=EIGEN_TOL) -> LowerBoundRecord:
    g = build_graph(model)
    if model.order < 2:
        raise ValidationError('lower bounds need at least two vertices')
    value = lambda1(g, tol)
    d = diameter(g)
    normal = is_normal(model)
    record = LowerBoundRecord(model.p, model.k, value, d, normal, lower_bounds(model.p, model.k, d, normal))
    if not record.holds:
        logger.error('lambda_1 = %.12g of %s violates %s', value, model, record.violations)
    return record


@dataclass(frozen=True)
class ExpanderRow:
    p: int
    lambda1: float
    explicit: float


@dataclass(frozen=True)
class ExpanderReport:
    rows: tuple

    @property
    def nonincreasing(self):
        values = [row.lambda1 for row in self.rows]
        return all(b <= a + MEMBERSHIP_TOL for a, b in zip(values, values[1:]))

    @property
    def dominated(self):
        """Every lambda_1 at most the explicit eigenvalue 8 sin^2(pi / p)"""
        return all(row.lambda1 <= row.explicit + MEMBERSHIP_TOL for row in self.rows)


def expander_report(primes: Sequence[int], tol=EIGEN_TOL) -> ExpanderReport:
    """lambda_1 of X_{x^2+1}/F_p next to 8 sin^2(pi / p), primes in ascending order"""
    rows = []
    for p in sorted(primes):
        _check_three_mod_four(p)
        value = lambda1(build_graph(make_model(p, 'x^2+1')), tol)
        rows.append(ExpanderRow(p, value, explicit_eigenvalue(p, 1)))
        logger.info('p=%d lambda_1=%.12g explicit=%.12g', p, value, rows[-1].explicit)
    return ExpanderReport(tuple(rows))


def torus_check(model: FieldModel, tol=MEMBERSHIP_TOL) -> bool:
    """The additive subgraph of a normal model is a discrete torus; 4 sin^2(pi / p) is in its spectrum"""
    if not is_normal(model):
        raise ValidationError(f'{model} is not normal')
    return spectrum(build_graph(model, 'additive')).contains(4.0 * math.sin(math.pi / model.p) ** 2, tol)


def spectrum_csv(spec: Spectrum) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(['index', 'eigenvalue'])
    for i, value in enumerate(spec.eigenvalues):
        writer.writerow([i, f'{value:.12g}'])
    return out.getvalue()
