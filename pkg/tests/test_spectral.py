import math
import os
import unittest

import numpy as np

from fieldgraph.errors import (AsymmetricMatrixError, DirectedGraphError,
                               DisconnectedGraphError, ValidationError)
from fieldgraph.ff_core import FieldModel, enumerate_irreducibles, make_model
from fieldgraph.graph_build import build_digraph, build_graph, build_subgraph
from fieldgraph.spectral import (check_lower_bounds, eigenvalues,
                                 expander_report, explicit_eigenvalue,
                                 lambda1, laplacian, spectrum, spectrum_csv,
                                 torus_check, verify_explicit_eigenfunction)

SLOW = os.environ.get('FIELDGRAPH_SLOW') == '1'


class LaplacianTestCase(unittest.TestCase):
    """Test cases for the Laplacian matrix"""

    def test_x2_plus_1_entries(self):
        """Test diagonal 4 at zero, 8 elsewhere, and -2 toward y + x"""
        lap = laplacian(build_graph(make_model(3, 'x^2+1')))
        self.assertEqual(lap[0, 0], 4)
        self.assertTrue(np.all(np.diag(lap)[1:] == 8))
        self.assertEqual(lap[1, 4], -2)
        self.assertTrue(np.allclose(lap.sum(axis=1), 0))
        self.assertTrue(np.array_equal(lap, lap.T))

    def test_loops_ignored(self):
        """Test that loops change neither degree nor off-diagonal entries"""
        g = build_graph(make_model(3, 'x+2'))
        lap = laplacian(g)
        self.assertTrue(np.allclose(lap.sum(axis=1), 0))
        # two additive edges per vertex, loops dropped
        self.assertTrue(np.all(np.diag(lap) == 2))

    def test_single_vertex(self):
        """Test the 1x1 zero Laplacian of the units of F_2"""
        g = build_subgraph(make_model(2, 'x+1'), 'multiplicative')
        self.assertEqual(laplacian(g).shape, (1, 1))
        self.assertEqual(laplacian(g)[0, 0], 0)

    def test_directed_rejected(self):
        """Test that digraphs have no Laplacian here"""
        with self.assertRaises(DirectedGraphError):
            laplacian(build_digraph(make_model(3, 'x^2+1')))


class EigensolverTestCase(unittest.TestCase):
    """Test cases for the dense symmetric eigensolver"""

    def test_complete_graph(self):
        """Test K_4 -> 0, 4, 4, 4"""
        lap = 4 * np.eye(4) - np.ones((4, 4))
        self.assertTrue(np.allclose(eigenvalues(lap).eigenvalues, [0, 4, 4, 4], atol=1e-9))

    def test_cycle(self):
        """Test the circulant spectrum 2 - 2cos(2 pi l / p)"""
        p = 11
        lap = 2 * np.eye(p) - np.roll(np.eye(p), 1, axis=1) - np.roll(np.eye(p), -1, axis=1)
        expected = sorted(2 - 2 * math.cos(2 * math.pi * l / p) for l in range(p))
        result = eigenvalues(lap)
        self.assertTrue(np.allclose(result.eigenvalues, expected, atol=1e-9))
        self.assertLess(result.residual, 1e-9)

    def test_large_matrix_uses_same_contract(self):
        """Test a cycle above the LAPACK driver threshold"""
        p = 150
        lap = 2 * np.eye(p) - np.roll(np.eye(p), 1, axis=1) - np.roll(np.eye(p), -1, axis=1)
        result = eigenvalues(lap)
        self.assertAlmostEqual(result[0], 0.0, places=9)
        self.assertAlmostEqual(float(result.eigenvalues.sum()), 2.0 * p, places=6)

    def test_asymmetric_rejected(self):
        """Test that asymmetric input raises"""
        with self.assertRaises(AsymmetricMatrixError):
            eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with self.assertRaises(AsymmetricMatrixError):
            eigenvalues(np.zeros((2, 3)))

    def test_spectrum_invariants(self):
        """Test zero eigenvalue, trace and nonnegativity on a field graph"""
        g = build_graph(make_model(5, 'x^2+2'))
        lap = laplacian(g)
        spec = spectrum(g)
        self.assertAlmostEqual(spec[0], 0.0, places=8)
        self.assertAlmostEqual(float(spec.eigenvalues.sum()), float(np.trace(lap)), places=6)
        self.assertTrue(np.all(spec.eigenvalues >= -1e-9))
        self.assertEqual(spec.zero_multiplicity(), 1)

    def test_zero_multiplicity_counts_components(self):
        """Test two zero eigenvalues on the disconnected additive subgraph"""
        spec = spectrum(build_subgraph(make_model(2, 'x^3+x+1'), 'additive'))
        self.assertEqual(spec.zero_multiplicity(), 2)


class EigenfunctionTestCase(unittest.TestCase):
    """Test cases for the explicit eigenfunctions of x^2 + 1"""

    def test_p3(self):
        """Test the eigenvalue 6 = 8 sin^2(pi/3)"""
        self.assertAlmostEqual(verify_explicit_eigenfunction(3, 1), 6.0, places=12)
        self.assertTrue(spectrum(build_graph(make_model(3, 'x^2+1'))).contains(6.0))

    def test_p7(self):
        """Test 8 sin^2(pi/7) and the l <-> p - l symmetry"""
        self.assertAlmostEqual(verify_explicit_eigenfunction(7, 1), 1.5060, places=4)
        self.assertAlmostEqual(verify_explicit_eigenfunction(7, 3), verify_explicit_eigenfunction(7, 4), places=12)

    def test_every_l_in_spectrum(self):
        """Test that 8 sin^2(pi l / p) is an eigenvalue for every l"""
        for p in (3, 7, 11):
            spec = spectrum(build_graph(make_model(p, 'x^2+1')))
            for l in range(1, p):
                self.assertAlmostEqual(verify_explicit_eigenfunction(p, l), explicit_eigenvalue(p, l))
                self.assertTrue(spec.contains(explicit_eigenvalue(p, l), 1e-6), msg=f'p={p} l={l}')

    def test_bad_parameters(self):
        """Test that p must be 3 mod 4 and l in range"""
        with self.assertRaises(ValidationError):
            verify_explicit_eigenfunction(5, 1)
        with self.assertRaises(ValidationError):
            verify_explicit_eigenfunction(7, 7)

    @unittest.skipUnless(SLOW, 'set FIELDGRAPH_SLOW=1 for p = 19, 23')
    def test_large_primes(self):
        """Test the identity and spectrum membership for p = 19 and 23"""
        for p in (19, 23):
            spec = spectrum(build_graph(make_model(p, 'x^2+1')))
            for l in range(1, p):
                self.assertTrue(spec.contains(verify_explicit_eigenfunction(p, l), 1e-6))


class GapTestCase(unittest.TestCase):
    """Test cases for lambda_1, its bounds and the expander verdict"""

    def test_lambda1_upper_bounded_by_explicit(self):
        """Test lambda_1 <= 8 sin^2(pi / p) and lambda_1 > 0"""
        for p in (3, 7, 11):
            value = lambda1(build_graph(make_model(p, 'x^2+1')))
            self.assertGreater(value, 0)
            self.assertLessEqual(value, explicit_eigenvalue(p, 1) + 1e-9)

    def test_lambda1_needs_connectivity(self):
        """Test that a disconnected graph has no spectral gap here"""
        with self.assertRaises(DisconnectedGraphError):
            lambda1(build_subgraph(make_model(2, 'x^3+x+1'), 'additive'))

    def test_lower_bounds_small_fields(self):
        """Test every lower bound for all models with p^k <= 49"""
        for p, k in ((2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2)):
            for f in enumerate_irreducibles(p, k):
                record = check_lower_bounds(FieldModel(p, f))
                self.assertTrue(record.holds, msg=f'{p} {f}: {record.violations}')
                self.assertEqual('normal' in record.bounds, record.normal)

    @unittest.skipUnless(SLOW, 'set FIELDGRAPH_SLOW=1 for p^k <= 625')
    def test_lower_bounds_all_models(self):
        """Test every lower bound for all models with 2 <= p^k <= 625"""
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
            k = 1
            while p ** k <= 625:
                for f in enumerate_irreducibles(p, k):
                    if f.coeffs[0] == 0:
                        continue
                    self.assertTrue(check_lower_bounds(FieldModel(p, f)).holds, msg=f'{p} {f}')
                k += 1

    def test_expander_report(self):
        """Test that lambda_1 decreases along the x^2 + 1 family"""
        result = expander_report([7, 3, 11])
        self.assertEqual([row.p for row in result.rows], [3, 7, 11])
        self.assertAlmostEqual(result.rows[0].explicit, 6.0)
        self.assertTrue(result.nonincreasing)
        self.assertTrue(result.dominated)

    def test_expander_rejects_primes(self):
        """Test that the family needs p = 3 mod 4"""
        with self.assertRaises(ValidationError):
            expander_report([3, 5])

    def test_torus(self):
        """Test 4 sin^2(pi / p) in the additive spectrum of normal models"""
        self.assertTrue(torus_check(make_model(3, 'x^2+x+2')))
        self.assertTrue(torus_check(make_model(2, 'x^3+x^2+1')))
        with self.assertRaises(ValidationError):
            torus_check(make_model(2, 'x^3+x+1'))


class SpectrumCsvTestCase(unittest.TestCase):
    """Test cases for the spectrum CSV"""

    def test_layout(self):
        """Test header and 12 significant digits"""
        text = spectrum_csv(eigenvalues(4 * np.eye(4) - np.ones((4, 4))))
        lines = text.splitlines()
        self.assertEqual(lines[0], 'index,eigenvalue')
        self.assertEqual(len(lines), 5)
        self.assertEqual(lines[-1], '3,4')
        index, value = lines[1].split(',')
        self.assertEqual(index, '0')
        self.assertLess(abs(float(value)), 1e-9)


if __name__ == '__main__':
    unittest.main()
