import itertools
import os
import random
import unittest

import sympy

from fieldgraph.errors import (MixedModelError, PolynomialSyntaxError,
                               ReducibleModulusError, ValidationError,
                               ZeroInversionError)
from fieldgraph.ff_core import (FieldModel, Poly, elem_arith, element_order,
                                enumerate_irreducibles, format_poly,
                                is_irreducible, is_irreducible_trial,
                                is_normal, is_primitive, make_model,
                                necklace_count, parse_poly, reciprocal,
                                reciprocal_map)


SLOW = os.environ.get('FIELDGRAPH_SLOW') == '1'

# number of monic irreducible polynomials of degree 1..5
NECKLACES = {
    2: (2, 1, 2, 3, 6),
    3: (3, 3, 8, 18, 48),
    5: (5, 10, 40, 150, 624),
    7: (7, 21, 112, 588, 3360),
}


def monic_polys(p, degree):
    for tail in itertools.product(range(p), repeat=degree):
        yield Poly(p, tuple(reversed(tail)) + (1,))


def sympy_irreducible(f: Poly):
    x = sympy.symbols('x')
    return sympy.Poly(list(reversed(f.coeffs)), x, modulus=f.p).is_irreducible


class PolynomialParsingTestCase(unittest.TestCase):
    """Test cases for polynomial text input and output"""

    def test_parse_standard_form(self):
        """Test parsing of the usual written form"""
        self.assertEqual(parse_poly('x^2+x+2', 3), Poly(3, (2, 1, 1)))
        self.assertEqual(parse_poly('x^4 + 2', 5), Poly(5, (2, 0, 0, 0, 1)))

    def test_coefficients_reduced_mod_p(self):
        """Test that coefficients are reduced rather than rejected"""
        self.assertEqual(parse_poly('3*x^2 + 5x + 7', 5), Poly(5, (2, 0, 3)))

    def test_coefficient_list(self):
        """Test the comma-separated form, constant term first"""
        self.assertEqual(parse_poly('2,1,1', 3), parse_poly('x^2+x+2', 3))

    def test_malformed_input(self):
        """Test that malformed text raises PolynomialSyntaxError"""
        for text in ('', 'x^^2', 'y+1', 'x^2+', '2*', 'x-1'):
            with self.assertRaises(PolynomialSyntaxError, msg=text):
                parse_poly(text, 3)

    def test_whitespace_inside_number(self):
        """Test that digits split by spaces are not merged into one coefficient"""
        for text in ('x^2 + 1 2', 'x^1 0 + 1', '1 1*x + 2'):
            with self.assertRaises(PolynomialSyntaxError, msg=text):
                parse_poly(text, 3)
        self.assertEqual(parse_poly('2 x^2 + 1', 3), Poly(3, (1, 0, 2)))

    def test_syntax_error_is_value_error(self):
        """Test that validation errors can be caught as ValueError"""
        with self.assertRaises(ValueError):
            parse_poly('x^', 3)

    def test_format_poly(self):
        """Test the canonical print form"""
        self.assertEqual(format_poly(parse_poly('x^4+2x^2+2', 3)), 'x^4 + 2*x^2 + 2')
        self.assertEqual(format_poly(parse_poly('x^2+1', 7)), 'x^2 + 1')
        self.assertEqual(format_poly(parse_poly('x', 2)), 'x')

    def test_format_parse_agree(self):
        """Test that printed polynomials parse back to themselves"""
        for f in enumerate_irreducibles(3, 3):
            self.assertEqual(parse_poly(format_poly(f), 3), f)

    def test_non_prime_rejected(self):
        """Test that a composite characteristic is rejected"""
        with self.assertRaises(ValidationError):
            parse_poly('x+1', 4)


class IrreducibilityTestCase(unittest.TestCase):
    """Test cases for irreducibility and enumeration"""

    def test_against_trial_division_and_sympy(self):
        """Test the fast test against two independent oracles"""
        for p, degree in ((2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)):
            for tail in itertools.product(range(p), repeat=degree):
                f = Poly(p, tuple(reversed(tail)) + (1,))
                expected = is_irreducible_trial(f)
                self.assertEqual(is_irreducible(f), expected, msg=str(f))
                self.assertEqual(sympy_irreducible(f), expected, msg=str(f))

    def test_against_trial_division_up_to_degree_six(self):
        """Test the fast test against trial division for every monic polynomial"""
        cases = [(2, d) for d in range(1, 7)] + [(3, d) for d in range(1, 5)] + [(5, 3), (7, 3)]
        if SLOW:
            cases += [(3, 5), (3, 6), (5, 4), (5, 5), (7, 4)]
        for p, degree in cases:
            with self.subTest(p=p, degree=degree):
                for f in monic_polys(p, degree):
                    self.assertEqual(is_irreducible(f), is_irreducible_trial(f), msg=str(f))

    def test_necklace_table(self):
        """Test counts and the identity sum_{d | k} d N(p, d) = p^k for p <= 7, k <= 5"""
        for p, counts in NECKLACES.items():
            for k in range(1, 6):
                with self.subTest(p=p, k=k):
                    self.assertEqual(necklace_count(p, k), counts[k - 1])
                    total = sum(d * necklace_count(p, d) for d in range(1, k + 1) if k % d == 0)
                    self.assertEqual(total, p ** k)

    def test_enumeration_matches_table(self):
        """Test enumeration against the counts, the largest cases only with FIELDGRAPH_SLOW=1"""
        for p, counts in NECKLACES.items():
            for k in range(1, 6):
                if p ** k > 625 and not SLOW:
                    continue
                with self.subTest(p=p, k=k):
                    polys = enumerate_irreducibles(p, k)
                    self.assertEqual(len(polys), counts[k - 1])
                    self.assertEqual(len(set(polys)), len(polys))
                    self.assertTrue(all(f.is_monic and f.degree == k for f in polys))

    def test_necklace_counts(self):
        """Test the number of monic irreducible polynomials"""
        self.assertEqual(necklace_count(2, 5), 6)
        self.assertEqual(necklace_count(5, 3), 40)
        self.assertEqual(necklace_count(5, 4), 150)
        self.assertEqual(necklace_count(7, 2), 21)

    def test_enumeration_matches_count(self):
        """Test that enumeration yields exactly the counted polynomials"""
        for p, k in ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)):
            self.assertEqual(len(enumerate_irreducibles(p, k)), necklace_count(p, k))

    def test_enumeration_order(self):
        """Test lexicographic order on (a_{k-1}, ..., a_0)"""
        texts = [format_poly(f) for f in enumerate_irreducibles(3, 2)]
        self.assertEqual(texts, ['x^2 + 1', 'x^2 + x + 2', 'x^2 + 2*x + 2'])

    def test_reducible_modulus_rejected(self):
        """Test that models need an irreducible modulus"""
        with self.assertRaises(ReducibleModulusError):
            make_model(2, 'x^2+1')
        with self.assertRaises(ValidationError):
            make_model(3, '2x^2+1')


class FieldArithmeticTestCase(unittest.TestCase):
    """Test cases for arithmetic inside a model"""

    def setUp(self):
        self.model = make_model(3, 'x^2+1')

    def test_x_squared(self):
        """Test that x^2 = -1 in F_3[x]/(x^2+1)"""
        x = self.model.x
        self.assertEqual((x * x).code, 2)

    def test_inverses(self):
        """Test that every nonzero element has an inverse"""
        for a in list(self.model.elements())[1:]:
            self.assertEqual(a * a.inverse(), self.model.one)
            self.assertEqual(a ** -1, a.inverse())

    def test_zero_inversion(self):
        """Test that inverting zero raises"""
        with self.assertRaises(ZeroInversionError):
            self.model.zero.inverse()
        with self.assertRaises(ZeroDivisionError):
            element_order(self.model.zero)

    def test_frobenius_cycle(self):
        """Test that the k-th Frobenius power is the identity"""
        model = make_model(2, 'x^3+x+1')
        for a in model.elements():
            self.assertEqual(a.frobenius_power(3), a)
            self.assertEqual(a.frobenius_power(1), a ** 2)

    def test_elem_arith(self):
        """Test the operation dispatcher"""
        x = self.model.x
        self.assertEqual(elem_arith(x, x, 'add'), x * 2)
        self.assertEqual(elem_arith(x, op='pow', exponent=4), self.model.one)
        with self.assertRaises(ValidationError):
            elem_arith(x, x, 'div')

    def test_random_field_axioms(self):
        """Test ring and field laws on random elements of several models"""
        rng = random.Random(1729)
        for p, k in ((2, 5), (3, 3), (5, 2), (7, 2), (2, 8), (13, 1)):
            model = FieldModel(p, enumerate_irreducibles(p, k)[-1])
            for _ in range(150):
                a, b, c = (model.from_code(rng.randrange(model.order)) for _ in range(3))
                with self.subTest(model=str(model), a=a.code, b=b.code, c=c.code):
                    self.assertEqual(a + b, b + a)
                    self.assertEqual(a * b, b * a)
                    self.assertEqual((a + b) + c, a + (b + c))
                    self.assertEqual((a * b) * c, a * (b * c))
                    self.assertEqual(a * (b + c), a * b + a * c)
                    self.assertEqual(a + model.zero, a)
                    self.assertEqual(a * model.one, a)
                    self.assertEqual(a + (-a), model.zero)
                    self.assertEqual((a + b) ** p, a ** p + b ** p)
                    if not a.is_zero:
                        self.assertEqual(a * a.inverse(), model.one)
                        self.assertEqual(a ** (model.order - 1), model.one)

    def test_mixed_models(self):
        """Test that elements of different models do not combine"""
        other = make_model(3, 'x^2+x+2')
        with self.assertRaises(MixedModelError):
            self.model.x + other.x

    def test_codes_enumerate_field(self):
        """Test that codes are a bijection onto 0..q-1"""
        model = make_model(5, 'x^2+2')
        self.assertEqual(sorted(a.code for a in model.elements()), list(range(25)))


class FieldPropertiesTestCase(unittest.TestCase):
    """Test cases for primitive, normal and reciprocal"""

    def test_binary_cubics(self):
        """Test the flags of the two binary cubics"""
        f1 = make_model(2, 'x^3+x+1')
        f2 = make_model(2, 'x^3+x^2+1')
        self.assertTrue(is_primitive(f1))
        self.assertFalse(is_normal(f1))
        self.assertTrue(is_primitive(f2))
        self.assertTrue(is_normal(f2))

    def test_ternary_quadratics(self):
        """Test the flags of the ternary quadratics"""
        self.assertFalse(is_primitive(make_model(3, 'x^2+1')))
        self.assertFalse(is_normal(make_model(3, 'x^2+1')))
        self.assertTrue(is_primitive(make_model(3, 'x^2+x+2')))
        self.assertTrue(is_normal(make_model(3, 'x^2+x+2')))

    def test_element_order_divides(self):
        """Test that element orders divide q - 1"""
        model = make_model(5, 'x^2+2')
        for a in list(model.elements())[1:]:
            self.assertEqual(24 % element_order(a), 0)

    def test_reciprocal(self):
        """Test the monic reciprocal polynomial"""
        self.assertEqual(format_poly(reciprocal(parse_poly('x^2+x+2', 3))), 'x^2 + 2*x + 2')
        self.assertEqual(format_poly(reciprocal(parse_poly('x^4+x^2+2', 3))), 'x^4 + 2*x^2 + 2')
        self.assertEqual(format_poly(reciprocal(parse_poly('x^2+2', 5))), 'x^2 + 3')
        with self.assertRaises(ValidationError):
            reciprocal(parse_poly('x', 2))

    def test_reciprocal_properties(self):
        """Test that the reciprocal is an involution keeping irreducibility and primitivity"""
        for p, k in ((2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)):
            for f in enumerate_irreducibles(p, k):
                if f.coeffs[0] == 0:
                    continue
                g = reciprocal(f)
                with self.subTest(p=p, f=str(f)):
                    self.assertEqual(g.degree, k)
                    self.assertTrue(g.is_monic)
                    self.assertTrue(is_irreducible(g))
                    self.assertEqual(reciprocal(g), f)
                    self.assertEqual(is_primitive(FieldModel(p, f)), is_primitive(FieldModel(p, g)))

    def test_reciprocal_map_is_field_isomorphism(self):
        """Test that a(x) -> a(t^-1) respects sums and products"""
        mf, mg = make_model(3, 'x^2+x+2'), make_model(3, 'x^2+2*x+2')
        sigma = reciprocal_map(mf, mg)
        self.assertEqual(sorted(sigma), list(range(9)))
        elems_f = list(mf.elements())
        elems_g = list(mg.elements())
        for a in elems_f:
            for b in elems_f:
                self.assertEqual(sigma[(a * b).code], (elems_g[sigma[a.code]] * elems_g[sigma[b.code]]).code)
                self.assertEqual(sigma[(a + b).code], (elems_g[sigma[a.code]] + elems_g[sigma[b.code]]).code)

    def test_reciprocal_map_needs_reciprocal(self):
        """Test that unrelated models are rejected"""
        with self.assertRaises(ValidationError):
            reciprocal_map(make_model(3, 'x^2+1'), make_model(3, 'x^2+x+2'))


if __name__ == '__main__':
    unittest.main()
