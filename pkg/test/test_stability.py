import random
import unittest
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st
from testfixtures import compare

from dstab.linalg import IndexSet, Matrix, minor_table
from dstab.stability import (CharPoly, EigenvalueError, char_poly, char_poly_from_minors, classify_p,
                             hurwitz_stable, hurwitz_stable_from_minors, necessary_dstability,
                             spectral_abscissa, spectral_abscissa_mp)

EXAMPLE1 = Matrix(((-6, -5, 1), (-1, -2, -5), (-5, 3, -1)))
ROTATION = Matrix(((0, 1), (-1, 0)))


def example2(q):
    return Matrix(((-1, 0, q), (-1, -1, 0), (-1, -1, -1)))


def example3(p, q):
    return Matrix(((-1, 0, q, p), (-1, -1, 0, 0), (-1, -1, -1, 0), (-1, -1, -1, -1)))


def random_matrix(rng, n):
    return Matrix(tuple(tuple(rng.randint(-6, 4) for _ in range(n)) for _ in range(n)))


class TestCharPoly(unittest.TestCase):
    """ Characteristic polynomials """

    def test_one_by_one(self):
        compare(char_poly(Matrix(((-1,),))).coefficients, (-1, -1))

    def test_example1(self):
        poly = char_poly(EXAMPLE1)
        self.assertEqual(poly.degree, 3)
        compare(poly.coefficients, (-235, -35, -9, -1))
        compare(poly.monic(), (1, 9, 35, 235))
        self.assertEqual(poly(0), -235)

    def test_evaluate(self):
        poly = CharPoly((Fraction(2), Fraction(-3), Fraction(1)))
        self.assertEqual(poly(1), 0)
        self.assertEqual(poly(Fraction(1, 2)), Fraction(3, 4))

    def test_from_minors(self):
        """ Signed minor sums give the same polynomial """
        rng = random.Random(5)
        for _ in range(20):
            m = random_matrix(rng, rng.randint(1, 5))
            self.assertEqual(char_poly_from_minors(minor_table(m)), char_poly(m))

    def test_from_minors_within(self):
        table = minor_table(EXAMPLE1)
        within = IndexSet.of(3, (1, 3))
        self.assertEqual(char_poly_from_minors(table, within),
                         char_poly(EXAMPLE1.principal(within)))


class TestHurwitz(unittest.TestCase):
    """ Exact Hurwitz stability """

    def test_example1(self):
        report = hurwitz_stable(EXAMPLE1)
        self.assertTrue(report)
        self.assertFalse(report.boundary)
        compare(report.determinants, (9, 80, 18800))

    def test_example2(self):
        self.assertTrue(hurwitz_stable(example2(50)))
        self.assertFalse(hurwitz_stable(example2(-3)))
        self.assertTrue(hurwitz_stable(example2(Fraction(-8, 3) + Fraction(1, 100))))
        self.assertFalse(hurwitz_stable(example2(Fraction(-8, 3) - Fraction(1, 100))))
        edge = hurwitz_stable(example2(Fraction(-8, 3)))
        self.assertFalse(edge)
        self.assertTrue(edge.boundary)

    def test_rotation(self):
        """ Imaginary eigenvalues are on the boundary """
        report = hurwitz_stable(ROTATION)
        self.assertFalse(report)
        self.assertTrue(report.boundary)

    def test_example3_region(self):
        """ Stable iff q > -4 and p > -(q + 8)(3q + 8) / (4(q + 4)) """
        rng = random.Random(6)
        points = [(Fraction(rng.randint(-40, 40), 8), Fraction(rng.randint(-40, 40), 8)) for _ in range(20)]
        points += [(Fraction(0), Fraction(0)), (Fraction(-4), Fraction(1)), (Fraction(2), Fraction(1))]
        for p, q in points:
            expected = q > -4 and p > -(q + 8) * (3 * q + 8) / (4 * (q + 4))
            self.assertEqual(bool(hurwitz_stable(example3(p, q))), expected, (p, q))

    def test_from_minors(self):
        table = minor_table(EXAMPLE1)
        self.assertTrue(hurwitz_stable_from_minors(table))
        self.assertTrue(hurwitz_stable_from_minors(table, IndexSet.of(3, (1, 2))))

    def test_agrees_with_eigenvalues(self):
        """ Exact verdict matches the sign of the spectral abscissa away from zero """
        rng = random.Random(7)
        checked = 0
        for _ in range(80):
            m = random_matrix(rng, rng.randint(1, 6))
            abscissa = spectral_abscissa(m)
            if abs(abscissa) > 1e-6:
                self.assertEqual(bool(hurwitz_stable(m)), abscissa < 0)
                checked += 1
        self.assertGreater(checked, 40)


class TestPClasses(unittest.TestCase):
    """ P, P0 and P0+ membership """

    def test_identity(self):
        report = classify_p(Matrix.identity(3))
        self.assertTrue(report.is_P)
        self.assertTrue(report.is_P0_plus)
        self.assertIsNone(report.witness)
        self.assertIsNone(report.failing_order)

    def test_negated_example1(self):
        report = classify_p(EXAMPLE1.negated())
        self.assertTrue(report.is_P)
        compare(report.order_sums, (1, 9, 35, 235))

    def test_p0_not_p(self):
        report = classify_p(Matrix(((0, 0), (0, 1))))
        self.assertFalse(report.is_P)
        self.assertTrue(report.is_P0)
        self.assertFalse(report.is_P0_plus)
        self.assertEqual(report.witness, IndexSet.of(2, (1,)))
        self.assertIsNone(report.p0_witness)
        self.assertEqual(report.failing_order, 2)

    def test_not_p0(self):
        report = classify_p(Matrix(((-1, 4), (-2, 3))))
        self.assertFalse(report.is_P0)
        self.assertEqual(report.p0_witness, IndexSet.of(2, (1,)))

    def test_within(self):
        report = classify_p(Matrix.diagonal([1, -1, 1]), within=IndexSet.of(3, (1, 3)))
        self.assertTrue(report.is_P)


class TestNecessary(unittest.TestCase):
    """ -A in P0+ is necessary for D-stability """

    def test_passes(self):
        self.assertTrue(necessary_dstability(EXAMPLE1))
        self.assertTrue(necessary_dstability(example3(0, 0)))
        self.assertTrue(necessary_dstability(example2(-1)))

    def test_fails(self):
        result = necessary_dstability(Matrix(((1, -4), (2, -3))))
        self.assertFalse(result)
        self.assertEqual(result.report.p0_witness, IndexSet.of(2, (1,)))
        self.assertFalse(necessary_dstability(example2(Fraction(-3, 2))))

    def test_singular_corner(self):
        """ [[0, 0], [0, -1]]: -A is P0 but not P, and the order-2 sum vanishes """
        report = necessary_dstability(Matrix(((0, 0), (0, -1)))).report
        self.assertTrue(report.is_P0)
        self.assertFalse(report.is_P)
        self.assertEqual(report.witness, IndexSet.of(2, (1,)))
        self.assertFalse(report.is_P0_plus)

    def test_table_argument(self):
        """ The table of A is negated, not reused as is """
        table = minor_table(EXAMPLE1)
        self.assertEqual(necessary_dstability(EXAMPLE1, table).report,
                         necessary_dstability(EXAMPLE1).report)


class TestAbscissa(unittest.TestCase):
    """ Floating-point spectral abscissa """

    def test_values(self):
        self.assertAlmostEqual(spectral_abscissa(Matrix.diagonal([-1, -2])), -1.0)
        self.assertAlmostEqual(spectral_abscissa(ROTATION), 0.0, places=9)
        self.assertLess(spectral_abscissa(EXAMPLE1), 0)
        self.assertAlmostEqual(spectral_abscissa(np.array([[1.0, -4.0], [2.0, -3.0]])), -1.0)

    def test_mp(self):
        self.assertAlmostEqual(float(spectral_abscissa_mp(Matrix.diagonal([-1, -2]))), -1.0)
        self.assertAlmostEqual(float(spectral_abscissa_mp(np.array([[1.0, -4.0], [2.0, -3.0]]))), -1.0)

    def test_failure(self):
        with self.assertRaises(EigenvalueError):
            spectral_abscissa(np.array([[np.nan]]))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(-9, 9), min_size=1, max_size=5))
    def test_diagonal(self, values):
        self.assertAlmostEqual(spectral_abscissa(Matrix.diagonal(values)), max(values))
