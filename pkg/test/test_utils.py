import math
from fractions import Fraction
from unittest import TestCase

from hypothesis import given
from hypothesis import strategies as st

from cumubound import utils
from cumubound.errors import CumulantError, ParseError


class TestUtils(TestCase):
    def test_parse_rational(self):
        self.assertEqual(utils.parse_rational("3"), 3)
        self.assertEqual(utils.parse_rational(" -2/6 "), Fraction(-1, 3))
        self.assertEqual(utils.parse_rational("0.1"), Fraction(1, 10))
        self.assertEqual(utils.parse_rational("1e-3"), Fraction(1, 1000))

    def test_parse_errors_name_the_token(self):
        for token in ("abc", "1/0", "", "nan", "inf", "1//2"):
            with self.assertRaises(ParseError) as cm:
                utils.parse_rational(token)
            self.assertEqual(cm.exception.token, token)
            self.assertIsInstance(cm.exception, CumulantError)

    def test_parse_rational_list(self):
        self.assertEqual(utils.parse_rational_list("0,1,0,3"), [0, 1, 0, 3])
        with self.assertRaises(ParseError) as cm:
            utils.parse_rational_list("1,x,3")
        self.assertIn("'x'", str(cm.exception))
        with self.assertRaises(ParseError):
            utils.parse_rational_list("")

    def test_parse_law_spec(self):
        self.assertEqual(utils.parse_law_spec("rademacher"), ("rademacher", {}))
        self.assertEqual(utils.parse_law_spec("Gaussian:sigma=1/2"), ("gaussian", {"sigma": Fraction(1, 2)}))
        self.assertEqual(
            utils.parse_law_spec("poisson:lambda=2, extra=0.5"), ("poisson", {"lambda": 2, "extra": Fraction(1, 2)})
        )
        with self.assertRaises(ParseError):
            utils.parse_law_spec(":sigma=1")
        with self.assertRaises(ParseError):
            utils.parse_law_spec("gaussian:sigma")

    def test_to_float(self):
        self.assertEqual(utils.to_float(Fraction(1, 4)), 0.25)
        self.assertEqual(utils.to_float(10**400), math.inf)
        self.assertEqual(utils.to_float(Fraction(-(10**400), 3)), -math.inf)

    def test_ratio(self):
        self.assertEqual(utils.ratio(0, 0), 1.0)
        self.assertEqual(utils.ratio(1, 0), math.inf)
        self.assertEqual(utils.ratio(Fraction(3), Fraction(4)), 0.75)
        self.assertAlmostEqual(utils.ratio(1.5, 3), 0.5)

    def test_comparisons(self):
        self.assertTrue(utils.leq(Fraction(1, 3), Fraction(1, 3), 0))
        self.assertFalse(utils.lt(Fraction(1, 3), Fraction(1, 3), 0))
        self.assertTrue(utils.leq(1.0 + 1e-12, 1.0, 1e-9))
        self.assertFalse(utils.lt(1.0 - 1e-12, 1.0, 1e-9))
        self.assertTrue(utils.lt(0.5, 1.0, 1e-9))

    @given(st.fractions())
    def test_parse_reads_back_fractions(self, value):
        self.assertEqual(utils.parse_rational(str(value)), value)
