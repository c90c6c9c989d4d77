import io
import json
import math
from contextlib import redirect_stderr, redirect_stdout
from unittest import TestCase
from unittest.mock import MagicMock, patch

from cumubound.cli.output import OutputRecord, load_schema, render
from cumubound.main import main


def run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    with redirect_stdout(stdout), redirect_stderr(stderr):
        try:
            code = main(list(argv))
        except SystemExit as e:
            code = e.code
    return code, stdout.getvalue(), stderr.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--format", "json")
    return code, json.loads(out) if out else None, err


def assert_matches_schema(test, document):
    schema = load_schema()
    test.assertEqual(set(document), set(schema["required"]))
    test.assertEqual(document["schema_version"], schema["properties"]["schema_version"]["const"])
    test.assertIn(document["command"], schema["properties"]["command"]["enum"])
    test.assertIsInstance(document["rows"], list)
    for row in document["rows"]:
        test.assertIsInstance(row, dict)
        for value in row.values():
            test.assertTrue(value is None or isinstance(value, (str, int, float, bool)), msg=repr(value))


class TestCoeffs(TestCase):
    def test_all_three_csv(self):
        code, out, _ = run("coeffs", "--format", "csv")
        self.assertEqual(code, 0)
        self.assertEqual(
            out.splitlines(),
            [
                "class,2,3,4,5,6,7,8,9",
                "raw,2,6,26,150,1082,9366,94586,1091670",
                "cen,1,1,4,11,56,267,1730,11643",
                "sym,1,0,4,0,46,0,1114,0",
            ],
        )

    def test_single_class_json(self):
        code, document, _ = run_json("coeffs", "--class", "sym", "--max-n", "3")
        self.assertEqual(code, 0)
        self.assertEqual(document["rows"], [{"n": 2, "coefficient": 1}, {"n": 3, "coefficient": 0}])
        assert_matches_schema(self, document)

    def test_provenances_agree(self):
        outputs = {
            provenance: run("coeffs", "--format", "csv", "--provenance", provenance)[1]
            for provenance in ("recurrence", "egf", "brute-force")
        }
        self.assertEqual(len(set(outputs.values())), 1)

    def test_asymptotic_columns(self):
        code, document, _ = run_json("coeffs", "--class", "cen", "--max-n", "40", "--asymptotic")
        self.assertEqual(code, 0)
        last = document["rows"][-1]
        self.assertEqual(last["n"], 40)
        self.assertLess(abs(last["ratio"] - 1), 0.05)

    def test_scientific_past_float_range(self):
        code, document, _ = run_json("coeffs", "--class", "raw", "--max-n", "170", "--asymptotic", "--scientific")
        self.assertEqual(code, 0)
        self.assertIsInstance(document["rows"][-1]["asymptotic"], str)
        self.assertIn("e+", document["rows"][-1]["asymptotic"])

    def test_enumeration_limit(self):
        code, _, err = run("coeffs", "--provenance", "brute-force", "--max-n", "13")
        self.assertEqual(code, 2)
        self.assertIn("limit is 12", err)

    def test_table_has_no_escape_codes(self):
        code, out, _ = run("coeffs")
        self.assertEqual(code, 0)
        self.assertNotIn("\x1b", out)
        self.assertTrue(out.startswith("class"))


class TestTransform(TestCase):
    def test_gaussian_moments(self):
        code, document, _ = run_json("transform", "--moments", "0,1,0,3")
        self.assertEqual(code, 0)
        self.assertEqual([row["cumulant"] for row in document["rows"]], [0, 1, 0, 0])
        assert_matches_schema(self, document)

    def test_rademacher_cumulants(self):
        code, document, _ = run_json("transform", "--cumulants", "0,1,0,-2")
        self.assertEqual(code, 0)
        self.assertEqual([row["moment"] for row in document["rows"]], [0, 1, 0, 1])

    def test_fractions_stay_exact(self):
        code, document, _ = run_json("transform", "--moments", "1/2,1/2")
        self.assertEqual(code, 0)
        self.assertEqual(document["rows"][1]["cumulant"], "1/4")

    def test_parse_error_names_token(self):
        code, out, err = run("transform", "--moments", "0,1,abc")
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("'abc'", err)

    def test_direction_conflict(self):
        code, _, err = run("transform", "--moments", "0,1", "--direction", "to-moments")
        self.assertEqual(code, 2)
        self.assertIn("--cumulants", err)

    def test_usage_error(self):
        code, _, _ = run("transform")
        self.assertEqual(code, 2)


class TestBound(TestCase):
    def test_gaussian_converse_row(self):
        code, document, _ = run_json("bound", "--law", "gaussian:sigma=1", "--max-n", "4", "--converse")
        self.assertEqual(code, 0)
        converse = [row for row in document["rows"] if row["check"] == "converse" and row["n"] == 4][0]
        self.assertEqual(converse["central_moment_abs"], 3)
        self.assertEqual(converse["central_limit"], 4.0)
        self.assertTrue(converse["central_ok"])
        assert_matches_schema(self, document)

    def test_rademacher_forward_rows(self):
        code, document, _ = run_json("bound", "--law", "rademacher", "--max-n", "6")
        self.assertEqual(code, 0)
        forward = [row for row in document["rows"] if row["check"] == "forward"]
        self.assertTrue(all(row["source"] == "rademacher" for row in forward))
        tightest = [row for row in forward if row["n"] == 4 and row["tightest"]]
        self.assertEqual(len(tightest), 1)
        self.assertEqual(tightest[0]["functional"], "symmetric")
        self.assertEqual(tightest[0]["bound"], 4)

    def test_explicit_moments(self):
        code, document, _ = run_json(
            "bound", "--moments", "0,1,0,1", "--abs-moments", "1,1,1,1", "--symmetric", "--centered"
        )
        self.assertEqual(code, 0)
        self.assertEqual(max(row["n"] for row in document["rows"]), 4)

    def test_moments_need_absolute_moments(self):
        code, _, err = run("bound", "--moments", "0,1,0,1")
        self.assertEqual(code, 2)
        self.assertIn("--abs-moments", err)

    def test_unknown_law(self):
        code, _, err = run("bound", "--law", "cauchy")
        self.assertEqual(code, 2)
        self.assertIn("cauchy", err)

    def test_inconsistent_input_is_rejected(self):
        code, _, err = run("bound", "--moments", "0,1,2", "--abs-moments", "0,1,0")
        self.assertEqual(code, 2)
        self.assertIn("exceeds", err)

    def test_violation_sets_exit_code(self):
        violated = MagicMock(violated=True)
        violated.as_row.return_value = {"n": 2, "slack": 1.5}
        with patch("cumubound.cli.commands.bound_report", return_value=[violated]):
            code, document, err = run_json("bound", "--law", "rademacher", "--max-n", "2")
        self.assertEqual(code, 1)
        self.assertEqual(document["rows"], [{"source": "rademacher", "check": "forward", "n": 2, "slack": 1.5}])
        self.assertIn("failed", err)


class TestTail(TestCase):
    def test_reference_value(self):
        code, out, _ = run("tail", "--v", "1", "--b", "1", "--x", "3", "--format", "csv")
        self.assertEqual(code, 0)
        header, row = out.splitlines()
        values = dict(zip(header.split(","), row.split(",")))
        self.assertAlmostEqual(float(values["bound"]), 0.324652, places=6)
        self.assertEqual(values["two_sided"], "false")

    def test_extreme_deviation(self):
        code, document, _ = run_json("tail", "--v", "1", "--b", "1", "--x", "1e200")
        self.assertEqual(code, 0)
        self.assertEqual(document["rows"][0]["bound"], 0.0)
        self.assertAlmostEqual(document["rows"][0]["t_star"], 1.0)

    def test_derive(self):
        code, document, _ = run_json("tail", "--derive", "1,1", "--x", "2,4")
        self.assertEqual(code, 0)
        self.assertEqual(len(document["rows"]), 2)
        self.assertAlmostEqual(document["rows"][0]["A_cen"], 1.3138, places=3)
        self.assertGreater(document["rows"][0]["bound"], document["rows"][1]["bound"])

    def test_derive_rejects_law(self):
        code, _, err = run("tail", "--derive", "1,1", "--law", "exponential")
        self.assertEqual(code, 2)
        self.assertIn("growth assumption", err)

    def test_missing_parameters(self):
        code, _, _ = run("tail", "--v", "1", "--x", "3")
        self.assertEqual(code, 2)


class TestRates(TestCase):
    def test_values(self):
        code, document, _ = run_json("rates")
        self.assertEqual(code, 0)
        rows = {row["class"]: row for row in document["rows"]}
        self.assertEqual(rows["raw"]["rho"], round(math.log(2), 6))
        self.assertEqual(rows["cen"]["rho"], 1.146193)
        self.assertEqual(rows["sym"]["rho"], 1.316958)
        self.assertTrue(0.837 <= rows["rademacher"]["eta"] <= 0.839)
        assert_matches_schema(self, document)

    def test_precision_range(self):
        code, _, _ = run("rates", "--precision", "20")
        self.assertEqual(code, 2)


class TestSample(TestCase):
    def test_deterministic(self):
        argv = ("sample", "--law", "gaussian", "--count", "2000", "--seed", "3", "--format", "csv")
        first, second = run(*argv), run(*argv)
        self.assertEqual(first, second)
        self.assertEqual(first[0], 0)

    def test_rows(self):
        code, document, _ = run_json("sample", "--law", "poisson:lambda=2", "--count", "50000", "--max-n", "2")
        self.assertEqual(code, 0)
        self.assertEqual([row["n"] for row in document["rows"]], [1, 2])
        self.assertEqual(document["rows"][1]["exact_moment"], 6)
        self.assertLess(document["rows"][0]["error"], 0.05)


class TestOutput(TestCase):
    def test_columns_union_and_infinity(self):
        record = OutputRecord("rates", rows=[{"a": 1}, {"b": math.inf}], format="json")
        self.assertEqual(record.columns(), ["a", "b"])
        document = json.loads(render(record))
        self.assertEqual(document["rows"][1]["b"], "inf")
        record.format = "csv"
        self.assertEqual(render(record), "a,b\n1,\n,inf\n")

    def test_unknown_format(self):
        with self.assertRaises(ValueError):
            render(OutputRecord("rates", format="xml"))
