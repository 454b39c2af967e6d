from pathlib import Path

from django.test import SimpleTestCase, override_settings

from ..calculus.exceptions import CheckException, CheckRegistrationException, LMLabException
from ..checks import Argument, Check, get_check, registry, run_checks
from ..documents import FIXTURES_DIR, load_document, parse_document
from ..serializers import ReportSerializer
from . import factories

TEST_FIXTURES = Path(__file__).resolve().parent / "fixtures"


class RegistryTests(SimpleTestCase):
    def test_kinds_are_registered(self):
        for kind in (
            "last_multiplier",
            "def11",
            "witten",
            "marsden",
            "exact_potential",
            "self_multiplier",
            "ham_multiplier",
            "gradient_multiplier",
            "helmholtz_pair",
            "m_harmonic",
            "flow_drift",
            "jacobian_drift",
        ):
            self.assertEqual(get_check(kind).kind, kind)

    def test_unknown_kind(self):
        with self.assertRaises(CheckException):
            get_check("bogus")

    def test_duplicate_registration(self):
        with self.assertRaises(CheckRegistrationException):

            class DuplicateCheck(Check):
                kind = "last_multiplier"

        self.assertEqual(type(registry["last_multiplier"]).__name__, "LastMultiplierCheck")

    def test_base_class_cannot_register(self):
        with self.assertRaises(CheckRegistrationException):
            Check.register()

    def test_argument_resolution(self):
        document = parse_document(factories.ProblemDocumentDataFactory())
        self.assertEqual(Argument("point").resolve([1, 2], document), (1.0, 2.0))
        self.assertEqual(Argument("number").resolve(3, document), 3.0)
        for argument, value in (
            (Argument("point"), [1]),
            (Argument("number"), True),
            (Argument("scalar"), ["x"]),
            (Argument("field"), "B"),
            (Argument("form"), "w"),
            (Argument("choice", choices=("a", "b")), "c"),
        ):
            with self.subTest(type=argument.type, value=value):
                with self.assertRaises(LMLabException):
                    argument.resolve(value, document)


class RunChecksTests(SimpleTestCase):
    def test_golden_document(self):
        report = run_checks(load_document(FIXTURES_DIR / "jacobi_example.json"))
        self.assertTrue(report.passed)
        self.assertEqual(len(report), 2)
        static, transport = report.entries
        self.assertLessEqual(static.max_abs_residual, 1e-9)
        self.assertEqual(static.samples_used, 64)
        self.assertLessEqual(transport.max_abs_residual, 1e-8)
        self.assertEqual(report.warnings, [])

    def test_bundled_fixtures_pass(self):
        for path in sorted(FIXTURES_DIR.glob("*.json")):
            with self.subTest(path=path.name):
                report = run_checks(load_document(path))
                self.assertTrue(report.passed, report.as_text())

    def test_failing_document(self):
        report = run_checks(load_document(TEST_FIXTURES / "broken.json"))
        self.assertFalse(report.passed)
        entry = report.failed[0]
        self.assertEqual(entry.name, "static")
        self.assertEqual(len(entry.witness), 2)
        text = report.as_text(timings=False)
        self.assertIn("[FAIL] static", text)
        self.assertIn("witness", text)
        self.assertIn("FAILED: 0 of 1 checks passed", text)

    def test_empty_document(self):
        report = run_checks(load_document(TEST_FIXTURES / "empty.json"))
        self.assertTrue(report.passed)
        self.assertEqual(len(report), 0)
        self.assertEqual(len(report.warnings), 1)

    def test_trivial_multiplier_warning(self):
        check = factories.CheckDataFactory(multiplier="0")
        report = run_checks(parse_document(factories.ProblemDocumentDataFactory(checks=[check])))
        self.assertTrue(report.passed)
        self.assertTrue(report.entries[0].trivial)
        self.assertEqual(len(report.warnings), 1)

    def test_execution_errors_are_reported(self):
        data = factories.ProblemDocumentDataFactory(
            structure={"kind": "euclidean"},
            checks=[{"name": "pair", "kind": "helmholtz_pair", "a": "x", "b": "x^2"}],
        )
        report = run_checks(parse_document(data))
        entry = report.entries[0]
        self.assertFalse(entry.passed)
        self.assertEqual(entry.reason, "error")
        self.assertIn("HelmholtzPreconditionError", entry.error)
        self.assertIsNone(entry.max_abs_residual)

    def test_determinism(self):
        path = FIXTURES_DIR / "quadratic_bivector.json"
        first = run_checks(load_document(path))
        second = run_checks(load_document(path), max_workers=3)
        self.assertEqual(
            [(entry.name, entry.seed, entry.max_abs_residual) for entry in first.entries],
            [(entry.name, entry.seed, entry.max_abs_residual) for entry in second.entries],
        )
        other = run_checks(load_document(path, seed=7))
        self.assertNotEqual(first.entries[0].seed, other.entries[0].seed)

    def test_tolerance_override(self):
        broken = TEST_FIXTURES / "broken.json"
        self.assertTrue(run_checks(load_document(broken, tolerance=1e3)).passed)

    @override_settings(LMLAB_TOLERANCE=1e3)
    def test_tolerance_setting(self):
        self.assertTrue(run_checks(load_document(TEST_FIXTURES / "broken.json")).passed)


class ReportSerializerTests(SimpleTestCase):
    def setUp(self):
        self.report = run_checks(load_document(TEST_FIXTURES / "broken.json"))

    def test_optional_fields(self):
        data = ReportSerializer(self.report).data
        self.assertFalse(data["passed"])
        self.assertEqual(data["count"], 1)
        self.assertEqual(data["failed"], 1)
        entry = data["checks"][0]
        self.assertNotIn("seconds", entry)
        self.assertNotIn("components", entry)
        self.assertEqual(len(entry["witness"]), 2)
        self.assertEqual(entry["seed"], self.report.entries[0].seed)

        context = {"include_timings": True, "include_components": True}
        entry = ReportSerializer(self.report, context=context).data["checks"][0]
        self.assertIn("seconds", entry)
        self.assertIsInstance(entry["components"], list)
