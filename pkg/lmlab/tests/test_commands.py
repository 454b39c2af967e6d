import json
import tempfile
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from ..cli import main
from ..documents import FIXTURES_DIR, bundled_fixtures

TEST_FIXTURES = Path(__file__).resolve().parent / "fixtures"


class CommandTestMixin(object):
    command = None

    def call(self, *args):
        stdout = StringIO()
        call_command(self.command, *[str(arg) for arg in args], stdout=stdout)
        return stdout.getvalue()

    def assertExitCode(self, returncode, *args):
        with self.assertRaises(CommandError) as context:
            self.call(*args)
        self.assertEqual(context.exception.returncode, returncode)
        return context.exception


class CheckCommandTests(CommandTestMixin, SimpleTestCase):
    command = "lmlab_check"

    def test_bundled_fixtures_pass(self):
        for path in bundled_fixtures():
            with self.subTest(path=path.name):
                self.assertIn("PASSED", self.call(path))

    def test_json_output(self):
        output = self.call(FIXTURES_DIR / "jacobi_example.json", "--format", "json")
        data = json.loads(output)
        self.assertTrue(data["passed"])
        self.assertEqual([entry["name"] for entry in data["checks"]], ["static", "transport"])
        self.assertNotIn("seconds", data["checks"][0])

        output = self.call(
            FIXTURES_DIR / "jacobi_example.json", "--format", "json", "--timings", "--components"
        )
        self.assertIn("seconds", json.loads(output)["checks"][0])

    def test_seed_is_reported(self):
        output = self.call(FIXTURES_DIR / "jacobi_example.json", "--seed", "7", "--format", "json")
        self.assertEqual(json.loads(output)["seed"], 7)

    def test_failing_document(self):
        error = self.assertExitCode(1, TEST_FIXTURES / "broken.json")
        self.assertIn("1 of 1 checks failed", str(error))

    def test_tolerance_override(self):
        self.assertIn("PASSED", self.call(TEST_FIXTURES / "broken.json", "--tol", "1000"))

    def test_invalid_documents(self):
        error = self.assertExitCode(2, TEST_FIXTURES / "malformed.json")
        self.assertIn("m2", str(error))
        self.assertExitCode(2, TEST_FIXTURES / "missing.json")

    def test_check_kind_must_be_a_string(self):
        error = self.assertExitCode(2, TEST_FIXTURES / "bad_kind.json")
        self.assertIn("kind", str(error))

    def test_deeply_nested_expression(self):
        data = json.loads((FIXTURES_DIR / "jacobi_example.json").read_text())
        data["scalars"]["m"] = "(" * 3000 + "x" + ")" * 3000
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "nested.json"
            path.write_text(json.dumps(data))
            error = self.assertExitCode(2, path)
        self.assertIn("nests deeper", str(error))

    def test_invalid_options(self):
        self.assertExitCode(2, FIXTURES_DIR / "jacobi_example.json", "--tol", "0")
        self.assertExitCode(2, FIXTURES_DIR / "jacobi_example.json", "--seed", "-1")

    def test_empty_document_warns(self):
        self.assertIn("warning", self.call(TEST_FIXTURES / "empty.json"))


class FlowCommandTests(CommandTestMixin, SimpleTestCase):
    command = "lmlab_flow"

    def flow(self, *extra, field="A", multiplier="m", x0=("0.6", "0.7")):
        return (
            FIXTURES_DIR / "jacobi_example.json",
            "--field",
            field,
            "--multiplier",
            multiplier,
            "--x0",
            *x0,
            *extra,
        )

    def test_golden_drift(self):
        data = json.loads(self.call(*self.flow("--format", "json", "--max-drift", "1e-8")))
        self.assertEqual(set(data), {"transport", "jacobian"})
        self.assertEqual(data["transport"]["steps"], 100)
        self.assertLessEqual(data["transport"]["max_abs_drift"], 1e-9)
        self.assertIsNotNone(data["jacobian"]["liouville_gap"])

    def test_inline_field(self):
        output = self.call(*self.flow("--method", "transport", field="x, y", multiplier="1/(x*y)"))
        self.assertIn("transport drift:", output)
        self.assertNotIn("jacobian drift:", output)

    def test_drift_limit(self):
        self.assertExitCode(1, *self.flow("--max-drift", "1e-3", multiplier="x"))

    def test_trajectory_exit(self):
        error = self.assertExitCode(1, *self.flow(x0=("1.9", "1.9")))
        self.assertIn("TrajectoryExitError", str(error))

    def test_unresolvable_arguments(self):
        self.assertExitCode(2, *self.flow(field="B"))
        self.assertExitCode(2, *self.flow(x0=("0.6",)))


class ExamplesCommandTests(CommandTestMixin, SimpleTestCase):
    command = "lmlab_examples"

    def test_list(self):
        output = self.call()
        self.assertIn("jacobi_example: ", output)
        self.assertEqual(len(output.strip().splitlines()), len(bundled_fixtures()))

    def test_show(self):
        data = json.loads(self.call("--show", "rotsym"))
        self.assertEqual(data["structure"]["kind"], "rotsym")
        self.assertExitCode(2, "--show", "bogus")

    def test_output_dir(self):
        with tempfile.TemporaryDirectory() as directory:
            self.call("--output-dir", directory)
            copied = sorted(path.name for path in Path(directory).glob("*.json"))
        self.assertEqual(copied, [path.name for path in bundled_fixtures()])


class ConsoleScriptTests(SimpleTestCase):
    def test_subcommand_aliases(self):
        stdout = StringIO()
        with redirect_stdout(stdout):
            main(["lmlab", "examples", "--show", "jacobi_example"])
        self.assertEqual(json.loads(stdout.getvalue())["version"], 1)
