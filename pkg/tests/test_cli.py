import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import orjson
from click.testing import CliRunner

from app.api.models import SuiteReport
from app.cli import EXIT_FAILED, EXIT_SIZE_GUARD, EXIT_USAGE, cli

GOLDEN = Path(__file__).resolve().parent / "golden"


class TestCli(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner(mix_stderr=False)

    def invoke(self, *args):
        return self.runner.invoke(cli, list(args))

    def test_enumerate(self):
        result = self.invoke("enumerate", "--n", "3")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.stdout, "0,0,0\n0,3,2\n2,1,0\n3,0,1\n")

    def test_enumerate_json(self):
        result = self.invoke("enumerate", "--n", "4", "--arcs", "2", "--format", "json")
        self.assertEqual(orjson.loads(result.stdout), [[2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]])

    def test_hasse_golden(self):
        result = self.invoke("hasse", "--n", "4", "--labels")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.stdout, (GOLDEN / "pf4_hasse_labeled.dot").read_text(encoding="utf-8"))

    def test_hasse_json(self):
        result = self.invoke("hasse", "--n", "3", "--format", "json")
        payload = orjson.loads(result.stdout)
        self.assertEqual(payload["covers"], [{"child": 1, "parent": 0}, {"child": 2, "parent": 3},
                                             {"child": 3, "parent": 1}])

    def test_hasse_out(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / "pf4.dot"
            result = self.invoke("hasse", "--n", "4", "--labels", "--highlight", "--out", str(out))
            self.assertEqual(result.exit_code, 0)
            self.assertEqual(result.stdout, "")
            self.assertEqual(out.read_text(encoding="utf-8").count("color=blue"), 6)

    def test_compare(self):
        result = self.invoke("compare", "--n", "4", "--x", "2,1,0,0", "--y", "3,4,1,2")
        self.assertEqual(result.stdout, "incomparable\n")
        result = self.invoke("compare", "--n", "4", "--x", "2,1,4,3", "--y", "0,0,0,0")
        self.assertEqual(result.stdout, "<\n")

    def test_interval(self):
        result = self.invoke("interval", "--n", "4", "--x", "2,1,4,3", "--y", "3,0,1,0", "--check-el")
        self.assertEqual(result.exit_code, 0)
        lines = result.stdout.splitlines()
        self.assertEqual(lines[0], "# [2,1,4,3] .. [3,0,1,0]: size 4, length 2")
        self.assertEqual(lines[1:5], ["2,1,0,0", "2,1,4,3", "3,0,1,0", "3,4,1,2"])
        self.assertEqual(lines[5], "# increasing_chains=1 lex_smallest=ok")

    def test_verify_text(self):
        result = self.invoke("verify", "--n", "4", "--suite", "grading")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.stdout, "grading n=4: PASS\n")

    def test_verify_json_single_envelope(self):
        result = self.invoke("verify", "--n", "4", "--suite", "length", "--json")
        payload = orjson.loads(result.stdout)
        self.assertEqual((payload["suite"], payload["n"], payload["passed"]), ("length", 4, True))
        self.assertEqual(payload["failures"], [])

    @patch('app.cli.VerificationService')
    def test_verify_failure_exit_code(self, mock_service):
        mock_service.return_value.run.return_value = [
            SuiteReport(suite="grading", n=3, passed=False, failures=["antisymmetry violated"])
        ]
        result = self.invoke("verify", "--n", "3", "--suite", "grading")
        self.assertEqual(result.exit_code, EXIT_FAILED)
        self.assertIn("  - antisymmetry violated", result.stdout)

    def test_polys(self):
        result = self.invoke("polys", "--n", "4")
        self.assertEqual(result.exit_code, 0)
        rows = result.stdout.splitlines()
        self.assertEqual(rows[0], "n,k,coefficients,polynomial")
        self.assertEqual(rows[-1], '4,*,"1,2,2,2,1,1,1",1+2q+2q^2+2q^3+q^4+q^5+q^6')

    def test_polys_checks_on_stderr(self):
        result = self.invoke("polys", "--n", "5", "--check", "all")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.stderr, "closed: ok\ni_recurrence: ok\np_recurrence: ok\n")

    def test_zeta(self):
        result = self.invoke("zeta", "--n", "4", "--q", "2", "--oracle")
        self.assertEqual(result.exit_code, 0)
        payload = orjson.loads(result.stdout)
        self.assertEqual(payload["counts"], {"0": 1, "2": 35, "4": 28})
        self.assertTrue(payload["agrees"])

    def test_mobius(self):
        self.assertEqual(self.invoke("mobius", "--n", "2").stdout, "-1\n")
        self.assertEqual(self.invoke("mobius", "--n", "4").stdout, "0\n")

    def test_mobius_needs_both_bounds(self):
        result = self.invoke("mobius", "--n", "4", "--x", "2,1,4,3")
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_invalid_element_exit_code(self):
        result = self.invoke("compare", "--n", "4", "--x", "2,2,0,0", "--y", "0,0,0,0")
        self.assertEqual(result.exit_code, EXIT_USAGE)
        self.assertTrue(result.stderr.startswith("Error: "))

    def test_not_comparable_exit_code(self):
        result = self.invoke("interval", "--n", "4", "--x", "0,0,0,0", "--y", "2,1,4,3")
        self.assertEqual(result.exit_code, EXIT_USAGE)

    def test_size_guard_exit_code(self):
        result = self.invoke("hasse", "--n", "8")
        self.assertEqual(result.exit_code, EXIT_SIZE_GUARD)
        self.assertIn("--force", result.stderr)

    @patch.dict('app.cli.CONFIG', {'MAX_POSET_N': 3})
    def test_interval_force_prints_estimate(self):
        result = self.invoke("interval", "--n", "4", "--x", "2,1,4,3", "--y", "3,0,1,0", "--force")
        self.assertEqual(result.exit_code, 0)
        self.assertTrue(result.stderr.startswith("PF_4: forcing past MAX_POSET_N=3, estimated memory"))
        self.assertEqual(result.stdout.splitlines()[0], "# [2,1,4,3] .. [3,0,1,0]: size 4, length 2")

    @patch('app.cli.logger')
    def test_rejection_logs_below_console_level(self, mock_logger):
        result = self.invoke("compare", "--n", "4", "--x", "2,2,0,0", "--y", "0,0,0,0")
        self.assertEqual(result.exit_code, EXIT_USAGE)
        self.assertEqual(len(result.stderr.splitlines()), 1)
        mock_logger.warning.assert_not_called()
        mock_logger.info.assert_called_once()

    def test_el_guard_exit_code(self):
        result = self.invoke("verify", "--n", "7", "--suite", "el")
        self.assertEqual(result.exit_code, EXIT_SIZE_GUARD)

    def test_unknown_suite_rejected_by_click(self):
        result = self.invoke("verify", "--n", "4", "--suite", "speed")
        self.assertEqual(result.exit_code, 2)


if __name__ == '__main__':
    unittest.main()
