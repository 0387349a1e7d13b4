import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stdout
from unittest.mock import patch

from hardballs.analysis import max_collision_initial
from hardballs.cli import OUTPUT_DIR_VARIABLE, RunSpec, main
from hardballs.enums import ExitCode
from hardballs.utils import InputException

EQUAL = '{"masses": ["1", "1", "1"], "positions": [0, 1, 3], "velocities": [1, 0, -1]}'
LIGHT = '{"masses": ["1", "1/100", "1"], "positions": [0, 1, 3], "velocities": [1, 0, -1]}'
TRIPLE = '{"masses": [1, 1, 1], "positions": [0, 1, 2], "velocities": [1, 0, -1]}'


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self._directory = tempfile.TemporaryDirectory()
        self.directory = self._directory.name

    def tearDown(self):
        self._directory.cleanup()

    def run_cli(self, *argv, out="out.jsonl"):
        path = os.path.join(self.directory, out)
        code = main([*argv, "--out", path])
        records = []
        if os.path.exists(path):
            with open(path, encoding="utf-8") as stream:
                records = [json.loads(line) for line in stream]
        return code, records


class SimulateCommandTests(CliTestCase):
    """hardballs simulate"""

    def test_equal_masses(self):
        code, records = self.run_cli("simulate", "--exact", "--system", EQUAL)
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(["1", "3/2", "2"], [record["t"] for record in records[:-1]])
        self.assertEqual([[["1", "0"]], [["1", "-1"]], [["0", "-1"]]], [record["pre"] for record in records[:-1]])

        summary = records[-1]["summary"]
        self.assertEqual(3, summary["collisions"])
        self.assertEqual("sorted", summary["termination"])
        self.assertEqual("0", summary["momentum_residual"])
        self.assertEqual("0", summary["energy_residual"])

    def test_increasing_velocities(self):
        system = '{"masses": [1, 1, 1], "positions": [0, 1, 3], "velocities": [-1, 0, 1]}'
        code, records = self.run_cli("simulate", "--system", system)
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(0, records[-1]["summary"]["collisions"])

    def test_light_middle_ball(self):
        code, records = self.run_cli("simulate", "--exact", "--system", LIGHT)
        self.assertEqual(ExitCode.ok, code)
        self.assertGreater(records[-1]["summary"]["collisions"], 3)

    def test_multiple_collision(self):
        code, records = self.run_cli("simulate", "--exact", "--system", TRIPLE)
        self.assertEqual(ExitCode.multiple_collision, code)
        self.assertEqual("multiple-collision", records[-1]["summary"]["termination"])

    def test_event_cap(self):
        code, records = self.run_cli("simulate", "--exact", "--max-events", "2", "--system", LIGHT)
        self.assertEqual(ExitCode.cap_reached, code)
        self.assertEqual(2, records[-1]["summary"]["events"])

    def test_negative_tolerance(self):
        code, records = self.run_cli("simulate", "--tol=-1", "--system", EQUAL)
        self.assertEqual(ExitCode.bad_input, code)
        self.assertEqual([], records)

    def test_zero_event_cap(self):
        code, records = self.run_cli("simulate", "--max-events", "0", "--system", EQUAL)
        self.assertEqual(ExitCode.bad_input, code)
        self.assertEqual([], records)

    def test_input_file(self):
        path = os.path.join(self.directory, "system.json")
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(EQUAL)
        code, records = self.run_cli("simulate", path)
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(3, records[-1]["summary"]["collisions"])

    def test_masses_flag_overrides_input(self):
        code, records = self.run_cli("simulate", "--exact", "--masses", "1,1/100,1", "--system", EQUAL)
        self.assertEqual(ExitCode.ok, code)
        self.assertGreater(records[-1]["summary"]["collisions"], 3)

    def test_stdout(self):
        buffer = io.StringIO()
        with redirect_stdout(buffer):
            code = main(["simulate", "--exact", "--system", EQUAL])
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(4, len(buffer.getvalue().splitlines()))


class InputErrorTests(CliTestCase):
    """Malformed input exits with 1 and writes nothing."""

    def test_missing_field(self):
        with self.assertLogs("hardballs.cli", level="ERROR") as logs:
            code, records = self.run_cli("simulate", "--system", '{"masses": [1, 1], "positions": [0, 1]}')
        self.assertEqual(ExitCode.bad_input, code)
        self.assertEqual([], records)
        self.assertIn("velocities", logs.output[0])

    def test_invalid_json(self):
        code, _ = self.run_cli("simulate", "--system", "{masses")
        self.assertEqual(ExitCode.bad_input, code)

    def test_unordered_positions(self):
        system = '{"masses": [1, 1], "positions": [1, 0], "velocities": [1, 0]}'
        self.assertEqual(ExitCode.bad_input, self.run_cli("simulate", "--system", system)[0])

    def test_unknown_flag(self):
        self.assertEqual(ExitCode.bad_input, main(["simulate", "--bogus"]))

    def test_unknown_command(self):
        self.assertEqual(ExitCode.bad_input, main(["collide"]))

    def test_unreadable_input(self):
        self.assertEqual(ExitCode.bad_input, self.run_cli("simulate", os.path.join(self.directory, "missing.json"))[0])


class GameCommandTests(CliTestCase):
    """hardballs game"""

    def test_two_moves(self):
        code, records = self.run_cli("game", "--exact", "--weights", "1", "--start=-1,0")
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual([1, 2], [record["fired"] for record in records[1:-1]])
        self.assertEqual([1, 0], [record["inversions"] for record in records[1:-1]])
        self.assertEqual(2, records[-1]["summary"]["moves"])
        self.assertTrue(records[-1]["summary"]["terminal"])

    def test_terminal_start(self):
        code, records = self.run_cli("game", "--exact", "--weights", "1", "--start", "0,1")
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(0, records[-1]["summary"]["moves"])

    def test_search_for_long_play(self):
        code, records = self.run_cli("game", "--weights", "1.5")
        self.assertEqual(ExitCode.ok, code)
        self.assertGreater(records[-1]["summary"]["moves"], 3)
        self.assertFalse(records[-1]["summary"]["certified"])

    def test_move_cap(self):
        code, records = self.run_cli("game", "--exact", "--weights", "3/2", "--start=-1,-1", "--max-events", "2")
        self.assertEqual(ExitCode.cap_reached, code)
        self.assertEqual(2, records[-1]["summary"]["moves"])

    def test_terminal_past_bound(self):
        code, records = self.run_cli("game", "--exact", "--weights", "3/2", "--start=-1,-1")
        self.assertEqual(ExitCode.cap_reached, code)
        self.assertEqual(4, records[-1]["summary"]["moves"])
        self.assertTrue(records[-1]["summary"]["terminal"])

    def test_weights_from_masses(self):
        system = '{"masses": [1, 1, 1], "start": [-1, -1]}'
        code, records = self.run_cli("game", "--system", system, "--strategy", "rightmost")
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(3, records[-1]["summary"]["moves"])
        self.assertEqual("rightmost", records[0]["strategy"])

    def test_full_matrix(self):
        system = '{"weights": [[-2, 1], [1, -2]], "start": [-1, 0]}'
        self.assertEqual(ExitCode.ok, self.run_cli("game", "--exact", "--system", system)[0])

    def test_asymmetric_matrix(self):
        system = '{"weights": [[-2, 1], [0.5, -2]], "start": [-1, 0]}'
        self.assertEqual(ExitCode.bad_input, self.run_cli("game", "--system", system)[0])

    def test_start_of_wrong_length(self):
        self.assertEqual(ExitCode.bad_input, self.run_cli("game", "--weights", "1", "--start", "1,2,3")[0])


class CheckCommandTests(CliTestCase):
    """hardballs check"""

    def test_geometric_only(self):
        code, records = self.run_cli("check", "--exact", "--masses", "1,2,4")
        self.assertEqual(ExitCode.ok, code)
        self.assertTrue(records[0]["geometric_ok"])
        self.assertFalse(records[0]["arithmetic_ok"])
        self.assertEqual(["0"], records[0]["geometric_margins"])
        self.assertEqual(["-1/2"], records[0]["arithmetic_margins"])

    def test_light_middle(self):
        self.assertEqual(ExitCode.condition_failed, self.run_cli("check", "--masses", "1,1/100,1")[0])

    def test_single_mass(self):
        self.assertEqual(ExitCode.ok, self.run_cli("check", "--masses", "2")[0])

    def test_nonpositive_mass(self):
        self.assertEqual(ExitCode.bad_input, self.run_cli("check", "--masses", "1,0,1")[0])


class CertifyCommandTests(CliTestCase):
    """hardballs certify"""

    def test_full_inversion(self):
        _, state = max_collision_initial(4)
        system = json.dumps(
            {
                "masses": [1, 1, 1, 1, 1],
                "positions": [int(x) for x in state.positions],
                "velocities": [int(v) for v in state.velocities],
            }
        )
        code, records = self.run_cli("certify", "--exact", "--system", system)
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(list(range(10, -1, -1)), records[-1]["summary"]["inversions"])
        self.assertTrue(records[-1]["summary"]["certified"])

    def test_zero_collisions(self):
        system = '{"masses": [1, 2], "positions": [0, 1], "velocities": [0, 1]}'
        code, records = self.run_cli("certify", "--system", system)
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual([0], records[-1]["summary"]["inversions"])

    def test_multiple_collision(self):
        self.assertEqual(ExitCode.multiple_collision, self.run_cli("certify", "--exact", "--system", TRIPLE)[0])

    def test_conforming_ensemble(self):
        code, records = self.run_cli("certify", "--n", "3", "--trials", "30", "--seed", "4")
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(0, records[-1]["summary"]["failed"])
        self.assertTrue(all(record["certified"] for record in records[:-1]))


class SearchCommandTests(CliTestCase):
    """hardballs search"""

    def test_conforming_sampler(self):
        code, records = self.run_cli("search", "--n", "3", "--trials", "100")
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(0, records[-1]["summary"]["findings"])

    def test_pinned_light_middle(self):
        code, records = self.run_cli("search", "--exact", "--masses", "1,1/100,1", "--trials", "20")
        self.assertEqual(ExitCode.ok, code)
        findings = [record["finding"] for record in records if "finding" in record]
        self.assertGreater(len(findings), 0)
        self.assertTrue(all(not finding["geometric_ok"] for finding in findings))

    def test_two_balls(self):
        code, records = self.run_cli("search", "--n", "1", "--sampler", "any", "--trials", "100")
        self.assertEqual(ExitCode.ok, code)
        self.assertEqual(0, records[-1]["summary"]["findings"])

    def test_pinned_masses_of_wrong_length(self):
        self.assertEqual(ExitCode.bad_input, self.run_cli("search", "--n", "3", "--masses", "1,2")[0])

    def test_missing_n(self):
        self.assertEqual(ExitCode.bad_input, self.run_cli("search")[0])


class ProvenanceTests(CliTestCase):
    """Every record carries the run specification."""

    def test_run_is_embedded(self):
        _, records = self.run_cli("simulate", "--exact", "--seed", "9", "--system", EQUAL)
        for record in records:
            self.assertEqual(9, record["run"]["seed"])
            self.assertEqual("exact", record["run"]["mode"])
            self.assertIsNone(record["run"]["tol"])

    def test_exact_runs_are_byte_identical(self):
        outputs = []
        for _ in range(2):
            path = os.path.join(self.directory, "run.jsonl")
            main(["simulate", "--exact", "--system", LIGHT, "--out", path])
            with open(path, "rb") as stream:
                outputs.append(stream.read())
        self.assertEqual(outputs[0], outputs[1])

    def test_output_directory_variable(self):
        with patch.dict(os.environ, {OUTPUT_DIR_VARIABLE: self.directory}):
            code = main(["check", "--masses", "1,1,1", "--out", "nested/check.jsonl"])
        self.assertEqual(ExitCode.ok, code)
        self.assertTrue(os.path.exists(os.path.join(self.directory, "nested", "check.jsonl")))

    def test_tolerance_ignored_in_exact_mode(self):
        self.assertIsNone(RunSpec("check", mode="exact", tol=1e-3).to_record()["tol"])
        self.assertEqual(1e-3, RunSpec("check", tol=1e-3).numeric.tol)

    def test_negative_tolerance_is_bad_input(self):
        with self.assertRaises(InputException):
            RunSpec("check", tol=-1.0).numeric
