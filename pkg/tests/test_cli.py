#
# edgeworth-lab - Exact and asymptotic CLT errors of atomic sums
#
# Copyright (C) 2026      The edgeworth-lab developers
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program. If not, see <https://www.gnu.org/licenses/>.
#

"""Test the command line interface."""

import json
import os
import tempfile
import unittest
from unittest.mock import patch

from click.testing import CliRunner

from edgeworth_lab.__main__ import cli, dispatch
from edgeworth_lab.config import DefaultConfig
from edgeworth_lab.const import SCHEMA_VERSION, TEST_CONFIG

DSYM = ["--atoms=-1,0,1", "--probs=0.25,0.5,0.25"]


class TestCli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.runner = CliRunner()

    def invoke(self, *args):
        return self.runner.invoke(cli, ["--config", TEST_CONFIG] + list(args))

    def test_help(self):
        result = self.invoke("--help")
        assert result.exit_code == 0
        assert "exact-law" in result.output
        assert str(DefaultConfig.MASTER_SEED) in result.output
        assert "[default: json]" in result.output

    def test_help_defaults(self):
        result = self.invoke("tilde-delta", "--help")
        assert result.exit_code == 0
        assert "RESONANCE_K, {}".format(DefaultConfig.RESONANCE_K) in result.output
        assert "RESONANCE_DELTA, {}".format(DefaultConfig.RESONANCE_DELTA) in result.output
        result = self.invoke("fourier-oracle", "--help")
        assert result.exit_code == 0
        assert "FOURIER_K1, {}".format(DefaultConfig.FOURIER_K1) in result.output

    def test_optimizer_failure(self):
        with patch("scipy.optimize.minimize_scalar", side_effect=ValueError("bad bracket")):
            result = self.invoke("resonance", *DSYM, "--n", "100", "--kmax", "2")
        assert result.exit_code == 2
        assert "E:2:OptimizerFail" in result.output

    def test_resonance(self):
        result = self.invoke("resonance", *DSYM, "--n", "100", "--kmax", "3")
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["results"]["resonant_count"] >= 1
        assert data["results"]["small_eta_count"] == 1
        assert data["results"]["quadratic_law_C"] == 0.0
        assert data["results"]["xi_C"] == 0.0

    def test_exact_law_csv(self):
        result = self.invoke("--format", "csv", "exact-law", *DSYM, "--n", "2")
        assert result.exit_code == 0, result.output
        lines = result.output.strip().split("\n")
        assert lines[0] == "value,mass"
        assert len(lines) == 6
        assert abs(sum(float(line.split(",")[1]) for line in lines[1:]) - 1.0) < 1e-14

    def test_edgeworth_json(self):
        result = self.invoke("edgeworth", *DSYM, "--n", "4", "--r", "2")
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["schema_version"] == SCHEMA_VERSION
        assert data["config_echo"]["subcommand"] == "edgeworth"
        assert data["config_echo"]["seed"] == 12345
        assert data["config_echo"]["params"]["r"] == 2
        assert abs(data["results"]["values"][0] - 0.5) < 1e-15

    def test_deterministic(self):
        args = ("error", *DSYM, "--n", "10", "--z=-0.5,0,0.5")
        assert self.invoke(*args).output == self.invoke(*args).output

    def test_lattice(self):
        result = self.invoke("lattice", "--d", "2")
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["results"]["shortest"] <= 1.0746

    def test_unknown_option(self):
        result = self.invoke("exact-law", *DSYM, "--n", "2", "--bogus", "1")
        assert result.exit_code == 1
        assert "E:1:" in result.output

    def test_bad_probabilities(self):
        result = self.invoke("exact-law", "--atoms=-1,0,1", "--probs=0.3,0.5,0.3", "--n", "2")
        assert result.exit_code == 1
        assert "E:1:ProbInvalid" in result.output

    def test_too_large(self):
        result = self.invoke("exact-law", *DSYM, "--n", "100000")
        assert result.exit_code == 2
        assert "E:2:TooLarge" in result.output

    def test_missing_parameter(self):
        result = self.invoke("exact-law", *DSYM)
        assert result.exit_code == 1
        assert "E:1:ValidationError" in result.output

    def test_harness(self):
        with tempfile.TemporaryDirectory() as tmpdirname:
            result = self.invoke(
                "--output-dir", tmpdirname, "harness", "exponent", "-p", "kmax=200"
            )
            assert result.exit_code == 0, result.output
            assert os.path.isfile(os.path.join(tmpdirname, "harness-exponent.json"))
            assert os.path.isfile(
                os.path.join(tmpdirname, "harness-exponent-records.csv")
            )
            with open(os.path.join(tmpdirname, "harness-exponent.json")) as f:
                data = json.load(f)
        assert data["results"]["pass"]
        assert data["results"]["artifacts"] == ["harness-exponent-records.csv"]
        assert data["config_echo"]["params"]["harness"] == "exponent"

    def test_harness_fail(self):
        result = self.invoke(
            "harness",
            "exponent",
            "-p",
            "atoms=-1,0,1",
            "-p",
            "probs=0.25,0.5,0.25",
            "-p",
            "kmax=50",
        )
        assert result.exit_code == 3
        assert json.loads(result.output)["results"]["pass"] is False

    def test_harness_parameters(self):
        result = self.invoke("harness", "exponent", "-p", "kmax")
        assert result.exit_code == 1
        assert "E:1:PreconditionFailed" in result.output
        result = self.invoke("harness", "exponent", "-p", "nonsense=1")
        assert result.exit_code == 1

    def test_config_error(self):
        with tempfile.TemporaryDirectory() as tmpdirname:
            path = os.path.join(tmpdirname, "lab.cfg")
            with open(path, "w") as f:
                f.write("NOT_A_SETTING = 1\n")
            result = self.runner.invoke(cli, ["--config", path, "lattice", "--d", "2"])
        assert result.exit_code == 1
        assert "E:1:ConfigError" in result.output

    def test_dispatch(self):
        assert dispatch(["--config", TEST_CONFIG, "lattice", "--d", "2"]) == 0
        assert dispatch(["--config", TEST_CONFIG, "exact-law", *DSYM, "--n", "100000"]) == 2
