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

"""Tests for `edgeworth_lab.experiments.harnesses`."""

import math
import unittest

from jsonschema import validate

from edgeworth_lab.cli.emit import plain, render_csv, render_json, report_schema
from edgeworth_lab.const import (
    HARNESS_DIOPHANTINE,
    HARNESS_EXPONENT,
    HARNESS_JOINT,
    HARNESS_LIMIT,
    HARNESS_LLT,
    HARNESS_MIXSCALE,
)
from edgeworth_lab.errors import PreconditionFailed
from edgeworth_lab.experiments.harnesses import (
    gauge_exponent,
    harness_diophantine,
    harness_exponent,
    harness_joint,
    harness_llt,
    harness_mixscale,
    run_harness,
)
from edgeworth_lab.experiments.sampling import golden_distribution, lattice_control


class TestExponent(unittest.TestCase):
    def test_golden(self):
        beta, K, records = gauge_exponent(golden_distribution(), 500)
        assert 0.9 < beta < 1.1
        assert K > 0.0
        # records sit at Fibonacci numbers
        assert [row[0] for row in records][:6] == [1, 2, 3, 5, 8, 13]

    def test_lattice(self):
        beta, K, _ = gauge_exponent(lattice_control(), 50)
        assert math.isinf(beta)
        assert K == 0.0

    def test_harness(self):
        run = harness_exponent(kmax=500)
        report = run.report
        assert report["harness"] == HARNESS_EXPONENT
        assert report["pass"]
        assert 0.9 < report["metrics"]["beta"] < 1.1
        assert report["metrics"]["control_degenerate"]
        assert run.tables["records"][0] == ["k", "s", "gauge"]

    def test_lattice_atoms(self):
        run = harness_exponent(atoms=[-1.0, 0.0, 1.0], probs=[0.25, 0.5, 0.25], kmax=50)
        assert run.report["metrics"]["beta"] is None
        assert not run.report["pass"]


class TestDiophantine(unittest.TestCase):
    def test_control(self):
        run = harness_diophantine(n_list=(50, 100, 200))
        metrics = run.report["metrics"]
        assert len(metrics["M"]) == 3
        assert metrics["control_increasing"]
        assert run.report["harness"] == HARNESS_DIOPHANTINE
        columns, rows = run.tables["trend"]
        assert columns == ["n", "M", "M_control"]
        assert [row[0] for row in rows] == [50, 100, 200]

    def test_preconditions(self):
        with self.assertRaises(PreconditionFailed):
            harness_diophantine(n_list=(50, 100), R_exponent=1.0)
        with self.assertRaises(PreconditionFailed):
            harness_diophantine(
                atoms=[-1.5, -0.5, 0.5, 1.5], probs=[0.25, 0.25, 0.25, 0.25], n_list=(10,)
            )


class TestPreconditions(unittest.TestCase):
    def test_joint(self):
        with self.assertRaises(PreconditionFailed):
            harness_joint(z1=1.0, z2=1.0)
        with self.assertRaises(PreconditionFailed):
            harness_joint(n=10, z1=0.0, z2=1.0)

    def test_llt(self):
        with self.assertRaises(PreconditionFailed):
            harness_llt(atoms=[-1.5, -0.5, 0.5, 1.5], probs=[0.25, 0.25, 0.25, 0.25], N=2)

    def test_mixscale(self):
        with self.assertRaises(PreconditionFailed):
            harness_mixscale(d=3)

    def test_unknown(self):
        with self.assertRaises(PreconditionFailed):
            run_harness("nonsense", {}, 0)


class TestRunHarness(unittest.TestCase):
    def test_dispatch(self):
        run = run_harness(HARNESS_EXPONENT, {"kmax": 100}, 3)
        assert run.report["seed"] == 3
        assert run.report["params"]["kmax"] == 100
        assert run.report["artifacts"] == []


def rendered(run):
    tables = "".join(render_csv(table) for _, table in sorted(run.tables.items()))
    return render_json(run.report) + tables


class TestSmallRuns(unittest.TestCase):
    def check(self, name, params):
        first = run_harness(name, dict(params), 5)
        second = run_harness(name, dict(params), 5)
        validate(plain(first.report), report_schema()["definitions"]["harness_report"])
        assert first.report["harness"] == name
        assert first.report["seed"] == 5
        assert rendered(first) == rendered(second)
        return first.report["metrics"]

    def test_limit(self):
        metrics = self.check(
            HARNESS_LIMIT,
            {"n_list": (50, 100), "N": 4, "reference_size": 4, "dyadic_draws": 1, "cache": False},
        )
        assert len(metrics["ks"]) == 2
        assert all(0.0 <= ks <= 1.0 for ks in metrics["ks"])
        assert len(metrics["dyadic_median_residual"]) == 6
        assert len(metrics["dyadic_median_spread"]) == 6

    def test_llt(self):
        metrics = self.check(
            HARNESS_LLT, {"n": 200, "N": 3, "reference_size": 3, "cache": False}
        )
        assert len(metrics["ks_c"]) == 1
        assert metrics["failures"] == 0

    def test_joint(self):
        metrics = self.check(HARNESS_JOINT, {"n": 1000, "N": 3, "reference_size": 3})
        assert metrics["pairs"] == 3
        assert -1.0 <= metrics["rho_limit"] <= 1.0

    def test_mixscale(self):
        metrics = self.check(HARNESS_MIXSCALE, {"n_list": (100, 1000), "N": 6, "reference_size": 6})
        assert len(metrics["ks_lattice"]) == 2
        assert len(metrics["ks_theta"]) == 2
        assert metrics["ks_control"] is not None
