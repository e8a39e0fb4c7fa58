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

"""Tests for the ensemble statistics, the random laws and the ensembles."""

import math
import tempfile
import unittest
from unittest.mock import patch

import numpy as np

from edgeworth_lab.const import (
    FLAG_FAILED,
    FLAG_OK,
    FLAG_UNCONVERGED,
    GOLDEN_RATIO,
    METHOD_EXACT,
    METHOD_RESONANCE,
    TAG_ERRORS,
)
from edgeworth_lab.errors import EmptyEnsemble, EmptySample, PreconditionFailed
from edgeworth_lab.experiments.ensembles import (
    ATOM_BOUND,
    KAPPA,
    error_ensemble,
    make_cache_key,
    reference_ensemble,
    scaled_error,
)
from edgeworth_lab.experiments.sampling import (
    draw_parameters,
    golden_distribution,
    lattice_control,
    rational_draw,
)
from edgeworth_lab.experiments.stats import (
    EnsembleResult,
    distance_covariance,
    ks_quantile,
    ks_two_sample,
    ks_uniform,
    pearson,
    strictly_increasing,
    trend_ok,
)
from edgeworth_lab.numerics.atoms import validate
from edgeworth_lab.numerics.resonance import structure_constants
from edgeworth_lab.util import child_seed


class TestDistances(unittest.TestCase):
    def test_two_sample(self):
        assert ks_two_sample([0.0, 1.0], [0.5]) == 0.5
        assert ks_two_sample([0.3, 0.1, 0.2], [0.2, 0.3, 0.1]) == 0.0
        with self.assertRaises(EmptySample):
            ks_two_sample([], [1.0])

    def test_uniform(self):
        assert ks_uniform(np.linspace(0.005, 0.995, 100)) < 0.02
        assert ks_uniform(np.full(10, 0.5)) >= 0.5

    def test_quantile(self):
        assert abs(ks_quantile(100, 100) - 1.36 * math.sqrt(0.02)) < 1e-15

    def test_distance_correlation(self):
        xs = np.arange(10.0)
        assert abs(distance_covariance(xs, 3.0 * xs + 1.0) - 1.0) < 1e-12
        assert distance_covariance(xs, np.ones(10)) == 0.0
        with self.assertRaises(EmptySample):
            distance_covariance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        with self.assertRaises(EmptySample):
            distance_covariance(xs, xs[:-1])

    def test_trend(self):
        assert trend_ok([3.0, 2.0, 2.05, 1.0], 0.1)
        assert not trend_ok([3.0, 2.0, 2.5, 1.0], 0.1)
        assert not trend_ok([3.0, 3.01, 2.0, 2.01], 0.1)
        assert strictly_increasing([1, 2, 3])
        assert not strictly_increasing([1, 2, 2])

    def test_pearson(self):
        xs = np.arange(5.0)
        assert abs(pearson(xs, 2.0 * xs) - 1.0) < 1e-12
        assert pearson(xs, np.ones(5)) == 0.0


class TestEnsembleResult(unittest.TestCase):
    def setUp(self):
        self.result = EnsembleResult(
            label="test",
            params={},
            seed=1,
            values=np.array([1.0, 2.0, 3.0]),
            flags=(FLAG_OK, FLAG_UNCONVERGED, FLAG_FAILED, FLAG_OK),
            diagnostics={"draw_index": [0, 1, 3]},
        )

    def test_fractions(self):
        assert self.result.failures == 1
        assert self.result.unconverged_fraction == 0.25
        assert self.result.ok_fraction == 0.5

    def test_table(self):
        assert self.result.columns() == ["value", "draw_index"]
        assert self.result.rows()[2] == [3.0, 3]

    def test_summary(self):
        summary = self.result.summary()
        assert summary["count"] == 3
        assert summary["mean"] == 2.0
        assert summary["std"] == 1.0


class TestSampling(unittest.TestCase):
    def test_constraints(self):
        for d in (2, 3):
            for seed in range(20):
                dist = draw_parameters(d, 0.05, 3.0, seed)
                assert dist.d == d
                assert min(dist.probs) >= 0.05
                assert np.diff(dist.atoms).min() >= 0.05
                assert np.abs(dist.atoms).max() <= 3.0

    def test_seed(self):
        first, second = draw_parameters(2, 0.05, 3.0, 9), draw_parameters(2, 0.05, 3.0, 9)
        assert first.atoms == second.atoms
        assert first.probs == second.probs
        assert first.atoms != draw_parameters(2, 0.05, 3.0, 10).atoms

    def test_infeasible(self):
        with self.assertRaises(PreconditionFailed):
            draw_parameters(2, 0.4, 3.0, 0)
        with self.assertRaises(PreconditionFailed):
            draw_parameters(1, 0.05, 3.0, 0)

    def test_golden(self):
        a = golden_distribution().atoms
        assert abs((a[1] - a[0]) / (a[2] - a[0]) - 1.0 / GOLDEN_RATIO) < 1e-14

    def test_controls(self):
        a = lattice_control().atoms
        assert abs((a[2] - a[1]) - (a[1] - a[0])) < 1e-14
        a = np.array(rational_draw(3, 0.05, 3.0, 4).atoms)
        np.testing.assert_allclose(np.diff(a), np.diff(a)[0])


class TestEnsembles(unittest.TestCase):
    def test_scaled_error(self):
        dist = validate([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25])
        Lambda = structure_constants(dist).Lambda
        assert abs(scaled_error(dist, 2, 0.0) - 2.0 * -0.1875 / Lambda) < 1e-12

    def test_errors(self):
        with self.assertRaises(EmptyEnsemble):
            error_ensemble(2, 20, 0.0, 0, METHOD_EXACT)
        with self.assertRaises(PreconditionFailed):
            error_ensemble(2, 20, 0.0, 3, "guess")

    def test_error_ensemble(self):
        first = error_ensemble(2, 20, 0.0, 3, METHOD_EXACT, seed=4)
        second = error_ensemble(2, 20, 0.0, 3, METHOD_EXACT, seed=4)
        np.testing.assert_array_equal(first.values, second.values)
        assert first.flags == (FLAG_OK,) * 3
        dist = draw_parameters(2, KAPPA, ATOM_BOUND, child_seed(4, TAG_ERRORS, 1))
        assert first.diagnostics["atoms"][1] == list(dist.atoms)
        assert abs(first.values[1] - scaled_error(dist, 20, 0.0)) < 1e-12

    def test_resonance_ensemble(self):
        first = error_ensemble(2, 400, 0.0, 3, METHOD_RESONANCE, seed=4)
        second = error_ensemble(2, 400, 0.0, 3, METHOD_RESONANCE, seed=4)
        np.testing.assert_array_equal(first.values, second.values)
        assert first.flags == (FLAG_OK,) * 3
        assert first.label == "error-{}".format(METHOD_RESONANCE)
        dist = draw_parameters(2, KAPPA, ATOM_BOUND, child_seed(4, TAG_ERRORS, 1))
        assert abs(first.values[1] - scaled_error(dist, 400, 0.0, METHOD_RESONANCE)) < 1e-12

    def test_cache_key(self):
        key = make_cache_key("X", 2, 10, 1, {"c": 1.0})
        assert key.startswith("X-d2-")
        assert key == make_cache_key("X", 2, 10, 1, {"c": 1.0})
        assert key != make_cache_key("X", 2, 10, 2, {"c": 1.0})

    def test_reference_cache(self):
        with tempfile.TemporaryDirectory() as tmpdirname:
            config = {"CACHE_DIR": tmpdirname}
            first = reference_ensemble(2, 3, 8, cache_config=config)
            with patch(
                "edgeworth_lab.experiments.ensembles.sample_limit_ensemble"
            ) as sampler:
                second = reference_ensemble(2, 3, 8, cache_config=config)
                sampler.assert_not_called()
            np.testing.assert_array_equal(first.values, second.values)
            assert first.flags == second.flags
