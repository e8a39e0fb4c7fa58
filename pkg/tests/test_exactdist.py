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

"""Tests for `edgeworth_lab.numerics.exactdist`."""

import math
import unittest

import numpy as np

from edgeworth_lab.const import LAW_CONVOLUTION
from edgeworth_lab.errors import BadInterval, Mismatch, PreconditionFailed, TooLarge
from edgeworth_lab.experiments.sampling import draw_parameters
from edgeworth_lab.numerics.atoms import atoms_from_offsets, validate
from edgeworth_lab.numerics.exactdist import (
    brute_force_law,
    cdf_scaled,
    exact_law,
    interval_prob,
    max_jump_scan,
    support_bound,
)


def dsym():
    return validate([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25])


class TestExactLaw(unittest.TestCase):
    def test_two_steps(self):
        law = exact_law(dsym(), 2)
        np.testing.assert_allclose(law.values, [-2, -1, 0, 1, 2], atol=1e-12)
        np.testing.assert_allclose(law.masses, [1 / 16, 1 / 4, 3 / 8, 1 / 4, 1 / 16], rtol=1e-13)
        assert abs(law.total_mass - 1.0) < 1e-15

    def test_one_step(self):
        dist = atoms_from_offsets([1.3, 2.9], [0.2, 0.5, 0.3])
        law = exact_law(dist, 1)
        np.testing.assert_allclose(law.values, dist.atoms)
        np.testing.assert_allclose(law.masses, dist.probs)

    def test_brute_force(self):
        for d in (2, 3):
            for index in range(5):
                dist = draw_parameters(d, 0.05, 3.0, 100 * d + index)
                for n in (1, 3, 6):
                    law = exact_law(dist, n)
                    oracle = brute_force_law(dist, n)
                    assert len(law) == len(oracle) == support_bound(n, d)
                    np.testing.assert_allclose(law.values, oracle.values, rtol=0, atol=1e-12)
                    np.testing.assert_allclose(law.masses, oracle.masses, rtol=0, atol=1e-13)

    def test_brute_force_lattice(self):
        law = brute_force_law(dsym(), 8)
        other = exact_law(dsym(), 8, merge_tol=1e-12)
        np.testing.assert_allclose(law.masses, other.masses, rtol=0, atol=1e-13)

    def test_convolution(self):
        dist = draw_parameters(2, 0.05, 3.0, 5)
        law = exact_law(dist, 12)
        other = exact_law(dist, 12, method=LAW_CONVOLUTION)
        np.testing.assert_allclose(law.values, other.values, atol=1e-10)
        np.testing.assert_allclose(law.masses, other.masses, atol=1e-13)

    def test_cap(self):
        with self.assertRaises(TooLarge):
            exact_law(dsym(), 10 ** 5)
        with self.assertRaises(TooLarge):
            brute_force_law(dsym(), 20)
        with self.assertRaises(PreconditionFailed):
            exact_law(dsym(), 0)


class TestCdf(unittest.TestCase):
    def test_two_steps(self):
        dist = dsym()
        law = exact_law(dist, 2)
        # sigma sqrt(2) = 1, so the scaled support is the integer support
        assert abs(cdf_scaled(law, dist, 0.0) - 0.6875) < 1e-14
        assert cdf_scaled(law, dist, -2.5) == 0.0
        assert abs(cdf_scaled(law, dist, 2.5) - 1.0) < 1e-14
        np.testing.assert_allclose(
            cdf_scaled(law, dist, np.array([-2.0, -1.5, 1.0])), [1 / 16, 1 / 16, 15 / 16]
        )

    def test_mismatch(self):
        law = exact_law(dsym(), 2)
        with self.assertRaises(Mismatch):
            cdf_scaled(law, dsym(), 0.0, n=3)
        with self.assertRaises(Mismatch):
            cdf_scaled(law, atoms_from_offsets([1.3, 2.9], [0.2, 0.5, 0.3]), 0.0)


class TestIntervals(unittest.TestCase):
    def test_center(self):
        dist = dsym()
        law = exact_law(dist, 2)
        assert abs(interval_prob(law, dist, -0.1, 0.1) - 0.375) < 1e-14

    def test_open(self):
        dist = dsym()
        law = exact_law(dist, 2)
        assert abs(interval_prob(law, dist, -2.0, 2.0) - (1.0 - 1 / 8)) < 1e-14
        assert interval_prob(law, dist, 0.2, 0.8) == 0.0

    def test_bad(self):
        dist = dsym()
        law = exact_law(dist, 2)
        with self.assertRaises(BadInterval):
            interval_prob(law, dist, 1.0, 1.0)


class TestJumps(unittest.TestCase):
    def test_center(self):
        ((n, value),) = max_jump_scan(dsym(), [2], 0.5)
        assert n == 2
        assert abs(value - 0.75) < 1e-14

    def test_one_step(self):
        dist = atoms_from_offsets([1.3, 2.9], [0.2, 0.5, 0.3])
        ((_, value),) = max_jump_scan(dist, [1], 100.0)
        assert abs(value - 0.5) < 1e-14

    def test_floor(self):
        dist = atoms_from_offsets(
            [math.sqrt(2), 2.0], [0.25, 0.5, 0.25]
        )
        scan = max_jump_scan(dist, range(100, 1001, 100), 1.0)
        values = [value for _, value in scan]
        assert min(values) > 0.0
        assert max(values) / min(values) <= 10.0
