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

"""Tests for `edgeworth_lab.numerics.atoms`."""

import math
import unittest

import numpy as np

from edgeworth_lab.const import CHAR_BOUND_VACUOUS
from edgeworth_lab.errors import (
    DegenerateAtoms,
    EmptyGrid,
    MeanNotZero,
    OrderOutOfRange,
    ProbInvalid,
)
from edgeworth_lab.numerics.atoms import (
    AtomicDistribution,
    atoms_from_offsets,
    char_bound_fit,
    char_fn,
    cumulant,
    d_of_s,
    modulus_deficit,
    moment,
    psi,
    sample_sum,
    is_symmetric,
    validate,
)

DSYM = ((-1.0, 0.0, 1.0), (0.25, 0.5, 0.25))


class TestValidate(unittest.TestCase):
    def test_symmetric(self):
        dist = validate(*DSYM)
        assert dist.d == 2
        assert abs(dist.sigma - 0.7071067811865476) < 1e-15
        assert dist.span == 2.0
        np.testing.assert_allclose(dist.offsets, [1.0, 2.0])

    def test_sorted(self):
        dist = validate([1.0, -1.0, 0.0], [0.25, 0.25, 0.5])
        assert dist.atoms == (-1.0, 0.0, 1.0)
        assert dist.probs == (0.25, 0.5, 0.25)

    def test_errors(self):
        with self.assertRaises(ProbInvalid):
            validate([-1, 0, 1], [0.5, 0.5, 0.5])
        with self.assertRaises(ProbInvalid):
            validate([-1, 0, 1], [-0.25, 1.0, 0.25])
        with self.assertRaises(MeanNotZero):
            validate([0, 1, 2], [1 / 3, 1 / 3, 1 / 3])
        with self.assertRaises(DegenerateAtoms):
            validate([-1, 1, 1], [0.5, 0.25, 0.25])
        # validation errors are value errors
        with self.assertRaises(ValueError):
            validate([0, 1, 2], [1 / 3, 1 / 3, 1 / 3])

    def test_dict(self):
        dist = validate(*DSYM)
        assert AtomicDistribution.from_dict(dist.to_dict()) == dist

    def test_offsets(self):
        dist = atoms_from_offsets([math.sqrt(2), 2.0], [0.25, 0.5, 0.25])
        assert abs(dist.atoms[0] + (math.sqrt(2) / 2 + 0.5)) < 1e-12
        assert abs(sum(p * a for p, a in zip(dist.probs, dist.atoms))) < 1e-12


class TestMoments(unittest.TestCase):
    def test_symmetric(self):
        dist = validate(*DSYM)
        assert moment(dist, 3) == 0.0
        assert cumulant(dist, 3) == 0.0
        assert moment(dist, 4) == 0.5
        assert abs(cumulant(dist, 4) + 0.25) < 1e-15

    def test_variance(self):
        dist = atoms_from_offsets([1.3, 2.9], [0.2, 0.5, 0.3])
        assert cumulant(dist, 2) == dist.variance
        assert cumulant(dist, 1) == 0.0

    def test_order(self):
        with self.assertRaises(OrderOutOfRange):
            moment(validate(*DSYM), 0)


class TestCharacteristicFunction(unittest.TestCase):
    def test_symmetric(self):
        dist = validate(*DSYM)
        assert abs(char_fn(dist, math.pi)) < 1e-14
        assert abs(char_fn(dist, 0.0) - 1.0) < 1e-14
        assert abs(abs(char_fn(dist, 2 * math.pi)) - 1.0) < 1e-14

    def test_modulus(self):
        dist = atoms_from_offsets([math.sqrt(2), 2.0], [0.25, 0.5, 0.25])
        s = np.linspace(0.1, 50.0, 101)
        np.testing.assert_allclose(np.abs(char_fn(dist, s)), np.abs(psi(dist, s)), atol=1e-13)
        np.testing.assert_allclose(
            modulus_deficit(dist, s), 1.0 - np.abs(psi(dist, s)) ** 2, atol=1e-13
        )

    def test_gauge(self):
        lattice = atoms_from_offsets([1.0, 2.0], [0.25, 0.5, 0.25])
        assert d_of_s(lattice, 2 * math.pi) < 1e-12
        assert abs(d_of_s(lattice, math.pi) - math.pi) < 1e-12
        irrational = atoms_from_offsets([math.sqrt(2), 2.0], [0.25, 0.5, 0.25])
        assert abs(d_of_s(irrational, math.pi) - 1.8403023) < 1e-7

    def test_char_bound(self):
        dist = validate(*DSYM)
        assert abs(char_bound_fit(dist, [math.pi]) - 1 / math.pi ** 2) < 1e-12
        assert char_bound_fit(dist, [0.0]) == CHAR_BOUND_VACUOUS
        assert char_bound_fit(dist, np.linspace(1.0, 100.0, 10 ** 4)) >= 0.0
        with self.assertRaises(EmptyGrid):
            char_bound_fit(dist, [])


class TestSampling(unittest.TestCase):
    def test_single(self):
        draws = sample_sum(validate(*DSYM), 1, 7, 100)
        assert set(draws.tolist()) <= {-1.0, 0.0, 1.0}

    def test_seed(self):
        dist = validate(*DSYM)
        np.testing.assert_array_equal(sample_sum(dist, 10, 3, 50), sample_sum(dist, 10, 3, 50))

    def test_mean(self):
        dist = validate(*DSYM)
        n, count = 10 ** 4, 10 ** 4
        draws = sample_sum(dist, n, 11, count)
        assert abs(draws.mean()) < 5 * dist.sigma * math.sqrt(n) / math.sqrt(count)

    def test_symmetry(self):
        assert is_symmetric(validate(*DSYM))
        assert not is_symmetric(atoms_from_offsets([1.3, 2.9], [0.2, 0.5, 0.3]))
