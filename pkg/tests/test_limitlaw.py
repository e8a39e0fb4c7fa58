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

"""Tests for `edgeworth_lab.numerics.limitlaw`."""

import math
import unittest

import numpy as np

from edgeworth_lab.const import FLAG_OK, FLAG_UNCONVERGED, LIMIT_HAT_X, LIMIT_X, LIMIT_Y
from edgeworth_lab.errors import BadWindow, EmptyEnsemble, PreconditionFailed, ZeroC
from edgeworth_lab.numerics.atoms import atoms_from_offsets
from edgeworth_lab.numerics.lattice import (
    Character,
    character_of,
    from_basis,
    haar_sample,
    lattice_of,
    reduce,
    transform,
)
from edgeworth_lab.numerics.limitlaw import (
    SeriesEvaluation,
    adaptive,
    change_of_variables,
    dyadic_radii,
    hat_X,
    restricted_X,
    sample_limit_ensemble,
    script_X,
    script_Y,
    taper,
)
from edgeworth_lab.numerics.resonance import structure_constants, tilde_delta


def generic():
    return atoms_from_offsets([math.sqrt(2), 2.0], [0.3, 0.4, 0.3])


class TestTaper(unittest.TestCase):
    def test_values(self):
        assert taper(0.0) == 1.0
        assert taper(0.5) == 1.0
        assert taper(1.0) == 0.0
        assert taper(2.0) == 0.0
        assert abs(taper(0.75) - 0.5) < 1e-15

    def test_monotone(self):
        values = taper(np.linspace(0.0, 1.2, 121))
        assert np.all(np.diff(values) <= 0.0)

    def test_dyadic(self):
        np.testing.assert_allclose(dyadic_radii(4, 0.5), [16, 20, 24, 28, 32])
        with self.assertRaises(PreconditionFailed):
            dyadic_radii(4, 1.0)


class TestScriptX(unittest.TestCase):
    def test_trivial_character(self):
        pair = haar_sample(2, 5)
        result = script_X(pair.lattice, Character(theta=(0.0, 0.0)), 20.0)
        assert result.value == 0.0

    def test_negation(self):
        pair = haar_sample(2, 5)
        value = script_X(pair.lattice, pair.character, 32.0).value
        negated = script_X(pair.lattice, pair.character.negate(), 32.0).value
        assert abs(value + negated) < 1e-9

    def test_square(self):
        # X(Z^2, (1/4, 0)) = (pi / 2) sum_m exp(-m^2)
        L = from_basis(np.eye(2))
        theta = Character(theta=(0.25, 0.0))
        gaussian = math.fsum(math.exp(-m * m) for m in range(-10, 11))
        result = script_X(L, theta, 400.0, smooth=True)
        assert abs(result.value - 0.5 * math.pi * gaussian) < 2e-3

    def test_radius(self):
        pair = haar_sample(2, 5)
        with self.assertRaises(PreconditionFailed):
            script_X(pair.lattice, pair.character, 1.5 * pair.lattice.shortest)
        with self.assertRaises(PreconditionFailed):
            script_X(pair.lattice, pair.character, 20.0, truncation="cube")

    def test_diagnostics(self):
        pair = haar_sample(2, 5)
        result = script_X(pair.lattice, pair.character, 64.0)
        assert result.R_final == 64.0
        assert result.term_count > 0
        assert result.cauchy_residual >= 0.0
        assert set(result.to_dict()) == {
            "value",
            "R_final",
            "cauchy_residual",
            "term_count",
            "converged",
        }


class TestScriptY(unittest.TestCase):
    def test_integer_window(self):
        L = from_basis(np.eye(2))
        result = script_Y(L, Character(theta=(0.0, 0.0)), 1.0, 50.0)
        assert abs(result.value) < 1e-10

    def test_zero(self):
        pair = haar_sample(2, 5)
        with self.assertRaises(ZeroC):
            script_Y(pair.lattice, pair.character, 0.0, 20.0)


class TestHatX(unittest.TestCase):
    def test_change_of_variables(self):
        dist = generic()
        constants = structure_constants(dist)
        A = change_of_variables(constants)
        assert abs(np.linalg.det(A) - 1.0) < 1e-12
        pair = haar_sample(2, 9)
        image = transform(pair.lattice, pair.character, A)
        z, R = 0.5, 40.0
        value = hat_X(dist, pair.lattice, pair.character, z, R, truncation="slab").value
        expected = (
            math.exp(-0.5 * z * z)
            * constants.Lambda
            * script_X(image.lattice, image.character, R * A[0, 0], truncation="slab").value
        )
        assert abs(value - expected) <= 1e-6 * max(abs(expected), 1e-3)

    def test_gaussian_in_z(self):
        dist = generic()
        pair = haar_sample(2, 9)
        centre = hat_X(dist, pair.lattice, pair.character, 0.0, 30.0).value
        shifted = hat_X(dist, pair.lattice, pair.character, 1.2, 30.0).value
        assert abs(shifted - math.exp(-0.72) * centre) < 1e-12 * max(abs(centre), 1.0)


class TestRestrictedX(unittest.TestCase):
    def test_matches_resonant_window(self):
        dist = generic()
        n = 101
        L = reduce(lattice_of(n, dist))
        for z in (0.0, 0.7):
            chi = character_of(n, dist, z, L)
            value = restricted_X(dist, L, chi, z, 4.0, 0.05).value
            expected = n * tilde_delta(dist, n, z, delta=0.05, K=4.0)
            assert abs(value - expected) <= 1e-9 + 1e-8 * abs(expected)

    def test_window(self):
        dist = generic()
        L = reduce(lattice_of(101, dist))
        chi = character_of(101, dist, 0.0, L)
        with self.assertRaises(BadWindow):
            restricted_X(dist, L, chi, 0.0, 1.0, 2.0)


class TestAdaptive(unittest.TestCase):
    @staticmethod
    def fake(R):
        return SeriesEvaluation(value=1.0 / R, R_final=R, cauchy_residual=1.0 / R, term_count=0)

    def test_converges(self):
        result = adaptive(self.fake, 1.0, cauchy_tol=0.1)
        assert result.R_final == 16.0
        assert result.converged

    def test_cap(self):
        result = adaptive(self.fake, 1.0, cauchy_tol=0.1, max_doublings=3)
        assert result.R_final == 8.0
        assert not result.converged

    def test_start_above_cap(self):
        radii = []

        def record(R):
            radii.append(R)
            return self.fake(R)

        with self.assertLogs("edgeworth_lab.numerics.limitlaw", level="WARNING"):
            result = adaptive(record, 0.25, cauchy_tol=0.1, max_doublings=3)
        assert radii == [2.0]
        assert result.R_final == 2.0
        assert not result.converged

    def test_no_doublings(self):
        with self.assertRaises(PreconditionFailed):
            adaptive(self.fake, 1.0, max_doublings=0)


class TestEnsemble(unittest.TestCase):
    def test_empty(self):
        with self.assertRaises(EmptyEnsemble):
            sample_limit_ensemble(2, LIMIT_X, {}, 0, 1)

    def test_kind(self):
        with self.assertRaises(PreconditionFailed):
            sample_limit_ensemble(2, "Z", {}, 3, 1)

    def test_seed(self):
        first = sample_limit_ensemble(2, LIMIT_X, {}, 6, 17)
        second = sample_limit_ensemble(2, LIMIT_X, {}, 6, 17)
        np.testing.assert_array_equal(first.values, second.values)
        assert len(first.flags) == 6
        assert set(first.flags) <= {FLAG_OK, FLAG_UNCONVERGED}
        assert first.columns() == [
            "value",
            "R_final",
            "cauchy_residual",
            "converged",
            "draw_index",
        ]

    def test_window_kind(self):
        ensemble = sample_limit_ensemble(2, LIMIT_Y, {"c": 1.0}, 4, 3)
        assert len(ensemble.flags) == 4
        assert ensemble.label == "limit-{}".format(LIMIT_Y)

    def test_hat_kind(self):
        dist = generic()
        params = {"atoms": list(dist.atoms), "probs": list(dist.probs), "z": 0.0}
        ensemble = sample_limit_ensemble(2, LIMIT_HAT_X, params, 3, 3)
        assert len(ensemble.flags) == 3
        with self.assertRaises(PreconditionFailed):
            sample_limit_ensemble(3, LIMIT_HAT_X, params, 3, 3)
