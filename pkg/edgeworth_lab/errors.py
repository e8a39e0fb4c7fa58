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

"""Exceptions raised by the laboratory.

Every error carries the exit code the command line interface reports for it.
Validation errors are also ``ValueError`` instances, numeric failures are
``ArithmeticError`` instances.
"""

from .const import EXIT_NUMERIC, EXIT_VALIDATION


class LabError(Exception):
    """Base class of all laboratory errors."""

    code = EXIT_NUMERIC

    @property
    def name(self) -> str:
        """Return the error name used in ``E:<code>:<name>`` messages."""
        return type(self).__name__


class ValidationFailure(LabError, ValueError):
    """Invalid input."""

    code = EXIT_VALIDATION


class NumericFailure(LabError, ArithmeticError):
    """A computation could not deliver the requested accuracy or size."""

    code = EXIT_NUMERIC


class MeanNotZero(ValidationFailure):
    """The atomic law is not centered."""


class ProbInvalid(ValidationFailure):
    """Probabilities are not positive or do not sum to one."""


class DegenerateAtoms(ValidationFailure):
    """Two atoms coincide."""


class OrderOutOfRange(ValidationFailure):
    """A moment, cumulant or series order is out of range."""


class EmptyGrid(ValidationFailure):
    """An evaluation grid is empty."""


class Mismatch(ValidationFailure):
    """An object was built for different parameters than the caller's."""


class BadInterval(ValidationFailure):
    """An interval has z1 >= z2."""


class BadWindow(ValidationFailure):
    """A (delta, K) window is empty or inverted."""


class ZeroC(ValidationFailure):
    """The window constant c is zero."""


class UnsupportedDim(ValidationFailure):
    """The dimension is outside the supported range."""


class EmptySample(ValidationFailure):
    """A statistic was requested on an empty sample."""


class EmptyEnsemble(ValidationFailure):
    """An ensemble of size zero was requested."""


class PreconditionFailed(ValidationFailure):
    """A documented precondition does not hold."""


class ConfigError(ValidationFailure):
    """The configuration file cannot be used."""


class IoError(LabError):
    """An output file cannot be written."""

    code = EXIT_VALIDATION


class TooLarge(NumericFailure):
    """The projected support exceeds the configured cap."""


class BudgetExceeded(NumericFailure):
    """A lattice enumeration exceeds its budget."""


class QuadratureFail(NumericFailure):
    """Quadrature error estimates exceed the tolerance."""


class OptimizerFail(NumericFailure):
    """Coarse scan and refinement of a peak disagree."""


class SingularD(NumericFailure):
    """The quadratic form D is singular."""


class NumericalRankLoss(NumericFailure):
    """A lattice basis is too badly conditioned to reduce."""


class NearZeroY(NumericFailure):
    """An enumerated lattice vector has a vanishing first coordinate."""


class NotResonant(NumericFailure):
    """A resonant-only formula was applied to a non-resonant term."""


class RejectionBudget(NumericFailure):
    """The rejection sampler's acceptance rate is too small."""
