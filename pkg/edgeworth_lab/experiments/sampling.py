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

"""Random atomic distributions for the ensembles."""

import logging
from typing import Sequence

import numpy as np

from ..const import GOLDEN_RATIO
from ..errors import PreconditionFailed, RejectionBudget
from ..numerics.atoms import AtomicDistribution, atoms_from_offsets, validate
from ..util import stream

LOG = logging.getLogger(__name__)

# draws before giving up, i.e. the lowest acceptance rate tolerated is 1e-4
MAX_ATTEMPTS = 10 ** 4
BUMP_SHAPE = 2.0


def _feasible(d: int, kappa: float, M: float) -> bool:
    return kappa > 0 and (d + 1) * kappa < 1.0 and d * kappa < 2.0 * M


def _accept(a: np.ndarray, p: np.ndarray, kappa: float, M: float) -> bool:
    return bool(
        p.min() >= kappa and np.diff(a).min() >= kappa and np.abs(a).max() <= M
    )


def draw_parameters(d: int, kappa: float, M: float, seed: int) -> AtomicDistribution:
    """Draw a distribution from a smooth density on the set with
    min p_i >= kappa, min |a_i - a_j| >= kappa and max |a_i| <= M.

    Weights and offsets b_2 < ... < b_{d+1} come from Beta(2, 2) bumps; a_1
    is then fixed by the mean-zero constraint and the draw is accepted when
    it lies in the set.
    """
    if d < 2 or not _feasible(d, kappa, M):
        raise PreconditionFailed(
            "no distributions with d={}, kappa={}, M={}".format(d, kappa, M)
        )
    rng = stream(seed)
    for _ in range(MAX_ATTEMPTS):
        weights = rng.beta(BUMP_SHAPE, BUMP_SHAPE, size=d + 1)
        p = weights / weights.sum()
        offsets = np.sort(rng.beta(BUMP_SHAPE, BUMP_SHAPE, size=d)) * 2.0 * M
        a = np.concatenate([[0.0], offsets])
        a = a - float(p @ a)
        if _accept(a, p, kappa, M):
            return validate(a, p)
    raise RejectionBudget(
        "no draw accepted in {} attempts for kappa={}, M={}".format(MAX_ATTEMPTS, kappa, M)
    )


def golden_distribution(probs: Sequence[float] = (0.3, 0.4, 0.3)) -> AtomicDistribution:
    """Return a d = 2 law whose offset ratio b_2 / b_3 is 1 / golden ratio."""
    return atoms_from_offsets([1.0, GOLDEN_RATIO], probs)


def lattice_control(probs: Sequence[float] = (0.3, 0.4, 0.3)) -> AtomicDistribution:
    """Return a d = 2 law on an arithmetic progression, offsets (1, 2)."""
    return atoms_from_offsets([1.0, 2.0], probs)


def rational_draw(d: int, kappa: float, M: float, seed: int) -> AtomicDistribution:
    """Draw like :func:`draw_parameters`, then move the offsets to (1, 2, ..., d) / d of the span.

    All such laws share the lattice L(n, a), which makes them a control for
    equidistribution.
    """
    dist = draw_parameters(d, kappa, M, seed)
    offsets = dist.span * np.arange(1, d + 1) / d
    return atoms_from_offsets(offsets, dist.probs)
