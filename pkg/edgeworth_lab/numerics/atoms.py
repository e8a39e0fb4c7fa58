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

"""Mean-zero distributions with finitely many atoms."""

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import comb

from ..const import CHAR_BOUND_VACUOUS
from ..errors import (
    DegenerateAtoms,
    EmptyGrid,
    MeanNotZero,
    OrderOutOfRange,
    PreconditionFailed,
    ProbInvalid,
)
from ..types import ComplexOrArray, RealOrArray, RealSequence
from ..util import circular_distance, reduce_angle, stream

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class AtomicDistribution:
    """A centered law on d + 1 sorted atoms.

    Instances are built by :func:`validate`, which sorts, checks and
    normalizes the input.
    """

    atoms: Tuple[float, ...]
    probs: Tuple[float, ...]

    @cached_property
    def a(self) -> np.ndarray:
        return np.array(self.atoms, dtype=float)

    @cached_property
    def p(self) -> np.ndarray:
        return np.array(self.probs, dtype=float)

    @property
    def d(self) -> int:
        return len(self.atoms) - 1

    @cached_property
    def shifts(self) -> np.ndarray:
        """Return a_j - a_1 for all atoms, starting with 0."""
        return self.a - self.a[0]

    @property
    def offsets(self) -> np.ndarray:
        """Return b_2, ..., b_{d+1}."""
        return self.shifts[1:]

    @property
    def span(self) -> float:
        """Return |b_{d+1}| = a_{d+1} - a_1."""
        return float(self.atoms[-1] - self.atoms[0])

    @cached_property
    def variance(self) -> float:
        return math.fsum(self.p * self.a ** 2)

    @cached_property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    @cached_property
    def kappa_margin(self) -> float:
        return float(min(self.p.min(), np.diff(self.a).min()))

    @cached_property
    def m_bound(self) -> float:
        return float(np.abs(self.a).max())

    def to_dict(self) -> Dict[str, List[float]]:
        return {"atoms": list(self.atoms), "probs": list(self.probs)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], tol: float = DEFAULT_TOL):
        return validate(data["atoms"], data["probs"], tol=tol)


def validate(
    atoms: RealSequence, probs: RealSequence, tol: float = DEFAULT_TOL
) -> AtomicDistribution:
    """Validate atoms and probabilities and return the distribution.

    Atoms are sorted ascending with the probabilities permuted alongside.
    Probabilities are normalized and a mean below ``tol`` times the atom
    scale is removed by shifting all atoms.
    """
    a = np.asarray(atoms, dtype=float).ravel()
    p = np.asarray(probs, dtype=float).ravel()
    if len(a) != len(p) or len(a) < 3:
        raise PreconditionFailed(
            "need equally many atoms and probabilities, at least 3 of each"
        )
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(p))):
        raise ProbInvalid("atoms and probabilities must be finite")
    if np.any(p <= 0) or abs(math.fsum(p) - 1.0) > tol:
        raise ProbInvalid("probabilities must be positive and sum to 1")
    order = np.argsort(a, kind="stable")
    a, p = a[order], p[order]
    scale = float(np.abs(a).max())
    if np.any(np.diff(a) <= tol * max(scale, 1.0)):
        raise DegenerateAtoms("atoms must be pairwise distinct")
    p = p / math.fsum(p)
    mean = math.fsum(p * a)
    if abs(mean) > tol * scale:
        raise MeanNotZero("mean {:.17g} is not zero".format(mean))
    if mean != 0.0:
        a = a - mean
    return AtomicDistribution(
        atoms=tuple(float(x) for x in a), probs=tuple(float(x) for x in p)
    )


def moment(dist: AtomicDistribution, k: int) -> float:
    """Return E(X^k)."""
    if k < 1:
        raise OrderOutOfRange("moment order must be at least 1, got {}".format(k))
    return math.fsum(dist.p * dist.a ** k)


@lru_cache(maxsize=256)
def _cumulants(dist: AtomicDistribution, kmax: int) -> Tuple[float, ...]:
    moments = [1.0, 0.0] + [moment(dist, k) for k in range(2, kmax + 1)]
    moments[2] = dist.variance
    kappa = [0.0, 0.0]
    for order in range(2, kmax + 1):
        value = moments[order] - math.fsum(
            comb(order - 1, j - 1, exact=True) * kappa[j] * moments[order - j]
            for j in range(1, order)
        )
        kappa.append(value)
    return tuple(kappa)


def cumulant(dist: AtomicDistribution, k: int) -> float:
    """Return the cumulant of order ``k``.

    Uses the moment recursion with the first moment set to zero, so that the
    second cumulant is the variance exactly.
    """
    if k < 1:
        raise OrderOutOfRange("cumulant order must be at least 1, got {}".format(k))
    return _cumulants(dist, max(k, 2))[k]


def _phases(values: np.ndarray, s: RealOrArray) -> np.ndarray:
    return reduce_angle(np.multiply.outer(np.asarray(s, dtype=float), values))


def char_fn(dist: AtomicDistribution, s: RealOrArray) -> ComplexOrArray:
    """Return phi(s) = sum_j p_j exp(i s a_j)."""
    value = (dist.p * np.exp(1j * _phases(dist.a, s))).sum(axis=-1)
    return complex(value) if np.ndim(value) == 0 else value


def psi(dist: AtomicDistribution, s: RealOrArray) -> ComplexOrArray:
    """Return psi(s) = p_1 + sum_{j>1} p_j exp(i s b_j)."""
    value = (dist.p * np.exp(1j * _phases(dist.shifts, s))).sum(axis=-1)
    return complex(value) if np.ndim(value) == 0 else value


def modulus_deficit(dist: AtomicDistribution, s: RealOrArray) -> RealOrArray:
    """Return 1 - |psi(s)|^2 without cancellation.

    Uses 1 - |psi|^2 = 4 sum_{l<j} p_l p_j sin^2(s (a_j - a_l) / 2).
    """
    left, right = np.triu_indices(dist.d + 1, k=1)
    gaps = dist.a[right] - dist.a[left]
    weights = dist.p[left] * dist.p[right]
    half = 0.5 * _phases(gaps, s)
    value = 4.0 * (weights * np.sin(half) ** 2).sum(axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def deficit_slope(dist: AtomicDistribution, s: RealOrArray) -> RealOrArray:
    """Return the derivative in s of :func:`modulus_deficit`."""
    left, right = np.triu_indices(dist.d + 1, k=1)
    gaps = dist.a[right] - dist.a[left]
    weights = 2.0 * dist.p[left] * dist.p[right] * gaps
    value = (weights * np.sin(_phases(gaps, s))).sum(axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def d_of_s(dist: AtomicDistribution, s: RealOrArray) -> RealOrArray:
    """Return max_j dist(b_j s, 2 pi Z), in [0, pi]."""
    value = circular_distance(np.multiply.outer(np.asarray(s, dtype=float), dist.offsets))
    value = np.max(value, axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def char_bound_fit(dist: AtomicDistribution, s_grid: RealSequence) -> float:
    """Return the largest c with |phi(s)| <= 1 - c d(s)^2 on the grid.

    Points with d(s) = 0 impose no constraint; a grid made only of such
    points returns ``CHAR_BOUND_VACUOUS``.
    """
    grid = np.asarray(s_grid, dtype=float).ravel()
    if grid.size == 0:
        raise EmptyGrid("empty grid")
    gauge = np.atleast_1d(d_of_s(dist, grid))
    mask = gauge > 0.0
    if not np.any(mask):
        return CHAR_BOUND_VACUOUS
    grid, gauge = grid[mask], gauge[mask]
    deficit = np.atleast_1d(modulus_deficit(dist, grid))
    modulus = np.sqrt(np.clip(1.0 - deficit, 0.0, 1.0))
    return float(np.min(deficit / (1.0 + modulus) / gauge ** 2))


def sample_sum(
    dist: AtomicDistribution, n: int, rng_seed: int, count: int
) -> np.ndarray:
    """Return ``count`` independent draws of S_n."""
    if n < 1 or count < 1:
        raise PreconditionFailed("need n >= 1 and count >= 1")
    rng = stream(rng_seed)
    counts = rng.multinomial(n, dist.p, size=count)
    return counts @ dist.a


def is_symmetric(dist: AtomicDistribution, tol: float = 1e-12) -> bool:
    """Return whether the law of X equals the law of -X."""
    return bool(
        np.allclose(dist.a, -dist.a[::-1], atol=tol * max(dist.m_bound, 1.0))
        and np.allclose(dist.p, dist.p[::-1], atol=tol)
    )


def atoms_from_offsets(offsets: Sequence[float], probs: Sequence[float]) -> AtomicDistribution:
    """Return the centered distribution with the given offsets b_2, ..., b_{d+1}."""
    b = np.concatenate([[0.0], np.asarray(offsets, dtype=float)])
    p = np.asarray(probs, dtype=float)
    a1 = -math.fsum(p[1:] * b[1:]) / math.fsum(p)
    return validate(b + a1, p)
