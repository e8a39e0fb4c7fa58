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

"""Exact law of S_n for atomic summands."""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb, gammaln

from ..const import LAW_METHODS, LAW_MULTINOMIAL
from ..errors import BadInterval, Mismatch, PreconditionFailed, TooLarge
from ..types import RealOrArray
from .atoms import AtomicDistribution

LOG = logging.getLogger(__name__)

DEFAULT_SUPPORT_CAP = 2e8
DEFAULT_BRUTE_FORCE_CAP = 1e7
DEFAULT_MERGE_TOL = 1e-9
# masses below this are dropped and accounted in dropped_mass
LOG_MASS_FLOOR = math.log(1e-320)


@dataclass(frozen=True, eq=False)
class ExactLaw:
    """Finite support and masses of S_n."""

    n: int
    values: np.ndarray
    masses: np.ndarray
    merge_tol: float
    atoms: Tuple[float, ...] = field(default=())
    dropped_mass: float = 0.0

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.masses)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    def __len__(self) -> int:
        return len(self.values)

    def to_rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.values.tolist(), self.masses.tolist()))


def support_bound(n: int, d: int) -> int:
    """Return the number of compositions of n into d + 1 parts."""
    return int(comb(n + d, d, exact=True))


def merge_values(
    values: np.ndarray, masses: np.ndarray, merge_tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Sort values and merge neighbours closer than ``merge_tol``.

    A merged group keeps its smallest value and the total of its masses.
    """
    order = np.argsort(values, kind="stable")
    values, masses = values[order], masses[order]
    if len(values) == 0:
        return values, masses
    starts = np.flatnonzero(np.concatenate([[True], np.diff(values) > merge_tol]))
    return values[starts], np.add.reduceat(masses, starts)


def _compositions(total: int, parts: int) -> Iterator[np.ndarray]:
    """Yield all compositions of ``total`` into ``parts`` parts, in blocks."""
    if parts == 1:
        yield np.array([[total]], dtype=np.int64)
    elif parts == 2:
        head = np.arange(total + 1, dtype=np.int64)
        yield np.column_stack([head, total - head])
    else:
        for head in range(total + 1):
            for block in _compositions(total - head, parts - 1):
                lead = np.full((len(block), 1), head, dtype=np.int64)
                yield np.hstack([lead, block])


def _multinomial_law(dist: AtomicDistribution, n: int):
    log_factorial = gammaln(np.arange(n + 1, dtype=float) + 1.0)
    log_p = np.log(dist.p)
    values, log_masses = [], []
    for block in _compositions(n, dist.d + 1):
        values.append(block @ dist.a)
        log_masses.append(
            log_factorial[n] - log_factorial[block].sum(axis=1) + block @ log_p
        )
    values = np.concatenate(values)
    log_masses = np.concatenate(log_masses)
    keep = log_masses >= LOG_MASS_FLOOR
    dropped = float(np.exp(log_masses[~keep]).sum()) if not keep.all() else 0.0
    return values[keep], np.exp(log_masses[keep]), dropped


def _convolve(left, right, merge_tol: float, cap: float):
    size = len(left[0]) * len(right[0])
    if size > cap:
        raise TooLarge("convolution of {} points exceeds cap {:g}".format(size, cap))
    values = np.add.outer(left[0], right[0]).ravel()
    masses = np.multiply.outer(left[1], right[1]).ravel()
    return merge_values(values, masses, merge_tol)


def _convolution_law(dist: AtomicDistribution, n: int, merge_tol: float, cap: float):
    base = merge_values(dist.a.copy(), dist.p.copy(), merge_tol)
    result = None
    power = n
    while power:
        if power & 1:
            result = base if result is None else _convolve(result, base, merge_tol, cap)
        power >>= 1
        if power:
            base = _convolve(base, base, merge_tol, cap)
    return result[0], result[1], 0.0


def exact_law(
    dist: AtomicDistribution,
    n: int,
    merge_tol: Optional[float] = None,
    method: str = LAW_MULTINOMIAL,
    cap: float = DEFAULT_SUPPORT_CAP,
) -> ExactLaw:
    """Return the exact law of S_n.

    ``merge_tol`` is absolute and defaults to 1e-9 times the atom scale.
    The multinomial engine sums the closed-form multinomial masses in the
    log domain; the convolution engine squares the law repeatedly and merges
    after every step.
    """
    if n < 1:
        raise PreconditionFailed("n must be at least 1, got {}".format(n))
    if merge_tol is None:
        merge_tol = DEFAULT_MERGE_TOL * dist.m_bound
    if merge_tol < 0:
        raise PreconditionFailed("merge_tol must be non-negative")
    if method not in LAW_METHODS:
        raise PreconditionFailed("unknown law method {}".format(method))
    projected = support_bound(n, dist.d)
    if method == LAW_MULTINOMIAL:
        if projected > cap:
            raise TooLarge(
                "support of {} points exceeds cap {:g}".format(projected, cap)
            )
        values, masses, dropped = _multinomial_law(dist, n)
        values, masses = merge_values(values, masses, merge_tol)
    else:
        values, masses, dropped = _convolution_law(dist, n, merge_tol, cap)
    LOG.debug("Law of S_{} has {} support points".format(n, len(values)))
    return ExactLaw(
        n=n,
        values=values,
        masses=masses,
        merge_tol=float(merge_tol),
        atoms=dist.atoms,
        dropped_mass=dropped,
    )


def brute_force_law(
    dist: AtomicDistribution, n: int, cap: float = DEFAULT_BRUTE_FORCE_CAP
) -> ExactLaw:
    """Return the law of S_n by enumerating all (d+1)^n outcome strings."""
    if n < 1:
        raise PreconditionFailed("n must be at least 1, got {}".format(n))
    if (dist.d + 1) ** n > cap:
        raise TooLarge("{} outcome strings exceed cap {:g}".format((dist.d + 1) ** n, cap))
    values, masses = dist.a.copy(), dist.p.copy()
    for _ in range(n - 1):
        values = np.add.outer(values, dist.a).ravel()
        masses = np.multiply.outer(masses, dist.p).ravel()
    merge_tol = 1e-12 * dist.m_bound
    values, masses = merge_values(values, masses, merge_tol)
    return ExactLaw(
        n=n, values=values, masses=masses, merge_tol=merge_tol, atoms=dist.atoms
    )


def _check(law: ExactLaw, dist: AtomicDistribution, n: Optional[int]) -> None:
    if n is not None and n != law.n:
        raise Mismatch("law is for n={}, caller expects n={}".format(law.n, n))
    if law.atoms and tuple(law.atoms) != tuple(dist.atoms):
        raise Mismatch("law was built for different atoms")


def _slack(law: ExactLaw, threshold: float) -> float:
    return 0.5 * law.merge_tol + 1e-14 * max(1.0, abs(threshold))


def scale(law: ExactLaw, dist: AtomicDistribution) -> float:
    """Return sigma sqrt(n)."""
    return dist.sigma * math.sqrt(law.n)


def cdf_scaled(
    law: ExactLaw, dist: AtomicDistribution, z: RealOrArray, n: Optional[int] = None
) -> RealOrArray:
    """Return P(S_n / (sigma sqrt(n)) <= z), right-continuous in z."""
    _check(law, dist, n)
    threshold = np.asarray(z, dtype=float) * scale(law, dist)
    slack = 0.5 * law.merge_tol + 1e-14 * np.maximum(1.0, np.abs(threshold))
    index = np.searchsorted(law.values, threshold + slack, side="right")
    padded = np.concatenate([[0.0], np.minimum(law.cumulative, 1.0)])
    value = padded[index]
    return float(value) if value.ndim == 0 else value


def interval_prob(
    law: ExactLaw,
    dist: AtomicDistribution,
    z1: float,
    z2: float,
    n: Optional[int] = None,
) -> float:
    """Return P(z1 < S_n / (sigma sqrt(n)) < z2), endpoints excluded."""
    if not z1 < z2:
        raise BadInterval("need z1 < z2, got {} >= {}".format(z1, z2))
    _check(law, dist, n)
    t1, t2 = z1 * scale(law, dist), z2 * scale(law, dist)
    lo = np.searchsorted(law.values, t1 + _slack(law, t1), side="right")
    hi = np.searchsorted(law.values, t2 - _slack(law, t2), side="left")
    if hi <= lo:
        return 0.0
    return math.fsum(law.masses[lo:hi])


def max_jump_scan(
    dist: AtomicDistribution,
    n_list: Sequence[int],
    window_z: float,
    **law_options
) -> List[Tuple[int, float]]:
    """Return n^{d/2} times the largest mass with |v| <= window_z sigma sqrt(n)."""
    scan = []
    for n in n_list:
        law = exact_law(dist, n, **law_options)
        window = np.abs(law.values) <= window_z * scale(law, dist)
        peak = float(law.masses[window].max()) if window.any() else 0.0
        scan.append((int(n), peak * n ** (dist.d / 2.0)))
    return scan
