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

"""Ensemble containers and distance statistics."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy import stats

from ..const import FLAG_FAILED, FLAG_OK, FLAG_UNCONVERGED
from ..errors import EmptySample
from ..types import RealSequence

# two-sample KS quantile coefficients at 95% and 99%
KS_COEFFICIENT_95 = 1.36
KS_COEFFICIENT_99 = 1.63


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """A seeded sample of a scalar statistic.

    ``flags`` holds one status per requested draw; ``values`` and the
    ``diagnostics`` columns hold one entry per draw that did not fail.
    """

    label: str
    params: Dict[str, Any]
    seed: int
    values: np.ndarray
    flags: Tuple[str, ...]
    diagnostics: Dict[str, List[Any]] = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(flag == FLAG_FAILED for flag in self.flags)

    @property
    def unconverged_fraction(self) -> float:
        if not self.flags:
            return 0.0
        return sum(flag == FLAG_UNCONVERGED for flag in self.flags) / len(self.flags)

    @property
    def ok_fraction(self) -> float:
        if not self.flags:
            return 0.0
        return sum(flag == FLAG_OK for flag in self.flags) / len(self.flags)

    def columns(self) -> List[str]:
        return ["value"] + sorted(self.diagnostics)

    def rows(self) -> List[List[Any]]:
        names = sorted(self.diagnostics)
        return [
            [value] + [self.diagnostics[name][i] for name in names]
            for i, value in enumerate(self.values.tolist())
        ]

    def summary(self) -> Dict[str, Any]:
        values = self.values
        return {
            "label": self.label,
            "count": int(len(values)),
            "failures": self.failures,
            "unconverged_fraction": self.unconverged_fraction,
            "mean": float(np.mean(values)) if len(values) else None,
            "std": float(np.std(values, ddof=1)) if len(values) > 1 else None,
        }


def _sample(xs: RealSequence) -> np.ndarray:
    values = np.asarray(xs, dtype=float).ravel()
    if values.size == 0:
        raise EmptySample("empty sample")
    return values


def ks_two_sample(xs: RealSequence, ys: RealSequence) -> float:
    """Return sup |F_xs - F_ys| of the empirical distribution functions."""
    xs, ys = np.sort(_sample(xs)), np.sort(_sample(ys))
    merged = np.concatenate([xs, ys])
    cdf_x = np.searchsorted(xs, merged, side="right") / xs.size
    cdf_y = np.searchsorted(ys, merged, side="right") / ys.size
    return float(np.max(np.abs(cdf_x - cdf_y)))


def ks_uniform(xs: RealSequence) -> float:
    """Return the KS distance of a sample in [0, 1) to the uniform law."""
    return float(stats.kstest(_sample(xs), "uniform").statistic)


def ks_quantile(n: int, m: int, coefficient: float = KS_COEFFICIENT_95) -> float:
    """Return the asymptotic two-sample KS quantile for sizes n and m."""
    return coefficient * math.sqrt((n + m) / (n * m))


def distance_covariance(xs: RealSequence, ys: RealSequence) -> float:
    """Return the bias-corrected distance correlation of paired samples.

    The value is near 0 for independent samples and 1 for linear dependence.
    """
    xs, ys = _sample(xs), _sample(ys)
    n = len(xs)
    if n != len(ys) or n < 4:
        raise EmptySample("need at least 4 pairs")

    def centred(values):
        dist = np.abs(np.subtract.outer(values, values))
        rows = dist.sum(axis=1) / (n - 2)
        total = dist.sum() / ((n - 1) * (n - 2))
        matrix = dist - rows[:, None] - rows[None, :] + total
        np.fill_diagonal(matrix, 0.0)
        return matrix

    a, b = centred(xs), centred(ys)
    scale = n * (n - 3)
    xy = (a * b).sum() / scale
    xx = (a * a).sum() / scale
    yy = (b * b).sum() / scale
    if xx <= 0 or yy <= 0:
        return 0.0
    return float(xy / math.sqrt(xx * yy))


def trend_ok(values: Sequence[float], tolerance: float) -> bool:
    """Return whether ``values`` is non-increasing up to one rise of at most ``tolerance``."""
    rises = [b - a for a, b in zip(values, values[1:]) if b > a]
    return len(rises) <= 1 and all(rise <= tolerance for rise in rises)


def strictly_increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


def pearson(xs: RealSequence, ys: RealSequence) -> float:
    xs, ys = _sample(xs), _sample(ys)
    if len(xs) < 2 or np.std(xs) == 0 or np.std(ys) == 0:
        return 0.0
    return float(np.corrcoef(xs, ys)[0, 1])
