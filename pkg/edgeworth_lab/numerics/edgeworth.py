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

"""Edgeworth series of any order built from cumulants."""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite_e, polynomial
from scipy.special import log_ndtr, ndtr

from ..errors import OrderOutOfRange
from ..types import ComplexOrArray, RealOrArray
from .atoms import AtomicDistribution, cumulant
from .exactdist import ExactLaw, cdf_scaled, exact_law

# below this the normal CDF is evaluated as exp(log_ndtr)
LOG_TAIL = -8.0
SUP_GRID = np.linspace(-4.0, 4.0, 401)


@dataclass(frozen=True, eq=False)
class EdgeworthSeries:
    """Polynomials P_1..P_r and their Fourier duals q_1..q_r.

    ``polynomials[k - 1]`` holds the coefficients of P_k in powers of z and
    ``duals[k - 1]`` those of q_k in powers of x = i t.
    """

    order: int
    sigma: float
    polynomials: Tuple[np.ndarray, ...]
    duals: Tuple[np.ndarray, ...]
    cumulants: Tuple[float, ...]

    def to_dict(self) -> Dict:
        return {
            "r": self.order,
            "sigma": self.sigma,
            "P": [coef.tolist() for coef in self.polynomials],
        }


def hermite(k: int, z: RealOrArray) -> RealOrArray:
    """Return the probabilists' Hermite polynomial He_k(z)."""
    if k < 0:
        raise OrderOutOfRange("Hermite order must be non-negative")
    z = np.asarray(z, dtype=float)
    previous, current = np.ones_like(z), z.copy()
    if k == 0:
        current = previous
    for j in range(1, k):
        previous, current = current, z * current - j * previous
    return float(current) if current.ndim == 0 else current


def _build(dist: AtomicDistribution, r: int) -> EdgeworthSeries:
    sigma = dist.sigma
    kappas = tuple(cumulant(dist, j) for j in range(3, r + 3))
    # a_k(x) = lambda_{k+2} x^{k+2} / (k+2)!
    terms = [np.zeros(1)]
    for k in range(1, r + 1):
        coef = np.zeros(k + 3)
        coef[k + 2] = kappas[k - 1] / sigma ** (k + 2) / math.factorial(k + 2)
        terms.append(coef)
    # exp of the power series in n^{-1/2}: B_k = (1/k) sum_j j a_j B_{k-j}
    duals = [np.ones(1)]
    for k in range(1, r + 1):
        acc = np.zeros(1)
        for j in range(1, k + 1):
            acc = polynomial.polyadd(acc, j * polynomial.polymul(terms[j], duals[k - j]))
        duals.append(acc / k)
    polys = []
    for coef in duals[1:]:
        # x^m e^{-t^2/2} is the transform of He_m phi, whose CDF is -He_{m-1} phi
        herm = -np.asarray(coef[1:], dtype=float)
        polys.append(hermite_e.herme2poly(herm) if herm.size else np.zeros(1))
    return EdgeworthSeries(
        order=r,
        sigma=sigma,
        polynomials=tuple(polynomial.polytrim(p) if np.any(p) else np.zeros(1) for p in polys),
        duals=tuple(np.asarray(c, dtype=float) for c in duals[1:]),
        cumulants=kappas,
    )


@lru_cache(maxsize=512)
def _cached_build(dist: AtomicDistribution, r: int) -> EdgeworthSeries:
    return _build(dist, r)


def build_series(dist: AtomicDistribution, r: int) -> EdgeworthSeries:
    """Return the order ``r`` Edgeworth series of S_n / (sigma sqrt(n))."""
    if r < 1:
        raise OrderOutOfRange("series order must be at least 1, got {}".format(r))
    return _cached_build(dist, int(r))


def normal_cdf(z: RealOrArray) -> RealOrArray:
    """Return the standard normal CDF, log-space in the far left tail."""
    z = np.asarray(z, dtype=float)
    value = np.where(z < LOG_TAIL, np.exp(log_ndtr(np.minimum(z, 0.0))), ndtr(z))
    return float(value) if value.ndim == 0 else value


def normal_pdf(z: RealOrArray) -> RealOrArray:
    z = np.asarray(z, dtype=float)
    value = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return float(value) if value.ndim == 0 else value


def correction(series: EdgeworthSeries, z: RealOrArray, n: int) -> RealOrArray:
    """Return sum_k P_k(z) n^{-k/2}."""
    z = np.asarray(z, dtype=float)
    total = np.zeros_like(z)
    for k, coef in enumerate(series.polynomials, start=1):
        total = total + polynomial.polyval(z, coef) * n ** (-k / 2.0)
    return total


def evaluate(series: EdgeworthSeries, z: RealOrArray, n: int) -> RealOrArray:
    """Return E_r(z) = N(z) + n(z) sum_k P_k(z) / n^{k/2}."""
    value = normal_cdf(z) + normal_pdf(z) * correction(series, z, n)
    return float(value) if np.ndim(value) == 0 else value


def fourier_side(series: EdgeworthSeries, t: RealOrArray, n: int) -> ComplexOrArray:
    """Return the Fourier-Stieltjes transform of E_r at t."""
    t = np.asarray(t, dtype=float)
    total = np.ones_like(t, dtype=complex)
    for k, coef in enumerate(series.duals, start=1):
        total = total + polynomial.polyval(1j * t, coef) * n ** (-k / 2.0)
    value = np.exp(-0.5 * t * t) * total
    return complex(value) if value.ndim == 0 else value


def edgeworth_error(
    dist: AtomicDistribution,
    n: int,
    r: int,
    z: RealOrArray,
    law: Optional[ExactLaw] = None,
) -> RealOrArray:
    """Return E_r(z) - P(S_n / (sigma sqrt(n)) <= z)."""
    if law is None:
        law = exact_law(dist, n)
    series = build_series(dist, r)
    value = evaluate(series, z, n) - cdf_scaled(law, dist, z, n=n)
    return float(value) if np.ndim(value) == 0 else value


def sup_error(
    law: ExactLaw,
    series: EdgeworthSeries,
    dist: AtomicDistribution,
    z_grid: Optional[Sequence[float]] = None,
) -> float:
    """Return sup |E_r - F_n| over the grid and the scaled support inside it.

    At each support point both one-sided limits of F_n are used.
    """
    grid = SUP_GRID if z_grid is None else np.asarray(z_grid, dtype=float)
    n = law.n
    values = evaluate(series, grid, n) - cdf_scaled(law, dist, grid, n=n)
    worst = float(np.max(np.abs(values))) if grid.size else 0.0
    scale = dist.sigma * math.sqrt(n)
    lo, hi = grid.min(), grid.max()
    inside = (law.values >= lo * scale) & (law.values <= hi * scale)
    if inside.any():
        z_support = law.values[inside] / scale
        right = law.cumulative[inside]
        left = right - law.masses[inside]
        smooth = evaluate(series, z_support, n)
        worst = max(
            worst,
            float(np.max(np.abs(smooth - right))),
            float(np.max(np.abs(smooth - left))),
        )
    return worst
