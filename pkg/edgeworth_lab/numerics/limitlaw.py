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

"""Limiting random variables as lattice sums.

All sums run over nonzero lattice vectors w with weights sin(2 pi chi(w)) / y(w)
times a Gaussian in x(w). The sums converge only conditionally in y, so every
evaluation reports its truncation radius and the change against the sum at
half the radius.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from ..const import (
    FLAG_FAILED,
    FLAG_OK,
    FLAG_UNCONVERGED,
    LIMIT_KINDS,
    LIMIT_X,
    LIMIT_Y,
    SINE_ZERO,
    TWO_PI,
)
from ..errors import (
    BadWindow,
    EmptyEnsemble,
    NearZeroY,
    NumericFailure,
    PreconditionFailed,
    ZeroC,
)
from ..experiments.stats import EnsembleResult
from ..util import child_seed, parallel_map
from .atoms import AtomicDistribution, validate
from .lattice import Character, UnimodularLattice, enumerate_slab, haar_sample
from .resonance import StructureConstants, structure_constants

LOG = logging.getLogger(__name__)

Y_GUARD = 1e-12
CAUCHY_TOL = 1e-3
MAX_DOUBLINGS = 10
MIN_RADIUS = 4.0
RESAMPLE_LIMIT = 8
UNCONVERGED_WARNING = 0.02
# Gaussian weights below this are dropped
WEIGHT_FLOOR = 1e-20
TRUNCATE_BALL = "ball"
TRUNCATE_SLAB = "slab"


@dataclass(frozen=True)
class SeriesEvaluation:
    """A truncated lattice sum."""

    value: float
    R_final: float
    cauchy_residual: float
    term_count: int
    converged: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def taper(t):
    """Return a smooth cutoff equal to 1 on [0, 1/2] and 0 from 1 on."""
    s = np.clip(2.0 - 2.0 * np.asarray(t, dtype=float), 0.0, 1.0)

    def bump(u):
        return np.where(u > 0.0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)

    rise, fall = bump(s), bump(1.0 - s)
    return rise / (rise + fall)


def dyadic_radii(k: int, tau: float) -> np.ndarray:
    """Return R_{j,k} = 2^k + j 2^{tau k} for 0 <= j <= 2^{(1-tau) k}."""
    if not 0.0 < tau < 1.0:
        raise PreconditionFailed("tau must lie in (0, 1)")
    count = int(math.floor(2.0 ** ((1.0 - tau) * k)))
    return 2.0 ** k + np.arange(count + 1) * 2.0 ** (tau * k)


def _half_space(coefficients: np.ndarray) -> np.ndarray:
    """Return the mask of vectors whose first nonzero coefficient is positive."""
    first = np.argmax(coefficients != 0, axis=1)
    return coefficients[np.arange(len(coefficients)), first] > 0


def _lattice_sum(
    L: UnimodularLattice,
    chi: Character,
    R: float,
    numerator: Callable[[np.ndarray, np.ndarray], np.ndarray],
    weight: Callable[[np.ndarray], np.ndarray],
    x_cut: float,
    prefactor: float = 1.0,
    truncation: str = TRUNCATE_BALL,
    y_guard: float = Y_GUARD,
    smooth: bool = False,
    cauchy_tol: float = CAUCHY_TOL,
) -> SeriesEvaluation:
    """Return prefactor times the sum of numerator / y times weight over ||w|| <= R.

    w and -w carry equal terms, so one half space is summed and doubled.
    Terms whose numerator vanishes are skipped before the y guard.
    """
    if truncation not in (TRUNCATE_BALL, TRUNCATE_SLAB):
        raise PreconditionFailed("unknown truncation {}".format(truncation))
    if R < 2.0 * L.shortest:
        raise PreconditionFailed(
            "R = {} is below twice the shortest vector {}".format(R, L.shortest)
        )
    found = enumerate_slab(L, R, x_cut, ball=truncation == TRUNCATE_BALL)
    half = _half_space(found.coefficients)
    vectors, coefficients = found.vectors[half], found.coefficients[half]
    y, x = vectors[:, 0], vectors[:, 1:]
    top = numerator(chi.turns(coefficients), y)
    live = np.abs(top) > SINE_ZERO
    if np.any(np.abs(y[live]) < y_guard):
        raise NearZeroY("lattice vector with |y| < {:g}".format(y_guard))
    vectors, y, x, top = vectors[live], y[live], x[live], top[live]
    terms = top / y * weight(x)
    if truncation == TRUNCATE_BALL:
        radius = np.linalg.norm(vectors, axis=1)
    else:
        radius = np.abs(y)
    if smooth:
        outer = math.fsum(terms * taper(radius / R))
        inner = math.fsum(terms * taper(radius / (0.5 * R)))
    else:
        outer = math.fsum(terms[radius <= R])
        inner = math.fsum(terms[radius <= 0.5 * R])
    value = 2.0 * prefactor * outer
    residual = abs(2.0 * prefactor * (outer - inner))
    return SeriesEvaluation(
        value=value,
        R_final=float(R),
        cauchy_residual=residual,
        term_count=int(2 * len(terms)),
        converged=residual < cauchy_tol,
    )


def _sine(turns: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sin(TWO_PI * turns)


def _gaussian_cut(curvature: float) -> float:
    """Return the radius beyond which exp(-curvature r^2) is below WEIGHT_FLOOR."""
    return math.sqrt(-math.log(WEIGHT_FLOOR) / curvature)


def script_X(
    L: UnimodularLattice, chi: Character, R: float, **options
) -> SeriesEvaluation:
    """Return the partial sum of sin(2 pi chi(w)) / y(w) exp(-||x(w)||^2) over ||w|| <= R."""
    return _lattice_sum(
        L,
        chi,
        R,
        _sine,
        lambda x: np.exp(-np.einsum("ij,ij->i", x, x)),
        _gaussian_cut(1.0),
        **options
    )


def hat_X(
    dist: AtomicDistribution,
    L: UnimodularLattice,
    chi: Character,
    z: float,
    R: float,
    constants: Optional[StructureConstants] = None,
    **options
) -> SeriesEvaluation:
    """Return the Gaussian-damped limit of the scaled CLT error.

    The prefactor is e^{-z^2/2} |a_{d+1} - a_1| / (2 sigma sqrt(2 pi^3)) and the
    damping is exp(-4 pi^2 x D x).
    """
    if constants is None:
        constants = structure_constants(dist)
    form = 4.0 * math.pi ** 2 * constants.Dmat
    prefactor = math.exp(-0.5 * z * z) * dist.span / (
        2.0 * dist.sigma * math.sqrt(2.0 * math.pi ** 3)
    )
    return _lattice_sum(
        L,
        chi,
        R,
        _sine,
        lambda x: np.exp(-np.einsum("ij,jk,ik->i", x, form, x)),
        _gaussian_cut(float(np.linalg.eigvalsh(form).min())),
        prefactor=prefactor,
        **options
    )


def restricted_X(
    dist: AtomicDistribution,
    L: UnimodularLattice,
    chi: Character,
    z: float,
    K: float,
    delta: float,
    constants: Optional[StructureConstants] = None,
) -> SeriesEvaluation:
    """Return the hat_X sum over delta < |y| < K and 2 pi |y|^alpha ||x|| < 2^{K+1}."""
    if not 0.0 < delta < K:
        raise BadWindow("need 0 < delta < K, got delta={}, K={}".format(delta, K))
    if constants is None:
        constants = structure_constants(dist)
    bound = 2.0 ** (K + 1)
    x_cut = bound / (TWO_PI * delta ** constants.alpha)
    found = enumerate_slab(L, K, x_cut, ball=False)
    half = _half_space(found.coefficients)
    vectors, coefficients = found.vectors[half], found.coefficients[half]
    y, x = vectors[:, 0], vectors[:, 1:]
    size = np.abs(y)
    keep = (size > delta) & (size < K)
    keep &= TWO_PI * size ** constants.alpha * np.linalg.norm(x, axis=1) < bound
    y, x, coefficients = y[keep], x[keep], coefficients[keep]
    form = 4.0 * math.pi ** 2 * constants.Dmat
    terms = (
        np.sin(TWO_PI * chi.turns(coefficients))
        / y
        * np.exp(-np.einsum("ij,jk,ik->i", x, form, x))
    )
    prefactor = math.exp(-0.5 * z * z) * dist.span / (
        2.0 * dist.sigma * math.sqrt(2.0 * math.pi ** 3)
    )
    return SeriesEvaluation(
        value=2.0 * prefactor * math.fsum(terms),
        R_final=float(K),
        cauchy_residual=0.0,
        term_count=int(2 * len(terms)),
    )


def script_Y(
    L: UnimodularLattice, chi: Character, c: float, R: float, **options
) -> SeriesEvaluation:
    """Return (1/c) sum [sin(2 pi chi(w)) - sin(2 pi (chi(w) - c y(w)))] / y(w) exp(-||x||^2)."""
    if c == 0:
        raise ZeroC("c must be non-zero")

    def numerator(turns, y):
        return np.sin(TWO_PI * turns) - np.sin(TWO_PI * (turns - c * y))

    return _lattice_sum(
        L,
        chi,
        R,
        numerator,
        lambda x: np.exp(-np.einsum("ij,ij->i", x, x)),
        _gaussian_cut(1.0),
        prefactor=1.0 / c,
        **options
    )


def change_of_variables(constants: StructureConstants) -> np.ndarray:
    """Return the map (y, x) -> (y / ((2 pi)^{d-1} sqrt(det D)), 2 pi sqrt(D) x).

    The map acts on row vectors and has determinant 1.
    """
    d = constants.d
    values, vectors = np.linalg.eigh(constants.Dmat)
    root = vectors @ np.diag(np.sqrt(values)) @ vectors.T
    matrix = np.zeros((d, d))
    matrix[0, 0] = 1.0 / (TWO_PI ** (d - 1) * math.sqrt(float(np.prod(values))))
    matrix[1:, 1:] = TWO_PI * root
    return matrix


def adaptive(
    evaluate: Callable[[float], SeriesEvaluation],
    shortest: float,
    cauchy_tol: float = CAUCHY_TOL,
    max_doublings: int = MAX_DOUBLINGS,
) -> SeriesEvaluation:
    """Double R from max(2 ||w_1||, 4) until the residual is below ``cauchy_tol``.

    Stops unconverged once R would pass 2^max_doublings ||w_1||. The start
    is clamped to that cap.
    """
    if max_doublings < 1:
        raise PreconditionFailed("max_doublings must be at least 1")
    R = max(2.0 * shortest, MIN_RADIUS)
    cap = 2.0 ** max_doublings * shortest
    if R > cap:
        LOG.warning(
            "Start radius {:.4g} exceeds the cap {:.4g}, evaluating at the cap only".format(R, cap)
        )
        R = cap
    while True:
        result = evaluate(R)
        if result.cauchy_residual < cauchy_tol:
            return dataclasses.replace(result, converged=True)
        if 2.0 * R > cap:
            return dataclasses.replace(result, converged=False)
        R *= 2.0
        LOG.debug("Doubling radius to {}".format(R))


def _evaluator(d: int, which: str, params: Dict[str, Any]):
    if which == LIMIT_X:
        return lambda L, chi, R, **options: script_X(L, chi, R, **options)
    if which == LIMIT_Y:
        c = float(params["c"])
        return lambda L, chi, R, **options: script_Y(L, chi, c, R, **options)
    dist = validate(params["atoms"], params["probs"])
    if dist.d != d:
        raise PreconditionFailed("atoms give d={}, ensemble asks d={}".format(dist.d, d))
    z = float(params.get("z", 0.0))
    constants = structure_constants(dist)
    return lambda L, chi, R, **options: hat_X(
        dist, L, chi, z, R, constants=constants, **options
    )


def sample_limit_ensemble(
    d: int,
    which: str,
    params: Dict[str, Any],
    N: int,
    seed: int,
    threads: int = 1,
    cauchy_tol: float = CAUCHY_TOL,
    max_doublings: int = MAX_DOUBLINGS,
    smooth: bool = True,
    y_guard: float = Y_GUARD,
) -> EnsembleResult:
    """Return N draws of X, hatX or Y over Haar lattices and uniform characters.

    Draw i uses the substream ``child_seed(seed, i, attempt)``; lattices with a
    vector too close to y = 0 are resampled with the next attempt.
    """
    if N < 1:
        raise EmptyEnsemble("N must be at least 1")
    if which not in LIMIT_KINDS:
        raise PreconditionFailed("unknown limit kind {}".format(which))
    evaluate = _evaluator(d, which, params)
    LOG.info("Sampling {} draws of {} in dimension {}".format(N, which, d))

    def draw(index: int):
        for attempt in range(RESAMPLE_LIMIT):
            pair = haar_sample(d, child_seed(seed, index, attempt))
            try:
                result = adaptive(
                    lambda R: evaluate(
                        pair.lattice,
                        pair.character,
                        R,
                        smooth=smooth,
                        y_guard=y_guard,
                        cauchy_tol=cauchy_tol,
                    ),
                    pair.lattice.shortest,
                    cauchy_tol=cauchy_tol,
                    max_doublings=max_doublings,
                )
            except NearZeroY:
                LOG.warning("Draw {} hit |y| < {:g}, resampling".format(index, y_guard))
                continue
            except NumericFailure:
                LOG.exception("Draw {} failed".format(index))
                return index, None
            return index, result
        return index, None

    outcomes = parallel_map(draw, range(N), threads)
    values, flags = [], []
    diagnostics = {"draw_index": [], "R_final": [], "cauchy_residual": [], "converged": []}
    for index, result in outcomes:
        if result is None:
            flags.append(FLAG_FAILED)
            continue
        flags.append(FLAG_OK if result.converged else FLAG_UNCONVERGED)
        values.append(result.value)
        diagnostics["draw_index"].append(index)
        diagnostics["R_final"].append(result.R_final)
        diagnostics["cauchy_residual"].append(result.cauchy_residual)
        diagnostics["converged"].append(result.converged)
    ensemble = EnsembleResult(
        label="limit-{}".format(which),
        params=dict(params, d=d, N=N),
        seed=int(seed),
        values=np.array(values, dtype=float),
        flags=tuple(flags),
        diagnostics=diagnostics,
    )
    if ensemble.unconverged_fraction > UNCONVERGED_WARNING:
        LOG.warning(
            "{:.1%} of the draws did not converge".format(ensemble.unconverged_fraction)
        )
    return ensemble
