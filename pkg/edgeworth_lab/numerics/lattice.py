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

"""Unimodular lattices, characters and lattice point enumeration.

Coordinates of a lattice vector w are split as (y(w), x(w)): y is the FIRST
coordinate and x holds the remaining d - 1 coordinates. Every module of the
package shares this convention.
"""

import dataclasses
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.stats import special_ortho_group

from ..const import GAUGE_ZERO, SAMPLER_APPROX, SAMPLER_EXACT
from ..errors import (
    BudgetExceeded,
    Mismatch,
    NumericalRankLoss,
    PreconditionFailed,
    RejectionBudget,
    UnsupportedDim,
)
from ..types import Box, RealSequence
from ..util import child_seed, frac, parallel_map, stream
from .atoms import AtomicDistribution
from .resonance import eta_block, ratios, structure_constants

LOG = logging.getLogger(__name__)

DET_TOL = 1e-9
DET_TOL_LARGE_N = 1e-6
CONDITION_LIMIT = 1e12
LLL_DELTA = 0.999
ENUMERATION_BUDGET = 1e8
HAAR_Y_CAP = 1e3
HAAR_APPROX_TIME = 6.0
HAAR_MAX_TRIES = 10000
REDUCTION_MAX_STEPS = 10000
# lowest point of the standard fundamental domain of SL(2, Z)
FUNDAMENTAL_Y_MIN = math.sqrt(3.0) / 2.0


@dataclass(frozen=True, eq=False)
class UnimodularLattice:
    """A lattice of covolume one given by a basis of row vectors.

    ``reduced`` is the shortest spanning set once :func:`reduce` has run and
    ``transform`` is the integer matrix with ``reduced = transform @ basis``.
    """

    basis: np.ndarray
    reduced: Optional[np.ndarray] = None
    transform: Optional[np.ndarray] = None
    label: str = SAMPLER_EXACT
    det_tol: float = DET_TOL
    truncated_mass: float = 0.0

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @property
    def generators(self) -> np.ndarray:
        """Return the reduced basis if available, else the basis."""
        return self.basis if self.reduced is None else self.reduced

    @property
    def shortest(self) -> float:
        return float(np.linalg.norm(self.generators[0]))

    def to_dict(self) -> Dict[str, Any]:
        data = {"basis": self.basis.tolist(), "label": self.label}
        if self.reduced is not None:
            data["reduced"] = self.reduced.tolist()
        return data


@dataclass(frozen=True)
class Character:
    """A character of a lattice, given by its values theta_j on the generators."""

    theta: Tuple[float, ...]

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.theta, dtype=float)

    def turns(self, coefficients: np.ndarray) -> np.ndarray:
        """Return chi(sum m_j w_j) = sum m_j theta_j mod 1."""
        return np.atleast_1d(frac(np.asarray(coefficients, dtype=float) @ self.vector))

    def negate(self) -> "Character":
        return Character(theta=tuple(float(x) for x in np.atleast_1d(frac(-self.vector))))

    def rebase(self, transform: np.ndarray) -> "Character":
        """Return the character on the basis ``transform @ generators``."""
        values = np.atleast_1d(frac(np.asarray(transform, dtype=float) @ self.vector))
        return Character(theta=tuple(float(x) for x in values))


class LatticePair(NamedTuple):
    lattice: UnimodularLattice
    character: Character

    def to_dict(self) -> Dict[str, Any]:
        data = self.lattice.to_dict()
        data["theta"] = list(self.character.theta)
        return data


class Enumeration(NamedTuple):
    """Lattice vectors and their coefficients on the generators."""

    vectors: np.ndarray
    coefficients: np.ndarray

    def __len__(self) -> int:
        return len(self.vectors)


class SiegelEstimate(NamedTuple):
    mean: float
    stderr: float
    volume: float
    ok: bool


def h_gamma(gamma: RealSequence) -> np.ndarray:
    """Return the identity matrix with first row (1, gamma)."""
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    matrix = np.eye(len(gamma) + 1)
    matrix[0, 1:] = gamma
    return matrix


def g_t(t: float, d: int) -> np.ndarray:
    """Return diag(e^{-(d-1)t}, e^t, ..., e^t)."""
    return np.diag([math.exp(-(d - 1) * t)] + [math.exp(t)] * (d - 1))


def from_basis(basis, det_tol: float = DET_TOL, label: str = SAMPLER_EXACT) -> UnimodularLattice:
    """Return the lattice spanned by the rows of ``basis``."""
    basis = np.array(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1] or basis.shape[0] < 2:
        raise PreconditionFailed("basis must be a square matrix of size at least 2")
    det = abs(float(np.linalg.det(basis)))
    if abs(det - 1.0) > det_tol:
        raise PreconditionFailed("basis has covolume {:.17g}, not 1".format(det))
    return UnimodularLattice(basis=basis, label=label, det_tol=det_tol)


def lattice_of(n: int, dist: AtomicDistribution) -> UnimodularLattice:
    """Return Z^d H_gamma G_{ln(n)/2}.

    Row m of the result has y = m_1 / n^{(d-1)/2} and
    x = sqrt(n) (m_1 gamma + (m_2, ..., m_d)).
    """
    if n < 2:
        raise PreconditionFailed("n must be at least 2, got {}".format(n))
    d = dist.d
    root = math.sqrt(n)
    basis = h_gamma(ratios(dist))
    basis[:, 1:] *= root
    basis[0, 0] = n ** (-(d - 1) / 2.0)
    det_tol = DET_TOL_LARGE_N if n >= 10 ** 6 else DET_TOL
    det = float(np.linalg.det(basis))
    if abs(det - 1.0) > det_tol:
        raise NumericalRankLoss("det of L(n, a) is {:.17g}".format(det))
    return UnimodularLattice(basis=basis, det_tol=det_tol)


def resonance_coefficients(dist: AtomicDistribution, k) -> np.ndarray:
    """Return the coefficient rows m = (k, l) whose vectors carry (Y_k, X_k / 2 pi)."""
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    _, shift = eta_block(dist, k)
    return np.column_stack([k, shift])


def _gram_schmidt(basis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    d = len(basis)
    ortho = np.zeros_like(basis)
    mu = np.eye(d)
    for i in range(d):
        ortho[i] = basis[i]
        for j in range(i):
            mu[i, j] = basis[i] @ ortho[j] / (ortho[j] @ ortho[j])
            ortho[i] = ortho[i] - mu[i, j] * ortho[j]
    return ortho, mu


def _gauss_lagrange(basis: np.ndarray) -> np.ndarray:
    """Return the integer transform of the Gauss-Lagrange reduction."""
    transform = np.eye(2, dtype=np.int64)

    def rows():
        return transform.astype(float) @ basis

    current = rows()
    if current[0] @ current[0] > current[1] @ current[1]:
        transform = transform[::-1].copy()
    for _ in range(REDUCTION_MAX_STEPS):
        current = rows()
        mu = int(np.round(current[0] @ current[1] / (current[0] @ current[0])))
        transform[1] -= mu * transform[0]
        current = rows()
        if current[1] @ current[1] >= current[0] @ current[0]:
            return transform
        transform = transform[::-1].copy()
    raise NumericalRankLoss("Gauss-Lagrange reduction did not terminate")


def _lll(basis: np.ndarray, delta: float) -> np.ndarray:
    """Return the integer transform of an LLL reduction."""
    d = len(basis)
    transform = np.eye(d, dtype=np.int64)
    k = 1
    for _ in range(REDUCTION_MAX_STEPS * d):
        if k >= d:
            return transform
        for j in range(k - 1, -1, -1):
            _, mu = _gram_schmidt(transform.astype(float) @ basis)
            q = int(np.round(mu[k, j]))
            if q:
                transform[k] -= q * transform[j]
        ortho, mu = _gram_schmidt(transform.astype(float) @ basis)
        if ortho[k] @ ortho[k] >= (delta - mu[k, k - 1] ** 2) * (ortho[k - 1] @ ortho[k - 1]):
            k += 1
        else:
            transform[[k - 1, k]] = transform[[k, k - 1]]
            k = max(k - 1, 1)
    raise NumericalRankLoss("LLL reduction did not terminate")


def _is_primitive(rows: np.ndarray) -> bool:
    """Return whether integer ``rows`` extend to a basis of Z^d."""
    j, d = rows.shape
    divisor = 0
    for columns in itertools.combinations(range(d), j):
        minor = int(round(float(np.linalg.det(rows[:, columns].astype(float)))))
        divisor = math.gcd(divisor, abs(minor))
    return divisor == 1


def _canonical(transform: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Flip rows so that each vector has positive y, or positive leading x if y = 0."""
    vectors = transform.astype(float) @ basis
    for i, vector in enumerate(vectors):
        scale = max(float(np.abs(vector).max()), 1.0)
        nonzero = np.flatnonzero(np.abs(vector) > GAUGE_ZERO * scale)
        if len(nonzero) and vector[nonzero[0]] < 0:
            transform[i] = -transform[i]
    return transform


def _polish(basis: np.ndarray, transform: np.ndarray, budget: float) -> np.ndarray:
    """Replace an LLL basis by the greedy shortest spanning set."""
    start = transform.astype(float) @ basis
    radius = float(np.linalg.norm(start, axis=1).max()) * (1.0 + 1e-9)
    points = _ellipsoid_points(start, np.ones(len(basis)), radius, budget)
    vectors = points @ start
    norms = np.linalg.norm(vectors, axis=1)
    order = np.lexsort((np.arange(len(norms)), norms))
    chosen: List[np.ndarray] = []
    for index in order:
        if norms[index] == 0.0:
            continue
        candidate = np.array(chosen + [points[index]], dtype=np.int64)
        if np.linalg.matrix_rank(candidate.astype(float)) < len(candidate):
            continue
        if _is_primitive(candidate):
            chosen.append(points[index])
            if len(chosen) == len(basis):
                break
    if len(chosen) < len(basis):
        order = np.argsort(np.linalg.norm(start, axis=1), kind="stable")
        return transform[order]
    return np.array(chosen, dtype=np.int64) @ transform


def reduce(
    L: UnimodularLattice, lll_delta: float = LLL_DELTA, budget: float = ENUMERATION_BUDGET
) -> UnimodularLattice:
    """Return ``L`` with its shortest spanning set, ordered by norm.

    Planar lattices use Gauss-Lagrange reduction. In dimensions 3 and 4 an
    LLL basis is polished by exhaustive search in the ball holding all of its
    vectors.
    """
    if L.reduced is not None:
        return L
    d = L.d
    if d > 4:
        raise UnsupportedDim("reduction supports d <= 4, got {}".format(d))
    if np.linalg.cond(L.basis) > CONDITION_LIMIT:
        raise NumericalRankLoss("basis condition number exceeds {:g}".format(CONDITION_LIMIT))
    if d == 2:
        transform = _gauss_lagrange(L.basis)
    else:
        transform = _polish(L.basis, _lll(L.basis, lll_delta), budget)
    transform = _canonical(transform, L.basis)
    reduced = transform.astype(float) @ L.basis
    return dataclasses.replace(L, reduced=reduced, transform=transform)


def _ellipsoid_points(
    basis: np.ndarray, scale: np.ndarray, radius: float, budget: float
) -> np.ndarray:
    """Return all m with ||(m @ basis) * scale|| <= radius, by Fincke-Pohst descent."""
    scaled = basis * scale
    d = len(scaled)
    upper = np.linalg.qr(scaled.T, mode="r")
    volume = math.pi ** (d / 2.0) / gamma_fn(d / 2.0 + 1.0) * radius ** d
    projected = volume / abs(float(np.prod(np.diag(upper))))
    if projected > budget:
        raise BudgetExceeded(
            "projected {:.3g} lattice points exceed budget {:g}".format(projected, budget)
        )
    bound = radius * radius * (1.0 + 1e-12)
    blocks: List[np.ndarray] = []
    fixed = np.zeros(d)
    count = [0]

    def descend(level: int, partial: float) -> None:
        diagonal = upper[level, level]
        center = -float(upper[level, level + 1:] @ fixed[level + 1:]) / diagonal
        width = math.sqrt(max(bound - partial, 0.0)) / abs(diagonal)
        lo, hi = math.ceil(center - width), math.floor(center + width)
        if level == 0:
            if lo > hi:
                return
            block = np.tile(fixed, (hi - lo + 1, 1))
            block[:, 0] = np.arange(lo, hi + 1)
            blocks.append(block)
            count[0] += len(block)
            if count[0] > budget:
                raise BudgetExceeded("lattice point count exceeds budget {:g}".format(budget))
            return
        for value in range(lo, hi + 1):
            offset = diagonal * (value - center)
            fixed[level] = value
            descend(level - 1, partial + offset * offset)
        fixed[level] = 0.0

    descend(d - 1, 0.0)
    if not blocks:
        return np.zeros((0, d), dtype=np.int64)
    return np.rint(np.vstack(blocks)).astype(np.int64)


def _enumerate(L: UnimodularLattice, scale, radius: float, budget: float) -> Enumeration:
    L = reduce(L)
    points = _ellipsoid_points(L.reduced, np.asarray(scale, dtype=float), radius, budget)
    points = points[np.any(points != 0, axis=1)]
    return Enumeration(vectors=points.astype(float) @ L.reduced, coefficients=points)


def _ball_volume(d: int, R: float) -> float:
    return math.pi ** (d / 2.0) / gamma_fn(d / 2.0 + 1.0) * R ** d


def enumerate_ball(
    L: UnimodularLattice, R: float, budget: float = ENUMERATION_BUDGET
) -> Enumeration:
    """Return all nonzero lattice vectors of norm at most R, sorted by norm.

    Both w and -w are returned. Coefficients refer to the reduced basis.
    """
    if R <= 0:
        raise PreconditionFailed("R must be positive")
    found = _enumerate(L, np.ones(L.d), R, budget)
    norms = np.linalg.norm(found.vectors, axis=1)
    keep = norms <= R + 1e-9
    order = np.argsort(norms[keep], kind="stable")
    LOG.debug(
        "Ball of radius {} holds {} vectors, {:.3f} of its volume".format(
            R, int(keep.sum()), keep.sum() / _ball_volume(L.d, R)
        )
    )
    return Enumeration(
        vectors=found.vectors[keep][order], coefficients=found.coefficients[keep][order]
    )


def enumerate_slab(
    L: UnimodularLattice,
    R: float,
    x_cut: float,
    ball: bool = True,
    budget: float = ENUMERATION_BUDGET,
) -> Enumeration:
    """Return the nonzero vectors with |y| <= R and ||x|| <= x_cut.

    With ``ball`` the vectors must also have norm at most R.
    """
    if R <= 0 or x_cut <= 0:
        raise PreconditionFailed("R and x_cut must be positive")
    scale = np.array([1.0 / R] + [1.0 / x_cut] * (L.d - 1))
    found = _enumerate(L, scale, math.sqrt(2.0), budget)
    vectors = found.vectors
    keep = (np.abs(vectors[:, 0]) <= R) & (np.linalg.norm(vectors[:, 1:], axis=1) <= x_cut)
    if ball:
        keep &= np.linalg.norm(vectors, axis=1) <= R
    return Enumeration(vectors=vectors[keep], coefficients=found.coefficients[keep])


def successive_minima(L: UnimodularLattice, budget: float = ENUMERATION_BUDGET) -> np.ndarray:
    """Return lambda_1 <= ... <= lambda_d by exhaustive enumeration."""
    L = reduce(L)
    radius = float(np.linalg.norm(L.reduced, axis=1).max()) * (1.0 + 1e-9)
    found = enumerate_ball(L, radius, budget)
    chosen: List[np.ndarray] = []
    minima = []
    for vector in found.vectors:
        candidate = np.array(chosen + [vector])
        if np.linalg.matrix_rank(candidate, tol=1e-9) == len(candidate):
            chosen.append(vector)
            minima.append(float(np.linalg.norm(vector)))
            if len(chosen) == L.d:
                break
    return np.array(minima)


def character_of(
    n: int, dist: AtomicDistribution, z: float, L_reduced: UnimodularLattice
) -> Character:
    """Return the character of L(n, a) with chi(w) = u . x(w) + v y(w) mod 1.

    Here u = sqrt(n) q - z sigma omega and v = n^{d/2} (sqrt(n) a_1 - z sigma)
    / |b_{d+1}|. The products reach 1e9 for large n, so chi is evaluated on
    the integer coordinates in 50-digit arithmetic.
    """
    L_reduced = reduce(L_reduced)
    expected = lattice_of(n, dist).basis
    if L_reduced.basis.shape != expected.shape or not np.allclose(
        L_reduced.basis, expected, rtol=1e-12, atol=0.0
    ):
        raise Mismatch("lattice is not L(n, a) for n={}".format(n))
    constants = structure_constants(dist)
    gamma = ratios(dist)
    theta = []
    with mpmath.workdps(50):
        root = mpmath.sqrt(n)
        shift = mpmath.mpf(z) * mpmath.mpf(dist.sigma)
        linear = (n * mpmath.mpf(dist.atoms[0]) - shift * root) / mpmath.mpf(dist.span)
        u = [
            root * mpmath.mpf(q) - shift * mpmath.mpf(w)
            for q, w in zip(constants.q, constants.omega)
        ]
        for row in L_reduced.transform:
            lead = int(row[0])
            value = lead * linear
            for u_i, g_i, m_i in zip(u, gamma, row[1:]):
                value += root * u_i * (lead * mpmath.mpf(g_i) + int(m_i))
            value = value - mpmath.floor(value)
            theta.append(0.0 if float(value) >= 1.0 else float(value))
    return Character(theta=tuple(theta))


def _haar_planar(rng: np.random.Generator, y_cap: float) -> np.ndarray:
    """Return an Iwasawa frame from the modular surface with measure dx dy / y^2."""
    top, bottom = 1.0 / FUNDAMENTAL_Y_MIN, 1.0 / y_cap
    for _ in range(HAAR_MAX_TRIES):
        x = rng.uniform(-0.5, 0.5)
        y = 1.0 / (top - rng.uniform() * (top - bottom))
        if x * x + y * y >= 1.0:
            root = math.sqrt(y)
            frame = np.array([[1.0 / root, 0.0], [x / root, root]])
            angle = rng.uniform(0.0, 2.0 * math.pi)
            rotation = np.array(
                [[math.cos(angle), math.sin(angle)], [-math.sin(angle), math.cos(angle)]]
            )
            return frame @ rotation
    raise RejectionBudget("fundamental domain sampler exhausted its budget")


def haar_sample(
    d: int,
    rng_seed: int,
    y_cap: float = HAAR_Y_CAP,
    approx_time: float = HAAR_APPROX_TIME,
) -> LatticePair:
    """Return a Haar-random reduced lattice and an independent uniform character.

    For d = 2 the sample is exact up to the cusp cap y <= ``y_cap``, whose
    mass is recorded as ``truncated_mass``. For d = 3 the lattice is
    Z^3 H_gamma G_t with uniform gamma and a random rotation, labelled APPROX.
    """
    rng = stream(rng_seed)
    if d == 2:
        basis = _haar_planar(rng, y_cap)
        lattice = UnimodularLattice(
            basis=basis, label=SAMPLER_EXACT, truncated_mass=3.0 / (math.pi * y_cap)
        )
    elif d == 3:
        gamma = rng.uniform(0.0, 1.0, size=d - 1)
        rotation = special_ortho_group.rvs(d, random_state=rng)
        basis = h_gamma(gamma) @ g_t(approx_time, d) @ rotation
        lattice = UnimodularLattice(basis=basis, label=SAMPLER_APPROX, det_tol=1e-6)
    else:
        raise UnsupportedDim("Haar sampling supports d in (2, 3), got {}".format(d))
    theta = rng.uniform(0.0, 1.0, size=d)
    return LatticePair(
        lattice=reduce(lattice), character=Character(theta=tuple(float(t) for t in theta))
    )


def box_volume(region: Box) -> float:
    return float(np.prod([max(hi - lo, 0.0) for lo, hi in region]))


def _count_in_boxes(L: UnimodularLattice, regions: Sequence[Box]) -> List[int]:
    corners = [
        math.sqrt(sum(max(lo * lo, hi * hi) for lo, hi in region)) for region in regions
    ]
    found = enumerate_ball(L, max(corners))
    counts = []
    for region in regions:
        inside = np.ones(len(found), dtype=bool)
        for axis, (lo, hi) in enumerate(region):
            inside &= (found.vectors[:, axis] >= lo) & (found.vectors[:, axis] < hi)
        counts.append(int(inside.sum()))
    return counts


def siegel_check_many(
    d: int, regions: Sequence[Box], N: int, seed: int, threads: int = 1
) -> List[SiegelEstimate]:
    """Return Monte Carlo means of the point counts of several boxes.

    All boxes are counted on the same N Haar lattices.
    """
    if N < 2:
        raise PreconditionFailed("need at least 2 samples")
    for region in regions:
        if len(region) != d:
            raise Mismatch("box has {} axes, lattice dimension is {}".format(len(region), d))
        if all(lo <= 0.0 <= hi for lo, hi in region) and box_volume(region) > 0.0:
            raise PreconditionFailed("box must exclude a neighbourhood of 0")

    def count(index: int) -> List[int]:
        pair = haar_sample(d, child_seed(seed, index))
        return _count_in_boxes(pair.lattice, regions)

    counts = np.array(parallel_map(count, range(N), threads), dtype=float)
    estimates = []
    for column, region in zip(counts.T, regions):
        mean = float(column.mean())
        stderr = float(column.std(ddof=1) / math.sqrt(N))
        volume = box_volume(region)
        ok = abs(mean - volume) <= 3.0 * stderr if stderr > 0 else mean == volume
        if not ok:
            LOG.warning(
                "Siegel mean {:.4f} is off the box volume {:.4f}".format(mean, volume)
            )
        estimates.append(SiegelEstimate(mean=mean, stderr=stderr, volume=volume, ok=ok))
    return estimates


def siegel_check(d: int, region: Box, N: int, seed: int, threads: int = 1) -> SiegelEstimate:
    """Return the Monte Carlo mean and standard error of #(L & region)."""
    return siegel_check_many(d, [region], N, seed, threads)[0]


def diophantine_floor(
    L: UnimodularLattice, beta: float, R: float
) -> Tuple[float, List[Tuple[float, ...]]]:
    """Return min |y(w)| ||w||^beta over 0 < ||w|| <= R and the vectors with y(w) = 0."""
    if beta <= 0 or R <= 0:
        raise PreconditionFailed("beta and R must be positive")
    found = enumerate_ball(L, R)
    norms = np.linalg.norm(found.vectors, axis=1)
    y = np.abs(found.vectors[:, 0])
    flat = y <= GAUGE_ZERO * np.maximum(norms, 1.0)
    violations = [tuple(float(c) for c in w) for w in found.vectors[flat]]
    if np.all(flat):
        return math.inf, violations
    return float(np.min(y[~flat] * norms[~flat] ** beta)), violations


def transform(L: UnimodularLattice, chi: Character, A) -> LatticePair:
    """Return the pair (L A, chi o A^{-1}) with a fresh reduced basis.

    ``A`` acts on row vectors, w -> w A, and must have |det A| = 1.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (L.d, L.d):
        raise Mismatch("map has shape {}, lattice dimension is {}".format(A.shape, L.d))
    det = abs(float(np.linalg.det(A)))
    if abs(det - 1.0) > L.det_tol:
        raise PreconditionFailed("map has determinant {:.17g}".format(det))
    image = reduce(
        UnimodularLattice(basis=L.generators @ A, label=L.label, det_tol=L.det_tol)
    )
    return LatticePair(lattice=image, character=chi.rebase(image.transform))
