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

"""Resonant intervals of the characteristic function and the resonant sum.

The k-th resonant interval I_k is the segment of length 2 pi / |b_{d+1}|
centred at s_k = 2 pi k / |b_{d+1}|. Near its peak the characteristic
function of S_n is a Gaussian of height r_k^n, and the sum of the peak
contributions over a window of k gives the leading term of the CLT error.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import integrate, optimize

from ..const import TWO_PI
from ..errors import (
    BadWindow,
    NotResonant,
    OptimizerFail,
    PreconditionFailed,
    QuadratureFail,
    SingularD,
)
from ..util import frac_multiple, reduce_angle
from .atoms import AtomicDistribution, char_fn, deficit_slope, modulus_deficit, psi
from .edgeworth import build_series, fourier_side

LOG = logging.getLogger(__name__)

DEFAULT_DELTA = 0.05
DEFAULT_K = 4.0
DEFAULT_K1 = 8.0
SCAN_POINTS = 64
RESONANCE_EXPONENT = 100
SINGULAR_DET = 1e-14
# smallest relative tolerance brentq accepts
BRENT_RTOL = 4.0 * np.finfo(float).eps
# half width of a peak window in units of 1 / (sigma sqrt(n))
PEAK_HALF_WIDTH = 12.0
# ||eta|| below which the quadratic law of r_k is fitted
SMALL_ETA = 0.1


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Constants of a distribution entering the resonant asymptotics."""

    Dmat: np.ndarray
    omega: np.ndarray
    q: np.ndarray
    Lambda: float
    H: float
    alpha: float
    sigma: float
    span: float
    d: int

    def to_dict(self):
        return {
            "D": self.Dmat.tolist(),
            "omega": self.omega.tolist(),
            "q": self.q.tolist(),
            "Lambda": self.Lambda,
            "H": self.H,
            "alpha": self.alpha,
        }


@dataclass(frozen=True)
class ResonantTerm:
    """Peak data of one resonant interval."""

    k: int
    n: int
    s_k: float
    bar_s: float
    r: float
    log_r: float
    phi: float
    eta: Tuple[float, ...]
    xi: float
    Xk: Tuple[float, ...]
    Yk: float
    resonant: bool

    def to_row(self) -> List:
        return [self.k, self.s_k, self.bar_s, self.r, self.phi, *self.eta, self.resonant]


def structure_constants(dist: AtomicDistribution) -> StructureConstants:
    """Return D, omega, q, Lambda, H and alpha of ``dist``.

    D is the quadratic form of r_k in eta after the optimal shift of the peak:
    D = (Var(eta) - Cov(eta, X)^2 / Var(X)) / 2 restricted to eta_1 =
    eta_{d+1} = 0.
    """
    d = dist.d
    p, a, b = dist.p, dist.a, dist.shifts
    variance = dist.variance
    inner = slice(1, d)
    cov = np.diag(p) - np.outer(p, p)
    c = (p * a)[inner]
    dmat = 0.5 * (cov[inner, inner] - np.outer(c, c) / variance)
    dmat = 0.5 * (dmat + dmat.T)
    det = float(np.linalg.det(dmat))
    if det <= SINGULAR_DET or np.any(np.linalg.eigvalsh(dmat) <= 0.0):
        raise SingularD("det(D) = {:.3g} is not positive".format(det))
    pair = np.subtract.outer(b, b)
    denominator = float((np.outer(p, p) * pair ** 2).sum())
    omega = np.array(
        [2.0 * float((p * p[m] * (b - b[m])).sum()) / denominator for m in range(1, d)]
    )
    root = math.sqrt(det)
    return StructureConstants(
        Dmat=dmat,
        omega=omega,
        q=p[inner].copy(),
        Lambda=dist.span / ((TWO_PI) ** (d + 0.5) * root * dist.sigma),
        H=TWO_PI ** d * root,
        alpha=1.0 / (2.0 * (d - 1)),
        sigma=dist.sigma,
        span=dist.span,
        d=d,
    )


def ratios(dist: AtomicDistribution) -> np.ndarray:
    """Return gamma = (b_2, ..., b_d) / |b_{d+1}|."""
    return dist.offsets[:-1] / dist.span


def eta_block(dist: AtomicDistribution, k) -> Tuple[np.ndarray, np.ndarray]:
    """Return eta and l for the integers ``k``, one row per k.

    eta_j = 2 pi (k gamma_j + l_j) with the unique integer l_j that puts it
    in (-pi, pi].
    """
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    turns = np.multiply.outer(k.astype(float), ratios(dist))
    shift = -np.round(turns)
    residual = turns + shift
    edge = residual <= -0.5
    shift = np.where(edge, shift + 1.0, shift)
    residual = np.where(edge, residual + 1.0, residual)
    return TWO_PI * residual, shift.astype(np.int64)


def eta_vector(dist: AtomicDistribution, k: int) -> np.ndarray:
    """Return (eta_{2,k}, ..., eta_{d,k}), each in (-pi, pi]."""
    if k == 0:
        raise PreconditionFailed("k must be non-zero")
    return eta_block(dist, [k])[0][0]


def resonance_threshold(n: int, d: int, exponent: float = RESONANCE_EXPONENT) -> float:
    """Return the log of n^{-exponent d}."""
    return -exponent * d * math.log(n)


def locate_peak(
    dist: AtomicDistribution,
    k: int,
    n: int,
    scan_points: int = SCAN_POINTS,
    exponent: float = RESONANCE_EXPONENT,
) -> ResonantTerm:
    """Return the peak of |psi| on I_k.

    A coarse scan picks the best grid point, golden-section search refines it
    and a root of the slope of 1 - |psi|^2 polishes it.
    """
    if k == 0 or n < 2:
        raise PreconditionFailed("need k != 0 and n >= 2")
    width = TWO_PI / dist.span
    s_k = k * width
    grid = np.linspace(s_k - 0.5 * width, s_k + 0.5 * width, scan_points + 1)
    deficit = modulus_deficit(dist, grid)
    best = int(np.argmin(deficit))
    lo, hi = grid[max(best - 1, 0)], grid[min(best + 1, scan_points)]
    f = lambda s: modulus_deficit(dist, s)  # noqa: E731
    try:
        if 0 < best < scan_points and deficit[best] < min(deficit[best - 1], deficit[best + 1]):
            result = optimize.minimize_scalar(
                f, bracket=(lo, grid[best], hi), method="golden", tol=1e-12
            )
        else:
            result = optimize.minimize_scalar(
                f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13}
            )
        bar_s = float(result.x)
        if not lo <= bar_s <= hi:
            bar_s = float(grid[best])
        step = 0.5 * (hi - lo)
        left, right = max(bar_s - step, lo), min(bar_s + step, hi)
        slope_left, slope_right = deficit_slope(dist, left), deficit_slope(dist, right)
        if slope_left < 0.0 < slope_right:
            bar_s = optimize.brentq(
                lambda s: deficit_slope(dist, s), left, right, xtol=1e-15, rtol=BRENT_RTOL
            )
    except (ValueError, RuntimeError) as exc:
        raise OptimizerFail("peak search on I_{} failed: {}".format(k, exc)) from exc
    if abs(bar_s - grid[best]) > width / 32.0:
        raise OptimizerFail(
            "refined peak {} is far from scan point {}".format(bar_s, grid[best])
        )
    if f(bar_s) > deficit[best]:
        bar_s = float(grid[best])
    peak_deficit = min(max(f(bar_s), 0.0), 1.0)
    log_r = 0.5 * math.log1p(-peak_deficit) if peak_deficit < 1.0 else -math.inf
    phi = float(np.angle(char_fn(dist, bar_s)))
    eta = eta_vector(dist, k)
    scale = n ** ((dist.d - 1) / 2.0)
    return ResonantTerm(
        k=int(k),
        n=int(n),
        s_k=s_k,
        bar_s=bar_s,
        r=math.exp(log_r),
        log_r=log_r,
        phi=phi,
        eta=tuple(float(x) for x in eta),
        xi=bar_s - s_k,
        Xk=tuple(float(x) for x in math.sqrt(n) * eta),
        Yk=k / scale,
        resonant=n * log_r >= resonance_threshold(n, dist.d, exponent),
    )


def _phase(n: int, phi: float, bar_s: float, shift: float) -> float:
    return float(reduce_angle(reduce_angle(n * phi) - reduce_angle(bar_s * shift)))


def ik_asymptotic(
    term: ResonantTerm, dist: AtomicDistribution, n: int, z: float
) -> complex:
    """Return the asymptotic contribution of the interval I_k."""
    if not term.resonant:
        raise NotResonant("interval {} is not resonant".format(term.k))
    sigma = dist.sigma
    modulus = math.exp(n * term.log_r - 0.5 * z * z) / (
        math.sqrt(TWO_PI * n) * sigma * term.bar_s
    )
    angle = _phase(n, term.phi, term.bar_s, z * sigma * math.sqrt(n))
    return modulus * complex(math.cos(angle), math.sin(angle)) / 1j


def resonant_terms(
    dist: AtomicDistribution, n: int, kmax: int, **options
) -> List[ResonantTerm]:
    """Return the peak data of I_1, ..., I_kmax."""
    return [locate_peak(dist, k, n, **options) for k in range(1, kmax + 1)]


def resonant_sum(
    dist: AtomicDistribution, n: int, z: float, kmax: int, **options
) -> float:
    """Return sum over resonant k <= kmax of I_k + I_{-k} = 2 Re I_k."""
    values = [
        2.0 * ik_asymptotic(term, dist, n, z).real
        for term in resonant_terms(dist, n, kmax, **options)
        if term.resonant
    ]
    return math.fsum(values)


def boundary_index(dist: AtomicDistribution, n: int, k1: float) -> int:
    """Return the k whose interval contains the cutoff K1 n^{(d-1)/2}."""
    cutoff = k1 * n ** ((dist.d - 1) / 2.0)
    return int(math.floor(cutoff * dist.span / TWO_PI + 0.5))


def linear_phase_constant(dist: AtomicDistribution, n: int, z: float):
    """Return (n a_1 - z sigma sqrt(n)) / |b_{d+1}| as an mpmath number."""
    with mpmath.workdps(40):
        return (
            mpmath.mpf(n) * mpmath.mpf(dist.atoms[0])
            - mpmath.mpf(z) * mpmath.mpf(dist.sigma) * mpmath.sqrt(n)
        ) / mpmath.mpf(dist.span)


def peak_frequency(dist: AtomicDistribution, n: int, z: float, constants: StructureConstants) -> np.ndarray:
    """Return u = sqrt(n) q - z sigma omega."""
    return math.sqrt(n) * constants.q - z * dist.sigma * constants.omega


@dataclass(frozen=True, eq=False)
class WindowTerms:
    """Terms of the resonant sum in a (delta, K) window."""

    k: np.ndarray
    Y: np.ndarray
    X: np.ndarray
    phase: np.ndarray
    damping: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.sin(self.phase) / self.Y * self.damping


def window_terms(
    dist: AtomicDistribution,
    n: int,
    z: float,
    delta: float,
    K: float,
    k1: Optional[float] = None,
    constants: Optional[StructureConstants] = None,
) -> WindowTerms:
    """Return the terms with delta < Y_k < K and Y_k^alpha |X_k| < 2^{K+1}."""
    if not 0.0 < delta < K:
        raise BadWindow("need 0 < delta < K, got delta={}, K={}".format(delta, K))
    if n < 2:
        raise PreconditionFailed("n must be at least 2")
    if constants is None:
        constants = structure_constants(dist)
    scale = n ** ((dist.d - 1) / 2.0)
    k = np.arange(int(math.floor(delta * scale)) + 1, int(math.ceil(K * scale)), dtype=np.int64)
    Y = k / scale
    keep = (Y > delta) & (Y < K)
    if k1 is not None:
        keep &= k != boundary_index(dist, n, k1)
    k, Y = k[keep], Y[keep]
    eta, _ = eta_block(dist, k)
    X = math.sqrt(n) * eta
    keep = Y ** constants.alpha * np.linalg.norm(X, axis=1) < 2.0 ** (K + 1)
    k, Y, X = k[keep], Y[keep], X[keep]
    linear = TWO_PI * frac_multiple(k, linear_phase_constant(dist, n, z))
    u = peak_frequency(dist, n, z, constants)
    phase = reduce_angle(linear + X @ u)
    damping = np.exp(-np.einsum("ij,jk,ik->i", X, constants.Dmat, X))
    return WindowTerms(k=k, Y=Y, X=X, phase=np.atleast_1d(phase), damping=damping)


def tilde_prefactor(dist: AtomicDistribution, n: int, z: float) -> float:
    return dist.span * math.exp(-0.5 * z * z) / (
        n ** (dist.d / 2.0) * dist.sigma * math.sqrt(2.0 * math.pi ** 3)
    )


def tilde_delta(
    dist: AtomicDistribution,
    n: int,
    z: float,
    delta: float = DEFAULT_DELTA,
    K: float = DEFAULT_K,
    k1: Optional[float] = None,
    constants: Optional[StructureConstants] = None,
) -> float:
    """Return the resonant approximation of the CLT error in a (delta, K) window.

    With ``k1`` the interval holding the Fourier cutoff K1 n^{(d-1)/2} is left
    out.
    """
    terms = window_terms(dist, n, z, delta, K, k1=k1, constants=constants)
    LOG.debug("Resonant window holds {} terms".format(len(terms.k)))
    return tilde_prefactor(dist, n, z) * math.fsum(terms.values)


def _log_modulus(dist: AtomicDistribution, s) -> np.ndarray:
    return 0.5 * np.log1p(-np.clip(modulus_deficit(dist, s), 0.0, 1.0 - 1e-300))


def _merge(windows: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    merged: List[List[float]] = []
    for lo, hi in sorted(windows):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def inversion_integrand(
    dist: AtomicDistribution, n: int, z: float, s: float, series=None
) -> complex:
    """Return (phi^n(s) - E_d(s sigma sqrt(n))) e^{-i s z sigma sqrt(n)} / (i s).

    phi^n is evaluated as exp(n log|psi|) with its phase reduced mod 2 pi.
    At s = 0 the removable singularity is filled by a symmetric difference.
    """
    if series is None:
        series = build_series(dist, dist.d)
    if s == 0.0:
        h = 1e-7 / (dist.sigma * math.sqrt(n))
        return 0.5 * (
            inversion_integrand(dist, n, z, h, series)
            + inversion_integrand(dist, n, z, -h, series)
        )
    sigma, root_n = dist.sigma, math.sqrt(n)
    shift = z * sigma * root_n
    log_mod = float(_log_modulus(dist, s))
    angle = float(reduce_angle(s * (n * dist.atoms[0] - shift))) + n * float(
        np.angle(psi(dist, s))
    )
    power = math.exp(n * log_mod) * complex(math.cos(angle), math.sin(angle))
    smooth = fourier_side(series, s * sigma * root_n, n) * complex(
        math.cos(s * shift), -math.sin(s * shift)
    )
    return (power - smooth) / (1j * s)


def _peak_windows(
    dist: AtomicDistribution, n: int, cutoff: float, half: float, scan_points: int
) -> Tuple[List[Tuple[float, float]], List[float]]:
    """Return the integration windows on [0, cutoff] and the peak locations."""
    floor = math.log(1e-16 * n ** (-dist.d / 2.0)) - 5.0
    width = TWO_PI / dist.span
    windows = [(0.0, min(half, cutoff))]
    peaks = []
    for k in range(1, int(math.ceil(cutoff / width + 0.5)) + 1):
        panel = ((k - 0.5) * width, min((k + 0.5) * width, cutoff))
        if panel[0] >= cutoff:
            break
        grid = np.linspace(panel[0], panel[1], scan_points + 1)
        heights = n * _log_modulus(dist, grid)
        if float(np.max(heights)) < floor:
            continue
        term = locate_peak(dist, k, n, scan_points=scan_points)
        lo, hi = max(term.bar_s - half, panel[0]), min(term.bar_s + half, panel[1])
        outside = (grid < lo) | (grid > hi)
        if np.any(heights[outside] >= floor):
            lo, hi = panel
        if lo < hi:
            windows.append((lo, hi))
            if lo < term.bar_s < hi:
                peaks.append(term.bar_s)
    return _merge(windows), peaks


def fourier_oracle(
    dist: AtomicDistribution,
    n: int,
    z: float,
    K1: float = DEFAULT_K1,
    full_line: bool = False,
    tol: Optional[float] = None,
    scan_points: int = SCAN_POINTS,
) -> float:
    """Return the CLT error by Fourier inversion up to |s| <= K1 n^{(d-1)/2}.

    The origin window and the peaks of the intervals I_k whose height
    n log|psi| reaches log(1e-16 n^{-d/2}) are integrated with adaptive
    Gauss-Kronrod rules; the rest of the line is negligible. The half-line
    form uses the conjugate symmetry of the integrand. With ``full_line``
    both half lines are integrated and the imaginary part must vanish.
    """
    if tol is None:
        tol = 1e-10 * n ** (-dist.d / 2.0)
    series = build_series(dist, dist.d)
    cutoff = K1 * n ** ((dist.d - 1) / 2.0)
    half = PEAK_HALF_WIDTH / (dist.sigma * math.sqrt(n))
    windows, peaks = _peak_windows(dist, n, cutoff, half, scan_points)
    LOG.debug("Fourier inversion over {} windows".format(len(windows)))

    def part(sign: float, component: str, lo: float, hi: float):
        inner = [p for p in peaks if lo < p < hi] or None
        value = lambda s: getattr(  # noqa: E731
            inversion_integrand(dist, n, z, sign * s, series), component
        )
        return integrate.quad(
            value, lo, hi, points=inner, limit=200, epsabs=tol / (8.0 * len(windows)),
            epsrel=1e-12,
        )

    real_parts, imag_parts, errors = [], [], []
    for lo, hi in windows:
        for sign in (1.0, -1.0) if full_line else (1.0,):
            value, error = part(sign, "real", lo, hi)
            real_parts.append(value)
            errors.append(error)
            if full_line:
                value, error = part(sign, "imag", lo, hi)
                imag_parts.append(value)
                errors.append(error)
    factor = 1.0 if full_line else 2.0
    total_error = factor * math.fsum(errors) / TWO_PI
    if total_error > tol:
        raise QuadratureFail(
            "quadrature error {:.3g} exceeds {:.3g}".format(total_error, tol)
        )
    if full_line:
        imaginary = math.fsum(imag_parts) / TWO_PI
        if abs(imaginary) > 1e-9:
            raise QuadratureFail("imaginary residue {:.3g}".format(imaginary))
    return factor * math.fsum(real_parts) / TWO_PI


def phase_decomposition(
    dist: AtomicDistribution,
    term: ResonantTerm,
    n: int,
    z: float = 0.0,
    constants: Optional[StructureConstants] = None,
) -> Tuple[float, float]:
    """Return the predicted peak s_k + omega . eta and n phi_k mod 2 pi.

    The phase prediction is n s_k a_1 + n q . eta.
    """
    if constants is None:
        constants = structure_constants(dist)
    eta = np.asarray(term.eta)
    predicted_s = term.s_k + float(constants.omega @ eta)
    with mpmath.workdps(40):
        turns = mpmath.mpf(n) * mpmath.mpf(dist.atoms[0]) / mpmath.mpf(dist.span)
    linear = TWO_PI * float(frac_multiple(term.k, turns))
    predicted_phase = reduce_angle(linear + n * float(constants.q @ eta))
    return predicted_s, float(predicted_phase)


def zeta_hessian(dist: AtomicDistribution, step: float = 1e-4) -> np.ndarray:
    """Return the Hessian of x -> |sum_j p_j exp(i y_j)|^2 at y = (0, x, 0) = 0.

    Central differences at steps h and h/2 combined by Richardson
    extrapolation.
    """
    d = dist.d
    p = dist.p
    left, right = np.triu_indices(d + 1, k=1)
    weights = p[left] * p[right]

    def deficit(x: np.ndarray) -> float:
        y = np.concatenate([[0.0], x, [0.0]])
        return 4.0 * math.fsum(weights * np.sin(0.5 * (y[right] - y[left])) ** 2)

    def hessian(h: float) -> np.ndarray:
        out = np.zeros((d - 1, d - 1))
        eye = np.eye(d - 1) * h
        for i in range(d - 1):
            for j in range(d - 1):
                out[i, j] = (
                    deficit(eye[i] + eye[j])
                    - deficit(eye[i] - eye[j])
                    - deficit(-eye[i] + eye[j])
                    + deficit(-eye[i] - eye[j])
                ) / (4.0 * h * h)
        return out

    return -(4.0 * hessian(0.5 * step) - hessian(step)) / 3.0


def quadratic_law_fit(
    terms: Sequence[ResonantTerm], constants: StructureConstants
) -> float:
    """Return the smallest C with |r - (1 - eta D eta)| <= C |eta|^3 on the terms."""
    ratios_ = [0.0]
    for term in terms:
        eta = np.asarray(term.eta)
        size = float(np.linalg.norm(eta))
        if size > 0.0:
            gap = abs(term.r - (1.0 - float(eta @ constants.Dmat @ eta)))
            ratios_.append(gap / size ** 3)
    return max(ratios_)


def xi_fit(terms: Sequence[ResonantTerm], constants: StructureConstants) -> float:
    """Return the smallest C with |xi - omega . eta| <= C |eta|^2 on the terms."""
    ratios_ = [0.0]
    for term in terms:
        eta = np.asarray(term.eta)
        size = float(np.linalg.norm(eta))
        if size > 0.0:
            ratios_.append(abs(term.xi - float(constants.omega @ eta)) / size ** 2)
    return max(ratios_)


def small_eta_terms(
    terms: Sequence[ResonantTerm], bound: float = SMALL_ETA, floor: float = 0.0
) -> List[ResonantTerm]:
    """Return the resonant terms with floor <= ||eta|| <= bound."""
    return [
        term
        for term in terms
        if term.resonant and floor <= float(np.linalg.norm(term.eta)) <= bound
    ]
