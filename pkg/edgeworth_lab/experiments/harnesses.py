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

"""Statistical harnesses comparing CLT errors with their limit laws.

Every harness returns a report ``{harness, params, seed, metrics, pass,
artifacts}`` together with the tables the command line writes as CSV
artifacts. Pass bands come from the calibration section of the
configuration.
"""

import logging
import math
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..config import DefaultConfig
from ..const import (
    FLAG_DEGENERATE,
    FLAG_FAILED,
    FLAG_OK,
    HARNESS_DIOPHANTINE,
    HARNESS_EXPONENT,
    HARNESS_JOINT,
    HARNESS_LIMIT,
    HARNESS_LLT,
    HARNESS_MIXSCALE,
    LIMIT_X,
    LIMIT_Y,
    METHOD_RESONANCE,
    TAG_CHARACTER,
    TAG_CONTROL,
    TAG_ERRORS,
    TAG_LIMIT,
    TAG_REFERENCE,
    TWO_PI,
)
from ..errors import NearZeroY, NumericFailure, PreconditionFailed
from ..numerics.atoms import AtomicDistribution, d_of_s, validate
from ..numerics.edgeworth import build_series, normal_pdf, sup_error
from ..numerics.exactdist import exact_law, interval_prob
from ..numerics.lattice import Character, character_of, haar_sample, lattice_of, reduce
from ..numerics.limitlaw import adaptive, dyadic_radii, script_X
from ..numerics.resonance import structure_constants
from ..types import Report
from ..util import child_seed, parallel_map, stream
from .ensembles import error_ensemble, reference_ensemble, scaled_error
from .sampling import draw_parameters, golden_distribution, lattice_control, rational_draw
from .stats import (
    distance_covariance,
    ks_two_sample,
    ks_uniform,
    pearson,
    strictly_increasing,
    trend_ok,
)

LOG = logging.getLogger(__name__)

Table = Tuple[List[str], List[List[Any]]]

DYADIC_TAU = 0.5


class HarnessRun(NamedTuple):
    report: Report
    tables: Dict[str, Table]


def _settings(config: Optional[Mapping[str, Any]]) -> Dict[str, Any]:
    """Return the configuration with defaults for missing keys."""
    settings = {
        key: getattr(DefaultConfig, key) for key in dir(DefaultConfig) if key.isupper()
    }
    if config:
        settings.update({key: config[key] for key in config if key.isupper()})
    return settings


def _series_options(settings: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "cauchy_tol": settings["CAUCHY_TOL"],
        "max_doublings": settings["MAX_DOUBLINGS"],
        "smooth": settings["SERIES_TAPER"],
        "y_guard": settings["Y_GUARD"],
    }


def _reference(
    d: int,
    size: int,
    seed: int,
    settings: Dict[str, Any],
    threads: int,
    cache: bool,
    which: str = LIMIT_X,
    params: Optional[Dict[str, Any]] = None,
):
    return reference_ensemble(
        d,
        size,
        seed,
        cache_config=settings["REFERENCE_CACHE_CONFIG"] if cache else None,
        threads=threads,
        which=which,
        params=params,
        **_series_options(settings)
    )


def _report(name: str, params: Dict[str, Any], seed: int, metrics: Dict[str, Any], passed: bool) -> Report:
    return {
        "harness": name,
        "params": params,
        "seed": int(seed),
        "metrics": metrics,
        "pass": bool(passed),
        "artifacts": [],
    }


def _dyadic_profile(
    d: int, draws: int, seed: int, exponents: Sequence[int], tau: float = DYADIC_TAU
) -> Tuple[List[float], List[float]]:
    """Return the median Cauchy residual and the median block spread of sharp X sums.

    The residual is taken at R = 2^k. The spread is max - min of X over the
    radii R_{j,k} of the dyadic block starting at 2^k.
    """
    residuals, spreads = [], []
    for index in range(draws):
        pair = haar_sample(d, child_seed(seed, TAG_LIMIT, index))
        try:
            residual_row, spread_row = [], []
            for k in exponents:
                block = [script_X(pair.lattice, pair.character, R) for R in dyadic_radii(k, tau)]
                values = [result.value for result in block]
                residual_row.append(block[0].cauchy_residual)
                spread_row.append(max(values) - min(values))
        except (NearZeroY, PreconditionFailed):
            continue
        residuals.append(residual_row)
        spreads.append(spread_row)
    if not residuals:
        return [], []
    return (
        [float(x) for x in np.median(np.array(residuals), axis=0)],
        [float(x) for x in np.median(np.array(spreads), axis=0)],
    )


def harness_limit(
    d: int = 2,
    n_list: Sequence[int] = (250, 1000, 4000),
    z: float = 0.0,
    N: int = 2000,
    seed: int = 0,
    method: str = METHOD_RESONANCE,
    z_check: float = 1.0,
    reference_size: Optional[int] = None,
    dyadic_draws: int = 20,
    cache: bool = True,
    config: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> HarnessRun:
    """Compare scaled error ensembles with the X reference over n."""
    settings = _settings(config)
    reference_size = reference_size or settings["REFERENCE_ENSEMBLE_SIZE"]
    reference = _reference(d, reference_size, seed, settings, threads, cache)
    common = {
        "kappa": settings["KAPPA"],
        "M": settings["ATOM_BOUND"],
        "seed": child_seed(seed, TAG_ERRORS),
        "threads": threads,
        "delta": settings["RESONANCE_DELTA"],
        "K": settings["RESONANCE_K"],
    }
    ks_list, last = [], None
    for n in n_list:
        last = error_ensemble(d, n, z, N, method, **common)
        ks_list.append(ks_two_sample(last.values, reference.values))
        LOG.info("n={}: KS to the limit law {:.4f}".format(n, ks_list[-1]))
    other = error_ensemble(d, n_list[-1], z_check, N, method, **common)
    ks_z = ks_two_sample(last.values, other.values)
    symmetry = ks_two_sample(reference.values, -reference.values)
    exponents = list(range(3, 9))
    dyadic, spread = _dyadic_profile(d, dyadic_draws, seed, exponents)
    metrics = {
        "ks": ks_list,
        "ks_z": ks_z,
        "ks_symmetry": symmetry,
        "reference_size": int(len(reference.values)),
        "unconverged_fraction": reference.unconverged_fraction,
        "dyadic_median_residual": dyadic,
        "dyadic_median_spread": spread,
        "failures": last.failures,
    }
    passed = (
        trend_ok(ks_list, settings["KS_BAND_INVERSION"])
        and ks_list[-1] < settings["KS_BAND_LIMIT"]
        and ks_z < settings["KS_BAND_LIMIT"]
        and symmetry < settings["KS_BAND_SYMMETRY"]
        and reference.unconverged_fraction < settings["UNCONVERGED_FRACTION"]
        and (len(dyadic) < 2 or dyadic[-1] < dyadic[0])
    )
    params = {
        "d": d,
        "n_list": list(n_list),
        "z": z,
        "N": N,
        "method": method,
        "z_check": z_check,
        "reference_size": reference_size,
    }
    tables = {
        "ks": (["n", "ks"], [[n, ks] for n, ks in zip(n_list, ks_list)]),
        "reference": (["draw_index", "value", "R_final", "cauchy_residual", "converged"], [
            [
                reference.diagnostics["draw_index"][i],
                value,
                reference.diagnostics["R_final"][i],
                reference.diagnostics["cauchy_residual"][i],
                reference.diagnostics["converged"][i],
            ]
            for i, value in enumerate(reference.values.tolist())
        ]),
    }
    return HarnessRun(_report(HARNESS_LIMIT, params, seed, metrics, passed), tables)


def harness_diophantine(
    atoms: Optional[Sequence[float]] = None,
    probs: Optional[Sequence[float]] = None,
    n_list: Sequence[int] = (250, 500, 1000, 2000),
    R_exponent: float = 0.9,
    z_grid: Optional[Sequence[float]] = None,
    control: bool = True,
    seed: int = 0,
    config: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> HarnessRun:
    """Track n^R sup |F_n - E_1| for badly approximable atoms and a lattice control."""
    settings = _settings(config)
    dist = golden_distribution() if atoms is None else validate(atoms, probs)
    if dist.d != 2:
        raise PreconditionFailed("the Diophantine harness needs d = 2")
    if not R_exponent < 1.0:
        raise PreconditionFailed("R_exponent must be below 1")

    def profile(law_dist: AtomicDistribution) -> List[float]:
        series = build_series(law_dist, 1)

        def one(n: int) -> float:
            law = exact_law(law_dist, n)
            return sup_error(law, series, law_dist, z_grid) * n ** R_exponent

        return parallel_map(one, n_list, threads)

    scaled = profile(dist)
    controls = profile(lattice_control()) if control else []
    bounded = max(scaled) <= settings["DIOPHANTINE_GROWTH"] * scaled[0]
    growing = strictly_increasing(controls) if control else True
    metrics = {
        "M": scaled,
        "M_control": controls,
        "bounded": bounded,
        "control_increasing": growing,
    }
    params = {
        "atoms": list(dist.atoms),
        "probs": list(dist.probs),
        "n_list": list(n_list),
        "R_exponent": R_exponent,
        "control": control,
    }
    rows = [
        [n, m, controls[i] if control else None] for i, (n, m) in enumerate(zip(n_list, scaled))
    ]
    return HarnessRun(
        _report(HARNESS_DIOPHANTINE, params, seed, metrics, bounded and growing),
        {"trend": (["n", "M", "M_control"], rows)},
    )


def gauge_exponent(dist: AtomicDistribution, kmax: int) -> Tuple[float, float, List[List[float]]]:
    """Fit d(s) >= K s^{-beta} on the resonance centres s_k = 2 pi k / |b_{d+1}|.

    Returns beta, K and the record rows (k, s_k, d(s_k)) where the running
    minimum of the gauge drops. beta is infinite when the gauge vanishes.
    """
    k = np.arange(1, kmax + 1)
    s = TWO_PI * k / dist.span
    gauge = np.atleast_1d(d_of_s(dist, s))
    records, lowest = [], math.inf
    for ki, si, gi in zip(k.tolist(), s.tolist(), gauge.tolist()):
        if gi < lowest:
            lowest = gi
            records.append([ki, si, gi])
    if lowest <= 1e-12:
        return math.inf, 0.0, records
    if len(records) < 2:
        return 0.0, float(gauge.min()), records
    log_s = np.log([row[1] for row in records])
    log_g = np.log([row[2] for row in records])
    slope = np.polyfit(log_s, log_g, 1)[0]
    beta = max(-float(slope), 0.0)
    return beta, float(np.min(gauge * s ** beta)), records


def harness_exponent(
    atoms: Optional[Sequence[float]] = None,
    probs: Optional[Sequence[float]] = None,
    kmax: int = 2000,
    control: bool = True,
    seed: int = 0,
    config: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> HarnessRun:
    """Estimate the Diophantine exponent of the atom offsets."""
    settings = _settings(config)
    dist = golden_distribution() if atoms is None else validate(atoms, probs)
    beta, K, records = gauge_exponent(dist, kmax)
    control_beta = gauge_exponent(lattice_control(), kmax)[0] if control else None
    passed = beta <= settings["EXPONENT_BETA_MAX"] and (
        not control or math.isinf(control_beta)
    )
    metrics = {
        "beta": beta if math.isfinite(beta) else None,
        "K": K,
        "records": len(records),
        "control_degenerate": bool(control and math.isinf(control_beta)),
    }
    params = {"atoms": list(dist.atoms), "probs": list(dist.probs), "kmax": kmax, "control": control}
    return HarnessRun(
        _report(HARNESS_EXPONENT, params, seed, metrics, passed),
        {"records": (["k", "s", "gauge"], records)},
    )


def _window_ratio(law, dist: AtomicDistribution, n: int, z: float, width: float) -> Tuple[float, str]:
    """Return P(z < S_n / (sigma sqrt n) < z + width) / (width n(z)) and a flag."""
    support = (law.values[-1] - law.values[0]) / (dist.sigma * math.sqrt(n))
    density = normal_pdf(z)
    if width >= support or density == 0.0:
        return math.nan, FLAG_DEGENERATE
    return interval_prob(law, dist, z, z + width, n=n) / (width * density), FLAG_OK


def harness_llt(
    atoms: Optional[Sequence[float]] = None,
    probs: Optional[Sequence[float]] = None,
    n: int = 2000,
    z: float = 0.0,
    eps: float = 0.3,
    c_list: Sequence[float] = (1.0,),
    N: int = 500,
    seed: int = 0,
    reference_size: Optional[int] = None,
    cache: bool = True,
    config: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> HarnessRun:
    """Local limit windows: shrinking windows (a, b) and windows of size c n^{-d/2} (c)."""
    settings = _settings(config)
    if atoms is not None:
        fixed = validate(atoms, probs)
        dists = [fixed] * N
    else:
        dists = [
            draw_parameters(2, settings["KAPPA"], settings["ATOM_BOUND"], child_seed(seed, TAG_ERRORS, i))
            for i in range(N)
        ]
    d = dists[0].d
    if d != 2:
        raise PreconditionFailed("the local limit harness needs d = 2")

    def one(index: int):
        dist = dists[index]
        try:
            law = exact_law(dist, n)
        except NumericFailure as err:
            LOG.warning("Draw {} failed: {}".format(index, err))
            return None
        wide = _window_ratio(law, dist, n, z, n ** (eps - d / 2.0))
        H = structure_constants(dist).H
        narrow = []
        for c in c_list:
            width = c * dist.span / (dist.sigma * n ** (d / 2.0))
            ratio, flag = _window_ratio(law, dist, n, z, width)
            narrow.append((H * (ratio - 1.0), flag))
        return wide, narrow

    outcomes = parallel_map(one, range(N), threads)
    ratios, flags, rows = [], [], []
    columns = ["draw_index", "ratio"] + ["scaled_c{}".format(c) for c in c_list]
    for index, outcome in enumerate(outcomes):
        if outcome is None:
            flags.append(FLAG_FAILED)
            continue
        (ratio, flag), narrow = outcome
        flags.append(flag)
        if flag == FLAG_OK:
            ratios.append(ratio)
        rows.append([index, ratio] + [value for value, _ in narrow])
    deviation = [abs(r - 1.0) for r in ratios]
    median = float(np.median(deviation)) if deviation else None
    quantiles = [float(q) for q in np.quantile(ratios, [0.1, 0.5, 0.9])] if ratios else []
    reference_size = reference_size or settings["REFERENCE_ENSEMBLE_SIZE"]
    ks_c = []
    for position, c in enumerate(c_list):
        sample = [
            outcome[1][position][0]
            for outcome in outcomes
            if outcome is not None and outcome[1][position][1] == FLAG_OK
        ]
        reference = _reference(
            d, reference_size, seed, settings, threads, cache, which=LIMIT_Y, params={"c": c}
        )
        ks_c.append(ks_two_sample(sample, reference.values) if sample else None)
    metrics = {
        "median_deviation": median,
        "ratio_quantiles": quantiles,
        "ks_c": ks_c,
        "degenerate": sum(flag == FLAG_DEGENERATE for flag in flags),
        "failures": sum(flag == FLAG_FAILED for flag in flags),
    }
    passed = (
        median is not None
        and median < settings["LLT_RATIO_BAND"]
        and all(ks is not None and ks < settings["KS_BAND_LLT"] for ks in ks_c)
    )
    params = {
        "n": n,
        "z": z,
        "eps": eps,
        "c_list": list(c_list),
        "N": N,
        "reference_size": reference_size,
        "atoms": None if atoms is None else list(dists[0].atoms),
        "probs": None if atoms is None else list(dists[0].probs),
    }
    return HarnessRun(
        _report(HARNESS_LLT, params, seed, metrics, passed), {"windows": (columns, rows)}
    )


def _limit_pairs(d: int, size: int, seed: int, settings: Dict[str, Any], threads: int):
    """Return X(L, chi_1), X(L, chi_2) with a shared Haar lattice."""
    options = _series_options(settings)
    evaluate_options = {key: options[key] for key in ("cauchy_tol", "smooth", "y_guard")}

    def one(index: int):
        for attempt in range(8):
            pair = haar_sample(d, child_seed(seed, TAG_LIMIT, index, attempt))
            rng = stream(seed, TAG_CHARACTER, index, attempt)
            second = Character(theta=tuple(float(t) for t in rng.uniform(0.0, 1.0, size=d)))
            try:
                return tuple(
                    adaptive(
                        lambda R, chi=chi: script_X(pair.lattice, chi, R, **evaluate_options),
                        pair.lattice.shortest,
                        cauchy_tol=options["cauchy_tol"],
                        max_doublings=options["max_doublings"],
                    ).value
                    for chi in (pair.character, second)
                )
            except NearZeroY:
                continue
        return None

    pairs = [pair for pair in parallel_map(one, range(size), threads) if pair is not None]
    return np.array(pairs, dtype=float).reshape(-1, 2)


def harness_joint(
    n: int = 2000,
    z1: float = 0.0,
    z2: float = 1.0,
    N: int = 500,
    seed: int = 0,
    d: int = 2,
    method: str = METHOD_RESONANCE,
    reference_size: Optional[int] = None,
    config: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> HarnessRun:
    """Compare scaled error pairs at z1, z2 with X pairs on a shared lattice."""
    settings = _settings(config)
    if z1 == z2:
        raise PreconditionFailed("z1 and z2 must differ")
    if abs(z1 - z2) * n ** (d / 2.0) < 1e3:
        raise PreconditionFailed("|z1 - z2| n^{d/2} must be at least 1000")

    def one(index: int):
        dist = draw_parameters(d, settings["KAPPA"], settings["ATOM_BOUND"], child_seed(seed, TAG_ERRORS, index))
        try:
            return tuple(
                scaled_error(
                    dist, n, z, method, delta=settings["RESONANCE_DELTA"], K=settings["RESONANCE_K"]
                )
                for z in (z1, z2)
            )
        except NumericFailure as err:
            LOG.warning("Draw {} failed: {}".format(index, err))
            return None

    errors = np.array(
        [pair for pair in parallel_map(one, range(N), threads) if pair is not None], dtype=float
    ).reshape(-1, 2)
    reference_size = reference_size or max(N, 1000)
    limits = _limit_pairs(d, reference_size, child_seed(seed, TAG_REFERENCE), settings, threads)
    ks_first = ks_two_sample(errors[:, 0], limits[:, 0])
    ks_second = ks_two_sample(errors[:, 1], limits[:, 1])
    rho_pair = pearson(errors[:, 0], errors[:, 1])
    rho_limit = pearson(limits[:, 0], limits[:, 1])
    metrics = {
        "ks_z1": ks_first,
        "ks_z2": ks_second,
        "rho_pair": rho_pair,
        "rho_limit": rho_limit,
        "pairs": int(len(errors)),
    }
    passed = (
        ks_first < settings["KS_BAND_LIMIT"]
        and ks_second < settings["KS_BAND_LIMIT"]
        and abs(rho_pair - rho_limit) < settings["KS_BAND_JOINT_RHO"]
    )
    params = {"n": n, "z1": z1, "z2": z2, "N": N, "d": d, "method": method, "reference_size": reference_size}
    return HarnessRun(
        _report(HARNESS_JOINT, params, seed, metrics, passed),
        {"pairs": (["error_z1", "error_z2"], errors.tolist())},
    )


def _lattice_statistics(
    n: int, draw: Callable[[int], AtomicDistribution], N: int, threads: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Return ||w_1|| and theta of L(n, a) over N draws of a."""

    def one(index: int):
        dist = draw(index)
        L = reduce(lattice_of(n, dist))
        chi = character_of(n, dist, 0.0, L)
        return L.shortest, chi.theta

    outcomes = parallel_map(one, range(N), threads)
    return (
        np.array([shortest for shortest, _ in outcomes]),
        np.array([theta for _, theta in outcomes]),
    )


def harness_mixscale(
    d: int = 2,
    n_list: Sequence[int] = (100, 10000, 1000000),
    N: int = 2000,
    seed: int = 0,
    reference_size: Optional[int] = None,
    control: bool = True,
    config: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> HarnessRun:
    """Equidistribution of (L(n, a), theta) over random a against Haar and uniform."""
    settings = _settings(config)
    if d != 2:
        raise PreconditionFailed("the equidistribution harness needs d = 2")
    kappa, M = settings["KAPPA"], settings["ATOM_BOUND"]
    reference_size = reference_size or N
    haar = np.array(
        parallel_map(
            lambda i: haar_sample(d, child_seed(seed, TAG_REFERENCE, i)).lattice.shortest,
            range(reference_size),
            threads,
        )
    )
    rows, ks_lattice = [], []
    for n in n_list:
        shortest, theta = _lattice_statistics(
            n, lambda i: draw_parameters(d, kappa, M, child_seed(seed, TAG_ERRORS, i)), N, threads
        )
        ks_lattice.append(ks_two_sample(shortest, haar))
        ks_theta = [ks_uniform(theta[:, j]) for j in range(d)]
        dcov = distance_covariance(theta[:, 0], theta[:, 1])
        rows.append([n, ks_lattice[-1]] + ks_theta + [dcov])
        LOG.info("n={}: lattice KS {:.4f}, theta KS {}".format(n, ks_lattice[-1], ks_theta))
    last = rows[-1]
    control_ks = None
    if control:
        shortest, _ = _lattice_statistics(
            n_list[-1], lambda i: rational_draw(d, kappa, M, child_seed(seed, TAG_CONTROL, i)), N, threads
        )
        control_ks = ks_two_sample(shortest, haar)
    metrics = {
        "ks_lattice": ks_lattice,
        "ks_theta": last[2:2 + d],
        "dcov": last[-1],
        "ks_control": control_ks,
    }
    passed = (
        trend_ok(ks_lattice, settings["KS_BAND_INVERSION"])
        and ks_lattice[-1] < settings["KS_BAND_LATTICE"]
        and all(ks < settings["KS_BAND_THETA"] for ks in last[2:2 + d])
        and abs(last[-1]) < settings["DCOV_BAND"]
        and (control_ks is None or control_ks > settings["KS_BAND_RATIONAL"])
    )
    params = {"d": d, "n_list": list(n_list), "N": N, "reference_size": reference_size, "control": control}
    columns = ["n", "ks_lattice"] + ["ks_theta_{}".format(j + 1) for j in range(d)] + ["dcov"]
    return HarnessRun(
        _report(HARNESS_MIXSCALE, params, seed, metrics, passed), {"equidistribution": (columns, rows)}
    )


HARNESS_FUNCTIONS = {
    HARNESS_LIMIT: harness_limit,
    HARNESS_DIOPHANTINE: harness_diophantine,
    HARNESS_EXPONENT: harness_exponent,
    HARNESS_LLT: harness_llt,
    HARNESS_JOINT: harness_joint,
    HARNESS_MIXSCALE: harness_mixscale,
}


def run_harness(
    name: str,
    params: Dict[str, Any],
    seed: int,
    config: Optional[Mapping[str, Any]] = None,
    threads: int = 1,
) -> HarnessRun:
    """Run the harness ``name`` with keyword parameters ``params``."""
    if name not in HARNESS_FUNCTIONS:
        raise PreconditionFailed("unknown harness {}".format(name))
    return HARNESS_FUNCTIONS[name](seed=seed, config=config, threads=threads, **params)
