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

"""Seeded ensembles of scaled CLT errors and of the limit law."""

import hashlib
import logging
import math
from typing import Any, Dict, Optional

import numpy as np
from cachelib import FileSystemCache

from .._version import __version__
from ..const import (
    FLAG_FAILED,
    FLAG_OK,
    LIMIT_X,
    METHOD_EXACT,
    METHODS,
    TAG_ERRORS,
    TAG_REFERENCE,
)
from ..errors import EmptyEnsemble, NumericFailure, PreconditionFailed
from ..numerics.atoms import AtomicDistribution
from ..numerics.edgeworth import edgeworth_error
from ..numerics.exactdist import exact_law
from ..numerics.limitlaw import sample_limit_ensemble
from ..numerics.resonance import (
    DEFAULT_DELTA,
    DEFAULT_K,
    structure_constants,
    tilde_delta,
)
from ..util import child_seed, parallel_map
from .sampling import draw_parameters
from .stats import EnsembleResult

LOG = logging.getLogger(__name__)

KAPPA = 0.05
ATOM_BOUND = 3.0


def scaled_error(
    dist: AtomicDistribution,
    n: int,
    z: float,
    method: str = METHOD_EXACT,
    delta: float = DEFAULT_DELTA,
    K: float = DEFAULT_K,
    **law_options
) -> float:
    """Return e^{z^2/2} n^{d/2} Delta_n / Lambda."""
    constants = structure_constants(dist)
    if method == METHOD_EXACT:
        law = exact_law(dist, n, **law_options)
        error = edgeworth_error(dist, n, dist.d, z, law=law)
    else:
        error = tilde_delta(dist, n, z, delta=delta, K=K, constants=constants)
    return math.exp(0.5 * z * z) * n ** (dist.d / 2.0) * error / constants.Lambda


def error_ensemble(
    d: int,
    n: int,
    z: float,
    N: int,
    method: str,
    kappa: float = KAPPA,
    M: float = ATOM_BOUND,
    seed: int = 0,
    threads: int = 1,
    delta: float = DEFAULT_DELTA,
    K: float = DEFAULT_K,
    **law_options
) -> EnsembleResult:
    """Return N draws of the scaled error over random distributions.

    Draw i takes its distribution from the substream (seed, TAG_ERRORS, i), so
    ensembles with the same seed share their distributions across methods.
    """
    if N < 1:
        raise EmptyEnsemble("N must be at least 1")
    if method not in METHODS:
        raise PreconditionFailed("unknown method {}".format(method))
    LOG.info("Sampling {} scaled errors at d={}, n={}, method {}".format(N, d, n, method))

    def draw(index: int):
        dist = draw_parameters(d, kappa, M, child_seed(seed, TAG_ERRORS, index))
        try:
            value = scaled_error(dist, n, z, method, delta=delta, K=K, **law_options)
        except NumericFailure as err:
            LOG.warning("Draw {} failed: {}".format(index, err))
            return index, dist, None
        return index, dist, value

    values, flags = [], []
    diagnostics = {"draw_index": [], "atoms": [], "probs": []}
    for index, dist, value in parallel_map(draw, range(N), threads):
        if value is None or not math.isfinite(value):
            flags.append(FLAG_FAILED)
            continue
        flags.append(FLAG_OK)
        values.append(value)
        diagnostics["draw_index"].append(index)
        diagnostics["atoms"].append(list(dist.atoms))
        diagnostics["probs"].append(list(dist.probs))
    return EnsembleResult(
        label="error-{}".format(method),
        params={"d": d, "n": n, "z": z, "N": N, "method": method, "kappa": kappa, "M": M},
        seed=int(seed),
        values=np.array(values, dtype=float),
        flags=tuple(flags),
        diagnostics=diagnostics,
    )


def make_cache_key(kind: str, d: int, N: int, seed: int, params: Dict[str, Any]) -> str:
    """Make a cache key for a limit-law ensemble."""
    args_as_bytes = str((kind, d, N, seed, sorted(params.items()), __version__)).encode()
    return "{}-d{}-{}".format(kind, d, hashlib.md5(args_as_bytes).hexdigest())


def reference_ensemble(
    d: int,
    N: int,
    seed: int,
    cache_config: Optional[Dict[str, Any]] = None,
    threads: int = 1,
    which: str = LIMIT_X,
    params: Optional[Dict[str, Any]] = None,
    **options
) -> EnsembleResult:
    """Return the reference limit-law ensemble, cached on disk when configured."""
    params = params or {}
    cache = None
    if cache_config:
        cache = FileSystemCache(
            cache_config["CACHE_DIR"],
            threshold=cache_config.get("CACHE_THRESHOLD", 100),
            default_timeout=0,
        )
        key = make_cache_key(which, d, N, seed, params)
        cached = cache.get(key)
        if cached is not None:
            LOG.info("Using cached reference ensemble {}".format(key))
            return cached
    ensemble = sample_limit_ensemble(
        d, which, params, N, child_seed(seed, TAG_REFERENCE), threads=threads, **options
    )
    if cache is not None:
        cache.set(key, ensemble)
    return ensemble
