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

"""Default configuration settings."""

import os
from typing import Optional

from flask import Config

from .const import ENV_CONFIG_FILE
from .errors import ConfigError
from .types import FilenameOrPath


class DefaultConfig(object):
    """Default configuration object."""

    MASTER_SEED = int(os.getenv("EDGEWORTH_LAB_SEED", "20240611"))
    THREADS = int(os.getenv("EDGEWORTH_LAB_THREADS", "1"))
    OUTPUT_DIR = os.getenv("EDGEWORTH_LAB_OUTPUT_DIR")
    # validation
    VALIDATION_TOL = 1e-9
    MERGE_TOL = 1e-9
    SUPPORT_CAP = 2e8
    BRUTE_FORCE_CAP = 1e7
    # resonance windows
    RESONANCE_DELTA = 0.05
    RESONANCE_K = 4.0
    FOURIER_K1 = 8.0
    PEAK_SCAN_POINTS = 64
    RESONANCE_EXPONENT = 100
    # lattices
    LLL_DELTA = 0.999
    HAAR_Y_CAP = 1e3
    HAAR_APPROX_TIME = 6.0
    ENUMERATION_BUDGET = 1e8
    # limit-law series
    Y_GUARD = 1e-12
    CAUCHY_TOL = 1e-3
    MAX_DOUBLINGS = 10
    SERIES_TAPER = True
    # parameter draws
    KAPPA = 0.05
    ATOM_BOUND = 3.0
    REFERENCE_ENSEMBLE_SIZE = 20000
    REFERENCE_CACHE_CONFIG = {
        "CACHE_DIR": os.getenv("EDGEWORTH_LAB_CACHE_DIR", "reference_cache"),
        "CACHE_THRESHOLD": 100,
    }
    # calibration
    KS_BAND_LIMIT = 0.08
    KS_BAND_INVERSION = 0.01
    KS_BAND_METHODS = 0.08
    KS_BAND_SYMMETRY = 0.02
    KS_BAND_THETA = 0.04
    KS_BAND_LATTICE = 0.06
    KS_BAND_RATIONAL = 0.2
    KS_BAND_LLT = 0.1
    KS_BAND_JOINT_RHO = 0.1
    DCOV_BAND = 0.05
    LLT_RATIO_BAND = 0.1
    DIOPHANTINE_GROWTH = 3.0
    UNCONVERGED_FRACTION = 0.02
    EXPONENT_BETA_MAX = 1.25


def load_config(path: Optional[FilenameOrPath] = None) -> Config:
    """Load the configuration.

    Defaults are overwritten by the file named in the environment variable
    ``EDGEWORTH_LAB_CONFIG`` and then by ``path``. Keys unknown to
    ``DefaultConfig`` are rejected.
    """
    config = Config(os.getcwd())
    config.from_object(DefaultConfig)
    known = set(config)
    try:
        if os.getenv(ENV_CONFIG_FILE):
            config.from_envvar(ENV_CONFIG_FILE)
        if path:
            config.from_pyfile(os.path.abspath(path))
    except (OSError, SyntaxError, NameError) as err:
        raise ConfigError("cannot read config: {}".format(err)) from err
    unknown = sorted(set(config) - known)
    if unknown:
        raise ConfigError("unknown config keys: {}".format(", ".join(unknown)))
    return config
