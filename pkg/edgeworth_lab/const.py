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

"""Constants for the laboratory."""

import math
import sys

from pkg_resources import resource_filename

from ._version import __version__ as VERSION

# files
TEST_CONFIG = resource_filename("edgeworth_lab", "data/test.cfg")
EXAMPLE_CONFIG = resource_filename("edgeworth_lab", "data/example_lab.cfg")
REPORT_SCHEMA = resource_filename("edgeworth_lab", "data/report_schema.yaml")

# environment variables
ENV_CONFIG_FILE = "EDGEWORTH_LAB_CONFIG"

# output envelope
SCHEMA_VERSION = "1"
FORMAT_JSON = "json"
FORMAT_CSV = "csv"
FORMATS = (FORMAT_JSON, FORMAT_CSV)

# exit codes
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_HARNESS_FAIL = 3

TWO_PI = 2.0 * math.pi

# sentinel for a vacuous characteristic-function bound
CHAR_BOUND_VACUOUS = sys.float_info.max

# gauge values below this count as exact resonances
GAUGE_ZERO = 1e-12

# sin(2 pi theta) below this counts as an identically vanishing term
SINE_ZERO = 1e-15

# Haar sampler labels
SAMPLER_EXACT = "EXACT"
SAMPLER_APPROX = "APPROX"

# limit-law kinds
LIMIT_X = "X"
LIMIT_HAT_X = "hatX"
LIMIT_Y = "Y"
LIMIT_KINDS = (LIMIT_X, LIMIT_HAT_X, LIMIT_Y)

# error-ensemble methods
METHOD_EXACT = "exact"
METHOD_RESONANCE = "resonance"
METHODS = (METHOD_EXACT, METHOD_RESONANCE)

# exact-law engines
LAW_MULTINOMIAL = "multinomial"
LAW_CONVOLUTION = "convolution"
LAW_METHODS = (LAW_MULTINOMIAL, LAW_CONVOLUTION)

# per-draw status flags
FLAG_OK = "ok"
FLAG_UNCONVERGED = "unconverged"
FLAG_FAILED = "failed"
FLAG_DEGENERATE = "degenerate"

# harness names
HARNESS_LIMIT = "limit"
HARNESS_DIOPHANTINE = "diophantine"
HARNESS_EXPONENT = "exponent"
HARNESS_LLT = "llt"
HARNESS_JOINT = "joint"
HARNESS_MIXSCALE = "mixscale"
HARNESSES = (
    HARNESS_LIMIT,
    HARNESS_DIOPHANTINE,
    HARNESS_EXPONENT,
    HARNESS_LLT,
    HARNESS_JOINT,
    HARNESS_MIXSCALE,
)

# seed-tree tags (master -> harness -> draw)
TAG_REFERENCE = 1
TAG_ERRORS = 2
TAG_LIMIT = 3
TAG_CONTROL = 4
TAG_CHARACTER = 5

# Hermite constant bound for planar unimodular lattices
HERMITE_BOUND_2D = math.sqrt(2.0 / math.sqrt(3.0))

# golden ratio, the worst-approximable irrational
GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
