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

"""Custom types."""

from pathlib import Path
from typing import Any, Dict, NewType, Sequence, Tuple, Union

import numpy as np

Seed = NewType("Seed", int)
FilenameOrPath = Union[str, Path]
RealSequence = Union[Sequence[float], np.ndarray]
RealOrArray = Union[float, np.ndarray]
ComplexOrArray = Union[complex, np.ndarray]
Box = Tuple[Tuple[float, float], ...]
Report = Dict[str, Any]
