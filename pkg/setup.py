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

"""The setup script."""

from setuptools import find_packages, setup

with open("README.md") as readme_file:
    README = readme_file.read()

with open("edgeworth_lab/_version.py") as version_file:
    exec(version_file.read())


REQUIREMENTS = [
    "Click>=8.0",
    "Flask",
    "cachelib",
    "webargs>=8.0",
    "marshmallow>=3.13",
    "jsonschema",
    "PyYAML",
    "numpy>=1.22",
    "scipy>=1.8",
    "mpmath",
]

setup(
    author="The edgeworth-lab developers",
    python_requires=">=3.8",
    description="Exact, Edgeworth and resonance-based CLT errors of atomic sums "
    "and Monte Carlo samples of their lattice limit laws.",
    license="AGPL v3 or greater",
    install_requires=REQUIREMENTS,
    long_description=README,
    long_description_content_type="text/markdown",
    include_package_data=True,
    package_data={"edgeworth_lab": ["data/*.yaml", "data/*.cfg"]},
    name="edgeworth-lab",
    packages=find_packages(include=["edgeworth_lab", "edgeworth_lab.*"]),
    entry_points={"console_scripts": ["edgeworth-lab = edgeworth_lab.__main__:cli"]},
    version=__version__,
    zip_safe=False,
)
