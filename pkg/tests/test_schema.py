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

"""Tests for the report schema."""

import unittest

import yaml
from jsonschema import Draft4Validator, validate

from edgeworth_lab.cli.emit import envelope
from edgeworth_lab.const import REPORT_SCHEMA, SCHEMA_VERSION


class TestSchema(unittest.TestCase):
    """Test cases to validate schema format."""

    def test_schema(self):
        """Check schema for validity."""
        # check it loads okay
        with open(REPORT_SCHEMA) as file_handle:
            report_schema = yaml.safe_load(file_handle)
        # check structure
        Draft4Validator.check_schema(report_schema)
        Draft4Validator.check_schema(report_schema["definitions"]["harness_report"])

    def test_envelope(self):
        """Check an envelope validates against the schema."""
        echo = {
            "subcommand": "edgeworth",
            "params": {"n": 2},
            "seed": 1,
            "threads": 1,
            "version": "0.1.0",
        }
        data = envelope(echo, {"values": [0.5]})
        assert data["schema_version"] == SCHEMA_VERSION
        with open(REPORT_SCHEMA) as file_handle:
            validate(data, yaml.safe_load(file_handle))
