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

"""Command line plumbing: run configuration, error reporting and output."""

import dataclasses
import json
import logging
import os
import sys
from typing import Any, Dict, Optional

import click
from marshmallow import Schema, ValidationError

from .._version import __version__
from ..const import EXIT_HARNESS_FAIL, EXIT_OK, EXIT_VALIDATION, FORMAT_CSV, FORMAT_JSON
from ..errors import IoError, LabError
from .emit import Table, emit, envelope, render

LOG = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run."""

    subcommand: str
    params: Dict[str, Any]
    seed: int
    threads: int
    output_dir: Optional[str]
    fmt: str
    settings: Any = dataclasses.field(repr=False, compare=False, default=None)
    sources: Dict[str, str] = dataclasses.field(default_factory=dict)

    @property
    def stem(self) -> str:
        if self.subcommand == "harness":
            return "harness-{}".format(self.params.get("harness", ""))
        return self.subcommand

    def echo(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
            "threads": self.threads,
            "version": __version__,
            "sources": self.sources,
        }


def report_error(code: int, name: str, message: str) -> int:
    """Write the single machine-parsable error line and return ``code``."""
    click.echo("E:{}:{}: {}".format(code, name, " ".join(str(message).split())), err=True)
    return code


class LabGroup(click.Group):
    """Click group mapping every failure to an exit code and one stderr line."""

    def main(self, args=None, prog_name=None, standalone_mode=True, **extra):
        try:
            code = super().main(
                args=args, prog_name=prog_name, standalone_mode=False, **extra
            )
        except click.ClickException as err:
            code = report_error(EXIT_VALIDATION, type(err).__name__, err.format_message())
        except click.Abort:
            code = report_error(EXIT_VALIDATION, "Abort", "aborted")
        except ValidationError as err:
            code = report_error(
                EXIT_VALIDATION, "ValidationError", json.dumps(err.messages, sort_keys=True)
            )
        except LabError as err:
            code = report_error(err.code, err.name, str(err))
        code = code or EXIT_OK
        if standalone_mode:
            sys.exit(code)
        return code


def load_params(schema: Schema, options: Dict[str, Any]) -> Dict[str, Any]:
    """Load the options given on the command line, filling in defaults."""
    return schema.load({key: value for key, value in options.items() if value is not None})


def finish(
    run: RunConfig,
    results: Dict[str, Any],
    tables: Dict[str, Table],
    passed: Optional[bool] = None,
) -> int:
    """Emit the envelope and its CSV artifacts and return the exit code."""
    if run.output_dir:
        try:
            os.makedirs(run.output_dir, exist_ok=True)
        except OSError as err:
            raise IoError("cannot create {}: {}".format(run.output_dir, err)) from err
        artifacts = []
        for name in sorted(tables):
            filename = "{}-{}.csv".format(run.stem, name)
            emit(tables[name], FORMAT_CSV, os.path.join(run.output_dir, filename))
            artifacts.append(filename)
        if "artifacts" in results:
            results = dict(results, artifacts=artifacts)
    data = envelope(run.echo(), results)
    if run.output_dir:
        emit(data, FORMAT_JSON, os.path.join(run.output_dir, "{}.json".format(run.stem)))
    if run.fmt == FORMAT_JSON:
        click.echo(render(data, FORMAT_JSON), nl=False)
    else:
        primary = next(iter(tables.values()), ([], []))
        click.echo(render(primary, run.fmt), nl=False)
    return EXIT_HARNESS_FAIL if passed is False else EXIT_OK
