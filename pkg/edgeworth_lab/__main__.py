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

"""Command line interface for the edgeworth lab."""

import dataclasses
import logging
from typing import Sequence

import click
import numpy as np
from click.core import ParameterSource

from .cli import LabGroup, RunConfig, finish, load_params
from .cli.schemas import (
    HARNESS_SCHEMAS,
    EdgeworthSchema,
    ErrorSchema,
    ExactLawSchema,
    FourierOracleSchema,
    LatticeSchema,
    LimitSampleSchema,
    ResonanceSchema,
    TildeDeltaSchema,
)
from .config import DefaultConfig, load_config
from .const import (
    FORMAT_JSON,
    FORMATS,
    HARNESSES,
    LAW_MULTINOMIAL,
    LIMIT_HAT_X,
    LIMIT_Y,
    TAG_LIMIT,
)
from .errors import PreconditionFailed
from .experiments.harnesses import run_harness
from .numerics.atoms import validate
from .numerics.edgeworth import build_series, edgeworth_error, evaluate, sup_error
from .numerics.exactdist import exact_law
from .numerics.lattice import (
    LatticePair,
    character_of,
    haar_sample,
    lattice_of,
    reduce,
    successive_minima,
)
from .numerics.limitlaw import sample_limit_ensemble
from .numerics.resonance import (
    fourier_oracle,
    quadratic_law_fit,
    resonant_sum,
    resonant_terms,
    small_eta_terms,
    structure_constants,
    tilde_delta,
    xi_fit,
)
from .util import child_seed

logging.basicConfig()
LOG = logging.getLogger("edgeworth_lab")


def atoms_options(func):
    func = click.option("--probs", help="Comma-separated probabilities")(func)
    return click.option("--atoms", help="Comma-separated atoms")(func)


def _source(ctx, name: str) -> str:
    source = ctx.get_parameter_source(name)
    return "commandline" if source == ParameterSource.COMMANDLINE else "config"


@click.group("cli", cls=LabGroup)
@click.option("--config", help="Set the path to the config file")
@click.option(
    "--seed",
    type=click.IntRange(min=0),
    help="Master seed (default: MASTER_SEED, {})".format(DefaultConfig.MASTER_SEED),
)
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    help="Worker threads (default: THREADS, {})".format(DefaultConfig.THREADS),
)
@click.option("--output-dir", help="Directory for JSON and CSV artifacts (default: OUTPUT_DIR)")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(FORMATS),
    default=FORMAT_JSON,
    show_default=True,
    help="Format written to standard output",
)
@click.pass_context
def cli(ctx, config, seed, threads, output_dir, fmt):
    """Exact and asymptotic CLT errors of atomic sums."""
    settings = load_config(config)
    ctx.obj = RunConfig(
        subcommand="",
        params={},
        seed=seed if seed is not None else int(settings["MASTER_SEED"]),
        threads=threads if threads is not None else int(settings["THREADS"]),
        output_dir=output_dir if output_dir is not None else settings["OUTPUT_DIR"],
        fmt=fmt,
        settings=settings,
        sources={name: _source(ctx, name) for name in ("seed", "threads", "output_dir")},
    )


def _run(ctx, subcommand: str, params) -> RunConfig:
    return dataclasses.replace(ctx.obj, subcommand=subcommand, params=params)


def _distribution(run: RunConfig):
    return validate(
        run.params["atoms"], run.params["probs"], tol=run.settings["VALIDATION_TOL"]
    )


def _law(run: RunConfig, dist, n: int, method: str, merge_tol=None):
    if merge_tol is None:
        merge_tol = run.settings["MERGE_TOL"] * dist.m_bound
    return exact_law(dist, n, merge_tol=merge_tol, method=method, cap=run.settings["SUPPORT_CAP"])


@cli.command("exact-law")
@atoms_options
@click.option("--n", help="Number of summands", type=int)
@click.option("--method", help="multinomial or convolution (default: multinomial)")
@click.option("--merge-tol", help="Absolute merge tolerance (default: MERGE_TOL times max |a|)", type=float)
@click.pass_context
def exact_law_command(ctx, **options):
    """Exact support and masses of S_n."""
    run = _run(ctx, "exact-law", load_params(ExactLawSchema(), options))
    dist = _distribution(run)
    law = _law(run, dist, run.params["n"], run.params["method"], run.params["merge_tol"])
    results = {
        "distribution": dist.to_dict(),
        "n": law.n,
        "support_size": len(law),
        "total_mass": law.total_mass,
        "dropped_mass": law.dropped_mass,
        "merge_tol": law.merge_tol,
    }
    return finish(run, results, {"law": (["value", "mass"], law.to_rows())})


@cli.command("edgeworth")
@atoms_options
@click.option("--n", help="Number of summands", type=int)
@click.option("--r", help="Series order (default: 1)", type=int)
@click.option("--z", help="Comma-separated evaluation points (default: 0)")
@click.pass_context
def edgeworth_command(ctx, **options):
    """Edgeworth expansion E_r(z) of order r."""
    run = _run(ctx, "edgeworth", load_params(EdgeworthSchema(), options))
    dist = _distribution(run)
    series = build_series(dist, run.params["r"])
    z = np.array(run.params["z"], dtype=float)
    values = np.atleast_1d(evaluate(series, z, run.params["n"]))
    results = {"series": series.to_dict(), "z": z, "values": values}
    return finish(run, results, {"edgeworth": (["z", "value"], list(zip(z.tolist(), values.tolist())))})


@cli.command("error")
@atoms_options
@click.option("--n", help="Number of summands", type=int)
@click.option("--r", help="Series order (default: d)", type=int)
@click.option("--z", help="Comma-separated evaluation points (default: 0)")
@click.option("--method", help="Exact law engine (default: multinomial)")
@click.pass_context
def error_command(ctx, **options):
    """CLT error E_r(z) - F_n(z), scaled by e^{z^2/2} n^{d/2} / Lambda."""
    run = _run(ctx, "error", load_params(ErrorSchema(), options))
    dist = _distribution(run)
    n = run.params["n"]
    r = run.params["r"] or dist.d
    law = _law(run, dist, n, run.params["method"])
    z = np.array(run.params["z"], dtype=float)
    errors = np.atleast_1d(edgeworth_error(dist, n, r, z, law=law))
    Lambda = structure_constants(dist).Lambda
    scaled = np.exp(0.5 * z * z) * n ** (dist.d / 2.0) * errors / Lambda
    results = {
        "r": r,
        "z": z,
        "errors": errors,
        "scaled": scaled,
        "sup_error": sup_error(law, build_series(dist, r), dist),
    }
    rows = [list(row) for row in zip(z.tolist(), errors.tolist(), scaled.tolist())]
    return finish(run, results, {"error": (["z", "error", "scaled"], rows)})


@cli.command("resonance")
@atoms_options
@click.option("--n", help="Number of summands", type=int)
@click.option("--z", help="Evaluation point (default: 0)", type=float)
@click.option("--kmax", help="Number of resonant intervals (default: 10)", type=int)
@click.pass_context
def resonance_command(ctx, **options):
    """Structure constants and the peaks of the resonant intervals."""
    run = _run(ctx, "resonance", load_params(ResonanceSchema(), options))
    dist = _distribution(run)
    n, kmax = run.params["n"], run.params["kmax"]
    scan = {
        "scan_points": run.settings["PEAK_SCAN_POINTS"],
        "exponent": run.settings["RESONANCE_EXPONENT"],
    }
    terms = resonant_terms(dist, n, kmax, **scan)
    constants = structure_constants(dist)
    near = small_eta_terms(terms)
    columns = ["k", "s_k", "bar_s", "r", "phi"]
    columns += ["eta_{}".format(j + 2) for j in range(dist.d - 1)] + ["resonant"]
    results = {
        "constants": constants.to_dict(),
        "small_eta_count": len(near),
        "quadratic_law_C": quadratic_law_fit(near, constants),
        "xi_C": xi_fit(near, constants),
        "resonant_count": sum(term.resonant for term in terms),
        "resonant_sum": resonant_sum(dist, n, run.params["z"], kmax, **scan),
    }
    return finish(run, results, {"peaks": (columns, [term.to_row() for term in terms])})


@cli.command("tilde-delta")
@atoms_options
@click.option("--n", help="Number of summands", type=int)
@click.option("--z", help="Comma-separated evaluation points (default: 0)")
@click.option(
    "--delta",
    help="Window exponent (default: RESONANCE_DELTA, {})".format(DefaultConfig.RESONANCE_DELTA),
    type=float,
)
@click.option(
    "--K",
    "K",
    help="Window constant (default: RESONANCE_K, {})".format(DefaultConfig.RESONANCE_K),
    type=float,
)
@click.option("--k1", help="Fourier cutoff constant whose interval is excluded", type=float)
@click.option("--exact", is_flag=True, help="Also compute the exact error")
@click.pass_context
def tilde_delta_command(ctx, **options):
    """Resonant approximation of the CLT error."""
    params = load_params(TildeDeltaSchema(), options)
    settings = ctx.obj.settings
    if params["delta"] is None:
        params["delta"] = settings["RESONANCE_DELTA"]
    if params["K"] is None:
        params["K"] = settings["RESONANCE_K"]
    run = _run(ctx, "tilde-delta", params)
    dist = _distribution(run)
    n = params["n"]
    constants = structure_constants(dist)
    values = [
        tilde_delta(dist, n, z, params["delta"], params["K"], params["k1"], constants)
        for z in params["z"]
    ]
    columns, rows = ["z", "tilde_delta"], [list(pair) for pair in zip(params["z"], values)]
    results = {"z": params["z"], "values": values}
    if params["exact"]:
        law = _law(run, dist, n, LAW_MULTINOMIAL)
        exact = [edgeworth_error(dist, n, dist.d, z, law=law) for z in params["z"]]
        results["exact"] = exact
        columns.append("exact")
        rows = [row + [value] for row, value in zip(rows, exact)]
    return finish(run, results, {"tilde_delta": (columns, rows)})


@cli.command("fourier-oracle")
@atoms_options
@click.option("--n", help="Number of summands", type=int)
@click.option("--z", help="Comma-separated evaluation points (default: 0)")
@click.option(
    "--K1",
    "K1",
    help="Cutoff constant (default: FOURIER_K1, {})".format(DefaultConfig.FOURIER_K1),
    type=float,
)
@click.option("--full-line", is_flag=True, help="Integrate both half lines")
@click.option("--tol", help="Absolute tolerance (default: 1e-10 n^{-d/2})", type=float)
@click.pass_context
def fourier_oracle_command(ctx, **options):
    """CLT error by direct Fourier inversion."""
    params = load_params(FourierOracleSchema(), options)
    if params["K1"] is None:
        params["K1"] = ctx.obj.settings["FOURIER_K1"]
    run = _run(ctx, "fourier-oracle", params)
    dist = _distribution(run)
    values = [
        fourier_oracle(
            dist,
            params["n"],
            z,
            K1=params["K1"],
            full_line=params["full_line"],
            tol=params["tol"],
            scan_points=run.settings["PEAK_SCAN_POINTS"],
        )
        for z in params["z"]
    ]
    results = {"z": params["z"], "values": values}
    rows = [list(pair) for pair in zip(params["z"], values)]
    return finish(run, results, {"fourier": (["z", "value"], rows)})


@cli.command("lattice")
@atoms_options
@click.option("--n", help="Number of summands", type=int)
@click.option("--z", help="Evaluation point (default: 0)", type=float)
@click.option("--d", help="Draw a Haar-random lattice of this dimension instead", type=int)
@click.option("--minima", is_flag=True, help="Also compute successive minima")
@click.pass_context
def lattice_command(ctx, **options):
    """Reduced lattice L(n, a) with its character, or a Haar-random pair."""
    run = _run(ctx, "lattice", load_params(LatticeSchema(), options))
    settings = run.settings
    if run.params["atoms"] is not None:
        dist = _distribution(run)
        L = reduce(
            lattice_of(run.params["n"], dist),
            lll_delta=settings["LLL_DELTA"],
            budget=settings["ENUMERATION_BUDGET"],
        )
        pair = LatticePair(L, character_of(run.params["n"], dist, run.params["z"], L))
    else:
        pair = haar_sample(
            run.params["d"],
            child_seed(run.seed, TAG_LIMIT),
            y_cap=settings["HAAR_Y_CAP"],
            approx_time=settings["HAAR_APPROX_TIME"],
        )
    results = pair.to_dict()
    results["shortest"] = pair.lattice.shortest
    if run.params["minima"]:
        results["minima"] = successive_minima(pair.lattice, settings["ENUMERATION_BUDGET"])
    generators = pair.lattice.generators
    columns = ["index"] + ["x{}".format(j + 1) for j in range(generators.shape[1])]
    rows = [[i + 1] + row for i, row in enumerate(generators.tolist())]
    return finish(run, results, {"generators": (columns, rows)})


@cli.command("limit-sample")
@atoms_options
@click.option("--d", help="Dimension (default: 2)", type=int)
@click.option("--which", help="X, hatX or Y (default: X)")
@click.option("--N", "N", help="Number of draws (default: 1000)", type=int)
@click.option("--c", help="Window constant of Y", type=float)
@click.option("--z", help="Evaluation point of hatX (default: 0)", type=float)
@click.option("--smooth/--sharp", default=None, help="Tapered partial sums (default: SERIES_TAPER)")
@click.pass_context
def limit_sample_command(ctx, **options):
    """Monte Carlo draws of a limit law over Haar lattices."""
    if ctx.get_parameter_source("smooth") != ParameterSource.COMMANDLINE:
        options["smooth"] = None
    params = load_params(LimitSampleSchema(), options)
    settings = ctx.obj.settings
    if params["smooth"] is None:
        params["smooth"] = bool(settings["SERIES_TAPER"])
    run = _run(ctx, "limit-sample", params)
    if params["which"] == LIMIT_Y:
        kind_params = {"c": params["c"]}
    elif params["which"] == LIMIT_HAT_X:
        kind_params = {k: params[k] for k in ("atoms", "probs", "z")}
    else:
        kind_params = {}
    ensemble = sample_limit_ensemble(
        params["d"],
        params["which"],
        kind_params,
        params["N"],
        child_seed(run.seed, TAG_LIMIT),
        threads=run.threads,
        cauchy_tol=settings["CAUCHY_TOL"],
        max_doublings=settings["MAX_DOUBLINGS"],
        smooth=params["smooth"],
        y_guard=settings["Y_GUARD"],
    )
    if ensemble.unconverged_fraction > settings["UNCONVERGED_FRACTION"]:
        LOG.warning(
            "{:.1%} of the draws did not converge".format(ensemble.unconverged_fraction)
        )
    return finish(run, ensemble.summary(), {"samples": (ensemble.columns(), ensemble.rows())})


def _parse_pairs(pairs: Sequence[str]):
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise PreconditionFailed("parameters must look like key=value, got {}".format(pair))
        params[key.strip()] = value.strip()
    return params


@cli.command("harness")
@click.argument("name", type=click.Choice(HARNESSES))
@click.option("-p", "--param", "pairs", multiple=True, help="Harness parameter as key=value")
@click.pass_context
def harness_command(ctx, name, pairs):
    """Run a statistical harness; exit 3 on a FAIL verdict."""
    params = HARNESS_SCHEMAS[name]().load(_parse_pairs(pairs))
    run = _run(ctx, "harness", dict(params, harness=name))
    LOG.info("Running harness {} ...".format(name))
    outcome = run_harness(name, params, run.seed, config=run.settings, threads=run.threads)
    verdict = outcome.report["pass"]
    LOG.info("Harness {} {}".format(name, "passed" if verdict else "failed"))
    return finish(run, outcome.report, outcome.tables, passed=verdict)


def dispatch(argv: Sequence[str]) -> int:
    """Run the command line with ``argv`` and return the exit code."""
    return cli.main(args=list(argv), prog_name="edgeworth-lab", standalone_mode=False)


if __name__ == "__main__":
    LOG.setLevel(logging.INFO)

    cli(
        prog_name="python3 -m edgeworth_lab"
    )  # pylint:disable=no-value-for-parameter,unexpected-keyword-arg
