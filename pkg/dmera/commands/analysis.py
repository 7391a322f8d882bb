"""Correlator, entropy and subsystem-fidelity analysis of a prepared DMERA state"""

import logging
from typing import Tuple

import click

from dmera.ansatz import prepare_state
from dmera.core import BenchContext, RunConfig, parse_int_list, parse_theta, pass_bench, require
from dmera.gaussian import CovarianceState
from dmera.models import SOLUTIONS, Model
from dmera.symmetry import (
    analysis_frame,
    correlator_table,
    entropy_profile,
    error_summary,
    kw_average,
    orbit_variance,
    shot_variance,
    subsystem_infidelity_profile,
    translation_average,
)

logger = logging.getLogger(__name__)

CORRELATOR_COLUMNS = [
    "d", "family_A", "family_B", "kw_average", "exact", "mean_abs_error",
    "abs_error_of_mean", "ratio", "orbit_variance_A", "shot_variance",
]
ENTROPY_COLUMNS = ["N", "mean_entropy", "exact_mean", "relative_error"]
SUBFID_COLUMNS = ["N", "mean_normalized_infidelity"]


def prepared_pair(config: RunConfig) -> Tuple[CovarianceState, CovarianceState]:
    """(state in the Ising frame, exact Ising ground state) for 2**layers sites"""
    state = prepare_state(config.parameters(), config.depth, config.layers)
    exact = SOLUTIONS.get(Model.ISING, state.n_sites).ground_state
    return analysis_frame(state, config.model), exact


def correlator_rows(state: CovarianceState, exact: CovarianceState, max_distance: int) -> list:
    table = correlator_table(state, exact, max_distance)
    rows = []
    for d in range(max_distance + 1):
        summary = error_summary(table, d)
        average = kw_average(table, d)
        rows.append({
            "d": d,
            "family_A": translation_average(table, "A", d),
            "family_B": translation_average(table, "B", d),
            "kw_average": average,
            "exact": float(table.exact[0, 0, d]),
            "mean_abs_error": summary.mean_abs_error,
            "abs_error_of_mean": summary.abs_error_of_mean,
            "ratio": summary.ratio,
            "orbit_variance_A": orbit_variance(table, "A", d),
            "shot_variance": shot_variance(average),
        })
    return rows


_state_options = [
    click.option("--model", type=click.Choice(["ising", "modified_ising"]), default=None),
    click.option("--depth", type=int, default=None, help="Circuit depth D"),
    click.option("--layers", type=int, default=None, help="Prepare L = 2**layers sites"),
    click.option("--theta", default=None, help="Parameter file or comma-separated angles"),
    click.option("--out", type=click.Path(dir_okay=False), default=None),
    click.option("--svg", is_flag=True, help="Also write an SVG chart"),
]


def state_options(fn):
    for option in reversed(_state_options):
        fn = option(fn)
    return fn


@click.command()
@state_options
@click.option("--max-distance", type=int, default=None)
@pass_bench
def correlate(bench: BenchContext, model, depth, layers, theta, out, svg, max_distance):
    """Translation and Kramers-Wannier averaged correlator errors"""
    config = bench.config(model=model, depth=depth, layers=layers, theta=parse_theta(theta),
                          out=out, svg=svg or None, max_distance=max_distance)
    require(config.max_distance <= 2 ** config.layers // 2, "max-distance must be at most L/2")
    state, exact = prepared_pair(config)
    rows = correlator_rows(state, exact, config.max_distance)
    points = [r for r in rows if r["d"] > 0]
    bench.emit(rows, CORRELATOR_COLUMNS, bench.output_path(config, "correlate.csv"),
               f"Correlators D={config.depth} L={state.n_sites}",
               chart={"series": {
                   "mean |error|": [(r["d"], r["mean_abs_error"]) for r in points],
                   "|error of mean|": [(r["d"], r["abs_error_of_mean"]) for r in points],
               }, "xlabel": "d", "ylabel": "error", "log_x": True},
               svg=config.svg)


@click.command()
@state_options
@click.option("--sizes", default=None, help="Comma-separated subsystem sizes")
@pass_bench
def entropy(bench: BenchContext, model, depth, layers, theta, out, svg, sizes):
    """Window-averaged entanglement entropy against the exact ground state"""
    config = bench.config(model=model, depth=depth, layers=layers, theta=parse_theta(theta),
                          out=out, svg=svg or None, sizes=parse_int_list(sizes))
    state, exact = prepared_pair(config)
    sizes = [n for n in config.sizes if n < state.n_sites]
    require(bool(sizes), f"no subsystem size below L={state.n_sites}")
    rows = entropy_profile(state, exact, sizes)
    bench.emit(rows, ENTROPY_COLUMNS, bench.output_path(config, "entropy.csv"),
               f"Entropy D={config.depth} L={state.n_sites}",
               chart={"series": {"relative error": [(r["N"], r["relative_error"]) for r in rows]},
                      "xlabel": "N", "ylabel": "|relative error|", "log_x": True},
               svg=config.svg)


@click.command()
@state_options
@click.option("--sizes", default=None, help="Comma-separated subsystem sizes")
@pass_bench
def subfid(bench: BenchContext, model, depth, layers, theta, out, svg, sizes):
    """Window-averaged normalised subsystem infidelity"""
    config = bench.config(model=model, depth=depth, layers=layers, theta=parse_theta(theta),
                          out=out, svg=svg or None, sizes=parse_int_list(sizes))
    state, exact = prepared_pair(config)
    sizes = [n for n in config.sizes if n < state.n_sites]
    require(bool(sizes), f"no subsystem size below L={state.n_sites}")
    rows = subsystem_infidelity_profile(state, exact, sizes)
    bench.emit(rows, SUBFID_COLUMNS, bench.output_path(config, "subfid.csv"),
               f"Subsystem infidelity D={config.depth} L={state.n_sites}",
               chart={"series": {"1 - F^(1/N)": [(r["N"], r["mean_normalized_infidelity"]) for r in rows]},
                      "xlabel": "N", "ylabel": "normalised infidelity", "log_x": True},
               svg=config.svg)
