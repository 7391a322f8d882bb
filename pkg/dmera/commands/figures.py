"""Data grids behind each benchmark plot"""

import logging
from typing import Callable, Dict, List, Tuple

import click

from dmera.ansatz import (
    energy_density,
    global_fidelity,
    load_bundled_parameters,
    prepare_state,
    relative_energy_error,
)
from dmera.commands.analysis import correlator_rows
from dmera.commands.qaoa import qaoa_rows
from dmera.core import BenchContext, RunConfig, parse_int_list, pass_bench, require
from dmera.models import SOLUTIONS, Model
from dmera.symmetry import analysis_frame, entropy_profile, subsystem_infidelity_profile

logger = logging.getLogger(__name__)

FigureResult = Tuple[List[dict], List[str], dict]


def _pair(model, depth: int, layers: int):
    state = prepare_state(load_bundled_parameters(model, depth), depth, layers)
    exact = SOLUTIONS.get(Model.ISING, state.n_sites).ground_state
    return analysis_frame(state, model), exact


def _series(rows: List[dict], key: str, x: str, y: str) -> Dict[str, list]:
    series: Dict[str, list] = {}
    for row in rows:
        series.setdefault(f"{key}={row[key]}", []).append((row[x], row[y]))
    return series


def _sizes(config: RunConfig) -> List[int]:
    return [n for n in config.sizes if n < 2 ** config.layers]


def entropy_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    def run(depth):
        state, exact = _pair(config.model, depth, config.layers)
        return [{"D": depth, **row} for row in entropy_profile(state, exact, _sizes(config))]

    rows = [r for chunk in bench.map(run, range(1, config.depth + 1)) for r in chunk]
    chart = {"series": _series(rows, "D", "N", "relative_error"), "xlabel": "N",
             "ylabel": "|relative entropy error|", "log_x": True}
    return rows, ["D", "N", "mean_entropy", "exact_mean", "relative_error"], chart


def energy_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    grid = [(model, d) for model in (Model.ISING, Model.MODIFIED_ISING) for d in range(1, config.depth + 1)]

    def run(item):
        model, depth = item
        density = energy_density(load_bundled_parameters(model, depth), depth, model)
        return {"model": model.value, "D": depth, "energy_density": density,
                "relative_error": relative_energy_error(density)}

    rows = bench.map(run, grid)
    chart = {"series": _series(rows, "model", "D", "relative_error"), "xlabel": "D",
             "ylabel": "relative energy error"}
    return rows, ["model", "D", "energy_density", "relative_error"], chart


def global_fidelity_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    grid = [(d, ell) for d in range(1, config.depth + 1) for ell in range(2, config.layers + 1)]

    def run(item):
        depth, layers = item
        fid = global_fidelity(load_bundled_parameters(config.model, depth), depth, layers, config.model)
        return {"D": depth, "L": fid.n_sites, "normalized_infidelity": fid.normalized_infidelity}

    rows = bench.map(run, grid)
    chart = {"series": _series(rows, "L", "D", "normalized_infidelity"), "xlabel": "D",
             "ylabel": "1 - F^(1/L)"}
    return rows, ["D", "L", "normalized_infidelity"], chart


def subsystem_fidelity_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    def run(depth):
        state, exact = _pair(config.model, depth, config.layers)
        return [{"D": depth, **row} for row in subsystem_infidelity_profile(state, exact, _sizes(config))]

    rows = [r for chunk in bench.map(run, range(1, config.depth + 1)) for r in chunk]
    chart = {"series": _series(rows, "D", "N", "mean_normalized_infidelity"), "xlabel": "N",
             "ylabel": "1 - F^(1/N)", "log_x": True}
    return rows, ["D", "N", "mean_normalized_infidelity"], chart


def _correlator_grid(bench: BenchContext, config: RunConfig, models, first_depth: int) -> List[dict]:
    max_distance = min(config.max_distance, 2 ** config.layers // 2)
    grid = [(m, d) for m in models for d in range(first_depth, config.depth + 1)]

    def run(item):
        model, depth = item
        state, exact = _pair(model, depth, config.layers)
        return [{"model": model.value, "D": depth, **row}
                for row in correlator_rows(state, exact, max_distance)]

    return [r for chunk in bench.map(run, grid) for r in chunk]


def family_error_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    rows = []
    for row in _correlator_grid(bench, config, [config.model], 1):
        scale = abs(row["exact"])
        rows.append({
            "D": row["D"],
            "d": row["d"],
            "relative_error_A": (row["family_A"] - row["exact"]) / scale,
            "relative_error_B": (row["family_B"] - row["exact"]) / scale,
        })
    chart = {"series": _series(rows, "D", "d", "relative_error_A"), "xlabel": "d",
             "ylabel": "|relative error| family A", "log_x": True}
    return rows, ["D", "d", "relative_error_A", "relative_error_B"], chart


def averaged_error_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    rows = [
        {"D": row["D"], "d": row["d"],
         "relative_error": abs(row["kw_average"] - row["exact"]) / abs(row["exact"])}
        for row in _correlator_grid(bench, config, [config.model], 1)
    ]
    chart = {"series": _series(rows, "D", "d", "relative_error"), "xlabel": "d",
             "ylabel": "|relative error| of average", "log_x": True}
    return rows, ["D", "d", "relative_error"], chart


def ratio_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    rows = [
        {"model": row["model"], "D": row["D"], "d": row["d"], "ratio": row["ratio"]}
        for row in _correlator_grid(bench, config, [Model.ISING, Model.MODIFIED_ISING], 2)
        if row["d"] > 0
    ]
    chart = {"series": _series(rows, "D", "d", "ratio"), "xlabel": "d",
             "ylabel": "error ratio", "log_x": True}
    return rows, ["model", "D", "d", "ratio"], chart


def qaoa_energy_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    rows = qaoa_rows(config, bench.rng(config), config.site_grid or [config.sites])
    chart = {"series": {"QAOA": [(r["p"], r["energy_density_error"]) for r in rows]},
             "xlabel": "p", "ylabel": "relative energy error", "log_x": True}
    return rows, ["p", "L", "energy_density_error", "normalized_infidelity"], chart


def qaoa_fidelity_figure(bench: BenchContext, config: RunConfig) -> FigureResult:
    rows = qaoa_rows(config, bench.rng(config), config.site_grid or [config.sites])
    chart = {"series": _series(rows, "L", "p", "normalized_infidelity"),
             "xlabel": "p", "ylabel": "1 - F^(1/L)", "log_x": True}
    return rows, ["p", "L", "energy_density_error", "normalized_infidelity"], chart


FIGURES: Dict[str, Callable[[BenchContext, RunConfig], FigureResult]] = {
    "1b": entropy_figure,
    "2a": energy_figure,
    "2b": global_fidelity_figure,
    "3": subsystem_fidelity_figure,
    "4a": family_error_figure,
    "4b": averaged_error_figure,
    "5": ratio_figure,
    "6a": qaoa_energy_figure,
    "6b": qaoa_fidelity_figure,
}

# Grids of the published plots; --config and flags override them
FIGURE_DEFAULTS: Dict[str, dict] = {
    "1b": {"layers": 8},
    "2a": {},
    "2b": {"layers": 8},
    "3": {"layers": 8},
    "4a": {"layers": 9, "max_distance": 128},
    "4b": {"layers": 9, "max_distance": 128},
    "5": {"layers": 9, "max_distance": 128},
    "6a": {"rounds": 8, "min_rounds": 2, "sites": 256},
    "6b": {"rounds": 8, "min_rounds": 2, "site_grid": [32, 64, 128, 256]},
}


@click.command(name="reproduce-figure")
@click.argument("figure", type=click.Choice(list(FIGURES)))
@click.option("--model", type=click.Choice(["ising", "modified_ising"]), default=None)
@click.option("--depth", type=int, default=None, help="Largest depth in the grid")
@click.option("--layers", type=int, default=None, help="L = 2**layers for state-based figures")
@click.option("--sites", type=int, default=None, help="L for the QAOA figures")
@click.option("--rounds", type=int, default=None, help="Largest p for the QAOA figures")
@click.option("--min-rounds", type=int, default=None, help="Smallest p for the QAOA figures")
@click.option("--site-grid", default=None, help="Comma-separated L values for the QAOA figures")
@click.option("--max-distance", type=int, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--svg", is_flag=True, help="Also write an SVG chart")
@pass_bench
def reproduce_figure(bench: BenchContext, figure, model, depth, layers, sites, rounds, min_rounds,
                     site_grid, max_distance, restarts, seed, out, svg):
    """Write the data grid of one figure as CSV"""
    config = bench.config(FIGURE_DEFAULTS[figure], model=model, depth=depth, layers=layers, sites=sites,
                          rounds=rounds, min_rounds=min_rounds, site_grid=parse_int_list(site_grid),
                          max_distance=max_distance, restarts=restarts, seed=seed, out=out,
                          svg=svg or None)
    require(config.depth <= 6, "bundled parameters exist for D <= 6 only")
    logger.info(f"Reproducing figure {figure}")
    rows, columns, chart = FIGURES[figure](bench, config)
    bench.emit(rows, columns, bench.output_path(config, f"figure_{figure}.csv"),
               f"Figure {figure}", chart=chart, svg=config.svg)
