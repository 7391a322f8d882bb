"""Optimise DMERA parameters for D = 1..D_max with depth bootstrapping"""

import logging

import click

from dmera.ansatz import relative_energy_error, save_parameters
from dmera.core import BenchContext, pass_bench
from dmera.io import RunLog
from dmera.optimizer import LbfgsOptions, optimize_depth_series

logger = logging.getLogger(__name__)

COLUMNS = ["D", "energy_density", "relative_error", "restarts_used", "converged", "evaluations"]


@click.command()
@click.option("--model", type=click.Choice(["ising", "modified_ising"]), default=None)
@click.option("--depth", type=int, default=None, help="Largest depth to optimise")
@click.option("--restarts", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--gradient-descent-steps", type=int, default=0, show_default=True,
              help="Plain gradient-descent steps before L-BFGS")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--svg", is_flag=True, help="Also write an SVG chart")
@pass_bench
def optimize(bench: BenchContext, model, depth, restarts, seed, gradient_descent_steps, out, svg):
    """Bootstrapped L-BFGS optimisation of the fixed-point energy density"""
    config = bench.config(model=model, depth=depth, restarts=restarts, seed=seed, out=out,
                          svg=svg or None)
    path = bench.output_path(config, "optimize.csv")
    run_log = RunLog(path.with_suffix(".jsonl"))
    options = LbfgsOptions(
        restarts=config.restarts,
        gradient_descent_steps=gradient_descent_steps,
        max_workers=bench.settings.max_workers,
    )
    rows = []

    def record(depth_done, run):
        density = run.final_value
        rows.append({
            "D": depth_done,
            "energy_density": density,
            "relative_error": relative_energy_error(density),
            "restarts_used": run.restarts_used,
            "converged": run.converged,
            "evaluations": run.evaluations,
        })
        for point in run.trajectory:
            run_log.write(D=depth_done, params=point.params, value=point.value,
                          gradient_norm=point.gradient_norm)
        save_parameters(path.parent / f"theta_{config.model.value}_D{depth_done}.json",
                        config.model, depth_done, run.final_params)

    optimize_depth_series(config.depth, config.model, options, bench.rng(config), callback=record)
    bench.emit(rows, COLUMNS, path, f"Optimised {config.model.value} DMERA",
               chart={"series": {"relative error": [(r["D"], r["relative_error"]) for r in rows]},
                      "xlabel": "D", "ylabel": "relative energy error"},
               svg=config.svg)
