"""Evaluate parameter sets over a grid of depths and chain lengths"""

import logging
from typing import List, Optional, Sequence

import click

from dmera.ansatz import (
    fixed_point_window,
    global_fidelity,
    load_bundled_parameters,
    relative_energy_error,
    window_energy_density,
)
from dmera.core import BenchContext, parse_int_list, parse_theta, pass_bench, require

logger = logging.getLogger(__name__)

COLUMNS = ["model", "D", "L", "energy_density", "energy_rel_error", "normalized_infidelity", "iterations"]


def evaluate_rows(bench: BenchContext, model, thetas: dict, layers: Sequence[int]) -> List[dict]:
    """One row per (D, L); the fixed-point energy is shared by every L of a depth"""

    def fixed(depth):
        window = fixed_point_window(thetas[depth], depth)
        return depth, window.iterations, window_energy_density(window.state, model)

    energies = {depth: (iterations, density) for depth, iterations, density in bench.map(fixed, sorted(thetas))}
    grid = [(d, ell) for d in sorted(thetas) for ell in layers] or [(d, None) for d in sorted(thetas)]

    def run(item):
        depth, ell = item
        iterations, density = energies[depth]
        row = {
            "model": model.value,
            "D": depth,
            "L": "",
            "energy_density": density,
            "energy_rel_error": relative_energy_error(density),
            "normalized_infidelity": "",
            "iterations": iterations,
        }
        if ell is not None:
            fid = global_fidelity(thetas[depth], depth, ell, model)
            row["L"] = fid.n_sites
            row["normalized_infidelity"] = fid.normalized_infidelity
        return row

    return bench.map(run, grid)


@click.command()
@click.option("--model", type=click.Choice(["ising", "modified_ising"]), default=None)
@click.option("--depth", type=int, default=None, help="Circuit depth D")
@click.option("--depths", default=None, help="Comma-separated depths (bundled parameters)")
@click.option("--theta", default=None, help="Parameter file or comma-separated angles")
@click.option("--layers", default=None,
              help="Comma-separated l values; also compare the 2**l-site states with the exact ones")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--svg", is_flag=True, help="Also write an SVG chart")
@pass_bench
def evaluate(bench: BenchContext, model, depth, depths: Optional[str], theta, layers: Optional[str], out, svg):
    """Energy error and global infidelity of DMERA parameter sets (bundled by default)"""
    config = bench.config(model=model, depth=depth, theta=parse_theta(theta), out=out, svg=svg or None)
    depth_grid = parse_int_list(depths) or [config.depth]
    layer_grid = parse_int_list(layers) or []
    require(all(d >= 1 for d in depth_grid), "depths must be >= 1")
    require(all(1 <= ell <= 12 for ell in layer_grid), "layers must lie in 1..12")
    if config.theta is not None:
        require(depth_grid == [config.depth], "--theta fixes a single depth; drop --depths")
        thetas = {config.depth: config.parameters()}
    else:
        thetas = {d: load_bundled_parameters(config.model, d) for d in sorted(set(depth_grid))}
    rows = evaluate_rows(bench, config.model, thetas, layer_grid)
    for row in rows:
        logger.info(f"D={row['D']} L={row['L'] or 'inf'} energy error {row['energy_rel_error']:.3e}")
    series = {}
    for row in rows:
        if row["L"] != "":
            series.setdefault(f"L={row['L']}", []).append((row["D"], row["normalized_infidelity"]))
    bench.emit(rows, COLUMNS, bench.output_path(config, "evaluate.csv"), f"{config.model.value} DMERA evaluation",
               chart={"series": series or {"energy": [(r["D"], r["energy_rel_error"]) for r in rows]},
                      "xlabel": "D", "ylabel": "error"},
               svg=config.svg)
