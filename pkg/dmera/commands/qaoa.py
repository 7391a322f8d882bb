"""QAOA baseline: exact preparation at L = 2p, then optimisation at larger L"""

import logging
from typing import List, Sequence

import click
import numpy as np

from dmera.core import BenchContext, RunConfig, parse_int_list, pass_bench, require
from dmera.qaoa import exact_prep_bootstrap, optimize_qaoa, qaoa_metrics

logger = logging.getLogger(__name__)

COLUMNS = ["p", "L", "energy_density_error", "normalized_infidelity"]


def qaoa_rows(config: RunConfig, rng: np.random.Generator, site_grid: Sequence[int]) -> List[dict]:
    """Metrics for p = min_rounds..rounds on every L >= 2p of ``site_grid``.

    Each p starts from its exact L = 2p angles; each larger L starts from
    the optimum at the previous L.
    """
    require(all(n % 2 == 0 for n in site_grid), "QAOA chain lengths must be even")
    require(max(site_grid) >= 2 * config.rounds, "QAOA needs sites >= 2 * rounds")
    starts = max(config.restarts, 1)
    seeds = exact_prep_bootstrap(config.rounds, restarts=starts, rng=rng)
    rows = []
    for p in range(config.min_rounds, config.rounds + 1):
        initial = seeds[p]
        for n_sites in sorted(site_grid):
            if n_sites < 2 * p:
                continue
            initial, _ = optimize_qaoa(p, n_sites, restarts=starts, rng=rng, initial=initial)
            rows.append(qaoa_metrics(initial, n_sites))
    return rows


@click.command()
@click.option("--rounds", type=int, default=None, help="Largest number of QAOA rounds p")
@click.option("--min-rounds", type=int, default=None, help="Smallest p written to the CSV")
@click.option("--sites", type=int, default=None, help="Chain length L (>= 2p)")
@click.option("--site-grid", default=None, help="Comma-separated chain lengths instead of --sites")
@click.option("--restarts", type=int, default=None, help="Random starts per optimisation")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--svg", is_flag=True, help="Also write an SVG chart")
@pass_bench
def qaoa(bench: BenchContext, rounds, min_rounds, sites, site_grid, restarts, seed, out, svg):
    """Optimise p = min-rounds..rounds QAOA circuits"""
    config = bench.config(rounds=rounds, min_rounds=min_rounds, sites=sites,
                          site_grid=parse_int_list(site_grid), restarts=restarts, seed=seed,
                          out=out, svg=svg or None)
    rows = qaoa_rows(config, bench.rng(config), config.site_grid or [config.sites])
    bench.emit(rows, COLUMNS, bench.output_path(config, "qaoa.csv"), "QAOA baseline",
               chart={"series": {
                   "energy density error": [(r["p"], r["energy_density_error"]) for r in rows],
                   "1 - F^(1/L)": [(r["p"], r["normalized_infidelity"]) for r in rows],
               }, "xlabel": "p", "ylabel": "error", "log_x": True},
               svg=config.svg)
