"""Exact reference tables of the Ising and modified Ising chains"""

import logging
from typing import List, Optional

import click

from dmera.core import BenchContext, pass_bench, require
from dmera.exceptions import InvalidArgumentError, ReferenceMismatchError
from dmera.io import read_csv
from dmera.models import SOLUTIONS, exact_correlator_table

logger = logging.getLogger(__name__)

COLUMNS = ["L", "distance", "family", "value"]


def max_deviation(rows: List[dict], stored: List[dict]) -> float:
    """Largest |value| difference between fresh rows and rows read back from a CSV"""
    try:
        previous = {
            (int(r["L"]), int(r["distance"]), r["family"]): float(r["value"]) for r in stored
        }
    except (KeyError, ValueError) as e:
        raise InvalidArgumentError(f"reference CSV needs columns {COLUMNS}: {e}")
    missing = [key for key in ((r["L"], r["distance"], r["family"]) for r in rows) if key not in previous]
    if missing:
        raise InvalidArgumentError(f"reference CSV has no row for (L, distance, family) = {missing[0]}")
    return max(abs(r["value"] - previous[(r["L"], r["distance"], r["family"])]) for r in rows)


@click.command()
@click.option("--model", type=click.Choice(["ising", "modified_ising"]), default=None)
@click.option("--sites", type=int, default=None)
@click.option("--max-distance", type=int, default=None)
@click.option("--compare", "compare_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Check the table against an earlier reference CSV")
@click.option("--atol", type=float, default=1e-12, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@pass_bench
def reference(bench: BenchContext, model, sites, max_distance, compare_path: Optional[str], atol, out):
    """Exact ground energy and correlator families"""
    config = bench.config(model=model, sites=sites, max_distance=max_distance, out=out)
    require(config.max_distance < config.sites, "max-distance must be below the number of sites")
    solution = SOLUTIONS.get(config.model, config.sites)
    bench.console.print(
        f"[bold]{config.model.value}[/bold] L={config.sites}: "
        f"E0={solution.ground_energy:.15f}, E0/L={solution.energy_density:.15f}"
    )
    rows = exact_correlator_table(config.model, config.sites, config.max_distance)
    if compare_path is not None:
        deviation = max_deviation(rows, read_csv(compare_path))
        logger.info(f"Largest deviation from {compare_path}: {deviation:.3e}")
        if deviation > atol:
            raise ReferenceMismatchError(
                f"reference table differs from {compare_path} by {deviation:.3e} (atol {atol:.1e})"
            )
        bench.console.print(f"Matches {compare_path} within {atol:.1e}")
    bench.emit(rows, COLUMNS, bench.output_path(config, "reference.csv"), "Exact correlators")
