"""
Command-line front end.

``cli`` is a click group; each subcommand lives in ``dmera.commands`` and
receives a ``BenchContext`` holding settings, the seeded random generator,
the rich console and the output location.
"""

import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence

import click
import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from rich.console import Console
from rich.table import Table

from dmera import __version__
from dmera.ansatz import load_bundled_parameters, load_parameters
from dmera.exceptions import DmeraError, InvalidArgumentError
from dmera.io import format_value, write_csv
from dmera.models import Model
from dmera.plotting import save_line_chart
from dmera.settings import Settings, configure_logging, get_settings

logger = logging.getLogger(__name__)


class RunConfig(BaseModel):
    """Validated parameters of one CLI run"""

    model: Model = Model.ISING
    depth: int = Field(default=6, ge=1, le=12)
    sites: int = Field(default=256, ge=2)
    rounds: int = Field(default=4, ge=1)
    min_rounds: int = Field(default=1, ge=1)
    layers: int = Field(default=8, ge=1, le=12)
    max_distance: int = Field(default=64, ge=0)
    restarts: int = Field(default=8, ge=0)
    sizes: List[int] = Field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64, 128])
    site_grid: Optional[List[int]] = None
    seed: int = 0
    theta: Optional[List[float]] = None
    out: Optional[Path] = None
    svg: bool = False

    @field_validator("sites")
    @classmethod
    def _even_sites(cls, value: int) -> int:
        if value % 2:
            raise ValueError("sites must be even")
        return value

    @field_validator("model", mode="before")
    @classmethod
    def _model_name(cls, value):
        return value.replace("-", "_") if isinstance(value, str) else value

    @model_validator(mode="after")
    def _cross_checks(self) -> "RunConfig":
        if self.theta is not None and len(self.theta) != 2 * self.depth:
            raise ValueError(f"theta must hold {2 * self.depth} angles for depth {self.depth}")
        if self.min_rounds > self.rounds:
            raise ValueError(f"min_rounds {self.min_rounds} exceeds rounds {self.rounds}")
        return self

    @classmethod
    def build(cls, config_file: Optional[Path], defaults: Optional[dict] = None, **overrides) -> "RunConfig":
        """Command defaults, then the JSON file, then any flag that was given"""
        values = dict(defaults or {})
        if config_file is not None:
            try:
                values.update(json.loads(Path(config_file).read_text()))
            except (OSError, json.JSONDecodeError) as e:
                raise click.UsageError(f"cannot read config file {config_file}: {e}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise click.UsageError(str(e))

    def parameters(self) -> np.ndarray:
        if self.theta is not None:
            return np.array(self.theta)
        return load_bundled_parameters(self.model, self.depth)


def parse_theta(value: Optional[str]) -> Optional[List[float]]:
    """A parameter file path or a comma-separated list of angles"""
    if value is None:
        return None
    path = Path(value)
    if path.exists():
        _, _, theta = load_parameters(path)
        return [float(t) for t in theta]
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"{value!r} is neither a parameter file nor a list of angles")


def parse_int_list(value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a comma-separated list of integers")


class BenchContext:
    """Shared state handed to every subcommand"""

    def __init__(self, settings: Settings, debug: bool = False, config_file: Optional[Path] = None):
        self.settings = settings
        self.debug = debug
        self.config_file = config_file
        self.console = Console(stderr=False)
        self._output_lock = threading.Lock()

    def config(self, defaults: Optional[dict] = None, **overrides) -> RunConfig:
        defaults = {"seed": self.settings.seed, **(defaults or {})}
        return RunConfig.build(self.config_file, defaults, **overrides)

    def rng(self, config: RunConfig) -> np.random.Generator:
        return np.random.default_rng(config.seed)

    def output_path(self, config: RunConfig, default_name: str) -> Path:
        return config.out if config.out is not None else self.settings.output_dir / default_name

    def map(self, fn: Callable, items: Iterable) -> list:
        """Run a grid on the thread pool, preserving order"""
        items = list(items)
        if self.settings.max_workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.settings.max_workers) as pool:
            return list(pool.map(fn, items))

    def emit(
        self,
        rows: Sequence[dict],
        columns: Sequence[str],
        path: Path,
        title: str,
        chart: Optional[dict] = None,
        svg: bool = False,
    ) -> Path:
        """Write the CSV (and optional SVG) and print a summary table"""
        with self._output_lock:
            written = write_csv(path, rows, columns)
            if svg and chart:
                save_line_chart(path.with_suffix(".svg"), title=title, **chart)
        self.print_table(rows, columns, title)
        return written

    def print_table(self, rows: Sequence[dict], columns: Sequence[str], title: str, limit: int = 40) -> None:
        table = Table(title=title)
        for column in columns:
            table.add_column(column, justify="right")
        for row in rows[:limit]:
            table.add_row(*[_short(row[c]) for c in columns])
        if len(rows) > limit:
            table.caption = f"{len(rows) - limit} more rows in the CSV"
        self.console.print(table)


def _short(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return format_value(value)


pass_bench = click.make_pass_decorator(BenchContext)


class BenchGroup(click.Group):
    """Maps domain errors to exit code 1"""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except DmeraError as e:
            bench = ctx.find_object(BenchContext)
            if bench is not None and bench.debug:
                raise
            logger.error(str(e))
            click.echo(f"Error: {e}", err=True)
            ctx.exit(1)


@click.group(cls=BenchGroup)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON file with default option values")
@click.option("--debug", is_flag=True, help="Verbose logging and full tracebacks")
@click.version_option(__version__, prog_name="dmera")
@click.pass_context
def cli(ctx: click.Context, config_file: Optional[Path], debug: bool):
    """DMERA free-fermion benchmark"""
    settings = get_settings()
    configure_logging(settings, debug=debug)
    ctx.obj = BenchContext(settings, debug=debug, config_file=config_file)


def _register_commands(group: click.Group) -> None:
    from dmera.commands.analysis import correlate, entropy, subfid
    from dmera.commands.evaluate import evaluate
    from dmera.commands.figures import reproduce_figure
    from dmera.commands.optimize import optimize
    from dmera.commands.qaoa import qaoa
    from dmera.commands.reference import reference

    for command in (evaluate, optimize, correlate, entropy, subfid, qaoa, reference, reproduce_figure):
        group.add_command(command)


def require(condition: bool, message: str) -> None:
    """Raise InvalidArgumentError unless ``condition`` holds"""
    if not condition:
        raise InvalidArgumentError(message)


_register_commands(cli)
