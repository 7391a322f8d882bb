"""Minimal SVG line charts rendered from a jinja2 template"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from jinja2 import Environment

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 420
MARGIN = 60
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]

SVG_TEMPLATE = """<svg xmlns="http://www.w3.org/2000/svg" width="{{ width }}" height="{{ height }}" font-family="sans-serif" font-size="12">
  <rect width="100%" height="100%" fill="white"/>
  <text x="{{ width / 2 }}" y="20" text-anchor="middle" font-size="14">{{ title }}</text>
  <line x1="{{ margin }}" y1="{{ height - margin }}" x2="{{ width - margin }}" y2="{{ height - margin }}" stroke="black"/>
  <line x1="{{ margin }}" y1="{{ margin }}" x2="{{ margin }}" y2="{{ height - margin }}" stroke="black"/>
  {% for tick in x_ticks %}<text x="{{ tick.pos }}" y="{{ height - margin + 16 }}" text-anchor="middle">{{ tick.label }}</text>
  {% endfor %}{% for tick in y_ticks %}<text x="{{ margin - 6 }}" y="{{ tick.pos + 4 }}" text-anchor="end">{{ tick.label }}</text>
  {% endfor %}<text x="{{ width / 2 }}" y="{{ height - 14 }}" text-anchor="middle">{{ xlabel }}</text>
  <text x="16" y="{{ height / 2 }}" text-anchor="middle" transform="rotate(-90 16 {{ height / 2 }})">{{ ylabel }}</text>
  {% for s in series %}<polyline fill="none" stroke="{{ s.color }}" stroke-width="1.5" points="{{ s.points }}"/>
  <text x="{{ width - margin + 4 }}" y="{{ margin + 14 * loop.index }}" fill="{{ s.color }}">{{ s.label }}</text>
  {% endfor %}
</svg>
"""

_env = Environment(autoescape=True)

Series = Dict[str, Sequence[Tuple[float, float]]]


def _axis(values: np.ndarray, log: bool) -> Tuple[np.ndarray, float, float]:
    if log:
        values = np.log10(np.clip(np.abs(values), 1e-300, None))
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    return values, lo, hi


def _ticks(lo: float, hi: float, log: bool, to_pixel) -> List[dict]:
    ticks = []
    for value in np.linspace(lo, hi, 5):
        label = f"1e{value:.1f}" if log else f"{value:.3g}"
        ticks.append({"pos": round(to_pixel(value), 2), "label": label})
    return ticks


def render_line_chart(
    series: Series,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    log_x: bool = False,
    log_y: bool = True,
) -> str:
    """SVG markup for one or more (x, y) series"""
    if not series:
        raise ValueError("no series to plot")
    xs = np.concatenate([np.asarray([p[0] for p in pts], dtype=float) for pts in series.values()])
    ys = np.concatenate([np.asarray([p[1] for p in pts], dtype=float) for pts in series.values()])
    _, x_lo, x_hi = _axis(xs, log_x)
    _, y_lo, y_hi = _axis(ys, log_y)

    def px(v: float) -> float:
        return MARGIN + (v - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(v: float) -> float:
        return HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    rendered = []
    for n, (label, pts) in enumerate(series.items()):
        x, _, _ = _axis(np.asarray([p[0] for p in pts], dtype=float), log_x)
        y, _, _ = _axis(np.asarray([p[1] for p in pts], dtype=float), log_y)
        points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        rendered.append({"label": label, "points": points, "color": PALETTE[n % len(PALETTE)]})

    template = _env.from_string(SVG_TEMPLATE)
    return template.render(
        width=WIDTH,
        height=HEIGHT,
        margin=MARGIN,
        title=title,
        xlabel=xlabel,
        ylabel=ylabel,
        series=rendered,
        x_ticks=_ticks(x_lo, x_hi, log_x, px),
        y_ticks=_ticks(y_lo, y_hi, log_y, py),
    )


def save_line_chart(path: Union[str, Path], series: Series, **kwargs) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_line_chart(series, **kwargs))
    logger.info(f"Wrote chart {path}")
    return path
