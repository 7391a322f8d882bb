"""
Symmetry-averaged analysis of approximate ground states.

Two quadratic correlator families are tracked on the Majorana chain:

    A(i, d) = <i gamma_{2i} gamma_{2(i+d)+1}>
    B(i, d) = <i gamma_{2i+1} gamma_{2(i+d)+2}>

Translations act on the base site i; the Kramers-Wannier half-shift
(Majorana index + 1) exchanges the families. On the exact critical state all
2L members of an orbit agree, so their spread measures symmetry breaking.
"""

import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from dmera.exceptions import InvalidArgumentError, PhysicalityError
from dmera.gaussian import CovarianceState, entropy, log_fidelity, normalized_infidelity
from dmera.models import FAMILY_OFFSETS, Model, to_ising_frame
from dmera.settings import get_settings

logger = logging.getLogger(__name__)

FAMILIES = ("A", "B")


def family_values(state: CovarianceState, family: str, max_distance: int) -> np.ndarray:
    """Array [site, distance] of one correlator family"""
    n = state.n_sites
    off_j, off_k = FAMILY_OFFSETS[family]
    sites = np.arange(n)[:, None]
    distances = np.arange(max_distance + 1)[None, :]
    j = np.broadcast_to(2 * sites + off_j, (n, max_distance + 1))
    raw_k = 2 * (sites + distances) + off_k
    wraps, k = np.divmod(raw_k, 2 * n)
    sign = np.where(wraps % 2 == 0, 1.0, -1.0)
    return sign * state.gamma[j, k]


@dataclass(frozen=True, eq=False)
class CorrelatorTable:
    """Both families at every base site and distance, with exact references"""

    n_sites: int
    max_distance: int
    values: np.ndarray
    exact: np.ndarray

    def __post_init__(self):
        if np.max(np.abs(self.values)) > 1.0 + 1e-9:
            raise PhysicalityError("correlator magnitude exceeds 1")

    def family_index(self, family: str) -> int:
        try:
            return FAMILIES.index(family)
        except ValueError:
            raise InvalidArgumentError(f"unknown correlator family {family!r}")

    def check_distance(self, d: int) -> None:
        if not 0 <= d <= self.max_distance:
            raise InvalidArgumentError(f"distance {d} outside [0, {self.max_distance}]")

    def rows(self) -> List[dict]:
        out = []
        for f, family in enumerate(FAMILIES):
            for i in range(self.n_sites):
                for d in range(self.max_distance + 1):
                    out.append({
                        "i": i,
                        "j": (i + d) % self.n_sites,
                        "family": family,
                        "value": float(self.values[f, i, d]),
                        "exact": float(self.exact[f, i, d]),
                    })
        return out


def correlator_table(
    state: CovarianceState, exact: CovarianceState, max_distance: int
) -> CorrelatorTable:
    """Read both families from Gamma and attach the exact values"""
    if state.n_sites != exact.n_sites:
        raise InvalidArgumentError(
            f"state has {state.n_sites} sites, reference has {exact.n_sites}"
        )
    if not 0 <= max_distance <= state.n_sites // 2:
        raise InvalidArgumentError(f"max_distance must be in [0, {state.n_sites // 2}]")
    values = np.stack([family_values(state, f, max_distance) for f in FAMILIES])
    reference = np.stack([family_values(exact, f, max_distance) for f in FAMILIES])
    return CorrelatorTable(state.n_sites, max_distance, values, reference)


class SymmetryGroup(ABC):
    """Group acting on (family, base site) labels of a correlator table"""

    @abstractmethod
    def elements(self, n_sites: int) -> List[Callable[[int, int], Tuple[int, int]]]:
        """Maps (family index, site) -> (family index, site)"""

    def orbit(self, n_sites: int, family: int = 0, site: int = 0) -> List[Tuple[int, int]]:
        return [g(family, site) for g in self.elements(n_sites)]


class TranslationGroup(SymmetryGroup):
    """Cyclic translations by 0..L-1 sites"""

    def elements(self, n_sites):
        return [lambda f, i, t=t: (f, (i + t) % n_sites) for t in range(n_sites)]


class KramersWannierGroup(SymmetryGroup):
    """Identity and the half-site Majorana shift exchanging families A and B"""

    def elements(self, n_sites):
        return [lambda f, i: (f, i), lambda f, i: (1 - f, i)]


class ProductGroup(SymmetryGroup):
    def __init__(self, *groups: SymmetryGroup):
        self.groups = groups

    def elements(self, n_sites):
        composed = [lambda f, i: (f, i)]
        for group in self.groups:
            composed = [
                (lambda f, i, g=g, h=h: g(*h(f, i)))
                for h in composed
                for g in group.elements(n_sites)
            ]
        return composed


FULL_GROUP = ProductGroup(TranslationGroup(), KramersWannierGroup())


def orbit_values(table: CorrelatorTable, d: int, group: SymmetryGroup = FULL_GROUP,
                 family: str = "A") -> Tuple[np.ndarray, np.ndarray]:
    """(values, exact) over the orbit of (family, site 0) at distance d"""
    table.check_distance(d)
    labels = group.orbit(table.n_sites, table.family_index(family), 0)
    f = np.array([label[0] for label in labels])
    i = np.array([label[1] for label in labels])
    return table.values[f, i, d], table.exact[f, i, d]


def translation_average(table: CorrelatorTable, family: str, d: int) -> float:
    """Mean of one family over all base sites at distance d"""
    table.check_distance(d)
    return float(np.mean(table.values[table.family_index(family), :, d]))


def orbit_variance(table: CorrelatorTable, family: str, d: int) -> float:
    table.check_distance(d)
    return float(np.var(table.values[table.family_index(family), :, d]))


def kw_average(table: CorrelatorTable, d: int) -> float:
    """Mean of the two translation-averaged families"""
    return 0.5 * (translation_average(table, "A", d) + translation_average(table, "B", d))


def shot_variance(mean_value: float) -> float:
    """Single-shot variance 1 - <O>^2 of a +/-1 valued measurement"""
    return 1.0 - mean_value ** 2


@dataclass(frozen=True)
class ErrorSummary:
    distance: int
    mean_abs_error: float
    abs_error_of_mean: float
    ratio: float
    exact_match: bool = False
    mean_relative_error: float = 0.0
    relative_error_of_mean: float = 0.0


def error_summary(table: CorrelatorTable, d: int, group: SymmetryGroup = FULL_GROUP) -> ErrorSummary:
    """Average error over the orbit against the error of the orbit average"""
    values, exact = orbit_values(table, d, group)
    errors = values - exact
    mean_abs = float(np.mean(np.abs(errors)))
    of_mean = float(abs(np.mean(values) - np.mean(exact)))
    scale = float(np.mean(np.abs(exact)))
    if mean_abs == 0.0:
        return ErrorSummary(d, 0.0, of_mean, 0.0, exact_match=True)
    return ErrorSummary(
        distance=d,
        mean_abs_error=mean_abs,
        abs_error_of_mean=of_mean,
        ratio=of_mean / mean_abs,
        mean_relative_error=mean_abs / scale if scale else np.inf,
        relative_error_of_mean=of_mean / scale if scale else np.inf,
    )


def family_errors(table: CorrelatorTable, d: int) -> Tuple[float, float]:
    """Signed errors of the translation-averaged families A and B"""
    table.check_distance(d)
    return tuple(
        float(np.mean(table.values[f, :, d] - table.exact[f, :, d])) for f in range(len(FAMILIES))
    )


def out_of_phase_fraction(table: CorrelatorTable, distances: Iterable[int]) -> float:
    """Fraction of distances where the family errors have opposite sign"""
    distances = list(distances)
    if not distances:
        raise InvalidArgumentError("need at least one distance")
    opposite = sum(1 for d in distances if np.prod(family_errors(table, d)) < 0)
    return opposite / len(distances)


def chord_distance(separation, n_sites: int) -> np.ndarray:
    """(L / pi) sin(pi r / L), the ring separation seen by a power law"""
    separation = np.asarray(separation, dtype=float)
    return n_sites / np.pi * np.sin(np.pi * separation / n_sites)


def decay_exponent(
    distances: Sequence[float],
    values: Sequence[float],
    n_sites: Optional[int] = None,
) -> float:
    """Slope of log|value| against log distance.

    With ``n_sites`` the distances are mapped to chord distances on the ring.
    """
    distances = np.asarray(distances, dtype=float)
    if n_sites is not None:
        distances = chord_distance(distances, n_sites)
    x = np.log(distances)
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def correlator_decay_exponent(table: CorrelatorTable, distances: Iterable[int]) -> float:
    """Power of the Kramers-Wannier averaged correlator.

    Both families pair Majoranas d + 1/2 sites apart.
    """
    distances = list(distances)
    values = [kw_average(table, d) for d in distances]
    return decay_exponent(np.asarray(distances) + 0.5, values, table.n_sites)


def analysis_frame(state: CovarianceState, model) -> CovarianceState:
    """Modified-Ising states are compared in the Ising frame"""
    return to_ising_frame(state) if Model(model) == Model.MODIFIED_ISING else state


def _window_mean(state: CovarianceState, size: int, fn: Callable[[int], float]) -> float:
    if not 1 <= size < state.n_sites:
        raise InvalidArgumentError(f"subsystem size must be in [1, {state.n_sites - 1}], got {size}")
    workers = get_settings().max_workers
    starts = range(state.n_sites)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(fn, starts))
    else:
        values = [fn(s) for s in starts]
    return float(np.mean(values))


def mean_window_entropy(state: CovarianceState, size: int) -> float:
    return _window_mean(state, size, lambda s: entropy(state.window(s, size)))


def entropy_profile(
    state: CovarianceState, exact: CovarianceState, sizes: Sequence[int]
) -> List[dict]:
    """Window-averaged entanglement entropy against the exact reference"""
    if state.n_sites != exact.n_sites:
        raise InvalidArgumentError("state and reference differ in size")
    rows = []
    for size in sizes:
        mean = mean_window_entropy(state, size)
        reference = mean_window_entropy(exact, size)
        if reference == 0.0:
            relative = 0.0 if mean == 0.0 else np.inf
        else:
            relative = (mean - reference) / reference
        rows.append({"N": size, "mean_entropy": mean, "exact_mean": reference, "relative_error": relative})
        logger.debug(f"Entropy N={size}: {mean:.12f} vs {reference:.12f}")
    return rows


def subsystem_infidelity_profile(
    state: CovarianceState, exact: CovarianceState, sizes: Sequence[int]
) -> List[dict]:
    """Window-averaged normalised infidelity 1 - F^(1/N)"""
    if state.n_sites != exact.n_sites:
        raise InvalidArgumentError("state and reference differ in size")
    rows = []
    for size in sizes:
        def infidelity(start: int, size=size) -> float:
            log_f = log_fidelity(state.window(start, size), exact.window(start, size))
            return normalized_infidelity(log_f, size)

        rows.append({"N": size, "mean_normalized_infidelity": _window_mean(state, size, infidelity)})
    return rows
