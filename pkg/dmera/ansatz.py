"""
DMERA scaling circuits on the free-fermion chain.

One scaling step doubles the chain: old site i moves to 2i, a fresh vacuum
site is placed at 2i + 1, and D brickwork rows of two-site matchgates are
applied. Row 0 is the isometry row whose every gate meets one old and one
fresh site. Every layer reuses the same 2D angles (x'_1, y'_1, ..., x'_D, y'_D).

The row offsets, the order in which parameter rows are applied and the sign
of each angle are fixed by ``CircuitConvention``. ``DEFAULT_CONVENTION`` is
the frozen choice; ``scripts/calibrate_layout.py`` scores all sixteen.
"""

import json
import logging
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from dmera import DEFAULT_CONFIG
from dmera.exceptions import (
    ConvergenceError,
    InvalidArgumentError,
    UnknownParametersError,
)
from dmera.gaussian import (
    CovarianceState,
    apply_rotations,
    gate_planes,
    interleave_vacuum,
    log_fidelity,
    normalized_infidelity,
    vacuum_state,
)
from dmera.models import INFINITE_ENERGY_DENSITY, SOLUTIONS, Model, local_energy

logger = logging.getLogger(__name__)

PARAMETERS_FILE = Path(__file__).parent / "data" / "parameters.json"


@dataclass(frozen=True)
class CircuitConvention:
    """Layout choices left open by the circuit diagram"""

    first_offset: int = 0
    reverse_rows: bool = False
    flip_x: bool = False
    flip_y: bool = False

    def __post_init__(self):
        if self.first_offset not in (0, 1):
            raise InvalidArgumentError("first_offset must be 0 or 1")

    def row_offset(self, row: int) -> int:
        return (self.first_offset + row) % 2

    def parameter_row(self, row: int, depth: int) -> int:
        return depth - 1 - row if self.reverse_rows else row

    def signs(self) -> Tuple[float, float]:
        return (-1.0 if self.flip_x else 1.0, -1.0 if self.flip_y else 1.0)

    @property
    def name(self) -> str:
        return (
            f"offset{self.first_offset}"
            f"{'-reversed' if self.reverse_rows else ''}"
            f"{'-flipx' if self.flip_x else ''}"
            f"{'-flipy' if self.flip_y else ''}"
        )


DEFAULT_CONVENTION = CircuitConvention()


def all_conventions() -> List[CircuitConvention]:
    """The sixteen layout variants"""
    return [
        CircuitConvention(offset, reverse, fx, fy)
        for offset, reverse, fx, fy in product((0, 1), (False, True), (False, True), (False, True))
    ]


@dataclass(frozen=True)
class GateRow:
    """One brickwork row: gates on (left, left + 1 mod n)"""

    index: int
    offset: int
    left_sites: Tuple[int, ...]
    is_isometry: bool

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        n = 2 * len(self.left_sites)
        return [(left, (left + 1) % n) for left in self.left_sites]


def _layout(depth: int, n_sites: int, convention: CircuitConvention) -> List[GateRow]:
    rows = []
    for row in range(depth):
        offset = convention.row_offset(row)
        rows.append(GateRow(
            index=row,
            offset=offset,
            left_sites=tuple(range(offset, n_sites, 2)),
            is_isometry=row == 0,
        ))
    return rows


def build_layout(
    depth: int, n_sites_out: int, convention: CircuitConvention = DEFAULT_CONVENTION
) -> List[GateRow]:
    """Brickwork rows of one scaling circuit on ``n_sites_out`` output sites"""
    if depth < 1:
        raise InvalidArgumentError(f"depth must be >= 1, got {depth}")
    if n_sites_out < 4 or n_sites_out % 2:
        raise InvalidArgumentError(f"n_sites_out must be even and >= 4, got {n_sites_out}")
    return _layout(depth, n_sites_out, convention)


def _check_params(params: Sequence[float], depth: int) -> np.ndarray:
    theta = np.asarray(params, dtype=float)
    if depth < 1:
        raise InvalidArgumentError(f"depth must be >= 1, got {depth}")
    if theta.shape != (2 * depth,):
        raise InvalidArgumentError(f"expected {2 * depth} parameters for D={depth}, got {theta.size}")
    if not np.all(np.isfinite(theta)):
        raise InvalidArgumentError("parameters must be finite")
    return theta


@dataclass(frozen=True, eq=False)
class ScalingCircuit:
    """One DMERA scaling transformation"""

    depth: int
    params: np.ndarray
    convention: CircuitConvention = DEFAULT_CONVENTION

    def __post_init__(self):
        theta = _check_params(self.params, self.depth)
        theta.setflags(write=False)
        object.__setattr__(self, "params", theta)

    def row_angles(self, row: int) -> Tuple[float, float]:
        """(x', y') applied on row ``row`` after the convention's sign flips"""
        pr = self.convention.parameter_row(row, self.depth)
        sx, sy = self.convention.signs()
        return sx * self.params[2 * pr], sy * self.params[2 * pr + 1]

    def layout(self, n_sites_out: int) -> List[GateRow]:
        return build_layout(self.depth, n_sites_out, self.convention)

    def apply_rows(self, state: CovarianceState, periodic: bool = True) -> CovarianceState:
        """Apply the D rows to an already interleaved state.

        With ``periodic=False`` gates that would wrap the boundary are
        skipped, as needed inside a finite causal-cone block.
        """
        n = state.n_sites
        for row in _layout(self.depth, n, self.convention):
            left = np.array(row.left_sites)
            if not periodic:
                left = left[left + 1 < n]
            if left.size == 0:
                continue
            xp, yp = self.row_angles(row.index)
            p, q, angles = gate_planes(n, left, xp, yp)
            state = apply_rotations(state, p, q, angles)
        return state

    def scale(self, state: CovarianceState) -> CovarianceState:
        """psi -> U (psi (x) |0...0>) on twice the sites"""
        return self.apply_rows(interleave_vacuum(state))


def prepare_state(
    params: Sequence[float],
    depth: int,
    num_layers: int,
    convention: CircuitConvention = DEFAULT_CONVENTION,
) -> CovarianceState:
    """Pure state on L = 2**num_layers sites from num_layers scaling steps.

    The recursion starts from a single vacuum site, so the first step acts
    on two sites with wraparound.
    """
    if num_layers < 1:
        raise InvalidArgumentError(f"num_layers must be >= 1, got {num_layers}")
    circuit = ScalingCircuit(depth, params, convention)
    state = vacuum_state(1)
    for layer in range(num_layers):
        state = circuit.scale(state)
        logger.debug(f"Scaling layer {layer + 1}/{num_layers}: {state.n_sites} sites")
    return state


def window_width(depth: int) -> int:
    return 4 * depth + 4


def descend(window: CovarianceState, circuit: ScalingCircuit, offset: int) -> CovarianceState:
    """One step of the descending causal-cone channel.

    The W-site window is interleaved with fresh sites, the rows are applied
    to gates lying inside the 2W-site block, and the W sites starting at
    ``offset`` are kept.
    """
    width = window.n_sites
    if not 0 <= offset <= width:
        raise InvalidArgumentError(f"offset {offset} outside [0, {width}]")
    block = circuit.apply_rows(interleave_vacuum(window), periodic=False)
    sites = np.arange(offset, offset + width)
    index = np.stack([2 * sites, 2 * sites + 1], axis=1).ravel()
    return CovarianceState.trusted(block.gamma[np.ix_(index, index)].copy())


def averaged_descending_channel(window: CovarianceState, circuit: ScalingCircuit) -> CovarianceState:
    """Average of the two descending channels keeping central windows of either parity"""
    half = window.n_sites // 2
    even = descend(window, circuit, half)
    odd = descend(window, circuit, half + 1)
    return CovarianceState.trusted(0.5 * (even.gamma + odd.gamma))


def translation_averaged_window(state: CovarianceState, width: int) -> CovarianceState:
    """Mean of the ``width``-site windows at every position of a periodic chain"""
    total = np.zeros((2 * width, 2 * width))
    for start in range(state.n_sites):
        total += state.window(start, width).gamma
    return CovarianceState.trusted(total / state.n_sites)


@dataclass(frozen=True, eq=False)
class FixedPointWindow:
    """Converged window of the infinite-depth state and its residual history"""

    state: CovarianceState
    residuals: List[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    @property
    def width(self) -> int:
        return self.state.n_sites


def fixed_point_window(
    params: Sequence[float],
    depth: int,
    tol: float = DEFAULT_CONFIG["fixed_point_tol"],
    max_iter: int = DEFAULT_CONFIG["fixed_point_max_iter"],
    convention: CircuitConvention = DEFAULT_CONVENTION,
    strict: bool = True,
) -> FixedPointWindow:
    """Iterate the averaged descending channel from the vacuum until it stops moving.

    With ``strict=False`` a window that has not converged after ``max_iter``
    steps is returned with a warning instead of raising.
    """
    if tol <= 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise InvalidArgumentError(f"max_iter must be >= 1, got {max_iter}")
    circuit = ScalingCircuit(depth, params, convention)
    window = vacuum_state(window_width(depth))
    residuals: List[float] = []
    for _ in range(max_iter):
        updated = averaged_descending_channel(window, circuit)
        residual = float(np.max(np.abs(updated.gamma - window.gamma)))
        residuals.append(residual)
        window = updated
        if residual < tol:
            logger.debug(f"Fixed point for D={depth} converged in {len(residuals)} steps")
            return FixedPointWindow(window, residuals)
    if not strict:
        logger.warning(f"Fixed point for D={depth} stopped at residual {residuals[-1]:.3e}")
        return FixedPointWindow(window, residuals)
    raise ConvergenceError(
        f"fixed point for D={depth} not reached after {max_iter} iterations "
        f"(residual {residuals[-1]:.3e})",
        residual=residuals[-1],
    )


def window_energy_density(window: CovarianceState, model=Model.ISING) -> float:
    """Energy per site from the two central sites of a window"""
    half = window.n_sites // 2
    return 0.5 * (local_energy(window, model, half - 1) + local_energy(window, model, half))


def energy_density(
    params: Sequence[float],
    depth: int,
    model=Model.ISING,
    convention: CircuitConvention = DEFAULT_CONVENTION,
    tol: float = DEFAULT_CONFIG["fixed_point_tol"],
    max_iter: int = DEFAULT_CONFIG["fixed_point_max_iter"],
    strict: bool = True,
) -> float:
    """Energy density of the scale-invariant state"""
    fixed = fixed_point_window(
        params, depth, tol=tol, max_iter=max_iter, convention=convention, strict=strict
    )
    return window_energy_density(fixed.state, model)


def relative_energy_error(value: float) -> float:
    """|e - e_inf| / |e_inf| against the infinite-chain density -4/pi"""
    return abs(value - INFINITE_ENERGY_DENSITY) / abs(INFINITE_ENERGY_DENSITY)


@dataclass(frozen=True)
class GlobalFidelity:
    n_sites: int
    log_fidelity: float
    normalized_infidelity: float

    @property
    def fidelity(self) -> float:
        return float(np.exp(self.log_fidelity))


def global_fidelity(
    params: Sequence[float],
    depth: int,
    num_layers: int,
    model=Model.ISING,
    convention: CircuitConvention = DEFAULT_CONVENTION,
) -> GlobalFidelity:
    """Fidelity of the L = 2**num_layers state with the exact ground state"""
    state = prepare_state(params, depth, num_layers, convention)
    exact = SOLUTIONS.get(model, state.n_sites)
    log_f = log_fidelity(state, exact.ground_state)
    return GlobalFidelity(state.n_sites, log_f, normalized_infidelity(log_f, state.n_sites))


def reflect_parameters(
    params: Sequence[float], depth: int, convention: CircuitConvention = DEFAULT_CONVENTION
) -> np.ndarray:
    """Parameters of the mirror-image circuit.

    Non-isometry gates map y -> -y (x' and y' swap). Isometry gates map
    y -> pi/2 - y when the old site is the left leg and y -> -pi/2 - y when
    it is the right leg. The map is an involution.
    """
    theta = _check_params(params, depth).copy()
    sx, sy = convention.signs()
    shift = 0.5 * np.pi if convention.first_offset == 0 else -0.5 * np.pi
    reflected = theta.copy()
    for row in range(depth):
        pr = convention.parameter_row(row, depth)
        xp, yp = sx * theta[2 * pr], sy * theta[2 * pr + 1]
        if row == 0:
            new_xp, new_yp = yp + shift, xp - shift
        else:
            new_xp, new_yp = yp, xp
        reflected[2 * pr] = sx * new_xp
        reflected[2 * pr + 1] = sy * new_yp
    return reflected


@dataclass(frozen=True)
class ParameterBundle:
    """Published angles for D = 1..6"""

    model: Model
    by_depth: Dict[int, Tuple[float, ...]]

    def __getitem__(self, depth: int) -> np.ndarray:
        try:
            return np.array(self.by_depth[depth])
        except KeyError:
            raise UnknownParametersError(f"no bundled parameters for {self.model.value} D={depth}")

    @property
    def depths(self) -> List[int]:
        return sorted(self.by_depth)


def _load_bundles() -> Dict[Model, ParameterBundle]:
    with open(PARAMETERS_FILE) as f:
        records = json.load(f)
    tables: Dict[Model, Dict[int, Tuple[float, ...]]] = {}
    for record in records:
        model, depth, theta = _parse_record(record, PARAMETERS_FILE)
        tables.setdefault(model, {})[depth] = tuple(float(t) for t in theta)
    return {model: ParameterBundle(model=model, by_depth=table) for model, table in tables.items()}


_BUNDLES: Optional[Dict[Model, ParameterBundle]] = None


def get_bundle(model) -> ParameterBundle:
    global _BUNDLES
    if _BUNDLES is None:
        _BUNDLES = _load_bundles()
    try:
        return _BUNDLES[Model(model)]
    except (KeyError, ValueError):
        raise UnknownParametersError(f"no bundled parameters for model {model!r}")


def load_bundled_parameters(model, depth: int) -> np.ndarray:
    """Published angles for ``model`` at depth ``depth``"""
    return get_bundle(model)[depth]


def save_parameters(path: Union[str, Path], model, depth: int, params: Sequence[float]) -> None:
    theta = _check_params(params, depth)
    payload = {"model": Model(model).value, "D": depth, "theta": [float(t) for t in theta]}
    Path(path).write_text(json.dumps(payload, indent=2))


def load_parameters(path: Union[str, Path]) -> Tuple[Model, int, np.ndarray]:
    """Read a {model, D, theta} parameter file"""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"malformed parameter file {path}: {e}")
    return _parse_record(payload, path)


def _parse_record(record, source) -> Tuple[Model, int, np.ndarray]:
    try:
        model = Model(record["model"])
        depth = int(record["D"])
        theta = _check_params(record["theta"], depth)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"malformed parameter record in {source}: {e}")
    return model, depth, theta
