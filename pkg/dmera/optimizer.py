"""
Variational optimisation: finite-difference gradients, L-BFGS with restarts
and the depth-bootstrapping protocol.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from dmera import DEFAULT_CONFIG
from dmera.exceptions import InvalidArgumentError, OptimizationError

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4


@dataclass(frozen=True)
class Objective:
    """Deterministic real function of ``arity`` parameters"""

    arity: int
    evaluate: Callable[[np.ndarray], float]
    description: str = "objective"

    def __call__(self, params: Sequence[float]) -> float:
        theta = np.asarray(params, dtype=float)
        if theta.shape != (self.arity,):
            raise InvalidArgumentError(f"{self.description} takes {self.arity} parameters, got {theta.size}")
        value = float(self.evaluate(theta))
        if not np.isfinite(value):
            raise OptimizationError(f"{self.description} returned non-finite value {value}")
        return value


@dataclass(frozen=True)
class TrajectoryPoint:
    params: np.ndarray
    value: float
    gradient_norm: float


@dataclass
class OptimizationRun:
    """Record of one minimisation including all restarts"""

    description: str
    initial_params: np.ndarray
    trajectory: List[TrajectoryPoint] = field(default_factory=list)
    final_params: Optional[np.ndarray] = None
    final_value: float = np.inf
    converged: bool = False
    restarts_used: int = 0
    evaluations: int = 0

    def record(self, params: np.ndarray, value: float, gradient_norm: float) -> bool:
        """Keep the point if it improves on the best so far"""
        if value < self.final_value:
            self.trajectory.append(TrajectoryPoint(params.copy(), value, gradient_norm))
            self.final_params = params.copy()
            self.final_value = value
            return True
        return False


class LbfgsOptions(BaseModel):
    """Settings for ``lbfgs_minimize``"""

    memory: int = Field(default=DEFAULT_CONFIG["lbfgs_memory"], ge=1)
    max_iter: int = Field(default=DEFAULT_CONFIG["lbfgs_max_iter"], ge=1)
    grad_tol: float = Field(default=DEFAULT_CONFIG["lbfgs_grad_tol"], gt=0)
    restarts: int = Field(default=DEFAULT_CONFIG["restarts"], ge=0)
    perturbation_scale: float = Field(default=DEFAULT_CONFIG["perturbation_scale"], ge=0)
    step: float = Field(default=DEFAULT_CONFIG["finite_difference_step"], gt=0)
    max_line_search: int = Field(default=50, ge=1)
    gradient_descent_steps: int = Field(default=0, ge=0)
    gradient_descent_rate: float = Field(default=0.1, gt=0)
    max_workers: int = Field(default=1, ge=1)


def finite_diff_gradient(
    obj: Objective,
    params: Sequence[float],
    h: float = DEFAULT_CONFIG["finite_difference_step"],
    executor: Optional[ThreadPoolExecutor] = None,
) -> np.ndarray:
    """Central differences (f(x + h e_i) - f(x - h e_i)) / 2h"""
    if h <= 0:
        raise InvalidArgumentError(f"finite-difference step must be positive, got {h}")
    theta = np.asarray(params, dtype=float)
    shifts = np.eye(theta.size) * h
    points = [theta + s for s in shifts] + [theta - s for s in shifts]
    values = np.array(list(executor.map(obj, points)) if executor else [obj(p) for p in points])
    n = theta.size
    return (values[:n] - values[n:]) / (2.0 * h)


def five_point_gradient(obj: Objective, params: Sequence[float], h: float) -> np.ndarray:
    """Fourth-order stencil used to check the central-difference gradient"""
    theta = np.asarray(params, dtype=float)
    grad = np.zeros(theta.size)
    for i in range(theta.size):
        e = np.zeros(theta.size)
        e[i] = h
        grad[i] = (-obj(theta + 2 * e) + 8 * obj(theta + e) - 8 * obj(theta - e) + obj(theta - 2 * e)) / (12 * h)
    return grad


def _two_loop(grad: np.ndarray, s_hist: List[np.ndarray], y_hist: List[np.ndarray]) -> np.ndarray:
    q = grad.copy()
    alphas = []
    for s, y in zip(reversed(s_hist), reversed(y_hist)):
        rho = 1.0 / np.dot(y, s)
        alpha = rho * np.dot(s, q)
        q -= alpha * y
        alphas.append((rho, alpha))
    if s_hist:
        q *= np.dot(s_hist[-1], y_hist[-1]) / np.dot(y_hist[-1], y_hist[-1])
    for (s, y), (rho, alpha) in zip(zip(s_hist, y_hist), reversed(alphas)):
        beta = rho * np.dot(y, q)
        q += s * (alpha - beta)
    return -q


def _armijo(obj, x, f, g, direction, max_steps):
    slope = float(np.dot(g, direction))
    t = 1.0
    for _ in range(max_steps):
        candidate = x + t * direction
        value = obj(candidate)
        if value <= f + ARMIJO_C * t * slope:
            return candidate, value
        t *= 0.5
    return None, None


class _Minimiser:
    def __init__(self, obj: Objective, options: LbfgsOptions, run: OptimizationRun, executor):
        self.obj = obj
        self.options = options
        self.run = run
        self.executor = executor

    def gradient(self, x):
        self.run.evaluations += 2 * x.size
        return finite_diff_gradient(self.obj, x, self.options.step, self.executor)

    def descend(self, x):
        """Plain gradient descent warm-up"""
        f = self.obj(x)
        for _ in range(self.options.gradient_descent_steps):
            g = self.gradient(x)
            if np.linalg.norm(g) < self.options.grad_tol:
                break
            candidate, value = _armijo(
                self.obj, x, f, g, -self.options.gradient_descent_rate * g, self.options.max_line_search
            )
            if candidate is None:
                break
            x, f = candidate, value
            self.run.record(x, f, float(np.linalg.norm(g)))
        return x

    def lbfgs(self, x) -> bool:
        """One L-BFGS run from x; True when the gradient tolerance is met"""
        opts = self.options
        f = self.obj(x)
        g = self.gradient(x)
        self.run.record(x, f, float(np.linalg.norm(g)))
        s_hist: List[np.ndarray] = []
        y_hist: List[np.ndarray] = []
        for iteration in range(opts.max_iter):
            gnorm = float(np.linalg.norm(g))
            if gnorm < opts.grad_tol:
                return True
            direction = _two_loop(g, s_hist, y_hist)
            if np.dot(direction, g) >= 0:
                s_hist.clear()
                y_hist.clear()
                direction = -g
            x_new, f_new = _armijo(self.obj, x, f, g, direction, opts.max_line_search)
            if x_new is None or f - f_new <= 1e-16 * max(1.0, abs(f)):
                logger.debug(f"L-BFGS stalled after {iteration} iterations at {f:.15e}")
                return False
            g_new = self.gradient(x_new)
            s, y = x_new - x, g_new - g
            if np.dot(s, y) > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
                s_hist.append(s)
                y_hist.append(y)
                if len(s_hist) > opts.memory:
                    s_hist.pop(0)
                    y_hist.pop(0)
            x, f, g = x_new, f_new, g_new
            self.run.record(x, f, float(np.linalg.norm(g)))
        return False


def lbfgs_minimize(
    obj: Objective,
    initial_params: Sequence[float],
    options: Optional[LbfgsOptions] = None,
    rng: Optional[np.random.Generator] = None,
) -> OptimizationRun:
    """L-BFGS with Armijo backtracking, restarted from the perturbed best point on stalls"""
    options = options or LbfgsOptions()
    rng = rng if rng is not None else np.random.default_rng(0)
    x0 = np.asarray(initial_params, dtype=float)
    if x0.shape != (obj.arity,):
        raise InvalidArgumentError(f"{obj.description} takes {obj.arity} parameters, got {x0.size}")
    run = OptimizationRun(description=obj.description, initial_params=x0.copy())

    executor = ThreadPoolExecutor(max_workers=options.max_workers) if options.max_workers > 1 else None
    try:
        minimiser = _Minimiser(obj, options, run, executor)
        x = minimiser.descend(x0.copy()) if options.gradient_descent_steps else x0.copy()
        run.converged = minimiser.lbfgs(x)
        while not run.converged and run.restarts_used < options.restarts:
            run.restarts_used += 1
            start = run.final_params + rng.normal(0.0, options.perturbation_scale, size=x0.size)
            logger.info(
                f"{obj.description}: restart {run.restarts_used}/{options.restarts} "
                f"from best value {run.final_value:.15e}"
            )
            run.converged = minimiser.lbfgs(start)
    finally:
        if executor:
            executor.shutdown()

    logger.info(
        f"{obj.description}: final value {run.final_value:.15e} "
        f"(converged={run.converged}, restarts={run.restarts_used})"
    )
    return run


def bootstrap_depth(
    params: Sequence[float],
    mode: str = "append_one",
    insert_position: Optional[int] = None,
    sigma: float = DEFAULT_CONFIG["insertion_sigma"],
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Extend depth-D angles with near-identity rows.

    ``append_one`` adds a row after the last one (D + 1). ``insert_two`` adds
    two rows after the first ``insert_position`` rows (D + 2), which keeps the
    offset parity of every existing row.
    """
    theta = np.asarray(params, dtype=float)
    if theta.size == 0 or theta.size % 2:
        raise InvalidArgumentError("parameter vector must hold 2D angles")
    depth = theta.size // 2
    rng = rng if rng is not None else np.random.default_rng(0)
    if mode == "append_one":
        if insert_position not in (None, depth):
            raise InvalidArgumentError("append_one only inserts after the last row")
        return np.concatenate([theta, rng.normal(0.0, sigma, size=2)])
    if mode == "insert_two":
        if insert_position is None or not 0 <= insert_position <= depth:
            raise InvalidArgumentError(f"insert_position must be in [0, {depth}], got {insert_position}")
        cut = 2 * insert_position
        return np.concatenate([theta[:cut], rng.normal(0.0, sigma, size=4), theta[cut:]])
    raise InvalidArgumentError(f"unknown bootstrap mode {mode!r}")


def random_initial_params(arity: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform angles in (-pi, pi]"""
    return np.pi - 2 * np.pi * rng.random(arity)


def dmera_objective(
    depth: int,
    model="ising",
    convention=None,
    max_iter: Optional[int] = None,
    strict: bool = True,
) -> Objective:
    """Fixed-point energy density of the depth-D scale-invariant state.

    A window that fails to converge raises ConvergenceError unless
    ``strict`` is False.
    """
    from dmera.ansatz import DEFAULT_CONVENTION, energy_density

    convention = convention or DEFAULT_CONVENTION
    max_iter = max_iter or DEFAULT_CONFIG["fixed_point_max_iter"]

    def evaluate(theta: np.ndarray) -> float:
        return energy_density(theta, depth, model, convention=convention, max_iter=max_iter, strict=strict)

    return Objective(arity=2 * depth, evaluate=evaluate, description=f"dmera-{model}-D{depth}")


def qaoa_objective(rounds: int, n_sites: int) -> Objective:
    """Energy density of the p-round QAOA state on L sites"""
    from dmera.qaoa import QaoaParams, qaoa_energy_density

    def evaluate(theta: np.ndarray) -> float:
        return qaoa_energy_density(QaoaParams(rounds, theta), n_sites)

    return Objective(arity=2 * rounds, evaluate=evaluate, description=f"qaoa-p{rounds}-L{n_sites}")


@dataclass
class DepthSeries:
    """Optimised angles and runs for D = 1..D_max"""

    model: str
    params: dict = field(default_factory=dict)
    runs: dict = field(default_factory=dict)


def optimize_depth_series(
    max_depth: int,
    model="ising",
    options: Optional[LbfgsOptions] = None,
    rng: Optional[np.random.Generator] = None,
    insert_positions: Optional[Sequence[int]] = None,
    callback: Optional[Callable[[int, OptimizationRun], None]] = None,
) -> DepthSeries:
    """Bootstrap D + 1 from D (append_one) and D + 2 from D (insert_two), keeping the best"""
    if max_depth < 1:
        raise InvalidArgumentError("max_depth must be >= 1")
    options = options or LbfgsOptions()
    rng = rng if rng is not None else np.random.default_rng(0)
    series = DepthSeries(model=getattr(model, "value", str(model)))
    for depth in range(1, max_depth + 1):
        objective = dmera_objective(depth, model)
        if depth == 1:
            starts = [random_initial_params(2, rng)]
        else:
            starts = [bootstrap_depth(series.params[depth - 1], "append_one", rng=rng)]
            if depth >= 3:
                positions = insert_positions if insert_positions is not None else range(depth - 1)
                starts += [
                    bootstrap_depth(series.params[depth - 2], "insert_two", k, rng=rng)
                    for k in positions
                    if 0 <= k <= depth - 2
                ]
        best = None
        for start in starts:
            run = lbfgs_minimize(objective, start, options, rng)
            if best is None or run.final_value < best.final_value:
                best = run
        series.params[depth] = best.final_params
        series.runs[depth] = best
        logger.info(f"Depth {depth}: energy density {best.final_value:.15f}")
        if callback:
            callback(depth, best)
    return series
