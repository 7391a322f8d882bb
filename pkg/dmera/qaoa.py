"""
QAOA baseline circuits on the free-fermion chain.

Each round applies exp(-i gamma sum X_j X_{j+1}) and then exp(-i beta sum Z_j)
to |0...0>. Both layers are sets of commuting quadratic terms, so every
round is a pair of plane-rotation batches on the covariance matrix.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from dmera import DEFAULT_CONFIG
from dmera.exceptions import InvalidArgumentError, OptimizationError
from dmera.gaussian import (
    CovarianceState,
    apply_rotations,
    log_fidelity,
    normalized_infidelity,
    vacuum_state,
)
from dmera.models import INFINITE_ENERGY_DENSITY, SOLUTIONS, Model, energy, ising_hamiltonian
from dmera.optimizer import LbfgsOptions, OptimizationRun, lbfgs_minimize, qaoa_objective

logger = logging.getLogger(__name__)

EXACT_PREP_TOL = 1e-10
EXACT_ENERGY_TOL = 1e-8
MAX_BOOTSTRAP_ROUNDS = 8


@dataclass(frozen=True, eq=False)
class QaoaParams:
    """p rounds of (gamma_k, beta_k), stored interleaved"""

    p: int
    angles: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        if self.p < 1:
            raise InvalidArgumentError(f"QAOA needs p >= 1, got {self.p}")
        if angles.shape != (2 * self.p,):
            raise InvalidArgumentError(f"QAOA with p={self.p} needs {2 * self.p} angles, got {angles.size}")
        object.__setattr__(self, "angles", angles)

    @property
    def gammas(self) -> np.ndarray:
        return self.angles[0::2]

    @property
    def betas(self) -> np.ndarray:
        return self.angles[1::2]


def _check_sites(n_sites: int) -> None:
    if n_sites < 2 or n_sites % 2:
        raise InvalidArgumentError(f"QAOA needs an even number of sites >= 2, got {n_sites}")


def _bond_planes(n_sites: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    j = np.arange(n_sites)
    p = 2 * j + 1
    q = (2 * j + 2) % (2 * n_sites)
    # X_{L-1} X_0 couples g_{2L-1} to -g_0
    sign = np.where(j == n_sites - 1, -1.0, 1.0)
    return p, q, sign


def qaoa_state(params: QaoaParams, n_sites: int) -> CovarianceState:
    """State after p QAOA rounds on an L-site chain"""
    _check_sites(n_sites)
    bond_p, bond_q, bond_sign = _bond_planes(n_sites)
    site_p = 2 * np.arange(n_sites)
    site_q = site_p + 1
    state = vacuum_state(n_sites)
    for gamma, beta in zip(params.gammas, params.betas):
        state = apply_rotations(state, bond_p, bond_q, -2.0 * gamma * bond_sign)
        state = apply_rotations(state, site_p, site_q, np.full(n_sites, -2.0 * beta))
    return state


@lru_cache(maxsize=32)
def _hamiltonian(n_sites: int):
    return ising_hamiltonian(n_sites)


def qaoa_energy(params: QaoaParams, n_sites: int) -> float:
    return energy(qaoa_state(params, n_sites), _hamiltonian(n_sites))


def qaoa_energy_density(params: QaoaParams, n_sites: int) -> float:
    return qaoa_energy(params, n_sites) / n_sites


def random_qaoa_angles(p: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform angles in (-pi/2, pi/2]"""
    return 0.5 * np.pi - np.pi * rng.random(2 * p)


def optimize_qaoa(
    p: int,
    n_sites: int,
    restarts: int = DEFAULT_CONFIG["qaoa_restarts"],
    rng: Optional[np.random.Generator] = None,
    initial: Optional[QaoaParams] = None,
    options: Optional[LbfgsOptions] = None,
) -> Tuple[QaoaParams, float]:
    """Minimise the energy over the 2p angles from ``restarts`` starting points.

    The first start is ``initial`` when given. At L = 2p the result must be
    the exact ground energy.
    """
    _check_sites(n_sites)
    if n_sites < 2 * p:
        raise InvalidArgumentError(f"optimize_qaoa needs L >= 2p, got L={n_sites}, p={p}")
    if restarts < 1:
        raise InvalidArgumentError("restarts must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    options = options or LbfgsOptions(restarts=0)
    objective = qaoa_objective(p, n_sites)
    exact = SOLUTIONS.get(Model.ISING, n_sites).ground_energy

    best: Optional[OptimizationRun] = None
    for attempt in range(restarts):
        start = initial.angles if (initial is not None and attempt == 0) else random_qaoa_angles(p, rng)
        run = lbfgs_minimize(objective, start, options, rng)
        if best is None or run.final_value < best.final_value:
            best = run
        gap = best.final_value * n_sites - exact
        logger.debug(f"QAOA p={p} L={n_sites} start {attempt + 1}: gap {gap:.3e}")
        if n_sites == 2 * p and gap < EXACT_PREP_TOL:
            break

    total = best.final_value * n_sites
    if n_sites == 2 * p and total - exact > EXACT_ENERGY_TOL:
        raise OptimizationError(
            f"QAOA p={p} failed to reach the exact L={n_sites} ground energy "
            f"(gap {total - exact:.3e} after {restarts} starts)"
        )
    logger.info(f"QAOA p={p} L={n_sites}: energy density {best.final_value:.15f}")
    return QaoaParams(p, best.final_params), total


def exact_prep_bootstrap(
    p_max: int,
    restarts: int = DEFAULT_CONFIG["qaoa_restarts"],
    rng: Optional[np.random.Generator] = None,
) -> Dict[int, QaoaParams]:
    """Angles preparing the exact L = 2p ground state for p = 1..p_max"""
    if not 1 <= p_max <= MAX_BOOTSTRAP_ROUNDS:
        raise InvalidArgumentError(f"p_max must be in [1, {MAX_BOOTSTRAP_ROUNDS}], got {p_max}")
    rng = rng if rng is not None else np.random.default_rng(0)
    found: Dict[int, QaoaParams] = {}
    for p in range(1, p_max + 1):
        seed = None
        if p - 1 in found:
            seed = QaoaParams(p, np.concatenate([found[p - 1].angles, random_qaoa_angles(1, rng)]))
        params, total = optimize_qaoa(p, 2 * p, restarts=restarts, rng=rng, initial=seed)
        gap = total - SOLUTIONS.get(Model.ISING, 2 * p).ground_energy
        if gap > EXACT_PREP_TOL:
            raise OptimizationError(f"no exact preparation found for p={p} (gap {gap:.3e})")
        found[p] = params
    return found


def qaoa_metrics(params: QaoaParams, n_sites: int) -> dict:
    """CSV row {p, L, energy_density_error, normalized_infidelity}"""
    state = qaoa_state(params, n_sites)
    density = energy(state, _hamiltonian(n_sites)) / n_sites
    exact = SOLUTIONS.get(Model.ISING, n_sites)
    log_f = log_fidelity(state, exact.ground_state)
    return {
        "p": params.p,
        "L": n_sites,
        "energy_density_error": abs(density - INFINITE_ENERGY_DENSITY) / abs(INFINITE_ENERGY_DENSITY),
        "normalized_infidelity": normalized_infidelity(log_f, n_sites),
    }
