"""
Quadratic Majorana Hamiltonians and their exact ground states.

Hamiltonians are stored as a real antisymmetric coupling matrix ``A`` with

    H = i * sum_{j<k} A[j, k] gamma_j gamma_k

so that the energy of a Gaussian state is ``sum_{j<k} A[j, k] Gamma[j, k]``.
Both models live on the Majorana chain with antiperiodic wrap
(gamma_{2L} = -gamma_0), the even-parity image of the periodic spin chain.
"""

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, List, Tuple

import numpy as np
from scipy import linalg

from dmera.exceptions import (
    DegenerateSpectrumError,
    InvalidArgumentError,
    PhysicalityError,
)
from dmera.gaussian import CovarianceState, apply_rotations, expectation_quadratic

logger = logging.getLogger(__name__)

INFINITE_ENERGY_DENSITY = -4.0 / np.pi
ZERO_MODE_TOL = 1e-12


class Model(str, Enum):
    """Hamiltonian label"""

    ISING = "ising"
    MODIFIED_ISING = "modified_ising"
    CUSTOM = "custom"


# (offset_j, offset_k, coefficient) relative to Majorana 2s for one site s.
# Ising: -Z_s -> i g_{2s} g_{2s+1}, -X_s X_{s+1} -> i g_{2s+1} g_{2s+2}.
# Modified: X_{s-1} Z_s X_{s+1} -> -i g_{2s-1} g_{2s+2}.
UNIT_CELL_TERMS: Dict[Model, List[Tuple[int, int, float]]] = {
    Model.ISING: [(0, 1, 1.0), (1, 2, 1.0)],
    Model.MODIFIED_ISING: [(1, 2, 1.0), (-1, 2, -1.0)],
}

MIN_SITES = {Model.ISING: 2, Model.MODIFIED_ISING: 4}


def unit_cell_terms(label) -> List[Tuple[int, int, float]]:
    """Majorana terms of one site of a translation-invariant model"""
    try:
        return UNIT_CELL_TERMS[Model(label)]
    except (KeyError, ValueError):
        raise InvalidArgumentError(f"no unit cell defined for model {label!r}")


def wrap_index(index: int, n_sites: int) -> Tuple[int, float]:
    """Reduce a Majorana index onto the chain, returning (index, antiperiodic sign)"""
    n_modes = 2 * n_sites
    wraps, reduced = divmod(int(index), n_modes)
    return reduced, (-1.0 if wraps % 2 else 1.0)


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """Majorana-chain Hamiltonian given by its coupling matrix"""

    n_sites: int
    coupling: np.ndarray
    label: Model = Model.CUSTOM
    boundary: str = "antiperiodic"

    def __post_init__(self):
        coupling = np.array(self.coupling, dtype=float)
        if coupling.shape != (2 * self.n_sites, 2 * self.n_sites):
            raise InvalidArgumentError(
                f"coupling must be {2 * self.n_sites}x{2 * self.n_sites}, got {coupling.shape}"
            )
        if np.max(np.abs(coupling + coupling.T)) > 1e-12:
            raise PhysicalityError("coupling matrix is not antisymmetric")
        coupling.setflags(write=False)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "label", Model(self.label))

    @property
    def energy_density_reference(self) -> float:
        return INFINITE_ENERGY_DENSITY


def translation_invariant_hamiltonian(label, n_sites: int) -> QuadraticHamiltonian:
    """Sum of the model's unit-cell terms over every site with antiperiodic wrap"""
    model = Model(label)
    terms = unit_cell_terms(model)
    if n_sites < MIN_SITES[model] or n_sites % 2:
        raise InvalidArgumentError(
            f"{model.value} needs an even number of sites >= {MIN_SITES[model]}, got {n_sites}"
        )
    coupling = np.zeros((2 * n_sites, 2 * n_sites))
    for site in range(n_sites):
        for off_j, off_k, coeff in terms:
            j, sign_j = wrap_index(2 * site + off_j, n_sites)
            k, sign_k = wrap_index(2 * site + off_k, n_sites)
            value = coeff * sign_j * sign_k
            coupling[j, k] += value
            coupling[k, j] -= value
    return QuadraticHamiltonian(n_sites=n_sites, coupling=coupling, label=model)


def ising_hamiltonian(n_sites: int) -> QuadraticHamiltonian:
    """Critical transverse-field Ising chain -sum X X - sum Z"""
    return translation_invariant_hamiltonian(Model.ISING, n_sites)


def modified_ising_hamiltonian(n_sites: int) -> QuadraticHamiltonian:
    """Modified chain -sum X X + sum X Z X"""
    return translation_invariant_hamiltonian(Model.MODIFIED_ISING, n_sites)


def energy(state: CovarianceState, h: QuadraticHamiltonian) -> float:
    """<H> as the linear contraction of A with Gamma"""
    if state.n_sites != h.n_sites:
        raise InvalidArgumentError(
            f"state has {state.n_sites} sites, Hamiltonian has {h.n_sites}"
        )
    return float(0.5 * np.sum(h.coupling * state.gamma))


def local_energy(state: CovarianceState, label, site: int) -> float:
    """Energy of the unit-cell terms attached to ``site``"""
    total = 0.0
    for off_j, off_k, coeff in unit_cell_terms(label):
        j, sign_j = wrap_index(2 * site + off_j, state.n_sites)
        k, sign_k = wrap_index(2 * site + off_k, state.n_sites)
        total += coeff * sign_j * sign_k * state.gamma[j, k]
    return float(total)


def pfaffian(matrix: np.ndarray) -> float:
    """Pfaffian of a real antisymmetric matrix via the real Schur form"""
    n = matrix.shape[0]
    if n % 2:
        return 0.0
    t, z = linalg.schur(matrix, output="real")
    return float(np.linalg.det(z) * np.prod(t[np.arange(0, n, 2), np.arange(1, n, 2)]))


def parity(state: CovarianceState) -> int:
    """Eigenvalue of prod_s Z_s on a pure Gaussian state"""
    value = pfaffian(-state.gamma)
    return 1 if value > 0 else -1


@dataclass(frozen=True, eq=False)
class ExactSolution:
    """Exact ground state of a quadratic Hamiltonian"""

    ground_state: CovarianceState
    ground_energy: float
    single_particle_spectrum: np.ndarray
    parity: int = 1

    @property
    def energy_density(self) -> float:
        return self.ground_energy / self.ground_state.n_sites


def exact_ground_state(h: QuadraticHamiltonian) -> ExactSolution:
    """Fill every negative-energy mode of the Hermitian matrix iA.

    The ground state is Gamma = i sign(iA), with energy -1/2 sum |eps|.
    The returned spectrum holds the n_sites positive eigenvalues of iA;
    exciting mode k costs 2 eps_k.
    """
    herm = 1j * h.coupling
    eps, vecs = linalg.eigh(herm)
    if np.min(np.abs(eps)) < ZERO_MODE_TOL:
        raise DegenerateSpectrumError(
            f"zero single-particle mode in {h.label.value} chain of {h.n_sites} sites"
        )
    sign_h = (vecs * np.sign(eps)) @ vecs.conj().T
    gamma = np.real(1j * sign_h)
    state = CovarianceState.trusted(gamma)
    ground_energy = -0.5 * float(np.sum(np.abs(eps)))
    spectrum = np.sort(eps[eps > 0])
    logger.debug(f"Exact {h.label.value} ground state on {h.n_sites} sites: E0={ground_energy:.15f}")
    return ExactSolution(
        ground_state=state,
        ground_energy=ground_energy,
        single_particle_spectrum=spectrum,
        parity=parity(state),
    )


def many_body_spectrum(h: QuadraticHamiltonian, parity_sector: str = "even") -> np.ndarray:
    """All many-body levels of one parity sector, sorted ascending"""
    if parity_sector not in ("even", "odd", "all"):
        raise InvalidArgumentError(f"unknown parity sector {parity_sector!r}")
    if h.n_sites > 16:
        raise InvalidArgumentError("many-body enumeration is limited to 16 sites")
    solution = exact_ground_state(h)
    eps = solution.single_particle_spectrum
    occupations = np.array(list(product((0, 1), repeat=len(eps))))
    levels = solution.ground_energy + 2.0 * occupations @ eps
    parities = solution.parity * (-1) ** occupations.sum(axis=1)
    if parity_sector == "even":
        levels = levels[parities == 1]
    elif parity_sector == "odd":
        levels = levels[parities == -1]
    return np.sort(levels)


def to_ising_frame(state: CovarianceState) -> CovarianceState:
    """Map a state of the modified chain to the frame of the Ising chain.

    Quarter turns on every pair (2s+1, 2s+2) carry the modified Hamiltonian
    onto the Ising one; the boundary pair sees gamma_{2L} = -gamma_0.
    """
    n = state.n_sites
    k = np.arange(n)
    p = 2 * k + 1
    q = (2 * k + 2) % (2 * n)
    angles = np.where(k == n - 1, -0.5 * np.pi, 0.5 * np.pi)
    return apply_rotations(state, p, q, angles)


FAMILY_OFFSETS = {"A": (0, 1), "B": (1, 2)}


def correlator_index(n_sites: int, family: str, site: int, distance: int) -> Tuple[int, int, float]:
    """Majorana pair and sign of a correlator family at (site, site + distance).

    Family A is <i g_{2i} g_{2j+1}>, family B is <i g_{2i+1} g_{2j+2}>, with
    j = i + distance. Distance 0 gives -<Z_i> and -<X_i X_{i+1}>.
    """
    try:
        off_j, off_k = FAMILY_OFFSETS[family]
    except KeyError:
        raise InvalidArgumentError(f"unknown correlator family {family!r}")
    j, sign_j = wrap_index(2 * site + off_j, n_sites)
    k, sign_k = wrap_index(2 * (site + distance) + off_k, n_sites)
    return j, k, sign_j * sign_k


def correlator(state: CovarianceState, family: str, site: int, distance: int) -> float:
    j, k, sign = correlator_index(state.n_sites, family, site, distance)
    return sign * expectation_quadratic(state, j, k)


def exact_correlator_table(label, n_sites: int, max_distance: int) -> List[dict]:
    """Exact family A and B values at site 0 for distances 0..max_distance"""
    if max_distance >= n_sites:
        raise InvalidArgumentError(f"max_distance must be < {n_sites}")
    solution = SOLUTIONS.get(label, n_sites)
    rows = []
    for distance in range(max_distance + 1):
        for family in FAMILY_OFFSETS:
            rows.append({
                "L": n_sites,
                "distance": distance,
                "family": family,
                "value": correlator(solution.ground_state, family, 0, distance),
            })
    return rows


@dataclass
class SolutionCache:
    """Thread-safe memo of exact solutions keyed by (model, L)"""

    _solutions: Dict[Tuple[Model, int], ExactSolution] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def get(self, label, n_sites: int) -> ExactSolution:
        key = (Model(label), n_sites)
        with self._lock:
            if key in self._solutions:
                return self._solutions[key]
        solution = exact_ground_state(translation_invariant_hamiltonian(key[0], n_sites))
        with self._lock:
            self._solutions.setdefault(key, solution)
            return self._solutions[key]

    def clear(self) -> None:
        with self._lock:
            self._solutions.clear()


SOLUTIONS = SolutionCache()
