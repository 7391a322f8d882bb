"""
Gaussian fermionic states in the covariance-matrix representation.

A state on ``n`` sites is a real antisymmetric ``2n x 2n`` matrix

    Gamma[j, k] = <i gamma_j gamma_k>          (j != k)

with Majorana operators normalised to ``{gamma_j, gamma_k} = 2 delta_jk``.
Site ``s`` owns the Majoranas ``2s`` and ``2s + 1`` (0-based), which under the
Jordan-Wigner map are ``(prod_{r<s} Z_r) X_s`` and ``(prod_{r<s} Z_r) Y_s``.
With this layout ``Gamma[2s, 2s+1] = -<Z_s>`` and
``Gamma[2s+1, 2s+2] = -<X_s X_{s+1}>``.

Every gate used in this package is a matchgate, i.e. an orthogonal map ``R``
on the Majoranas acting as ``Gamma -> R Gamma R^T``. States are immutable:
every operation returns a fresh ``CovarianceState``.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.special import xlogy

from dmera.exceptions import (
    DegenerateOverlapError,
    InvalidArgumentError,
    PhysicalityError,
)

logger = logging.getLogger(__name__)

ANTISYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-10
PURITY_TOL = 1e-10
CLAMP_TOL = 1e-9

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """Covariance matrix of a Gaussian state on ``n_sites`` sites"""

    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float)
        if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
            raise InvalidArgumentError(
                f"covariance matrix must be square of even dimension, got {gamma.shape}"
            )
        if gamma.shape[0] == 0:
            raise InvalidArgumentError("covariance matrix must cover at least one site")
        asym = np.max(np.abs(gamma + gamma.T))
        if asym > ANTISYMMETRY_TOL:
            raise PhysicalityError(f"covariance matrix is not antisymmetric (deviation {asym:.3e})")
        norm = np.linalg.norm(gamma, 2)
        if norm > 1.0 + PHYSICALITY_TOL:
            raise PhysicalityError(f"covariance matrix has singular value {norm:.12f} > 1")
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def trusted(cls, gamma: np.ndarray) -> "CovarianceState":
        """Wrap a matrix produced by an orthogonal update without re-validating it.

        The matrix is re-antisymmetrised to remove rounding drift.
        """
        state = object.__new__(cls)
        gamma = 0.5 * (gamma - gamma.T)
        gamma.setflags(write=False)
        object.__setattr__(state, "gamma", gamma)
        return state

    @property
    def n_sites(self) -> int:
        return self.gamma.shape[0] // 2

    @property
    def n_modes(self) -> int:
        return self.gamma.shape[0]

    @property
    def is_pure(self) -> bool:
        deviation = self.gamma @ self.gamma.T - np.eye(self.n_modes)
        return bool(np.max(np.abs(deviation)) < PURITY_TOL)

    def purity_deviation(self) -> float:
        """max |Gamma Gamma^T - I|"""
        return float(np.max(np.abs(self.gamma @ self.gamma.T - np.eye(self.n_modes))))

    def window(self, start: int, width: int) -> "CovarianceState":
        """Reduced state of ``width`` consecutive sites beginning at ``start``.

        Sites are taken modulo ``n_sites``. Majoranas that wrap around the
        chain pick up the antiperiodic sign, so windows at different
        positions are related by plain translation.
        """
        if not 1 <= width <= self.n_sites:
            raise InvalidArgumentError(f"window width {width} outside [1, {self.n_sites}]")
        positions = start + np.arange(width)
        wraps = np.floor_divide(positions, self.n_sites)
        sites = np.mod(positions, self.n_sites)
        index = np.stack([2 * sites, 2 * sites + 1], axis=1).ravel()
        sign = np.repeat(np.where(wraps % 2 == 0, 1.0, -1.0), 2)
        block = self.gamma[np.ix_(index, index)] * np.outer(sign, sign)
        return CovarianceState.trusted(block)

    def to_csv(self, path: PathLike) -> None:
        """Write Gamma row-major with 17 significant digits"""
        np.savetxt(path, self.gamma, fmt="%.17g", delimiter=",")

    @classmethod
    def from_csv(cls, path: PathLike) -> "CovarianceState":
        return cls(np.loadtxt(path, delimiter=",", ndmin=2))


@dataclass(frozen=True)
class ModeSubset:
    """Strictly increasing list of Majorana indices"""

    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if not indices:
            raise InvalidArgumentError("mode subset must not be empty")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise InvalidArgumentError("mode subset indices must be strictly increasing")
        if indices[0] < 0:
            raise InvalidArgumentError("mode subset indices must be non-negative")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def sites(cls, sites: Iterable[int]) -> "ModeSubset":
        """Both Majoranas of every listed site"""
        modes = sorted({m for s in sites for m in (2 * int(s), 2 * int(s) + 1)})
        return cls(tuple(modes))

    def __len__(self) -> int:
        return len(self.indices)


def vacuum_state(n_sites: int) -> CovarianceState:
    """Product state with <Z_s> = +1 on every site"""
    if n_sites < 1:
        raise InvalidArgumentError(f"n_sites must be positive, got {n_sites}")
    gamma = np.zeros((2 * n_sites, 2 * n_sites))
    even = np.arange(0, 2 * n_sites, 2)
    gamma[even, even + 1] = -1.0
    gamma[even + 1, even] = 1.0
    return CovarianceState.trusted(gamma)


def _check_modes(state: CovarianceState, *indices: int) -> None:
    for index in indices:
        if not 0 <= index < state.n_modes:
            raise InvalidArgumentError(
                f"Majorana index {index} out of range for {state.n_sites} sites"
            )


def rotate_inplace(gamma: np.ndarray, p: np.ndarray, q: np.ndarray, angles: np.ndarray) -> None:
    """Apply disjoint plane rotations R to ``gamma`` as R gamma R^T.

    For each plane: gamma_p -> cos * gamma_p + sin * gamma_q and
    gamma_q -> -sin * gamma_p + cos * gamma_q.
    """
    c = np.cos(angles)
    s = np.sin(angles)
    rows_p = gamma[p, :].copy()
    rows_q = gamma[q, :].copy()
    gamma[p, :] = c[:, None] * rows_p + s[:, None] * rows_q
    gamma[q, :] = -s[:, None] * rows_p + c[:, None] * rows_q
    cols_p = gamma[:, p].copy()
    cols_q = gamma[:, q].copy()
    gamma[:, p] = cols_p * c + cols_q * s
    gamma[:, q] = -cols_p * s + cols_q * c


def apply_rotations(
    state: CovarianceState,
    p: Sequence[int],
    q: Sequence[int],
    angles: Sequence[float],
) -> CovarianceState:
    """Apply a batch of plane rotations on pairwise disjoint planes"""
    p = np.asarray(p, dtype=int)
    q = np.asarray(q, dtype=int)
    angles = np.asarray(angles, dtype=float)
    if not p.shape == q.shape == angles.shape:
        raise InvalidArgumentError("rotation planes and angles must have equal length")
    touched = np.concatenate([p, q])
    if touched.size and (touched.min() < 0 or touched.max() >= state.n_modes):
        raise InvalidArgumentError(f"rotation plane out of range for {state.n_sites} sites")
    if np.unique(touched).size != touched.size:
        raise InvalidArgumentError("rotation planes must be pairwise disjoint")
    gamma = np.array(state.gamma)
    rotate_inplace(gamma, p, q, angles)
    return CovarianceState.trusted(gamma)


def apply_plane_rotation(state: CovarianceState, j: int, k: int, angle: float) -> CovarianceState:
    """Givens rotation by ``angle`` in the (j, k) plane"""
    if j == k:
        raise InvalidArgumentError("rotation plane needs two distinct Majorana indices")
    _check_modes(state, j, k)
    return apply_rotations(state, [j], [k], [angle])


def majorana_gate_matrix(x_prime: float, y_prime: float) -> np.ndarray:
    """4x4 orthogonal action of the two-site gate on (a, b, c, d) = Majoranas of (l, l+1)"""
    cx, sx = np.cos(x_prime), np.sin(x_prime)
    cy, sy = np.cos(y_prime), np.sin(y_prime)
    return np.array(
        [
            [cx, 0.0, -sx, 0.0],
            [0.0, cy, 0.0, sy],
            [sx, 0.0, cx, 0.0],
            [0.0, -sy, 0.0, cy],
        ]
    )


def gate_planes(
    n_sites: int,
    left_sites: Sequence[int],
    x_primes: Sequence[float],
    y_primes: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rotation planes implementing two-site gates on (l, l+1 mod n).

    x' rotates (c -> a) and y' rotates (b -> d). A gate across the boundary
    sees c and d with the antiperiodic sign, which negates both angles.
    """
    if n_sites < 2:
        raise InvalidArgumentError("two-site gates need at least two sites")
    left = np.asarray(left_sites, dtype=int)
    if left.size and (left.min() < 0 or left.max() >= n_sites):
        raise InvalidArgumentError(f"gate site out of range for {n_sites} sites")
    right = (left + 1) % n_sites
    sign = np.where(right == 0, -1.0, 1.0)
    xp = np.broadcast_to(np.asarray(x_primes, dtype=float), left.shape) * sign
    yp = np.broadcast_to(np.asarray(y_primes, dtype=float), left.shape) * sign
    p = np.concatenate([2 * right, 2 * left + 1])
    q = np.concatenate([2 * left, 2 * right + 1])
    return p, q, np.concatenate([xp, yp])


def apply_two_site_gate(
    state: CovarianceState, left_site: int, angles: Tuple[float, float]
) -> CovarianceState:
    """Apply u(x, y) to sites (left_site, left_site + 1) with periodic wrap.

    The spin angles are converted to x' = x + y and y' = x - y.
    """
    x, y = angles
    p, q, phi = gate_planes(state.n_sites, [left_site], [x + y], [x - y])
    return apply_rotations(state, p, q, phi)


def interleave_vacuum(state: CovarianceState) -> CovarianceState:
    """Embed ``state`` on the even sites of a chain twice as long.

    Old site i moves to 2i; every odd site is a fresh vacuum site.
    """
    n = state.n_sites
    gamma = np.zeros((4 * n, 4 * n))
    old = np.stack([4 * np.arange(n), 4 * np.arange(n) + 1], axis=1).ravel()
    gamma[np.ix_(old, old)] = state.gamma
    fresh = 4 * np.arange(n) + 2
    gamma[fresh, fresh + 1] = -1.0
    gamma[fresh + 1, fresh] = 1.0
    return CovarianceState.trusted(gamma)


def restrict(state: CovarianceState, subset: ModeSubset) -> CovarianceState:
    """Reduced state on the Majoranas in ``subset``"""
    if len(subset) % 2:
        raise InvalidArgumentError("restriction needs an even number of Majoranas")
    _check_modes(state, subset.indices[0], subset.indices[-1])
    index = np.asarray(subset.indices)
    return CovarianceState.trusted(state.gamma[np.ix_(index, index)].copy())


def purify(state: CovarianceState) -> CovarianceState:
    """Pure state on twice the modes whose restriction to the first half is ``state``.

    Uses [[G, S], [-S, -G]] with S = sqrt(I + G^2), which squares to -I
    because S commutes with G.
    """
    gamma = state.gamma
    m = np.eye(state.n_modes) + gamma @ gamma
    m = 0.5 * (m + m.T)
    w, v = linalg.eigh(m)
    s = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    s = 0.5 * (s + s.T)
    pure = np.block([[gamma, s], [-s, -gamma]])
    return CovarianceState.trusted(pure)


def canonical_eigenvalues(state: CovarianceState) -> np.ndarray:
    """Paired singular values lambda_j in [0, 1], one per mode pair"""
    sv = np.sort(linalg.svdvals(state.gamma))[::-1]
    lam = sv[0::2]
    if lam.size and lam[0] > 1.0 + CLAMP_TOL:
        raise PhysicalityError(f"canonical eigenvalue {lam[0]:.12f} exceeds 1")
    return np.clip(lam, 0.0, 1.0)


def mode_entropy(lam: Union[float, np.ndarray]) -> np.ndarray:
    """Von Neumann entropy (nats) of a mode pair with canonical eigenvalue lambda"""
    lam = np.clip(np.asarray(lam, dtype=float), 0.0, 1.0)
    plus = 0.5 * (1.0 + lam)
    minus = 0.5 * (1.0 - lam)
    return -(xlogy(plus, plus) + xlogy(minus, minus))


def entropy(state: CovarianceState) -> float:
    return float(np.sum(mode_entropy(canonical_eigenvalues(state))))


def entanglement_entropy(state: CovarianceState, subset: ModeSubset) -> float:
    """Entropy of the reduced state on ``subset``"""
    return entropy(restrict(state, subset))


def fidelity(a: CovarianceState, b: CovarianceState) -> float:
    """Root fidelity tr|sqrt(rho) sqrt(sigma)| between two Gaussian states"""
    if a.n_modes != b.n_modes:
        raise InvalidArgumentError(
            f"fidelity needs equal mode counts, got {a.n_modes} and {b.n_modes}"
        )
    if a.is_pure or b.is_pure:
        sign, logdet = np.linalg.slogdet(0.5 * (a.gamma + b.gamma))
        if sign == 0:
            return 0.0
        return float(min(1.0, np.exp(0.25 * logdet)))
    return float(min(1.0, np.exp(_mixed_log_fidelity(a.gamma, b.gamma))))


def _mixed_log_fidelity(g_rho: np.ndarray, g_sigma: np.ndarray) -> float:
    n = g_rho.shape[0]
    eye = np.eye(n)
    overlap = eye - g_rho @ g_sigma
    sign, logdet = np.linalg.slogdet(overlap)
    if sign == 0 or np.linalg.cond(overlap) > 1.0 / np.finfo(float).eps:
        raise DegenerateOverlapError("I - Gamma_rho Gamma_sigma is singular")
    # covariance of the normalised product rho * sigma
    solved = np.linalg.solve(overlap, eye + 1j * g_rho)
    product = 1j * (eye - (eye + 1j * g_sigma) @ solved)
    eig = np.linalg.eigvals(product)
    log_root = np.sum(np.log(1.0 + np.sqrt(1.0 + eig.astype(complex) ** 2))).real
    return 0.25 * (logdet + log_root) - 0.25 * n * np.log(2.0)


def log_fidelity(a: CovarianceState, b: CovarianceState) -> float:
    """log F, kept in log space for large systems"""
    if a.n_modes != b.n_modes:
        raise InvalidArgumentError("fidelity needs equal mode counts")
    if a.is_pure or b.is_pure:
        sign, logdet = np.linalg.slogdet(0.5 * (a.gamma + b.gamma))
        return -np.inf if sign == 0 else float(min(0.0, 0.25 * logdet))
    return float(min(0.0, _mixed_log_fidelity(a.gamma, b.gamma)))


def normalized_infidelity(log_f: float, size: int) -> float:
    """1 - F^(1/size) given log F"""
    if not np.isfinite(log_f):
        return 1.0
    return float(-np.expm1(log_f / size))


def expectation_quadratic(state: CovarianceState, j: int, k: int) -> float:
    """<i gamma_j gamma_k>"""
    if j == k:
        raise InvalidArgumentError("quadratic expectation needs j != k")
    _check_modes(state, j, k)
    return float(state.gamma[j, k])
