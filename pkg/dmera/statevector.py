"""
Dense spin-space oracle used to cross-check the free-fermion pipeline.

Qubit ``q`` is tensor axis ``q`` of the amplitude array (qubit 0 is the most
significant bit of a basis index). Everything here is exponential in the
qubit count and refuses more than ``DEFAULT_CONFIG['oracle_max_qubits']``.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from dmera.exceptions import InvalidArgumentError, OracleSizeError
from dmera.models import Model

logger = logging.getLogger(__name__)

MAX_QUBITS = 14

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_size(n_qubits: int) -> None:
    if n_qubits < 1:
        raise InvalidArgumentError("oracle needs at least one qubit")
    if n_qubits > MAX_QUBITS:
        raise OracleSizeError(f"dense oracle is limited to {MAX_QUBITS} qubits, got {n_qubits}")


def spin_gate_matrix(x: float, y: float) -> np.ndarray:
    """4x4 spin unitary whose Majorana image is the two-site matchgate u(x, y).

    u = exp(i x'/2 Y(x)X) exp(i y'/2 X(x)Y) with x' = x + y, y' = x - y.
    """
    xp, yp = x + y, x - y
    yx = np.kron(PAULI["Y"], PAULI["X"])
    xy = np.kron(PAULI["X"], PAULI["Y"])
    eye = np.eye(4, dtype=complex)
    first = np.cos(xp / 2) * eye + 1j * np.sin(xp / 2) * yx
    second = np.cos(yp / 2) * eye + 1j * np.sin(yp / 2) * xy
    return first @ second


@dataclass(frozen=True)
class DenseGate:
    """Two-qubit unitary acting on (left, right)"""

    matrix: np.ndarray
    left: int
    right: int

    @classmethod
    def matchgate(cls, n_qubits: int, left: int, x: float, y: float) -> "DenseGate":
        return cls(spin_gate_matrix(x, y), left, (left + 1) % n_qubits)


class Statevector:
    """Pure state of ``n_qubits`` spins"""

    def __init__(self, n_qubits: int):
        _check_size(n_qubits)
        self.n_qubits = n_qubits
        self.amplitudes = np.zeros((2,) * n_qubits, dtype=complex)
        self.amplitudes[(0,) * n_qubits] = 1.0

    def copy(self) -> "Statevector":
        other = Statevector.__new__(Statevector)
        other.n_qubits = self.n_qubits
        other.amplitudes = self.amplitudes.copy()
        return other

    def _check_qubit(self, qubit: int) -> None:
        if not 0 <= qubit < self.n_qubits:
            raise InvalidArgumentError(f"qubit {qubit} out of range for {self.n_qubits} qubits")

    def apply_single(self, matrix: np.ndarray, qubit: int) -> None:
        self._check_qubit(qubit)
        moved = np.tensordot(matrix, self.amplitudes, axes=([1], [qubit]))
        self.amplitudes = np.moveaxis(moved, 0, qubit)

    def apply_two(self, matrix: np.ndarray, first: int, second: int) -> None:
        self._check_qubit(first)
        self._check_qubit(second)
        if first == second:
            raise InvalidArgumentError("two-qubit gate needs distinct qubits")
        tensor = matrix.reshape(2, 2, 2, 2)
        moved = np.tensordot(tensor, self.amplitudes, axes=([2, 3], [first, second]))
        self.amplitudes = np.moveaxis(moved, [0, 1], [first, second])

    def apply_gate(self, gate: DenseGate) -> None:
        self.apply_two(gate.matrix, gate.left, gate.right)

    def apply_pauli_rotation_layer(self, paulis: str, angle: float, pairs: Iterable[Tuple[int, ...]]) -> None:
        """exp(-i angle P) for each listed support; the P must commute"""
        for support in pairs:
            op = PAULI[paulis[0]]
            for letter in paulis[1:]:
                op = np.kron(op, PAULI[letter])
            unitary = np.cos(angle) * np.eye(op.shape[0]) - 1j * np.sin(angle) * op
            if len(support) == 1:
                self.apply_single(unitary, support[0])
            else:
                self.apply_two(unitary, support[0], support[1])

    def apply_pauli_string(self, ops: Sequence[Tuple[int, str]]) -> "Statevector":
        """Return P|psi> for a product of single-site Paulis"""
        out = self.copy()
        for qubit, letter in ops:
            if letter != "I":
                out.apply_single(PAULI[letter], qubit)
        return out

    def inner(self, other: "Statevector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, pauli_string: str) -> float:
        """<psi| P |psi> for a Pauli string such as 'XZXI'"""
        if len(pauli_string) != self.n_qubits:
            raise InvalidArgumentError(
                f"Pauli string length {len(pauli_string)} != {self.n_qubits} qubits"
            )
        ops = [(q, letter) for q, letter in enumerate(pauli_string.upper())]
        return float(np.real(self.inner(self.apply_pauli_string(ops))))

    def majorana_ops(self, index: int) -> List[Tuple[int, str]]:
        """Jordan-Wigner string of Majorana ``index``"""
        site, kind = divmod(index, 2)
        if not 0 <= site < self.n_qubits:
            raise InvalidArgumentError(f"Majorana index {index} out of range")
        return [(q, "Z") for q in range(site)] + [(site, "X" if kind == 0 else "Y")]

    def covariance(self) -> np.ndarray:
        """Gamma[j, k] = <i gamma_j gamma_k>"""
        n_modes = 2 * self.n_qubits
        images = [self.apply_pauli_string(self.majorana_ops(k)) for k in range(n_modes)]
        gamma = np.zeros((n_modes, n_modes))
        for j in range(n_modes):
            for k in range(j + 1, n_modes):
                # <psi| g_j g_k |psi> = <g_j psi | g_k psi>
                value = 1j * images[j].inner(images[k])
                gamma[j, k] = value.real
                gamma[k, j] = -value.real
        return gamma


def statevector_oracle(
    n_qubits: int, gates: Sequence[DenseGate], observables: Sequence[str]
) -> List[float]:
    """Run ``gates`` on |0...0> and return the Pauli expectation values"""
    _check_size(n_qubits)
    psi = Statevector(n_qubits)
    for gate in gates:
        psi.apply_gate(gate)
    return [psi.expectation(obs) for obs in observables]


def qaoa_statevector(n_qubits: int, gammas: Sequence[float], betas: Sequence[float]) -> Statevector:
    """Rounds of exp(-i gamma sum XX) followed by exp(-i beta sum Z) on |0...0>"""
    psi = Statevector(n_qubits)
    bonds = [(q, (q + 1) % n_qubits) for q in range(n_qubits)]
    sites = [(q,) for q in range(n_qubits)]
    for gamma, beta in zip(gammas, betas):
        psi.apply_pauli_rotation_layer("XX", gamma, bonds)
        psi.apply_pauli_rotation_layer("Z", beta, sites)
    return psi


def _parity_basis(n_qubits: int, parity_sector: str) -> np.ndarray:
    states = np.arange(2 ** n_qubits)
    ones = np.array([bin(s).count("1") for s in states])
    if parity_sector == "even":
        return states[ones % 2 == 0]
    if parity_sector == "odd":
        return states[ones % 2 == 1]
    if parity_sector == "all":
        return states
    raise InvalidArgumentError(f"unknown parity sector {parity_sector!r}")


def dense_hamiltonian(label, n_qubits: int, parity_sector: str = "even") -> sparse.csr_matrix:
    """Periodic spin Hamiltonian projected onto a parity sector.

    ising: -sum X_i X_{i+1} - sum Z_i
    modified_ising: -sum X_i X_{i+1} + sum X_{i-1} Z_i X_{i+1}
    """
    _check_size(n_qubits)
    model = Model(label)
    basis = _parity_basis(n_qubits, parity_sector)
    position = {int(s): i for i, s in enumerate(basis)}
    n = n_qubits

    def bit(q: int) -> int:
        return 1 << (n - 1 - q)

    rows, cols, vals = [], [], []
    for i, s in enumerate(basis):
        s = int(s)
        z = [1 - 2 * ((s >> (n - 1 - q)) & 1) for q in range(n)]
        diag = 0.0
        if model == Model.ISING:
            diag = -float(sum(z))
        rows.append(i)
        cols.append(i)
        vals.append(diag)
        for q in range(n):
            r = (q + 1) % n
            flipped = s ^ bit(q) ^ bit(r)
            rows.append(position[flipped])
            cols.append(i)
            vals.append(-1.0)
            if model == Model.MODIFIED_ISING:
                left = (q - 1) % n
                flipped = s ^ bit(left) ^ bit(r)
                rows.append(position[flipped])
                cols.append(i)
                vals.append(float(z[q]))
    dim = len(basis)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def dense_spectrum(label, n_qubits: int, parity_sector: str = "even") -> np.ndarray:
    """Every eigenvalue of the projected spin Hamiltonian (small chains only)"""
    matrix = dense_hamiltonian(label, n_qubits, parity_sector).toarray()
    return np.sort(np.linalg.eigvalsh(matrix))


def dense_ground_energy(label, n_qubits: int, parity_sector: str = "even") -> float:
    matrix = dense_hamiltonian(label, n_qubits, parity_sector)
    if matrix.shape[0] <= 1024:
        return float(np.linalg.eigvalsh(matrix.toarray())[0])
    value = sparse_linalg.eigsh(matrix, k=1, which="SA", return_eigenvectors=False)
    logger.debug(f"Dense {label} ground energy on {n_qubits} qubits: {value[0]:.12f}")
    return float(value[0])
