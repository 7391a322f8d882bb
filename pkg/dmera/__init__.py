"""
DMERA Benchmark Package

Free-fermion simulation and variational optimisation of deep multiscale
entanglement renormalisation circuits for the critical transverse-field
Ising chain.

Features:
- Gaussian covariance-matrix states and matchgate circuits
- Exact ground states of the Ising and modified Ising chains
- Scale-invariant DMERA states from the causal-cone fixed point
- QAOA comparison circuits
- L-BFGS optimisation with restarts and depth bootstrapping
- Symmetry-averaged correlator, entropy and fidelity analysis
"""

__version__ = "1.0.0"
__author__ = "DMERA Benchmark Team"
__description__ = "Matchgate benchmark of DMERA circuits on the critical Ising chain"

# Numerical defaults shared by the modules and the CLI
DEFAULT_CONFIG = {
    "fixed_point_tol": 1e-13,
    "fixed_point_max_iter": 500,
    "finite_difference_step": 1e-6,
    "lbfgs_memory": 10,
    "lbfgs_grad_tol": 1e-10,
    "lbfgs_max_iter": 2000,
    "restarts": 8,
    "perturbation_scale": 0.05,
    "insertion_sigma": 1e-3,
    "qaoa_restarts": 64,
    "oracle_max_qubits": 14,
    "max_depth": 6,
}

from dmera.exceptions import ERROR_CODES  # noqa: E402

# Logging configuration
LOGGING_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {
            "format": "%(message)s",
        },
        "detailed": {
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(module)s - %(funcName)s - %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "rich.logging.RichHandler",
            "formatter": "default",
            "level": "INFO",
            "rich_tracebacks": False,
            "show_path": False,
        },
    },
    "loggers": {
        "dmera": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
}

from dmera.gaussian import (  # noqa: E402
    CovarianceState,
    ModeSubset,
    vacuum_state,
    fidelity,
    entanglement_entropy,
)
from dmera.models import (  # noqa: E402
    QuadraticHamiltonian,
    ExactSolution,
    ising_hamiltonian,
    modified_ising_hamiltonian,
    exact_ground_state,
    energy,
)
from dmera.ansatz import (  # noqa: E402
    ScalingCircuit,
    ParameterBundle,
    prepare_state,
    fixed_point_window,
    energy_density,
    load_bundled_parameters,
)

__all__ = [
    "DEFAULT_CONFIG",
    "ERROR_CODES",
    "LOGGING_CONFIG",
    "CovarianceState",
    "ModeSubset",
    "vacuum_state",
    "fidelity",
    "entanglement_entropy",
    "QuadraticHamiltonian",
    "ExactSolution",
    "ising_hamiltonian",
    "modified_ising_hamiltonian",
    "exact_ground_state",
    "energy",
    "ScalingCircuit",
    "ParameterBundle",
    "prepare_state",
    "fixed_point_window",
    "energy_density",
    "load_bundled_parameters",
]
