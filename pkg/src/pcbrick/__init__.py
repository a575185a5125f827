"""Particle-conserving two-qubit gates and brick-wall circuits for VQE."""

from __future__ import annotations

from .circuits import ParamCircuit, bind, build_brickwall, build_brickwall_extended, build_matched_pair
from .models import PauliHamiltonian, exact_ground_energy, nnn_heisenberg, xx_hamiltonian, xxz_hamiltonian
from .pcgates import PCGateKind, canonicalize_pc_unitary, decompose, gate_matrix, long_range_gate
from .quantum import PauliString, Statevector
from .vqe import OptimizerConfig, minimize, run_energy_experiment, run_fidelity_experiment

__version__ = "0.1.0"

__all__ = [
    "OptimizerConfig",
    "ParamCircuit",
    "PauliHamiltonian",
    "PauliString",
    "PCGateKind",
    "Statevector",
    "bind",
    "build_brickwall",
    "build_brickwall_extended",
    "build_matched_pair",
    "canonicalize_pc_unitary",
    "decompose",
    "exact_ground_energy",
    "gate_matrix",
    "long_range_gate",
    "minimize",
    "nnn_heisenberg",
    "run_energy_experiment",
    "run_fidelity_experiment",
    "xx_hamiltonian",
    "xxz_hamiltonian",
]
