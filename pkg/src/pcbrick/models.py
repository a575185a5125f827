"""Spin-chain Hamiltonians and exact-diagonalisation ground truth."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .quantum import PauliString, Statevector, pauli_action
from .tolerances import EIGSH_TOL

DENSE_MAX_QUBITS = 10
MAX_QUBITS = 16


@dataclass
class PauliHamiltonian:
    """Real-weighted sum of Pauli strings on ``num_qubits`` qubits."""

    num_qubits: int
    terms: list[PauliString] = field(default_factory=list)

    def __post_init__(self) -> None:
        for term in self.terms:
            if term.max_qubit >= self.num_qubits:
                raise ValueError(f"term {term} exceeds {self.num_qubits} qubits")

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: PauliHamiltonian) -> PauliHamiltonian:
        if other.num_qubits != self.num_qubits:
            raise ValueError("cannot add Hamiltonians on different qubit counts")
        return PauliHamiltonian(self.num_qubits, self.terms + other.terms)

    def to_sparse(self) -> sp.csr_matrix:
        dim = 1 << self.num_qubits
        cols = np.arange(dim)
        out = sp.csr_matrix((dim, dim), dtype=complex)
        for term in self.terms:
            rows, values = pauli_action(term, self.num_qubits)
            out = out + sp.csr_matrix((term.coefficient * values, (rows, cols)), shape=(dim, dim))
        return out

    def to_matrix(self) -> np.ndarray:
        return self.to_sparse().toarray()


def _bond_terms(i: int, j: int, zz: float = 1.0) -> list[PauliString]:
    return [
        PauliString(1.0, ((i, "X"), (j, "X"))),
        PauliString(1.0, ((i, "Y"), (j, "Y"))),
        PauliString(zz, ((i, "Z"), (j, "Z"))),
    ]


def xxz_hamiltonian(num_sites: int, gamma: float) -> PauliHamiltonian:
    """Open chain ``sum_i X_i X_{i+1} + Y_i Y_{i+1} + gamma Z_i Z_{i+1}``."""
    if num_sites < 2:
        raise ValueError(f"XXZ chain needs L >= 2, got {num_sites}")
    terms = [t for i in range(num_sites - 1) for t in _bond_terms(i, i + 1, gamma)]
    return PauliHamiltonian(num_sites, terms)


def xx_hamiltonian(num_sites: int) -> PauliHamiltonian:
    return xxz_hamiltonian(num_sites, 0.0)


def nnn_heisenberg(num_sites: int) -> PauliHamiltonian:
    """Open Heisenberg chain with equal NN and NNN couplings."""
    if num_sites < 3:
        raise ValueError(f"NNN Heisenberg chain needs L >= 3, got {num_sites}")
    pairs = [(i, i + 1) for i in range(num_sites - 1)] + [(i, i + 2) for i in range(num_sites - 2)]
    return PauliHamiltonian(num_sites, [t for i, j in pairs for t in _bond_terms(i, j)])


def magnetization(num_sites: int) -> PauliHamiltonian:
    """``M = sum_i Z_i``."""
    return PauliHamiltonian(num_sites, [PauliString(1.0, ((i, "Z"),)) for i in range(num_sites)])


def sector_indices(num_sites: int, num_particles: int) -> np.ndarray:
    """Ascending basis indices with exactly ``num_particles`` bits set."""
    if not 0 <= num_particles <= num_sites:
        raise ValueError(f"need 0 <= N <= L, got L={num_sites}, N={num_particles}")
    idx = [sum(1 << q for q in occ) for occ in itertools.combinations(range(num_sites), num_particles)]
    return np.array(sorted(idx), dtype=np.int64)


def number_operator(num_sites: int) -> np.ndarray:
    """Diagonal of ``N = sum_i n_i`` in the computational basis."""
    return np.bitwise_count(np.arange(1 << num_sites)).astype(float)


_ANNIHILATE = np.array([[0, 1], [0, 0]], dtype=complex)  # a|1> = |0>
_DENSITY = np.diag([0.0, 1.0]).astype(complex)


def _site_operator(num_sites: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    # little-endian: qubit 0 is the last Kronecker factor
    return reduce(np.kron, [ops.get(q, np.eye(2)) for q in reversed(range(num_sites))])


def hcbh_hamiltonian(num_sites: int, delta: float) -> np.ndarray:
    """Hard-core Bose-Hubbard chain ``sum_i a_i^+ a_{i+1} + h.c. + delta n_i n_{i+1}``.

    Dense ``2**L`` matrix in the occupation basis (occupied site = qubit |1>).
    Hard-core bosons on different sites commute, so no string operators are
    needed.
    """
    if num_sites < 2:
        raise ValueError(f"HCBH chain needs L >= 2, got {num_sites}")
    a, ad, n = _ANNIHILATE, _ANNIHILATE.conj().T, _DENSITY
    h = np.zeros((1 << num_sites,) * 2, dtype=complex)
    for i in range(num_sites - 1):
        h += _site_operator(num_sites, {i: ad, i + 1: a})
        h += _site_operator(num_sites, {i + 1: ad, i: a})
        h += delta * _site_operator(num_sites, {i: n, i + 1: n})
    return h


def xxz_boundary_field(num_sites: int, gamma: float) -> np.ndarray:
    """Diagonal ``2 gamma (n_0 + n_{L-1})`` left over by the open-chain mapping.

    With ``Z = 1 - 2n`` the open XXZ chain equals
    ``2 H_HCBH(2 gamma) + gamma (L - 1) - 4 gamma N + 2 gamma (n_0 + n_{L-1})``;
    the last term is not constant inside a particle-number sector.
    """
    idx = np.arange(1 << num_sites)
    return 2 * gamma * ((idx & 1) + ((idx >> (num_sites - 1)) & 1)).astype(float)


@dataclass
class SpectralResult:
    ground_energy: float
    ground_vector: Statevector | None = None
    sector: int | None = None


def exact_ground_energy(
    hamiltonian: PauliHamiltonian, sector: int | None = None, *, return_vector: bool = True
) -> SpectralResult:
    """Lowest eigenpair, optionally restricted to the weight-``sector`` subspace.

    Dense diagonalisation up to 10 qubits, Lanczos (``eigsh``) above that;
    larger than 16 qubits is refused.
    """
    n = hamiltonian.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"refusing exact diagonalisation of {n} qubits (cap {MAX_QUBITS})")
    matrix = hamiltonian.to_sparse()
    if sector is not None:
        idx = sector_indices(n, sector)
        matrix = matrix[idx][:, idx]
    else:
        idx = None
    if n <= DENSE_MAX_QUBITS or matrix.shape[0] <= 2:
        values, vectors = np.linalg.eigh(matrix.toarray())
        energy, vec = values[0], vectors[:, 0]
    else:
        values, vectors = spla.eigsh(matrix, k=1, which="SA", tol=EIGSH_TOL)
        energy, vec = values[0], vectors[:, 0]
    state = None
    if return_vector:
        full = np.zeros(1 << n, dtype=complex)
        if idx is None:
            full[:] = vec
        else:
            full[idx] = vec
        state = Statevector(full / np.linalg.norm(full), n)
    return SpectralResult(float(energy), state, sector)


def sector_spectrum(matrix: np.ndarray, num_sites: int, num_particles: int) -> np.ndarray:
    idx = sector_indices(num_sites, num_particles)
    return np.linalg.eigvalsh(np.asarray(matrix)[np.ix_(idx, idx)])


def fit_sector_offset(reference: np.ndarray, candidate: np.ndarray) -> tuple[float, float]:
    """Best constant ``c`` with ``reference ~ candidate + c`` and the max deviation."""
    reference, candidate = np.sort(reference), np.sort(candidate)
    offset = float(np.mean(reference - candidate))
    return offset, float(np.abs(reference - candidate - offset).max())
