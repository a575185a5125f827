"""Dense statevector simulation.

Bit convention (little-endian): qubit ``i`` is bit ``i`` of the basis index,
``index = sum_i n_i * 2**i``.  Written as a bit string the state ``|0101>``
therefore has qubits 0 and 2 set and is basis index 5.  Circuit diagrams put
qubit 0 on the top wire.

Gates are applied in place on strided views of the amplitude vector; the full
``2**L x 2**L`` operator is never built.  :func:`embed_operator` builds it
anyway, by brute force, and exists only as an independent oracle for small
``L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gates
from .tolerances import IMAG_ATOL, UNITARY_ATOL


class Statevector:
    """Unit-norm complex amplitude vector on ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes: Iterable[complex], num_qubits: int | None = None):
        data = np.array(amplitudes, dtype=complex).ravel()
        dim = data.size
        if num_qubits is None:
            num_qubits = dim.bit_length() - 1
        if num_qubits < 1 or dim != 1 << num_qubits:
            raise ValueError(
                f"amplitude vector of length {dim} does not describe "
                f"{num_qubits} qubits"
            )
        self.num_qubits = num_qubits
        self.amplitudes = data

    @classmethod
    def zero(cls, num_qubits: int) -> Statevector:
        return cls.basis_state(num_qubits, 0)

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> Statevector:
        if not 0 <= index < 1 << num_qubits:
            raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
        data = np.zeros(1 << num_qubits, dtype=complex)
        data[index] = 1.0
        return cls(data, num_qubits)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> Statevector:
        """Product state with ``bits[i]`` on qubit ``i``."""
        index = sum(int(b) << i for i, b in enumerate(bits))
        return cls.basis_state(len(bits), index)

    def copy(self) -> Statevector:
        return Statevector(self.amplitudes.copy(), self.num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self) -> int:
        return self.amplitudes.size

    def __repr__(self) -> str:
        return f"Statevector(num_qubits={self.num_qubits})"


def _check_qubit(state: Statevector, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.num_qubits} qubits")


def apply_one_qubit_gate(
    state: Statevector, gate: np.ndarray, qubit: int, *, check_unitary: bool = False
) -> Statevector:
    """Apply a 2x2 ``gate`` to ``qubit`` in place and return ``state``."""
    _check_qubit(state, qubit)
    if check_unitary and not gates.is_unitary(gate, UNITARY_ATOL):
        raise ValueError("gate is not unitary")
    view = state.amplitudes.reshape(-1, 2, 1 << qubit)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = gate[0, 0] * lo + gate[0, 1] * hi
    view[:, 1, :] = gate[1, 0] * lo + gate[1, 1] * hi
    return state


def apply_two_qubit_gate(
    state: Statevector,
    gate: np.ndarray,
    qubit_a: int,
    qubit_b: int,
    *,
    check_unitary: bool = False,
) -> Statevector:
    """Apply a 4x4 ``gate`` on the ordered pair ``(qubit_a, qubit_b)`` in place.

    The gate's local basis index is ``2 * bit(qubit_a) + bit(qubit_b)``, so
    ``qubit_a`` plays the role of the first (most significant) wire of the
    matrix regardless of which qubit index is larger.  The qubits need not be
    adjacent.
    """
    _check_qubit(state, qubit_a)
    _check_qubit(state, qubit_b)
    if qubit_a == qubit_b:
        raise ValueError("two-qubit gate needs two distinct qubits")
    if check_unitary and not gates.is_unitary(gate, UNITARY_ATOL):
        raise ValueError("gate is not unitary")
    hi, lo = max(qubit_a, qubit_b), min(qubit_a, qubit_b)
    n = state.num_qubits
    view = state.amplitudes.reshape(1 << (n - 1 - hi), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    g = np.asarray(gate, dtype=complex).reshape(2, 2, 2, 2)
    if qubit_a == hi:
        out = np.einsum("ABab,iajbk->iAjBk", g, view)
    else:
        out = np.einsum("ABab,ibjak->iBjAk", g, view)
    view[...] = out
    return state


def embed_operator(gate: np.ndarray, qubits: Sequence[int], num_qubits: int) -> np.ndarray:
    """Full ``2**L`` matrix of ``gate`` acting on ``qubits`` (test oracle).

    Built entry by entry from the definition: ``<y|G|x>`` is the local matrix
    element when ``x`` and ``y`` agree on every other qubit, else zero.
    """
    k = len(qubits)
    dim = 1 << num_qubits
    idx = np.arange(dim)
    local = np.zeros(dim, dtype=np.int64)
    for pos, q in enumerate(qubits):
        local |= ((idx >> q) & 1) << (k - 1 - pos)
    mask = sum(1 << q for q in qubits)
    rest = idx & ~mask
    same_rest = rest[:, None] == rest[None, :]
    return np.where(same_rest, np.asarray(gate)[local[:, None], local[None, :]], 0)


def inner_product(a: Statevector, b: Statevector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


@dataclass(frozen=True)
class PauliString:
    """Real coefficient times a tensor product of Pauli operators.

    ``operators`` is a tuple of ``(qubit, "X" | "Y" | "Z")`` pairs; qubits not
    listed carry the identity.
    """

    coefficient: float
    operators: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        ops = tuple((int(q), str(p).upper()) for q, p in self.operators)
        qubits = [q for q, _ in ops]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit index in {ops}")
        for q, p in ops:
            if p not in ("X", "Y", "Z"):
                raise ValueError(f"unknown Pauli operator {p!r}")
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
        object.__setattr__(self, "operators", tuple(sorted(ops)))
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def max_qubit(self) -> int:
        return max((q for q, _ in self.operators), default=-1)

    def masks(self) -> tuple[int, int, int]:
        """Bit masks of the qubits carrying X, Y and Z."""
        xm = ym = zm = 0
        for q, p in self.operators:
            if p == "X":
                xm |= 1 << q
            elif p == "Y":
                ym |= 1 << q
            else:
                zm |= 1 << q
        return xm, ym, zm

    def label(self, num_qubits: int) -> str:
        """Pauli label written with qubit 0 rightmost."""
        chars = ["I"] * num_qubits
        for q, p in self.operators:
            chars[num_qubits - 1 - q] = p
        return "".join(chars)

    def __str__(self) -> str:
        body = " ".join(f"{p}{q}" for q, p in self.operators) or "I"
        return f"{self.coefficient:+g} {body}"


def _check_terms(terms: Iterable[PauliString], num_qubits: int) -> list[PauliString]:
    terms = list(terms)
    for term in terms:
        if term.max_qubit >= num_qubits:
            raise ValueError(
                f"term {term} acts on qubit {term.max_qubit} of a "
                f"{num_qubits}-qubit state"
            )
    return terms


def pauli_action(term: PauliString, num_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(rows, values)`` with ``P|x> = values[x] |rows[x]>``."""
    xm, ym, zm = term.masks()
    idx = np.arange(1 << num_qubits)
    parity = np.bitwise_count(idx & (ym | zm)) & 1
    n_y = bin(ym).count("1")
    values = (1j**n_y) * (1 - 2 * parity.astype(float))
    return idx ^ (xm | ym), values


def expectation(state: Statevector, hamiltonian: Iterable[PauliString]) -> float:
    """Exact ``<psi|H|psi>`` for a real-weighted sum of Pauli strings."""
    terms = _check_terms(hamiltonian, state.num_qubits)
    psi = state.amplitudes
    total = 0j
    for term in terms:
        rows, values = pauli_action(term, state.num_qubits)
        total += term.coefficient * np.vdot(psi[rows], values * psi)
    if abs(total.imag) > IMAG_ATOL * max(1.0, abs(total.real)):
        raise ArithmeticError(f"expectation has imaginary part {total.imag:.3e}")
    return float(total.real)


def sample_counts(state: Statevector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Computational-basis measurement histogram, indexed by basis index."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    probs = state.probabilities()
    probs = probs / probs.sum()
    return rng.multinomial(shots, probs)


def estimate_expectation(
    state: Statevector,
    hamiltonian: Iterable[PauliString],
    shots: int,
    rng: np.random.Generator,
) -> float:
    """Shot-based estimate of ``<psi|H|psi>``.

    Every Pauli string is measured on its own with ``shots`` shots: rotate a
    copy of the state into the string's eigenbasis (H for X, S-dagger then H
    for Y), sample, and average the parity eigenvalues.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    terms = _check_terms(hamiltonian, state.num_qubits)
    idx = np.arange(len(state))
    total = 0.0
    for term in terms:
        if not term.operators:
            total += term.coefficient
            continue
        rotated = state.copy()
        support = 0
        for q, p in term.operators:
            support |= 1 << q
            if p == "X":
                apply_one_qubit_gate(rotated, gates.H, q)
            elif p == "Y":
                apply_one_qubit_gate(rotated, gates.SDG, q)
                apply_one_qubit_gate(rotated, gates.H, q)
        counts = sample_counts(rotated, shots, rng)
        eigen = 1.0 - 2.0 * (np.bitwise_count(idx & support) & 1)
        total += term.coefficient * float(counts @ eigen) / shots
    return total
