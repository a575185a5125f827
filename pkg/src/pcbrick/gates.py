"""Standard one- and two-qubit gate matrices.

Two-qubit matrices act on the ordered wire pair ``(a, b)`` with local basis
index ``2 * bit(a) + bit(b)``; i.e. the first wire is the most significant
one, which is the usual textbook reading of ``|00>, |01>, |10>, |11>``.
"""

from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = S.conj().T

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

# control = first wire, target = second wire
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


def phase(phi: float) -> np.ndarray:
    """Phase gate ``diag(1, e^{i phi})``."""
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


def u_zyz(alpha: float, beta: float, gamma: float, delta: float) -> np.ndarray:
    """General single-qubit unitary ``e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)``."""
    return np.exp(1j * alpha) * (rz(beta) @ ry(gamma) @ rz(delta))


def is_unitary(matrix: np.ndarray, atol: float = 1e-10) -> bool:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.allclose(matrix.conj().T @ matrix, np.eye(len(matrix)), atol=atol))


def unitarity_residual(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix)
    return float(np.abs(matrix.conj().T @ matrix - np.eye(len(matrix))).max())
