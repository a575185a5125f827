"""Z2-symmetric and particle-conserving two-qubit gates.

A symmetric gate is assembled as ``splitting . charge-controlled . fusion``:
a CNOT (the fusion map) moves two qubits into a basis where the second wire
carries the Z2 charge and the first wire the degenerate state within that
charge sector; there the gate is block diagonal and is realised as a pair of
operations on the first wire controlled by the charge; a second CNOT (the
splitting map, equal to the fusion map) returns to the product basis.

All 4x4 matrices use the wire-ordered convention of :mod:`pcbrick.gates`:
local index ``2 * bit(first wire) + bit(second wire)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gates
from .quantum import Statevector, apply_one_qubit_gate, apply_two_qubit_gate, embed_operator
from .tolerances import CANONICAL_ATOL, DEGENERATE_ATOL, PC_PATTERN_ATOL, UNITARY_ATOL

NUMBER_OPERATOR_2Q = np.diag([0.0, 1.0, 1.0, 2.0]).astype(complex)
PARITY_2Q = np.kron(gates.Z, gates.Z)


class PCGateKind(str, enum.Enum):
    """Particle-conserving gate families and their parameter counts."""

    A = "A"
    B = "B"
    G = "G"

    @property
    def arity(self) -> int:
        return 4 if self is PCGateKind.G else 2

    @classmethod
    def parse(cls, value: str | PCGateKind) -> PCGateKind:
        if isinstance(value, PCGateKind):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown gate kind {value!r}; expected one of A, B, G") from None


class Op(str, enum.Enum):
    """Elementary operations a decomposition may emit."""

    CNOT = "CNOT"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    PHASE = "PHASE"
    X = "X"
    GENERIC_1Q = "GENERIC_1Q"  # params (alpha, beta, gamma, delta) of gates.u_zyz


_OP_ARITY = {Op.CNOT: 2}
_OP_NPARAMS = {Op.CNOT: 0, Op.X: 0, Op.GENERIC_1Q: 4}


@dataclass(frozen=True)
class ElementaryGate:
    op: Op
    wires: tuple[int, ...]
    params: tuple[float, ...] = ()

    def matrix(self) -> np.ndarray:
        op, p = self.op, self.params
        if op is Op.CNOT:
            return gates.CNOT
        if op is Op.X:
            return gates.X
        if op is Op.RX:
            return gates.rx(p[0])
        if op is Op.RY:
            return gates.ry(p[0])
        if op is Op.RZ:
            return gates.rz(p[0])
        if op is Op.PHASE:
            return gates.phase(p[0])
        return gates.u_zyz(*p)


@dataclass
class ElementaryGateSequence:
    """Time-ordered list of elementary gates on ``width`` wires."""

    width: int
    gates: list[ElementaryGate] = field(default_factory=list)

    def __post_init__(self) -> None:
        for g in self.gates:
            self._validate(g)

    def _validate(self, g: ElementaryGate) -> None:
        expected = _OP_ARITY.get(g.op, 1)
        if len(g.wires) != expected:
            raise ValueError(f"{g.op.value} acts on {expected} wire(s), got {g.wires}")
        if len(set(g.wires)) != len(g.wires):
            raise ValueError(f"repeated wire in {g}")
        if any(not 0 <= w < self.width for w in g.wires):
            raise ValueError(f"wire out of range for width {self.width}: {g}")
        if len(g.params) != _OP_NPARAMS.get(g.op, 1):
            raise ValueError(f"wrong number of parameters for {g.op.value}: {g.params}")

    def append(self, op: Op, wires: Sequence[int], *params: float) -> None:
        g = ElementaryGate(Op(op), tuple(int(w) for w in wires), tuple(float(x) for x in params))
        self._validate(g)
        self.gates.append(g)

    def extend(self, other: ElementaryGateSequence) -> None:
        for g in other.gates:
            self._validate(g)
            self.gates.append(g)

    def remap(self, wires: Sequence[int], width: int) -> ElementaryGateSequence:
        """Relabel local wire ``k`` as ``wires[k]`` inside a ``width``-wire register."""
        return ElementaryGateSequence(
            width, [ElementaryGate(g.op, tuple(wires[w] for w in g.wires), g.params) for g in self.gates]
        )

    @property
    def cnot_count(self) -> int:
        return sum(g.op is Op.CNOT for g in self.gates)

    def unitary(self) -> np.ndarray:
        """Brute-force product of embedded gate matrices (small widths only)."""
        if self.width > 10:
            raise ValueError("refusing to build a dense unitary wider than 10 wires")
        total = np.eye(1 << self.width, dtype=complex)
        for g in self.gates:
            total = embed_operator(g.matrix(), g.wires, self.width) @ total
        return total

    def local_unitary(self) -> np.ndarray:
        """Unitary in the wire-ordered convention (wire 0 most significant).

        This is the convention of the closed-form gate matrices; it differs
        from :meth:`unitary`, which follows the little-endian register order.
        """
        n = self.width
        perm = np.array([_reverse_bits(i, n) for i in range(1 << n)])
        return self.unitary()[np.ix_(perm, perm)]

    def apply(self, state: Statevector) -> Statevector:
        for g in self.gates:
            if g.op is Op.CNOT:
                apply_two_qubit_gate(state, gates.CNOT, *g.wires)
            else:
                apply_one_qubit_gate(state, g.matrix(), g.wires[0])
        return state

    def __len__(self) -> int:
        return len(self.gates)


def _reverse_bits(value: int, width: int) -> int:
    return int(format(value, f"0{width}b")[::-1], 2)


# ---------------------------------------------------------------------------
# fusion / charge-controlled / splitting pieces


def fusion_gate() -> np.ndarray:
    """CNOT taking the product basis to the charge-degeneracy basis.

    ``|q0 q1> -> |q0, q0 xor q1>``: afterwards the second wire holds the Z2
    charge.  It is an involution, so it is also the splitting map.
    """
    return gates.CNOT.copy()


splitting_gate = fusion_gate


def _check_block(q: np.ndarray, name: str) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    if q.shape != (2, 2):
        raise ValueError(f"{name} must be a 2x2 matrix, got shape {q.shape}")
    if not gates.is_unitary(q, UNITARY_ATOL):
        raise ValueError(f"{name} is not unitary")
    return q


def charge_controlled_op(q0: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """``Q0 (x) |0><0| + Q1 (x) |1><1|`` with the charge on the second wire."""
    q0 = _check_block(q0, "Q0")
    q1 = _check_block(q1, "Q1")
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(q0, p0) + np.kron(q1, p1)


def z2_generic_gate(q0: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """Generic Z2-symmetric gate ``F . Q . F``.

    Q1 ends up in the central block (rows/cols 1, 2) and Q0 on the corners
    (rows/cols 0, 3).
    """
    f = fusion_gate()
    return f @ charge_controlled_op(q0, q1) @ f


# ---------------------------------------------------------------------------
# closed forms


def v_matrix(theta: float, phi: float) -> np.ndarray:
    """Charge-1 block of gate A."""
    s, c = np.sin(theta), np.cos(theta)
    return np.array(
        [[s, np.exp(1j * phi) * c], [np.exp(-1j * phi) * c, -s]], dtype=complex
    )


def _gate_a(theta: float, phi: float) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[1:3, 1:3] = v_matrix(theta, phi)
    return out


def _gate_b(theta: float, phi: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    out = np.eye(4, dtype=complex)
    out[1:3, 1:3] = [[c, -1j * s], [-1j * s, c]]
    out[3, 3] = np.exp(1j * phi)
    return out


def _gate_g(alpha: float, theta: float, phi1: float, phi2: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    plus = np.exp(0.5j * (phi1 + phi2))
    minus = np.exp(0.5j * (phi1 - phi2))
    out = np.eye(4, dtype=complex)
    out[1:3, 1:3] = np.exp(1j * alpha) * np.array(
        [[plus * c, minus * s], [-minus.conjugate() * s, plus.conjugate() * c]]
    )
    return out


_CLOSED_FORMS = {PCGateKind.A: "_gate_a", PCGateKind.B: "_gate_b", PCGateKind.G: "_gate_g"}


def _params(kind: PCGateKind, params: Sequence[float]) -> tuple[float, ...]:
    values = tuple(float(p) for p in np.ravel(params))
    if len(values) != kind.arity:
        raise ValueError(
            f"gate {kind.value} takes {kind.arity} parameters, got {len(values)}"
        )
    return values


def gate_matrix(kind: PCGateKind | str, params: Sequence[float]) -> np.ndarray:
    """Closed-form 4x4 matrix of gate A(theta, phi), B(theta, phi) or
    G(alpha, theta, phi1, phi2)."""
    kind = PCGateKind.parse(kind)
    # looked up by name so a patched module attribute is honoured
    return globals()[_CLOSED_FORMS[kind]](*_params(kind, params))


# ---------------------------------------------------------------------------
# decompositions


def _v_prep_angles(theta: float, phi: float) -> tuple[float, float]:
    # U = Ry(theta) Rz(phi) satisfies U^dag X U = V(theta, phi); in circuit
    # order that is Rz(phi) first, then Ry(theta).
    return phi, theta


def _decompose_a(theta: float, phi: float) -> ElementaryGateSequence:
    rz_angle, ry_angle = _v_prep_angles(theta, phi)
    seq = ElementaryGateSequence(2)
    seq.append(Op.CNOT, (0, 1))
    seq.append(Op.RZ, (0,), rz_angle)
    seq.append(Op.RY, (0,), ry_angle)
    seq.append(Op.CNOT, (1, 0))
    seq.append(Op.RY, (0,), -ry_angle)
    seq.append(Op.RZ, (0,), -rz_angle)
    seq.append(Op.CNOT, (0, 1))
    return seq


def _decompose_g_compact(alpha: float, theta: float, phi1: float, phi2: float) -> ElementaryGateSequence:
    # G = e^{i alpha/2} Dz(pi/2 - phi1) . N(-theta/2, -theta/2, alpha/2) . Dz(-pi/2 - phi2)
    # with Dz(x) = Rz(x/2) (x) Rz(-x/2) and N(a, b, c) = exp(-i(aXX + bYY + cZZ))
    # realised by the three-CNOT canonical-gate circuit (which carries e^{i pi/4}).
    q = np.pi / 4
    seq = ElementaryGateSequence(2)
    seq.append(Op.RZ, (0,), -q - phi2 / 2)
    seq.append(Op.RZ, (1,), 3 * q + phi2 / 2)
    seq.append(Op.CNOT, (1, 0))
    seq.append(Op.RZ, (0,), alpha - 2 * q)
    seq.append(Op.RY, (1,), -theta - 2 * q)
    seq.append(Op.CNOT, (0, 1))
    seq.append(Op.RY, (1,), theta + 2 * q)
    seq.append(Op.CNOT, (1, 0))
    seq.append(Op.RZ, (0,), q - phi1 / 2 - alpha)
    seq.append(Op.PHASE, (0,), alpha - 2 * q)
    seq.append(Op.RZ, (1,), phi1 / 2 - q)
    return seq


def b_as_g_params(theta: float, phi: float) -> tuple[float, float, float, float]:
    """G parameters with ``B(theta, phi) = (P(phi/2) (x) P(phi/2)) G(...)``."""
    return (-phi / 2, theta, -np.pi / 2, np.pi / 2)


def _decompose_b_compact(theta: float, phi: float) -> ElementaryGateSequence:
    seq = ElementaryGateSequence(2)
    seq.append(Op.PHASE, (0,), phi / 2)
    seq.append(Op.PHASE, (1,), phi / 2)
    seq.extend(_decompose_g_compact(*b_as_g_params(theta, phi)))
    return seq


def controlled_zyz(
    seq: ElementaryGateSequence,
    control: int,
    target: int,
    alpha: float,
    beta: float,
    gamma: float,
    delta: float,
) -> None:
    """Append controlled-``e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)``.

    Uses ``U = e^{i alpha} A X B X C`` with ``ABC = I``: A = Rz(beta)Ry(gamma/2),
    B = Ry(-gamma/2)Rz(-(delta+beta)/2), C = Rz((delta-beta)/2), and a phase
    gate P(alpha) on the control.
    """
    seq.append(Op.RZ, (target,), (delta - beta) / 2)
    seq.append(Op.CNOT, (control, target))
    seq.append(Op.RZ, (target,), -(delta + beta) / 2)
    seq.append(Op.RY, (target,), -gamma / 2)
    seq.append(Op.CNOT, (control, target))
    seq.append(Op.RY, (target,), gamma / 2)
    seq.append(Op.RZ, (target,), beta)
    if alpha:
        seq.append(Op.PHASE, (control,), alpha)


def _decompose_b_controlled(theta: float, phi: float) -> ElementaryGateSequence:
    seq = ElementaryGateSequence(2)
    seq.append(Op.PHASE, (0,), phi / 2)
    seq.append(Op.PHASE, (1,), phi / 2)
    seq.append(Op.CNOT, (0, 1))
    seq.append(Op.PHASE, (1,), -phi / 2)
    # Rx(2 theta) = Rz(-pi/2) Ry(2 theta) Rz(pi/2)
    controlled_zyz(seq, 1, 0, 0.0, -np.pi / 2, 2 * theta, np.pi / 2)
    seq.append(Op.CNOT, (0, 1))
    return seq


def _decompose_g_controlled(alpha: float, theta: float, phi1: float, phi2: float) -> ElementaryGateSequence:
    # charge-1 block of G is e^{i alpha} Rz(-phi1) Ry(-2 theta) Rz(-phi2)
    seq = ElementaryGateSequence(2)
    seq.append(Op.CNOT, (0, 1))
    controlled_zyz(seq, 1, 0, alpha, -phi1, -2 * theta, -phi2)
    seq.append(Op.CNOT, (0, 1))
    return seq


_DECOMPOSERS = {
    ("compact", PCGateKind.A): _decompose_a,
    ("compact", PCGateKind.B): _decompose_b_compact,
    ("compact", PCGateKind.G): _decompose_g_compact,
    ("controlled", PCGateKind.A): _decompose_a,
    ("controlled", PCGateKind.B): _decompose_b_controlled,
    ("controlled", PCGateKind.G): _decompose_g_controlled,
}


def decompose(
    kind: PCGateKind | str, params: Sequence[float], *, style: str = "compact"
) -> ElementaryGateSequence:
    """Two-wire CNOT + single-qubit-rotation circuit for a gate.

    ``style="compact"`` uses three CNOTs for every kind.  ``style="controlled"``
    spells out fusion, charge-controlled blocks and splitting literally
    (3 CNOTs for A, 4 for B and G).  Either way the reconstructed matrix
    equals :func:`gate_matrix` exactly, global phase included.
    """
    kind = PCGateKind.parse(kind)
    try:
        builder = _DECOMPOSERS[(style, kind)]
    except KeyError:
        raise ValueError(f"unknown decomposition style {style!r}") from None
    return builder(*_params(kind, params))


def long_range_gate(
    kind: PCGateKind | str,
    params: Sequence[float],
    wire_i: int,
    wire_j: int,
    width: int,
    *,
    style: str = "compact",
) -> ElementaryGateSequence:
    """The two-qubit gate on non-adjacent wires ``wire_i < wire_j`` without swaps.

    The CNOT fusion map works across any distance, so the two-wire circuit is
    simply placed on ``(wire_i, wire_j)``; wires in between are untouched.
    """
    if not 0 <= wire_i < wire_j < width:
        raise ValueError(f"need 0 <= wire_i < wire_j < width, got {wire_i}, {wire_j}, {width}")
    return decompose(kind, params, style=style).remap((wire_i, wire_j), width)


def swap_sequence(seq: ElementaryGateSequence, a: int, b: int) -> None:
    seq.append(Op.CNOT, (a, b))
    seq.append(Op.CNOT, (b, a))
    seq.append(Op.CNOT, (a, b))


def swap_network_gate(
    kind: PCGateKind | str, params: Sequence[float], wire_i: int, wire_j: int, width: int
) -> ElementaryGateSequence:
    """Naive long-range gate: swap ``wire_i`` next to ``wire_j``, apply, swap back."""
    if not 0 <= wire_i < wire_j < width:
        raise ValueError(f"need 0 <= wire_i < wire_j < width, got {wire_i}, {wire_j}, {width}")
    seq = ElementaryGateSequence(width)
    for w in range(wire_i, wire_j - 1):
        swap_sequence(seq, w, w + 1)
    seq.extend(decompose(kind, params).remap((wire_j - 1, wire_j), width))
    for w in reversed(range(wire_i, wire_j - 1)):
        swap_sequence(seq, w, w + 1)
    return seq


# ---------------------------------------------------------------------------
# canonical form of an arbitrary particle-conserving unitary


def phase_layer(omega1: float, omega2: float) -> np.ndarray:
    """``diag(e^{i w1/2}, e^{i w2/2})`` on both qubits.

    This is the inverse of the normalising layer that strips the |00> and |11>
    phases; ``phase_layer(w1, w2) @ G`` has corners ``e^{i w1}``, ``e^{i w2}``.
    """
    single = np.diag([np.exp(0.5j * omega1), np.exp(0.5j * omega2)])
    return np.kron(single, single)


def _wrap(angle: float) -> float:
    """Map into (-pi, pi]."""
    return float(np.pi - (np.pi - angle) % (2 * np.pi))


def is_particle_conserving(u: np.ndarray, atol: float = PC_PATTERN_ATOL) -> bool:
    u = np.asarray(u)
    mask = np.ones((4, 4), dtype=bool)
    mask[0, 0] = mask[3, 3] = False
    mask[1:3, 1:3] = False
    return u.shape == (4, 4) and bool(np.all(np.abs(u[mask]) <= atol))


def canonicalize_pc_unitary(u: np.ndarray) -> tuple[float, float, float, float, float, float]:
    """Split a particle-conserving unitary into a phase layer and a G gate.

    Returns ``(omega1, omega2, alpha, theta, phi1, phi2)`` with
    ``u == phase_layer(omega1, omega2) @ gate_matrix("G", (alpha, theta, phi1, phi2))``.
    Gauge: ``theta`` in [0, pi/2], all phases in (-pi, pi]; at ``cos(theta) = 0``
    the sum phase ``(phi1 + phi2)/2`` is set to 0, at ``sin(theta) = 0`` the
    difference phase ``(phi1 - phi2)/2`` is.
    """
    u = np.asarray(u, dtype=complex)
    if not is_particle_conserving(u):
        raise ValueError("matrix is not particle conserving")
    if abs(abs(u[0, 0]) - 1) > CANONICAL_ATOL or abs(abs(u[3, 3]) - 1) > CANONICAL_ATOL:
        raise ValueError("|00> and |11> entries must be pure phases")
    if not gates.is_unitary(u[1:3, 1:3], UNITARY_ATOL):
        raise ValueError("central block is not unitary")

    omega1 = float(np.angle(u[0, 0]))
    omega2 = float(np.angle(u[3, 3]))
    center = u[1:3, 1:3] * np.exp(-0.5j * (omega1 + omega2))
    alpha = float(np.angle(np.linalg.det(center))) / 2
    w = center * np.exp(-1j * alpha)

    c, s = abs(w[0, 0]), abs(w[0, 1])
    theta = float(np.arctan2(s, c))
    half_sum = float(np.angle(w[0, 0])) if c > DEGENERATE_ATOL else 0.0
    half_diff = float(np.angle(w[0, 1])) if s > DEGENERATE_ATOL else 0.0

    phis = []
    for raw in (half_sum + half_diff, half_sum - half_diff):
        wrapped = _wrap(raw)
        # a 2 pi shift of phi1 or phi2 negates the whole charge-1 block
        if round((raw - wrapped) / (2 * np.pi)) % 2:
            alpha += np.pi
        phis.append(wrapped)
    return omega1, omega2, _wrap(alpha), theta, phis[0], phis[1]


def reconstruct_pc_unitary(params: Iterable[float]) -> np.ndarray:
    omega1, omega2, alpha, theta, phi1, phi2 = params
    return phase_layer(omega1, omega2) @ gate_matrix(PCGateKind.G, (alpha, theta, phi1, phi2))
