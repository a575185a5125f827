"""Brick-wall particle-conserving parameterised circuits.

A circuit starts from ``|0...0>``, sets ``N`` qubits with X gates and then
applies layers of particle-conserving two-qubit gates.  Plain circuits use
nearest-neighbour (NN) layers only; extended circuits alternate NN layers with
next-nearest-neighbour (NNN) layers.

Parameters live in one flat vector.  Placement ``p`` of a gate with arity ``k``
owns slots ``k*p .. k*p + k - 1``.  The first ``num_free_params`` slots are
free; any remaining slots are bound to ``fixed_value``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .pcgates import PCGateKind, decompose, gate_matrix
from .quantum import Statevector, apply_one_qubit_gate, apply_two_qubit_gate
from . import gates


def fock_dimension(num_sites: int, num_particles: int) -> int:
    if num_sites < 0 or not 0 <= num_particles <= num_sites:
        raise ValueError(f"need 0 <= N <= L, got L={num_sites}, N={num_particles}")
    return math.comb(num_sites, num_particles)


def layer_count(num_sites: int, num_particles: int) -> int:
    """Layers needed for ``d_{N,L}`` NN gates: ``ceil(d / (L - 1))``."""
    if num_sites < 2:
        raise ValueError(f"brick-wall circuits need L >= 2, got {num_sites}")
    return -(-fock_dimension(num_sites, num_particles) // (num_sites - 1))


def initial_occupation(num_sites: int, num_particles: int) -> list[int]:
    """Occupation bits of the reference state, particles spread evenly.

    Particle ``k`` sits on site ``floor((k + 1/2) * L / N)``.
    """
    fock_dimension(num_sites, num_particles)
    bits = [0] * num_sites
    for k in range(num_particles):
        bits[math.floor((k + 0.5) * num_sites / num_particles)] = 1
    assert sum(bits) == num_particles
    return bits


@dataclass(frozen=True)
class GatePlacement:
    kind: PCGateKind
    wires: tuple[int, int]
    slots: tuple[int, ...]


@dataclass
class ParamCircuit:
    num_qubits: int
    num_particles: int
    kind: PCGateKind
    layers: int
    extended: bool
    placements: list[GatePlacement] = field(default_factory=list)
    num_free_params: int = 0
    fixed_value: float = 0.0

    @property
    def num_slots(self) -> int:
        return sum(len(p.slots) for p in self.placements)

    @property
    def num_fixed_params(self) -> int:
        return self.num_slots - self.num_free_params

    def full_parameters(self, theta: Sequence[float]) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.num_free_params:
            raise ValueError(
                f"circuit has {self.num_free_params} free parameters, got {theta.size}"
            )
        full = np.full(self.num_slots, self.fixed_value, dtype=float)
        full[: theta.size] = theta
        return full

    def reference_state(self) -> Statevector:
        state = Statevector.zero(self.num_qubits)
        for q, bit in enumerate(initial_occupation(self.num_qubits, self.num_particles)):
            if bit:
                apply_one_qubit_gate(state, gates.X, q)
        return state

    def to_dict(self) -> dict[str, Any]:
        return {
            "L": self.num_qubits,
            "N": self.num_particles,
            "kind": self.kind.value,
            "layers": self.layers,
            "extended": self.extended,
            "placements": [
                {"kind": p.kind.value, "wires": list(p.wires), "slots": list(p.slots)}
                for p in self.placements
            ],
            "free_params": self.num_free_params,
            "fixed_value": self.fixed_value,
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ParamCircuit:
        circuit = cls(
            num_qubits=int(data["L"]),
            num_particles=int(data["N"]),
            kind=PCGateKind.parse(data["kind"]),
            layers=int(data["layers"]),
            extended=bool(data["extended"]),
            placements=[
                GatePlacement(PCGateKind.parse(p["kind"]), tuple(p["wires"]), tuple(p["slots"]))
                for p in data["placements"]
            ],
            num_free_params=int(data["free_params"]),
            fixed_value=float(data["fixed_value"]),
        )
        _validate(circuit)
        return circuit


def nn_layer(num_sites: int) -> list[tuple[int, int]]:
    """Even-start half-layer followed by the odd-start half-layer."""
    return [(i, i + 1) for i in range(0, num_sites - 1, 2)] + [
        (i, i + 1) for i in range(1, num_sites - 1, 2)
    ]


def nnn_layer(num_sites: int) -> list[tuple[int, int]]:
    """Three sub-layers of ``(i, i+2)`` gates, grouped by ``i mod 3``."""
    return [(i, i + 2) for r in range(3) for i in range(r, num_sites - 2, 3)]


def _assemble(
    num_sites: int,
    num_particles: int,
    kind: PCGateKind | str,
    layers: int,
    extended: bool,
    free_params: int | None,
    trim: bool,
    fixed_value: float,
) -> ParamCircuit:
    kind = PCGateKind.parse(kind)
    fock_dimension(num_sites, num_particles)
    if layers < 1:
        raise ValueError(f"need at least one layer, got {layers}")
    pairs: list[tuple[int, int]] = []
    for layer in range(layers):
        pairs += nnn_layer(num_sites) if extended and layer % 2 else nn_layer(num_sites)
    k = kind.arity
    placements = [
        GatePlacement(kind, pair, tuple(range(k * p, k * p + k))) for p, pair in enumerate(pairs)
    ]
    total = k * len(placements)
    if free_params is None:
        free_params = k * min(len(placements), fock_dimension(num_sites, num_particles)) if trim else total
    if not 0 <= free_params <= total:
        raise ValueError(f"free parameter budget {free_params} outside [0, {total}]")
    circuit = ParamCircuit(
        num_sites, num_particles, kind, layers, extended, placements, free_params, float(fixed_value)
    )
    _validate(circuit)
    return circuit


def _validate(circuit: ParamCircuit) -> None:
    seen = 0
    for p in circuit.placements:
        i, j = p.wires
        if not (0 <= i < j < circuit.num_qubits and j - i in (1, 2)):
            raise ValueError(f"invalid placement wires {p.wires}")
        if len(p.slots) != p.kind.arity:
            raise ValueError(f"placement {p} has wrong number of slots")
        seen += len(p.slots)
    if not 0 <= circuit.num_free_params <= seen:
        raise ValueError("free parameter count exceeds slot count")


def build_brickwall(
    num_sites: int,
    num_particles: int,
    kind: PCGateKind | str,
    layers: int | None = None,
    *,
    free_params: int | None = None,
    trim: bool = False,
    fixed_value: float = 0.0,
) -> ParamCircuit:
    """NN brick-wall circuit with ``layers * (L - 1)`` gates.

    ``layers`` defaults to :func:`layer_count`.  All slots are free unless
    ``trim`` caps the budget at ``arity * d_{N,L}`` or ``free_params`` sets it
    explicitly; trailing slots are then bound to ``fixed_value``.
    """
    if num_sites < 2:
        raise ValueError(f"brick-wall circuits need L >= 2, got {num_sites}")
    if layers is None:
        layers = layer_count(num_sites, num_particles)
    return _assemble(num_sites, num_particles, kind, layers, False, free_params, trim, fixed_value)


def build_brickwall_extended(
    num_sites: int,
    num_particles: int,
    kind: PCGateKind | str,
    layers: int,
    *,
    free_params: int | None = None,
    fixed_value: float = 0.0,
) -> ParamCircuit:
    """Alternating NN / NNN brick-wall circuit (first layer NN)."""
    if num_sites < 3:
        raise ValueError(f"extended circuits need L >= 3, got {num_sites}")
    return _assemble(num_sites, num_particles, kind, layers, True, free_params, False, fixed_value)


def bind(circuit: ParamCircuit, theta: Sequence[float], *, method: str = "dense") -> Statevector:
    """Prepare ``U(theta)|psi_0>``.

    ``method="dense"`` applies each gate's closed-form 4x4 matrix;
    ``method="sequence"`` applies its elementary CNOT + rotation circuit.
    """
    full = circuit.full_parameters(theta)
    state = circuit.reference_state()
    if method == "dense":
        for p in circuit.placements:
            apply_two_qubit_gate(state, gate_matrix(p.kind, full[list(p.slots)]), *p.wires)
    elif method == "sequence":
        for p in circuit.placements:
            seq = decompose(p.kind, full[list(p.slots)]).remap(p.wires, circuit.num_qubits)
            seq.apply(state)
    else:
        raise ValueError(f"unknown bind method {method!r}")
    return state


def build_matched_pair(
    num_sites: int, num_particles: int, kind: PCGateKind | str, layers: int
) -> tuple[ParamCircuit, ParamCircuit]:
    """Plain and extended circuits with equal layer and free-parameter counts.

    An NN layer holds ``L - 1`` gates and an NNN layer ``L - 2``, so the plain
    circuit always has at least as many slots; its surplus trailing slots are
    fixed so both circuits expose exactly the extended circuit's slot count.
    """
    extended = build_brickwall_extended(num_sites, num_particles, kind, layers)
    plain = build_brickwall(num_sites, num_particles, kind, layers, free_params=extended.num_slots)
    return plain, extended
