"""Oracle suite for gates and circuits, as run by ``pcbrick gates verify``.

Every check compares two independent constructions and reports the largest
residual seen.  Functions are looked up through their modules at call time,
so a patched gate definition is caught.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import circuits, gates, pcgates
from .models import sector_indices
from .tolerances import MATRIX_ATOL

ROUNDTRIP_ATOL = 1e-9

_PARAM_RANGES = {
    pcgates.PCGateKind.A: [(-np.pi, np.pi)] * 2,
    pcgates.PCGateKind.B: [(-np.pi, np.pi)] * 2,
    pcgates.PCGateKind.G: [(-np.pi, np.pi)] * 4,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tolerance: float
    detail: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "max_residual", float(self.max_residual))

    @property
    def passed(self) -> bool:
        return math.isfinite(self.max_residual) and self.max_residual < self.tolerance


def random_gate_params(kind: pcgates.PCGateKind, rng: np.random.Generator) -> np.ndarray:
    return np.array([rng.uniform(lo, hi) for lo, hi in _PARAM_RANGES[kind]])


def random_pc_unitary(rng: np.random.Generator) -> np.ndarray:
    """Random phases on |00>, |11> and a Haar-random 2x2 central block."""
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0], u[3, 3] = np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
    u[1:3, 1:3] = q
    return u


def check_decompositions(rng: np.random.Generator, draws: int) -> list[CheckResult]:
    out = []
    for style in ("compact", "controlled"):
        for kind in pcgates.PCGateKind:
            worst, cnots = 0.0, set()
            for _ in range(draws):
                p = random_gate_params(kind, rng)
                seq = pcgates.decompose(kind, p, style=style)
                cnots.add(seq.cnot_count)
                worst = max(worst, np.abs(seq.local_unitary() - pcgates.gate_matrix(kind, p)).max())
            counts = "/".join(map(str, sorted(cnots)))
            out.append(CheckResult(f"decompose[{style}] {kind.value}", worst, MATRIX_ATOL, f"CNOTs={counts}"))
    return out


def check_gate_properties(rng: np.random.Generator, draws: int) -> list[CheckResult]:
    out = []
    for kind in pcgates.PCGateKind:
        comm = unit = 0.0
        for _ in range(draws):
            u = pcgates.gate_matrix(kind, random_gate_params(kind, rng))
            n = pcgates.NUMBER_OPERATOR_2Q
            comm = max(comm, np.abs(u @ n - n @ u).max())
            unit = max(unit, gates.unitarity_residual(u))
        out.append(CheckResult(f"number conservation {kind.value}", comm, MATRIX_ATOL))
        out.append(CheckResult(f"unitarity {kind.value}", unit, MATRIX_ATOL))
    return out


def check_long_range(rng: np.random.Generator, draws: int) -> list[CheckResult]:
    out = []
    for kind in pcgates.PCGateKind:
        worst, counts = 0.0, ""
        for _ in range(draws):
            p = random_gate_params(kind, rng)
            direct = pcgates.long_range_gate(kind, p, 0, 2, 3)
            network = pcgates.swap_network_gate(kind, p, 0, 2, 3)
            worst = max(worst, np.abs(direct.unitary() - network.unitary()).max())
            counts = f"CNOTs direct={direct.cnot_count} swap-network={network.cnot_count}"
        out.append(CheckResult(f"long-range {kind.value}^(1,3) vs swap network", worst, MATRIX_ATOL, counts))
    return out


def check_canonical_form(rng: np.random.Generator, draws: int) -> list[CheckResult]:
    worst = 0.0
    for _ in range(draws):
        u = random_pc_unitary(rng)
        worst = max(worst, np.abs(pcgates.reconstruct_pc_unitary(pcgates.canonicalize_pc_unitary(u)) - u).max())
    return [CheckResult("canonicalize round trip", worst, ROUNDTRIP_ATOL, f"{draws} unitaries")]


def check_circuits(rng: np.random.Generator) -> list[CheckResult]:
    out = []
    leak = agree = 0.0
    for num_sites, num_particles in ((4, 2), (6, 3), (8, 3), (8, 4)):
        inside = np.zeros(1 << num_sites, dtype=bool)
        inside[sector_indices(num_sites, num_particles)] = True
        for kind in pcgates.PCGateKind:
            for circ in (
                circuits.build_brickwall(num_sites, num_particles, kind, 2),
                circuits.build_brickwall_extended(num_sites, num_particles, kind, 3),
            ):
                theta = rng.uniform(-np.pi, np.pi, circ.num_free_params)
                dense = circuits.bind(circ, theta)
                leak = max(leak, float(np.sum(np.abs(dense.amplitudes[~inside]) ** 2)))
                seq = circuits.bind(circ, theta, method="sequence")
                agree = max(agree, np.abs(dense.amplitudes - seq.amplitudes).max())
    out.append(CheckResult("circuit sector leakage", leak, MATRIX_ATOL, "(L,N) in (4,2),(6,3),(8,3),(8,4)"))
    out.append(CheckResult("circuit dense vs gate sequence", agree, MATRIX_ATOL))
    return out


def run_all(seed: int = 0, draws: int = 100, canonical_draws: int = 500) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        *check_decompositions(rng, draws),
        *check_gate_properties(rng, draws),
        *check_long_range(rng, draws),
        *check_canonical_form(rng, canonical_draws),
        *check_circuits(rng),
    ]


def cnot_counts(style: str = "compact") -> dict[str, int]:
    zero = {k: np.zeros(k.arity) for k in pcgates.PCGateKind}
    return {k.value: pcgates.decompose(k, zero[k], style=style).cnot_count for k in pcgates.PCGateKind}


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'max residual':>12}  {'tol':>7}  result"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {r.max_residual:12.3e}  {r.tolerance:7.0e}  {status}  {r.detail}".rstrip())
    return "\n".join(lines)
