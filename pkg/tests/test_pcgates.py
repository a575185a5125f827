from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcbrick import gates, pcgates, verify
from pcbrick.pcgates import PCGateKind
from pcbrick.quantum import Statevector

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
RNG_SEEDS = st.integers(0, 2**32 - 1)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    return verify.random_pc_unitary(rng)[1:3, 1:3]


def local_basis(index: int) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[index] = 1
    return v


class TestFusion:
    def test_involution(self):
        f = pcgates.fusion_gate()
        np.testing.assert_array_equal(f @ f, np.eye(4))
        np.testing.assert_array_equal(pcgates.splitting_gate(), f)

    def test_maps_11_to_charge_zero(self):
        # |11> -> |1, charge 0> = local index 2
        np.testing.assert_array_equal(pcgates.fusion_gate() @ local_basis(3), local_basis(2))

    def test_control_clear(self):
        np.testing.assert_array_equal(pcgates.fusion_gate() @ local_basis(1), local_basis(1))


class TestChargeControlled:
    def test_identity_blocks(self):
        np.testing.assert_array_equal(pcgates.charge_controlled_op(gates.I2, gates.I2), np.eye(4))

    def test_x_on_charge_one(self):
        q = pcgates.charge_controlled_op(gates.I2, gates.X)
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[2, 2] = 1  # Q0 on rows/cols {0, 2}
        expected[1, 3] = expected[3, 1] = 1  # Q1 on rows/cols {1, 3}
        np.testing.assert_array_equal(q, expected)

    def test_random_blocks_commute_with_charge_projector(self):
        rng = np.random.default_rng(0)
        q = pcgates.charge_controlled_op(random_su2(rng), random_su2(rng))
        proj = np.kron(gates.I2, np.diag([0.0, 1.0]))
        assert gates.unitarity_residual(q) < 1e-12
        assert np.abs(q @ proj - proj @ q).max() < 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            pcgates.charge_controlled_op(np.ones((2, 2)), gates.I2)


class TestZ2Generic:
    def test_identity(self):
        np.testing.assert_allclose(pcgates.z2_generic_gate(gates.I2, gates.I2), np.eye(4), atol=0)

    def test_reduces_to_gate_a(self):
        theta, phi = 0.41, -1.2
        np.testing.assert_allclose(
            pcgates.z2_generic_gate(gates.I2, pcgates.v_matrix(theta, phi)),
            pcgates.gate_matrix("A", (theta, phi)),
            atol=1e-12,
        )

    def test_matches_displayed_pattern(self):
        rng = np.random.default_rng(1)
        q0, q1 = random_su2(rng), random_su2(rng)
        (a, c), (b, d) = q0
        (e, g), (f, h) = q1
        expected = np.array([[a, 0, 0, c], [0, e, g, 0], [0, f, h, 0], [b, 0, 0, d]])
        z = pcgates.z2_generic_gate(q0, q1)
        np.testing.assert_allclose(z, expected, atol=1e-12)
        assert np.abs(z @ pcgates.PARITY_2Q - pcgates.PARITY_2Q @ z).max() < 1e-12


class TestClosedForms:
    def test_a_at_zero_is_swap_like(self):
        expected = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
        np.testing.assert_allclose(pcgates.gate_matrix("A", (0, 0)), expected, atol=1e-15)

    def test_b_and_g_at_zero_are_identity(self):
        np.testing.assert_allclose(pcgates.gate_matrix("B", (0, 0)), np.eye(4), atol=1e-15)
        np.testing.assert_allclose(pcgates.gate_matrix("G", (0, 0, 0, 0)), np.eye(4), atol=1e-15)

    @pytest.mark.parametrize("phi", [-2.0, 0.0, 0.7, np.pi])
    def test_a_at_quarter_turn(self, phi):
        np.testing.assert_allclose(pcgates.gate_matrix("A", (np.pi / 2, phi)), np.diag([1, 1, -1, 1]), atol=1e-15)

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            pcgates.gate_matrix("G", (0.1, 0.2))
        with pytest.raises(ValueError):
            pcgates.gate_matrix("A", (0.1, 0.2, 0.3))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            PCGateKind.parse("Q")

    def test_v_matrix_has_both_displayed_forms(self):
        theta, phi = 0.37, 1.1
        u = gates.ry(theta) @ gates.rz(phi)
        v = pcgates.v_matrix(theta, phi)
        np.testing.assert_allclose(u.conj().T @ gates.X @ u, v, atol=1e-14)
        np.testing.assert_allclose(gates.X @ gates.rz(phi) @ gates.ry(2 * theta) @ gates.rz(phi), v, atol=1e-14)

    def test_central_block_of_g(self):
        alpha, theta, phi1, phi2 = 0.3, 0.8, -0.4, 1.9
        center = pcgates.gate_matrix("G", (alpha, theta, phi1, phi2))[1:3, 1:3]
        expected = np.exp(1j * alpha) * gates.rz(-phi1) @ gates.ry(-2 * theta) @ gates.rz(-phi2)
        np.testing.assert_allclose(center, expected, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(kind=st.sampled_from(list(PCGateKind)), params=st.lists(angles, min_size=4, max_size=4))
def test_gates_conserve_number_and_are_unitary(kind, params):
    u = pcgates.gate_matrix(kind, params[: kind.arity])
    n = pcgates.NUMBER_OPERATOR_2Q
    assert np.abs(u @ n - n @ u).max() < 1e-12
    assert gates.unitarity_residual(u) < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    kind=st.sampled_from(list(PCGateKind)),
    style=st.sampled_from(["compact", "controlled"]),
    params=st.lists(angles, min_size=4, max_size=4),
)
def test_decomposition_reconstructs_exactly(kind, style, params):
    p = params[: kind.arity]
    seq = pcgates.decompose(kind, p, style=style)
    np.testing.assert_allclose(seq.local_unitary(), pcgates.gate_matrix(kind, p), atol=1e-12)
    assert gates.unitarity_residual(seq.unitary()) < 1e-10


def test_decompose_b_at_zero_is_identity():
    np.testing.assert_allclose(pcgates.decompose("B", (0, 0)).local_unitary(), np.eye(4), atol=1e-12)


def test_cnot_counts():
    assert verify.cnot_counts("compact") == {"A": 3, "B": 3, "G": 3}
    assert verify.cnot_counts("controlled") == {"A": 3, "B": 4, "G": 4}


def test_unknown_decomposition_style():
    with pytest.raises(ValueError):
        pcgates.decompose("A", (0, 0), style="magic")


def test_b_needs_three_cnots():
    """A two-qubit unitary fits in two CNOTs iff tr(U YY U^T YY) is real (U in SU(4))."""
    yy = np.kron(gates.Y, gates.Y)

    def trace_gamma(u):
        u = u / np.linalg.det(u) ** 0.25
        return np.trace(u @ yy @ u.T @ yy)

    assert abs(trace_gamma(gates.CNOT).imag) < 1e-12
    assert abs(trace_gamma(pcgates.gate_matrix("B", (0.7, 1.3))).imag) > 0.1


def test_b_and_a_are_instances_of_g():
    rng = np.random.default_rng(2)
    for kind in ("A", "B"):
        for _ in range(20):
            u = pcgates.gate_matrix(kind, rng.uniform(-np.pi, np.pi, 2))
            params = pcgates.canonicalize_pc_unitary(u)
            np.testing.assert_allclose(pcgates.reconstruct_pc_unitary(params), u, atol=1e-10)
    theta, phi = 0.9, -0.6
    np.testing.assert_allclose(
        pcgates.gate_matrix("G", pcgates.b_as_g_params(theta, phi)),
        np.kron(gates.phase(-phi / 2), gates.phase(-phi / 2)) @ pcgates.gate_matrix("B", (theta, phi)),
        atol=1e-12,
    )


class TestSequences:
    def test_rejects_bad_wires(self):
        seq = pcgates.ElementaryGateSequence(2)
        with pytest.raises(ValueError):
            seq.append(pcgates.Op.CNOT, (0, 0))
        with pytest.raises(ValueError):
            seq.append(pcgates.Op.RZ, (2,), 0.1)
        with pytest.raises(ValueError):
            seq.append(pcgates.Op.RZ, (0,))

    def test_apply_matches_unitary(self):
        rng = np.random.default_rng(3)
        seq = pcgates.long_range_gate("G", rng.uniform(-3, 3, 4), 0, 3, 4)
        z = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        psi = Statevector(z / np.linalg.norm(z), 4)
        expected = seq.unitary() @ psi.amplitudes
        np.testing.assert_allclose(seq.apply(psi.copy()).amplitudes, expected, atol=1e-12)


class TestLongRange:
    def test_ends_clear_state_unchanged(self):
        seq = pcgates.long_range_gate("A", (0.8, 0.3), 0, 2, 3)
        state = seq.apply(Statevector.from_bits([0, 1, 0]))
        np.testing.assert_allclose(state.amplitudes, Statevector.from_bits([0, 1, 0]).amplitudes, atol=1e-12)

    @pytest.mark.parametrize("kind", list(PCGateKind))
    def test_matches_swap_network(self, kind):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = rng.uniform(-np.pi, np.pi, kind.arity)
            direct = pcgates.long_range_gate(kind, p, 0, 2, 3)
            network = pcgates.swap_network_gate(kind, p, 0, 2, 3)
            np.testing.assert_allclose(direct.unitary(), network.unitary(), atol=1e-12)
            assert direct.cnot_count == 3 and network.cnot_count == 9
            assert {w for g in direct.gates for w in g.wires} <= {0, 2}

    def test_matches_dense_placement_at_distance_three(self):
        from pcbrick.quantum import embed_operator

        p = (0.2, -1.1, 0.5, 2.4)
        seq = pcgates.long_range_gate("G", p, 1, 4, 5)
        np.testing.assert_allclose(seq.unitary(), embed_operator(pcgates.gate_matrix("G", p), (1, 4), 5), atol=1e-12)

    def test_invalid_wires(self):
        with pytest.raises(ValueError):
            pcgates.long_range_gate("A", (0, 0), 2, 1, 3)
        with pytest.raises(ValueError):
            pcgates.long_range_gate("A", (0, 0), 0, 3, 3)


class TestCanonicalize:
    def test_already_canonical(self):
        p = (0.4, 0.9, -0.3, 1.7)
        omega1, omega2, *g = pcgates.canonicalize_pc_unitary(pcgates.gate_matrix("G", p))
        assert abs(omega1) < 1e-12 and abs(omega2) < 1e-12
        np.testing.assert_allclose(pcgates.gate_matrix("G", g), pcgates.gate_matrix("G", p), atol=1e-12)

    def test_pure_phase_diagonal(self):
        u = np.diag([np.exp(1j * np.pi / 3), 1, 1, np.exp(-1j * np.pi / 5)])
        np.testing.assert_allclose(pcgates.reconstruct_pc_unitary(pcgates.canonicalize_pc_unitary(u)), u, atol=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(seed=RNG_SEEDS)
    def test_round_trip_and_gauge(self, seed):
        u = verify.random_pc_unitary(np.random.default_rng(seed))
        params = pcgates.canonicalize_pc_unitary(u)
        np.testing.assert_allclose(pcgates.reconstruct_pc_unitary(params), u, atol=1e-10)
        omega1, omega2, alpha, theta, phi1, phi2 = params
        assert 0 <= theta <= np.pi / 2
        for angle in (omega1, omega2, alpha, phi1, phi2):
            assert -np.pi < angle <= np.pi

    @pytest.mark.parametrize("u", [np.eye(4, dtype=complex), pcgates.gate_matrix("A", (0, 0))])
    def test_degenerate_points(self, u):
        np.testing.assert_allclose(pcgates.reconstruct_pc_unitary(pcgates.canonicalize_pc_unitary(u)), u, atol=1e-12)

    def test_rejects_non_conserving(self):
        with pytest.raises(ValueError):
            pcgates.canonicalize_pc_unitary(gates.CNOT)
        bad = np.eye(4, dtype=complex)
        bad[1:3, 1:3] = [[1, 1], [0, 1]]
        with pytest.raises(ValueError):
            pcgates.canonicalize_pc_unitary(bad)


def test_verify_suite_passes():
    results = verify.run_all(draws=20, canonical_draws=100)
    assert all(r.passed for r in results), verify.format_table(results)


def test_verify_suite_catches_corrupted_gate(monkeypatch):
    original = pcgates._gate_b

    def corrupted(theta, phi):
        u = original(theta, phi).copy()
        u[1, 2] *= -1
        return u

    monkeypatch.setattr(pcgates, "_gate_b", corrupted)
    failed = [r.name for r in verify.run_all(draws=5, canonical_draws=5) if not r.passed]
    assert "decompose[compact] B" in failed
