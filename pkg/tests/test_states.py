"""Statevector mechanics: construction invariants, gates, measurement, traces."""

import numpy as np
import pytest

from phasecomp import (
    DensityMatrix,
    StateVector,
    UnitaryMatrix,
    apply_gate,
    determinant,
    fidelity,
    is_unitary,
    measure_site,
    partial_trace,
    tensor,
)
from phasecomp.protocols import (
    cnot_gate,
    equatorial_qubit,
    phase_to_amplitude_gate,
)

INV_SQRT2 = 1.0 / np.sqrt(2.0)


def random_state(rng, d, q):
    amps = rng.normal(size=d**q) + 1j * rng.normal(size=d**q)
    return StateVector(d, q, amps / np.linalg.norm(amps))


def random_unitary(rng, size):
    ortho, _ = np.linalg.qr(rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
    return UnitaryMatrix(ortho)


def cofactor_determinant(matrix):
    """Brute-force cofactor expansion, the independent determinant oracle."""
    m = np.asarray(matrix, dtype=complex)
    if m.shape == (1, 1):
        return m[0, 0]
    return sum(
        (-1) ** j * m[0, j] * cofactor_determinant(np.delete(np.delete(m, 0, 0), j, 1))
        for j in range(m.shape[1])
    )


def compressed_pair_state(phi1, phi2):
    """Hand expansion of the post-CNOT two-qubit state, written independently.

    Rotating qubit 0 turns (|0>+e^{i*phi1}|1>)/sqrt(2) into
    sin(phi1/2)|0> + cos(phi1/2)|1> up to global phase; tensoring with the
    second equatorial qubit and flipping the target digit where the control
    is 1 gives amplitudes (s, s*e^{i*phi2}, c*e^{i*phi2}, c)/sqrt(2).
    """
    s, c = np.sin(phi1 / 2.0), np.cos(phi1 / 2.0)
    ph = np.exp(1j * phi2)
    return StateVector(2, 2, np.array([s, s * ph, c * ph, c]) / np.sqrt(2.0))


def retrieved_branch(phi1, phi2, outcome):
    """Closed-form single-qubit branch states, written independently."""
    s, c = np.sin(phi1 / 2.0), np.cos(phi1 / 2.0)
    ph = np.exp(1j * phi2)
    return StateVector(2, 1, [s, c * ph] if outcome == 0 else [s * ph, c])


class TestStateVector:
    def test_basis_state(self):
        state = StateVector.basis(2, [0, 1])
        np.testing.assert_allclose(state.amplitudes, [0, 1, 0, 0])

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="not normalized"):
            StateVector(2, 1, [1.0, 1.0])

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError, match="expected 4 amplitudes"):
            StateVector(2, 2, [1.0, 0.0])

    def test_amplitudes_are_frozen(self):
        state = StateVector.basis(2, [0])
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0.0

    def test_normalized_constructor(self):
        state = StateVector.normalized(2, 1, [3.0, 4.0])
        np.testing.assert_allclose(state.amplitudes, [0.6, 0.8])
        with pytest.raises(ValueError, match="zero vector"):
            StateVector.normalized(2, 1, [0.0, 0.0])


class TestTensor:
    def test_basis_product(self):
        result = tensor(StateVector.basis(2, [0]), StateVector.basis(2, [1]))
        assert result.num_sites == 2
        np.testing.assert_allclose(result.amplitudes, [0, 1, 0, 0])

    def test_plus_plus_is_uniform(self):
        plus = equatorial_qubit(0.0)
        result = tensor(plus, plus)
        np.testing.assert_allclose(result.amplitudes, [0.25**0.5] * 4, atol=1e-15)

    def test_rotated_pair_matches_hand_expansion(self):
        # Rotate qubit 0 of the (pi/2, 0) pair; the product must match the
        # hand expansion (s, s, c, c)/sqrt(2) up to a global phase.
        rotated = apply_gate(equatorial_qubit(np.pi / 2.0), phase_to_amplitude_gate(), [0])
        result = tensor(rotated, equatorial_qubit(0.0))
        s, c = np.sin(np.pi / 4.0), np.cos(np.pi / 4.0)
        expected = StateVector(2, 2, np.array([s, s, c, c]) / np.sqrt(2.0))
        assert fidelity(result, expected) > 1.0 - 1e-12

    def test_rotated_pair_generic_angles(self):
        phi1, phi2 = np.pi / 3.0, np.pi / 5.0
        rotated = apply_gate(equatorial_qubit(phi1), phase_to_amplitude_gate(), [0])
        result = tensor(rotated, equatorial_qubit(phi2))
        s, c = np.sin(phi1 / 2.0), np.cos(phi1 / 2.0)
        ph = np.exp(1j * phi2)
        expected = StateVector(2, 2, np.array([s, s * ph, c, c * ph]) / np.sqrt(2.0))
        assert fidelity(result, expected) > 1.0 - 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            tensor(StateVector.basis(2, [0]), StateVector.basis(3, [0]))

    def test_associativity(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a, b, c = (random_state(rng, 2, 1) for _ in range(3))
            left = tensor(tensor(a, b), c)
            right = tensor(a, tensor(b, c))
            np.testing.assert_allclose(left.amplitudes, right.amplitudes, rtol=0, atol=1e-14)


class TestApplyGate:
    def test_identity(self):
        rng = np.random.default_rng(0)
        state = random_state(rng, 2, 3)
        result = apply_gate(state, UnitaryMatrix.identity(2), [1])
        np.testing.assert_allclose(result.amplitudes, state.amplitudes)

    def test_cnot_truth_table(self):
        result = apply_gate(StateVector.basis(2, [1, 0]), cnot_gate(), [0, 1])
        np.testing.assert_allclose(result.amplitudes, StateVector.basis(2, [1, 1]).amplitudes)

    def test_cnot_reversed_targets(self):
        # control on site 1 flips site 0: |01> -> |11>
        result = apply_gate(StateVector.basis(2, [0, 1]), cnot_gate(), [1, 0])
        np.testing.assert_allclose(result.amplitudes, StateVector.basis(2, [1, 1]).amplitudes)

    def test_rotation_at_pi_gives_ground_state(self):
        result = apply_gate(equatorial_qubit(np.pi), phase_to_amplitude_gate(), [0])
        assert fidelity(result, StateVector.basis(2, [0])) > 1.0 - 1e-12

    def test_duplicate_targets(self):
        with pytest.raises(ValueError, match="duplicate"):
            apply_gate(StateVector.basis(2, [0, 0]), cnot_gate(), [0, 0])

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="gate size"):
            apply_gate(StateVector.basis(2, [0, 0]), cnot_gate(), [0])

    def test_norm_preservation_property(self):
        rng = np.random.default_rng(42)
        shapes = [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 1), (3, 2), (3, 3), (4, 2), (4, 3)]
        for _ in range(1000):
            d, q = shapes[rng.integers(len(shapes))]
            state = random_state(rng, d, q)
            span = int(rng.integers(1, min(q, 2) + 1))
            targets = list(rng.choice(q, size=span, replace=False))
            gate = random_unitary(rng, d**span)
            result = apply_gate(state, gate, targets)
            assert abs(np.linalg.norm(result.amplitudes) - 1.0) < 1e-12


class TestMeasureSite:
    def test_product_basis_state(self):
        record = measure_site(StateVector.basis(2, [0, 1]), 1, outcome=1)
        assert record.outcome == 1
        assert record.probability == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(record.post_state.amplitudes, [1, 0])

    def test_compressed_pair_branch_probabilities(self):
        # Both branch norms of the post-CNOT state are 1/2 by hand.
        rng = np.random.default_rng(5)
        for _ in range(25):
            phi1, phi2 = rng.uniform(0, 2 * np.pi, size=2)
            state = compressed_pair_state(phi1, phi2)
            for outcome in (0, 1):
                record = measure_site(state, 1, outcome=outcome)
                assert abs(record.probability - 0.5) < 1e-12

    def test_compressed_pair_branch_state(self):
        phi1, phi2 = 2.0, 0.7
        record = measure_site(compressed_pair_state(phi1, phi2), 1, outcome=0)
        assert fidelity(record.post_state, retrieved_branch(phi1, phi2, 0)) > 1.0 - 1e-12

    def test_zero_probability_branch_is_error(self):
        with pytest.raises(ValueError, match="probability"):
            measure_site(StateVector.basis(2, [0, 0]), 1, outcome=1)

    def test_sampling_is_seed_deterministic(self):
        state = compressed_pair_state(1.0, 2.0)
        first = measure_site(state, 1, seed=123)
        second = measure_site(state, 1, seed=123)
        assert first.outcome == second.outcome
        np.testing.assert_array_equal(first.post_state.amplitudes, second.post_state.amplitudes)

    def test_completeness_property(self):
        # Outcome probabilities sum to 1 and the branch mixture reproduces
        # the reduced state over the unmeasured sites.
        rng = np.random.default_rng(9)
        for _ in range(30):
            d = int(rng.integers(2, 4))
            q = int(rng.integers(2, 4))
            state = random_state(rng, d, q)
            site = int(rng.integers(q))
            total = 0.0
            mixture = np.zeros((d ** (q - 1), d ** (q - 1)), dtype=complex)
            for outcome in range(d):
                psi = np.moveaxis(state.amplitudes.reshape([d] * q), site, 0)
                if np.sum(np.abs(psi[outcome]) ** 2) < 1e-14:
                    continue
                record = measure_site(state, site, outcome=outcome)
                total += record.probability
                post = record.post_state.amplitudes
                mixture += record.probability * np.outer(post, post.conj())
            assert abs(total - 1.0) < 1e-12
            reduced = partial_trace(state, [s for s in range(q) if s != site])
            np.testing.assert_allclose(mixture, reduced.entries, rtol=0, atol=1e-10)


class TestFidelity:
    def test_identical(self):
        zero = StateVector.basis(2, [0])
        assert fidelity(zero, zero) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert fidelity(StateVector.basis(2, [0]), StateVector.basis(2, [1])) == 0.0

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            a = random_state(rng, 2, 3)
            b = random_state(rng, 2, 3)
            gamma = rng.uniform(0, 2 * np.pi)
            shifted = StateVector(2, 3, np.exp(1j * gamma) * b.amplitudes)
            assert abs(fidelity(a, shifted) - fidelity(a, b)) < 1e-13

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="different dimensions"):
            fidelity(StateVector.basis(2, [0]), StateVector.basis(2, [0, 0]))


class TestPartialTrace:
    def test_product_state(self):
        rho = partial_trace(StateVector.basis(2, [0, 0]), [0])
        np.testing.assert_allclose(rho.entries, [[1, 0], [0, 0]])

    def test_entangled_pair_is_maximally_mixed(self):
        epr = StateVector(2, 2, np.array([1, 0, 0, 1]) / np.sqrt(2.0))
        rho = partial_trace(epr, [0])
        np.testing.assert_allclose(rho.entries, np.eye(2) / 2.0, atol=1e-15)

    def test_compressed_pair_reduces_to_branch_mixture(self):
        phi1, phi2 = 1.3, 2.9
        rho = partial_trace(compressed_pair_state(phi1, phi2), [0])
        expected = np.zeros((2, 2), dtype=complex)
        for outcome in (0, 1):
            branch = retrieved_branch(phi1, phi2, outcome).amplitudes
            expected += 0.5 * np.outer(branch, branch.conj())
        np.testing.assert_allclose(rho.entries, expected, rtol=0, atol=1e-12)

    def test_empty_keep_is_error(self):
        with pytest.raises(ValueError, match="nonempty"):
            partial_trace(StateVector.basis(2, [0, 0]), [])

    def test_overlap_with_pure_state(self):
        epr = StateVector(2, 2, np.array([1, 0, 0, 1]) / np.sqrt(2.0))
        rho = partial_trace(epr, [0])
        assert rho.overlap(StateVector.basis(2, [0])) == pytest.approx(0.5, abs=1e-12)


class TestDensityMatrixInvariants:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(2, 1, [[0.5, 1.0], [0.0, 0.5]])

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(2, 1, [[0.9, 0.0], [0.0, 0.0]])

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix(2, 1, [[1.5, 0.0], [0.0, -0.5]])


class TestDeterminant:
    def test_identity(self):
        for size in (1, 2, 5, 10):
            assert determinant(np.eye(size)) == pytest.approx(1.0)

    def test_two_by_two(self):
        matrix = [[1, 1], [1, -1]]
        assert determinant(matrix) == pytest.approx(-2.0)
        assert cofactor_determinant(matrix) == pytest.approx(-2.0)

    def test_root_of_unity_vandermonde(self):
        omega = np.exp(2j * np.pi / 3.0)
        matrix = np.array([[omega ** (t * j) for j in range(3)] for t in range(3)])
        oracle = cofactor_determinant(matrix)
        assert abs(oracle) == pytest.approx(3.0 * np.sqrt(3.0), rel=1e-12)
        assert abs(determinant(matrix)) == pytest.approx(abs(oracle), rel=1e-10)

    def test_non_square_is_error(self):
        with pytest.raises(ValueError, match="square"):
            determinant(np.ones((2, 3)))

    def test_multiplicativity_property(self):
        rng = np.random.default_rng(33)
        for _ in range(20):
            a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
            b = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
            product = abs(determinant(a @ b))
            assert product == pytest.approx(abs(determinant(a)) * abs(determinant(b)), rel=1e-8)


class TestIsUnitary:
    def test_identity(self):
        assert is_unitary(np.eye(4))

    def test_rotation_gate(self):
        assert is_unitary(phase_to_amplitude_gate().entries, 1e-12)

    def test_rank_deficient(self):
        assert not is_unitary(np.array([[1, 0], [0, 0]]))

    def test_unitary_type_rejects_bad_matrix(self):
        with pytest.raises(ValueError, match="unitarity"):
            UnitaryMatrix(np.array([[1.0, 0.0], [0.0, 2.0]]))
