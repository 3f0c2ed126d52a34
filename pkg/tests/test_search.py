"""Unitary parameterization, retrieval channel, and the fidelity search."""

import numpy as np
import pytest

from phasecomp import (
    CompressionScenario,
    PipelineSpec,
    UnitaryParams,
    channel_fidelities,
    decode_unitary,
    finite_difference_consistency,
    is_unitary,
    optimize_retrieval,
    retrieval_fidelity,
)
from phasecomp.search import input_state_vectors


def brute_force_fidelities(encoder, decoder, scenario, samples):
    """Density-matrix evaluation of the channel, the test-side oracle."""
    d, n, m, p = scenario.d, scenario.n, scenario.m, scenario.p
    keep, rest = d**m, d ** (n + p - m)
    fids = []
    for target in input_state_vectors(scenario, samples):
        encoded = encoder @ target
        rho = np.outer(encoded, encoded.conj()).reshape(keep, rest, keep, rest)
        rho_kept = np.trace(rho, axis1=1, axis2=3)
        refill = np.zeros((rest, rest))
        refill[0, 0] = 1.0
        rho_out = decoder @ np.kron(rho_kept, refill) @ decoder.conj().T
        fids.append(float(np.real(np.vdot(target, rho_out @ target))))
    return np.array(fids)


def grid_16_samples():
    """Fixed 4x4 grid of second angles with the removable first angle at 0."""
    values = np.arange(4) * np.pi / 2.0
    samples = np.zeros((16, 2, 2))
    for i, a in enumerate(values):
        for j, b in enumerate(values):
            samples[4 * i + j, 0, 1] = a
            samples[4 * i + j, 1, 1] = b
    return samples


def random_unitary(rng, size):
    q, _ = np.linalg.qr(rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
    return q


class TestDecodeUnitary:
    def test_zero_params_give_identity(self):
        np.testing.assert_allclose(decode_unitary(UnitaryParams.identity(4)).entries, np.eye(4))

    def test_random_params_decode_to_unitaries(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            params = UnitaryParams(4, rng.normal(scale=2.0, size=16))
            u = decode_unitary(params)
            assert is_unitary(u.entries, 1e-9)
            assert abs(np.linalg.det(u.entries)) == pytest.approx(1.0, abs=1e-8)

    def test_extreme_params_stay_unitary(self):
        rng = np.random.default_rng(2)
        params = UnitaryParams(3, rng.normal(scale=1e6, size=9))
        assert is_unitary(decode_unitary(params).entries, 1e-9)

    def test_decode_is_deterministic(self):
        params = UnitaryParams(4, np.linspace(-1, 1, 16))
        np.testing.assert_array_equal(
            decode_unitary(params).entries, decode_unitary(params).entries
        )

    def test_param_validation(self):
        with pytest.raises(ValueError, match="16 parameters"):
            UnitaryParams(4, np.zeros(10))
        with pytest.raises(ValueError, match="finite"):
            UnitaryParams(2, [np.nan, 0.0, 0.0, 0.0])


class TestChannel:
    def test_identity_pipeline_nothing_discarded(self):
        scenario = CompressionScenario(2, 1, 1, 0)
        pipeline = PipelineSpec(
            scenario, UnitaryParams.identity(2), UnitaryParams.identity(2), sample_count=16
        )
        assert retrieval_fidelity(pipeline) == pytest.approx(1.0, abs=1e-12)

    def test_inverse_decoder_is_exact_without_discard(self):
        rng = np.random.default_rng(7)
        scenario = CompressionScenario(2, 2, 2, 0)
        samples = rng.uniform(0, 2 * np.pi, size=(12, 2, 2))
        samples[:, :, 0] = 0.0
        for _ in range(20):
            v = random_unitary(rng, 4)
            fids = channel_fidelities(v, v.conj().T, scenario, samples)
            assert np.min(fids) >= 1.0 - 1e-10

    def test_identity_pipeline_matches_brute_force_on_grid(self):
        # Losing the second equatorial qubit costs exactly half the overlap,
        # so every grid point scores 1/2.
        scenario = CompressionScenario(2, 2, 1, 0)
        samples = grid_16_samples()
        fast = channel_fidelities(np.eye(4), np.eye(4), scenario, samples)
        slow = brute_force_fidelities(np.eye(4), np.eye(4), scenario, samples)
        np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-10)
        np.testing.assert_allclose(fast, 0.5, rtol=0, atol=1e-12)

    def test_random_pipelines_match_brute_force(self):
        rng = np.random.default_rng(19)
        for scenario in [
            CompressionScenario(2, 2, 1, 0),
            CompressionScenario(2, 1, 1, 1),
            CompressionScenario(3, 2, 1, 0),
            CompressionScenario(2, 3, 2, 1),
        ]:
            size = scenario.matrix_size
            encoder = random_unitary(rng, size)
            decoder = random_unitary(rng, size)
            samples = rng.uniform(0, 2 * np.pi, size=(5, scenario.n, scenario.d))
            samples[:, :, 0] = 0.0
            fast = channel_fidelities(encoder, decoder, scenario, samples)
            slow = brute_force_fidelities(encoder, decoder, scenario, samples)
            np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-10)

    def test_fidelities_stay_in_range(self):
        rng = np.random.default_rng(29)
        scenarios = [
            CompressionScenario(2, 1, 1, 0),
            CompressionScenario(2, 2, 1, 0),
            CompressionScenario(2, 2, 2, 0),
            CompressionScenario(2, 1, 1, 1),
            CompressionScenario(3, 1, 1, 0),
            CompressionScenario(3, 2, 1, 0),
            CompressionScenario(2, 2, 0, 0),
        ]
        for i in range(200):
            scenario = scenarios[i % len(scenarios)]
            size = scenario.matrix_size
            pipeline = PipelineSpec(
                scenario,
                UnitaryParams(size, rng.normal(size=size**2)),
                UnitaryParams(size, rng.normal(size=size**2)),
                sample_count=4,
                seed=i,
            )
            value = retrieval_fidelity(pipeline)
            assert 0.0 <= value <= 1.0

    def test_retrieval_is_seed_deterministic(self):
        scenario = CompressionScenario(2, 2, 1, 0)
        rng = np.random.default_rng(31)
        pipeline = PipelineSpec(
            scenario,
            UnitaryParams(4, rng.normal(size=16)),
            UnitaryParams(4, rng.normal(size=16)),
            sample_count=8,
            seed=12,
        )
        assert retrieval_fidelity(pipeline) == retrieval_fidelity(pipeline)

    def test_spec_validation(self):
        scenario = CompressionScenario(2, 2, 1, 0)
        with pytest.raises(ValueError, match="4 dimensions"):
            PipelineSpec(scenario, UnitaryParams.identity(2), UnitaryParams.identity(4), 4)
        with pytest.raises(ValueError, match="sample_count"):
            PipelineSpec(scenario, UnitaryParams.identity(4), UnitaryParams.identity(4), 0)


class TestOptimize:
    def test_identity_start_solves_trivial_scenario(self):
        report = optimize_retrieval(CompressionScenario(2, 1, 1, 0), budget=1, restarts=1, seed=0)
        assert report.best_mean_fidelity >= 1.0 - 1e-9

    def test_identity_start_solves_two_qubit_exact_case(self):
        report = optimize_retrieval(CompressionScenario(2, 2, 2, 0), budget=1, restarts=1, seed=3)
        assert report.best_mean_fidelity >= 1.0 - 1e-9

    def test_trace_is_monotone(self):
        report = optimize_retrieval(CompressionScenario(2, 2, 1, 0), budget=600, restarts=3, seed=1)
        values = [v for _, v in report.trace]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert report.evaluations <= 600

    def test_runs_are_seed_reproducible(self):
        first = optimize_retrieval(CompressionScenario(2, 2, 1, 0), budget=300, restarts=2, seed=9)
        second = optimize_retrieval(CompressionScenario(2, 2, 1, 0), budget=300, restarts=2, seed=9)
        assert first.best_mean_fidelity == second.best_mean_fidelity
        assert first.trace == second.trace
        np.testing.assert_array_equal(first.best_encoder.params, second.best_encoder.params)
        np.testing.assert_array_equal(first.best_decoder.params, second.best_decoder.params)

    def test_lossy_scenarios_never_reach_one(self):
        for scenario in [
            CompressionScenario(2, 1, 0, 0),
            CompressionScenario(2, 2, 1, 0),
            CompressionScenario(2, 2, 1, 1),
            CompressionScenario(3, 1, 0, 0),
        ]:
            report = optimize_retrieval(scenario, budget=400, restarts=2, seed=0, sample_count=16)
            assert report.best_mean_fidelity < 1.0 - 1e-9, scenario

    def test_budget_validation(self):
        with pytest.raises(ValueError, match="budget"):
            optimize_retrieval(CompressionScenario(2, 1, 1, 0), budget=0)


class TestFiniteDifferences:
    def test_global_phase_direction_has_zero_slope(self):
        # Shifting every diagonal generator entry of the encoder multiplies it
        # by a global phase, which the channel cannot see.
        scenario = CompressionScenario(2, 2, 1, 0)
        rng = np.random.default_rng(41)
        pipeline = PipelineSpec(
            scenario,
            UnitaryParams(4, rng.normal(size=16)),
            UnitaryParams(4, rng.normal(size=16)),
            sample_count=8,
            seed=2,
        )
        direction = np.zeros(32)
        direction[:4] = 1.0
        check = finite_difference_consistency(pipeline, direction)
        assert abs(check.derivative_coarse) < 1e-8
        assert abs(check.derivative_fine) < 1e-8

    def test_stationary_at_exact_optimum(self):
        scenario = CompressionScenario(2, 2, 2, 0)
        pipeline = PipelineSpec(
            scenario, UnitaryParams.identity(4), UnitaryParams.identity(4), sample_count=8, seed=3
        )
        rng = np.random.default_rng(43)
        direction = rng.normal(size=32)
        direction /= np.linalg.norm(direction)
        check = finite_difference_consistency(pipeline, direction)
        assert abs(check.derivative_coarse) < 1e-6
        assert abs(check.derivative_fine) < 1e-6

    def test_generic_direction_is_richardson_consistent(self):
        scenario = CompressionScenario(2, 2, 1, 0)
        rng = np.random.default_rng(47)
        pipeline = PipelineSpec(
            scenario,
            UnitaryParams(4, rng.normal(size=16)),
            UnitaryParams(4, rng.normal(size=16)),
            sample_count=8,
            seed=5,
        )
        direction = rng.normal(size=32)
        direction /= np.linalg.norm(direction)
        check = finite_difference_consistency(pipeline, direction, steps=(1e-3, 5e-4))
        assert check.discrepancy < 1e-5
        assert check.consistent

    def test_step_validation(self):
        scenario = CompressionScenario(2, 1, 1, 0)
        pipeline = PipelineSpec(
            scenario, UnitaryParams.identity(2), UnitaryParams.identity(2), sample_count=4
        )
        with pytest.raises(ValueError, match="h1 > h2"):
            finite_difference_consistency(pipeline, np.zeros(8), steps=(1e-4, 1e-3))
