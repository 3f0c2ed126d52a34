"""Qubit circuits that move phase information around.

Two constructions live here. The first squeezes the two phase angles of two
equatorial qubits (|0> + e^{i*phi}|1>)/sqrt(2) into a single qubit: rotate
qubit 0 so its phase angle becomes an amplitude angle, entangle with a CNOT
(control 0, target 1), then measure qubit 1. Either outcome occurs with
probability 1/2 and leaves one qubit carrying both angles:

    outcome 0:  sin(phi1/2)|0> + cos(phi1/2) e^{i*phi2} |1>
    outcome 1:  sin(phi1/2) e^{i*phi2} |0> + cos(phi1/2) |1>

At phi1 in {0, pi} one amplitude vanishes and phi2 becomes an unobservable
global phase, which phase_loss_scan makes visible.

The second construction sends a partially known two-qubit state
alpha|00> + beta|11> through a single teleportation channel: a local CNOT
concentrates the unknowns into qubit 0, that qubit is teleported with one
maximally entangled pair, and the receiver re-expands with an ancilla and
another CNOT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import (
    MeasurementRecord,
    Seed,
    StateVector,
    UnitaryMatrix,
    apply_gate,
    fidelity,
    measure_site,
    tensor,
)

TWO_PI = 2.0 * np.pi


def _check_angle(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value < TWO_PI:
        raise ValueError(f"{name} must lie in [0, 2*pi), got {value!r}")
    return value


@dataclass(frozen=True)
class EquatorialSpec:
    """Phase angles of a d-level equatorial state (1/sqrt(d)) sum_j e^{i*phi_j} |j>."""

    d: int
    phases: tuple

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        phases = tuple(float(p) for p in self.phases)
        if len(phases) != self.d:
            raise ValueError(f"expected {self.d} phases, got {len(phases)}")
        for p in phases:
            _check_angle("phase", p)
        object.__setattr__(self, "phases", phases)


@dataclass(frozen=True)
class PartiallyKnownPair:
    """Two-qubit state alpha|00> + beta|11>, known up to the two amplitudes."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")

    def two_qubit_state(self) -> StateVector:
        return StateVector(2, 2, [self.alpha, 0.0, 0.0, self.beta])


def equatorial_state(spec: EquatorialSpec) -> StateVector:
    """Single qudit (1/sqrt(d)) sum_j e^{i*phi_j} |j>."""
    amps = np.exp(1j * np.asarray(spec.phases)) / np.sqrt(spec.d)
    return StateVector(spec.d, 1, amps)


def equatorial_qubit(phi: float) -> StateVector:
    """Qubit on the Bloch-sphere equator, (|0> + e^{i*phi}|1>)/sqrt(2)."""
    return equatorial_state(EquatorialSpec(2, (0.0, _check_angle("phi", phi))))


def phase_to_amplitude_gate() -> UnitaryMatrix:
    """Rotation taking the equator to a meridian.

    Sends (|0> + e^{i*phi}|1>)/sqrt(2) to sin(phi/2)|0> + cos(phi/2)|1> up to
    a global phase, so the phase angle becomes an amplitude angle.
    """
    return UnitaryMatrix(np.array([[1.0, -1.0], [-1.0j, -1.0j]]) / np.sqrt(2.0))


def cnot_gate() -> UnitaryMatrix:
    """Controlled-NOT, control on the first (most significant) qubit."""
    return UnitaryMatrix(
        np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    )


def hadamard_gate() -> UnitaryMatrix:
    return UnitaryMatrix(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0))


def pauli_x_gate() -> UnitaryMatrix:
    return UnitaryMatrix(np.array([[0, 1], [1, 0]], dtype=complex))


def pauli_z_gate() -> UnitaryMatrix:
    return UnitaryMatrix(np.array([[1, 0], [0, -1]], dtype=complex))


def compress_two_equatorial(
    phi1: float,
    phi2: float,
    outcome: "int | None" = None,
    seed: Seed = 0,
) -> tuple[MeasurementRecord, StateVector]:
    """Run the two-angles-into-one-qubit circuit.

    Returns the measurement record for qubit 1 and the retrieved single-qubit
    state. outcome=None samples the measurement (deterministic per seed);
    outcome=0 or 1 forces the branch.
    """
    phi1 = _check_angle("phi1", phi1)
    phi2 = _check_angle("phi2", phi2)
    state = tensor(equatorial_qubit(phi1), equatorial_qubit(phi2))
    state = apply_gate(state, phase_to_amplitude_gate(), [0])
    state = apply_gate(state, cnot_gate(), [0, 1])
    record = measure_site(state, 1, outcome=outcome, seed=seed)
    return record, record.post_state


def predicted_retrieved_state(phi1: float, phi2: float, outcome: int) -> StateVector:
    """Closed-form prediction for the qubit retrieved by compress_two_equatorial."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    s, c = np.sin(phi1 / 2.0), np.cos(phi1 / 2.0)
    phase = np.exp(1j * phi2)
    amps = [s, c * phase] if outcome == 0 else [s * phase, c]
    return StateVector(2, 1, amps)


def phase_loss_scan(
    phi1_grid: Sequence[float],
    phi2_pair: tuple[float, float],
    outcome: int = 0,
) -> np.ndarray:
    """Distinguishability of two phi2 values after compression, per phi1.

    For each phi1 in the grid, returns the fidelity between the retrieved
    states produced with phi2 = a and phi2 = b (same forced outcome).
    Fidelity 1 means the second angle is unrecoverable at that phi1; the loss
    is total at phi1 in {0, pi}.
    """
    phi1_grid = [float(p) for p in phi1_grid]
    if not phi1_grid:
        raise ValueError("phi1_grid must be nonempty")
    a, b = (_check_angle("phi2", p) for p in phi2_pair)
    if a == b:
        raise ValueError("phi2_pair values must be distinct")
    fids = np.empty(len(phi1_grid))
    for i, phi1 in enumerate(phi1_grid):
        _, retrieved_a = compress_two_equatorial(phi1, a, outcome=outcome)
        _, retrieved_b = compress_two_equatorial(phi1, b, outcome=outcome)
        fids[i] = fidelity(retrieved_a, retrieved_b)
    return fids


def extract_partially_known(pair: PartiallyKnownPair) -> StateVector:
    """Concentrate alpha|00> + beta|11> into qubit 0 with a local CNOT.

    The result is (alpha|0> + beta|1>) (x) |0>: both unknowns now live on the
    first qubit and the second is exactly |0>.
    """
    return apply_gate(pair.two_qubit_state(), cnot_gate(), [0, 1])


def teleport_qubit(
    state: StateVector,
    seed: Seed = 0,
    branch: "tuple[int, int] | None" = None,
) -> StateVector:
    """Teleport a single qubit through one maximally entangled pair.

    Sender-side Bell measurement (CNOT then Hadamard, then measure both
    sender qubits), receiver-side Pauli correction. The measurement pair is
    sampled deterministically from the seed, or forced via branch=(m1, m2)
    for exhaustive testing. Output equals the input up to global phase on
    every branch.
    """
    if state.num_sites != 1 or state.dim_per_site != 2:
        raise ValueError("teleport_qubit expects a single-qubit state")
    if branch is not None and (len(branch) != 2 or any(b not in (0, 1) for b in branch)):
        raise ValueError(f"branch must be a pair of bits, got {branch!r}")
    epr = StateVector(2, 2, np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0))
    full = tensor(state, epr)
    full = apply_gate(full, cnot_gate(), [0, 1])
    full = apply_gate(full, hadamard_gate(), [0])
    if branch is None:
        seed1, seed2 = np.random.SeedSequence(seed).spawn(2)
        first = measure_site(full, 0, seed=seed1)
        second = measure_site(first.post_state, 0, seed=seed2)
    else:
        first = measure_site(full, 0, outcome=branch[0])
        second = measure_site(first.post_state, 0, outcome=branch[1])
    received = second.post_state
    if second.outcome == 1:
        received = apply_gate(received, pauli_x_gate(), [0])
    if first.outcome == 1:
        received = apply_gate(received, pauli_z_gate(), [0])
    return received


def reconstruct_two_qubit(qubit: StateVector) -> StateVector:
    """Re-expand alpha|0> + beta|1> into alpha|00> + beta|11> with an ancilla."""
    if qubit.num_sites != 1 or qubit.dim_per_site != 2:
        raise ValueError("reconstruct_two_qubit expects a single-qubit state")
    return apply_gate(tensor(qubit, StateVector.basis(2, [0])), cnot_gate(), [0, 1])
