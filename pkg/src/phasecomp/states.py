"""Dense statevector and density-matrix mechanics for registers of d-level qudits.

Basis indexing is big-endian: |a_0 a_1 ... a_{q-1}> sits at flat index
sum_i a_i * d**(q-1-i), so site 0 is the most significant digit and a ket
label reads left to right. Arrays are frozen after construction, and every
operation is a pure function of its inputs plus an explicit seed, so values
can be shared freely across threads.

Pure states are compared up to global phase throughout: fidelity(a, b) is
|<a|b>|^2, which ignores an overall e^{i*gamma} on either argument.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
UNITARY_TOL = 1e-10
ZERO_PROBABILITY = 1e-14

Seed = "int | np.random.SeedSequence"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of num_sites qudits, each with dim_per_site levels."""

    dim_per_site: int
    num_sites: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        d, q = self.dim_per_site, self.num_sites
        if not isinstance(d, (int, np.integer)) or d < 2:
            raise ValueError(f"dim_per_site must be an integer >= 2, got {d}")
        if not isinstance(q, (int, np.integer)) or q < 1:
            raise ValueError(f"num_sites must be an integer >= 1, got {q}")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (d**q,):
            raise ValueError(
                f"expected {d**q} amplitudes for {q} site(s) of dimension {d}, "
                f"got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension d**q."""
        return self.dim_per_site**self.num_sites

    @classmethod
    def basis(cls, dim_per_site: int, digits: Sequence[int]) -> "StateVector":
        """Computational basis state |digits>, digits read big-endian."""
        q = len(digits)
        index = 0
        for a in digits:
            if not 0 <= a < dim_per_site:
                raise ValueError(f"basis digit {a} out of range for d={dim_per_site}")
            index = index * dim_per_site + a
        amps = np.zeros(dim_per_site**q, dtype=complex)
        amps[index] = 1.0
        return cls(dim_per_site, q, amps)

    @classmethod
    def normalized(cls, dim_per_site: int, num_sites: int, amplitudes) -> "StateVector":
        """Construct from a raw amplitude vector, rescaling it to unit norm."""
        amps = np.array(amplitudes, dtype=complex)
        norm = float(np.linalg.norm(amps))
        if norm < 1e-300:
            raise ValueError("cannot normalize the zero vector")
        return cls(dim_per_site, num_sites, amps / norm)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state of num_sites qudits."""

    dim_per_site: int
    num_sites: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        d, q = self.dim_per_site, self.num_sites
        if d < 2 or q < 1:
            raise ValueError(f"invalid dimensions d={d}, q={q}")
        rho = np.array(self.entries, dtype=complex)
        dim = d**q
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        trace = complex(np.trace(rho))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        if float(np.min(np.linalg.eigvalsh(rho))) < EIGENVALUE_FLOOR:
            raise ValueError("density matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "entries", _freeze(rho))

    @property
    def dim(self) -> int:
        return self.dim_per_site**self.num_sites

    def overlap(self, state: StateVector) -> float:
        """Overlap <psi|rho|psi> with a pure state of matching dimensions."""
        if (state.dim_per_site, state.num_sites) != (self.dim_per_site, self.num_sites):
            raise ValueError("state and density matrix dimensions differ")
        v = state.amplitudes
        return float(np.real(np.vdot(v, self.entries @ v)))


@dataclass(frozen=True)
class UnitaryMatrix:
    """Square complex matrix with U U^dagger = identity within UNITARY_TOL."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        u = np.array(self.entries, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"unitary must be square, got shape {u.shape}")
        if not is_unitary(u, UNITARY_TOL):
            raise ValueError("matrix fails the unitarity check")
        object.__setattr__(self, "entries", _freeze(u))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, size: int) -> "UnitaryMatrix":
        return cls(np.eye(size, dtype=complex))

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries.conj().T)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of a projective measurement on a single site.

    post_state is the renormalized branch with the measured site removed, so
    it has one site fewer than the input state.
    """

    site: int
    outcome: int
    probability: float
    post_state: StateVector

    def __post_init__(self) -> None:
        if not -NORM_TOL <= self.probability <= 1.0 + NORM_TOL:
            raise ValueError(f"probability {self.probability!r} outside [0, 1]")


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product a (x) b; a's sites become the most significant digits."""
    if a.dim_per_site != b.dim_per_site:
        raise ValueError(
            f"dimension mismatch: {a.dim_per_site} vs {b.dim_per_site} levels per site"
        )
    return StateVector(
        a.dim_per_site,
        a.num_sites + b.num_sites,
        np.kron(a.amplitudes, b.amplitudes),
    )


def apply_gate(state: StateVector, gate: UnitaryMatrix, targets: Sequence[int]) -> StateVector:
    """Apply a gate to the given ordered target sites, identity elsewhere."""
    d, q = state.dim_per_site, state.num_sites
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target sites: {targets}")
    for t in targets:
        if not 0 <= t < q:
            raise ValueError(f"target site {t} out of range for {q} sites")
    k = len(targets)
    if gate.size != d**k:
        raise ValueError(f"gate size {gate.size} does not match d^{k} = {d**k}")
    psi = state.amplitudes.reshape([d] * q)
    g = gate.entries.reshape([d] * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets)
    return StateVector(d, q, out.reshape(-1))


def measure_site(
    state: StateVector,
    site: int,
    outcome: "int | None" = None,
    seed: Seed = 0,
) -> MeasurementRecord:
    """Projectively measure one site in the computational basis.

    With outcome=None the result is sampled, deterministically for a given
    seed; otherwise the stated outcome is forced. Forcing a branch whose
    probability is below ZERO_PROBABILITY is an error, since renormalizing a
    null branch is meaningless.
    """
    d, q = state.dim_per_site, state.num_sites
    if not 0 <= site < q:
        raise ValueError(f"site {site} out of range for {q} sites")
    if q == 1:
        raise ValueError("measuring the only site would leave an empty register")
    psi = np.moveaxis(state.amplitudes.reshape([d] * q), site, 0)
    probs = np.sum(np.abs(psi.reshape(d, -1)) ** 2, axis=1)
    if outcome is None:
        rng = np.random.default_rng(seed)
        outcome = int(rng.choice(d, p=probs / probs.sum()))
    else:
        if not 0 <= outcome < d:
            raise ValueError(f"forced outcome {outcome} out of range [0, {d})")
        if probs[outcome] < ZERO_PROBABILITY:
            raise ValueError(
                f"forced outcome {outcome} has probability {probs[outcome]:.3e} "
                f"below {ZERO_PROBABILITY}"
            )
    p = float(probs[outcome])
    branch = psi[outcome].reshape(-1) / np.sqrt(p)
    return MeasurementRecord(
        site=site,
        outcome=int(outcome),
        probability=p,
        post_state=StateVector(d, q - 1, branch),
    )


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, invariant under a global phase on either state."""
    if (a.dim_per_site, a.num_sites) != (b.dim_per_site, b.num_sites):
        raise ValueError("states have different dimensions")
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def partial_trace(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix over the kept sites (ascending site order)."""
    d, q = state.dim_per_site, state.num_sites
    kept = sorted(set(keep))
    if not kept:
        raise ValueError("keep set must be nonempty")
    for s in kept:
        if not 0 <= s < q:
            raise ValueError(f"kept site {s} out of range for {q} sites")
    psi = state.amplitudes.reshape([d] * q)
    moved = np.moveaxis(psi, kept, range(len(kept)))
    m = moved.reshape(d ** len(kept), -1)
    return DensityMatrix(d, len(kept), m @ m.conj().T)


def determinant(matrix) -> complex:
    """Determinant via LU factorization; relative accuracy ~1e-8 up to 125x125."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"determinant requires a square matrix, got shape {m.shape}")
    return complex(np.linalg.det(m))


def is_unitary(matrix, tol: float = UNITARY_TOL) -> bool:
    """True iff the max-entry deviation of M M^dagger from identity is <= tol."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"unitarity check requires a square matrix, got shape {m.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dev = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
    return bool(dev <= tol)
