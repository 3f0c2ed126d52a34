"""Numerical infeasibility engine for compressing equatorial phase information.

The question: can a unitary on n + p qudits map every product of n
d-dimensional equatorial states (times |0>^p ancillas) to a state of the form
(m-qudit output) (x) |0>^(n-m+p)? Writing out the forbidden output rows gives
one linear constraint per (row, phase assignment) pair on the matrix entries
u[a, (j_1..j_n, 0..0)].

Sampling each qudit's phase ladder as phi_{k_j} = j * 2*pi*t_k / d over all
t in [0,d)^n turns the constraints into a d^n x d^n coefficient matrix whose
(t, j) entry is prod_k omega^(t_k * j_k), omega = e^{2*pi*i/d}: the n-fold
Kronecker power of the d x d root-of-unity Vandermonde matrix. That matrix is
nonsingular (its columns are orthogonal with squared norm d^n), so the only
solution is the zero block: the constrained columns must vanish on every
constrained row. Counting then finishes the job: the d^n sampled inputs are
mutually orthogonal, but columns supported on d^m < d^n shared rows cannot be
orthonormal.

Everything here is a falsifier. "feasible-not-excluded" never claims that a
compressor exists; only n <= m has a known feasible point (the identity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .protocols import EquatorialSpec, equatorial_state
from .states import StateVector, UnitaryMatrix, determinant, tensor

MIN_D, MAX_D = 2, 5
MIN_N, MAX_N = 1, 3
MAX_MATRIX_SIZE = 125
CONSTRUCTION_TOL = 1e-12
GRAM_TOL = 1e-10
RESIDUAL_TOL = 1e-8
SUPPORT_TOL = 1e-10

INFEASIBLE = "infeasible"
FEASIBLE_NOT_EXCLUDED = "feasible-not-excluded"

WITNESS_GRAM_RANK = "gram-rank"
WITNESS_SUPPORT = "support-structure"


@dataclass(frozen=True)
class PhaseVector:
    """n x d array of phase angles, row k holding qudit k's ladder phi_{k_j}."""

    d: int
    n: int
    angles: np.ndarray

    def __post_init__(self) -> None:
        if self.d < 2 or self.n < 1:
            raise ValueError(f"invalid sizes d={self.d}, n={self.n}")
        angles = np.array(self.angles, dtype=float)
        if angles.shape != (self.n, self.d):
            raise ValueError(
                f"expected angle array of shape ({self.n}, {self.d}), got {angles.shape}"
            )
        if np.any(angles < 0.0) or np.any(angles >= 2.0 * np.pi):
            raise ValueError("angles must lie in [0, 2*pi)")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)


@dataclass(frozen=True)
class CompressionScenario:
    """n input qudits of dimension d, m output qudits, p ancilla qudits."""

    d: int
    n: int
    m: int
    p: int = 0

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < 0 or self.p < 0:
            raise ValueError(f"m and p must be >= 0, got m={self.m}, p={self.p}")

    @property
    def total_sites(self) -> int:
        return self.n + self.p

    @property
    def matrix_size(self) -> int:
        return self.d**self.total_sites


@dataclass(frozen=True)
class ConstraintSystem:
    """Coefficient matrix of the sampled phase constraints plus its index maps.

    Row (t_1..t_n) and column (j_1..j_n) hold prod_k omega^(t_k * j_k); both
    multi-indices are flattened big-endian (first component most significant).
    """

    d: int
    n: int
    matrix: np.ndarray
    row_index_map: Mapping[tuple, int]
    column_index_map: Mapping[tuple, int]
    construction_mismatch: float

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        size = self.d**self.n
        if matrix.shape != (size, size):
            raise ValueError(f"expected a {size}x{size} matrix, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Machine-checkable verdict for one compression scenario."""

    scenario: CompressionScenario
    verdict: str
    witness_kind: str
    evidence: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.verdict not in (INFEASIBLE, FEASIBLE_NOT_EXCLUDED):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.witness_kind not in (WITNESS_GRAM_RANK, WITNESS_SUPPORT):
            raise ValueError(f"unknown witness kind {self.witness_kind!r}")
        if self.verdict == INFEASIBLE and self.scenario.n <= self.scenario.m:
            raise ValueError("infeasible verdict requires n > m")


def _check_sizes(d: int, n: int) -> None:
    if not MIN_D <= d <= MAX_D:
        raise ValueError(f"d must be in {MIN_D}..{MAX_D}, got {d}")
    if not MIN_N <= n <= MAX_N:
        raise ValueError(f"n must be in {MIN_N}..{MAX_N}, got {n}")
    if d**n > MAX_MATRIX_SIZE:
        raise ValueError(f"d^n = {d**n} exceeds the supported size {MAX_MATRIX_SIZE}")


def _digit_table(d: int, n: int) -> np.ndarray:
    """(d^n, n) array of big-endian base-d digit expansions of 0..d^n - 1."""
    idx = np.arange(d**n)
    digits = np.empty((d**n, n), dtype=np.int64)
    for k in range(n - 1, -1, -1):
        digits[:, k] = idx % d
        idx = idx // d
    return digits


def _block_recursion(d: int, n: int) -> np.ndarray:
    """Grow the constraint matrix one qudit at a time from the d x d base case."""
    omega = np.exp(2.0j * np.pi / d)
    base = np.array([[omega ** (t * j) for j in range(d)] for t in range(d)])
    matrix = base
    for _ in range(1, n):
        matrix = np.block([[matrix * omega ** (t * j) for j in range(d)] for t in range(d)])
    return matrix


def build_constraint_system(d: int, n: int) -> ConstraintSystem:
    """Build the d^n x d^n constraint matrix two independent ways and cross-check.

    The direct route evaluates the entry formula e^{2*pi*i (sum_k t_k j_k)/d};
    the second grows the matrix by the block recursion, one qudit per level.
    A disagreement above CONSTRUCTION_TOL aborts.
    """
    _check_sizes(d, n)
    digits = _digit_table(d, n)
    direct = np.exp(2.0j * np.pi * (digits @ digits.T) / d)
    recursive = _block_recursion(d, n)
    mismatch = float(np.max(np.abs(direct - recursive)))
    if mismatch > CONSTRUCTION_TOL:
        raise RuntimeError(
            f"constraint matrix constructions disagree by {mismatch:.3e} for d={d}, n={n}"
        )
    index_map = {tuple(int(v) for v in row): i for i, row in enumerate(digits)}
    return ConstraintSystem(
        d=d,
        n=n,
        matrix=direct,
        row_index_map=index_map,
        column_index_map=dict(index_map),
        construction_mismatch=mismatch,
    )


def vandermonde_base_magnitude(d: int) -> float:
    """prod_{0 <= k < l < d} |omega^k - omega^l| for omega = e^{2*pi*i/d}."""
    omega = np.exp(2.0j * np.pi / d)
    result = 1.0
    for k in range(d):
        for l in range(k + 1, d):
            result *= abs(omega**k - omega**l)
    return float(result)


@dataclass(frozen=True)
class ConstraintMatrixCheck:
    """Evidence that the sampled constraint matrix is nonsingular.

    nonsingular is exactly |det| > tol. The oracle magnitude is the base
    Vandermonde product raised to n * d^(n-1), the determinant of an n-fold
    Kronecker power; min_normalized_row_residual is the smallest max-row
    value of |A x| / ||x|| seen over random nonzero coefficient vectors, and
    zero_solution_norm is the size of the solution of A x = 0.
    """

    d: int
    n: int
    tol: float
    nonsingular: bool
    det_magnitude: float
    oracle_magnitude: float
    oracle_relative_gap: float
    construction_mismatch: float
    min_singular_value: float
    zero_solution_norm: float
    min_normalized_row_residual: float


def verify_constraint_matrix(d: int, n: int, tol: float = 1e-6) -> ConstraintMatrixCheck:
    """Check nonsingularity of the constraint matrix against independent oracles.

    Cross-checks |det| against the Kronecker-power oracle, confirms the only
    solution of A x = 0 is x = 0, and probes 50 random nonzero coefficient
    vectors: each must violate at least one sampled constraint. Magnitudes
    only; no sign convention of the Vandermonde product is relied on.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    system = build_constraint_system(d, n)
    a = system.matrix
    det_magnitude = abs(determinant(a))
    oracle = vandermonde_base_magnitude(d) ** (n * d ** (n - 1))
    singular_values = np.linalg.svd(a, compute_uv=False)
    zero_solution = np.linalg.solve(a, np.zeros(a.shape[0], dtype=complex))
    rng = np.random.default_rng(7)
    worst = np.inf
    size = a.shape[0]
    for _ in range(50):
        x = rng.normal(size=size) + 1j * rng.normal(size=size)
        worst = min(worst, float(np.max(np.abs(a @ x)) / np.linalg.norm(x)))
    return ConstraintMatrixCheck(
        d=d,
        n=n,
        tol=float(tol),
        nonsingular=bool(det_magnitude > tol),
        det_magnitude=float(det_magnitude),
        oracle_magnitude=float(oracle),
        oracle_relative_gap=float(abs(det_magnitude - oracle) / oracle),
        construction_mismatch=system.construction_mismatch,
        min_singular_value=float(singular_values[-1]),
        zero_solution_norm=float(np.max(np.abs(zero_solution))),
        min_normalized_row_residual=worst,
    )


def phase_assignment_grid(d: int, n: int) -> np.ndarray:
    """(d^n, n, d) grid of ladder assignments phi_{k_j} = j * 2*pi*t_k / d.

    Row order matches the constraint-matrix rows: entry t of the grid is the
    big-endian expansion (t_1..t_n).
    """
    _check_sizes(d, n)
    ladders = np.outer(np.arange(d), 2.0 * np.pi * np.arange(d) / d) % (2.0 * np.pi)
    return ladders[_digit_table(d, n)]


def _candidate_matrix(candidate, size: int) -> np.ndarray:
    entries = candidate.entries if isinstance(candidate, UnitaryMatrix) else candidate
    u = np.asarray(entries, dtype=complex)
    if u.shape != (size, size):
        raise ValueError(f"candidate must be {size}x{size}, got shape {u.shape}")
    return u


def _sample_angles(sample, d: int, n: int) -> np.ndarray:
    angles = sample.angles if isinstance(sample, PhaseVector) else np.asarray(sample, dtype=float)
    if angles.shape != (n, d):
        raise ValueError(f"phase sample must have shape ({n}, {d}), got {angles.shape}")
    return angles


def constraint_residual(candidate, scenario: CompressionScenario, phase_samples) -> float:
    """Worst violation of the forbidden-output constraints over the samples.

    For each sample and each output row whose trailing n + p - m digits are
    not all zero, evaluates |sum_j prod_k e^{i*phi_{k_{j_k}}} u[a, (j, 0^p)]|
    and returns the maximum. Zero means every sampled constraint is met; the
    maximum over an empty constraint set (n = m, p = 0) is defined as 0.
    """
    d, n, m, p = scenario.d, scenario.n, scenario.m, scenario.p
    if m > scenario.total_sites:
        raise ValueError(f"m = {m} exceeds the {scenario.total_sites} available qudits")
    size = scenario.matrix_size
    u = _candidate_matrix(candidate, size)
    samples = list(phase_samples)
    if not samples:
        raise ValueError("phase_samples must be nonempty")
    tail = d ** (scenario.total_sites - m)
    rows = np.flatnonzero(np.arange(size) % tail != 0)
    if rows.size == 0:
        return 0.0
    columns = np.arange(d**n) * d**p
    block = u[np.ix_(rows, columns)]
    digits = _digit_table(d, n)
    site_index = np.arange(n)[None, :]
    worst = 0.0
    for sample in samples:
        angles = _sample_angles(sample, d, n)
        coeff = np.exp(1j * angles[site_index, digits].sum(axis=1))
        worst = max(worst, float(np.max(np.abs(block @ coeff))))
    return worst


def _witness_states(d: int, n: int) -> np.ndarray:
    """(d^n, d^n) array whose rows are the sampled equatorial product states."""
    vectors = []
    for assignment in product(range(d), repeat=n):
        state: StateVector | None = None
        for t in assignment:
            ladder = tuple((2.0 * np.pi * t * j / d) % (2.0 * np.pi) for j in range(d))
            factor = equatorial_state(EquatorialSpec(d, ladder))
            state = factor if state is None else tensor(state, factor)
        vectors.append(state.amplitudes)
    return np.array(vectors)


def orthogonality_witness(scenario: CompressionScenario) -> InfeasibilityCertificate:
    """Counting verdict: d^n orthogonal inputs cannot fit in d^m dimensions.

    Builds the d^n sampled equatorial product states, confirms numerically
    that they are orthonormal, and rules the scenario infeasible when n > m:
    a unitary preserves orthogonality, but outputs of the form
    psi (x) |0...0> span at most d^m dimensions.
    """
    d, n, m = scenario.d, scenario.n, scenario.m
    _check_sizes(d, n)
    vectors = _witness_states(d, n)
    gram = vectors.conj() @ vectors.T
    deviation = float(np.max(np.abs(gram - np.eye(d**n))))
    if deviation > GRAM_TOL:
        raise RuntimeError(f"witness states failed the orthonormality check ({deviation:.3e})")
    evidence = {
        "gram_max_deviation": deviation,
        "orthogonal_inputs": float(d**n),
        "orthogonal_capacity": float(d**m),
    }
    verdict = INFEASIBLE if n > m else FEASIBLE_NOT_EXCLUDED
    return InfeasibilityCertificate(scenario, verdict, WITNESS_GRAM_RANK, evidence)


def support_structure_check(
    candidate,
    scenario: CompressionScenario,
    residual_tol: float = RESIDUAL_TOL,
    support_tol: float = SUPPORT_TOL,
) -> InfeasibilityCertificate:
    """Rank verdict for a candidate matrix that satisfies the constraints.

    A candidate is first screened against the full phase-assignment grid; if
    its residual exceeds residual_tol the check abstains. Otherwise the d^n
    columns (j_1..j_n, 0^p) can only be supported on rows with an all-zero
    trailing block. If that union of supports has at most d^m rows while
    n > m, the column block has rank at most d^m < d^n, so the candidate
    cannot be unitary.
    """
    d, n, m, p = scenario.d, scenario.n, scenario.m, scenario.p
    size = scenario.matrix_size
    u = _candidate_matrix(candidate, size)
    grid = phase_assignment_grid(d, n)
    residual = constraint_residual(u, scenario, grid)
    evidence = {"grid_residual": residual, "residual_tol": residual_tol}
    if residual > residual_tol:
        return InfeasibilityCertificate(
            scenario, FEASIBLE_NOT_EXCLUDED, WITNESS_SUPPORT, evidence
        )
    columns = np.arange(d**n) * d**p
    block = u[:, columns]
    support = np.flatnonzero(np.max(np.abs(block), axis=1) > support_tol)
    evidence.update(
        {
            "support_size": float(support.size),
            "support_limit": float(d**m),
            "required_rank": float(d**n),
            "block_rank": float(np.linalg.matrix_rank(block)),
        }
    )
    if n > m and support.size <= d**m:
        return InfeasibilityCertificate(scenario, INFEASIBLE, WITNESS_SUPPORT, evidence)
    return InfeasibilityCertificate(scenario, FEASIBLE_NOT_EXCLUDED, WITNESS_SUPPORT, evidence)


def narrow_support_candidate(scenario: CompressionScenario) -> np.ndarray:
    """Best-effort constraint-satisfying matrix supported on d^m rows.

    Fills the (j_1..j_n, 0^p) columns with nonzero entries on exactly the
    d^m rows whose trailing digits vanish and leaves everything else zero, so
    the grid residual is exactly 0 while the support stays maximally narrow.
    Deliberately not unitary for n > m; that is the point.
    """
    d, n, m, p = scenario.d, scenario.n, scenario.m, scenario.p
    if m > scenario.total_sites:
        raise ValueError(f"m = {m} exceeds the {scenario.total_sites} available qudits")
    size = scenario.matrix_size
    tail = d ** (scenario.total_sites - m)
    rows = np.arange(d**m) * tail
    columns = np.arange(d**n) * d**p
    u = np.zeros((size, size), dtype=complex)
    fill = np.exp(
        2.0j * np.pi * np.outer(np.arange(d**m), np.arange(d**n)) / max(d**n, 1)
    ) / np.sqrt(d**m)
    u[np.ix_(rows, columns)] = fill
    return u
