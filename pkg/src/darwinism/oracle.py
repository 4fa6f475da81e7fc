"""Dense-state oracle: ground truth for every closed form at small sizes.

States are explicit amplitude vectors over (system qubit 0) x (environment
qubits 1..N).  Entropies come from the spectrum of the reduced state, always
computed on the smaller side of the bipartition, so enumerating all fragments
of a 12-spin environment stays fast.  Eigenvalues below 1e-12 contribute
exactly zero entropy.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import OracleCapError, SpecValidationError

STATE_CAP_DEFAULT = 14       # environment qubits in a dense state
DENSITY_CAP = 12             # qubits in an explicit density matrix
ORACLE_CAP_ENV = "DARWINISM_ORACLE_CAP"
_EIGENVALUE_FLOOR = 1e-12
_NORM_TOL = 1e-12

QUANTITIES = ("mutual-information", "holevo")


def state_qubit_cap() -> int:
    """Environment-qubit cap for dense states; overridable via the env var."""
    raw = os.environ.get(ORACLE_CAP_ENV)
    if raw is None:
        return STATE_CAP_DEFAULT
    try:
        cap = int(raw)
    except ValueError as err:
        raise OracleCapError(f"{ORACLE_CAP_ENV} must be an integer, got {raw!r}") from err
    if cap < 1:
        raise OracleCapError(f"{ORACLE_CAP_ENV} must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class DenseState:
    """Normalized amplitude vector with per-spin overlap bookkeeping.

    amplitudes has length 2**(1+N); qubit 0 is the system.  gammas holds the
    per-spin conditional-state overlaps used to build the state, |gamma| <= 1.
    """

    amplitudes: np.ndarray
    gammas: tuple[complex, ...]

    def __post_init__(self):
        n = len(self.gammas)
        if n < 1:
            raise SpecValidationError("environment needs at least one spin")
        if n > state_qubit_cap():
            raise OracleCapError(
                f"{n} environment qubits exceed the cap {state_qubit_cap()}"
            )
        if self.amplitudes.shape != (2 ** (1 + n),):
            raise SpecValidationError(
                f"amplitude length {self.amplitudes.shape} does not match "
                f"{n} environment qubits"
            )
        norm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm2 - 1.0) > _NORM_TOL:
            raise SpecValidationError(f"state norm^2 = {norm2!r} is not 1")

    @property
    def n_env(self) -> int:
        return len(self.gammas)

    @property
    def roles(self) -> tuple[str, ...]:
        return tuple("bad" if abs(g) == 1.0 else "good" for g in self.gammas)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * (1 + self.n_env))


@dataclass(frozen=True)
class DensityMatrix:
    """Explicit reduced density matrix over a labeled qubit subset."""

    matrix: np.ndarray
    qubits: tuple[int, ...]

    def __post_init__(self):
        m = self.matrix
        if m.shape != (2 ** len(self.qubits),) * 2:
            raise SpecValidationError("matrix shape does not match qubit labels")
        if not np.allclose(m, m.conj().T, atol=1e-12):
            raise SpecValidationError("density matrix is not hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise SpecValidationError("density matrix trace is not 1")
        ev = np.linalg.eigvalsh(m)
        if ev.min() < -1e-10 or ev.max() > 1.0 + 1e-10:
            raise SpecValidationError("eigenvalues outside [0, 1]")

    def entropy_bits(self) -> float:
        return _entropy_from_eigenvalues(np.linalg.eigvalsh(self.matrix))


def _entropy_from_eigenvalues(evals: np.ndarray) -> float:
    ev = evals[evals > _EIGENVALUE_FLOOR]
    if ev.size == 0:
        return 0.0
    return float(-(ev * np.log2(ev)).sum())


def _single_spin_pair(gamma: complex) -> tuple[np.ndarray, np.ndarray]:
    """Conditional single-spin states with inner product gamma, in a fixed span."""
    mag2 = abs(gamma) ** 2
    if mag2 > 1.0 + 1e-12:
        raise SpecValidationError(f"overlap magnitude above 1: {gamma!r}")
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([gamma, math.sqrt(max(0.0, 1.0 - mag2))], dtype=complex)
    return e0, e1


def build_branch_state(p0: float, gammas: Sequence[complex]) -> DenseState:
    """Two-branch state sqrt(p0)|0>|e0...> + sqrt(1-p0)|1>|e1...>.

    Per-spin conditional states satisfy <e0_k|e1_k> = gamma_k; gamma 0 for
    every good spin and 1 for every bad spin gives the perfectly recorded
    GHZ-times-product state.
    """
    if not (0.0 <= p0 <= 1.0):
        raise SpecValidationError(f"probability out of range: p0={p0!r}")
    branch0 = np.array([1.0], dtype=complex)
    branch1 = np.array([1.0], dtype=complex)
    for g in gammas:
        e0, e1 = _single_spin_pair(g)
        branch0 = np.kron(branch0, e0)
        branch1 = np.kron(branch1, e1)
    amps = np.concatenate([math.sqrt(p0) * branch0, math.sqrt(1.0 - p0) * branch1])
    return DenseState(amplitudes=amps, gammas=tuple(complex(g) for g in gammas))


def branch_state(spec) -> DenseState:
    """Dense state realizing an EnvironmentSpec: good spins first, then bad.

    Per-spin overlaps are the non-negative square roots of the spec's squared
    overlaps, so every closed form built on the spec applies verbatim.
    """
    gammas = [math.sqrt(spec.gamma2_good)] * spec.n_good + [
        math.sqrt(spec.gamma2_bad)
    ] * spec.n_bad
    return build_branch_state(spec.p0, gammas)


def evolve_pure_decoherence(couplings: Sequence[float], t: float) -> DenseState:
    """Evolve the dephasing model and return the state in branch-canonical form.

    Interaction g_k between the system z axis and spin k; spins with g_k != 0
    start in |+>, inert spins in |0>, the system in (|0>+|1>)/sqrt(2).  The
    Hamiltonian is diagonal per branch, so evolution is direct phase
    application; each spin's conditional pair (overlap cos(2 g_k t)) is then
    rotated into the fixed span used by build_branch_state, which the result
    must match to machine precision.
    """
    n = len(couplings)
    if n < 1:
        raise SpecValidationError("environment needs at least one spin")
    if n > state_qubit_cap():
        raise OracleCapError(f"{n} environment qubits exceed the cap {state_qubit_cap()}")

    inits = [
        np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
        if g != 0.0
        else np.array([1.0, 0.0], dtype=complex)
        for g in couplings
    ]
    state = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    for v in inits:
        state = np.kron(state, v)
    psi = state.reshape([2] * (1 + n))

    # phases exp(-i t g_k z_S z_k) with z = +1 for |0>, -1 for |1>
    z_env_sum = np.zeros([2] * n)
    for k, g in enumerate(couplings):
        shape = [1] * n
        shape[k] = 2
        z_env_sum = z_env_sum + np.array([g, -g]).reshape(shape)
    energy = np.array([1.0, -1.0]).reshape([2] + [1] * n) * z_env_sum
    psi = psi * np.exp(-1j * t * energy)

    gammas = []
    for k, g in enumerate(couplings):
        phase = np.exp(-1j * g * t * np.array([1.0, -1.0]))
        e0 = phase * inits[k]
        e1 = phase.conj() * inits[k]
        gamma = complex(np.vdot(e0, e1))
        gammas.append(gamma)
        psi = _apply_single_qubit(psi, _frame_rotation(e0, e1, gamma), axis=1 + k)

    amps = psi.reshape(-1)
    amps = amps / math.sqrt(float(np.vdot(amps, amps).real))
    return DenseState(amplitudes=amps, gammas=tuple(gammas))


def _frame_rotation(e0: np.ndarray, e1: np.ndarray, gamma: complex) -> np.ndarray:
    """Unitary mapping the pair (e0, e1) onto the fixed-span canonical pair."""
    u0 = e0
    residual = e1 - gamma * e0
    res_norm = float(np.linalg.norm(residual))
    if res_norm > 1e-9:
        u1 = residual / res_norm
    else:
        u1 = np.array([-np.conj(e0[1]), np.conj(e0[0])], dtype=complex)
    return np.vstack([u0.conj(), u1.conj()])


def _apply_single_qubit(psi: np.ndarray, u: np.ndarray, axis: int) -> np.ndarray:
    out = np.tensordot(u, psi, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def fidelity(a: DenseState, b: DenseState) -> float:
    """|<a|b>|^2 between two pure dense states."""
    if a.amplitudes.shape != b.amplitudes.shape:
        raise SpecValidationError("states have different qubit counts")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def _check_subset(state: DenseState, subset: Iterable[int], allow_system: bool) -> list[int]:
    qubits = sorted(set(int(q) for q in subset))
    lo = 0 if allow_system else 1
    for q in qubits:
        if q < lo or q > state.n_env:
            raise SpecValidationError(f"qubit {q} outside the valid range [{lo}, {state.n_env}]")
    return qubits


def _bipartition_matrix(state: DenseState, subset: list[int]) -> np.ndarray:
    """Amplitudes as a (2^|subset|, 2^|rest|) matrix, subset axes leading."""
    rest = [q for q in range(1 + state.n_env) if q not in subset]
    return np.transpose(state.tensor(), subset + rest).reshape(2 ** len(subset), -1)


def subset_entropy(state: DenseState, subset: Iterable[int]) -> float:
    """Von Neumann entropy in bits of the reduced state on a qubit subset.

    Spectrum taken from the Gram matrix of the smaller bipartition side; for
    a globally pure state this equals the complement's entropy, which makes
    large-fragment entropies cheap.
    """
    qubits = _check_subset(state, subset, allow_system=True)
    m = _bipartition_matrix(state, qubits)
    if m.shape[0] <= m.shape[1]:
        gram = m @ m.conj().T
    else:
        gram = m.conj().T @ m
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(gram))


def reduced_density(state: DenseState, subset: Iterable[int]) -> DensityMatrix:
    """Partial trace onto a qubit subset as an explicit DensityMatrix."""
    qubits = _check_subset(state, subset, allow_system=True)
    if len(qubits) > DENSITY_CAP:
        raise OracleCapError(
            f"subset of {len(qubits)} qubits exceeds the density cap {DENSITY_CAP}"
        )
    m = _bipartition_matrix(state, qubits)
    return DensityMatrix(matrix=m @ m.conj().T, qubits=tuple(qubits))


def mutual_information(state: DenseState, fragment: Iterable[int]) -> float:
    """I(system : fragment) = H_S + H_F - H_SF in bits."""
    frag = _check_subset(state, fragment, allow_system=False)
    h_s = subset_entropy(state, [0])
    h_f = subset_entropy(state, frag)
    h_sf = subset_entropy(state, [0] + frag)
    return max(h_s + h_f - h_sf, 0.0)


def holevo_and_discord(state: DenseState, fragment: Iterable[int]) -> tuple[float, float]:
    """Pointer-basis Holevo quantity and discord of a fragment.

    chi = H(rho_F) - sum_s p_s H(rho_F|s) with conditional states taken in
    the z basis of the system qubit; discord is I - chi.  Conditional
    entropies are computed, not assumed zero, so any non-branch state would
    be measured honestly.
    """
    frag = _check_subset(state, fragment, allow_system=False)
    rest = [q for q in range(1, state.n_env + 1) if q not in frag]
    t = np.transpose(state.tensor(), [0] + frag + rest).reshape(
        2, 2 ** len(frag), -1
    )
    blocks = [t[0], t[1]]
    probs = [float(np.vdot(b, b).real) for b in blocks]

    stacked = np.concatenate(blocks, axis=1)
    if stacked.shape[0] <= stacked.shape[1]:
        gram_f = stacked @ stacked.conj().T
    else:
        gram_f = stacked.conj().T @ stacked
    h_f = _entropy_from_eigenvalues(np.linalg.eigvalsh(gram_f))

    h_cond = 0.0
    for b, p in zip(blocks, probs):
        if p < 1e-14:
            continue
        if b.shape[0] <= b.shape[1]:
            gram = b @ b.conj().T
        else:
            gram = b.conj().T @ b
        h_cond += p * _entropy_from_eigenvalues(np.linalg.eigvalsh(gram) / p)

    chi = max(h_f - h_cond, 0.0)
    h_s = subset_entropy(state, [0])
    h_sf = subset_entropy(state, [0] + frag)
    mi = max(h_s + h_f - h_sf, 0.0)
    return chi, mi - chi


def all_fragment_average(state: DenseState, fragment_size: int, quantity: str) -> float:
    """Unweighted mean of a quantity over every fragment of the given size.

    Honest enumeration over all C(N, size) subsets; this is the ground truth
    the combinatorial averages are checked against, so no permutation
    shortcut is taken.
    """
    if quantity not in QUANTITIES:
        raise SpecValidationError(f"unknown quantity {quantity!r}")
    if not (0 <= fragment_size <= state.n_env):
        raise SpecValidationError(
            f"fragment_size {fragment_size} outside [0, {state.n_env}]"
        )
    if fragment_size == 0:
        return 0.0
    total = 0.0
    count = 0
    for frag in combinations(range(1, state.n_env + 1), fragment_size):
        if quantity == "holevo":
            total += holevo_and_discord(state, frag)[0]
        else:
            total += mutual_information(state, frag)
        count += 1
    return total / count
