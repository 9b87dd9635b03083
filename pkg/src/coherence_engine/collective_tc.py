"""Collective (Tavis-Cummings) charging of N qubits against one bath.

Used only for verification: the collective interaction conserves the total
excitation number, so it cannot charge coherence between degenerate
N-qubit states, and per-qubit sequential charging followed by activation
always does at least as well.  Everything is built densely and evolved
through a full eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coherence import energy_blocks, internal_coherence
from .engine_cycle import activated_internal_coherence
from .jc_charging import BathSpec, charged_qubit_state, coherent_bath_amplitudes, gibbs_qubit
from .operator_core import (
    DensityOperator,
    bath_labels,
    hermitian_eigensystem,
    partial_trace,
    qubit_labels,
    tensor_power,
)

MAX_TC_DIM = 4096


@dataclass(frozen=True)
class TCSpec:
    """Couplings are in units of the reference coupling g; ``gt`` is the dimensionless time.

    The bath keeps ``bath.d`` populated levels plus ``n_qubits`` empty ones,
    enough for every populated excitation sector to be complete.
    """

    n_qubits: int
    couplings: tuple
    bath: BathSpec
    gt: float
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        couplings = tuple(complex(g) for g in self.couplings)
        if len(couplings) != self.n_qubits:
            raise ValueError(f"{len(couplings)} couplings for {self.n_qubits} qubits")
        object.__setattr__(self, "couplings", couplings)

    @property
    def bath_dim(self) -> int:
        return self.bath.d + self.n_qubits

    @property
    def dim(self) -> int:
        return 2**self.n_qubits * self.bath_dim

    @classmethod
    def random(cls, n_qubits: int, beta_omega0: float, gt: float, seed: int, acc: float = 1e-8) -> "TCSpec":
        """Unit-modulus couplings with uniform phases from a seeded generator."""
        rng = np.random.default_rng(seed)
        phases = rng.uniform(0.0, 2 * np.pi, size=n_qubits)
        return cls(n_qubits, tuple(np.exp(1j * phases)), BathSpec(beta_omega0, acc=acc), gt, seed=seed)


def _check_dim(spec: TCSpec) -> None:
    if spec.dim > MAX_TC_DIM:
        raise ValueError(f"TC Hilbert space dimension {spec.dim} exceeds the cap {MAX_TC_DIM}")


def _qubit_raise(n: int, k: int) -> np.ndarray:
    """sigma_+ = |1><0| on qubit k (qubit 0 is the most significant factor)."""
    plus = np.array([[0.0, 0.0], [1.0, 0.0]])
    op = np.ones((1, 1))
    for j in range(n):
        op = np.kron(op, plus if j == k else np.eye(2))
    return op


def _annihilate(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1)


def joint_labels(spec: TCSpec) -> tuple[np.ndarray, np.ndarray]:
    return (qubit_labels(spec.n_qubits), bath_labels(spec.bath_dim))


def tc_interaction_hamiltonian(spec: TCSpec) -> np.ndarray:
    """sum_k g_k sigma_+^(k) a + conj(g_k) sigma_-^(k) a^dag on qubits (x) bath."""
    _check_dim(spec)
    a = _annihilate(spec.bath_dim)
    h = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    for k, g in enumerate(spec.couplings):
        term = g * np.kron(_qubit_raise(spec.n_qubits, k), a)
        h += term + term.conj().T
    return h


def free_hamiltonian_diagonal(spec: TCSpec) -> np.ndarray:
    """Diagonal of H_S + H_B in units of omega_0."""
    q, b = joint_labels(spec)
    return (q[:, None] + b[None, :]).ravel() / 2.0


def commutator_norm(spec: TCSpec) -> float:
    h = tc_interaction_hamiltonian(spec)
    e = free_hamiltonian_diagonal(spec)
    return float(np.abs(h * (e[None, :] - e[:, None])).max())


def initial_state(spec: TCSpec) -> DensityOperator:
    system = tensor_power(gibbs_qubit(spec.bath.beta_omega0), spec.n_qubits).matrix
    amp = np.zeros(spec.bath_dim)
    amp[: spec.bath.d] = coherent_bath_amplitudes(spec.bath)
    return DensityOperator(np.kron(system, np.outer(amp, amp)), factors=joint_labels(spec))


def tc_evolve(spec: TCSpec) -> DensityOperator:
    """Evolve Gibbs qubits (x) coherent bath by exp(-i H_I gt)."""
    rho0 = initial_state(spec)
    if spec.gt == 0:
        return rho0
    w, v = hermitian_eigensystem(tc_interaction_hamiltonian(spec))
    u = (v * np.exp(-1j * w * spec.gt)) @ v.conj().T
    return rho0.with_matrix(u @ rho0.matrix @ u.conj().T)


def reduced_system(spec: TCSpec, joint: DensityOperator | None = None) -> DensityOperator:
    joint = tc_evolve(spec) if joint is None else joint
    return partial_trace(joint, 2**spec.n_qubits, spec.bath_dim, keep="A")


def block_proportionality_residual(rho: DensityOperator) -> float:
    """max over energy blocks of |P rho P - (Tr[P rho] / dim P) P|."""
    worst = 0.0
    for idx in energy_blocks(rho.labels):
        block = rho.matrix[np.ix_(idx, idx)]
        target = np.trace(block).real / idx.size * np.eye(idx.size)
        worst = max(worst, float(np.abs(block - target).max()))
    return worst


def diagonal_deviation(rho: DensityOperator, n_qubits: int, beta_omega0: float) -> float:
    target = np.diag(tensor_power(gibbs_qubit(beta_omega0), n_qubits).matrix).real
    return float(np.abs(np.diag(rho.matrix).real - target).max())


@dataclass(frozen=True)
class Observation2Result:
    c_int: float
    block_residual: float
    diagonal_residual: float


def observation2_check(spec: TCSpec) -> Observation2Result:
    """Internal coherence and block structure of the collectively charged qubits."""
    if spec.n_qubits < 2:
        raise ValueError("observation 2 concerns at least two qubits")
    rho = reduced_system(spec)
    return Observation2Result(
        c_int=internal_coherence(rho),
        block_residual=block_proportionality_residual(rho),
        diagonal_residual=diagonal_deviation(rho, spec.n_qubits, spec.bath.beta_omega0),
    )


def sequential_vs_collective(n: int, beta_omega0: float, gt_grid, couplings=None) -> list[dict]:
    """Activated C_int of n sequentially charged qubits against collective charging."""
    if n < 2:
        raise ValueError("comparison needs at least two qubits")
    couplings = (1.0,) * n if couplings is None else tuple(couplings)
    bath = BathSpec(beta_omega0)
    rows = []
    for gt in gt_grid:
        gt = float(gt)
        sequential = activated_internal_coherence(charged_qubit_state(beta_omega0, gt, bath).rho_s, n)
        collective = internal_coherence(reduced_system(TCSpec(n, couplings, bath, gt)))
        rows.append({"N": n, "beta_omega0": beta_omega0, "gt": gt, "sequential_c_int": sequential, "collective_c_int": collective})
    return rows
