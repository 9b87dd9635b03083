"""Coherence charging of one qubit by a coherent Gibbs bosonic bath.

The resonant Jaynes-Cummings interaction conserves the excitation number
``m`` (qubit excitation plus bath quanta), so the interaction-picture
propagator is a direct sum of 2x2 rotations on ``span{|1, m-1>, |0, m>}``
plus the invariant ground state ``|0, 0>``.  It is applied here sector by
sector, never through a matrix exponential, so it stays exactly unitary on
the truncated space.  The free evolution ``exp(-i (H_S + H_B) t)`` is
diagonal in the energy basis and is dropped; no reported quantity depends
on it.

All energies are in units of ``omega_0`` and times enter only through the
dimensionless product ``gt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .operator_core import (
    DensityOperator,
    bath_labels,
    entropy_from_eigenvalues,
    qubit_labels,
    trace_distance,
)

DEFAULT_ACC = 1e-8
DEFAULT_MARGIN = 5


def qubit_partition(beta_omega0: float) -> float:
    return 1.0 + math.exp(-beta_omega0)


def bath_partition(beta_omega0: float) -> float:
    """Partition function of the untruncated harmonic bath."""
    return 1.0 / -math.expm1(-beta_omega0)


def gibbs_qubit(beta_omega0: float) -> DensityOperator:
    z = qubit_partition(beta_omega0)
    return DensityOperator(np.diag([1.0 / z, math.exp(-beta_omega0) / z]), qubit_labels(1))


def coherent_qubit(beta_omega0: float) -> DensityOperator:
    """The pure state (|0> + exp(-beta w0 / 2)|1>) / sqrt(Z_S)."""
    v = np.array([1.0, math.exp(-beta_omega0 / 2)]) / math.sqrt(qubit_partition(beta_omega0))
    return DensityOperator(np.outer(v, v), qubit_labels(1))


def effective_bath_dimension(beta_omega0: float, acc: float = DEFAULT_ACC) -> int:
    """Smallest bath truncation certified to reach accuracy ``acc``."""
    if not beta_omega0 > 0:
        raise ValueError(f"beta_omega0 must be positive, got {beta_omega0}")
    if not 0 < acc < 1:
        raise ValueError(f"acc must lie in (0, 1), got {acc}")
    half = beta_omega0 / 2
    log_term = math.log(acc) + math.log(math.exp(-half) + math.exp(half))
    value = -(1.0 + log_term / beta_omega0)
    return max(1, math.ceil(value))


@dataclass(frozen=True)
class BathSpec:
    """Truncation of the coherent Gibbs bath.

    ``d`` is the number of populated bath levels.  By default it is the
    effective dimension for ``acc`` plus ``margin`` extra levels.
    """

    beta_omega0: float
    acc: float = DEFAULT_ACC
    d: int | None = None
    margin: int = DEFAULT_MARGIN

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be non-negative")
        d_min = effective_bath_dimension(self.beta_omega0, self.acc)
        if self.d is None:
            object.__setattr__(self, "d", d_min + self.margin)
        elif self.d < d_min:
            raise ValueError(f"d = {self.d} is below the effective bath dimension {d_min}")

    @property
    def truncation_weight(self) -> float:
        """Boltzmann weight of the discarded levels n >= d."""
        return math.exp(-self.beta_omega0 * self.d)


def series_remainder_bound(beta_omega0: float, n: int, gt: float, prefactor: bool = True) -> float:
    """Upper bound on the tail of the coherence-amplitude series after term ``n``.

    Bounds ``|sum_{p > n} c_p|`` by ``m_{n+1} / (1 - r)`` with
    ``r = exp(-beta w0)``, where ``m_p >= |c_p|`` replaces the sine by
    ``min(1, gt (sqrt(p+1) - sqrt(p)))``.  That envelope has ratio at most
    ``r`` for every ``p``, which keeps the geometric argument rigorous even
    where the sine itself passes through zero.
    """
    if not beta_omega0 > 0:
        raise ValueError(f"beta_omega0 must be positive, got {beta_omega0}")
    p = n + 1
    gap = math.sqrt(p + 1) - math.sqrt(p)
    envelope = min(1.0, abs(gt) * gap)
    pre = math.exp(-beta_omega0 / 2) if prefactor else 1.0
    term = pre * math.exp(-beta_omega0 * p) * envelope / bath_partition(beta_omega0)
    return term / -math.expm1(-beta_omega0)


def coherence_amplitude(beta_omega0: float, gt: float, d: int, prefactor: bool = True) -> complex:
    """Partial sum over p < d of the charged coherence amplitude.

    ``prefactor=True`` includes the factor exp(-beta w0 / 2) that the exact
    evolution produces; ``prefactor=False`` gives the bare series, which
    does not describe the evolved state and is kept for comparison only.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    p = np.arange(d, dtype=float)
    terms = np.exp(-beta_omega0 * p) * np.sin(gt * (np.sqrt(p + 1) - np.sqrt(p)))
    total = math.fsum(terms.tolist()) / bath_partition(beta_omega0)
    if prefactor:
        total *= math.exp(-beta_omega0 / 2)
    return 1j * total


def charged_state_matrix(beta_omega0: float, delta: complex) -> np.ndarray:
    z = qubit_partition(beta_omega0)
    return np.array(
        [[1.0 / z, delta / z], [np.conj(delta) / z, math.exp(-beta_omega0) / z]],
        dtype=np.complex128,
    )


def coherent_bath_amplitudes(spec: BathSpec) -> np.ndarray:
    amp = np.exp(-spec.beta_omega0 * np.arange(spec.d) / 2)
    return amp / np.linalg.norm(amp)


def coherent_bath_state(spec: BathSpec) -> DensityOperator:
    amp = coherent_bath_amplitudes(spec)
    return DensityOperator(np.outer(amp, amp), bath_labels(spec.d))


def truncated_bath_gibbs(spec: BathSpec, dim: int | None = None) -> DensityOperator:
    """Dephased coherent bath state, zero-padded to ``dim`` levels."""
    dim = spec.d if dim is None else dim
    pops = np.zeros(dim)
    pops[: spec.d] = coherent_bath_amplitudes(spec) ** 2
    return DensityOperator(np.diag(pops), bath_labels(dim))


def sector_propagate(vectors: np.ndarray, gt: float) -> np.ndarray:
    """Apply the interaction-picture JC propagator to qubit-bath vectors.

    ``vectors`` has shape ``(k, 2, D)`` with index ``[state, qubit, level]``.
    The top sector ``|1, D-1>`` has no partner inside the truncation and must
    be empty.
    """
    vectors = np.asarray(vectors, dtype=np.complex128)
    dim = vectors.shape[-1]
    if np.abs(vectors[:, 1, dim - 1]).max(initial=0.0) > 0:
        raise ValueError("top excitation sector is populated; enlarge the bath")
    out = vectors.copy()
    m = np.arange(1, dim)
    c = np.cos(gt * np.sqrt(m))
    s = np.sin(gt * np.sqrt(m))
    excited = vectors[:, 1, :-1]  # |1, m-1>
    ground = vectors[:, 0, 1:]  # |0, m>
    out[:, 1, :-1] = c * excited - 1j * s * ground
    out[:, 0, 1:] = -1j * s * excited + c * ground
    return out


@dataclass(frozen=True, eq=False)
class JointEnsemble:
    """Qubit-bath state as a mixture of pure components.

    ``vectors[k]`` is a ``2 x D`` array holding the amplitudes of the k-th
    component; the joint density matrix is ``sum_k w_k |v_k><v_k|``.
    """

    weights: np.ndarray
    vectors: np.ndarray

    @property
    def bath_dim(self) -> int:
        return self.vectors.shape[-1]

    def reduced_system(self) -> DensityOperator:
        m = np.einsum("k,kid,kjd->ij", self.weights, self.vectors, self.vectors.conj())
        return DensityOperator(m, qubit_labels(1))

    def reduced_bath(self) -> DensityOperator:
        m = np.einsum("k,kid,kie->de", self.weights, self.vectors, self.vectors.conj())
        return DensityOperator(m, bath_labels(self.bath_dim))

    def bath_entropy(self) -> float:
        # nonzero spectrum of rho_B = X^T X^* equals that of the small Gram matrix X X^dag
        x = (np.sqrt(self.weights)[:, None, None] * self.vectors).reshape(-1, self.bath_dim)
        return entropy_from_eigenvalues(np.linalg.eigvalsh(x @ x.conj().T))

    def joint(self) -> DensityOperator:
        flat = self.vectors.reshape(len(self.weights), -1)
        m = (flat.T * self.weights) @ flat.conj()
        return DensityOperator(m, factors=(qubit_labels(1), bath_labels(self.bath_dim)))


def initial_ensemble(rho_s0: DensityOperator, spec: BathSpec) -> JointEnsemble:
    """Pure-state decomposition of ``rho_s0`` (x) coherent bath, bath padded by one level."""
    if rho_s0.dim != 2:
        raise ValueError("initial system state must be a single qubit")
    w, u = np.linalg.eigh(rho_s0.matrix)
    keep = w > 1e-15
    w, u = w[keep], u[:, keep]
    bath = np.zeros(spec.d + 1)
    bath[: spec.d] = coherent_bath_amplitudes(spec)
    vectors = np.einsum("ik,d->kid", u, bath)
    return JointEnsemble(weights=w, vectors=vectors)


def evolve_ensemble(rho_s0: DensityOperator, spec: BathSpec, gt: float) -> JointEnsemble:
    start = initial_ensemble(rho_s0, spec)
    return JointEnsemble(start.weights, sector_propagate(start.vectors, gt))


def jc_joint_evolution(rho_s0: DensityOperator, spec: BathSpec, gt: float) -> DensityOperator:
    """Joint qubit-bath state after charging, on ``2 (d + 1)`` dimensions."""
    return evolve_ensemble(rho_s0, spec, gt).joint()


@dataclass(frozen=True, eq=False)
class ChargeResult:
    """One charging event.

    ``rho_s`` is the closed-form charged state built from ``delta``;
    ``rho_s_evolved`` comes from the exact propagator and ``route_gap`` is
    the trace distance between the two.
    """

    rho_s: DensityOperator
    delta: complex
    gt: float
    spec: BathSpec
    ensemble: JointEnsemble
    rho_s_evolved: DensityOperator
    route_gap: float
    s_bath: float

    @property
    def beta_omega0(self) -> float:
        return self.spec.beta_omega0

    @property
    def truncation_weight(self) -> float:
        return self.spec.truncation_weight

    @property
    def z_s(self) -> float:
        return qubit_partition(self.spec.beta_omega0)

    @property
    def z_b(self) -> float:
        return bath_partition(self.spec.beta_omega0)

    @cached_property
    def rho_b(self) -> DensityOperator:
        return self.ensemble.reduced_bath()

    @cached_property
    def rho_sb(self) -> DensityOperator:
        return self.ensemble.joint()


def charged_qubit_state(
    beta_omega0: float,
    gt: float,
    spec: BathSpec | None = None,
    prefactor: bool = True,
) -> ChargeResult:
    """Charge one Gibbs qubit against the coherent bath for coupling time ``gt``."""
    if spec is None:
        spec = BathSpec(beta_omega0)
    elif spec.beta_omega0 != beta_omega0:
        raise ValueError("bath spec temperature differs from beta_omega0")
    delta = coherence_amplitude(beta_omega0, gt, spec.d, prefactor=prefactor)
    rho_s = DensityOperator(charged_state_matrix(beta_omega0, delta), qubit_labels(1))
    ens = evolve_ensemble(gibbs_qubit(beta_omega0), spec, gt)
    evolved = ens.reduced_system()
    return ChargeResult(
        rho_s=rho_s,
        delta=delta,
        gt=gt,
        spec=spec,
        ensemble=ens,
        rho_s_evolved=evolved,
        route_gap=trace_distance(rho_s, evolved),
        s_bath=ens.bath_entropy(),
    )


def appendix_a_components(rho_s0: DensityOperator, spec: BathSpec, gt: float) -> tuple[float, complex]:
    """Ground population and ``<0|rho_S|1>`` after charging from any initial qubit state.

    Evaluates the component series term by term against the truncated
    coherent bath, without building the joint state.
    """
    if rho_s0.dim != 2:
        raise ValueError("initial system state must be a single qubit")
    r = rho_s0.matrix
    dim = spec.d + 2
    amp = np.zeros(dim)
    amp[: spec.d] = coherent_bath_amplitudes(spec)
    rb = np.outer(amp, amp)

    def b(i, j):
        ok = (i >= 0) & (j >= 0) & (i < dim) & (j < dim)
        return np.where(ok, rb[np.clip(i, 0, dim - 1), np.clip(j, 0, dim - 1)], 0.0)

    p = np.arange(dim - 1)
    cp, sp = np.cos(gt * np.sqrt(p)), np.sin(gt * np.sqrt(p))
    cq, sq = np.cos(gt * np.sqrt(p + 1)), np.sin(gt * np.sqrt(p + 1))
    rho00 = np.sum(
        cp**2 * r[0, 0] * b(p, p)
        + sp**2 * r[1, 1] * b(p - 1, p - 1)
        + 1j * sp * cp * r[0, 1] * b(p, p - 1)
        - 1j * sp * cp * r[1, 0] * b(p - 1, p)
    )
    rho01 = np.sum(
        1j * sq * cp * r[0, 0] * b(p, p + 1)
        - 1j * sp * cq * r[1, 1] * b(p - 1, p)
        + cp * cq * r[0, 1] * b(p, p)
        + sp * sq * r[1, 0] * b(p - 1, p + 1)
    )
    return float(rho00.real), complex(rho01)


def kappa_coherent_state(beta_omega0: float, kappa: float) -> DensityOperator:
    """Gibbs qubit with extra coherence: gamma_S + i kappa (|0><1| - |1><0|)."""
    m = gibbs_qubit(beta_omega0).matrix + 1j * kappa * np.array([[0, 1], [-1, 0]])
    return DensityOperator(m, qubit_labels(1))


def _truncated_weights(beta_omega0: float, d: int) -> tuple[np.ndarray, float]:
    w = np.exp(-beta_omega0 * np.arange(d))
    return w, float(w.sum())


def ground_population_from_ground(beta_omega0: float, gt: float, d: int) -> float:
    """rho_00(t) for a qubit starting in |0>: Boltzmann average of cos^2(gt sqrt(p))."""
    w, z = _truncated_weights(beta_omega0, d)
    p = np.arange(d)
    return float(np.sum(w * np.cos(gt * np.sqrt(p)) ** 2) / z)


def ground_population_with_coherence(beta_omega0: float, gt: float, kappa: float, d: int) -> float:
    """rho_00(t) for ``kappa_coherent_state``; the Gibbs diagonal is no longer stationary."""
    w, z = _truncated_weights(beta_omega0, d)
    p = np.arange(d)
    shift = kappa * math.exp(beta_omega0 / 2) / z * np.sum(w * np.sin(2 * gt * np.sqrt(p)))
    return 1.0 / qubit_partition(beta_omega0) - float(shift)
