"""N-copy activation and engine bookkeeping.

A single charged qubit holds only external coherence.  Putting ``N``
identical copies together makes the Hamming-weight subspaces of the
collective Hamiltonian degenerate, and the coherence inside those blocks
is what can be extracted as work.  Work and coherence flows are reported
in units of ``omega_0`` with ``k_B = hbar = 1``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .coherence import coherence_report, correlated_external_coherence, external_coherence
from .jc_charging import (
    BathSpec,
    ChargeResult,
    charged_qubit_state,
    gibbs_qubit,
    qubit_partition,
    truncated_bath_gibbs,
    evolve_ensemble,
)
from .operator_core import (
    DensityOperator,
    entropy_from_eigenvalues,
    partial_trace,
    qubit_labels,
    von_neumann_entropy,
)

DEFAULT_MAX_QUBITS = 12
S_BATH_FLOOR = 1e-12


def max_qubits() -> int:
    raw = os.environ.get("ENGINE_MAX_QUBITS")
    return int(raw) if raw else DEFAULT_MAX_QUBITS


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("need at least one qubit")
    cap = max_qubits()
    if n > cap:
        raise ValueError(f"n = {n} exceeds the qubit cap {cap} (set ENGINE_MAX_QUBITS to raise it)")


@lru_cache(maxsize=None)
def _weight_blocks(n: int) -> tuple[tuple[int, np.ndarray], ...]:
    """For each Hamming weight k, the matrix of flip counts #{i: x_i = 1, y_i = 0}."""
    states = np.arange(2**n)
    weight = np.array([bin(int(s)).count("1") for s in states])
    full = 2**n - 1
    out = []
    for k in range(n + 1):
        idx = states[weight == k]
        diff = idx[:, None] & (~idx[None, :] & full)
        flips = np.vectorize(lambda v: bin(int(v)).count("1"), otypes=[np.int64])(diff)
        out.append((k, flips))
    return tuple(out)


def block_dephased_power_entropy(rho_s: np.ndarray, n: int) -> float:
    """S(D(rho^{(x)n})) for a qubit state, one Hamming-weight block at a time.

    Between two weight-k strings that differ by m flips each way, the
    product of single-qubit elements is ``a^(n-k-m) c^(k-m) |b|^(2m)`` with
    ``a, c`` the populations and ``b`` the coherence, so each block is real
    and independent of the coherence phase.
    """
    a, c = float(rho_s[0, 0].real), float(rho_s[1, 1].real)
    b2 = float(abs(rho_s[0, 1]) ** 2)
    eig = []
    for k, flips in _weight_blocks(n):
        block = np.power(a, n - k - flips) * np.power(c, k - flips) * np.power(b2, flips)
        eig.append(np.linalg.eigvalsh(block) if block.shape[0] > 1 else block.ravel())
    return entropy_from_eigenvalues(np.concatenate(eig))


def activated_internal_coherence(rho_s: DensityOperator | np.ndarray, n: int) -> float:
    """C_int of n copies of a qubit state: n S(diag rho) - S(D(rho^{(x)n}))."""
    _check_n(n)
    m = rho_s.matrix if isinstance(rho_s, DensityOperator) else np.asarray(rho_s)
    if n == 1 or m[0, 1] == 0:
        return 0.0
    s_diag = n * entropy_from_eigenvalues(np.diag(m).real)
    value = s_diag - block_dephased_power_entropy(m, n)
    return 0.0 if -1e-9 <= value < 0 else value


@dataclass(frozen=True)
class EngineOperatingPoint:
    n_qubits: int
    beta_omega0: float
    gt: float
    bath: BathSpec = field(default=None)

    def __post_init__(self):
        _check_n(self.n_qubits)
        if not self.beta_omega0 > 0:
            raise ValueError("beta_omega0 must be positive")
        if self.gt < 0:
            raise ValueError("gt must be non-negative")
        if self.bath is None:
            object.__setattr__(self, "bath", BathSpec(self.beta_omega0))


@dataclass(frozen=True)
class CyclePerformance:
    n_qubits: int
    beta_omega0: float
    gt: float
    c_ext_per_qubit: float
    c_int_total: float
    s_bath: float
    w_coh: float
    q_in: float
    eta: float


def performance_from_charge(rho_s: np.ndarray, s_bath: float, n: int, beta_omega0: float, gt: float) -> CyclePerformance:
    rho = DensityOperator(rho_s, qubit_labels(1))
    c_int = activated_internal_coherence(rho, n)
    eta = c_int / (n * s_bath) if s_bath > S_BATH_FLOOR else 0.0
    return CyclePerformance(
        n_qubits=n,
        beta_omega0=beta_omega0,
        gt=gt,
        c_ext_per_qubit=external_coherence(rho),
        c_int_total=c_int,
        s_bath=s_bath,
        w_coh=c_int / beta_omega0,
        q_in=n * s_bath / beta_omega0,
        eta=eta,
    )


def cycle_performance(op: EngineOperatingPoint, charge: ChargeResult | None = None) -> CyclePerformance:
    """Charge one qubit, activate n copies and evaluate work, input flow and efficiency."""
    if charge is None:
        charge = charged_qubit_state(op.beta_omega0, op.gt, op.bath)
    return performance_from_charge(charge.rho_s.matrix, charge.s_bath, op.n_qubits, op.beta_omega0, op.gt)


def bath_coherence_change(charge: ChargeResult) -> float:
    """Delta C_ext of the bath over the charging step, from dense reduced states."""
    rho_b = charge.rho_b
    before = truncated_bath_gibbs(charge.spec, rho_b.dim)
    # the initial bath is pure, so its external coherence is the entropy of its populations
    return external_coherence(rho_b) - von_neumann_entropy(before)


def binary_entropy(p: float) -> float:
    return entropy_from_eigenvalues([p, 1.0 - p])


def maximally_coherent_benchmark(beta_omega0: float, n: int) -> float:
    """Internal coherence per qubit of n copies of the coherent Gibbs qubit.

    The state is pure, so every energy block of its dephased version has
    rank one and S(D) is the entropy of the binomial block weights.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    p1 = math.exp(-beta_omega0) / qubit_partition(beta_omega0)
    weights = [math.comb(n, k) * p1**k * (1 - p1) ** (n - k) for k in range(n + 1)]
    value = (n * binary_entropy(p1) - entropy_from_eigenvalues(weights)) / n
    return max(value, 0.0)


@dataclass(frozen=True)
class RateReport:
    heat_rate: float
    entropy_production: float
    coherence_change_rate: float

    def heat_ok(self, tol: float = 1e-6) -> bool:
        return abs(self.heat_rate) <= tol

    def identity_residual(self) -> float:
        return abs(self.entropy_production + self.coherence_change_rate)

    def identity_ok(self, rtol: float = 1e-3, atol: float = 1e-9) -> bool:
        scale = max(abs(self.entropy_production), abs(self.coherence_change_rate))
        return self.identity_residual() <= rtol * scale + atol


def _matrix_log(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.log(w)) @ v.conj().T


def rate_checks(beta_omega0: float, gt: float, h: float = 1e-4, spec: BathSpec | None = None) -> RateReport:
    """Finite-difference heat rate, entropy production and coherence change rate.

    Rates are per unit ``gt``.  The system states come from the exact
    propagator, so zero heat flow is tested rather than assumed.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if gt <= h:
        raise ValueError("gt must exceed the finite-difference step")
    spec = BathSpec(beta_omega0) if spec is None else spec
    gibbs = gibbs_qubit(beta_omega0)

    def state(x):
        return evolve_ensemble(gibbs, spec, x).reduced_system()

    lo, mid, hi = state(gt - h), state(gt), state(gt + h)
    rho_dot = (hi.matrix - lo.matrix) / (2 * h)
    sigma_z_half = np.diag([-0.5, 0.5])
    heat = beta_omega0 * float(np.trace(rho_dot @ sigma_z_half).real)
    log_gap = _matrix_log(mid.matrix) - _matrix_log(gibbs.matrix)
    production = -float(np.trace(rho_dot @ log_gap).real)
    c_dot = (coherence_report(hi).c_tot - coherence_report(lo).c_tot) / (2 * h)
    return RateReport(heat_rate=heat, entropy_production=production, coherence_change_rate=c_dot)


@dataclass(frozen=True)
class ConservationTerms:
    delta_c_ext_s: float
    delta_c_ext_b: float
    correlated: float

    @property
    def residual(self) -> float:
        return abs(-self.delta_c_ext_s - self.delta_c_ext_b - self.correlated)


def conservation_terms(beta_omega0: float, gt: float, spec: BathSpec | None = None) -> ConservationTerms:
    spec = BathSpec(beta_omega0) if spec is None else spec
    gibbs = gibbs_qubit(beta_omega0)
    joint = evolve_ensemble(gibbs, spec, gt).joint()
    dim_b = joint.dim // 2
    rho_s = partial_trace(joint, 2, dim_b, keep="A")
    rho_b = partial_trace(joint, 2, dim_b, keep="B")
    bath0 = evolve_ensemble(gibbs, spec, 0.0).reduced_bath()
    return ConservationTerms(
        delta_c_ext_s=external_coherence(rho_s) - external_coherence(gibbs),
        delta_c_ext_b=external_coherence(rho_b) - external_coherence(bath0),
        correlated=correlated_external_coherence(joint, 2, dim_b),
    )


def conservation_check(beta_omega0: float, gt: float, spec: BathSpec | None = None) -> float:
    """Residual of -dC_ext(S) - dC_ext(B) = C_ext(S:B), each term computed separately."""
    return conservation_terms(beta_omega0, gt, spec).residual


def efficiency_bounds(charge: ChargeResult, n: int) -> tuple[float, float, float]:
    """(C_int of n copies, n C_tot(rho_S), n S(rho_B)); the chain must be ordered."""
    rho_s = charge.rho_s
    c_int = activated_internal_coherence(rho_s, n)
    return c_int, n * coherence_report(rho_s).c_tot, n * charge.s_bath
