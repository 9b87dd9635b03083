"""Dense density-matrix primitives shared by every other module.

Composite indices follow the Kronecker convention ``i_a * dim_b + i_b``
(first factor major).  Every operator carries integer energy labels in
units of ``omega_0 / 2``: a qubit has labels ``(-1, +1)`` and bath level
``n`` has label ``2n``.  Labels of a composite are sums of factor labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = -1e-10
EIG_CLAMP = 1e-14
SUPPORT_TOL = 1e-12


class InfiniteRelativeEntropyError(ValueError):
    """Raised when supp(rho) is not contained in supp(sigma)."""


def qubit_labels(n: int = 1) -> np.ndarray:
    """Labels of ``n`` qubits: ``2k - n`` for a basis state of Hamming weight k."""
    idx = np.arange(2**n)
    weight = np.array([bin(int(i)).count("1") for i in idx], dtype=np.int64)
    return 2 * weight - n


def bath_labels(dim: int) -> np.ndarray:
    return 2 * np.arange(dim, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A square complex matrix annotated with integer energy labels.

    ``factors`` keeps the label arrays of the tensor factors so that partial
    traces can hand back the kept factor's labels; ``labels`` is their
    additive combination.  Construction only checks shapes; call
    :meth:`validate` (or :func:`density`) to enforce Hermiticity, unit
    trace and positivity.
    """

    matrix: np.ndarray
    labels: np.ndarray = None
    factors: tuple = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        factors = self.factors
        if factors is not None:
            factors = tuple(np.asarray(f, dtype=np.int64) for f in factors)
            labels = _combine(factors)
        else:
            labels = np.zeros(m.shape[0], dtype=np.int64) if self.labels is None else self.labels
            labels = np.asarray(labels, dtype=np.int64)
            factors = (labels,)
        if labels.shape != (m.shape[0],):
            raise ValueError(f"{labels.shape[0]} labels for a {m.shape[0]}-dim operator")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self) -> "DensityOperator":
        m = self.matrix
        herm = np.abs(m - m.conj().T).max()
        if herm > HERMITIAN_TOL:
            raise ValueError(f"not Hermitian: max|M - M^dag| = {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1")
        lo = np.linalg.eigvalsh(m).min()
        if lo < PSD_TOL:
            raise ValueError(f"negative eigenvalue {lo:.3e}")
        return self

    def with_matrix(self, matrix: np.ndarray) -> "DensityOperator":
        return DensityOperator(matrix, factors=self.factors)


def _combine(factors) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for f in factors:
        out = (out[:, None] + f[None, :]).ravel()
    return out


def density(matrix, labels=None, factors=None) -> DensityOperator:
    """Build and validate a :class:`DensityOperator`."""
    return DensityOperator(matrix, labels, factors).validate()


def pure_state(vec, labels=None, factors=None) -> DensityOperator:
    v = np.asarray(vec, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    return DensityOperator(np.outer(v, v.conj()), labels, factors)


def tensor_product(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    return DensityOperator(np.kron(a.matrix, b.matrix), factors=a.factors + b.factors)


def tensor_power(rho: DensityOperator, n: int) -> DensityOperator:
    out = rho
    for _ in range(n - 1):
        out = tensor_product(out, rho)
    return out


def partial_trace(rho: DensityOperator, dim_a: int, dim_b: int, keep: str = "A") -> DensityOperator:
    """Reduce a bipartite operator laid out with the A index major."""
    if dim_a * dim_b != rho.dim:
        raise ValueError(f"dim_a * dim_b = {dim_a * dim_b} does not match operator dim {rho.dim}")
    if keep not in ("A", "B"):
        raise ValueError("keep must be 'A' or 'B'")
    r = rho.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    reduced = np.einsum("ijkj->ik", r) if keep == "A" else np.einsum("ijil->jl", r)
    head, tail = _split_factors(rho, dim_a)
    return DensityOperator(reduced, factors=head if keep == "A" else tail)


def _split_factors(rho: DensityOperator, dim_a: int):
    size = 1
    for i, f in enumerate(rho.factors):
        if size == dim_a:
            return rho.factors[:i], rho.factors[i:]
        size *= f.size
    if size == dim_a:
        return rho.factors, (np.zeros(1, dtype=np.int64),)
    # no factor boundary at dim_a: labels of the pieces are unknown
    dim_b = rho.dim // dim_a
    return (np.zeros(dim_a, dtype=np.int64),), (np.zeros(dim_b, dtype=np.int64),)


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    m = np.asarray(m.matrix if isinstance(m, DensityOperator) else m, dtype=np.complex128)
    herm = np.abs(m - m.conj().T).max() if m.size else 0.0
    if herm > 1e-10:
        raise ValueError(f"matrix is not Hermitian (max deviation {herm:.3e})")
    return np.linalg.eigh(m)


def entropy_from_eigenvalues(w) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > EIG_CLAMP]
    return float(max(-np.sum(w * np.log(w)), 0.0)) + 0.0


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Entropy in nats."""
    return entropy_from_eigenvalues(np.linalg.eigvalsh(rho.matrix))


def relative_entropy(rho: DensityOperator, sigma: DensityOperator) -> float:
    """S(rho || sigma) = Tr[rho (ln rho - ln sigma)] in nats."""
    if rho.dim != sigma.dim:
        raise ValueError("dimension mismatch")
    p, u = np.linalg.eigh(rho.matrix)
    q, v = np.linalg.eigh(sigma.matrix)
    p = np.where(p > EIG_CLAMP, p, 0.0)
    # overlap[i, j] = |<p_i|q_j>|^2
    overlap = np.abs(u.conj().T @ v) ** 2
    null = q <= SUPPORT_TOL
    leak = float(p @ overlap[:, null].sum(axis=1)) if null.any() else 0.0
    if leak > SUPPORT_TOL:
        raise InfiniteRelativeEntropyError(f"infinite relative entropy (weight {leak:.3e} outside support)")
    plogp = float(np.sum(p[p > 0] * np.log(p[p > 0])))
    logq = np.where(null, 0.0, np.log(np.where(null, 1.0, q)))
    cross = float(p @ overlap @ logq)
    return plogp - cross


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    diff = a.matrix - b.matrix
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def purity(rho: DensityOperator) -> float:
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))
