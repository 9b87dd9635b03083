import numpy as np

from coherence_engine.operator_core import DensityOperator


def random_density(rng, dim, rank=None, labels=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real, labels)


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def plus_state():
    return np.full((2, 2), 0.5, dtype=complex)
