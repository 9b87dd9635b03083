import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherence_engine.jc_charging import BathSpec, charged_qubit_state, gibbs_qubit, jc_joint_evolution
from coherence_engine.operator_core import (
    DensityOperator,
    InfiniteRelativeEntropyError,
    density,
    hermitian_eigensystem,
    partial_trace,
    pure_state,
    qubit_labels,
    relative_entropy,
    tensor_power,
    tensor_product,
    trace_distance,
    von_neumann_entropy,
)

from helpers import plus_state, random_density, random_hermitian


def test_labels_add_under_tensor_product():
    rng = np.random.default_rng(0)
    a = random_density(rng, 2, labels=qubit_labels(1))
    b = random_density(rng, 3, labels=[0, 2, 4])
    ab = tensor_product(a, b)
    assert list(ab.labels) == [-1, 1, 3, 1, 3, 5]
    assert list(tensor_power(a, 2).labels) == list(qubit_labels(2))


def test_validation_rejects_bad_matrices():
    with pytest.raises(ValueError):
        density(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        density(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        density(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        DensityOperator(np.eye(2) / 2, labels=[0, 1, 2])


def test_tensor_product_examples():
    rho = random_density(np.random.default_rng(1), 3)
    one = DensityOperator(np.ones((1, 1)))
    assert np.allclose(tensor_product(one, rho).matrix, rho.matrix)
    g = gibbs_qubit(0.8)
    z = 1 + math.exp(-0.8)
    expected = np.array([1, math.exp(-0.8), math.exp(-0.8), math.exp(-1.6)]) / z**2
    assert np.allclose(np.diag(tensor_product(g, g).matrix).real, expected, atol=1e-15)
    plus = DensityOperator(plus_state(), qubit_labels(1))
    assert np.allclose(tensor_product(plus, plus).matrix, 0.25)


def test_partial_trace_examples():
    rng = np.random.default_rng(2)
    for _ in range(10):
        a, b = random_density(rng, 2), random_density(rng, 5)
        ab = tensor_product(a, b)
        assert np.abs(partial_trace(ab, 2, 5, "A").matrix - a.matrix).max() < 1e-14
        assert np.abs(partial_trace(ab, 2, 5, "B").matrix - b.matrix).max() < 1e-14
    bell = pure_state([0, 1, 1, 0])
    assert np.allclose(partial_trace(bell, 2, 2, "A").matrix, np.eye(2) / 2)
    with pytest.raises(ValueError):
        partial_trace(bell, 3, 2)


def test_partial_trace_of_evolved_state_matches_charged_state():
    spec = BathSpec(1.0)
    joint = jc_joint_evolution(gibbs_qubit(1.0), spec, 5.0)
    reduced = partial_trace(joint, 2, spec.d + 1, "A")
    assert trace_distance(reduced, charged_qubit_state(1.0, 5.0, spec).rho_s) <= 1e-8
    assert list(reduced.labels) == [-1, 1]


def test_hermitian_eigensystem_examples():
    w, v = hermitian_eigensystem(np.diag([1.0, 2.0]))
    assert np.allclose(w, [1, 2]) and np.allclose(np.abs(v), np.eye(2))
    w, _ = hermitian_eigensystem(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [-1, 1])
    rng = np.random.default_rng(3)
    for _ in range(10):
        h = random_hermitian(rng, 8)
        w, v = hermitian_eigensystem(h)
        assert np.abs((v * w) @ v.conj().T - h).max() < 1e-12
        assert np.all(np.diff(w) >= 0)
    with pytest.raises(ValueError):
        hermitian_eigensystem(np.array([[0, 1], [0, 0]]))


def test_two_by_two_eigenvalues_match_characteristic_roots():
    rng = np.random.default_rng(4)
    for _ in range(200):
        h = random_hermitian(rng, 2)
        tr = np.trace(h).real
        det = np.linalg.det(h).real
        disc = math.sqrt(max(tr**2 - 4 * det, 0.0))
        w, _ = hermitian_eigensystem(h)
        assert np.allclose(w, [(tr - disc) / 2, (tr + disc) / 2], atol=1e-12)


def test_entropy_examples():
    rng = np.random.default_rng(5)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert von_neumann_entropy(pure_state(v)) < 1e-12
    assert abs(von_neumann_entropy(DensityOperator(np.eye(2) / 2)) - math.log(2)) < 1e-15
    p1 = math.exp(-1) / (1 + math.exp(-1))
    binary = -p1 * math.log(p1) - (1 - p1) * math.log(1 - p1)
    assert abs(von_neumann_entropy(gibbs_qubit(1.0)) - binary) < 1e-14
    assert round(von_neumann_entropy(gibbs_qubit(1.0)), 4) == 0.5822


def test_relative_entropy_examples():
    rng = np.random.default_rng(6)
    rho = random_density(rng, 3)
    assert abs(relative_entropy(rho, rho)) < 1e-12
    plus = DensityOperator(plus_state())
    assert abs(relative_entropy(plus, DensityOperator(np.eye(2) / 2)) - math.log(2)) < 1e-12
    with pytest.raises(InfiniteRelativeEntropyError):
        relative_entropy(DensityOperator(np.eye(2) / 2), DensityOperator(np.diag([1.0, 0.0])))


def test_trace_distance_examples():
    rho = random_density(np.random.default_rng(7), 4)
    assert trace_distance(rho, rho) < 1e-15
    assert abs(trace_distance(DensityOperator(np.diag([1.0, 0])), DensityOperator(np.diag([0, 1.0]))) - 1) < 1e-15
    charge = charged_qubit_state(1.0, 5.0)
    assert trace_distance(charge.rho_s, charge.rho_s_evolved) <= 1e-8


def test_entropy_additive_and_relative_entropy_additive():
    rng = np.random.default_rng(8)
    for _ in range(20):
        a, b = random_density(rng, 2), random_density(rng, 3)
        s = von_neumann_entropy(tensor_product(a, b))
        assert abs(s - von_neumann_entropy(a) - von_neumann_entropy(b)) < 1e-9
        sigma = random_density(rng, 2)
        d1 = relative_entropy(a, sigma)
        for n in range(2, 5):
            assert abs(relative_entropy(tensor_power(a, n), tensor_power(sigma, n)) - n * d1) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 4))
def test_partial_trace_inverts_tensor_product(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, da), random_density(rng, db)
    assert np.abs(partial_trace(tensor_product(a, b), da, db, "A").matrix - a.matrix).max() < 1e-13


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_relative_entropy_nonnegative_and_bounds_trace_distance(seed, dim):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(rng, dim), random_density(rng, dim)
    d = relative_entropy(rho, sigma)
    # Pinsker: D >= 2 T^2
    assert d >= 2 * trace_distance(rho, sigma) ** 2 - 1e-10
