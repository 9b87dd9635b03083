import numpy as np
import pytest

from coherence_engine.collective_tc import (
    TCSpec,
    commutator_norm,
    diagonal_deviation,
    initial_state,
    observation2_check,
    reduced_system,
    sequential_vs_collective,
    tc_evolve,
    tc_interaction_hamiltonian,
)
from coherence_engine.jc_charging import BathSpec, evolve_ensemble, gibbs_qubit
from coherence_engine.operator_core import trace_distance


def excitation_numbers(spec):
    n = spec.n_qubits
    weight = np.array([bin(i).count("1") for i in range(2**n)])
    return (weight[:, None] + np.arange(spec.bath_dim)[None, :]).ravel()


def test_spec_validation():
    with pytest.raises(ValueError):
        TCSpec(2, (1.0,), BathSpec(1.0), 1.0)
    with pytest.raises(ValueError):
        TCSpec(0, (), BathSpec(1.0), 1.0)
    spec = TCSpec.random(3, 1.0, 2.0, seed=7)
    assert np.allclose(np.abs(spec.couplings), 1.0)
    assert spec.couplings == TCSpec.random(3, 1.0, 2.0, seed=7).couplings


def test_hamiltonian_examples():
    bath = BathSpec(1.0)
    assert np.abs(tc_interaction_hamiltonian(TCSpec(2, (0, 0), bath, 1.0))).max() == 0

    h = tc_interaction_hamiltonian(TCSpec(1, (1.0,), bath, 1.0))
    dim = bath.d + 1
    expected = np.zeros((2 * dim, 2 * dim))
    for m in range(1, dim):
        # |1, m-1> <-> |0, m> with strength sqrt(m)
        expected[dim + m - 1, m] = expected[m, dim + m - 1] = np.sqrt(m)
    assert np.abs(h - expected).max() < 1e-15

    spec = TCSpec(2, (1.0, 1j), bath, 1.0)
    h = tc_interaction_hamiltonian(spec)
    n_exc = excitation_numbers(spec)
    rows, cols = np.nonzero(np.abs(h) > 0)
    assert rows.size > 0
    assert np.all(n_exc[rows] == n_exc[cols])


def test_commutes_with_free_hamiltonian():
    for seed in range(5):
        for n in (1, 2, 3):
            assert commutator_norm(TCSpec.random(n, 1.5, 1.0, seed)) <= 1e-10


def test_evolution_examples():
    spec = TCSpec.random(2, 1.0, 0.0, seed=0)
    assert np.array_equal(tc_evolve(spec).matrix, initial_state(spec).matrix)

    bath = BathSpec(1.0)
    tc = reduced_system(TCSpec(1, (1.0,), bath, 5.0))
    jc = evolve_ensemble(gibbs_qubit(1.0), bath, 5.0).reduced_system()
    assert trace_distance(tc, jc) <= 1e-9

    for seed in range(3):
        spec = TCSpec.random(2, 1.0, 7.0, seed)
        assert diagonal_deviation(reduced_system(spec), 2, 1.0) <= 1e-8


def test_observation2_examples():
    bath = BathSpec(1.0)
    assert observation2_check(TCSpec(2, (1.0, 1.0), bath, 5.0)).c_int <= 1e-8
    rng = np.random.default_rng(0)
    for seed in range(10):
        spec = TCSpec.random(3, float(rng.uniform(0.5, 3)), float(rng.uniform(0, 30)), seed)
        res = observation2_check(spec)
        assert res.c_int <= 1e-8 and res.block_residual <= 1e-8 and res.diagonal_residual <= 1e-8
    assert observation2_check(TCSpec(2, (0.0, 0.0), bath, 5.0)).c_int == 0.0
    with pytest.raises(ValueError):
        observation2_check(TCSpec(1, (1.0,), bath, 5.0))


def test_sequential_beats_collective():
    rows = sequential_vs_collective(2, 1.0, [0.0, 5.0, 11.0, 20.0])
    for row in rows:
        assert row["collective_c_int"] <= 1e-8
    assert rows[0]["sequential_c_int"] < 1e-12 and rows[0]["collective_c_int"] < 1e-12
    assert rows[2]["sequential_c_int"] > 0.01
    rows = sequential_vs_collective(3, 2.0, [11.0], couplings=np.exp(1j * np.array([0.1, 2.0, 4.0])))
    assert rows[0]["collective_c_int"] <= 1e-8 < rows[0]["sequential_c_int"]


def test_dimension_cap():
    with pytest.raises(ValueError):
        tc_interaction_hamiltonian(TCSpec.random(8, 0.5, 1.0, 0))
