"""Tests for Ising/QUBO containers, evaluation, and conversions."""

import numpy as np
import pytest

from chainopt.ising import (
    IsingModel,
    QuboModel,
    evaluate_ising,
    evaluate_matrix,
    evaluate_qubo,
    ising_to_qubo,
    qubo_to_ising,
)


def random_ising(n, rng, density=0.6):
    h = {i: float(rng.normal()) for i in range(n)}
    J = {
        (i, j): float(rng.normal())
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    }
    return IsingModel(n=n, h=h, J=J, offset=float(rng.normal()))


def random_qubo(n, rng, density=0.6):
    Q = {(i, i): float(rng.normal()) for i in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                Q[(i, j)] = float(rng.normal())
    return QuboModel(n=n, Q=Q, offset=float(rng.normal()))


def all_spin_vectors(n):
    for bits in range(1 << n):
        yield np.array([1 if (bits >> k) & 1 else -1 for k in range(n)], dtype=np.int8)


class TestIsingModel:
    def test_canonicalizes_pairs(self):
        m = IsingModel(n=3, J={(2, 0): 1.5})
        assert m.J == {(0, 2): 1.5}

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            IsingModel(n=2, J={(1, 1): 1.0})

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            IsingModel(n=2, h={2: 1.0})
        with pytest.raises(ValueError):
            IsingModel(n=2, J={(0, 5): 1.0})

    def test_rejects_duplicate_pair(self):
        with pytest.raises(ValueError):
            IsingModel(n=2, J={(0, 1): 1.0, (1, 0): 2.0})

    def test_drops_zero_coefficients(self):
        m = IsingModel(n=2, h={0: 0.0, 1: 1.0}, J={(0, 1): 0.0})
        assert m.h == {1: 1.0}
        assert m.J == {}

    def test_json_round_trip(self):
        rng = np.random.default_rng(3)
        m = random_ising(5, rng)
        again = IsingModel.from_json(m.to_json())
        assert again.n == m.n
        assert again.h == m.h
        assert again.J == m.J
        assert again.offset == m.offset
        # deterministic serialization for golden files
        assert m.to_json() == again.to_json()


class TestEvaluateIsing:
    def test_zero_model(self):
        m = IsingModel(n=2)
        assert evaluate_ising(m, [1, -1]) == 0.0

    def test_single_coupler(self):
        m = IsingModel(n=2, J={(0, 1): 1.0})
        assert evaluate_ising(m, [1, 1]) == 1.0

    def test_mixed_terms(self):
        # h contribution -1 - 1, J contribution 2 * (-1)
        m = IsingModel(n=2, h={0: 1.0, 1: -1.0}, J={(0, 1): 2.0})
        assert evaluate_ising(m, [-1, 1]) == pytest.approx(-4.0)

    def test_rejects_bad_spins(self):
        m = IsingModel(n=2)
        with pytest.raises(ValueError):
            evaluate_ising(m, [1, 0])
        with pytest.raises(ValueError):
            evaluate_ising(m, [1, 1, 1])

    def test_linear_in_coefficients(self):
        rng = np.random.default_rng(11)
        m = random_ising(4, rng)
        pair = next(iter(m.J))
        doubled = IsingModel(
            n=m.n, h=dict(m.h), J={**m.J, pair: 2 * m.J[pair]}, offset=m.offset
        )
        for s in all_spin_vectors(4):
            delta = evaluate_ising(doubled, s) - evaluate_ising(m, s)
            assert delta == pytest.approx(m.J[pair] * s[pair[0]] * s[pair[1]])

    def test_spin_flip_symmetry_without_fields(self):
        rng = np.random.default_rng(12)
        m = random_ising(5, rng)
        m = IsingModel(n=m.n, h={}, J=m.J, offset=m.offset)
        for s in all_spin_vectors(5):
            assert evaluate_ising(m, s) == pytest.approx(evaluate_ising(m, -s))

    def test_matrix_matches_scalar(self):
        rng = np.random.default_rng(13)
        m = random_ising(6, rng)
        S = np.array(list(all_spin_vectors(6)))
        energies = evaluate_matrix(m, S)
        for row, e in zip(S, energies):
            assert e == pytest.approx(evaluate_ising(m, row), abs=1e-12)


class TestQuboToIsing:
    def test_linear_term(self):
        m = qubo_to_ising(QuboModel(n=1, Q={(0, 0): 1.0}))
        assert m.h == {0: 0.5}
        assert m.offset == 0.5
        assert m.J == {}

    def test_quadratic_term(self):
        m = qubo_to_ising(QuboModel(n=2, Q={(0, 1): 1.0}))
        assert m.J == {(0, 1): 0.25}
        assert m.h == {0: 0.25, 1: 0.25}
        assert m.offset == 0.25

    def test_all_vertex_rewards(self):
        # three -x_i terms and no pair terms
        m = qubo_to_ising(QuboModel(n=3, Q={(i, i): -1.0 for i in range(3)}))
        assert m.h == {0: -0.5, 1: -0.5, 2: -0.5}
        assert m.offset == pytest.approx(-1.5)
        smallest = min(
            evaluate_ising(m, s) for s in all_spin_vectors(3)
        )
        assert smallest == pytest.approx(-3.0)

    def test_exhaustive_equivalence(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n = int(rng.integers(1, 8))
            q = random_qubo(n, rng)
            m = qubo_to_ising(q)
            for bits in range(1 << n):
                x = np.array([(bits >> k) & 1 for k in range(n)])
                s = 2 * x - 1
                assert evaluate_qubo(q, x) == pytest.approx(
                    evaluate_ising(m, s), abs=1e-9
                )


class TestIsingToQubo:
    def test_round_trip_small(self):
        q = ising_to_qubo(IsingModel(n=1, h={0: 0.5}, offset=0.5))
        assert q.Q == {(0, 0): 1.0}
        assert q.offset == 0.0

    def test_zero_model(self):
        q = ising_to_qubo(IsingModel(n=3))
        assert q.Q == {}
        assert q.offset == 0.0

    def test_round_trip_energies(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            m = random_ising(6, rng)
            q = ising_to_qubo(m)
            back = qubo_to_ising(q)
            for s in all_spin_vectors(6):
                x = (s + 1) // 2
                e = evaluate_ising(m, s)
                assert evaluate_qubo(q, x) == pytest.approx(e, abs=1e-9)
                assert evaluate_ising(back, s) == pytest.approx(e, abs=1e-9)
