"""Tests for broken-chain diagnosis and majority-vote unembedding."""

import numpy as np
import pytest

from chainopt.chains import diagnose, majority_vote
from chainopt.ising import IsingModel
from chainopt.topology import chimera_graph, clique_embedding, embed_ising


class TestDiagnose:
    def test_intact(self):
        d = diagnose([(0, 1), (2,)], [(0, 1)], [1, 1, -1])
        assert d.broken == frozenset()
        assert d.broken_count == 0
        assert d.violations == {(0, 1): 0}

    def test_broken_chain_and_violations(self):
        d = diagnose([(0, 1, 2), (3,)], [(0, 1), (1, 2)], [1, 1, -1, -1])
        assert d.broken == frozenset({0})
        assert d.broken_count == 1
        # violation is sigma_x - sigma_y, oriented by the coupler
        assert d.violations == {(0, 1): 0, (1, 2): 2}

    def test_violation_sign_is_oriented(self):
        d = diagnose([(0, 1)], [(0, 1)], [-1, 1])
        assert d.violations[(0, 1)] == -2

    def test_singletons_never_break(self):
        d = diagnose([(0,), (1,), (2,)], [], [1, -1, 1])
        assert d.broken == frozenset()

    def test_short_spin_vector(self):
        with pytest.raises(ValueError):
            diagnose([(0, 5)], [], [1, 1])

    def test_broken_iff_internal_violation(self):
        # randomized agreement between the two break criteria
        rng = np.random.default_rng(31)
        hw = chimera_graph(2)
        e = embed_ising(
            IsingModel(n=8, J={(i, j): 1.0 for i in range(8) for j in range(i + 1, 8)}),
            clique_embedding(8, hw),
            hw,
        )
        chains = [e.chains_dense[i] for i in range(8)]
        for _ in range(50):
            s = rng.integers(0, 2, size=e.num_qubits) * 2 - 1
            d = diagnose(chains, e.chain_couplers, s)
            broken_by_coupler = set()
            for i in range(8):
                for pair in e.chain_couplers_of(i):
                    if d.violations[pair] != 0:
                        broken_by_coupler.add(i)
            assert d.broken == frozenset(broken_by_coupler)


class TestMajorityVote:
    def test_clear_majorities(self):
        out = majority_vote([(0, 1, 2), (3,)], [1, 1, -1, -1])
        assert list(out) == [1, -1]

    def test_batch_shape(self):
        S = np.array([[1, 1, -1, -1], [-1, -1, -1, 1]])
        out = majority_vote([(0, 1, 2), (3,)], S)
        assert out.shape == (2, 2)
        assert out.tolist() == [[1, -1], [-1, 1]]

    def test_tie_without_rng_raises(self):
        with pytest.raises(ValueError):
            majority_vote([(0, 1)], [1, -1])

    def test_tie_coin_flip_regression(self):
        # frozen: generator draws differ across seeds
        assert majority_vote([(0, 1)], [1, -1], rng=np.random.default_rng(0))[0] == -1
        assert majority_vote([(0, 1)], [1, -1], rng=np.random.default_rng(1))[0] == 1

    def test_tie_batch_regression(self):
        batch = [[1, -1, 1, -1], [-1, 1, -1, 1]]
        out = majority_vote([(0, 1), (2, 3)], batch, rng=np.random.default_rng(7))
        assert out.tolist() == [[1, 1], [-1, -1]]

    def test_deterministic_ties_take_first_qubit(self):
        batch = [[1, -1, 1, -1], [-1, 1, -1, 1]]
        out = majority_vote([(0, 1), (2, 3)], batch, deterministic_ties=True)
        assert out.tolist() == [[1, 1], [-1, -1]]
        out2 = majority_vote([(1, 0), (3, 2)], batch, deterministic_ties=True)
        assert out2.tolist() == [[-1, -1], [1, 1]]

    def test_tie_values_are_valid_spins(self):
        rng = np.random.default_rng(5)
        S = rng.integers(0, 2, size=(40, 6)) * 2 - 1
        out = majority_vote([(0, 1), (2, 3), (4, 5)], S, rng=np.random.default_rng(9))
        assert set(np.unique(out)) <= {-1, 1}

    def test_unembed_inverts_lift(self):
        # lift to intact physical spins, majority-vote back: identity
        rng = np.random.default_rng(17)
        hw = chimera_graph(2)
        for n in (2, 5, 8):
            J = {(i, j): 1.0 for i in range(n) for j in range(i + 1, n)}
            e = embed_ising(IsingModel(n=n, J=J), clique_embedding(n, hw), hw)
            chains = [e.chains_dense[i] for i in range(n)]
            for _ in range(20):
                s = rng.integers(0, 2, size=n) * 2 - 1
                back = majority_vote(chains, e.lift(s))
                assert list(back) == list(s)
