"""Tests for the chain-strength methods and their shared iteration engine."""

import numpy as np
import pytest

from chainopt.cliques import clique_qubo, extract_clique, gnp_random_graph
from chainopt.ising import IsingModel, evaluate_ising, evaluate_matrix, qubo_to_ising
from chainopt.methods import (
    LagrangeState,
    MethodConfig,
    StateMismatchError,
    apply_chain_biases,
    load_state,
    run_alm,
    run_alm_set,
    run_penalty,
    run_stored,
    run_stored_plus,
    run_utc,
    save_state,
    utc_chain_strength,
)
from chainopt.sampler import AnnealSampler, SampleSet, SamplerParams
from chainopt.topology import Embedding, chimera_graph, clique_embedding, embed_ising


def sampleset_from_rows(model, rows):
    spins = np.asarray(rows, dtype=np.int8)
    energies = evaluate_matrix(model, spins)
    order = np.argsort(energies, kind="stable")
    spins, energies = spins[order], energies[order]
    return SampleSet(spins=spins, energies=energies, counts=np.ones(len(spins), dtype=np.int64))


class ScriptedSampler:
    """Returns one pre-scripted physical sample per call, in call order."""

    def __init__(self, rows):
        self.queue = list(rows)
        self.models = []

    def __call__(self, model, seed):
        self.models.append(model)
        return sampleset_from_rows(model, [self.queue.pop(0)])


def two_chain_problem():
    """Two length-3 chains on chimera(2); logical coupler split over 2 spots.

    Dense layout: qubits (0, 1, 4, 5, 16, 17) -> 0..5; chain 0 = (2, 0, 4),
    chain 1 = (3, 1, 5); chain couplers ((0,2), (0,4), (1,3), (1,5)).
    """
    hw = chimera_graph(2)
    emb = Embedding({0: (4, 0, 16), 1: (5, 1, 17)})
    model = IsingModel(n=2, J={(0, 1): 1.0})
    return embed_ising(model, emb, hw)


BOTH_UP = [1, 1, 1, 1, 1, 1]
ANTI = [1, -1, 1, -1, 1, -1]  # chain 0 all +1, chain 1 all -1
CHAIN0_BROKEN = [1, -1, -1, -1, 1, -1]  # dense 2 dissents; majority still +1
BROKEN_UP = [1, 1, -1, 1, 1, 1]  # same dissent, chain 1 all +1


class TestUtcChainStrength:
    def test_complete_graph(self):
        m = IsingModel(n=4, J={(i, j): 1.0 for i in range(4) for j in range(i + 1, 4)})
        # rms 1, average degree 3
        assert utc_chain_strength(m) == pytest.approx(1.414 * np.sqrt(3.0))

    def test_single_coupler(self):
        m = IsingModel(n=2, J={(0, 1): 2.0})
        assert utc_chain_strength(m, prefactor=1.0) == pytest.approx(2.0)

    def test_scales_with_coupler_magnitude(self):
        m = IsingModel(n=3, J={(0, 1): 1.0, (1, 2): -1.0})
        doubled = IsingModel(n=3, J={(0, 1): 2.0, (1, 2): -2.0})
        assert utc_chain_strength(doubled) == pytest.approx(2 * utc_chain_strength(m))

    def test_no_couplers_warns(self):
        with pytest.warns(UserWarning):
            assert utc_chain_strength(IsingModel(n=2, h={0: 1.0})) == 1.0


class TestApplyChainBiases:
    def test_coefficients(self):
        e = two_chain_problem()
        lam = {pair: 0.0 for pair in e.chain_couplers}
        lam[(0, 2)] = 0.5
        out = apply_chain_biases(e, LagrangeState(mu=2.0, lam=lam))
        for pair in e.chain_couplers:
            assert out.J[pair] == -2.0
        assert out.h.get(0, 0.0) == 0.5
        assert out.h.get(2, 0.0) == -0.5
        assert out.offset == e.base.offset + 2.0 * len(e.chain_couplers)

    def test_mismatched_keys_raise(self):
        e = two_chain_problem()
        with pytest.raises(ValueError):
            apply_chain_biases(e, LagrangeState(mu=1.0, lam={(0, 2): 0.0}))

    def test_matches_quadratic_penalty_form(self):
        # linear multiplier writing == lam*(s_x - s_y) + (mu/2)(s_x - s_y)^2
        # added to the spread model, checked state by state
        rng = np.random.default_rng(44)
        e = two_chain_problem()
        for _ in range(20):
            mu = float(rng.uniform(0.0, 3.0))
            lam = {pair: float(rng.normal()) for pair in e.chain_couplers}
            biased = apply_chain_biases(e, LagrangeState(mu=mu, lam=lam))
            for bits in range(1 << e.num_qubits):
                s = np.array([1 if (bits >> k) & 1 else -1 for k in range(e.num_qubits)])
                expected = evaluate_ising(e.base, s)
                for (x, y), l in lam.items():
                    expected += l * (s[x] - s[y]) + 0.5 * mu * (s[x] - s[y]) ** 2
                assert evaluate_ising(biased, s) == pytest.approx(expected, abs=1e-9)

    def test_zero_mu_allowed(self):
        e = two_chain_problem()
        lam = {pair: 0.0 for pair in e.chain_couplers}
        out = apply_chain_biases(e, LagrangeState(mu=0.0, lam=lam))
        assert all(pair not in out.J for pair in e.chain_couplers)

    def test_negative_mu_rejected(self):
        with pytest.raises(ValueError):
            LagrangeState(mu=-0.1, lam={})


class TestMethodConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            MethodConfig(mu0=0.0)
        with pytest.raises(ValueError):
            MethodConfig(rho=1.0)
        with pytest.raises(ValueError):
            MethodConfig(max_iterations=0)


class TestRunUtc:
    def test_single_shot(self):
        e = two_chain_problem()
        stub = ScriptedSampler([ANTI])
        r = run_utc(e, stub, seed=0, cfg=MethodConfig(utc_prefactor=1.0))
        assert len(r.records) == 1
        assert r.best_iteration == 1
        # chain strength from the logical model: single J=1, degree 1
        assert r.state.mu == pytest.approx(1.0)
        assert all(v == 0.0 for v in r.state.lam.values())
        # the model actually annealed carries -mu on every chain coupler
        for pair in e.chain_couplers:
            assert stub.models[0].J[pair] == pytest.approx(-1.0)
        assert r.records[0].broken_count == 0
        assert r.records[0].objective == -1.0


class TestRunPenalty:
    def test_grows_until_intact(self):
        e = two_chain_problem()
        stub = ScriptedSampler([CHAIN0_BROKEN, ANTI])
        cfg = MethodConfig(mu0=1.5, rho=2.0, max_iterations=10)
        r = run_penalty(e, stub, seed=0, cfg=cfg)
        assert [rec.iteration for rec in r.records] == [1, 2]
        assert [rec.broken_count for rec in r.records] == [1, 0]
        # mu recorded per iteration is the value in force during it
        assert [rec.mu for rec in r.records] == [1.5, 3.0]
        assert r.state.mu == 3.0  # no growth on the intact iteration
        assert all(v == 0.0 for v in r.state.lam.values())

    def test_stops_at_max_iterations(self):
        e = two_chain_problem()
        stub = ScriptedSampler([CHAIN0_BROKEN] * 4)
        cfg = MethodConfig(mu0=1.0, rho=2.0, max_iterations=4)
        r = run_penalty(e, stub, seed=0, cfg=cfg)
        assert len(r.records) == 4
        assert r.records[-1].broken_count == 1
        assert r.state.mu == 16.0

    def test_unconditional_growth(self):
        e = two_chain_problem()
        stub = ScriptedSampler([ANTI])
        cfg = MethodConfig(mu0=1.0, rho=3.0, max_iterations=5, unconditional_mu_growth=True)
        r = run_penalty(e, stub, seed=0, cfg=cfg)
        assert len(r.records) == 1  # still stops once intact
        assert r.state.mu == 3.0  # but the final update happened

    def test_best_iteration_prefers_lowest_objective_then_earliest(self):
        e = two_chain_problem()
        # majority votes: BROKEN_UP -> (+1, +1), CHAIN0_BROKEN and ANTI -> (+1, -1)
        stub = ScriptedSampler([BROKEN_UP, CHAIN0_BROKEN, ANTI])
        cfg = MethodConfig(mu0=1.0, rho=2.0, max_iterations=3)
        r = run_penalty(e, stub, seed=0, cfg=cfg)
        assert [rec.objective for rec in r.records] == [1.0, -1.0, -1.0]
        # objectives tie at -1 twice; the earlier iteration wins
        assert r.best_iteration == 2
        assert r.best.objective == -1.0


class TestRunAlm:
    def test_multiplier_update_from_violations(self):
        e = two_chain_problem()
        stub = ScriptedSampler([CHAIN0_BROKEN, ANTI])
        cfg = MethodConfig(mu0=1.5, rho=2.0, max_iterations=10)
        r = run_alm(e, stub, seed=0, cfg=cfg)
        # CHAIN0_BROKEN: dense 0 carries +1, dense 2 carries -1, dense 4 +1
        # -> violation on (0, 2) is +2, on (0, 4) is 0
        assert r.state.lam[(0, 2)] == pytest.approx(1.5 * 2)
        assert r.state.lam[(0, 4)] == 0.0
        assert r.state.lam[(1, 3)] == 0.0
        assert r.state.lam[(1, 5)] == 0.0
        assert r.state.mu == 3.0

    def test_multipliers_accumulate_with_current_mu(self):
        e = two_chain_problem()
        stub = ScriptedSampler([CHAIN0_BROKEN, CHAIN0_BROKEN, ANTI])
        cfg = MethodConfig(mu0=1.0, rho=2.0, max_iterations=10)
        r = run_alm(e, stub, seed=0, cfg=cfg)
        # 1.0*2 from iteration 1, then 2.0*2 from iteration 2
        assert r.state.lam[(0, 2)] == pytest.approx(6.0)
        assert r.state.mu == 4.0

    def test_signed_updates_cancel(self):
        e = two_chain_problem()
        flipped = [-1, -1, 1, -1, -1, -1]  # violation on (0, 2) is -2
        stub = ScriptedSampler([CHAIN0_BROKEN, flipped, ANTI])
        cfg = MethodConfig(mu0=1.0, rho=1.5, max_iterations=10)
        r = run_alm(e, stub, seed=0, cfg=cfg)
        # +1.0*2 then -1.5*2
        assert r.state.lam[(0, 2)] == pytest.approx(2.0 - 3.0)


class TestRunAlmSet:
    def test_averaged_update(self):
        e = two_chain_problem()
        # iteration 1: problem 0 breaks (violation +2 on (0,2)), problem 1 intact
        # iteration 2: both intact
        stub = ScriptedSampler([CHAIN0_BROKEN, ANTI, ANTI, ANTI])
        cfg = MethodConfig(mu0=1.5, rho=2.0, max_iterations=10)
        r = run_alm_set([e, e], stub, seed=0, cfg=cfg)
        assert [rec.iteration for rec in r.records] == [1, 2]
        assert r.records[0].broken_counts == (1, 0)
        assert r.records[1].broken_counts == (0, 0)
        # averaged over k=2 problems: 1.5 * 2 / 2
        assert r.state.lam[(0, 2)] == pytest.approx(1.5)
        assert r.state.mu == 3.0

    def test_stops_only_when_all_intact(self):
        e = two_chain_problem()
        stub = ScriptedSampler([ANTI, CHAIN0_BROKEN, ANTI, ANTI])
        cfg = MethodConfig(mu0=1.0, rho=2.0, max_iterations=10)
        r = run_alm_set([e, e], stub, seed=0, cfg=cfg)
        assert len(r.records) == 2
        assert r.records[0].broken_counts == (0, 1)

    def test_single_problem_matches_run_alm(self):
        # with k=1 the averaged update degenerates to the per-problem rule
        g = gnp_random_graph(12, 0.5, seed=3)
        hw = chimera_graph(3)
        e = embed_ising(qubo_to_ising(clique_qubo(g)), clique_embedding(12, hw), hw)
        backend = AnnealSampler(params=SamplerParams(num_reads=50, sweeps=60))
        cfg = MethodConfig(mu0=0.5, rho=1.3, max_iterations=8)
        solo = run_alm(e, backend, seed=21, cfg=cfg)
        grouped = run_alm_set([e], backend, seed=21, cfg=cfg)
        assert grouped.state.mu == solo.state.mu
        assert grouped.state.lam == solo.state.lam
        assert [r.broken_counts[0] for r in grouped.records] == [
            r.broken_count for r in solo.records
        ]

    def test_requires_shared_embedding(self):
        hw = chimera_graph(2)
        m = IsingModel(n=2, J={(0, 1): 1.0})
        a = embed_ising(m, Embedding({0: (4, 0, 16), 1: (5, 1, 17)}), hw)
        b = embed_ising(m, Embedding({0: (4, 0), 1: (5, 1)}), hw)
        with pytest.raises(ValueError):
            run_alm_set([a, b], ScriptedSampler([]), seed=0)
        with pytest.raises(ValueError):
            run_alm_set([], ScriptedSampler([]), seed=0)


class TestStoredReplay:
    def stored_state(self, e, value=0.25):
        lam = {pair: 0.0 for pair in e.chain_couplers}
        lam[(0, 2)] = value
        return LagrangeState(mu=2.0, lam=lam)

    def test_run_stored_no_updates(self):
        e = two_chain_problem()
        state = self.stored_state(e)
        stub = ScriptedSampler([ANTI])
        r = run_stored(e, state, stub, seed=0)
        assert len(r.records) == 1
        assert r.records[0].mu == 2.0
        assert r.state.lam == state.lam
        # chain biases from the stored multipliers were applied
        assert stub.models[0].h.get(0, 0.0) == pytest.approx(0.25)

    def test_run_stored_rejects_foreign_state(self):
        e = two_chain_problem()
        with pytest.raises(StateMismatchError):
            run_stored(e, LagrangeState(mu=1.0, lam={(9, 10): 0.0}), ScriptedSampler([]), 0)

    def test_run_stored_plus_refreshes_once(self):
        e = two_chain_problem()
        state = self.stored_state(e, value=0.0)
        stub = ScriptedSampler([CHAIN0_BROKEN, ANTI])
        cfg = MethodConfig(mu0=1.0, rho=1.5, max_iterations=10)
        r = run_stored_plus(e, state, stub, seed=0, cfg=cfg)
        assert [rec.iteration for rec in r.records] == [1, 2]
        assert r.state.mu == pytest.approx(2.0 * 1.5)
        assert r.state.lam[(0, 2)] == pytest.approx(2.0 * 2)  # stored mu times violation
        # second call saw the refreshed multipliers
        assert stub.models[1].h.get(0, 0.0) == pytest.approx(4.0)
        # both samples majority-vote to (+1, -1): objective tie, iteration 1 wins
        assert r.records[0].objective == r.records[1].objective
        assert r.best_iteration == 1

    def test_run_stored_plus_keeps_better_of_two(self):
        e = two_chain_problem()
        state = self.stored_state(e, value=0.0)
        cfg = MethodConfig(rho=1.5)
        worse_then_better = ScriptedSampler([BOTH_UP, ANTI])
        assert run_stored_plus(e, state, worse_then_better, 0, cfg).best_iteration == 2
        better_then_worse = ScriptedSampler([ANTI, BOTH_UP])
        assert run_stored_plus(e, state, better_then_worse, 0, cfg).best_iteration == 1


class TestStatePersistence:
    def test_round_trip(self, tmp_path):
        e = two_chain_problem()
        lam = {pair: float(i) for i, pair in enumerate(e.chain_couplers)}
        state = LagrangeState(mu=1.75, lam=lam)
        p = tmp_path / "state.json"
        save_state(state, e, p)
        again = load_state(p, e)
        assert again.mu == state.mu
        assert again.lam == state.lam

    def test_fingerprint_mismatch(self, tmp_path):
        e = two_chain_problem()
        state = LagrangeState(mu=1.0, lam={pair: 0.0 for pair in e.chain_couplers})
        p = tmp_path / "state.json"
        save_state(state, e, p)
        hw = chimera_graph(2)
        other = embed_ising(
            IsingModel(n=2, J={(0, 1): 1.0}), Embedding({0: (4, 0), 1: (5, 1)}), hw
        )
        with pytest.raises(StateMismatchError) as err:
            load_state(p, other)
        assert err.value.expected_fingerprint == other.embedding.fingerprint()

    def test_save_rejects_foreign_state(self, tmp_path):
        e = two_chain_problem()
        with pytest.raises(StateMismatchError):
            save_state(LagrangeState(mu=1.0, lam={(0, 1): 0.0}), e, tmp_path / "s.json")


class TestOnRealSampler:
    """End-to-end behaviour on a 20-vertex clique problem, frozen seeds."""

    def setup_method(self):
        self.g = gnp_random_graph(20, 0.5, seed=1)
        hw = chimera_graph(5)
        self.e = embed_ising(
            qubo_to_ising(clique_qubo(self.g)), clique_embedding(20, hw), hw
        )
        self.backend = AnnealSampler(params=SamplerParams(num_reads=200, sweeps=300))

    def clique_of(self, record):
        x = (np.asarray(record.logical_spins) + 1) // 2
        return extract_clique(self.g, x)

    def test_default_strength_holds_immediately(self):
        r = run_penalty(self.e, self.backend, seed=11)
        assert [rec.broken_count for rec in r.records] == [0]
        assert r.state.mu == 1.5
        _, valid, size = self.clique_of(r.best)
        assert valid and size == 5  # the true maximum for this graph

    def test_weak_start_recovers(self):
        # frozen trails: mu0 far too small, growth repairs the chains
        cfg = MethodConfig(mu0=0.3, rho=1.5, max_iterations=25)
        pm = run_penalty(self.e, self.backend, seed=11, cfg=cfg)
        assert [rec.broken_count for rec in pm.records] == [13, 12, 7, 3, 0]
        assert pm.state.mu == pytest.approx(0.3 * 1.5**4)
        assert all(v == 0.0 for v in pm.state.lam.values())

        alm = run_alm(self.e, self.backend, seed=11, cfg=cfg)
        assert [rec.broken_count for rec in alm.records] == [13, 8, 4, 1, 0]
        assert any(v != 0.0 for v in alm.state.lam.values())
        _, valid, size = self.clique_of(alm.best)
        assert valid and size == 5

    def test_utc_one_shot(self):
        r = run_utc(self.e, self.backend, seed=11)
        assert r.state.mu == pytest.approx(2.2019389864389973)
        assert r.records[0].broken_count == 0
        _, valid, size = self.clique_of(r.records[0])
        assert valid and size == 5
