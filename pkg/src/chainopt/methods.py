"""Chain-strength assignment methods for embedded Ising problems.

Four strategies over a shared iteration engine:

* ``run_utc`` — one-shot uniform torque compensation heuristic.
* ``run_penalty`` — iterative quadratic penalty (grow mu until chains hold).
* ``run_alm`` — augmented Lagrangian: per-coupler multipliers plus penalty.
* ``run_alm_set`` — augmented Lagrangian trained across a set of problems
  sharing one embedding; the resulting ``LagrangeState`` can be stored and
  replayed on unseen problems via ``run_stored`` / ``run_stored_plus``.

A sampler backend is any callable ``sampler(model, seed) -> SampleSet``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .chains import ChainDiagnostics, diagnose, majority_vote
from .ising import IsingModel, evaluate_matrix
from .seeds import ANNEAL, TIE_BREAK, derived_seed
from .topology import EmbeddedIsing

__all__ = [
    "IterationRecord",
    "LagrangeState",
    "MethodConfig",
    "RunResult",
    "SetIterationRecord",
    "SetRunResult",
    "StateMismatchError",
    "apply_chain_biases",
    "load_state",
    "run_alm",
    "run_alm_set",
    "run_penalty",
    "run_stored",
    "run_stored_plus",
    "run_utc",
    "save_state",
    "utc_chain_strength",
]

Sampler = Callable[[IsingModel, int], "object"]


class StateMismatchError(ValueError):
    """Stored multipliers do not belong to the presented embedding."""

    def __init__(self, message: str, expected_fingerprint: str | None = None):
        super().__init__(message)
        self.expected_fingerprint = expected_fingerprint


@dataclass(frozen=True)
class MethodConfig:
    """Shared knobs of the iterative methods."""

    mu0: float = 1.5
    rho: float = 1.1
    max_iterations: int = 20
    utc_prefactor: float = 1.414
    # Literal reading of the update step grows mu every iteration; the
    # default grows it only while broken chains persist.
    unconditional_mu_growth: bool = False

    def __post_init__(self):
        if self.mu0 <= 0:
            raise ValueError("mu0 must be positive")
        if self.rho <= 1:
            raise ValueError("rho must exceed 1")
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")


@dataclass
class LagrangeState:
    """Penalty factor and per-chain-coupler multipliers.

    ``lam`` is keyed by the embedding's oriented chain couplers, exactly.
    A zero ``mu`` is allowed as a degenerate control case (unconstrained
    chains); the iterative methods always start from ``mu0 > 0``.
    """

    mu: float
    lam: dict[tuple[int, int], float]

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("penalty factor must be nonnegative")
        self.lam = {(int(x), int(y)): float(v) for (x, y), v in self.lam.items()}


@dataclass(frozen=True)
class IterationRecord:
    """One method iteration: settings used and the best sample they produced."""

    iteration: int  # 1-based
    mu: float  # value used during this iteration
    broken_count: int  # broken chains in the best sample
    objective: float  # logical objective of the best sample
    logical_spins: np.ndarray


@dataclass
class RunResult:
    records: list[IterationRecord]
    state: LagrangeState  # multipliers/penalty after the final update
    best_iteration: int  # 1-based, lowest objective, earliest on ties

    @property
    def best(self) -> IterationRecord:
        return self.records[self.best_iteration - 1]


@dataclass(frozen=True)
class SetIterationRecord:
    iteration: int
    mu: float
    broken_counts: tuple[int, ...]  # per problem
    objectives: tuple[float, ...]  # per problem


@dataclass
class SetRunResult:
    state: LagrangeState
    records: list[SetIterationRecord]


def utc_chain_strength(m: IsingModel, prefactor: float = 1.414) -> float:
    """RMS of the quadratic couplers times sqrt(average degree) times prefactor.

    Models without any quadratic coupler fall back to 1.0 with a warning.
    """
    if not m.J:
        warnings.warn("model has no quadratic couplers; falling back to chain strength 1.0")
        return 1.0
    vals = np.fromiter(m.J.values(), dtype=np.float64)
    rms = float(np.sqrt(np.mean(vals * vals)))
    average_degree = 2.0 * len(vals) / m.n
    return prefactor * rms * float(np.sqrt(average_degree))


def apply_chain_biases(e: EmbeddedIsing, state: LagrangeState) -> IsingModel:
    """Write the chain terms into the base model.

    Every chain coupler (x, y) contributes ``lam*s_x - lam*s_y - mu*s_x*s_y``
    plus a constant ``mu``; since spins square to one this reproduces the
    multiplier term plus the quadratic penalty ``mu/2 * (s_x - s_y)^2``
    exactly, offset included.
    """
    couplers = e.chain_couplers
    if set(state.lam) != set(couplers):
        raise ValueError("multiplier keys do not match the embedding's chain couplers")
    h = dict(e.base.h)
    J = dict(e.base.J)
    for x, y in couplers:
        lam = state.lam[(x, y)]
        if lam:
            h[x] = h.get(x, 0.0) + lam
            h[y] = h.get(y, 0.0) - lam
        J[(x, y)] = -state.mu
    offset = e.base.offset + state.mu * len(couplers)
    return IsingModel(n=e.base.n, h=h, J=J, offset=offset)


def _chains_tuple(e: EmbeddedIsing) -> tuple[tuple[int, ...], ...]:
    return tuple(e.chains_dense[i] for i in range(e.logical.n))


def _best_logical(e, chains, sampleset, tie_seed):
    """Pick the sample whose majority-vote unembedding has the lowest logical
    objective; ties go to the earliest sample in energy-sorted order."""
    rng = np.random.default_rng(tie_seed)
    logical = majority_vote(chains, sampleset.spins, rng)
    objectives = evaluate_matrix(e.logical, logical)
    k = int(np.argmin(objectives))
    return logical[k], float(objectives[k]), sampleset.spins[k]


def _single_call(
    e: EmbeddedIsing,
    state: LagrangeState,
    sampler: Sampler,
    seed: int,
    iteration: int,
    problem_index: int = 0,
) -> tuple[IterationRecord, ChainDiagnostics]:
    chains = _chains_tuple(e)
    physical = apply_chain_biases(e, state)
    ss = sampler(physical, derived_seed(seed, ANNEAL, iteration, problem_index))
    logical, objective, phys = _best_logical(
        e, chains, ss, derived_seed(seed, TIE_BREAK, iteration, problem_index)
    )
    diag = diagnose(chains, e.chain_couplers, phys)
    record = IterationRecord(
        iteration=iteration,
        mu=state.mu,
        broken_count=diag.broken_count,
        objective=objective,
        logical_spins=logical,
    )
    return record, diag


def _best_iteration(records: Sequence[IterationRecord]) -> int:
    best = 0
    for k in range(1, len(records)):
        if records[k].objective < records[best].objective:
            best = k
    return records[best].iteration


def _method_loop(
    e: EmbeddedIsing, sampler: Sampler, seed: int, cfg: MethodConfig, with_multipliers: bool
) -> RunResult:
    lam = {pair: 0.0 for pair in e.chain_couplers}
    mu = cfg.mu0
    records: list[IterationRecord] = []
    for t in range(1, cfg.max_iterations + 1):
        record, diag = _single_call(e, LagrangeState(mu=mu, lam=lam), sampler, seed, t)
        records.append(record)
        if with_multipliers:
            for pair, v in diag.violations.items():
                if v:
                    lam[pair] += mu * v
        if diag.broken_count or cfg.unconditional_mu_growth:
            mu *= cfg.rho
        if not diag.broken_count:
            break
    state = LagrangeState(mu=mu, lam=lam)
    return RunResult(records=records, state=state, best_iteration=_best_iteration(records))


def run_utc(
    e: EmbeddedIsing, sampler: Sampler, seed: int, cfg: MethodConfig | None = None
) -> RunResult:
    """Single anneal with chain strength from uniform torque compensation."""
    cfg = cfg or MethodConfig()
    strength = utc_chain_strength(e.logical, cfg.utc_prefactor)
    state = LagrangeState(mu=strength, lam={pair: 0.0 for pair in e.chain_couplers})
    record, _ = _single_call(e, state, sampler, seed, 1)
    return RunResult(records=[record], state=state, best_iteration=1)


def run_penalty(
    e: EmbeddedIsing, sampler: Sampler, seed: int, cfg: MethodConfig | None = None
) -> RunResult:
    """Quadratic penalty: grow mu by rho while the best sample breaks chains."""
    return _method_loop(e, sampler, seed, cfg or MethodConfig(), with_multipliers=False)


def run_alm(
    e: EmbeddedIsing, sampler: Sampler, seed: int, cfg: MethodConfig | None = None
) -> RunResult:
    """Augmented Lagrangian: multiplier updates from the best sample's
    violations, penalty growth while broken chains persist."""
    return _method_loop(e, sampler, seed, cfg or MethodConfig(), with_multipliers=True)


def run_alm_set(
    problems: Sequence[EmbeddedIsing],
    sampler: Sampler,
    seed: int,
    cfg: MethodConfig | None = None,
) -> SetRunResult:
    """Train one multiplier set across problems sharing a single embedding.

    Per iteration every problem is sampled with the current (mu, lam); the
    multiplier update averages the per-problem violations.  Stops when no
    problem shows a broken chain, or after ``max_iterations``.
    """
    cfg = cfg or MethodConfig()
    if not problems:
        raise ValueError("need at least one problem")
    first = problems[0]
    for p in problems[1:]:
        if (
            p.chain_couplers != first.chain_couplers
            or p.embedding.fingerprint() != first.embedding.fingerprint()
        ):
            raise ValueError("all problems must share one embedding")
    k = len(problems)
    lam = {pair: 0.0 for pair in first.chain_couplers}
    mu = cfg.mu0
    records: list[SetIterationRecord] = []
    for t in range(1, cfg.max_iterations + 1):
        state = LagrangeState(mu=mu, lam=lam)
        broken_counts: list[int] = []
        objectives: list[float] = []
        totals = {pair: 0 for pair in first.chain_couplers}
        for i, e in enumerate(problems):
            record, diag = _single_call(e, state, sampler, seed, t, problem_index=i)
            broken_counts.append(record.broken_count)
            objectives.append(record.objective)
            for pair, v in diag.violations.items():
                totals[pair] += v
        for pair, total in totals.items():
            if total:
                lam[pair] += mu * total / k
        records.append(
            SetIterationRecord(t, mu, tuple(broken_counts), tuple(objectives))
        )
        if any(broken_counts) or cfg.unconditional_mu_growth:
            mu *= cfg.rho
        if not any(broken_counts):
            break
    return SetRunResult(state=LagrangeState(mu=mu, lam=lam), records=records)


def _require_matching_keys(e: EmbeddedIsing, state: LagrangeState) -> None:
    if set(state.lam) != set(e.chain_couplers):
        raise StateMismatchError(
            "stored multipliers are keyed by a different chain-coupler set",
            expected_fingerprint=e.embedding.fingerprint(),
        )


def run_stored(
    e: EmbeddedIsing, state: LagrangeState, sampler: Sampler, seed: int
) -> RunResult:
    """One anneal with previously trained multipliers, no updates."""
    _require_matching_keys(e, state)
    record, _ = _single_call(e, state, sampler, seed, 1)
    return RunResult(records=[record], state=state, best_iteration=1)


def run_stored_plus(
    e: EmbeddedIsing,
    stored: LagrangeState,
    sampler: Sampler,
    seed: int,
    cfg: MethodConfig | None = None,
) -> RunResult:
    """Stored multipliers plus one refresh: anneal, update (lam from the best
    sample, mu scaled by rho), anneal again, keep the better objective."""
    cfg = cfg or MethodConfig()
    _require_matching_keys(e, stored)
    rec1, diag1 = _single_call(e, stored, sampler, seed, 1)
    lam = dict(stored.lam)
    for pair, v in diag1.violations.items():
        if v:
            lam[pair] += stored.mu * v
    refreshed = LagrangeState(mu=stored.mu * cfg.rho, lam=lam)
    rec2, _ = _single_call(e, refreshed, sampler, seed, 2)
    best = 1 if rec1.objective <= rec2.objective else 2
    return RunResult(records=[rec1, rec2], state=refreshed, best_iteration=best)


def save_state(state: LagrangeState, e: EmbeddedIsing, path) -> None:
    """Persist (mu, lam) keyed by hardware qubit ids, with the embedding's
    fingerprint so stale reuse is caught at load time."""
    _require_matching_keys(e, state)
    lam = {}
    for x, y in sorted(state.lam):
        a, b = e.hw_pair((x, y))
        lam[f"{a},{b}"] = state.lam[(x, y)]
    payload = {
        "mu": state.mu,
        "lambda": lam,
        "embedding_fingerprint": e.embedding.fingerprint(),
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")


def load_state(path, e: EmbeddedIsing) -> LagrangeState:
    with open(path) as f:
        payload = json.load(f)
    expected = e.embedding.fingerprint()
    got = payload.get("embedding_fingerprint")
    if got != expected:
        raise StateMismatchError(
            f"{path}: state was trained for embedding {got!r}, expected {expected!r}",
            expected_fingerprint=expected,
        )
    index = {q: i for i, q in enumerate(e.qubits)}
    lam: dict[tuple[int, int], float] = {}
    for key, v in payload["lambda"].items():
        a, b = (int(part) for part in key.split(","))
        if a not in index or b not in index:
            raise StateMismatchError(
                f"{path}: multiplier on unknown coupler ({a}, {b})",
                expected_fingerprint=expected,
            )
        lam[(index[a], index[b])] = float(v)
    state = LagrangeState(mu=float(payload["mu"]), lam=lam)
    _require_matching_keys(e, state)
    return state
