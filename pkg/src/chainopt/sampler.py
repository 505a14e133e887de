"""Stochastic annealer emulation and an exact brute-force backend.

The hardware stand-in is Metropolis single-spin-flip simulated annealing
with a geometric inverse-temperature schedule.  Submitted models first go
through the hardware precision model: coefficients are rescaled into the
device ranges and, optionally, perturbed by Gaussian coefficient noise.
Returned energies are always re-evaluated against the original submitted
model, the way postprocessing sees them in practice.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .ising import IsingModel, evaluate_matrix

__all__ = [
    "AnnealSampler",
    "ExactSampler",
    "PrecisionModel",
    "SampleSet",
    "SamplerParams",
    "exact_solve",
    "normalize_and_perturb",
    "sample",
]

EXACT_SOLVE_LIMIT = 24


@dataclass(frozen=True)
class SamplerParams:
    """Annealer call settings; the seed fully determines the output."""

    num_reads: int = 1000
    sweeps: int = 1000
    beta_min: float = 0.1
    beta_max: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValueError("num_reads must be at least 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be at least 1")
        if not (0.0 < self.beta_min < self.beta_max):
            raise ValueError("need 0 < beta_min < beta_max")


@dataclass(frozen=True)
class PrecisionModel:
    """Coefficient ranges and analog-resolution noise of the emulated device."""

    h_range: float = 4.0
    j_range: float = 1.0
    noise_std: float = 0.01
    enabled: bool = True

    def __post_init__(self):
        if self.h_range <= 0 or self.j_range <= 0:
            raise ValueError("coefficient ranges must be positive")
        if self.noise_std < 0:
            raise ValueError("noise std must be nonnegative")


@dataclass
class SampleSet:
    """Unique spin assignments with multiplicities, sorted by ascending energy."""

    spins: np.ndarray  # (k, n) int8
    energies: np.ndarray  # (k,) float64, w.r.t. the submitted model
    counts: np.ndarray  # (k,) int64

    def __len__(self) -> int:
        return len(self.energies)

    def __iter__(self):
        for i in range(len(self.energies)):
            yield self.spins[i], float(self.energies[i]), int(self.counts[i])

    def best(self) -> tuple[np.ndarray, float]:
        return self.spins[0], float(self.energies[0])


def normalize_and_perturb(
    m: IsingModel, p: PrecisionModel, rng: np.random.Generator | None = None
) -> IsingModel:
    """Rescale coefficients into device ranges, then add coefficient noise.

    The scale is ``max(max|h|/h_range, max|J|/j_range, 1)``; the offset is
    scaled identically so energies only change by that global factor.  When
    noise is enabled, an independent zero-mean Gaussian draw is added to
    every stored normalized coefficient.
    """
    if m.n < 1:
        raise ValueError("cannot normalize an empty model")
    max_h = max((abs(v) for v in m.h.values()), default=0.0)
    max_j = max((abs(v) for v in m.J.values()), default=0.0)
    scale = max(max_h / p.h_range, max_j / p.j_range, 1.0)
    h = {i: v / scale for i, v in m.h.items()}
    J = {pair: v / scale for pair, v in m.J.items()}
    offset = m.offset / scale
    if p.enabled and p.noise_std > 0.0:
        if rng is None:
            raise ValueError("coefficient noise requires an rng")
        for i in sorted(h):
            h[i] += rng.normal(0.0, p.noise_std)
        for pair in sorted(J):
            J[pair] += rng.normal(0.0, p.noise_std)
    return IsingModel(n=m.n, h=h, J=J, offset=offset)


def _csr_arrays(m: IsingModel):
    h, rows, cols, vals = m.to_arrays()
    counts = np.zeros(m.n + 1, dtype=np.int64)
    for i, j in zip(rows, cols):
        counts[i + 1] += 1
        counts[j + 1] += 1
    indptr = np.cumsum(counts)
    indices = np.zeros(indptr[-1], dtype=np.int64)
    values = np.zeros(indptr[-1], dtype=np.float64)
    cursor = indptr[:-1].copy()
    for i, j, v in zip(rows, cols, vals):
        indices[cursor[i]] = j
        values[cursor[i]] = v
        cursor[i] += 1
        indices[cursor[j]] = i
        values[cursor[j]] = v
        cursor[j] += 1
    return h, indptr, indices, values


_MIX_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_M1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix64(state):
    # splitmix64 step: wrapping uint64 arithmetic, state in -> (state, draw) out
    state = state + _MIX_GAMMA
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX_M1
    z = (z ^ (z >> np.uint64(27))) * _MIX_M2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def _anneal_kernel(n, h, indptr, indices, values, betas, read_seeds):
    num_reads = read_seeds.shape[0]
    sweeps = betas.shape[0]
    out = np.empty((num_reads, n), dtype=np.int8)
    for r in range(num_reads):
        state = read_seeds[r]
        spins = np.empty(n, dtype=np.int8)
        for i in range(n):
            state, z = _mix64(state)
            spins[i] = 1 if (z >> np.uint64(63)) else -1
        for t in range(sweeps):
            beta = betas[t]
            for i in range(n):
                local = h[i]
                for k in range(indptr[i], indptr[i + 1]):
                    local += values[k] * spins[indices[k]]
                delta = -2.0 * spins[i] * local
                if delta <= 0.0:
                    spins[i] = -spins[i]
                else:
                    state, z = _mix64(state)
                    u = (z >> np.uint64(11)) * _INV_2_53
                    if u < np.exp(-beta * delta):
                        spins[i] = -spins[i]
        out[r] = spins
    return out


def sample(m: IsingModel, params: SamplerParams, precision: PrecisionModel) -> SampleSet:
    """Run ``num_reads`` independent annealing restarts on the model.

    Restarts run on the normalized (and possibly perturbed) model; reported
    energies are re-evaluated against the submitted model.  The result is
    bit-reproducible for a fixed (model, params, precision) triple.
    """
    root = np.random.SeedSequence(params.seed)
    noise_ss, reads_ss = root.spawn(2)
    work = normalize_and_perturb(m, precision, np.random.default_rng(noise_ss))
    h, indptr, indices, values = _csr_arrays(work)
    if params.sweeps >= 2:
        betas = np.geomspace(params.beta_min, params.beta_max, params.sweeps)
    else:
        betas = np.array([params.beta_max])
    read_seeds = reads_ss.generate_state(params.num_reads, dtype=np.uint64)
    raw = _anneal_kernel(m.n, h, indptr, indices, values, betas, read_seeds)
    uniq, counts = np.unique(raw, axis=0, return_counts=True)
    energies = evaluate_matrix(m, uniq)
    order = np.argsort(energies, kind="stable")  # ties stay in lex spin order
    return SampleSet(
        spins=uniq[order], energies=energies[order], counts=counts[order].astype(np.int64)
    )


@njit(cache=True)
def _exhaustive_kernel(n, h, indptr, indices, values):
    # Lexicographic enumeration (bit b of idx drives spin n-1-b, 0 -> -1) with
    # incremental energy updates; strict improvement keeps the earliest, i.e.
    # lexicographically smallest, minimizer.
    spins = np.full(n, -1, dtype=np.int8)
    energy = 0.0
    for i in range(n):
        energy += h[i] * spins[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j > i:
                energy += values[k] * spins[i] * spins[j]
    best_energy = energy
    best_idx = np.uint64(0)
    for idx in range(1, 1 << n):
        changed = idx ^ (idx - 1)
        b = 0
        while (changed >> b) & 1:
            i = n - 1 - b
            local = h[i]
            for k in range(indptr[i], indptr[i + 1]):
                local += values[k] * spins[indices[k]]
            energy += -2.0 * spins[i] * local
            spins[i] = -spins[i]
            b += 1
        if energy < best_energy:
            best_energy = energy
            best_idx = np.uint64(idx)
    return best_idx


def exact_solve(m: IsingModel) -> tuple[np.ndarray, float]:
    """Global minimizer by exhaustive enumeration (n <= 24).

    Ties between equal-energy states go to the lexicographically smallest
    spin vector, with -1 ordered before +1.
    """
    if m.n > EXACT_SOLVE_LIMIT:
        raise ValueError(f"exact_solve is limited to {EXACT_SOLVE_LIMIT} variables")
    if m.n < 1:
        raise ValueError("cannot solve an empty model")
    h, indptr, indices, values = _csr_arrays(m)
    best_idx = int(_exhaustive_kernel(m.n, h, indptr, indices, values))
    spins = np.array(
        [1 if (best_idx >> (m.n - 1 - i)) & 1 else -1 for i in range(m.n)], dtype=np.int8
    )
    energies = evaluate_matrix(m, spins[None, :])
    return spins, float(energies[0])


@dataclass
class AnnealSampler:
    """Callable backend: ``sampler(model, seed) -> SampleSet`` via annealing."""

    params: SamplerParams = field(default_factory=SamplerParams)
    precision: PrecisionModel = field(default_factory=PrecisionModel)

    def __call__(self, model: IsingModel, seed: int) -> SampleSet:
        return sample(model, replace(self.params, seed=seed), self.precision)


class ExactSampler:
    """Callable backend returning the single exact optimum; for small tests."""

    def __call__(self, model: IsingModel, seed: int) -> SampleSet:
        spins, energy = exact_solve(model)
        return SampleSet(
            spins=spins[None, :],
            energies=np.array([energy]),
            counts=np.array([1], dtype=np.int64),
        )
