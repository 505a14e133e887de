"""Broken-chain detection and majority-vote unembedding.

Works on densely indexed physical spins as produced by the annealer: chains
are sequences of dense physical indices, couplers are oriented (low, high)
dense pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ChainDiagnostics", "diagnose", "majority_vote"]


@dataclass(frozen=True)
class ChainDiagnostics:
    """Which chains broke, and the signed disagreement on each chain coupler."""

    broken: frozenset[int]
    violations: dict[tuple[int, int], int]  # (x, y) -> s_x - s_y in {-2, 0, 2}

    @property
    def broken_count(self) -> int:
        return len(self.broken)


def _check_coverage(chains, spins) -> np.ndarray:
    s = np.asarray(spins)
    if s.ndim != 1:
        raise ValueError("expected a single physical spin vector")
    top = max((max(chain) for chain in chains if len(chain)), default=-1)
    if top >= s.shape[0]:
        raise ValueError(f"spin vector of length {s.shape[0]} misses qubit {top}")
    return s


def diagnose(chains, couplers, spins) -> ChainDiagnostics:
    """Per-coupler violations sigma_x - sigma_y and the set of broken chains.

    A chain is broken when its qubits do not all carry the same value; for
    connected chains this is equivalent to some internal coupler having a
    nonzero violation.
    """
    s = _check_coverage(chains, spins)
    violations = {(x, y): int(s[x]) - int(s[y]) for x, y in couplers}
    broken = frozenset(
        i
        for i, chain in enumerate(chains)
        if len(chain) > 1 and s[list(chain)].min() != s[list(chain)].max()
    )
    return ChainDiagnostics(broken=broken, violations=violations)


def majority_vote(
    chains,
    spins,
    rng: np.random.Generator | None = None,
    deterministic_ties: bool = False,
):
    """Unembed physical spins to logical spins by per-chain majority.

    ``spins`` may be one sample (1-D) or a batch (2-D, one row per sample);
    the result has matching shape with one column per chain.  Exact ties are
    resolved by a coin flip from ``rng``, or — under ``deterministic_ties``
    — by the value of the chain's lowest-indexed qubit.
    """
    S = np.asarray(spins)
    single = S.ndim == 1
    if single:
        S = S[None, :]
    out = np.empty((S.shape[0], len(chains)), dtype=np.int8)
    for i, chain in enumerate(chains):
        if not len(chain):
            raise ValueError(f"chain {i} is empty")
        if max(chain) >= S.shape[1]:
            raise ValueError(f"spin vector of length {S.shape[1]} misses qubit {max(chain)}")
        sums = S[:, list(chain)].sum(axis=1)
        col = np.sign(sums).astype(np.int8)
        ties = col == 0
        if ties.any():
            if deterministic_ties:
                col[ties] = S[ties, chain[0]]
            elif rng is None:
                raise ValueError("majority tie requires an rng or deterministic_ties")
            else:
                col[ties] = rng.integers(0, 2, size=int(ties.sum()), dtype=np.int8) * 2 - 1
        out[:, i] = col
    return out[0] if single else out
