"""Hardware graphs, complete-graph minor embeddings, and uniform spreading.

The built-in topology is the Chimera grid of K_{4,4} cells; other
topologies (e.g. Pegasus) are ingested through JSON hardware files and
externally produced embedding files.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .ising import IsingModel

__all__ = [
    "CapacityError",
    "EmbeddingError",
    "Embedding",
    "EmbeddedIsing",
    "HardwareGraph",
    "chimera_graph",
    "chimera_qubit",
    "clique_embedding",
    "embed_ising",
    "load_embedding",
    "load_hardware_graph",
    "save_embedding",
    "save_hardware_graph",
    "validate_embedding",
]


class CapacityError(ValueError):
    """Requested problem does not fit the target topology."""


class EmbeddingError(ValueError):
    """Embedding is structurally unusable for the requested problem."""


@dataclass
class HardwareGraph:
    """Undirected qubit/coupler graph of an annealer."""

    qubits: frozenset[int]
    couplers: frozenset[tuple[int, int]]
    tag: str = "external"

    def __post_init__(self):
        self.qubits = frozenset(int(q) for q in self.qubits)
        canon = set()
        for a, b in self.couplers:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop coupler on qubit {a}")
            if a not in self.qubits or b not in self.qubits:
                raise ValueError(f"coupler ({a}, {b}) endpoint is not a qubit")
            canon.add((a, b) if a < b else (b, a))
        self.couplers = frozenset(canon)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {q: set() for q in self.qubits}
        for a, b in self.couplers:
            adj[a].add(b)
            adj[b].add(a)
        return {q: frozenset(v) for q, v in adj.items()}

    def has_coupler(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self.couplers


def chimera_qubit(m: int, row: int, col: int, side: int, k: int) -> int:
    """Linear id of cell (row, col), side 0 (vertical) or 1 (horizontal), unit k."""
    return 8 * (row * m + col) + 4 * side + k


def chimera_graph(m: int) -> HardwareGraph:
    """m x m grid of K_{4,4} cells: 8m^2 qubits, 16m^2 + 8m(m-1) couplers.

    Side-0 qubits couple to the same unit in the cell below; side-1 qubits
    to the same unit in the cell to the right.
    """
    if m < 1:
        raise ValueError("chimera order must be at least 1")
    qubits = range(8 * m * m)
    couplers = []
    for r in range(m):
        for c in range(m):
            for k0 in range(4):
                for k1 in range(4):
                    couplers.append(
                        (chimera_qubit(m, r, c, 0, k0), chimera_qubit(m, r, c, 1, k1))
                    )
            if r + 1 < m:
                for k in range(4):
                    couplers.append(
                        (chimera_qubit(m, r, c, 0, k), chimera_qubit(m, r + 1, c, 0, k))
                    )
            if c + 1 < m:
                for k in range(4):
                    couplers.append(
                        (chimera_qubit(m, r, c, 1, k), chimera_qubit(m, r, c + 1, 1, k))
                    )
    return HardwareGraph(frozenset(qubits), frozenset(couplers), tag=f"chimera({m})")


@dataclass
class Embedding:
    """Map from logical variable index to its chain of physical qubits."""

    chains: dict[int, tuple[int, ...]]

    def __post_init__(self):
        self.chains = {
            int(i): tuple(int(q) for q in chain) for i, chain in self.chains.items()
        }

    @property
    def n(self) -> int:
        return len(self.chains)

    def qubit_map(self) -> dict[int, int]:
        """Physical qubit id -> logical index; raises on overlapping chains."""
        owner: dict[int, int] = {}
        for i, chain in self.chains.items():
            for q in chain:
                if q in owner:
                    raise EmbeddingError(f"qubit {q} appears in chains {owner[q]} and {i}")
                owner[q] = i
        return owner

    def all_qubits(self) -> list[int]:
        return sorted(q for chain in self.chains.values() for q in chain)

    def fingerprint(self) -> str:
        """Stable hex digest of the chain structure, for state-file pairing."""
        canon = json.dumps(
            {str(i): list(self.chains[i]) for i in sorted(self.chains)}, sort_keys=True
        )
        return hashlib.sha256(canon.encode()).hexdigest()


def clique_embedding(n_logical: int, hw: HardwareGraph) -> Embedding:
    """Deterministic complete-graph embedding onto a Chimera graph.

    Each logical variable ``4b + a`` occupies an L-shaped chain: the side-1
    (horizontal) unit-``a`` qubits of row ``b`` up to the diagonal cell, then
    the side-0 (vertical) unit-``a`` qubits of column ``b`` from the diagonal
    down.  Chains have length ``ceil(n/4) + 1`` at most; capacity is ``4m``.
    """
    if not hw.tag.startswith("chimera("):
        raise EmbeddingError("built-in clique embedding requires a chimera hardware graph")
    m = int(hw.tag[len("chimera(") : -1])
    if n_logical < 1:
        raise ValueError("need at least one logical variable")
    if n_logical > 4 * m:
        raise CapacityError(f"{n_logical} logical variables exceed capacity 4*{m}")
    blocks = (n_logical + 3) // 4
    chains: dict[int, tuple[int, ...]] = {}
    for v in range(n_logical):
        b, a = divmod(v, 4)
        horizontal = [chimera_qubit(m, b, c, 1, a) for c in range(b + 1)]
        vertical = [chimera_qubit(m, r, b, 0, a) for r in range(b, blocks)]
        chains[v] = tuple(horizontal + vertical)
    return Embedding(chains)


def validate_embedding(emb: Embedding, logical_edges, hw: HardwareGraph) -> list[str]:
    """Check an embedding; returns human-readable violations (empty = valid).

    ``logical_edges`` is an iterable of logical index pairs that must each be
    covered by at least one hardware coupler between the two chains.
    """
    violations: list[str] = []
    owner: dict[int, int] = {}
    for i in sorted(emb.chains):
        chain = emb.chains[i]
        if not chain:
            violations.append(f"empty chain: logical {i} has no qubits")
            continue
        for q in chain:
            if q not in hw.qubits:
                violations.append(f"unknown qubit: chain {i} uses {q} not in hardware")
            if q in owner and owner[q] != i:
                violations.append(f"overlap: qubit {q} in chains {owner[q]} and {i}")
            owner.setdefault(q, i)
    for i in sorted(emb.chains):
        chain = [q for q in emb.chains[i] if q in hw.qubits]
        if len(chain) != len(emb.chains[i]) or not chain:
            continue  # already reported above
        seen = {chain[0]}
        frontier = deque([chain[0]])
        members = set(chain)
        while frontier:
            q = frontier.popleft()
            for nb in hw.adjacency.get(q, ()):
                if nb in members and nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
        if len(seen) != len(members):
            violations.append(f"disconnected: chain {i} is not connected in hardware")
    for i, j in logical_edges:
        ci = set(emb.chains.get(i, ()))
        cj = set(emb.chains.get(j, ()))
        covered = any(
            hw.has_coupler(a, b) for a in ci for b in cj if a in hw.qubits and b in hw.qubits
        )
        if not covered:
            violations.append(f"uncovered edge: no coupler between chains {i} and {j}")
    return violations


def _split_evenly(total: float, count: int) -> list[float]:
    # Equal shares, with the last share absorbing the rounding residual so
    # the in-order sum reproduces `total` exactly.
    if count == 1:
        return [total]
    share = total / count
    head = [share] * (count - 1)
    acc = 0.0
    for s in head:
        acc += s
    return head + [total - acc]


@dataclass
class EmbeddedIsing:
    """Physical-qubit Ising from uniform spreading, chain couplers kept apart.

    ``base`` is indexed by dense physical variables ``0..P-1``; ``qubits``
    maps dense index -> hardware qubit id.  ``chain_couplers`` carries the
    oriented (low id, high id) same-chain coupler pairs, which hold no bias
    in ``base``: chain-strength methods rewrite them every iteration.
    """

    logical: IsingModel
    base: IsingModel
    embedding: Embedding
    qubits: tuple[int, ...]
    chain_couplers: tuple[tuple[int, int], ...]
    chains_dense: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def hw_pair(self, pair: tuple[int, int]) -> tuple[int, int]:
        return (self.qubits[pair[0]], self.qubits[pair[1]])

    def chain_couplers_of(self, logical_index: int) -> list[tuple[int, int]]:
        members = set(self.chains_dense[logical_index])
        return [p for p in self.chain_couplers if p[0] in members]

    def lift(self, logical_spins) -> list[int]:
        """Intact physical assignment giving every chain its logical value."""
        s = [0] * self.num_qubits
        for i, chain in self.chains_dense.items():
            for q in chain:
                s[q] = int(logical_spins[i])
        return s


def embed_ising(m: IsingModel, emb: Embedding, hw: HardwareGraph) -> EmbeddedIsing:
    """Spread each logical bias equally over its chain's qubits and couplers.

    Every pair (i, j) with a nonzero coupling must be joined by at least one
    hardware coupler between chains i and j; same-chain couplers are listed
    separately and left at zero bias.
    """
    if set(emb.chains) != set(range(m.n)):
        raise EmbeddingError(f"embedding must cover logical variables 0..{m.n - 1}")
    owner = emb.qubit_map()
    for q in owner:
        if q not in hw.qubits:
            raise EmbeddingError(f"chain qubit {q} is not in the hardware graph")

    qubits = tuple(emb.all_qubits())
    dense = {q: k for k, q in enumerate(qubits)}

    chain_pairs: list[tuple[int, int]] = []
    logical_pairs: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for a, b in hw.couplers:
        ia, ib = owner.get(a), owner.get(b)
        if ia is None or ib is None:
            continue
        pair = (dense[a], dense[b]) if dense[a] < dense[b] else (dense[b], dense[a])
        if ia == ib:
            chain_pairs.append(pair)
        else:
            key = (ia, ib) if ia < ib else (ib, ia)
            logical_pairs.setdefault(key, []).append(pair)

    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    for i, v in m.h.items():
        chain = emb.chains[i]
        for q, share in zip(chain, _split_evenly(v, len(chain))):
            h[dense[q]] = share
    for (i, j), v in m.J.items():
        spots = sorted(logical_pairs.get((i, j), []))
        if not spots:
            raise EmbeddingError(f"no hardware coupler joins chains {i} and {j}")
        for pair, share in zip(spots, _split_evenly(v, len(spots))):
            J[pair] = share

    base = IsingModel(n=len(qubits), h=h, J=J, offset=m.offset)
    chains_dense = {
        i: tuple(dense[q] for q in chain) for i, chain in emb.chains.items()
    }
    return EmbeddedIsing(
        logical=m,
        base=base,
        embedding=emb,
        qubits=qubits,
        chain_couplers=tuple(sorted(chain_pairs)),
        chains_dense=chains_dense,
    )


def save_embedding(emb: Embedding, path) -> None:
    payload = {"chains": {str(i): list(emb.chains[i]) for i in sorted(emb.chains)}}
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")


def load_embedding(path, hw: HardwareGraph | None = None, logical_edges=None) -> Embedding:
    """Read an embedding file; validate against hardware when provided."""
    with open(path) as f:
        payload = json.load(f)
    if "chains" not in payload or not isinstance(payload["chains"], dict):
        raise EmbeddingError(f"{path}: expected an object with a 'chains' mapping")
    emb = Embedding({int(i): tuple(ch) for i, ch in payload["chains"].items()})
    if hw is not None:
        violations = validate_embedding(emb, logical_edges or [], hw)
        if violations:
            raise EmbeddingError(f"{path}: " + "; ".join(violations))
    return emb


def save_hardware_graph(hw: HardwareGraph, path) -> None:
    payload = {
        "qubits": sorted(hw.qubits),
        "couplers": sorted([list(c) for c in hw.couplers]),
        "tag": hw.tag,
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")


def load_hardware_graph(path) -> HardwareGraph:
    with open(path) as f:
        payload = json.load(f)
    return HardwareGraph(
        qubits=frozenset(payload["qubits"]),
        couplers=frozenset(tuple(c) for c in payload["couplers"]),
        tag=payload.get("tag", "external"),
    )
