"""Random graphs, the maximum-clique QUBO, and an exact clique oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ising import QuboModel

__all__ = [
    "Graph",
    "brute_force_max_clique",
    "clique_qubo",
    "extract_clique",
    "gnp_random_graph",
    "load_graph_dimacs",
    "load_graph_json",
    "save_graph_dimacs",
    "save_graph_json",
]

ENUMERATION_LIMIT = 20
BRANCH_AND_BOUND_LIMIT = 40


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        canon = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) out of range for n={self.n}")
            canon.add((a, b) if a < b else (b, a))
        object.__setattr__(self, "edges", frozenset(canon))

    @cached_property
    def _adjacency_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for a, b in self.edges:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return tuple(masks)

    def has_edge(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self.edges

    def complement_edges(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if (i, j) not in self.edges
        ]


def gnp_random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p) with pairs drawn in canonical (i, j), i<j order."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = np.random.default_rng(int(seed))
    draws = rng.random(n * (n - 1) // 2)
    edges = set()
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if draws[k] < p:
                edges.add((i, j))
            k += 1
    return Graph(n=n, edges=frozenset(edges))


def clique_qubo(g: Graph, A: float = 1.0, B: float = 2.0) -> QuboModel:
    """Reward -A per chosen vertex, penalize +B per chosen non-edge pair."""
    if A <= 0:
        raise ValueError("vertex reward A must be positive")
    if B <= A:
        raise ValueError("non-edge penalty B must exceed A")
    Q: dict[tuple[int, int], float] = {(i, i): -A for i in range(g.n)}
    for pair in g.complement_edges():
        Q[pair] = B
    return QuboModel(n=g.n, Q=Q)


def extract_clique(g: Graph, x) -> tuple[frozenset[int], bool, int]:
    """Chosen vertex set, whether it is a clique of g, and its scored size.

    Invalid selections score zero; nothing is repaired or pruned.
    """
    xs = np.asarray(x)
    if xs.shape != (g.n,):
        raise ValueError(f"expected a binary vector of length {g.n}")
    if not np.all((xs == 0) | (xs == 1)):
        raise ValueError("selection vector must be 0/1 valued")
    chosen = frozenset(int(i) for i in np.flatnonzero(xs == 1))
    valid = all(g.has_edge(i, j) for i in chosen for j in chosen if i < j)
    return chosen, valid, len(chosen) if valid else 0


def _max_clique_enumeration(g: Graph) -> int:
    adj = g._adjacency_masks
    best = 0
    for mask in range(1 << g.n):
        if mask.bit_count() <= best:
            continue
        members = mask
        ok = True
        while members:
            v = (members & -members).bit_length() - 1
            members &= members - 1
            if (adj[v] & mask) != (mask & ~(1 << v)):
                ok = False
                break
        if ok:
            best = mask.bit_count()
    return best


def _max_clique_branch_and_bound(g: Graph) -> int:
    adj = g._adjacency_masks
    best = 0

    def expand(size: int, cand: int) -> None:
        nonlocal best
        if size > best:
            best = size
        while cand:
            if size + cand.bit_count() <= best:
                return
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            expand(size + 1, cand & adj[v])

    expand(0, (1 << g.n) - 1)
    return best


def brute_force_max_clique(g: Graph, mode: str = "branch-and-bound") -> int:
    """Exact maximum clique size; a test oracle, never part of the methods."""
    if mode == "enumeration":
        if g.n > ENUMERATION_LIMIT:
            raise ValueError(f"enumeration mode is limited to n <= {ENUMERATION_LIMIT}")
        return _max_clique_enumeration(g)
    if mode == "branch-and-bound":
        if g.n > BRANCH_AND_BOUND_LIMIT:
            raise ValueError(
                f"branch-and-bound mode is limited to n <= {BRANCH_AND_BOUND_LIMIT}"
            )
        return _max_clique_branch_and_bound(g)
    raise ValueError(f"unknown mode {mode!r}")


def save_graph_dimacs(g: Graph, path) -> None:
    with open(path, "w") as f:
        f.write(f"p edge {g.n} {len(g.edges)}\n")
        for i, j in sorted(g.edges):
            f.write(f"e {i + 1} {j + 1}\n")


def load_graph_dimacs(path) -> Graph:
    """DIMACS-like edge list: 'p edge n m' header then 1-indexed 'e i j' lines."""
    n = None
    declared = None
    edges = []
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            parts = line.split()
            if parts[0] == "p":
                if len(parts) != 4 or parts[1] != "edge":
                    raise ValueError(f"{path}:{lineno}: malformed problem line")
                n, declared = int(parts[2]), int(parts[3])
            elif parts[0] == "e":
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: malformed edge line")
                edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
            else:
                raise ValueError(f"{path}:{lineno}: unknown line type {parts[0]!r}")
    if n is None:
        raise ValueError(f"{path}: missing 'p edge' header")
    g = Graph(n=n, edges=frozenset(edges))
    if declared != len(g.edges):
        raise ValueError(f"{path}: header declares {declared} edges, found {len(g.edges)}")
    return g


def save_graph_json(g: Graph, path) -> None:
    payload = {"n": g.n, "edges": [list(e) for e in sorted(g.edges)]}
    with open(path, "w") as f:
        json.dump(payload, f, sort_keys=True)
        f.write("\n")


def load_graph_json(path) -> Graph:
    with open(path) as f:
        payload = json.load(f)
    return Graph(n=int(payload["n"]), edges=frozenset(tuple(e) for e in payload["edges"]))
