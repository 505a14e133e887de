"""Ising and QUBO model containers, energy evaluation, and conversions.

Models are sparse: ``h`` and ``J`` (or ``Q``) only store nonzero
coefficients, and pair keys are canonicalized as ``(min, max)``.
Instances are treated as immutable after construction and are safe to
share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "IsingModel",
    "QuboModel",
    "as_spins",
    "evaluate_ising",
    "evaluate_matrix",
    "evaluate_qubo",
    "ising_to_qubo",
    "qubo_to_ising",
]


def _canonical_pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"self-loop ({i}, {j}) is not a valid quadratic term")
    return (i, j) if i < j else (j, i)


@dataclass
class IsingModel:
    """Spin model ``offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j``, s_i in {-1,+1}."""

    n: int
    h: dict[int, float] = field(default_factory=dict)
    J: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("variable count must be nonnegative")
        h: dict[int, float] = {}
        for i, v in self.h.items():
            if not 0 <= i < self.n:
                raise ValueError(f"linear bias index {i} outside [0, {self.n})")
            if v != 0.0:
                h[int(i)] = float(v)
        J: dict[tuple[int, int], float] = {}
        for (i, j), v in self.J.items():
            pair = _canonical_pair(int(i), int(j))
            if not (0 <= pair[0] < self.n and 0 <= pair[1] < self.n):
                raise ValueError(f"quadratic bias pair {pair} outside [0, {self.n})")
            if pair in J:
                raise ValueError(f"duplicate quadratic bias for pair {pair}")
            if v != 0.0:
                J[pair] = float(v)
        self.h = h
        self.J = J
        self.offset = float(self.offset)

    def degrees(self) -> np.ndarray:
        """Vertex degrees of the Ising graph (edges where J is nonzero)."""
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.J:
            deg[i] += 1
            deg[j] += 1
        return deg

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Dense linear vector plus COO-style coupler arrays (rows, cols, values)."""
        h = np.zeros(self.n)
        for i, v in self.h.items():
            h[i] = v
        pairs = sorted(self.J)
        rows = np.array([p[0] for p in pairs], dtype=np.int64)
        cols = np.array([p[1] for p in pairs], dtype=np.int64)
        vals = np.array([self.J[p] for p in pairs], dtype=np.float64)
        return h, rows, cols, vals

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "h": {str(i): self.h[i] for i in sorted(self.h)},
            "J": {f"{i},{j}": self.J[(i, j)] for i, j in sorted(self.J)},
            "offset": self.offset,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IsingModel":
        h = {int(k): float(v) for k, v in d.get("h", {}).items()}
        J = {}
        for k, v in d.get("J", {}).items():
            i, j = k.split(",")
            J[(int(i), int(j))] = float(v)
        return cls(n=int(d["n"]), h=h, J=J, offset=float(d.get("offset", 0.0)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "IsingModel":
        return cls.from_dict(json.loads(s))


@dataclass
class QuboModel:
    """Binary model ``offset + sum_{i<=j} Q_ij x_i x_j``, x_i in {0,1}.

    Diagonal entries are linear coefficients (x_i^2 == x_i).
    """

    n: int
    Q: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("variable count must be nonnegative")
        Q: dict[tuple[int, int], float] = {}
        for (i, j), v in self.Q.items():
            i, j = int(i), int(j)
            pair = (i, j) if i <= j else (j, i)
            if not (0 <= pair[0] < self.n and 0 <= pair[1] < self.n):
                raise ValueError(f"coefficient pair {pair} outside [0, {self.n})")
            if pair in Q:
                raise ValueError(f"duplicate coefficient for pair {pair}")
            if v != 0.0:
                Q[pair] = float(v)
        self.Q = Q
        self.offset = float(self.offset)


def as_spins(values, n: int | None = None) -> np.ndarray:
    """Validate and return a spin vector with entries exactly -1 or +1."""
    s = np.asarray(values, dtype=np.int8)
    if s.ndim != 1:
        raise ValueError("spin vector must be one-dimensional")
    if n is not None and s.shape[0] != n:
        raise ValueError(f"expected {n} spins, got {s.shape[0]}")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spin entries must be -1 or +1")
    return s


def evaluate_ising(model: IsingModel, spins) -> float:
    """Energy of a spin assignment under the model."""
    s = as_spins(spins, model.n)
    energy = model.offset
    for i, v in model.h.items():
        energy += v * s[i]
    for (i, j), v in model.J.items():
        energy += v * s[i] * s[j]
    return float(energy)


def evaluate_matrix(model: IsingModel, spins: np.ndarray) -> np.ndarray:
    """Energies for a (num_samples, n) matrix of spin assignments."""
    S = np.asarray(spins, dtype=np.float64)
    if S.ndim != 2 or S.shape[1] != model.n:
        raise ValueError(f"expected shape (*, {model.n})")
    h, rows, cols, vals = model.to_arrays()
    energies = S @ h + model.offset
    if len(vals):
        energies += (S[:, rows] * S[:, cols]) @ vals
    return energies


def evaluate_qubo(model: QuboModel, x) -> float:
    """Energy of a binary assignment under the QUBO."""
    xv = np.asarray(x)
    if xv.shape != (model.n,):
        raise ValueError(f"expected {model.n} binary values")
    if not np.all((xv == 0) | (xv == 1)):
        raise ValueError("entries must be 0 or 1")
    energy = model.offset
    for (i, j), v in model.Q.items():
        energy += v * xv[i] * xv[j]  # i == j gives the linear term
    return float(energy)


def qubo_to_ising(q: QuboModel) -> IsingModel:
    """Convert a QUBO to the equivalent Ising model via ``x = (s + 1) / 2``.

    Energies agree for every assignment under the bijection; the constant
    part is absorbed into the offset.
    """
    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    offset = q.offset
    for (i, j), v in q.Q.items():
        if i == j:
            # v * x_i = v/2 * s_i + v/2
            h[i] = h.get(i, 0.0) + v / 2.0
            offset += v / 2.0
        else:
            # v * x_i x_j = v/4 * (s_i s_j + s_i + s_j + 1)
            J[(i, j)] = J.get((i, j), 0.0) + v / 4.0
            h[i] = h.get(i, 0.0) + v / 4.0
            h[j] = h.get(j, 0.0) + v / 4.0
            offset += v / 4.0
    return IsingModel(n=q.n, h=h, J=J, offset=offset)


def ising_to_qubo(m: IsingModel) -> QuboModel:
    """Inverse of :func:`qubo_to_ising`, via ``s = 2x - 1``."""
    Q: dict[tuple[int, int], float] = {}
    offset = m.offset
    for i, v in m.h.items():
        # v * s_i = 2v * x_i - v
        Q[(i, i)] = Q.get((i, i), 0.0) + 2.0 * v
        offset -= v
    for (i, j), v in m.J.items():
        # v * s_i s_j = 4v x_i x_j - 2v x_i - 2v x_j + v
        Q[(i, j)] = Q.get((i, j), 0.0) + 4.0 * v
        Q[(i, i)] = Q.get((i, i), 0.0) - 2.0 * v
        Q[(j, j)] = Q.get((j, j), 0.0) - 2.0 * v
        offset += v
    return QuboModel(n=m.n, Q=Q, offset=offset)
