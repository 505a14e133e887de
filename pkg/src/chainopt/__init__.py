"""Chain-strength tooling for minor-embedded Ising problems.

Implements and compares chain-strength assignment strategies — uniform
torque compensation, iterative quadratic penalty, and augmented-Lagrangian
multipliers (per problem and per problem class) — over a deterministic
Chimera clique embedding and an emulated annealer backend.
"""

__version__ = "0.1.0"

from .chains import ChainDiagnostics, diagnose, majority_vote
from .cliques import (
    Graph,
    brute_force_max_clique,
    clique_qubo,
    extract_clique,
    gnp_random_graph,
)
from .ising import (
    IsingModel,
    QuboModel,
    evaluate_ising,
    evaluate_matrix,
    evaluate_qubo,
    ising_to_qubo,
    qubo_to_ising,
)
from .methods import (
    IterationRecord,
    LagrangeState,
    MethodConfig,
    RunResult,
    SetRunResult,
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
from .sampler import (
    AnnealSampler,
    ExactSampler,
    PrecisionModel,
    SampleSet,
    SamplerParams,
    exact_solve,
    normalize_and_perturb,
    sample,
)
from .topology import (
    CapacityError,
    EmbeddedIsing,
    Embedding,
    EmbeddingError,
    HardwareGraph,
    chimera_graph,
    clique_embedding,
    embed_ising,
    load_embedding,
    save_embedding,
    validate_embedding,
)

__all__ = [
    "AnnealSampler",
    "CapacityError",
    "ChainDiagnostics",
    "EmbeddedIsing",
    "Embedding",
    "EmbeddingError",
    "ExactSampler",
    "Graph",
    "HardwareGraph",
    "IsingModel",
    "IterationRecord",
    "LagrangeState",
    "MethodConfig",
    "PrecisionModel",
    "QuboModel",
    "RunResult",
    "SampleSet",
    "SamplerParams",
    "SetRunResult",
    "StateMismatchError",
    "apply_chain_biases",
    "brute_force_max_clique",
    "chimera_graph",
    "clique_embedding",
    "clique_qubo",
    "diagnose",
    "embed_ising",
    "evaluate_ising",
    "evaluate_matrix",
    "evaluate_qubo",
    "exact_solve",
    "extract_clique",
    "gnp_random_graph",
    "ising_to_qubo",
    "load_embedding",
    "load_state",
    "majority_vote",
    "normalize_and_perturb",
    "qubo_to_ising",
    "run_alm",
    "run_alm_set",
    "run_penalty",
    "run_stored",
    "run_stored_plus",
    "run_utc",
    "sample",
    "save_embedding",
    "save_state",
    "utc_chain_strength",
    "validate_embedding",
]
