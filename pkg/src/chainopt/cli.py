"""Command-line harness: batch benchmark runs at desk scale.

Subcommands:

* ``gen`` — write seeded random-graph instance files plus a manifest.
* ``embed`` — write the deterministic complete-graph embedding for a size.
* ``run`` — execute chain-strength methods over an instance set, emitting
  ``iterations.csv``, ``summary.csv``, ``lambda_hist.csv``, ``chain_trace.csv``.
* ``train-set`` — train shared multipliers across one size and persist them.
* ``report`` — recompute ``summary.csv`` from an existing ``iterations.csv``.

Exit codes: 0 success, 2 configuration error, 3 capacity/embedding error,
4 missing or mismatched artifact.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .cliques import clique_qubo, extract_clique, gnp_random_graph, load_graph_dimacs, save_graph_dimacs
from .ising import qubo_to_ising
from .methods import (
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
)
from .sampler import AnnealSampler, PrecisionModel, SamplerParams
from .seeds import CELL, INSTANCE, derived_seed
from .topology import (
    CapacityError,
    EmbeddingError,
    chimera_graph,
    clique_embedding,
    embed_ising,
    save_embedding,
    validate_embedding,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_MISSING = 4

METHOD_NAMES = ("utc", "penalty", "alm", "stored", "stored-plus")
STORED_METHODS = {"stored", "stored-plus"}


class ConfigError(Exception):
    """Bad flag/config combination; maps to exit code 2."""


class MissingArtifactError(Exception):
    """A required input file does not exist; maps to exit code 4."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a benchmark invocation depends on, echoed into outputs."""

    sizes: tuple[int, ...] = (20, 30, 40)
    count: int = 5
    p: float = 0.5
    methods: tuple[str, ...] = ("utc", "penalty", "alm")
    repeats: int = 1
    num_reads: int = 1000
    sweeps: int = 1000
    beta_min: float = 0.1
    beta_max: float = 10.0
    h_range: float = 4.0
    j_range: float = 1.0
    noise_std: float = 0.01
    noise: bool = True
    mu0: float = 1.5
    rho: float = 1.1
    max_iterations: int = 20
    utc_prefactor: float = 1.414
    unconditional_mu_growth: bool = False
    a: float = 1.0
    b: float = 2.0
    trace_chain: int = 0

    def sampler_params(self, seed: int = 0) -> SamplerParams:
        return SamplerParams(
            num_reads=self.num_reads,
            sweeps=self.sweeps,
            beta_min=self.beta_min,
            beta_max=self.beta_max,
            seed=seed,
        )

    def precision_model(self) -> PrecisionModel:
        return PrecisionModel(
            h_range=self.h_range,
            j_range=self.j_range,
            noise_std=self.noise_std,
            enabled=self.noise,
        )

    def method_config(self) -> MethodConfig:
        return MethodConfig(
            mu0=self.mu0,
            rho=self.rho,
            max_iterations=self.max_iterations,
            utc_prefactor=self.utc_prefactor,
            unconditional_mu_growth=self.unconditional_mu_growth,
        )


def chimera_order_for(n: int) -> int:
    """Smallest chimera order whose clique capacity 4m covers n variables."""
    return (n + 3) // 4


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_name_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


_CONFIG_FLAGS = (
    # (config field, flag, parser kwargs)
    ("sizes", "--sizes", {"type": _parse_int_list, "metavar": "N,N,..."}),
    ("count", "--count", {"type": int}),
    ("p", "--p", {"type": float}),
    ("methods", "--methods", {"type": _parse_name_list, "metavar": "NAME,..."}),
    ("repeats", "--repeats", {"type": int}),
    ("num_reads", "--num-reads", {"type": int}),
    ("sweeps", "--sweeps", {"type": int}),
    ("beta_min", "--beta-min", {"type": float}),
    ("beta_max", "--beta-max", {"type": float}),
    ("h_range", "--h-range", {"type": float}),
    ("j_range", "--j-range", {"type": float}),
    ("noise_std", "--noise-std", {"type": float}),
    ("mu0", "--mu0", {"type": float}),
    ("rho", "--rho", {"type": float}),
    ("max_iterations", "--max-iterations", {"type": int}),
    ("utc_prefactor", "--prefactor", {"type": float}),
    ("a", "--a", {"type": float}),
    ("b", "--b", {"type": float}),
    ("trace_chain", "--trace-chain", {"type": int}),
)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file overriding defaults (flags win)")
    for _field, flag, kwargs in _CONFIG_FLAGS:
        p.add_argument(flag, default=None, **kwargs)
    p.add_argument("--no-noise", action="store_true", default=None, help="disable coefficient noise")
    p.add_argument(
        "--unconditional-mu-growth",
        action="store_true",
        default=None,
        help="grow mu every iteration instead of only while chains break",
    )


def _merge_config(args: argparse.Namespace) -> tuple[ExperimentConfig, set[str]]:
    """Defaults, then the JSON config file, then explicit flags; returns the
    merged config plus the set of explicitly overridden field names."""
    values = {f.name: getattr(ExperimentConfig, f.name) for f in fields(ExperimentConfig)}
    explicit: set[str] = set()
    config_path = getattr(args, "config", None)
    if config_path is not None:
        if not Path(config_path).exists():
            raise MissingArtifactError(f"config file {config_path} not found")
        with open(config_path) as f:
            overrides = json.load(f)
        unknown = set(overrides) - set(values)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, v in overrides.items():
            if key in ("sizes", "methods"):
                v = tuple(v)
            values[key] = v
            explicit.add(key)
    for field_name, _flag, _kwargs in _CONFIG_FLAGS:
        v = getattr(args, field_name, None)
        if v is not None:
            values[field_name] = v
            explicit.add(field_name)
    if getattr(args, "no_noise", None):
        values["noise"] = False
        explicit.add("noise")
    if getattr(args, "unconditional_mu_growth", None):
        values["unconditional_mu_growth"] = True
        explicit.add("unconditional_mu_growth")
    try:
        cfg = ExperimentConfig(**values)
        cfg.sampler_params()
        cfg.precision_model()
        cfg.method_config()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    unknown_methods = set(cfg.methods) - set(METHOD_NAMES)
    if unknown_methods:
        raise ConfigError(f"unknown methods: {sorted(unknown_methods)}; choose from {METHOD_NAMES}")
    if cfg.count < 1 or cfg.repeats < 1:
        raise ConfigError("count and repeats must be at least 1")
    if not 0.0 <= cfg.p <= 1.0:
        raise ConfigError("edge probability must lie in [0, 1]")
    return cfg, explicit


def _meta_lines(cfg: ExperimentConfig, seed, extra: list[str] | None = None) -> list[str]:
    lines = [
        f"chainopt {__version__}",
        f"timestamp: {datetime.now(timezone.utc).isoformat()}",
        f"seed: {seed}",
        f"config: {json.dumps(asdict(cfg), sort_keys=True)}",
    ]
    if extra:
        lines.extend(extra)
    return lines


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, meta: list[str], columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        for line in meta:
            f.write(f"# {line}\n")
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


# ---------------------------------------------------------------- gen


def cmd_gen(args: argparse.Namespace) -> int:
    cfg, _ = _merge_config(args)
    if args.chimera is not None:
        for n in cfg.sizes:
            if n > 4 * args.chimera:
                raise CapacityError(
                    f"size {n} exceeds clique capacity {4 * args.chimera} of chimera({args.chimera})"
                )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    instances = []
    for n in sorted(cfg.sizes):
        for k in range(cfg.count):
            index = args.offset + k
            instances.append(
                {
                    "n": n,
                    "index": index,
                    "seed": derived_seed(args.seed, INSTANCE, n, index),
                    "file": f"graph_n{n}_i{index}.dimacs",
                }
            )
    manifest_path = out / "manifest.json"
    targets = [manifest_path] + [out / inst["file"] for inst in instances]
    existing = [str(t) for t in targets if t.exists()]
    if existing and not args.force:
        raise ConfigError(f"refusing to overwrite {existing[0]} (use --force)")
    for inst in instances:
        g = gnp_random_graph(inst["n"], cfg.p, inst["seed"])
        save_graph_dimacs(g, out / inst["file"])
    manifest = {
        "version": __version__,
        "seed": args.seed,
        "offset": args.offset,
        "count": cfg.count,
        "p": cfg.p,
        "sizes": sorted(cfg.sizes),
        "instances": instances,
    }
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(instances)} instances to {out}")
    return EXIT_OK


# ---------------------------------------------------------------- embed


def cmd_embed(args: argparse.Namespace) -> int:
    m = args.chimera if args.chimera is not None else chimera_order_for(args.n)
    hw = chimera_graph(m)
    emb = clique_embedding(args.n, hw)
    edges = [(i, j) for i in range(args.n) for j in range(i + 1, args.n)]
    violations = validate_embedding(emb, edges, hw)
    if violations:
        raise EmbeddingError("; ".join(violations))
    save_embedding(emb, args.out)
    longest = max(len(chain) for chain in emb.chains.values())
    print(f"embedded K_{args.n} on chimera({m}); max chain length {longest}")
    return EXIT_OK


# ---------------------------------------------------------------- run


def _load_manifest(inst_dir: Path) -> dict:
    manifest_path = inst_dir / "manifest.json"
    if not manifest_path.exists():
        raise MissingArtifactError(f"no manifest.json in {inst_dir}; run `gen` first")
    with open(manifest_path) as f:
        return json.load(f)


def _select_sizes(cfg: ExperimentConfig, explicit: set[str], manifest: dict) -> list[int]:
    available = sorted(manifest["sizes"])
    if "sizes" not in explicit:
        return available
    chosen = sorted(set(cfg.sizes))
    missing = [n for n in chosen if n not in available]
    if missing:
        raise ConfigError(f"sizes {missing} not present in the instance set {available}")
    return chosen


def _problems_for_size(cfg: ExperimentConfig, manifest: dict, inst_dir: Path, n: int):
    """Hardware, embedding, and per-graph embedded problems for one size."""
    hw = chimera_graph(chimera_order_for(n))
    emb = clique_embedding(n, hw)
    problems = []
    for inst in sorted(
        (i for i in manifest["instances"] if i["n"] == n), key=lambda i: i["index"]
    ):
        path = inst_dir / inst["file"]
        if not path.exists():
            raise MissingArtifactError(f"instance file {path} listed in manifest is missing")
        g = load_graph_dimacs(path)
        if g.n != n:
            raise ConfigError(f"{path}: graph has {g.n} vertices, manifest says {n}")
        logical = qubo_to_ising(clique_qubo(g, cfg.a, cfg.b))
        problems.append((inst["index"], g, embed_ising(logical, emb, hw)))
    if not problems:
        raise MissingArtifactError(f"no instances of size {n} in {inst_dir}")
    return hw, emb, problems


def _dispatch(method: str, em, sampler, seed: int, mcfg: MethodConfig, state):
    if method == "utc":
        return run_utc(em, sampler, seed, mcfg)
    if method == "penalty":
        return run_penalty(em, sampler, seed, mcfg)
    if method == "alm":
        return run_alm(em, sampler, seed, mcfg)
    if method == "stored":
        return run_stored(em, state, sampler, seed)
    if method == "stored-plus":
        return run_stored_plus(em, state, sampler, seed, mcfg)
    raise ConfigError(f"unknown method {method!r}")


def _trace_rows(method: str, n: int, graph: int, repeat: int, em, state: LagrangeState, chain: int):
    physical = apply_chain_biases(em, state)
    rows = []
    for dq in sorted(em.chains_dense[chain]):
        rows.append(
            {
                "method": method,
                "n": n,
                "graph": graph,
                "repeat": repeat,
                "kind": "qubit",
                "a": em.qubits[dq],
                "b": "",
                "lam": "",
                "value": float(physical.h.get(dq, 0.0)),
            }
        )
    for pair in sorted(em.chain_couplers_of(chain)):
        a, b = em.hw_pair(pair)
        rows.append(
            {
                "method": method,
                "n": n,
                "graph": graph,
                "repeat": repeat,
                "kind": "coupler",
                "a": a,
                "b": b,
                "lam": float(state.lam[pair]),
                "value": float(physical.J.get(pair, 0.0)),
            }
        )
    return rows


ITERATION_COLUMNS = [
    "method",
    "n",
    "graph",
    "repeat",
    "iteration",
    "mu",
    "broken_count",
    "objective",
    "clique_size",
    "best_clique_so_far",
]

SUMMARY_COLUMNS = [
    "method",
    "n",
    "mean_best_clique",
    "mean_final_mu",
    "mean_mu_at_best",
    "mean_best_iteration",
]


def summarize_iterations(rows: list[dict]) -> list[dict]:
    """Aggregate iteration rows into one summary row per (method, n).

    Per (graph, repeat) cell: the best clique is the maximum scored size over
    iterations, the best iteration is the earliest attaining it, final mu is
    the value used in the last iteration.  mu/iteration statistics average
    over cells; mean_best_clique averages the per-graph maximum over repeats.
    """
    cells: dict[tuple, dict] = {}
    for row in rows:
        key = (row["method"], row["n"], row["graph"], row["repeat"])
        cell = cells.setdefault(key, {"iters": []})
        cell["iters"].append(row)
    summary_input: dict[tuple, dict] = {}
    for (method, n, graph, repeat), cell in cells.items():
        iters = sorted(cell["iters"], key=lambda r: r["iteration"])
        best_clique = max(r["clique_size"] for r in iters)
        best_row = next(r for r in iters if r["clique_size"] == best_clique)
        group = summary_input.setdefault(
            (method, n), {"cells": [], "graph_best": {}}
        )
        group["cells"].append(
            {
                "final_mu": iters[-1]["mu"],
                "mu_at_best": best_row["mu"],
                "best_iteration": best_row["iteration"],
            }
        )
        prev = group["graph_best"].get(graph, 0)
        group["graph_best"][graph] = max(prev, best_clique)
    out = []
    for (method, n) in sorted(summary_input):
        group = summary_input[(method, n)]
        cells_list = group["cells"]
        out.append(
            {
                "method": method,
                "n": n,
                "mean_best_clique": float(np.mean(list(group["graph_best"].values()))),
                "mean_final_mu": float(np.mean([c["final_mu"] for c in cells_list])),
                "mean_mu_at_best": float(np.mean([c["mu_at_best"] for c in cells_list])),
                "mean_best_iteration": float(np.mean([c["best_iteration"] for c in cells_list])),
            }
        )
    return out


def lambda_histogram(final_lams: dict[tuple[str, int], list[float]]) -> list[dict]:
    """Bin multiplier values to the nearest integer per (method, size)."""
    rows = []
    for (method, n) in sorted(final_lams):
        values = final_lams[(method, n)]
        if not values:
            continue
        bins: dict[int, int] = {}
        for v in values:
            b = int(np.rint(v))
            bins[b] = bins.get(b, 0) + 1
        total = len(values)
        for b in sorted(bins):
            rows.append(
                {
                    "method": method,
                    "n": n,
                    "bin": b,
                    "count": bins[b],
                    "density": bins[b] / total,
                }
            )
    return rows


def cmd_run(args: argparse.Namespace) -> int:
    cfg, explicit = _merge_config(args)
    inst_dir = Path(args.instances)
    manifest = _load_manifest(inst_dir)
    sizes = _select_sizes(cfg, explicit, manifest)
    methods = sorted(set(cfg.methods))
    if STORED_METHODS & set(methods):
        if args.state is None:
            raise ConfigError("methods 'stored'/'stored-plus' require --state FILE")
        if len(sizes) != 1:
            raise ConfigError("stored multipliers apply to a single problem size")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sampler = AnnealSampler(cfg.sampler_params(), cfg.precision_model())
    mcfg = cfg.method_config()

    iteration_rows: list[dict] = []
    trace_rows: list[dict] = []
    final_lams: dict[tuple[str, int], list[float]] = {}
    for n in sizes:
        if not 0 <= cfg.trace_chain < n:
            raise ConfigError(f"trace chain {cfg.trace_chain} out of range for size {n}")
        _hw, emb, problems = _problems_for_size(cfg, manifest, inst_dir, n)
        state = None
        if STORED_METHODS & set(methods):
            state_path = Path(args.state)
            if not state_path.exists():
                raise MissingArtifactError(
                    f"state file {state_path} not found; expected embedding "
                    f"fingerprint {emb.fingerprint()}"
                )
            state = load_state(state_path, problems[0][2])
        for method in methods:
            for index, g, em in problems:
                for repeat in range(cfg.repeats):
                    seed = derived_seed(args.seed, CELL, n, index, repeat)
                    result = _dispatch(method, em, sampler, seed, mcfg, state)
                    best_so_far = 0
                    for rec in result.records:
                        x = (rec.logical_spins.astype(np.int64) + 1) // 2
                        _, _valid, size = extract_clique(g, x)
                        best_so_far = max(best_so_far, size)
                        iteration_rows.append(
                            {
                                "method": method,
                                "n": n,
                                "graph": index,
                                "repeat": repeat,
                                "iteration": rec.iteration,
                                "mu": float(rec.mu),
                                "broken_count": rec.broken_count,
                                "objective": float(rec.objective),
                                "clique_size": size,
                                "best_clique_so_far": best_so_far,
                            }
                        )
                    final_lams.setdefault((method, n), []).extend(
                        float(v) for _pair, v in sorted(result.state.lam.items())
                    )
                    trace_rows.extend(
                        _trace_rows(method, n, index, repeat, em, result.state, cfg.trace_chain)
                    )

    meta = _meta_lines(cfg, args.seed, [f"instances: {inst_dir}", f"sizes: {sizes}"])
    _write_csv(out / "iterations.csv", meta, ITERATION_COLUMNS, iteration_rows)
    _write_csv(out / "summary.csv", meta, SUMMARY_COLUMNS, summarize_iterations(iteration_rows))
    _write_csv(
        out / "lambda_hist.csv",
        meta + ["bin rule: nearest integer (numpy rint)"],
        ["method", "n", "bin", "count", "density"],
        lambda_histogram(final_lams),
    )
    _write_csv(
        out / "chain_trace.csv",
        meta + [f"traced chain: logical {cfg.trace_chain}"],
        ["method", "n", "graph", "repeat", "kind", "a", "b", "lam", "value"],
        trace_rows,
    )
    print(f"wrote {len(iteration_rows)} iteration rows to {out}")
    return EXIT_OK


# ---------------------------------------------------------------- train-set


def cmd_train_set(args: argparse.Namespace) -> int:
    cfg, explicit = _merge_config(args)
    inst_dir = Path(args.instances)
    manifest = _load_manifest(inst_dir)
    sizes = _select_sizes(cfg, explicit, manifest)
    if len(sizes) != 1:
        raise ConfigError(
            f"training requires a single size; instance set has {sizes} (narrow with --sizes)"
        )
    n = sizes[0]
    _hw, _emb, problems = _problems_for_size(cfg, manifest, inst_dir, n)
    sampler = AnnealSampler(cfg.sampler_params(), cfg.precision_model())
    result = run_alm_set([em for _i, _g, em in problems], sampler, args.seed, cfg.method_config())
    save_state(result.state, problems[0][2], args.out)
    last = result.records[-1]
    print(
        f"trained on {len(problems)} instances of size {n}: "
        f"{len(result.records)} iterations, final mu {result.state.mu:.4f}, "
        f"last broken counts {list(last.broken_counts)} -> {args.out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------- report


def _read_iterations_csv(path: Path) -> tuple[list[str], list[dict]]:
    if not path.exists():
        raise MissingArtifactError(f"{path} not found")
    meta: list[str] = []
    with open(path) as f:
        data_lines = []
        for line in f:
            if line.startswith("# "):
                meta.append(line[2:].rstrip("\n"))
            else:
                data_lines.append(line)
    reader = csv.DictReader(data_lines)
    rows = []
    for raw in reader:
        rows.append(
            {
                "method": raw["method"],
                "n": int(raw["n"]),
                "graph": int(raw["graph"]),
                "repeat": int(raw["repeat"]),
                "iteration": int(raw["iteration"]),
                "mu": float(raw["mu"]),
                "broken_count": int(raw["broken_count"]),
                "objective": float(raw["objective"]),
                "clique_size": int(raw["clique_size"]),
                "best_clique_so_far": int(raw["best_clique_so_far"]),
            }
        )
    return meta, rows


def cmd_report(args: argparse.Namespace) -> int:
    source = Path(args.runs) / "iterations.csv"
    meta, rows = _read_iterations_csv(source)
    carried = [line for line in meta if not line.startswith("timestamp:")]
    out_meta = (
        [f"chainopt {__version__}", f"timestamp: {datetime.now(timezone.utc).isoformat()}"]
        + carried[1:]
        + [f"regenerated from: {source}"]
    )
    out = Path(args.out) if args.out else Path(args.runs) / "summary.csv"
    _write_csv(out, out_meta, SUMMARY_COLUMNS, summarize_iterations(rows))
    print(f"wrote summary to {out}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainopt",
        description="Benchmark chain-strength assignment methods on embedded Ising problems.",
    )
    parser.add_argument("--version", action="version", version=f"chainopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate seeded random-graph instances")
    p_gen.add_argument("--out", required=True, type=Path)
    p_gen.add_argument("--seed", required=True, type=int)
    p_gen.add_argument("--offset", type=int, default=0, help="first instance index (disjoint sets)")
    p_gen.add_argument("--chimera", type=int, default=None, help="check sizes against this order")
    p_gen.add_argument("--force", action="store_true")
    _add_config_flags(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_embed = sub.add_parser("embed", help="write a complete-graph embedding file")
    p_embed.add_argument("--n", required=True, type=int)
    p_embed.add_argument("--chimera", type=int, default=None)
    p_embed.add_argument("--out", required=True, type=Path)
    p_embed.set_defaults(func=cmd_embed)

    p_run = sub.add_parser("run", help="run methods over an instance set")
    p_run.add_argument("--instances", required=True, type=Path)
    p_run.add_argument("--out", required=True, type=Path)
    p_run.add_argument("--seed", required=True, type=int)
    p_run.add_argument("--state", type=Path, default=None, help="stored multipliers for stored/stored-plus")
    _add_config_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_train = sub.add_parser("train-set", help="train shared multipliers on one size")
    p_train.add_argument("--instances", required=True, type=Path)
    p_train.add_argument("--out", required=True, type=Path)
    p_train.add_argument("--seed", required=True, type=int)
    _add_config_flags(p_train)
    p_train.set_defaults(func=cmd_train_set)

    p_report = sub.add_parser("report", help="recompute summary.csv from iterations.csv")
    p_report.add_argument("--runs", required=True, type=Path)
    p_report.add_argument("--out", type=Path, default=None)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, EmbeddingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except StateMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (MissingArtifactError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
