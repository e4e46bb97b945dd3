"""Command-line front end: ``run``, ``plan``, ``profile`` and ``gen``.

Exit codes: 0 success, 2 configuration or parse error, 3 capacity error.
``TQSIM_MEM_BUDGET`` (bytes, optional K/M/G suffix) overrides the memory budget.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import benchmarks
from .circuit import Circuit, CircuitError, Partition, even_boundaries
from .metrics import normalized_fidelity, qubit_error_frequency, DegenerateReferenceError
from .noise import NoiseModel, NoiseModelError, load_noise_model
from .partition import (
    CopyCostProfile,
    ResourceLimits,
    plan_partition,
    profile_copy_cost,
)
from .qasm import QasmError, parse_qasm, to_qasm
from .scheduler import TreeStructure, estimate_speedup, execute_baseline, execute_tree
from .statevector import DEFAULT_BUDGET_BYTES, CapacityError, MemoryBudget, ideal_distribution

DEFAULT_SHOTS = 32000
DEFAULT_COPY_COST = 10.0
IDEAL_AUTO_MAX_QUBITS = 20
ENV_BUDGET = "TQSIM_MEM_BUDGET"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    circuit_path: str
    noise_path: str | None = None
    shots: int = DEFAULT_SHOTS
    mode: str = "tree"
    seed: int = 0
    arities: tuple[int, ...] | None = None
    boundaries: tuple[int, ...] | None = None
    first_shots: int | None = None
    copy_cost: str = str(DEFAULT_COPY_COST)
    memory_budget: int = DEFAULT_BUDGET_BYTES
    threads: int = 1
    ideal_path: str | None = None
    output: str | None = None

    def validate(self) -> None:
        if self.shots < 1:
            raise ConfigError("--shots must be >= 1")
        if self.mode not in ("baseline", "tree", "both"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.arities is not None:
            prod = 1
            for a in self.arities:
                if a < 1:
                    raise ConfigError("arities must be positive")
                prod *= a
            if prod < self.shots:
                raise ConfigError(f"arities multiply to {prod} < shots {self.shots}")
        if self.threads < 1:
            raise ConfigError("--threads must be >= 1")


def _parse_bytes(text: str) -> int:
    text = text.strip().upper().removesuffix("B").removesuffix("I")
    scale = {"K": 1 << 10, "M": 1 << 20, "G": 1 << 30, "T": 1 << 40}
    try:
        if text and text[-1] in scale:
            return int(float(text[:-1]) * scale[text[-1]])
        return int(text)
    except ValueError:
        raise ConfigError(f"bad byte size {text!r}") from None


def _int_list(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def _load_circuit(path: str) -> Circuit:
    return parse_qasm(_read(path))


def _load_noise(path: str | None) -> NoiseModel:
    return load_noise_model(_read(path)) if path else NoiseModel()


def _budget_bytes(cli_value: int | None) -> int:
    if os.environ.get(ENV_BUDGET):
        return _parse_bytes(os.environ[ENV_BUDGET])
    return DEFAULT_BUDGET_BYTES if cli_value is None else cli_value


def _copy_cost(value: str, n_qubits: int) -> CopyCostProfile:
    if value == "auto":
        return profile_copy_cost([n_qubits], reps=10)
    try:
        return CopyCostProfile(float(value))
    except ValueError as exc:
        raise ConfigError(f"bad --copy-cost {value!r}: {exc}") from None


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _ideal(cfg: RunConfig, c: Circuit) -> dict[str, float] | None:
    if cfg.ideal_path:
        try:
            data = json.loads(_read(cfg.ideal_path))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid ideal JSON: {exc}") from None
        if not isinstance(data, dict) or not data:
            raise ConfigError("ideal distribution must be a non-empty object")
        return {str(k): float(v) for k, v in data.items()}
    if c.n_qubits <= IDEAL_AUTO_MAX_QUBITS:
        return ideal_distribution(c)
    return None


def _metrics(counts: dict[str, int], ideal: dict[str, float] | None) -> dict:
    out: dict = {}
    if ideal is None:
        return out
    try:
        out["normalized_fidelity"] = normalized_fidelity(ideal, counts)
    except DegenerateReferenceError:
        pass
    best = max(ideal, key=ideal.get)
    if ideal[best] >= 0.99:
        out["qubit_error_frequency"] = qubit_error_frequency(counts, best)
    return out


def cmd_run(cfg: RunConfig) -> dict:
    """Run baseline and/or tree simulation and return the results document."""
    cfg.validate()
    c = _load_circuit(cfg.circuit_path)
    m = _load_noise(cfg.noise_path)
    budget = MemoryBudget(cfg.memory_budget)
    ideal = _ideal(cfg, c)
    doc: dict = {
        "circuit": {"n_qubits": c.n_qubits, "n_gates": len(c.gates)},
        "mode": cfg.mode,
        "seed": cfg.seed,
    }
    timing: dict = {}
    tree_res = base_res = None

    if cfg.mode in ("tree", "both"):
        if cfg.arities is not None:
            arities = cfg.arities
            if cfg.boundaries is not None:
                bounds = cfg.boundaries
            else:
                bounds = tuple(even_boundaries(len(c.gates), len(arities))) if len(arities) > 1 else ()
            if len(bounds) != len(arities) - 1:
                raise ConfigError(f"{len(arities)} arities need {len(arities) - 1} boundaries")
            predicted = estimate_speedup(arities)
        else:
            plan = plan_partition(
                c, m, cfg.shots, _copy_cost(cfg.copy_cost, c.n_qubits),
                ResourceLimits(cfg.memory_budget), cfg.first_shots,
            )
            arities, bounds, predicted = plan.arities, plan.partition.boundaries, plan.predicted_speedup
        t = TreeStructure.from_partition(c, Partition(tuple(bounds)), arities)
        tree_res = execute_tree(t, m, cfg.seed, cfg.threads, budget)
        doc["tree"] = {
            "boundaries": list(bounds),
            "arities": list(arities),
            "nodes_executed": tree_res.nodes_executed,
            "states_copied": tree_res.states_copied,
        }
        doc["counts"] = tree_res.counts
        doc["metrics"] = _metrics(tree_res.counts, ideal)
        doc["predicted_speedup"] = predicted
        timing["tree_s"] = tree_res.wall_time

    if cfg.mode in ("baseline", "both"):
        base_res = execute_baseline(c, m, cfg.shots, cfg.seed, cfg.threads, budget)
        timing["baseline_s"] = base_res.wall_time
        base_metrics = _metrics(base_res.counts, ideal)
        if cfg.mode == "baseline":
            doc["counts"] = base_res.counts
            doc["metrics"] = base_metrics
        else:
            doc["baseline_counts"] = base_res.counts
            doc["metrics"]["baseline"] = base_metrics
            if "normalized_fidelity" in base_metrics and "normalized_fidelity" in doc["metrics"]:
                doc["metrics"]["normalized_fidelity_delta"] = (
                    doc["metrics"]["normalized_fidelity"] - base_metrics["normalized_fidelity"]
                )

    if tree_res is not None and base_res is not None:
        timing["measured_speedup"] = base_res.wall_time / max(tree_res.wall_time, 1e-12)
    doc["timing"] = timing
    return doc


def cmd_plan(circuit: Circuit, noise: NoiseModel, shots: int, limits: ResourceLimits,
             cost: CopyCostProfile, first_shots: int | None = None) -> dict:
    return plan_partition(circuit, noise, shots, cost, limits, first_shots).to_dict()


def cmd_profile(widths: Sequence[int], reps: int, clock=None) -> dict:
    kwargs = {"clock": clock} if clock is not None else {}
    prof = profile_copy_cost(widths, reps, **kwargs)
    return {
        "gates_equivalent": prof.gates_equivalent,
        "per_width": {str(n): r for n, r in prof.per_width},
    }


def cmd_gen(family: str, args: argparse.Namespace) -> str:
    if family == "qft":
        c = benchmarks.gen_qft(args.n, args.prelude)
    elif family == "bv":
        hidden = args.hidden if args.hidden is not None else "1" * args.n
        c = benchmarks.gen_bv(args.n, hidden)
    elif family == "ghz":
        c = benchmarks.gen_ghz(args.n)
    elif family == "qpe":
        c = benchmarks.gen_qpe(args.n, args.phase)
    elif family == "qaoa":
        edges = []
        for piece in (args.edges or "").split(","):
            if piece.strip():
                u, v = piece.split("-")
                edges.append((int(u), int(v)))
        c = benchmarks.gen_qaoa_maxcut(edges, args.beta, args.gamma, args.layers,
                                       n_nodes=args.n)
    else:
        raise ConfigError(f"unknown benchmark family {family!r}")
    return to_qasm(c)


FAMILIES = ("qft", "bv", "ghz", "qpe", "qaoa")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shottree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a QASM circuit")
    run.add_argument("--circuit", required=True)
    run.add_argument("--noise")
    run.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    run.add_argument("--mode", choices=("baseline", "tree", "both"), default="tree")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--arities", help="explicit arity vector, e.g. 16,2,2")
    run.add_argument("--boundaries", help="slice boundaries (gate indices), e.g. 4,6")
    run.add_argument("--first-shots", type=int)
    run.add_argument("--copy-cost", default=str(DEFAULT_COPY_COST),
                     help="state-copy cost in gate times, or 'auto' to profile")
    run.add_argument("--memory-budget", type=_parse_bytes)
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--ideal", help="JSON file with the ideal distribution")
    run.add_argument("--output", "-o")

    plan = sub.add_parser("plan", help="print the partition plan")
    plan.add_argument("--circuit", required=True)
    plan.add_argument("--noise")
    plan.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    plan.add_argument("--first-shots", type=int)
    plan.add_argument("--copy-cost", default=str(DEFAULT_COPY_COST))
    plan.add_argument("--memory-budget", type=_parse_bytes)
    plan.add_argument("--output", "-o")

    prof = sub.add_parser("profile", help="measure state-copy cost in gate times")
    prof.add_argument("--widths", default="12,16,20")
    prof.add_argument("--reps", type=int, default=10)
    prof.add_argument("--output", "-o")

    gen = sub.add_parser("gen", help="emit a benchmark circuit as QASM")
    gen.add_argument("family")
    gen.add_argument("--n", type=int, default=3)
    gen.add_argument("--hidden")
    gen.add_argument("--prelude", action="store_true", help="QFT: leading Hadamard layer")
    gen.add_argument("--phase", type=float, default=1 / 3)
    gen.add_argument("--edges", help="QAOA edges, e.g. 0-1,1-2,0-2")
    gen.add_argument("--beta", type=float, default=0.5)
    gen.add_argument("--gamma", type=float, default=0.5)
    gen.add_argument("--layers", type=int, default=1)
    gen.add_argument("--output", "-o")
    return parser


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command == "run":
            cfg = RunConfig(
                circuit_path=args.circuit,
                noise_path=args.noise,
                shots=args.shots,
                mode=args.mode,
                seed=args.seed,
                arities=_int_list(args.arities),
                boundaries=_int_list(args.boundaries),
                first_shots=args.first_shots,
                copy_cost=args.copy_cost,
                memory_budget=_budget_bytes(args.memory_budget),
                threads=args.threads,
                ideal_path=args.ideal,
                output=args.output,
            )
            _emit(_dump(cmd_run(cfg)), cfg.output)
        elif args.command == "plan":
            c = _load_circuit(args.circuit)
            if args.shots < 1:
                raise ConfigError("--shots must be >= 1")
            doc = cmd_plan(
                c, _load_noise(args.noise), args.shots,
                ResourceLimits(_budget_bytes(args.memory_budget)),
                _copy_cost(args.copy_cost, c.n_qubits), args.first_shots,
            )
            _emit(_dump(doc), args.output)
        elif args.command == "profile":
            if args.reps < 10:
                raise ConfigError("--reps must be >= 10")
            _emit(_dump(cmd_profile(_int_list(args.widths), args.reps)), args.output)
        elif args.command == "gen":
            if args.family not in FAMILIES:
                raise ConfigError(
                    f"unknown benchmark family {args.family!r} (choose from {', '.join(FAMILIES)})"
                )
            _emit(cmd_gen(args.family, args), args.output)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, QasmError, NoiseModelError, CircuitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
