"""CLI entry point for hyperweave."""

import argparse
import logging
import os
import sys
from typing import Any, Callable, Optional, Sequence

from hyperweave.agents import Backends
from hyperweave.chat import BackendConfig, RemoteBackend, Transcript
from hyperweave.config import BACKENDS, GenerationConfig, load_config
from hyperweave.engine import construct, evolve, write_counters
from hyperweave.errors import (ConfigError, ConstructionAborted, HyperweaveError,
                               InsufficientDataError)
from hyperweave.hgt import read_hgt, write_hgt
from hyperweave.hypergraph import TemporalHypergraph
from hyperweave.microdynamics import (MicroParams, RankedPopulation, SizeSampler,
                                      simulate, verify_zipf_mandelbrot, write_trace_sidecar)
from hyperweave.oracle import OracleBackend
from hyperweave.plots import LOGLOG, PlotSpec, emit_plot, write_report_plots
from hyperweave.profiles import load_profiles, synthesize_profiles
from hyperweave.report import PatternReport, pattern_report, write_report_csvs, write_summary
from hyperweave.sweep import (DEFAULT_ATTACH_PROBABILITIES, DEFAULT_SUGGESTION_COUNTS,
                              failed_cells, parse_grid, run_sweep, simulated_reference,
                              write_sweep)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

_OVERRIDES = {
    "seed": "seed",
    "backend": "backend",
    "base_url": "base_url",
    "model": "model",
    "nodes": "num_nodes",
    "edges": "target_edges",
    "attach_probability": "attach_probability",
    "suggestions": "optimizer_suggestion_count",
    "steps": "evolution_steps",
    "attempts": "generation_attempts_per_step",
    "alpha": "alpha",
    "exponent_gamma": "exponent_gamma",
    "q_threshold": "q_threshold",
}


class UsageError(Exception):
    """Command line that cannot be acted on, such as an unknown flag or missing input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: error: {message}")


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="Input file (HGT hypergraph or profiles CSV)")
    parser.add_argument("--output", default="hyperweave-out", help="Output directory")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--config", help="Path to a JSON or key=value config file")
    parser.add_argument("--backend", choices=BACKENDS, help="Agent backend")
    parser.add_argument("--base-url", help="Chat-completions endpoint root")
    parser.add_argument("--model", help="Model name for the remote backend")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log debug detail")
    verbosity.add_argument("--quiet", action="store_true", help="Log warnings only")


def _add_generation(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nodes", type=int, help="Entities to synthesize without --input")
    parser.add_argument("--edges", type=int, help="Construction attempts")
    parser.add_argument("--attach-probability", type=float, help="Preferential selection probability")
    parser.add_argument("--suggestions", type=int, help="Focus entities per directive")
    parser.add_argument("--steps", type=int, help="Evolution steps")
    parser.add_argument("--attempts", type=int, help="Generation attempts per step")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hyperweave",
        description="Generate, simulate and measure temporal hypergraphs",
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    gen_p = sub.add_parser("generate", help="Construct and evolve a hypergraph with agents")
    _add_shared(gen_p)
    _add_generation(gen_p)
    gen_p.add_argument("--reference", help="HGT hypergraph to score the result against")

    sim_p = sub.add_parser("simulate", help="Run the rank-attachment model and check its degree law")
    _add_shared(sim_p)
    sim_p.add_argument("--nodes", type=int, help="Population size")
    sim_p.add_argument("--edges", type=int, help="Hyperedges to simulate")
    sim_p.add_argument("--alpha", type=float, help="Collaborative inertia")
    sim_p.add_argument("--exponent-gamma", type=float, help="Attachment exponent")
    sim_p.add_argument("--q-threshold", type=float, help="Quality filter threshold")
    sim_p.add_argument("--size", type=int, help="Fixed hyperedge size")

    measure_p = sub.add_parser("measure", help="Report the eight patterns of one hypergraph")
    _add_shared(measure_p)

    compare_p = sub.add_parser("compare", help="Score a generated hypergraph against --input")
    _add_shared(compare_p)
    compare_p.add_argument("--generated", required=True, help="HGT hypergraph to score")

    sweep_p = sub.add_parser("sweep", help="Fit scores over attach probability x suggestions")
    _add_shared(sweep_p)
    _add_generation(sweep_p)
    sweep_p.add_argument("--p-values", help="Comma-separated attach probabilities")
    sweep_p.add_argument("--k-values", help="Comma-separated suggestion counts")
    sweep_p.add_argument("--workers", type=int, default=1, help="Worker processes")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("hyperweave").setLevel(level)


def _resolve_config(args: argparse.Namespace) -> GenerationConfig:
    base = GenerationConfig()
    if args.config:
        if not os.path.isfile(args.config):
            raise UsageError(f"config file not found: {args.config}")
        base = load_config(args.config)
    overrides = {
        field: getattr(args, flag)
        for flag, field in _OVERRIDES.items()
        if getattr(args, flag, None) is not None
    }
    return base.with_overrides(**overrides).validate()


def _require_file(path: Optional[str], flag: str) -> str:
    if not path:
        raise UsageError(f"{flag} is required")
    if not os.path.isfile(path):
        raise UsageError(f"{flag}: file not found: {path}")
    return path


def _wrote(path: str) -> None:
    print(f"Wrote: {path}")


def _write_report(report: PatternReport, output: str, extra: dict[str, Any]) -> None:
    for path in write_report_csvs(report, os.path.join(output, "report")):
        _wrote(path)
    for path in write_report_plots(report, os.path.join(output, "plots")):
        _wrote(path)
    summary = os.path.join(output, "summary.txt")
    write_summary(report, summary, extra)
    _wrote(summary)
    if report.average_gamma is not None:
        print(f"Average gamma: {report.average_gamma:.4f}")


def _cmd_generate(args: argparse.Namespace, config: GenerationConfig) -> int:
    reference: Optional[TemporalHypergraph] = None
    if args.reference:
        reference = read_hgt(_require_file(args.reference, "--reference"))
    if args.input:
        profiles = load_profiles(_require_file(args.input, "--input"))
    else:
        profiles = synthesize_profiles(config.num_nodes, config.seed)

    os.makedirs(args.output, exist_ok=True)
    if config.backend == "remote":
        remote = BackendConfig.from_config(config)
        remote.resolve_api_key()
        transcript = Transcript(os.path.join(args.output, "transcript.jsonl"))
        backend = RemoteBackend(remote, seed=config.seed, transcript=transcript)
    else:
        population = RankedPopulation.by_node_order([p.id for p in profiles])
        backend = OracleBackend(population, config.micro_params(), config.seed,
                                config.oracle_settings())

    try:
        initial = construct(profiles, config, backend)
    except ConstructionAborted as exc:
        partial = os.path.join(args.output, "partial.hgt")
        write_hgt(exc.partial, partial)
        _wrote(partial)
        raise
    state, report = evolve(initial, profiles, config, Backends.single(backend))
    if reference is not None:
        report = pattern_report(reference, state.hypergraph, config)

    graph_path = os.path.join(args.output, "generated.hgt")
    write_hgt(state.hypergraph, graph_path)
    _wrote(graph_path)
    counters = os.path.join(args.output, "counters.csv")
    write_counters(state, counters)
    _wrote(counters)
    _write_report(report, args.output, {
        "command": "generate",
        "backend": config.backend,
        "seed": config.seed,
        "nodes": state.hypergraph.n,
        "edges": state.hypergraph.m,
    })
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace, config: GenerationConfig) -> int:
    if args.size is not None and args.size < 2:
        raise UsageError(f"--size must be at least 2, got {args.size}")
    sampler = SizeSampler.fixed(args.size) if args.size is not None else config.size_sampler()
    params = MicroParams(
        alpha=config.alpha,
        exponent_gamma=config.exponent_gamma,
        q_threshold=config.q_threshold,
        size_sampler=sampler,
    )
    population = RankedPopulation.by_node_order(range(config.num_nodes))
    trace = simulate(population, params, config.target_edges, config.seed)

    os.makedirs(os.path.join(args.output, "report"), exist_ok=True)
    graph_path = os.path.join(args.output, "simulated.hgt")
    write_hgt(trace.hypergraph, graph_path)
    _wrote(graph_path)
    sidecar = os.path.join(args.output, "report", "rank_degree.csv")
    write_trace_sidecar(trace, sidecar)
    _wrote(sidecar)

    lines = [
        "command=simulate",
        f"seed={config.seed}",
        f"nodes={config.num_nodes}",
        f"edges={trace.hypergraph.m}",
        f"alpha={params.alpha:.10g}",
        f"exponent_gamma={params.exponent_gamma:.10g}",
    ]
    try:
        check = verify_zipf_mandelbrot(trace, params)
    except InsufficientDataError as exc:
        logger.warning("Degree law not verified: %s", exc)
        lines.append(f"zipf.status=insufficient data: {exc}")
        check = None
    if check is not None:
        lines += [
            "zipf.status=ok",
            f"zipf.selections={check.selections}",
            f"zipf.max_relative_deviation={check.max_relative_deviation:.10g}",
            f"zipf.mean_relative_deviation={check.mean_relative_deviation:.10g}",
            f"zipf.normalizer={check.normalizer:.10g}",
        ]
        if check.normalizer_approximation is not None:
            lines.append(f"zipf.normalizer_approximation={check.normalizer_approximation:.10g}")
        if check.fit is not None:
            lines += [f"zipf.slope={check.fit.slope:.10g}", f"zipf.r2={check.fit.r_squared:.10g}"]
            print(f"Zipf slope: {check.fit.slope:.4f} (expected {-params.exponent_gamma:.4f})")
            points = tuple(
                (float(rank + params.alpha), float(trace.collaborator_counts[v]))
                for v, rank in zip(population.node_ids, population.ranks)
                if trace.collaborator_counts[v] > 0
            )
            plot = os.path.join(args.output, "plots", "rank_degree.svg")
            os.makedirs(os.path.dirname(plot), exist_ok=True)
            emit_plot(PlotSpec(LOGLOG, "collaborator count by rank", "rank + alpha",
                               "collaborator count", points,
                               (check.fit.slope, check.fit.intercept)), plot)
            _wrote(plot)

    summary = os.path.join(args.output, "summary.txt")
    with open(summary, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    _wrote(summary)
    return EXIT_OK


def _cmd_measure(args: argparse.Namespace, config: GenerationConfig) -> int:
    graph = read_hgt(_require_file(args.input, "--input"))
    report = pattern_report(None, graph, config)
    os.makedirs(args.output, exist_ok=True)
    _write_report(report, args.output, {"command": "measure", "nodes": graph.n, "edges": graph.m})
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace, config: GenerationConfig) -> int:
    real = read_hgt(_require_file(args.input, "--input"))
    generated = read_hgt(_require_file(args.generated, "--generated"))
    report = pattern_report(real, generated, config)
    os.makedirs(args.output, exist_ok=True)
    _write_report(report, args.output, {"command": "compare"})
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace, config: GenerationConfig) -> int:
    if config.backend != "oracle":
        raise UsageError("sweep runs with the oracle backend only")
    try:
        attach = parse_grid(args.p_values, float, DEFAULT_ATTACH_PROBABILITIES)
        counts = parse_grid(args.k_values, int, DEFAULT_SUGGESTION_COUNTS)
    except ValueError as exc:
        raise UsageError(f"invalid grid value: {exc}") from exc
    if args.input:
        reference = read_hgt(_require_file(args.input, "--input"))
    else:
        reference = simulated_reference(config)
    profiles = synthesize_profiles(config.num_nodes, config.seed)

    frame = run_sweep(reference, profiles, config, attach, counts, workers=max(1, args.workers))
    os.makedirs(args.output, exist_ok=True)
    path = os.path.join(args.output, "sweep.csv")
    write_sweep(frame, path)
    _wrote(path)
    failures = failed_cells(frame)
    if failures:
        print(f"{failures} of {len(frame)} cells failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


_COMMANDS: dict[str, Callable[[argparse.Namespace, GenerationConfig], int]] = {
    "generate": _cmd_generate,
    "simulate": _cmd_simulate,
    "measure": _cmd_measure,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
}


def run_command(argv: Sequence[str]) -> int:
    """
    Run one command line.

    Args:
        argv: Arguments without the program name.

    Returns:
        0 on success, 1 on a usage error, 2 on a runtime error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    _configure_logging(args)
    try:
        config = _resolve_config(args)
        return _COMMANDS[args.command](args, config)
    except (UsageError, ConfigError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HyperweaveError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    """Parse arguments and dispatch to the command."""
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
