"""Command-line entry point: ``flowcomm {detect,eval,gen,bench,stats}``.

Exit codes: 0 success, 1 usage, 2 input or parse error, 3 empty alpha set,
4 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys
from contextlib import contextmanager
from pathlib import Path

from .alpha import EmptyAlphaSet, detect_alphas
from .bench import BAConfig, PipelineConfig, PlantedPartitionConfig, generate_ba, generate_planted, time_scaling, write_timings
from .graph import EmptyGraphError, GraphFormatError, InvalidWeightError, largest_component, load_edge_list, write_edge_list
from .metrics import (
    Clustering,
    NoPairsError,
    SamplingConfig,
    biased_sample_pair_rates,
    conductance_profile,
    load_ground_truth,
    sample_pair_rates,
    write_ground_truth,
)
from .propagate import PropagationConfig, propagate_labels, write_event_log

log = logging.getLogger("flowcomm")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NO_ALPHAS, EXIT_INTERNAL = 0, 1, 2, 3, 4


class InputError(Exception):
    """Bad or inconsistent input files."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- file formats ------------------------------------------------------------


def write_assignments(labels, fh, vertices=None) -> None:
    """``vertex<TAB>label`` lines in ascending vertex order.

    If ``vertices`` is given, unlabeled members are written with label ``-``.
    """
    keys = sorted(labels if vertices is None else vertices)
    for v in keys:
        lab = labels.get(v)
        fh.write(f"{v}\t{'-' if lab is None else lab}\n")


def read_assignments(path) -> tuple[dict[int, int], set[int]]:
    """Return ``(labels, unlabeled)`` from an assignment file."""
    labels: dict[int, int] = {}
    unlabeled: set[int] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if len(fields) != 2:
                raise InputError(f"{path}:{lineno}: expected 'vertex<TAB>label'")
            try:
                v = int(fields[0])
                if fields[1] == "-":
                    unlabeled.add(v)
                else:
                    labels[v] = int(fields[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: ids must be integers") from None
    return labels, unlabeled


@contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _resolve_seed(seed):
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed={seed}", file=sys.stderr)
    return seed


def _load(args):
    return load_edge_list(
        args.input,
        directed=not args.undirected,
        weighted=not args.unweighted,
        weight_normalization=args.weight_normalization,
    )


# -- commands ----------------------------------------------------------------


def cmd_detect(args) -> int:
    seed = _resolve_seed(args.seed)
    g = _load(args)
    alphas = detect_alphas(g, args.k)
    cfg = PropagationConfig(
        beta=args.beta, lam=args.lam, seed=seed, max_iterations=args.max_iterations, workers=args.workers
    )
    result = propagate_labels(g, alphas, cfg, record_events=args.event_log is not None)
    with _open_out(args.output) as fh:
        write_assignments(result.labels, fh, g.vertices if args.emit_unlabeled else None)
    if args.event_log is not None:
        write_event_log(result.events, args.event_log)
    print(
        f"vertices={len(g.vertices)}\tedges={g.edge_count}\talphas={len(alphas)}\t"
        f"labeled={len(result.labels)}\titerations={result.iterations_run}\t"
        f"terminated_by={result.terminated_by.value}",
        file=sys.stderr,
    )
    return EXIT_OK


def _emit(obj, prefix, name, fmt):
    if prefix is None:
        sys.stdout.write(obj.to_tsv())
        return
    if fmt in ("tsv", "both"):
        Path(f"{prefix}.{name}.tsv").write_text(obj.to_tsv(), encoding="utf-8")
    if fmt in ("json", "both"):
        Path(f"{prefix}.{name}.json").write_text(json.dumps(obj.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_eval(args) -> int:
    g = _load(args)
    labels, unlabeled = read_assignments(args.assignments)
    stray = (set(labels) | unlabeled) - g.vertices
    if stray:
        raise InputError(f"assignment file names vertices not in the graph: {sorted(stray)[:10]}")
    clustering = Clustering.from_labels(labels, g.vertices)
    profile = conductance_profile(g, clustering, symmetric=args.sym)
    _emit(profile, args.out_prefix, "profile", args.format)

    if args.truth is None:
        return EXIT_OK
    truth = load_ground_truth(args.truth)
    if not set(truth.memberships) & g.vertices:
        raise InputError("ground truth shares no vertices with the graph")
    cfg = SamplingConfig(
        batch=args.batch, epsilon=args.epsilon, window=args.window,
        max_samples=args.max_samples, seed=_resolve_seed(args.seed),
    )
    if args.bias_top is None:
        report = sample_pair_rates(clustering, truth, cfg)
    else:
        report = biased_sample_pair_rates(clustering, truth, args.bias_top, cfg)
    _emit(report, args.out_prefix, "report", args.format)
    print(
        f"fp_rate={report.fp_rate:.6f}\tfn_rate={report.fn_rate:.6f}\t"
        f"samples={report.samples_drawn}\tconverged={int(report.converged)}\tskipped={report.skipped}",
        file=sys.stderr,
    )
    return EXIT_OK


def _parse_planted(text: str) -> tuple[int, int]:
    try:
        c, s = text.lower().split("x")
        return int(c), int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected COMMUNITIESxSIZE, got {text!r}") from None


def _parse_ba(values) -> tuple[int, int]:
    out = {}
    for key, raw in zip(("n", "m"), values):
        name, _, val = raw.partition("=")
        if val:
            key = name
        else:
            val = name
        out[key] = int(float(val))
    return out["n"], out["m"]


def cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.planted is not None:
        communities, size = args.planted
        cfg = PlantedPartitionConfig(
            communities, size, args.p_in, args.p_out, args.weight_in, args.weight_out, seed
        )
        g, truth = generate_planted(cfg)
        if args.truth_out is not None:
            write_ground_truth(truth, args.truth_out)
    else:
        n, m = _parse_ba(args.ba)
        g = generate_ba(BAConfig(n, m, seed))
    with _open_out(args.output) as fh:
        write_edge_list(g, fh)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [int(float(s)) for s in args.sizes.split(",") if s.strip()]
    pipeline = PipelineConfig(k_percent=args.k, seed=_resolve_seed(args.seed), m=args.m, repeats=args.repeats)
    rows = time_scaling(sizes, pipeline)
    with _open_out(args.output) as fh:
        write_timings(rows, fh)
    return EXIT_OK


def cmd_stats(args) -> int:
    g = _load(args)
    degrees = [g.out_degree(u) for u in g.vertices]
    giant = largest_component(g)
    rows = [
        ("vertices", len(g.vertices)),
        ("edges", g.edge_count),
        ("sources", len(g.adjacency)),
        ("stored_entries", g.stored_entries()),
        ("max_out_degree", max(degrees)),
        ("mean_out_degree", f"{g.edge_count / len(g.vertices):.6f}"),
        ("largest_weak_component", len(giant)),
    ]
    for key, val in rows:
        print(f"{key}\t{val}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _graph_args(p):
    p.add_argument("input", type=Path, help="edge-list file")
    p.add_argument("--undirected", action="store_true", help="store every edge in both directions")
    p.add_argument("--unweighted", action="store_true", help="ignore the weight column")
    p.add_argument("--weight-normalization", choices=["scale-min", "reject"], default="scale-min")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flowcomm", description="Community detection by simulated information flow.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="detect communities and write vertex/label assignments")
    _graph_args(p)
    p.add_argument("--k", type=float, required=True, help="percentage of vertices ranked for alphas")
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--lambda", dest="lam", type=int, default=3, help="idle iterations before stopping")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--emit-unlabeled", action="store_true", help="write unlabeled vertices with label '-'")
    p.add_argument("--event-log", type=Path, help="tab-separated log of every propagation")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="conductance profile and pair error rates of an assignment")
    _graph_args(p)
    p.add_argument("--assignments", type=Path, required=True)
    p.add_argument("--truth", type=Path, help="ground-truth communities, one per line")
    p.add_argument("--out-prefix", help="write PREFIX.profile.* and PREFIX.report.* instead of stdout")
    p.add_argument("--format", choices=["tsv", "json", "both"], default="both")
    p.add_argument("--sym", action="store_true", help="conductance on the symmetrized graph")
    p.add_argument("--batch", type=int, default=10_000)
    p.add_argument("--epsilon", type=float, default=0.005)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--max-samples", type=int, default=1_000_000)
    p.add_argument("--bias-top", type=float, help="bias positive pairs to this fraction of largest clusters")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="generate a synthetic graph")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--planted", type=_parse_planted, metavar="CxS", help="C communities of S vertices")
    kind.add_argument("--ba", nargs=2, metavar=("n=N", "m=M"), help="Barabási-Albert graph")
    p.add_argument("--p-in", type=float, default=0.3)
    p.add_argument("--p-out", type=float, default=0.01)
    p.add_argument("--weight-in", type=float, default=1.0)
    p.add_argument("--weight-out", type=float, default=1.0)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--truth-out", type=Path, help="planted communities file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time ingestion plus detection on BA graphs")
    p.add_argument("--sizes", required=True, help="comma-separated edge counts, e.g. 1e5,2e5,4e5")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="summary statistics of an edge list")
    _graph_args(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, parse errors exit with EXIT_USAGE
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except EmptyAlphaSet as exc:
        print(f"flowcomm: {exc}", file=sys.stderr)
        return EXIT_NO_ALPHAS
    except (EmptyGraphError, GraphFormatError, InvalidWeightError, InputError, NoPairsError, OSError) as exc:
        print(f"flowcomm: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"flowcomm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
