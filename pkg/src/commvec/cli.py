"""Command-line front end tying the pipeline stages together.

Subcommands mirror the stages (ingest, build-graph, preprocess, detect,
embed, export, query, eval, stats) plus `run`, which executes the whole
pipeline from a flat key=value config file with flag overrides, writes
every intermediate artifact, and stamps the model with a provenance
hash so a single seed reproduces a run byte for byte. The detect stage
derives its RNG seed from the top-level seed by a fixed offset.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Sequence

from .community import (
    LpConfig,
    Partition,
    label_propagation,
    partition_for_graph,
    read_partition_tsv,
    size_distribution,
    write_partition_tsv,
    write_sizes_tsv,
)
from .embedding import (
    EmbeddingModel,
    build_model,
    export_dense,
    read_labels_tsv,
    write_labels_tsv,
)
from .evaluation import (
    eval_categorization,
    eval_similarity,
    load_categorization_dataset,
    load_similarity_dataset,
)
from .graph import CooccurrenceGraph
from .ingest import IngestConfig, ingest_paths, read_edge_tsv, write_edge_tsv
from .preprocess import DEFAULT_ORDER, PreprocessConfig, preprocess_pipeline
from .query import canonical_vector, explain, nearest

__all__ = ["PipelineConfig", "StageError", "run_pipeline", "main"]

log = logging.getLogger(__name__)

LP_SEED_OFFSET = 1
EVAL_SEED_OFFSET = 2


class StageError(RuntimeError):
    """A pipeline stage failed; the stage name tags the diagnostic."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {_errmsg(cause)}")


def _errmsg(exc: BaseException) -> str:
    if isinstance(exc, KeyError) and exc.args:
        return str(exc.args[0])
    return str(exc)


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of a full run, in one place.

    `seed` is the single reproducibility input: stage seeds are derived
    from it by fixed offsets (label propagation uses seed + 1).
    """

    inputs: tuple[str, ...] = ()
    corpus_format: str = "records"
    window: int = 5
    min_year: int = 1980
    lowercase: bool = True
    k: int = 10
    ntop: int = 200
    order: tuple[str, ...] = DEFAULT_ORDER
    seed: int = 0
    max_sweeps: int = 100
    label_count: int = 10
    out_dir: str = "."

    def path(self, name: str) -> Path:
        return Path(self.out_dir) / name

    @property
    def edges_path(self) -> Path:
        return self.path("edges.tsv")

    @property
    def graph_path(self) -> Path:
        return self.path("graph.snapshot")

    @property
    def partition_path(self) -> Path:
        return self.path("partition.tsv")

    @property
    def sizes_path(self) -> Path:
        return self.path("sizes.tsv")

    @property
    def model_path(self) -> Path:
        return self.path("model.txt")

    @property
    def labels_path(self) -> Path:
        return self.path("labels.tsv")

    @property
    def report_path(self) -> Path:
        return self.path("report.json")

    @property
    def stats_path(self) -> Path:
        return self.path("stats.json")


_CONFIG_KEYS = {
    "input",
    "format",
    "window",
    "min_year",
    "lowercase",
    "k",
    "ntop",
    "order",
    "seed",
    "max_sweeps",
    "label_count",
    "out_dir",
}


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"expected true or false, got {raw!r}")


def _parse_order(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def load_config_file(path: str | Path) -> dict[str, str]:
    """Read flat `key=value` lines; blank lines and # comments are skipped."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, sep, value = stripped.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected key=value, got {stripped!r}")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"line {lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def config_from_values(values: dict) -> PipelineConfig:
    """Coerce config-file or flag values onto PipelineConfig fields."""
    config = PipelineConfig()
    if "input" in values:
        config = replace(
            config, inputs=tuple(p.strip() for p in values["input"].split(",") if p.strip())
        )
    if "format" in values:
        config = replace(config, corpus_format=values["format"])
    for key, attr in (
        ("window", "window"),
        ("min_year", "min_year"),
        ("k", "k"),
        ("ntop", "ntop"),
        ("seed", "seed"),
        ("max_sweeps", "max_sweeps"),
        ("label_count", "label_count"),
    ):
        if key in values:
            config = replace(config, **{attr: int(values[key])})
    if "lowercase" in values:
        config = replace(config, lowercase=_parse_bool(values["lowercase"]))
    if "order" in values:
        config = replace(config, order=_parse_order(values["order"]))
    if "out_dir" in values:
        config = replace(config, out_dir=values["out_dir"])
    return config


def config_hash(config: PipelineConfig) -> str:
    """Hash of the semantic parameters (paths and seed excluded)."""
    canon = "\n".join(
        f"{key}={value}"
        for key, value in sorted(
            {
                "format": config.corpus_format,
                "window": config.window,
                "min_year": config.min_year,
                "lowercase": config.lowercase,
                "k": config.k,
                "ntop": config.ntop,
                "order": ",".join(config.order),
                "max_sweeps": config.max_sweeps,
                "label_count": config.label_count,
            }.items()
        )
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class PipelineArtifacts:
    graph: CooccurrenceGraph
    partition: Partition
    model: EmbeddingModel
    summary: dict


def run_pipeline(config: PipelineConfig) -> PipelineArtifacts:
    """Run ingest through embed, writing every intermediate artifact.

    A stage failure raises StageError naming the stage; artifacts written
    by completed stages stay on disk.
    """
    if not config.inputs:
        raise StageError("ingest", ValueError("no input files configured"))
    Path(config.out_dir).mkdir(parents=True, exist_ok=True)

    def stage(name, fn):
        try:
            return fn()
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc

    def do_ingest():
        ing = IngestConfig(config.window, config.min_year, config.lowercase)
        counts = ingest_paths(config.inputs, ing, config.corpus_format)
        write_edge_tsv(counts, config.edges_path)
        log.info("ingest: %d unique pairs", len(counts))
        return counts

    counts = stage("ingest", do_ingest)

    def do_build():
        return CooccurrenceGraph.build(counts)

    raw_graph = stage("build-graph", do_build)
    log.info("build-graph: %d nodes, %d edges", raw_graph.num_nodes, raw_graph.num_edges)

    def do_preprocess():
        pp = PreprocessConfig(config.k, config.ntop, config.order)
        pruned, reports = preprocess_pipeline(raw_graph, pp)
        pruned.save(config.graph_path)
        report_doc = {
            "order": list(config.order),
            "stages": [asdict(r) for r in reports],
            "final": {"nodes": pruned.num_nodes, "edges": pruned.num_edges},
        }
        config.report_path.write_text(json.dumps(report_doc, indent=2) + "\n", encoding="utf-8")
        return pruned

    graph = stage("preprocess", do_preprocess)
    log.info("preprocess: %d nodes, %d edges kept", graph.num_nodes, graph.num_edges)

    def do_detect():
        lp = label_propagation(
            graph, LpConfig(seed=config.seed + LP_SEED_OFFSET, max_sweeps=config.max_sweeps)
        )
        if not lp.converged:
            log.warning("detect: not converged after %d sweeps", lp.sweeps)
        write_partition_tsv(lp.partition, graph.terms, config.partition_path)
        write_sizes_tsv(lp.partition, config.sizes_path)
        return lp

    lp = stage("detect", do_detect)
    log.info(
        "detect: %d communities in %d sweeps", lp.partition.num_communities, lp.sweeps
    )

    def do_embed():
        provenance = f"sha256:{config_hash(config)} seed:{config.seed}"
        model = build_model(graph, lp.partition, config.label_count, provenance)
        model.save(config.model_path)
        write_labels_tsv(model.community_labels, config.labels_path)
        return model

    model = stage("embed", do_embed)

    nnz = [vec.nnz for vec in model.vectors]
    summary = {
        "vocab": model.num_terms,
        "communities": model.dim,
        "mean_nonzeros": (sum(nnz) / len(nnz)) if nnz else 0.0,
        "lp_converged": lp.converged,
        "lp_sweeps": lp.sweeps,
        "artifacts": {
            "edges": str(config.edges_path),
            "graph": str(config.graph_path),
            "partition": str(config.partition_path),
            "sizes": str(config.sizes_path),
            "model": str(config.model_path),
            "labels": str(config.labels_path),
            "report": str(config.report_path),
        },
    }
    config.stats_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return PipelineArtifacts(graph, lp.partition, model, summary)


# -- subcommands ---------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    config = IngestConfig(args.window, args.min_year, args.lowercase)
    counts = ingest_paths(args.inputs, config, args.format)
    write_edge_tsv(counts, args.out)
    log.info("wrote %d pairs to %s", len(counts), args.out)
    return 0


def cmd_build_graph(args: argparse.Namespace) -> int:
    g = CooccurrenceGraph.build(read_edge_tsv(args.in_path))
    g.save(args.out)
    log.info("wrote %d nodes, %d edges to %s", g.num_nodes, g.num_edges, args.out)
    return 0


def cmd_preprocess(args: argparse.Namespace) -> int:
    g = CooccurrenceGraph.build(read_edge_tsv(args.in_path))
    config = PreprocessConfig(args.k, args.ntop, _parse_order(args.order))
    pruned, reports = preprocess_pipeline(g, config)
    pruned.save(args.out)
    report_doc = {
        "order": list(config.order),
        "stages": [asdict(r) for r in reports],
        "final": {"nodes": pruned.num_nodes, "edges": pruned.num_edges},
    }
    Path(args.report).write_text(json.dumps(report_doc, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    g = CooccurrenceGraph.load(args.in_path)
    lp = label_propagation(g, LpConfig(seed=args.seed, max_sweeps=args.max_sweeps))
    if not lp.converged:
        log.warning("not converged after %d sweeps", lp.sweeps)
    write_partition_tsv(lp.partition, g.terms, args.out)
    if args.sizes:
        write_sizes_tsv(lp.partition, args.sizes)
    return 0


def cmd_embed(args: argparse.Namespace) -> int:
    g = CooccurrenceGraph.load(args.graph)
    p = partition_for_graph(read_partition_tsv(args.partition), g)
    model = build_model(g, p, args.label_count, args.provenance)
    model.save(args.out)
    if args.labels:
        write_labels_tsv(model.community_labels, args.labels)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    model = EmbeddingModel.load(args.model)
    if not args.dense:
        raise ValueError("only --dense export is implemented")
    export_dense(model, args.out)
    return 0


def cmd_query_nearest(args: argparse.Namespace) -> int:
    model = EmbeddingModel.load(args.model)
    if (args.term is None) == (args.vector_dim is None):
        raise ValueError("give exactly one of --term or --vector-dim")
    if args.term is not None:
        result = nearest(model, args.term, args.topk)
    else:
        result = nearest(model, canonical_vector(model, args.vector_dim), args.topk)
    for term, sim in result.neighbors:
        print(f"{term}\t{sim:.6g}")
    return 0


def cmd_query_explain(args: argparse.Namespace) -> int:
    model = EmbeddingModel.load(args.model)
    labels = read_labels_tsv(args.labels) if args.labels else None
    terms = [t for t in args.terms.split(",") if t]
    rows = explain(model, terms, args.topdims, labels)
    lines = ["#dim\tlabels\t" + "\t".join(terms)]
    for row in rows:
        values = "\t".join(f"{v:.6g}" for v in row.values)
        lines.append(f"{row.dim}\t{','.join(row.labels)}\t{values}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_eval_sim(args: argparse.Namespace) -> int:
    model = EmbeddingModel.load(args.model)
    ds = load_similarity_dataset(args.dataset)
    result = eval_similarity(model, ds)
    print(json.dumps(result.to_json_dict()))
    return 0


def cmd_eval_cat(args: argparse.Namespace) -> int:
    model = EmbeddingModel.load(args.model)
    ds = load_categorization_dataset(args.dataset)
    result = eval_categorization(model, ds, args.seed)
    print(json.dumps(result.to_json_dict()))
    return 0


def _sniff_kind(path: str | Path) -> str:
    with open(path, encoding="utf-8") as handle:
        first = handle.readline()
    if first.startswith("#cooccurrence-graph"):
        return "graph"
    if first.startswith("#dims "):
        return "model"
    return "partition"


def cmd_stats(args: argparse.Namespace) -> int:
    kind = args.kind or _sniff_kind(args.in_path)
    if kind == "graph":
        g = CooccurrenceGraph.load(args.in_path)
        degrees = [g.degree(u) for u in range(g.num_nodes)]
        doc = {
            "type": "graph",
            "nodes": g.num_nodes,
            "edges": g.num_edges,
            "total_weight": g.total_weight,
            "degree": {
                "min": min(degrees) if degrees else 0,
                "mean": (sum(degrees) / len(degrees)) if degrees else 0.0,
                "max": max(degrees) if degrees else 0,
            },
            "isolated_nodes": sum(1 for d in degrees if d == 0),
        }
    elif kind == "model":
        model = EmbeddingModel.load(args.in_path)
        nnz = [vec.nnz for vec in model.vectors]
        doc = {
            "type": "model",
            "dims": model.dim,
            "vocab": model.num_terms,
            "nonzeros": {
                "min": min(nnz) if nnz else 0,
                "mean": (sum(nnz) / len(nnz)) if nnz else 0.0,
                "max": max(nnz) if nnz else 0,
            },
            "zero_norm_vectors": sum(1 for c in nnz if c == 0),
            "columns_with_stats": len(model.column_mean),
        }
    elif kind == "partition":
        mapping = read_partition_tsv(args.in_path)
        p = Partition.from_labels([mapping[t] for t in sorted(mapping)])
        doc = {
            "type": "partition",
            "nodes": p.num_nodes,
            "communities": p.num_communities,
            "size_histogram": {
                str(size): count for size, count in sorted(size_distribution(p).items())
            },
        }
    else:
        raise ValueError(f"unknown artifact kind {kind!r}")
    print(json.dumps(doc, indent=2))
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    values = load_config_file(args.config) if args.config else {}
    overrides = {
        "input": args.input,
        "format": args.format,
        "window": args.window,
        "min_year": args.min_year,
        "lowercase": args.lowercase,
        "k": args.k,
        "ntop": args.ntop,
        "order": args.order,
        "seed": args.seed,
        "max_sweeps": args.max_sweeps,
        "label_count": args.label_count,
        "out_dir": args.out_dir,
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    config = config_from_values(values)
    artifacts = run_pipeline(config)
    print(json.dumps(artifacts.summary, indent=2))
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commvec",
        description="Sparse interpretable word embeddings from co-occurrence graph communities.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="count co-occurrence pairs from corpus files")
    p.add_argument("inputs", nargs="+", metavar="INPUT")
    p.add_argument("--format", choices=("records", "text"), default="records")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--min-year", type=int, default=1980)
    p.add_argument("--lowercase", type=_parse_bool, default=True, metavar="{true,false}")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build-graph", help="build a graph snapshot from an edge list")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("preprocess", help="filter, prune hubs, and extract the k-core")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--ntop", type=int, default=200)
    p.add_argument("--order", default=",".join(DEFAULT_ORDER))
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("detect", help="run label propagation on a graph snapshot")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-sweeps", type=int, default=100)
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sizes")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("embed", help="build the sparse model from graph and partition")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--labels")
    p.add_argument("--label-count", type=int, default=10)
    p.add_argument("--provenance", default="")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("export", help="export the model for external tooling")
    p.add_argument("--model", required=True)
    p.add_argument("--dense", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("query", help="similarity queries over a model")
    qsub = p.add_subparsers(dest="action", required=True)
    q = qsub.add_parser("nearest", help="top-k neighbors of a word or community axis")
    q.add_argument("--model", required=True)
    q.add_argument("--term")
    q.add_argument("--vector-dim", type=int)
    q.add_argument("--topk", type=int, default=10)
    q.set_defaults(func=cmd_query_nearest)
    q = qsub.add_parser("explain", help="strongest dimensions of words, side by side")
    q.add_argument("--model", required=True)
    q.add_argument("--terms", required=True, help="comma-separated words")
    q.add_argument("--topdims", type=int, default=10)
    q.add_argument("--labels", help="labels file for dimension annotations")
    q.add_argument("--out")
    q.set_defaults(func=cmd_query_explain)

    p = sub.add_parser("eval", help="score the model on benchmark datasets")
    esub = p.add_subparsers(dest="action", required=True)
    e = esub.add_parser("sim", help="similarity dataset, Spearman correlation")
    e.add_argument("--model", required=True)
    e.add_argument("--dataset", required=True)
    e.set_defaults(func=cmd_eval_sim)
    e = esub.add_parser("cat", help="categorization dataset, clustering purity")
    e.add_argument("--model", required=True)
    e.add_argument("--dataset", required=True)
    e.add_argument("--seed", type=int, required=True)
    e.set_defaults(func=cmd_eval_cat)

    p = sub.add_parser("stats", help="summarize a graph, model, or partition artifact")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--kind", choices=("graph", "model", "partition"))
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config")
    p.add_argument("--input", help="comma-separated corpus files")
    p.add_argument("--format", choices=("records", "text"))
    p.add_argument("--window", type=int)
    p.add_argument("--min-year", dest="min_year", type=int)
    p.add_argument("--lowercase")
    p.add_argument("--k", type=int)
    p.add_argument("--ntop", type=int)
    p.add_argument("--order")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-sweeps", dest="max_sweeps", type=int)
    p.add_argument("--label-count", dest="label_count", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f"error [{args.command}]: {_errmsg(exc)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
