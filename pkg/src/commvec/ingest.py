"""Corpus ingestion: co-occurrence records or raw text in, pair counts out.

Two input shapes feed the pipeline: tab-separated co-occurrence records
(term, context, year, count), optionally gzip-compressed, and plain text
with one whitespace-tokenized document per line. Both funnel into a map
from lexicographically ordered term pairs to summed counts, written as
the edge-list TSV that the graph stage consumes.
"""

from __future__ import annotations

import gzip
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

__all__ = [
    "CooccRecord",
    "IngestConfig",
    "ParseError",
    "parse_record_line",
    "cooccurrences_from_tokens",
    "aggregate",
    "merge_counts",
    "read_records",
    "read_token_lines",
    "ingest_paths",
    "write_edge_tsv",
    "read_edge_tsv",
]

PairCounts = Counter  # (termA, termB) -> count, with termA < termB


class ParseError(ValueError):
    """Malformed input line; remembers the 1-based line number."""

    def __init__(self, message: str, lineno: int = 0):
        if lineno:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class CooccRecord:
    """One observation: (term, context) seen `count` times in `year`."""

    term: str
    context: str
    year: int
    count: int


@dataclass(frozen=True)
class IngestConfig:
    window: int = 5
    min_year: int = 1980
    lowercase: bool = True

    def __post_init__(self) -> None:
        if not 2 <= self.window <= 5:
            raise ValueError(f"window must be within [2, 5], got {self.window}")
        if self.min_year < 0:
            raise ValueError(f"min_year must be >= 0, got {self.min_year}")


def _fold(token: str, config: IngestConfig) -> str:
    return token.lower() if config.lowercase else token


def _canonical(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def parse_record_line(line: str, config: IngestConfig, lineno: int = 0) -> CooccRecord:
    """Parse one record line: term <TAB> context <TAB> year <TAB> count.

    Trailing extra fields are ignored.  Raises ParseError on fewer than
    four fields, non-integer year/count, a count below 1, or tokens that
    are empty or contain whitespace.
    """
    fields = line.rstrip("\r\n").split("\t")
    if len(fields) < 4:
        raise ParseError(f"expected >= 4 tab-separated fields, got {len(fields)}", lineno)
    term, context = fields[0], fields[1]
    try:
        year = int(fields[2])
        count = int(fields[3])
    except ValueError:
        raise ParseError(
            f"year and count must be integers, got {fields[2]!r} and {fields[3]!r}", lineno
        ) from None
    if count <= 0:
        raise ParseError(f"count must be >= 1, got {count}", lineno)
    for token in (term, context):
        if not token or any(ch.isspace() for ch in token):
            raise ParseError(f"expected a non-empty whitespace-free token, got {token!r}", lineno)
    return CooccRecord(_fold(term, config), _fold(context, config), year, count)


def cooccurrences_from_tokens(tokens: Iterable[str], config: IngestConfig) -> Counter:
    """Count unordered token pairs within a sliding window of size `config.window`.

    Every pair of positions (i, i+d) with 1 <= d <= window-1 contributes one
    observation; pairs of identical tokens are skipped (no self-loops).
    """
    toks = [t.lower() for t in tokens] if config.lowercase else list(tokens)
    pairs: Counter = Counter()
    n = len(toks)
    span = config.window
    for i in range(n):
        a = toks[i]
        for j in range(i + 1, min(i + span, n)):
            b = toks[j]
            if a == b:
                continue
            pairs[_canonical(a, b)] += 1
    return pairs


def aggregate(records: Iterable[CooccRecord], config: IngestConfig) -> Counter:
    """Sum record counts per unordered pair, dropping records older than min_year.

    Keys are canonicalized with the lexicographically smaller term first;
    self co-occurrences are discarded.  The result is independent of record
    order, so shards may be aggregated separately and combined with
    `merge_counts`.
    """
    totals: Counter = Counter()
    for rec in records:
        if rec.year < config.min_year:
            continue
        a = _fold(rec.term, config)
        b = _fold(rec.context, config)
        if a == b:
            continue
        totals[_canonical(a, b)] += rec.count
    return totals


def merge_counts(*parts: Mapping[tuple[str, str], int]) -> Counter:
    """Combine per-shard pair counts by addition (associative and commutative)."""
    total: Counter = Counter()
    for part in parts:
        for pair, count in part.items():
            total[pair] += count
    return total


def _open_text(path: str | Path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, encoding="utf-8")


def read_records(path: str | Path, config: IngestConfig) -> Iterator[CooccRecord]:
    """Stream records from a TSV file (gzip allowed). Blank lines are skipped."""
    with _open_text(path) as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            yield parse_record_line(line, config, lineno)


def read_token_lines(path: str | Path) -> Iterator[list[str]]:
    """Stream whitespace-tokenized documents, one per line; blank lines skipped."""
    with _open_text(path) as handle:
        for line in handle:
            tokens = line.split()
            if tokens:
                yield tokens


def ingest_paths(
    paths: Iterable[str | Path], config: IngestConfig, corpus_format: str = "records"
) -> Counter:
    """Aggregate co-occurrence counts over one or more input files."""
    totals: Counter = Counter()
    for path in paths:
        if corpus_format == "records":
            totals = merge_counts(totals, aggregate(read_records(path, config), config))
        elif corpus_format == "text":
            for tokens in read_token_lines(path):
                totals = merge_counts(totals, cooccurrences_from_tokens(tokens, config))
        else:
            raise ValueError(f"unknown corpus format {corpus_format!r}")
    return totals


def write_edge_tsv(counts: Mapping[tuple[str, str], int], path: str | Path) -> None:
    """Write pair counts as `termA<TAB>termB<TAB>count`, sorted lexicographically."""
    with open(path, "w", encoding="utf-8") as out:
        for (a, b), count in sorted(counts.items()):
            out.write(f"{a}\t{b}\t{count}\n")


def read_edge_tsv(path: str | Path) -> Counter:
    """Read an edge-list TSV back into pair counts.

    Keys are re-canonicalized and duplicate rows are summed, so any valid
    edge file loads to the same map that produced it.
    """
    totals: Counter = Counter()
    with _open_text(path) as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\r\n").split("\t")
            if len(fields) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", lineno)
            a, b, raw = fields
            try:
                count = int(raw)
            except ValueError:
                raise ParseError(f"count must be an integer, got {raw!r}", lineno) from None
            if count <= 0:
                raise ParseError(f"count must be >= 1, got {count}", lineno)
            if a == b:
                raise ParseError(f"self-loop edge {a!r}", lineno)
            totals[_canonical(a, b)] += count
    return totals
