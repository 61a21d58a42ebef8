"""Bibliographic dataset ingestion.

Parses newline-delimited JSON or flat CSV dumps into validated
:class:`PaperRecord` objects, builds the directed citation graph
(edge u -> v means u cites v) and extracts per-paper citation time
series aligned to the publication year.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

VENUE_TYPES = ("conference", "journal", "unknown")
DEFAULT_YEAR_WINDOW = (1900, 2100)

CSV_HEADER = ["id", "year", "venue_type", "fields", "authors", "references"]
CSV_INNER_SEP = ";"


class IngestError(Exception):
    """Fatal ingestion failure (unreadable stream, unknown format)."""


class UnknownPaperError(KeyError):
    """Requested paper id is not present in the graph."""


@dataclass(frozen=True)
class PaperRecord:
    """One bibliographic entry.

    ``reference_ids`` holds outgoing citations; duplicates and
    self-references are removed during parsing.
    """

    paper_id: str
    year: int
    venue_type: str = "unknown"
    fields: tuple[str, ...] = ()
    author_ids: tuple[str, ...] = ()
    reference_ids: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "id": self.paper_id,
            "year": self.year,
            "venue_type": self.venue_type,
            "fields": list(self.fields),
            "authors": list(self.author_ids),
            "references": list(self.reference_ids),
        }


@dataclass
class IngestReport:
    """Per-parse bookkeeping: accepted/rejected counts with reasons."""

    n_records: int = 0
    n_rejected: int = 0
    reject_reasons: dict[str, int] = field(default_factory=dict)
    rejected: list[tuple[int, str]] = field(default_factory=list)  # (line, reason)
    dropped_self_references: int = 0
    dropped_duplicate_references: int = 0

    def reject(self, line_no: int, reason: str) -> None:
        self.n_rejected += 1
        self.reject_reasons[reason] = self.reject_reasons.get(reason, 0) + 1
        self.rejected.append((line_no, reason))


def _clean_references(
    paper_id: str, refs: Iterable[str], report: IngestReport
) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for r in refs:
        r = str(r)
        if r == paper_id:
            report.dropped_self_references += 1
            continue
        if r in seen:
            report.dropped_duplicate_references += 1
            continue
        seen.add(r)
        out.append(r)
    return tuple(out)


def _validate(
    raw: dict,
    line_no: int,
    seen_ids: set[str],
    year_window: tuple[int, int],
    report: IngestReport,
) -> PaperRecord | None:
    paper_id = raw.get("id")
    if not isinstance(paper_id, str) or not paper_id:
        report.reject(line_no, "missing id")
        return None
    if paper_id in seen_ids:
        report.reject(line_no, "duplicate id")
        return None
    year = raw.get("year")
    if isinstance(year, str):
        try:
            year = int(year)
        except ValueError:
            year = None
    if not isinstance(year, int) or not (year_window[0] <= year <= year_window[1]):
        report.reject(line_no, "bad year")
        return None
    venue = raw.get("venue_type") or "unknown"
    if venue not in VENUE_TYPES:
        report.reject(line_no, "bad venue_type")
        return None
    record = PaperRecord(
        paper_id=paper_id,
        year=year,
        venue_type=venue,
        fields=tuple(str(f) for f in raw.get("fields") or ()),
        author_ids=tuple(str(a) for a in raw.get("authors") or ()),
        reference_ids=_clean_references(paper_id, raw.get("references") or (), report),
    )
    seen_ids.add(paper_id)
    return record


def _iter_text(source: IO | str | bytes) -> Iterator[str]:
    if isinstance(source, bytes):
        yield from io.StringIO(source.decode("utf-8"))
        return
    if isinstance(source, str):
        yield from io.StringIO(source)
        return
    try:
        first = source.read(0)
    except Exception as exc:  # pragma: no cover - exotic stream types
        raise IngestError(f"unreadable stream: {exc}") from exc
    if isinstance(first, bytes):
        yield from io.TextIOWrapper(source, encoding="utf-8")
    else:
        yield from source


def parse_dataset(
    source: IO | str | bytes,
    format: str = "jsonl",
    year_window: tuple[int, int] = DEFAULT_YEAR_WINDOW,
) -> tuple[list[PaperRecord], IngestReport]:
    """Parse a JSONL or CSV dataset into validated records.

    Malformed individual records are skipped and reported in the
    :class:`IngestReport`; only an unreadable stream or an unknown
    format is fatal.
    """
    if format not in ("jsonl", "csv"):
        raise IngestError(f"unknown format: {format!r}")
    report = IngestReport()
    records: list[PaperRecord] = []
    seen_ids: set[str] = set()
    try:
        if format == "jsonl":
            for line_no, line in enumerate(_iter_text(source), start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError:
                    report.reject(line_no, "malformed json")
                    continue
                if not isinstance(raw, dict):
                    report.reject(line_no, "malformed json")
                    continue
                rec = _validate(raw, line_no, seen_ids, year_window, report)
                if rec is not None:
                    records.append(rec)
        else:
            reader = csv.DictReader(_iter_text(source))
            for line_no, row in enumerate(reader, start=2):
                raw = {
                    "id": row.get("id"),
                    "year": row.get("year"),
                    "venue_type": row.get("venue_type") or "unknown",
                    "fields": _split_inner(row.get("fields")),
                    "authors": _split_inner(row.get("authors")),
                    "references": _split_inner(row.get("references")),
                }
                rec = _validate(raw, line_no, seen_ids, year_window, report)
                if rec is not None:
                    records.append(rec)
    except UnicodeDecodeError as exc:
        raise IngestError(f"stream is not UTF-8: {exc}") from exc
    except OSError as exc:
        raise IngestError(f"unreadable stream: {exc}") from exc
    report.n_records = len(records)
    return records, report


def _split_inner(value: str | None) -> list[str]:
    if not value:
        return []
    return [v for v in value.split(CSV_INNER_SEP) if v]


def write_jsonl(records: Iterable[PaperRecord], stream: IO) -> None:
    for rec in records:
        stream.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def write_csv(records: Iterable[PaperRecord], stream: IO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(
            [
                rec.paper_id,
                rec.year,
                rec.venue_type,
                CSV_INNER_SEP.join(rec.fields),
                CSV_INNER_SEP.join(rec.author_ids),
                CSV_INNER_SEP.join(rec.reference_ids),
            ]
        )


class CitationGraph:
    """Directed citation graph with per-node metadata.

    Edges point from the citing paper to the cited paper. Dangling
    references (to ids absent from the record list) are dropped and
    counted. Construction is deterministic: the edge set depends only
    on the set of records, not their order.
    """

    def __init__(
        self, records: Iterable[PaperRecord], strict_chronology: bool = False
    ) -> None:
        self.records: dict[str, PaperRecord] = {}
        for rec in records:
            if rec.paper_id in self.records:
                raise IngestError(f"duplicate paper id: {rec.paper_id!r}")
            self.records[rec.paper_id] = rec

        self._out: dict[str, tuple[str, ...]] = {}
        self._in: dict[str, list[str]] = {pid: [] for pid in self.records}
        self.dangling_dropped = 0
        self.chronology_dropped = 0
        for pid in sorted(self.records):
            rec = self.records[pid]
            kept: list[str] = []
            for ref in rec.reference_ids:
                target = self.records.get(ref)
                if target is None:
                    self.dangling_dropped += 1
                    continue
                if strict_chronology and rec.year < target.year:
                    self.chronology_dropped += 1
                    continue
                kept.append(ref)
                self._in[ref].append(pid)
            self._out[pid] = tuple(kept)

        self.year_index: dict[int, frozenset[str]] = {}
        by_year: dict[int, set[str]] = {}
        for pid, rec in self.records.items():
            by_year.setdefault(rec.year, set()).add(pid)
        self.year_index = {y: frozenset(s) for y, s in by_year.items()}

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self.records

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n_edges(self) -> int:
        return sum(len(v) for v in self._out.values())

    def node_ids(self) -> list[str]:
        return sorted(self.records)

    def out_references(self, paper_id: str) -> tuple[str, ...]:
        return self._out[paper_id]

    def in_citers(self, paper_id: str) -> tuple[str, ...]:
        return tuple(self._in[paper_id])

    def in_degree(self, paper_id: str) -> int:
        return len(self._in[paper_id])

    def edges(self) -> Iterator[tuple[str, str]]:
        for u in sorted(self._out):
            for v in self._out[u]:
                yield (u, v)

    def year(self, paper_id: str) -> int:
        return self.records[paper_id].year

    @property
    def max_year(self) -> int:
        return max(r.year for r in self.records.values())

    @property
    def min_year(self) -> int:
        return min(r.year for r in self.records.values())

    def subgraph_upto(self, year: int) -> "CitationGraph":
        """Induced subgraph of papers published at or before ``year``."""
        kept = [r for r in self.records.values() if r.year <= year]
        return CitationGraph(kept)


def build_graph(
    records: Iterable[PaperRecord], strict_chronology: bool = False
) -> CitationGraph:
    """Construct the citation graph from validated records."""
    return CitationGraph(records, strict_chronology=strict_chronology)


@dataclass(frozen=True)
class CitationSeries:
    """Per-year inbound citation counts, index 0 = publication year."""

    paper_id: str
    pub_year: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) < 1:
            raise ValueError("counts must have length >= 1")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    def total(self, first_n_years: int | None = None) -> int:
        if first_n_years is None:
            return sum(self.counts)
        return sum(self.counts[:first_n_years])


def extract_series(
    graph: CitationGraph, paper_id: str, horizon_years: int = 20
) -> CitationSeries:
    """Citation counts by year offset from publication.

    counts[k] = number of in-edges from papers published in
    pub_year + k, for k in [0, horizon_years). Citations dated before
    the cited paper's publication year (data noise) are excluded.
    """
    if horizon_years < 1:
        raise ValueError("horizon_years must be >= 1")
    if paper_id not in graph:
        raise UnknownPaperError(paper_id)
    pub_year = graph.year(paper_id)
    counts = [0] * horizon_years
    for citer in graph.in_citers(paper_id):
        offset = graph.year(citer) - pub_year
        if 0 <= offset < horizon_years:
            counts[offset] += 1
    return CitationSeries(paper_id=paper_id, pub_year=pub_year, counts=tuple(counts))
