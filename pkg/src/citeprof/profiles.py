"""Citation-profile classification.

Pipeline per paper: truncate the series to the observation window,
apply a moving-average filter, normalize by the series maximum, detect
qualifying peaks, then assign one of six categories from the count and
position of the peaks:

- PeakInit: single peak in years 2..5
- PeakMul:  two or more peaks
- PeakLate: single peak after year 5
- MonDec:   peak in year 1, monotone non-increase afterwards
- MonIncr:  monotone non-decreasing throughout
- Oth:      too few citations, or none of the above
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ingest import CitationGraph, CitationSeries

MONOTONE_TOL = 1e-9


class ProfileCategory(str, Enum):
    PEAK_INIT = "PeakInit"
    PEAK_MUL = "PeakMul"
    PEAK_LATE = "PeakLate"
    MON_DEC = "MonDec"
    MON_INCR = "MonIncr"
    OTH = "Oth"

    def __str__(self) -> str:  # keep CSV/JSON output clean
        return self.value


CATEGORIES: tuple[ProfileCategory, ...] = tuple(ProfileCategory)


class IneligibleSeriesError(ValueError):
    """Series is shorter than the minimum required citation history."""


@dataclass(frozen=True)
class ClassifierConfig:
    min_history_years: int = 10
    max_window_years: int = 20
    oth_citation_threshold: int = 10
    smoothing_window: int = 5
    peak_height_fraction: float = 0.75
    peak_min_separation: int = 2
    early_peak_bound: int = 5

    def __post_init__(self) -> None:
        for name in (
            "min_history_years",
            "max_window_years",
            "oth_citation_threshold",
            "smoothing_window",
            "peak_min_separation",
            "early_peak_bound",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not (0.0 < self.peak_height_fraction <= 1.0):
            raise ValueError("peak_height_fraction must be in (0, 1]")


@dataclass(frozen=True)
class PeakSet:
    """Qualifying peaks as (year offset, height) pairs, sorted by position."""

    peaks: tuple[tuple[int, float], ...]

    def __len__(self) -> int:
        return len(self.peaks)

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.peaks)

    @property
    def heights(self) -> tuple[float, ...]:
        return tuple(h for _, h in self.peaks)


def smooth(counts: Sequence[float], window: int = 5) -> np.ndarray:
    """Moving average with shrinking (clipped) windows at the boundaries.

    ``window`` must be odd; window 1 is the identity.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("smoothing window must be odd and >= 1")
    x = np.asarray(counts, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-d series")
    half = window // 2
    n = len(x)
    csum = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half, n - 1)
    return (csum[hi + 1] - csum[lo]) / (hi - lo + 1)


def normalize(values: Sequence[float]) -> np.ndarray:
    """Scale by the series maximum; an all-zero series is returned as-is."""
    x = np.asarray(values, dtype=float)
    m = x.max() if len(x) else 0.0
    if m <= 0:
        return x.copy()
    return x / m


def _plateau_maxima(values: np.ndarray) -> list[tuple[int, float]]:
    """Interior strict local maxima; a plateau counts once, at its first index."""
    n = len(values)
    out: list[tuple[int, float]] = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        if j < n - 1 and values[i] > values[i - 1] and values[i] > values[j + 1]:
            out.append((i, float(values[i])))
        i = j + 1
    return out


def detect_peaks(
    values: Sequence[float], cfg: ClassifierConfig = ClassifierConfig()
) -> PeakSet:
    """Qualifying peaks of a normalized series.

    Candidates are interior local maxima (plateaus collapse to their
    first index). A candidate qualifies when its height is at least
    ``peak_height_fraction`` both in absolute terms and relative to the
    tallest candidate. Candidates within ``peak_min_separation`` years
    of a taller accepted peak are merged into it (ties keep the earlier
    peak).
    """
    x = np.asarray(values, dtype=float)
    candidates = _plateau_maxima(x)
    if not candidates:
        return PeakSet(())
    top = max(h for _, h in candidates)
    candidates = [
        (p, h)
        for p, h in candidates
        if h >= cfg.peak_height_fraction * top and h >= cfg.peak_height_fraction
    ]
    accepted: list[tuple[int, float]] = []
    for pos, h in sorted(candidates, key=lambda ph: (-ph[1], ph[0])):
        if all(abs(pos - q) > cfg.peak_min_separation for q, _ in accepted):
            accepted.append((pos, h))
    accepted.sort()
    return PeakSet(tuple(accepted))


def _non_decreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) >= -MONOTONE_TOL))


def _non_increasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) <= MONOTONE_TOL))


@dataclass(frozen=True)
class Classification:
    paper_id: str
    category: ProfileCategory
    peaks: PeakSet
    total_citations_10y: int
    smoothed: tuple[float, ...]
    normalized: tuple[float, ...]


def classify(
    series: CitationSeries, cfg: ClassifierConfig = ClassifierConfig()
) -> Classification:
    """Assign exactly one profile category to a citation series."""
    counts = series.counts
    if len(counts) < cfg.min_history_years:
        raise IneligibleSeriesError(
            f"{series.paper_id}: {len(counts)} years of history, "
            f"need {cfg.min_history_years}"
        )
    counts = counts[: cfg.max_window_years]
    total_10y = sum(counts[:10])
    smoothed = smooth(counts, cfg.smoothing_window)
    normed = normalize(smoothed)
    peaks = detect_peaks(normed, cfg)

    if total_10y <= cfg.oth_citation_threshold:
        category = ProfileCategory.OTH
    elif len(peaks) == 0:
        category = (
            ProfileCategory.MON_INCR if _non_decreasing(smoothed) else ProfileCategory.OTH
        )
    elif len(peaks) >= 2:
        category = ProfileCategory.PEAK_MUL
    else:
        (pos, _), = peaks.peaks
        last = len(smoothed) - 1
        if pos == 1 and _non_increasing(smoothed[1:]):
            category = ProfileCategory.MON_DEC
        elif pos == last and _non_decreasing(smoothed):
            category = ProfileCategory.MON_INCR
        elif 2 <= pos <= cfg.early_peak_bound:
            category = ProfileCategory.PEAK_INIT
        elif pos > cfg.early_peak_bound:
            category = ProfileCategory.PEAK_LATE
        else:
            category = ProfileCategory.OTH
    return Classification(
        paper_id=series.paper_id,
        category=category,
        peaks=peaks,
        total_citations_10y=total_10y,
        smoothed=tuple(float(v) for v in smoothed),
        normalized=tuple(float(v) for v in normed),
    )


@dataclass
class CorpusClassification:
    """Labels and census for every eligible paper in a graph."""

    results: dict[str, Classification]
    ineligible: list[str] = field(default_factory=list)

    @property
    def labels(self) -> dict[str, ProfileCategory]:
        return {pid: r.category for pid, r in self.results.items()}

    def census(self) -> dict:
        counts = {c.value: 0 for c in CATEGORIES}
        for r in self.results.values():
            counts[r.category.value] += 1
        total = len(self.results)
        fractions = {
            c: (counts[c] / total if total else 0.0) for c in counts
        }
        return {
            "n_classified": total,
            "n_ineligible": len(self.ineligible),
            "counts": counts,
            "fractions": fractions,
        }


def classify_corpus(
    graph: CitationGraph,
    cfg: ClassifierConfig = ClassifierConfig(),
    observation_year: int | None = None,
) -> CorpusClassification:
    """Classify every paper with enough citation history in the graph.

    A paper is eligible when at least ``min_history_years`` of history
    are observable between its publication year and ``observation_year``
    (default: the latest publication year in the graph).
    """
    from .ingest import extract_series

    if len(graph) == 0:
        return CorpusClassification(results={})
    obs = graph.max_year if observation_year is None else observation_year
    results: dict[str, Classification] = {}
    ineligible: list[str] = []
    for pid in graph.node_ids():
        history = obs - graph.year(pid) + 1
        if history < cfg.min_history_years:
            ineligible.append(pid)
            continue
        horizon = min(cfg.max_window_years, history)
        series = extract_series(graph, pid, horizon_years=horizon)
        results[pid] = classify(series, cfg)
    return CorpusClassification(results=results, ineligible=ineligible)


def labels_to_csv_rows(corpus: CorpusClassification) -> Iterable[list]:
    """Rows for the labels CSV export (with header)."""
    yield [
        "paper_id",
        "category",
        "n_peaks",
        "peak_positions",
        "peak_heights",
        "total_citations_10y",
    ]
    for pid in sorted(corpus.results):
        r = corpus.results[pid]
        yield [
            pid,
            r.category.value,
            len(r.peaks),
            ";".join(str(p) for p in r.peaks.positions),
            ";".join(f"{h:.6f}" for h in r.peaks.heights),
            r.total_citations_10y,
        ]


def census_to_json(corpus: CorpusClassification) -> str:
    return json.dumps(corpus.census(), sort_keys=True, indent=2)


def category_from_label(label: str) -> ProfileCategory:
    try:
        return ProfileCategory(label)
    except ValueError as exc:
        raise ValueError(f"unknown category label: {label!r}") from exc
