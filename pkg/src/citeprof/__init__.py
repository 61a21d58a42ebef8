"""Citation-profile categorization and category-aware citation network growth.

The package splits into:

- :mod:`citeprof.ingest` -- bibliographic record parsing, citation graph and
  per-paper citation time series construction.
- :mod:`citeprof.profiles` -- smoothing, normalization, peak detection and the
  six-way profile classifier (PeakInit, PeakMul, PeakLate, MonDec, MonIncr, Oth).
- :mod:`citeprof.growth` -- dynamic network growth model combining preferential
  attachment with per-category aging.
- :mod:`citeprof.netanalysis` -- citation-bucket histograms, venue/year
  composition, self-citation effects, category stability, k-shell decomposition.
- :mod:`citeprof.report` -- citation belts and in-degree distribution exports.
- :mod:`citeprof.cli` -- reproducible command-line runs.
"""

__version__ = "0.1.0"

from .ingest import (
    PaperRecord,
    CitationGraph,
    CitationSeries,
    IngestReport,
    parse_dataset,
    build_graph,
    extract_series,
)
from .profiles import (
    ProfileCategory,
    ClassifierConfig,
    PeakSet,
    smooth,
    normalize,
    detect_peaks,
    classify,
    classify_corpus,
)
from .growth import (
    GrowthParams,
    GrowthInputs,
    attractiveness,
    sample_peak_times,
    simulate,
    synthetic_bootstrap,
)

__all__ = [
    "PaperRecord",
    "CitationGraph",
    "CitationSeries",
    "IngestReport",
    "parse_dataset",
    "build_graph",
    "extract_series",
    "ProfileCategory",
    "ClassifierConfig",
    "PeakSet",
    "smooth",
    "normalize",
    "detect_peaks",
    "classify",
    "classify_corpus",
    "GrowthParams",
    "GrowthInputs",
    "attractiveness",
    "sample_peak_times",
    "simulate",
    "synthetic_bootstrap",
    "__version__",
]
