"""Shared fixtures: hand-built series, small corpora, and the desk-scale
simulation reused by the model acceptance tests."""

from __future__ import annotations

import numpy as np
import pytest

from citeprof import growth
from citeprof.ingest import PaperRecord, build_graph
from citeprof.profiles import ProfileCategory

# One 20-year series per category. These are load-bearing: the classifier
# acceptance test asserts each classifies exactly as keyed.
FIXTURE_SERIES: dict[ProfileCategory, tuple[int, ...]] = {
    ProfileCategory.PEAK_INIT: (1, 4, 9, 14, 10, 6, 4, 3, 2, 2, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0),
    ProfileCategory.PEAK_MUL: (0, 1, 4, 10, 16, 10, 4, 1, 1, 1, 4, 10, 16, 10, 4, 1, 0, 0, 0, 0),
    ProfileCategory.PEAK_LATE: (0, 1, 1, 2, 2, 3, 4, 6, 9, 13, 16, 12, 8, 5, 3, 2, 1, 1, 0, 0),
    ProfileCategory.MON_DEC: (4, 10, 9, 8, 5, 4, 2, 2, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    ProfileCategory.MON_INCR: tuple(range(1, 21)),
    ProfileCategory.OTH: (0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
}


def corpus_from_series(series_map, start_year=1980):
    """Build records realizing the given per-paper citation series.

    Each target paper is cited by dedicated single-reference filler
    papers placed in the right years.
    """
    records = []
    n = 0
    for pid, counts in series_map.items():
        records.append(PaperRecord(paper_id=pid, year=start_year))
        for offset, c in enumerate(counts):
            for _ in range(c):
                records.append(
                    PaperRecord(
                        paper_id=f"c{n:05d}",
                        year=start_year + offset,
                        reference_ids=(pid,),
                    )
                )
                n += 1
    return records


@pytest.fixture(scope="session")
def fixture_graph():
    series_map = {f"fx_{cat.value}": counts for cat, counts in FIXTURE_SERIES.items()}
    return build_graph(corpus_from_series(series_map))


def desk_scale_config():
    """The model-reproduction configuration used by the acceptance suite."""
    rng = np.random.default_rng(42)
    bootstrap = growth.synthetic_bootstrap(
        600,
        growth.PAPER_CATEGORY_FRACTIONS,
        start_year=1970,
        n_years=6,
        refs_mean=3,
        rng=rng,
    )
    inputs = growth.GrowthInputs(
        pub_dist={year: 100 for year in range(1976, 2006)},
        ref_dist=growth.geometric_ref_dist(8),
        bootstrap=bootstrap,
    )
    params = growth.GrowthParams(replicas=20, rng_seed=7)
    return inputs, params


@pytest.fixture(scope="session")
def desk_simulation():
    inputs, params = desk_scale_config()
    return growth.simulate(inputs, params, threads=4)
