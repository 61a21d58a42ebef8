import numpy as np
import pytest

from citeprof import report
from citeprof.profiles import ProfileCategory

PI = ProfileCategory.PEAK_INIT


def test_nearest_rank():
    values = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0])
    assert report.nearest_rank(values, 0.10) == 1.0  # ceil(1.0) = rank 1
    assert report.nearest_rank(values, 0.90) == 9.0
    assert report.nearest_rank(values, 0.05) == 1.0
    assert report.nearest_rank(np.array([7.0]), 0.5) == 7.0
    with pytest.raises(ValueError):
        report.nearest_rank(np.array([]), 0.5)


def test_citation_belt_lines_and_truncation():
    # ages 3+ are covered by only 3 of the 11 series
    series_set = [[0, 1, 2] for _ in range(8)] + [[0, 1, 2, 3, 4, 5]] * 3
    belt = report.citation_belt(PI, series_set, normalized=True)
    assert belt.ages == (0, 1, 2)
    assert belt.n_papers == 11
    assert belt.low_sample is False
    small = report.citation_belt(PI, [[1, 2]] * 4, normalized=True)
    assert small.low_sample is True


def test_citation_belt_normalizes_raw_series():
    belt = report.citation_belt(PI, [[0, 5, 10]] * 6)
    assert belt.mean == (0.0, 0.5, 1.0)
    assert belt.q1 == belt.q3 == (0.0, 0.5, 1.0)


def test_empty_belt():
    belt = report.citation_belt(PI, [])
    assert belt.ages == ()
    assert belt.low_sample is True


def test_belt_csv_rows():
    belts = report.belts_by_category({PI: [[0, 1, 2]] * 6}, normalized=True)
    rows = list(report.belt_csv_rows(belts))
    assert rows[0] == ["category", "age", "q1", "mean", "q3"]
    assert [r[0] for r in rows[1:]] == ["PeakInit"] * 3


def degree_dist(degrees):
    labels = {f"p{i}": PI for i in range(len(degrees))}
    counts = {f"p{i}": d for i, d in enumerate(degrees)}
    return report.indegree_distribution(counts, labels)[PI]


def test_indegree_distribution_pmf():
    dist = degree_dist([0, 0, 1, 3, 3, 3])
    assert dist.degrees == (0, 1, 3)
    assert dist.fractions == pytest.approx((2 / 6, 1 / 6, 3 / 6))
    assert dist.cdf_at(1) == pytest.approx(0.5)
    assert dist.cdf_at(10) == pytest.approx(1.0)


def test_log_binned_mass_sums_to_one():
    dist = degree_dist([0, 1, 2, 4, 8, 16, 33])
    edges, mass = dist.log_binned()
    assert sum(mass) == pytest.approx(1.0)
    assert edges[0] == 0.0
    assert edges[-1] >= 33


def test_compare_distributions():
    a = degree_dist([0, 1, 2, 3])
    same = report.compare_distributions(a, a)
    assert same.ks == 0.0
    assert same.tv == 0.0
    b = degree_dist([10, 11, 12, 13])
    diff = report.compare_distributions(a, b)
    assert diff.ks == pytest.approx(1.0)
    assert 0 < diff.tv <= 1.0


def test_compare_distributions_category_mismatch():
    labels = {"x": ProfileCategory.OTH}
    other = report.indegree_distribution({"x": 1}, labels)[ProfileCategory.OTH]
    with pytest.raises(ValueError):
        report.compare_distributions(degree_dist([1]), other)


def test_degree_csv_rows():
    dists = {PI: degree_dist([1, 1, 5])}
    rows = list(report.degree_csv_rows(dists))
    assert rows[0] == ["category", "indegree", "fraction"]
    assert len(rows) == 3
