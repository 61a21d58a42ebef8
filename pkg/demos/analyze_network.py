"""Walkthrough: downstream analyses on a simulated citation network.

Grows a medium-sized network, converts one replica into plain paper
records, and runs the analysis layer on it: category census, citation
buckets, k-shell decomposition, label stability across observation
horizons, and citation belts.

Run with:  python3 demos/analyze_network.py
"""

import numpy as np

from citeprof import growth
from citeprof.ingest import build_graph, extract_series
from citeprof.netanalysis import (
    citation_bucket_histogram,
    kshell_decompose,
    stability_flows,
)
from citeprof.profiles import CATEGORIES, classify_corpus
from citeprof.report import belts_by_category


def simulated_graph():
    rng = np.random.default_rng(5)
    bootstrap = growth.synthetic_bootstrap(
        300, growth.PAPER_CATEGORY_FRACTIONS, start_year=1970, n_years=6, rng=rng,
    )
    inputs = growth.GrowthInputs(
        pub_dist={year: 60 for year in range(1976, 2006)},
        ref_dist=growth.geometric_ref_dist(8),
        bootstrap=bootstrap,
    )
    params = growth.GrowthParams(replicas=1, rng_seed=23)
    replica = growth.simulate(inputs, params).replicas[0]
    return build_graph(replica.to_records())


def main():
    graph = simulated_graph()
    print(f"graph: {len(graph)} papers, years "
          f"{graph.min_year}-{graph.max_year}\n")

    corpus = classify_corpus(graph)
    census = corpus.census()
    print("category census (classified papers):")
    for cat in CATEGORIES:
        n = census["counts"][cat.value]
        print(f"  {cat.value:>10}  {n:>5}  {census['fractions'][cat.value]:6.1%}")
    print(f"  {'ineligible':>10}  {len(corpus.ineligible):>5}  (short history)\n")

    totals = {pid: graph.in_degree(pid) for pid in corpus.labels}
    buckets = citation_bucket_histogram(corpus.labels, totals)
    print("citation-count buckets (per-category composition of each bucket):")
    lo, hi = buckets.boundaries[0], buckets.boundaries[-1]
    print(f"  {len(buckets.boundaries)} buckets from {lo} to {hi}; "
          f"{buckets.n_below_minimum} papers below the first bucket\n")

    shells = kshell_decompose(graph)
    top = sorted(shells.shells.values())[-1]
    n_core = sum(1 for s in shells.shells.values() if s == top)
    print(f"k-shell decomposition: max shell {shells.max_shell}, "
          f"{n_core} papers in the innermost shell\n")

    flow = stability_flows(graph, horizons=(10, 15, 20))
    moved = sum(
        1 for pid, c10 in flow.labels[10].items() if flow.labels[20][pid] != c10
    )
    stayed = len(flow.labels[10]) - moved
    print(f"label stability T+10 -> T+20: {stayed} papers kept their "
          f"category, {moved} migrated\n")

    series = {
        cat: [
            extract_series(graph, pid, horizon_years=20).counts
            for pid, c in corpus.labels.items()
            if c == cat and graph.max_year - graph.year(pid) >= 19
        ]
        for cat in CATEGORIES
    }
    print("citation belts (10th-90th percentile of normalized profiles):")
    for belt in belts_by_category(series).values():
        if not belt.ages or belt.low_sample:
            continue
        widest = max(
            range(len(belt.ages)), key=lambda i: belt.q3[i] - belt.q1[i]
        )
        print(f"  {belt.category.value:>10}  n={belt.n_papers:<4} "
              f"widest spread at age {belt.ages[widest]} "
              f"[{belt.q1[widest]:.2f}, {belt.q3[widest]:.2f}]")


if __name__ == "__main__":
    main()
