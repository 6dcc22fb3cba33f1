"""Modularity oracle and detector behavior on small graphs."""

import itertools

import numpy as np
import pytest

from virobust.community import (
    detect,
    detect_fast_greedy,
    detect_louvain,
    modularity,
)
from virobust.errors import InputError
from virobust.graph import Graph
from virobust.partitions import Partition


def modularity_oracle(g, part):
    """Direct edge-by-edge sum: Q = (1/2m) sum_ij (A_ij - d_i d_j / 2m) delta."""
    m = g.m
    degs = np.array([len(a) for a in g.adjacency], dtype=float)
    labels = part.labels
    q = 0.0
    adj = {frozenset(e) for e in g.edges}
    for i in range(g.n):
        for j in range(g.n):
            if labels[i] != labels[j]:
                continue
            a_ij = 1.0 if i != j and frozenset((i, j)) in adj else 0.0
            q += a_ij - degs[i] * degs[j] / (2.0 * m)
    return q / (2.0 * m)


def two_triangles():
    return Graph(list("abcdef"), [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def test_two_triangle_partition_is_half():
    g = two_triangles()
    part = Partition([0, 0, 0, 1, 1, 1])
    assert modularity(g, part) == pytest.approx(0.5, abs=1e-15)


def test_modularity_matches_bruteforce_oracle():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(4, 31))
        pairs = list(itertools.combinations(range(n), 2))
        keep = rng.random(len(pairs)) < 0.25
        edges = [p for p, k in zip(pairs, keep) if k]
        if not edges:
            edges = [pairs[0]]
        g = Graph([str(i) for i in range(n)], edges)
        part = Partition(rng.integers(0, 4, size=n))
        assert modularity(g, part) == pytest.approx(
            modularity_oracle(g, part), abs=1e-12
        )


def test_modularity_requires_edges_and_matching_sizes():
    g = Graph(list("ab"), [])
    with pytest.raises(InputError):
        modularity(g, Partition([0, 1]))
    g2 = two_triangles()
    with pytest.raises(InputError):
        modularity(g2, Partition([0, 1]))


def test_detectors_separate_two_triangles():
    g = two_triangles()
    for part in (detect_fast_greedy(g), detect_louvain(g, rng_seed=0)):
        assert part.k == 2
        assert modularity(g, part) == pytest.approx(0.5, abs=1e-12)


def test_fast_greedy_deterministic():
    rng = np.random.default_rng(9)
    pairs = list(itertools.combinations(range(12), 2))
    keep = rng.random(len(pairs)) < 0.3
    g = Graph([str(i) for i in range(12)], [p for p, k in zip(pairs, keep) if k])
    assert detect_fast_greedy(g) == detect_fast_greedy(g)


def test_louvain_seed_reproducible():
    rng = np.random.default_rng(13)
    pairs = list(itertools.combinations(range(15), 2))
    keep = rng.random(len(pairs)) < 0.3
    g = Graph([str(i) for i in range(15)], [p for p, k in zip(pairs, keep) if k])
    assert detect_louvain(g, rng_seed=4) == detect_louvain(g, rng_seed=4)


def test_edgeless_graph_warns_and_returns_singletons():
    g = Graph(list("abc"), [])
    with pytest.warns(UserWarning):
        part = detect_fast_greedy(g)
    assert part.k == 3
    with pytest.warns(UserWarning):
        part = detect_louvain(g)
    assert part.k == 3


def test_isolated_nodes_stay_singletons():
    g = Graph(list("abcde"), [(0, 1), (1, 2), (0, 2)])
    part = detect_fast_greedy(g)
    # nodes 3, 4 have no edges; they must not be merged into the triangle
    assert part.labels[3] != part.labels[0]
    assert part.labels[4] != part.labels[0]
    assert part.labels[3] != part.labels[4]


def test_detect_dispatch():
    g = two_triangles()
    assert detect(g, "fastgreedy").k == 2
    assert detect(g, "louvain", rng_seed=1).k == 2
    with pytest.raises(InputError):
        detect(g, "walktrap")


def exhaustive_best_q(g):
    """Max modularity over all partitions of a tiny node set."""
    best = -np.inf
    n = g.n
    for labels in itertools.product(range(n), repeat=n):
        q = modularity(g, Partition(list(labels)))
        best = max(best, q)
    return best


def test_detectors_near_optimal_on_micro_graphs():
    # Smoke version of the exhaustive-optimality check (full version in
    # the acceptance suite): 20 random connected graphs on 5-6 nodes.
    rng = np.random.default_rng(21)
    hits_fg = hits_lv = total = 0
    while total < 20:
        n = int(rng.integers(5, 7))
        pairs = list(itertools.combinations(range(n), 2))
        keep = rng.random(len(pairs)) < 0.5
        edges = [p for p, k in zip(pairs, keep) if k]
        if not edges:
            continue
        g = Graph([str(i) for i in range(n)], edges)
        from virobust.graph import connected_components

        if len(connected_components(g)) > 1:
            continue
        total += 1
        best = exhaustive_best_q(g)
        if modularity(g, detect_fast_greedy(g)) >= best - 1e-9:
            hits_fg += 1
        if modularity(g, detect_louvain(g, rng_seed=0)) >= best - 1e-9:
            hits_lv += 1
    assert hits_fg >= 15
    assert hits_lv >= 15
