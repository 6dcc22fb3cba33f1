"""Modularity and the two modularity-optimizing detectors.

Fast-greedy is the Clauset-Newman-Moore hierarchical agglomeration with a
lazy max-heap over merge gains; Louvain alternates seeded local moves with
graph aggregation. Both return the final Partition only.
"""

from __future__ import annotations

import heapq
import warnings

import numpy as np

from .errors import InputError
from .graph import Graph
from .partitions import Partition


def modularity(g: Graph, c: Partition) -> float:
    """Newman-Girvan Q = sum_k [ e_k/m - (d_k/2m)^2 ]."""
    if g.m == 0:
        raise InputError("modularity is undefined on a graph with no edges")
    if c.n != g.n:
        raise InputError(f"partition covers {c.n} nodes, graph has {g.n}")
    labels = c.labels
    edges = np.asarray(g.edges, dtype=np.int64)
    intra = labels[edges[:, 0]] == labels[edges[:, 1]]
    e_k = np.bincount(labels[edges[:, 0]][intra], minlength=c.k).astype(float)
    degs = np.array([len(a) for a in g.adjacency], dtype=float)
    d_k = np.bincount(labels, weights=degs, minlength=c.k)
    m = g.m
    return float((e_k / m - (d_k / (2.0 * m)) ** 2).sum())


def singleton_partition(g: Graph) -> Partition:
    return Partition(np.arange(g.n))


def _edgeless_fallback(g: Graph) -> Partition:
    warnings.warn("graph has no edges; returning all-singletons partition")
    return singleton_partition(g)


def detect_fast_greedy(g: Graph) -> Partition:
    """CNM agglomeration; returns the partition at maximal modularity.

    Deterministic: merge ties broken by the smallest (i, j) community
    label pair. Isolated nodes stay singletons.
    """
    if g.m == 0:
        return _edgeless_fallback(g)
    n, m = g.n, g.m
    inv2m = 1.0 / (2.0 * m)
    a = [len(adj) * inv2m for adj in g.adjacency]  # a_i = d_i / 2m
    # e[i][j]: fraction of edges between communities i and j (e_ij = n_ij/m)
    e = [dict() for _ in range(n)]
    for u, v in g.edges:
        e[u][v] = e[u].get(v, 0.0) + 1.0 / m
        e[v][u] = e[v].get(u, 0.0) + 1.0 / m
    alive = [True] * n
    stamp = [0] * n  # bump on merge to invalidate stale heap entries
    heap = []
    for i in range(n):
        for j, eij in e[i].items():
            if i < j:
                dq = eij - 2.0 * a[i] * a[j]
                heapq.heappush(heap, (-dq, i, j, 0, 0))

    parent = list(range(n))
    q = 0.0 - sum(ai * ai for ai in a)  # all-singletons Q (no intra edges)
    best_q = q
    merges_at_best = 0
    merge_log: list[tuple[int, int]] = []

    while heap:
        neg_dq, i, j, si, sj = heapq.heappop(heap)
        if not alive[i] or not alive[j] or stamp[i] != si or stamp[j] != sj:
            continue
        dq = -neg_dq
        # Merge j into i (i < j by construction), keeping the smaller label.
        merge_log.append((i, j))
        q += dq
        # Update community i's neighbor map.
        del e[i][j]
        del e[j][i]
        for k, ejk in e[j].items():
            if k == i:
                continue
            e[i][k] = e[i].get(k, 0.0) + ejk
            e[k][i] = e[i][k]
            del e[k][j]
        e[j].clear()
        alive[j] = False
        parent[j] = i
        a[i] += a[j]
        stamp[i] += 1
        si = stamp[i]
        for k, eik in e[i].items():
            dq_new = eik - 2.0 * a[i] * a[k]
            lo, hi = (i, k) if i < k else (k, i)
            heapq.heappush(
                heap,
                (-dq_new, lo, hi, stamp[lo], stamp[hi]),
            )
        if q > best_q + 1e-15:
            best_q = q
            merges_at_best = len(merge_log)

    # Replay merges up to the best step with union-find.
    root = list(range(n))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for i, j in merge_log[:merges_at_best]:
        root[find(j)] = find(i)
    return Partition([find(x) for x in range(n)])


def detect_louvain(g: Graph, rng_seed: int = 0) -> Partition:
    """Louvain multi-level modularity optimization.

    Node sweep order within each local-move pass is a seeded random
    permutation; a node keeps its community on a tied gain, otherwise
    ties go to the smallest candidate community label.
    """
    if g.m == 0:
        return _edgeless_fallback(g)
    rng = np.random.default_rng(rng_seed)
    n = g.n
    # Weighted adjacency for the aggregated graph; self-weight counts the
    # internal edge weight twice (loop convention for degree bookkeeping).
    adj = [dict() for _ in range(n)]
    for u, v in g.edges:
        adj[u][v] = adj[u].get(v, 0.0) + 1.0
        adj[v][u] = adj[v].get(u, 0.0) + 1.0
    self_w = [0.0] * n
    node_to_orig: list[list[int]] = [[i] for i in range(n)]
    two_m = 2.0 * g.m
    final_labels = np.zeros(n, dtype=np.int64)

    improved_any = True
    while improved_any:
        size = len(adj)
        comm = list(range(size))
        k_i = [sum(adj[i].values()) + self_w[i] for i in range(size)]
        sigma_tot = k_i[:]  # total degree per community
        improved_any = False
        moved = True
        while moved:
            moved = False
            order = rng.permutation(size)
            for i in order:
                ci = comm[i]
                # Links from i to each neighboring community.
                links = {}
                for j, w in adj[i].items():
                    cj = comm[j]
                    links[cj] = links.get(cj, 0.0) + w
                sigma_tot[ci] -= k_i[i]
                base = links.get(ci, 0.0) - k_i[i] * sigma_tot[ci] / two_m
                best_c, best_gain = ci, base
                # Sorted sweep makes the smallest label win ties between
                # candidates; a tie against staying keeps the current one.
                for cj in sorted(links):
                    if cj == ci:
                        continue
                    gain = links[cj] - k_i[i] * sigma_tot[cj] / two_m
                    if gain > best_gain + 1e-12:
                        best_c, best_gain = cj, gain
                sigma_tot[best_c] += k_i[i]
                if best_c != ci:
                    comm[i] = best_c
                    moved = True
                    improved_any = True
        # Compact community labels.
        label_map = {}
        for i in range(size):
            label_map.setdefault(comm[i], len(label_map))
        comm = [label_map[c] for c in comm]
        n_comm = len(label_map)
        for i in range(size):
            for orig in node_to_orig[i]:
                final_labels[orig] = comm[i]
        if not improved_any or n_comm == size:
            break
        # Aggregate into super-nodes.
        new_adj = [dict() for _ in range(n_comm)]
        new_self = [0.0] * n_comm
        new_orig: list[list[int]] = [[] for _ in range(n_comm)]
        for i in range(size):
            ci = comm[i]
            new_orig[ci].extend(node_to_orig[i])
            new_self[ci] += self_w[i]
            for j, w in adj[i].items():
                cj = comm[j]
                if ci == cj:
                    new_self[ci] += w  # both endpoints seen -> counted twice
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
        adj = new_adj
        self_w = new_self
        node_to_orig = new_orig
    return Partition(final_labels)


def detect(g: Graph, method: str, rng_seed: int = 0) -> Partition:
    """Dispatch on method name: 'fastgreedy' or 'louvain'."""
    if method == "fastgreedy":
        return detect_fast_greedy(g)
    if method == "louvain":
        return detect_louvain(g, rng_seed)
    raise InputError(f"unknown detection method {method!r}")
