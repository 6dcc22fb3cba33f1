"""Undirected simple graph with string node identifiers and dense indices.

All downstream math works on integer indices 0..n-1; the original string
identifiers are kept only for ingestion and reporting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class LoadReport:
    """What was discarded while ingesting an edge list."""

    duplicates: int = 0
    self_loops: int = 0


class Graph:
    """Immutable undirected simple graph.

    Parameters
    ----------
    node_ids : sequence of str
        Node identifiers in index order.
    edges : iterable of (int, int)
        Index pairs; stored canonically with u < v. Self-loops and
        duplicates are rejected here (ingestion collapses them earlier).
    """

    __slots__ = ("node_ids", "edges", "adjacency", "_index", "load_report")

    def __init__(self, node_ids, edges, load_report=None):
        ids = list(node_ids)
        index = {v: i for i, v in enumerate(ids)}
        if len(index) != len(ids):
            raise InputError("duplicate node identifiers")
        canon = set()
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop on node index {u}")
            if not (0 <= u < len(ids) and 0 <= v < len(ids)):
                raise InputError(f"edge ({u},{v}) out of range")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise InputError(f"duplicate edge {e}")
            canon.add(e)
        edge_list = sorted(canon)
        adjacency = [[] for _ in ids]
        for u, v in edge_list:
            adjacency[u].append(v)
            adjacency[v].append(u)
        self.node_ids = tuple(ids)
        self.edges = tuple(edge_list)
        self.adjacency = tuple(tuple(a) for a in adjacency)
        self._index = index
        self.load_report = load_report

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def index_of(self, node_id: str) -> int:
        return self._index[node_id]

    def has_edge(self, u: int, v: int) -> bool:
        # Callers doing bulk membership tests should build a set from
        # .edges instead of looping over this.
        return v in self.adjacency[u]

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.node_ids == other.node_ids
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.node_ids, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def degree_sequence(g: Graph) -> np.ndarray:
    """Per-node degrees as an integer vector; the sum is always even."""
    return np.array([len(a) for a in g.adjacency], dtype=np.int64)


def connected_components(g: Graph) -> list[set[int]]:
    """Maximal connected node sets; isolated nodes come back as singletons."""
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.add(v)
                    stack.append(v)
        comps.append(comp)
    return comps


def load_edge_list(path, delimiter=None) -> Graph:
    """Read a whitespace/tab-delimited edge list into a Graph.

    Lines starting with ``#`` are ignored. Duplicate edges and self-loops
    are dropped, counted, and reported via ``Graph.load_report``. Node
    order is first appearance.
    """
    ids: list[str] = []
    index: dict[str, int] = {}
    edge_set: set[tuple[int, int]] = set()
    duplicates = 0
    self_loops = 0
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read edge list {path!r}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split(delimiter)
        if len(tokens) != 2:
            raise InputError(
                f"{path}:{lineno}: expected 2 node tokens, got {len(tokens)}"
            )
        pair = []
        for tok in tokens:
            if tok not in index:
                index[tok] = len(ids)
                ids.append(tok)
            pair.append(index[tok])
        u, v = pair
        if u == v:
            self_loops += 1
            continue
        e = (u, v) if u < v else (v, u)
        if e in edge_set:
            duplicates += 1
            continue
        edge_set.add(e)
    report = LoadReport(duplicates=duplicates, self_loops=self_loops)
    return Graph(ids, edge_set, load_report=report)


def serialize_edge_list(g: Graph) -> str:
    """Canonical edge-list text: sorted u<v index pairs, original IDs."""
    lines = [f"{g.node_ids[u]}\t{g.node_ids[v]}" for u, v in g.edges]
    return "\n".join(lines) + ("\n" if lines else "")


def graph_summary(g: Graph) -> dict:
    """JSON-ready summary: {n, m, degree_min, degree_max, components}."""
    degs = degree_sequence(g)
    return {
        "n": g.n,
        "m": g.m,
        "degree_min": int(degs.min()) if g.n else 0,
        "degree_max": int(degs.max()) if g.n else 0,
        "components": len(connected_components(g)),
    }


def summary_json(g: Graph) -> str:
    return json.dumps(graph_summary(g), sort_keys=True)
