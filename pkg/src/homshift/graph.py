"""Immutable simple-graph containers, file IO, and dataset preprocessing ops."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

# Marker for a missing label or sensitive attribute in a NodeTable.
INVALID = -1


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on the dense node set 0..node_count-1.

    Edges are stored canonically as (u, v) with u < v, sorted ascending, so
    two graphs with equal edge sets compare equal and serialize identically.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]
    degrees: np.ndarray

    @staticmethod
    def from_edges(node_count: int, edges) -> "Graph":
        """Build a graph from an iterable of (u, v) pairs.

        Duplicate and reversed-duplicate pairs collapse to one edge.
        Self-loops and out-of-range ids are rejected.
        """
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop ({u}, {v}) not allowed")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            canon.add((u, v) if u < v else (v, u))
        edge_tuple = tuple(sorted(canon))
        neighbors: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in edge_tuple:
            neighbors[u].append(v)
            neighbors[v].append(u)
        adjacency = tuple(tuple(sorted(ns)) for ns in neighbors)
        degrees = np.array([len(ns) for ns in adjacency], dtype=np.int64)
        degrees.flags.writeable = False
        return Graph(node_count, edge_tuple, adjacency, degrees)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int array; (0, 2)-shaped when there are none."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u] if 0 <= u < self.node_count else False


@dataclass(frozen=True)
class NodeTable:
    """Per-node class label, sensitive attribute, and optional features.

    Missing labels/attributes carry the INVALID marker instead of being
    dropped, so the table stays index-aligned with its graph.
    """

    labels: np.ndarray
    sensitive: np.ndarray
    features: np.ndarray | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        sensitive = np.asarray(self.sensitive, dtype=np.int64)
        if labels.shape != sensitive.shape or labels.ndim != 1:
            raise ValueError("labels and sensitive must be equal-length 1-D arrays")
        features = self.features
        if features is not None:
            features = np.asarray(features, dtype=np.float64)
            if features.ndim != 2 or features.shape[0] != labels.shape[0]:
                raise ValueError("features must be a (n, f) array aligned with labels")
            features.flags.writeable = False
        labels.flags.writeable = False
        sensitive.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sensitive", sensitive)
        object.__setattr__(self, "features", features)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def take(self, ids: np.ndarray) -> "NodeTable":
        """Row subset in the given id order."""
        feats = None if self.features is None else self.features[ids].copy()
        return NodeTable(self.labels[ids].copy(), self.sensitive[ids].copy(), feats)


def load_edge_list(path, one_indexed: bool = False) -> Graph:
    """Parse a whitespace- or comma-separated edge list into a Graph.

    Lines starting with '#' are comments. Duplicate lines and reversed
    duplicates collapse; self-loops are dropped, with drop counts reported
    through the module logger.
    """
    pairs: set[tuple[int, int]] = set()
    self_loops = 0
    duplicates = 0
    max_id = -1
    n_lines = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            n_lines += 1
            tokens = line.replace(",", " ").split()
            if len(tokens) != 2:
                raise ValueError(f"{path}: line {lineno}: expected two node ids, got {raw!r}")
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-integer node id in {raw!r}") from None
            if one_indexed:
                u -= 1
                v -= 1
            if u < 0 or v < 0:
                raise ValueError(f"{path}: line {lineno}: negative node id after adjustment")
            max_id = max(max_id, u, v)
            if u == v:
                self_loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            if key in pairs:
                duplicates += 1
            else:
                pairs.add(key)
    if n_lines == 0:
        raise ValueError(f"{path}: empty edge list")
    if self_loops or duplicates:
        logger.info(
            "%s: dropped %d self-loop(s), collapsed %d duplicate edge line(s)",
            path, self_loops, duplicates,
        )
    return Graph.from_edges(max_id + 1, pairs)


def save_edge_list(g: Graph, path) -> None:
    """Write the canonical sorted edge list, `u v` with u < v, LF endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def load_node_table(path) -> NodeTable:
    """Read a node table CSV with header node_id,label,sensitive[,f0,f1,...].

    node_id values must cover 0..n-1 exactly. Empty label/sensitive fields
    become the INVALID marker; non-integer values in those columns are errors.
    Any columns past the third are parsed as float features.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty node table") from None
        header = [h.strip() for h in header]
        if header[:3] != ["node_id", "label", "sensitive"]:
            raise ValueError(
                f"{path}: header must start with node_id,label,sensitive; got {header[:3]}"
            )
        n_feat = len(header) - 3
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            rows.append((lineno, row))
    n = len(rows)
    if n == 0:
        raise ValueError(f"{path}: node table has no rows")
    labels = np.full(n, INVALID, dtype=np.int64)
    sensitive = np.full(n, INVALID, dtype=np.int64)
    features = np.zeros((n, n_feat), dtype=np.float64) if n_feat else None
    seen = np.zeros(n, dtype=bool)
    for lineno, row in rows:
        try:
            node_id = int(row[0])
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-integer node_id {row[0]!r}") from None
        if not (0 <= node_id < n):
            raise ValueError(f"{path}: line {lineno}: node_id {node_id} outside 0..{n - 1} (gap or duplicate elsewhere)")
        if seen[node_id]:
            raise ValueError(f"{path}: line {lineno}: duplicate node_id {node_id}")
        seen[node_id] = True
        for col, out in ((1, labels), (2, sensitive)):
            cell = row[col].strip()
            if cell == "":
                continue  # stays INVALID
            try:
                out[node_id] = int(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: non-integer {header[col]} value {cell!r}"
                ) from None
        if features is not None:
            try:
                features[node_id] = [float(c) for c in row[3:]]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric feature value") from None
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise ValueError(f"{path}: node_id {missing} missing (ids must cover 0..{n - 1})")
    return NodeTable(labels, sensitive, features)


def save_node_table(t: NodeTable, path) -> None:
    """Inverse of load_node_table; INVALID values are written as empty fields."""
    n_feat = 0 if t.features is None else t.features.shape[1]
    header = ["node_id", "label", "sensitive"] + [f"f{i}" for i in range(n_feat)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(len(t)):
            lab = "" if t.labels[i] == INVALID else str(int(t.labels[i]))
            sen = "" if t.sensitive[i] == INVALID else str(int(t.sensitive[i]))
            cells = [str(i), lab, sen]
            if t.features is not None:
                cells += [repr(float(x)) for x in t.features[i]]
            fh.write(",".join(cells) + "\n")


def induced_subgraph(g: Graph, t: NodeTable, keep: np.ndarray) -> tuple[Graph, NodeTable, np.ndarray]:
    """Subgraph on `keep` (sorted original ids), compacted to 0..len(keep)-1.

    Returns (graph, table, node_map) with node_map[new_id] == original_id.
    """
    keep = np.asarray(keep, dtype=np.int64)
    new_of_old = np.full(g.node_count, -1, dtype=np.int64)
    new_of_old[keep] = np.arange(keep.shape[0])
    edges = []
    for u, v in g.edges:
        nu, nv = new_of_old[u], new_of_old[v]
        if nu >= 0 and nv >= 0:
            edges.append((int(nu), int(nv)))
    sub = Graph.from_edges(int(keep.shape[0]), edges)
    return sub, t.take(keep), keep.copy()


def connected_components(g: Graph) -> np.ndarray:
    """Component id per node; ids are ordered by first (smallest) member."""
    comp = np.full(g.node_count, -1, dtype=np.int64)
    next_id = 0
    for start in range(g.node_count):
        if comp[start] != -1:
            continue
        comp[start] = next_id
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for nb in g.adjacency[node]:
                if comp[nb] == -1:
                    comp[nb] = next_id
                    frontier.append(nb)
        next_id += 1
    return comp


def largest_connected_component(g: Graph, t: NodeTable) -> tuple[Graph, NodeTable, np.ndarray]:
    """Induced subgraph on the largest component, ids compacted.

    Size ties break toward the component containing the smallest original
    node id. Returns (graph, table, node_map), node_map[new] == old.
    """
    if g.node_count == 0:
        raise ValueError("graph has no nodes")
    comp = connected_components(g)
    sizes = np.bincount(comp)
    # component ids are assigned in order of smallest member, so argmax's
    # first-maximum rule implements the smallest-min-id tie break
    target = int(np.argmax(sizes))
    keep = np.flatnonzero(comp == target)
    return induced_subgraph(g, t, keep)


def filter_top_classes(
    g: Graph,
    t: NodeTable,
    k: int,
    exclude: frozenset[int] | set[int] = frozenset(),
) -> tuple[Graph, NodeTable, np.ndarray]:
    """Keep the k most frequent classes (minus `exclude`), then take the LCC.

    Nodes survive the filter only if their class ranks in the top k AND their
    sensitive attribute is valid. Class ids are re-mapped densely by
    descending frequency (frequency ties rank the lower original id first);
    sensitive ids are compacted preserving ascending order. Returns
    (graph, table, node_map) with node_map[new] == original id in `g`.
    """
    if len(t) != g.node_count:
        raise ValueError("node table does not match graph size")
    if k < 1:
        raise ValueError("k must be positive")
    valid_label = t.labels >= 0
    candidate = valid_label & ~np.isin(t.labels, list(exclude))
    classes, counts = np.unique(t.labels[candidate], return_counts=True)
    if classes.shape[0] < k:
        raise ValueError(f"only {classes.shape[0]} classes available after exclusion, need {k}")
    # rank by descending count, ties toward the lower original class id
    order = np.lexsort((classes, -counts))
    top = classes[order[:k]]
    rank_of_class = {int(c): r for r, c in enumerate(top)}
    keep_mask = np.isin(t.labels, top) & (t.sensitive >= 0)
    keep = np.flatnonzero(keep_mask)
    if keep.shape[0] == 0:
        raise ValueError("no nodes survive the class/sensitive filter")
    sub_g, sub_t, node_map = induced_subgraph(g, t, keep)
    sub_g, sub_t, lcc_map = largest_connected_component(sub_g, sub_t)
    node_map = node_map[lcc_map]
    new_labels = np.array([rank_of_class[int(c)] for c in sub_t.labels], dtype=np.int64)
    # the LCC may have dropped a class entirely; re-compact preserving rank order
    present = np.unique(new_labels)
    if present.shape[0] != k:
        dense = {int(c): i for i, c in enumerate(present)}
        new_labels = np.array([dense[int(c)] for c in new_labels], dtype=np.int64)
    sens_present = np.unique(sub_t.sensitive)
    sens_dense = {int(s): i for i, s in enumerate(sens_present)}
    new_sens = np.array([sens_dense[int(s)] for s in sub_t.sensitive], dtype=np.int64)
    return sub_g, NodeTable(new_labels, new_sens, sub_t.features), node_map
