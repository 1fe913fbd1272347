"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: transport
cost via a general LP solver, components via union-find, micro-F1 via a
full confusion matrix, and an edit-log checker that recounts neighborhoods
from its own adjacency sets.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from homshift import Graph, NodeTable, two_class_sbm


@pytest.fixture(scope="session")
def sbm_pair():
    """2000-node half/half SBM near h=0.5, shared across expensive tests."""
    return two_class_sbm(2000, 10, 0.5, seed=7)


@pytest.fixture()
def tiny_pair():
    """5-path with alternating-ish labels; small enough to hand-check."""
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    t = NodeTable(np.array([0, 0, 1, 1, 1]), np.array([0, 1, 0, 1, 0]))
    return g, t


def lp_transport_cost(p_mass, q_mass) -> float:
    """Minimal transport cost between histograms, ground cost |i-j|/b.

    Solves the full LP over all b*b plan entries; only for small b.
    """
    p_mass = np.asarray(p_mass, dtype=np.float64)
    q_mass = np.asarray(q_mass, dtype=np.float64)
    b = p_mass.size
    cost = np.abs(np.subtract.outer(np.arange(b), np.arange(b))).ravel() / b
    a_eq = np.zeros((2 * b, b * b))
    for i in range(b):
        a_eq[i, i * b:(i + 1) * b] = 1.0        # row sums = p
        a_eq[b + i, i::b] = 1.0                 # col sums = q
    rhs = np.concatenate([p_mass, q_mass])
    res = linprog(cost, A_eq=a_eq, b_eq=rhs, bounds=(0, None), method="highs")
    assert res.success, res.message
    return float(res.fun)


def union_find_components(node_count: int, edges) -> np.ndarray:
    """Component labels (renumbered by smallest member) via union-find."""
    parent = list(range(node_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    roots = [find(x) for x in range(node_count)]
    relabel = {}
    out = np.empty(node_count, dtype=np.int64)
    for x, r in enumerate(roots):
        if r not in relabel:
            relabel[r] = len(relabel)
        out[x] = relabel[r]
    return out


def confusion_micro_f1(y_true, y_pred) -> float:
    """Micro-F1 from summed per-class TP/FP/FN counts."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    classes = np.union1d(y_true, y_pred)
    tp = fp = fn = 0
    for c in classes:
        tp += int(((y_pred == c) & (y_true == c)).sum())
        fp += int(((y_pred == c) & (y_true != c)).sum())
        fn += int(((y_pred != c) & (y_true == c)).sum())
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


class EditLogChecker:
    """Independent replay of an edit log with potential and simplicity checks.

    Maintains its own adjacency sets and recomputes each touched node's
    homophily by scanning its neighborhood, so agreement with the library's
    incremental bookkeeping is meaningful. Every `audit_every` records the
    running potential is re-derived completely from scratch.
    """

    def __init__(self, g: Graph, t: NodeTable, goals, audit_every: int = 500):
        self.adj = [set(nbrs) for nbrs in g.adjacency]
        self.labels = t.labels
        self.goal = {ng.node: ng.h_goal for ng in goals}
        self.touched_zero_direction = False
        self.zero_nodes = {ng.node for ng in goals if ng.direction == 0}
        self.audit_every = audit_every
        self.potentials = [self._full_potential()]

    def _node_h(self, v: int) -> float:
        nbrs = self.adj[v]
        same = sum(1 for w in nbrs if self.labels[w] == self.labels[v] and self.labels[v] >= 0)
        return same / len(nbrs)

    def _full_potential(self) -> float:
        return sum(abs(self._node_h(v) - hg) for v, hg in self.goal.items())

    def apply(self, records):
        pot = self.potentials[0]
        for idx, rec in enumerate(records, start=1):
            u, v = rec.u, rec.v
            assert u != v, f"record {rec.seq}: self loop"
            if u in self.zero_nodes or v in self.zero_nodes:
                self.touched_zero_direction = True
            affected = [w for w in (u, v) if w in self.goal]
            before = sum(abs(self._node_h(w) - self.goal[w]) for w in affected)
            if rec.op == "remove":
                assert v in self.adj[u], f"record {rec.seq}: edge missing"
                self.adj[u].discard(v)
                self.adj[v].discard(u)
            else:
                assert rec.op == "add", f"record {rec.seq}: bad op"
                assert v not in self.adj[u], f"record {rec.seq}: duplicate edge"
                self.adj[u].add(v)
                self.adj[v].add(u)
            after = sum(abs(self._node_h(w) - self.goal[w]) for w in affected)
            assert after < before - 1e-13, (
                f"record {rec.seq}: potential did not strictly decrease "
                f"({before} -> {after})")
            pot += after - before
            self.potentials.append(pot)
            if idx % self.audit_every == 0:
                full = self._full_potential()
                assert abs(full - pot) < 1e-9, "incremental potential drifted"
        final = self._full_potential()
        assert abs(final - pot) < 1e-9
        return self

    def edges(self) -> tuple:
        out = []
        for u, nbrs in enumerate(self.adj):
            out.extend((u, w) for w in nbrs if u < w)
        return tuple(sorted(out))
