"""Directed weighted graphs and their random-walk transition matrices."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import (
    DenseOnly,
    DimensionMismatch,
    EmptyGraph,
    GraphParseError,
    NegativeWeight,
    SingleNodeDangling,
)

#: Graphs up to this many nodes use dense matrices; larger ones use CSR.
DENSE_LIMIT = 2048


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted directed adjacency with dangling nodes already repaired.

    ``W`` is stored as a CSR array with merged duplicate arcs. ``node_labels``
    maps dense index -> external identifier (``None`` when the input already
    used dense integer ids).
    """

    W: sp.csr_array
    node_labels: tuple | None = None
    repaired: tuple[int, ...] = ()
    label_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        labels = self.node_labels
        if labels is None:
            index = {i: i for i in range(self.n)}
        else:
            index = {lab: i for i, lab in enumerate(labels)}
        object.__setattr__(self, "label_index", index)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @cached_property
    def out_weight(self) -> np.ndarray:
        d = np.asarray(self.W.sum(axis=1)).ravel()
        d.setflags(write=False)
        return d

    @property
    def degrees(self) -> np.ndarray:
        return self.out_weight

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        coo = self.W.tocoo()
        return [(int(i), int(j), float(w)) for i, j, w in zip(coo.row, coo.col, coo.data)]

    @cached_property
    def is_symmetric(self) -> bool:
        diff = self.W - self.W.T
        return diff.count_nonzero() == 0

    @cached_property
    def transition(self):
        P = sp.csr_array(sp.diags_array(1.0 / self.out_weight) @ self.W)
        if self.n <= DENSE_LIMIT:
            P = P.toarray()
            P.setflags(write=False)
        return P

    def label(self, i: int) -> Hashable:
        return i if self.node_labels is None else self.node_labels[i]

    def index_of(self, label) -> int:
        try:
            return self.label_index[label]
        except KeyError:
            # CLI configs arrive as strings even when labels are ints
            for key, idx in self.label_index.items():
                if str(key) == str(label):
                    return idx
            raise KeyError(f"unknown node {label!r}") from None

    def dense_adjacency(self) -> np.ndarray:
        return self.W.toarray()


def build_graph(
    edge_list: Iterable[Sequence],
    directed: bool = True,
    n: int | None = None,
) -> Graph:
    """Build a repaired :class:`Graph` from ``(src, dst[, weight])`` tuples.

    Non-negative integer node ids are used as dense indices directly (``n``
    may extend the node set past the largest id). Any other ids are mapped to
    indices in order of first appearance. Undirected edges become two arcs of
    equal weight; duplicate arcs are merged by summing.

    Every node without outgoing weight gets arcs of weight ``1/(n-1)`` to all
    other nodes.
    """
    triples = []
    for e in edge_list:
        if len(e) == 2:
            src, dst = e
            w = 1.0
        elif len(e) == 3:
            src, dst, w = e
        else:
            raise GraphParseError(f"edge must be (src, dst[, weight]), got {e!r}")
        w = float(w)
        if not np.isfinite(w):
            raise GraphParseError(f"non-finite weight on edge {src!r}->{dst!r}")
        if w < 0:
            raise NegativeWeight(f"edge {src!r}->{dst!r} has weight {w}")
        triples.append((src, dst, w))
    if not triples:
        raise EmptyGraph("graph has no edges")

    ids = [t[0] for t in triples] + [t[1] for t in triples]
    integer_ids = all(
        isinstance(x, (int, np.integer)) and not isinstance(x, bool) and x >= 0 for x in ids
    )
    if integer_ids:
        labels = None
        size = max(int(x) for x in ids) + 1
        if n is not None:
            if n < size:
                raise DimensionMismatch(f"n={n} but node id {size - 1} present")
            size = n
        rows = np.array([int(t[0]) for t in triples], dtype=np.int64)
        cols = np.array([int(t[1]) for t in triples], dtype=np.int64)
    else:
        order: dict = {}
        for src, dst, _ in triples:
            order.setdefault(src, len(order))
            order.setdefault(dst, len(order))
        labels = tuple(order)
        size = len(labels)
        if n is not None and n != size:
            raise DimensionMismatch(f"n={n} but {size} distinct labels")
        rows = np.array([order[t[0]] for t in triples], dtype=np.int64)
        cols = np.array([order[t[1]] for t in triples], dtype=np.int64)
    weights = np.array([t[2] for t in triples], dtype=float)

    if directed:
        W = sp.coo_array((weights, (rows, cols)), shape=(size, size)).tocsr()
        W.sum_duplicates()
    else:
        # merge on canonical (lo, hi) pairs first so W == W.T holds bit for bit
        lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
        U = sp.coo_array((weights, (lo, hi)), shape=(size, size)).tocsr()
        U.sum_duplicates()
        diag = sp.diags_array(U.diagonal())
        off = sp.triu(U, k=1, format="csr")
        W = sp.csr_array(off + off.T + diag)
    W.eliminate_zeros()

    d = np.asarray(W.sum(axis=1)).ravel()
    dangling = np.flatnonzero(d <= 0)
    if len(dangling):
        if size == 1:
            raise SingleNodeDangling("a single node without a self-loop cannot be repaired")
        fill_r, fill_c = [], []
        for i in dangling:
            others = np.delete(np.arange(size), i)
            fill_r.append(np.full(size - 1, i))
            fill_c.append(others)
        fill_r = np.concatenate(fill_r)
        fill_c = np.concatenate(fill_c)
        fill = sp.coo_array(
            (np.full(len(fill_r), 1.0 / (size - 1)), (fill_r, fill_c)), shape=(size, size)
        )
        W = (W + fill).tocsr()
        W.sum_duplicates()

    W.sort_indices()
    return Graph(W=W, node_labels=labels, repaired=tuple(int(i) for i in dangling))


def read_edge_list(source, undirected: bool = False) -> Graph:
    """Parse a whitespace-separated ``src dst [weight]`` edge list.

    ``source`` is a path or a text stream. Lines starting with ``#`` and blank
    lines are skipped. Node ids are kept as strings.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return read_edge_list(fh, undirected=undirected)
    edges = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphParseError(f"line {lineno}: expected 'src dst [weight]', got {line!r}")
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphParseError(f"line {lineno}: bad weight {parts[2]!r}") from None
        edges.append((parts[0], parts[1], w))
    return build_graph(edges, directed=not undirected)


def parse_edge_list(text: str, undirected: bool = False) -> Graph:
    return read_edge_list(io.StringIO(text), undirected=undirected)


def check_weak_connectivity(g: Graph) -> bool:
    ncomp, _ = connected_components(g.W, directed=True, connection="weak")
    return ncomp == 1


def transition_matrix(g: Graph):
    """Row-stochastic ``P = D^-1 W``; dense up to :data:`DENSE_LIMIT` nodes, CSR beyond."""
    return g.transition


def dense_transition(g: Graph) -> np.ndarray:
    P = transition_matrix(g)
    return P if isinstance(P, np.ndarray) else P.toarray()


def augmented_matrix(g: Graph, m) -> np.ndarray:
    """Dense walk-with-restart matrix ``A P + (I - A) 1 v^T``."""
    if len(m.alpha) != g.n or len(m.v) != g.n:
        raise DimensionMismatch(f"model has {len(m.alpha)} nodes, graph has {g.n}")
    if g.n > DENSE_LIMIT:
        raise DenseOnly(f"augmented matrix is dense; n={g.n} exceeds {DENSE_LIMIT}")
    P = dense_transition(g)
    alpha = np.asarray(m.alpha)
    return alpha[:, None] * P + np.outer(1.0 - alpha, m.v)


def apply_transition_left(P, x: np.ndarray) -> np.ndarray:
    """Row vector times ``P`` for dense or sparse ``P``."""
    if isinstance(P, np.ndarray):
        return x @ P
    return P.T @ x
