"""Undirected simple graphs, their Laplacians and dense spectra."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from graphtest.errors import DataError

FAMILIES = ("erdos_renyi", "star", "cycle", "lattice", "complete", "empty")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..n-1``.

    Edges are stored once as ``(u, v)`` with ``u < v``, sorted.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n <= 0:
            raise DataError(f"node count must be positive, got {self.n}")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` integer array."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with node ``v`` renamed to ``perm[v]``."""
        return build_graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validate and normalize an edge list.

    Reversed duplicates collapse to one edge. Self-loops and out-of-range
    endpoints raise :class:`DataError`.
    """
    n = int(n)
    if n <= 0:
        raise DataError(f"node count must be positive, got {n}")
    seen = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise DataError(f"self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise DataError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        seen.add((u, v) if u < v else (v, u))
    return Graph(n, tuple(sorted(seen)))


def generate(kind: str, n: int | None = None, *, p: float | None = None,
             m: int | None = None, d: int | None = None,
             rng: np.random.Generator | None = None) -> Graph:
    """Build a graph from one of the supported families.

    ``erdos_renyi`` needs ``n``, ``p`` and ``rng``; ``lattice`` needs ``m`` and
    ``d`` (or ``n`` and ``d`` with ``n`` a perfect ``d``-th power). Lattice
    nodes are numbered in row-major order of their coordinates.
    """
    if kind == "lattice":
        m, d = _lattice_shape(n, m, d)
        return _lattice(m, d)
    if n is None or n < 1:
        raise DataError(f"{kind} graph needs a positive node count")
    if kind == "erdos_renyi":
        if p is None or not 0.0 < p < 1.0:
            raise DataError(f"edge probability must lie in (0, 1), got {p}")
        if rng is None:
            raise ValueError("erdos_renyi generation needs a random generator")
        # one uniform per pair, pairs in canonical (u<v) row-major order
        iu, iv = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < p
        return Graph(n, tuple(zip(iu[keep].tolist(), iv[keep].tolist())))
    if kind == "star":
        if n < 2:
            raise DataError("star graph needs n >= 2")
        return Graph(n, tuple((0, v) for v in range(1, n)))
    if kind == "cycle":
        if n < 3:
            raise DataError("cycle graph needs n >= 3")
        return build_graph(n, [(v, (v + 1) % n) for v in range(n)])
    if kind == "complete":
        return Graph(n, tuple(itertools.combinations(range(n), 2)))
    if kind == "empty":
        return Graph(n, ())
    raise DataError(f"unknown graph family {kind!r}; expected one of {FAMILIES}")


def _lattice_shape(n, m, d):
    if d is None or d < 1:
        raise DataError("lattice needs a dimension d >= 1")
    if m is None:
        if n is None:
            raise DataError("lattice needs m or n")
        m = round(n ** (1.0 / d))
        for cand in (m - 1, m, m + 1):
            if cand >= 1 and cand ** d == n:
                m = cand
                break
        else:
            raise DataError(f"lattice size {n} is not a perfect {d}-th power")
    elif n is not None and m ** d != n:
        raise DataError(f"lattice size {n} != {m}^{d}")
    if m < 1:
        raise DataError("lattice side must be positive")
    return int(m), int(d)


def _lattice(m: int, d: int) -> Graph:
    n = m ** d
    strides = [m ** (d - 1 - axis) for axis in range(d)]
    edges = []
    for coords in itertools.product(range(m), repeat=d):
        v = sum(c * s for c, s in zip(coords, strides))
        for axis in range(d):
            if coords[axis] + 1 < m:
                edges.append((v, v + strides[axis]))
    return build_graph(n, edges)


def laplacian(g: Graph) -> np.ndarray:
    """Dense combinatorial Laplacian ``D - A``."""
    L = np.zeros((g.n, g.n))
    if g.edges:
        e = g.edge_array()
        L[e[:, 0], e[:, 1]] = -1.0
        L[e[:, 1], e[:, 0]] = -1.0
        L[np.diag_indices(g.n)] = g.degrees()
    return L


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _labels_from_pairs(n, pairs) -> tuple[int, np.ndarray]:
    ds = _DisjointSet(n)
    for u, v in pairs:
        ds.union(int(u), int(v))
    roots = [ds.find(v) for v in range(n)]
    relabel = {}
    labels = np.empty(n, dtype=np.int64)
    for v, r in enumerate(roots):
        labels[v] = relabel.setdefault(r, len(relabel))
    return len(relabel), labels


def components(g: Graph) -> tuple[int, np.ndarray]:
    """Connected components as ``(count, labels)``.

    Labels are numbered in order of each component's smallest node.
    """
    return _labels_from_pairs(g.n, g.edges)


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of a Laplacian.

    ``eigenvalues`` are descending with numerical zeros clipped to exactly 0;
    column ``k`` of ``eigenvectors`` pairs with ``eigenvalues[k]``.
    ``distinct`` and ``multiplicity`` give the collapsed view, and
    ``group`` maps each eigenvalue index to its distinct-value slot.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    distinct: np.ndarray
    multiplicity: np.ndarray
    group: np.ndarray
    zero_multiplicity: int
    tol_zero: float = field(default=0.0)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda_min_nonzero(self) -> float:
        nz = self.distinct[self.distinct > 0]
        return float(nz.min()) if nz.size else math.inf


class EigenError(RuntimeError):
    pass


def spectrum(L: np.ndarray) -> Spectrum:
    """Full symmetric eigendecomposition of a graph Laplacian.

    Eigenvalues below ``n * eps * lambda_max`` are set to zero and their count
    must match the number of connected components read off the sparsity
    pattern of ``L``; a mismatch raises :class:`EigenError`.
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    if L.shape != (n, n):
        raise DataError(f"Laplacian must be square, got shape {L.shape}")
    if not np.allclose(L, L.T, atol=1e-12, rtol=0):
        raise DataError("Laplacian is not symmetric")
    try:
        vals, vecs = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"eigensolver failed: {exc}") from exc
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    lam_max = max(float(vals[0]), 0.0)
    tol = n * np.finfo(float).eps * lam_max
    vals[vals < tol] = 0.0
    n_zero = int(np.count_nonzero(vals == 0.0))

    iu, iv = np.nonzero(np.triu(L, k=1))
    k, _ = _labels_from_pairs(n, zip(iu, iv))
    if k != n_zero:
        raise EigenError(
            f"{n_zero} numerically-zero eigenvalues but {k} connected components")

    # collapse runs of (descending) eigenvalues closer than tol
    group = np.zeros(n, dtype=np.int64)
    starts = [0]
    for i in range(1, n):
        if vals[starts[-1]] - vals[i] >= tol or (vals[i] == 0.0) != (vals[i - 1] == 0.0):
            starts.append(i)
        group[i] = len(starts) - 1
    bounds = starts + [n]
    distinct = np.array([vals[a:b].mean() for a, b in zip(bounds[:-1], bounds[1:])])
    mult = np.diff(bounds).astype(np.int64)
    return Spectrum(vals, vecs, distinct, mult, group, n_zero, tol)


def graph_spectrum(g: Graph) -> Spectrum:
    return spectrum(laplacian(g))


def closed_form_eigenvalues(kind: str, n: int | None = None, *, m: int | None = None,
                            d: int | None = None) -> np.ndarray:
    """Analytic Laplacian eigenvalues, sorted descending."""
    if kind == "star":
        vals = np.concatenate([[float(n)], np.ones(n - 2), [0.0]])
    elif kind == "cycle":
        k = np.arange(1, n + 1)
        vals = 4.0 * np.sin(np.pi * k / n) ** 2
    elif kind == "lattice":
        m, d = _lattice_shape(n, m, d)
        path = 4.0 * np.sin(np.pi * np.arange(m) / (2 * m)) ** 2
        vals = np.zeros(1)
        for _ in range(d):
            vals = (vals[:, None] + path[None, :]).ravel()
    elif kind == "complete":
        vals = np.concatenate([np.full(n - 1, float(n)), [0.0]])
    elif kind == "empty":
        vals = np.zeros(n)
    else:
        raise DataError(f"no closed form for family {kind!r}")
    return np.sort(vals)[::-1]
