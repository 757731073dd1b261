"""k-nearest-neighbor graphs over point clouds and their signal operators.

Each point is connected to its k Euclidean nearest neighbors (ties broken by
lower point index) and the edge set is symmetrized by union, so no node is
isolated. Edge weights follow a Gaussian kernel

    W[i, j] = exp(-||p_i - p_j||^2 / sigma^2)

which keeps weights in (0, 1]. The graph exposes the degree vector D, the
combinatorial Laplacian L = D - W (positive semi-definite), and the
row-stochastic transition matrix A = D^-1 W.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .io import PointCloud, format_number

# exp(-x) underflows to exactly 0 near x = 745; clamp so stored weights stay
# positive and every degree is nonzero even for extreme outlier edges.
_MAX_KERNEL_EXPONENT = 700.0


@dataclass(eq=False)
class NeighborhoodGraph:
    """Symmetrized kNN graph: sparse weights, degrees, and derived operators.

    Immutable by convention after construction; the derived Laplacian and
    transition matrices are cached on first use.
    """

    n: int
    k: int
    sigma: float
    adjacency: sp.csr_matrix = field(repr=False)
    degrees: np.ndarray = field(repr=False)

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        """Combinatorial Laplacian L = D - W."""
        return (sp.diags(self.degrees) - self.adjacency).tocsr()

    @cached_property
    def transition(self) -> sp.csr_matrix:
        """Row-stochastic averaging operator A = D^-1 W."""
        return (sp.diags(1.0 / self.degrees) @ self.adjacency).tocsr()

    @property
    def num_edges(self) -> int:
        """Undirected edge count."""
        return self.adjacency.nnz // 2


def _knn_select(points: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices and distances of each point's k nearest neighbors.

    Candidates are ordered by (distance, index), so equidistant neighbors
    resolve to the lowest index. The query window grows until any tie at the
    k-th position is fully covered, which keeps the selection deterministic.
    """
    n = len(points)
    tree = cKDTree(points)
    kq = min(n, k + 2)
    while True:
        dist, nbr = tree.query(points, k=kq)
        order = np.argsort(nbr, axis=1, kind="stable")
        dist = np.take_along_axis(dist, order, axis=1)
        nbr = np.take_along_axis(nbr, order, axis=1)
        order = np.argsort(dist, axis=1, kind="stable")
        dist = np.take_along_axis(dist, order, axis=1)
        nbr = np.take_along_axis(nbr, order, axis=1)
        # Drop the self entry; under heavy duplication self may be absent
        # from the window, in which case the farthest candidate goes instead.
        self_mask = nbr == np.arange(n)[:, None]
        keep = ~self_mask
        for i in np.nonzero(~self_mask.any(axis=1))[0]:
            keep[i, -1] = False
        dist = dist[keep].reshape(n, kq - 1)
        nbr = nbr[keep].reshape(n, kq - 1)
        boundary_tied = kq - 1 > k and np.any(dist[:, k - 1] == dist[:, k])
        if kq >= n or not boundary_tied:
            return nbr[:, :k], dist[:, :k]
        kq = min(n, 2 * kq)


def build_knn_graph(cloud: PointCloud, k: int, sigma: float | None = None) -> NeighborhoodGraph:
    """Build the union-symmetrized kNN graph of a cloud.

    Parameters
    ----------
    cloud : PointCloud
    k : int
        Neighbors per point, 1 <= k <= n - 1.
    sigma : float, optional
        Gaussian kernel width. ``None`` selects it automatically as the mean
        Euclidean length of the retained edges, which spreads weights over
        (0, 1) regardless of cloud scale.
    """
    n = cloud.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= n-1 = {n - 1}, got {k}")
    if sigma is not None and not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")

    points = cloud.points
    nbr, _ = _knn_select(points, k)

    # Union symmetrization on undirected index pairs.
    rows = np.repeat(np.arange(n), k)
    cols = nbr.ravel()
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    key = np.unique(lo.astype(np.int64) * n + hi.astype(np.int64))
    lo, hi = key // n, key % n

    lengths = np.linalg.norm(points[lo] - points[hi], axis=1)
    if sigma is None:
        sigma = float(lengths.mean())
        if sigma == 0.0:
            # Every retained edge joins coincident points; any width gives
            # weight exp(0) = 1, so pick a neutral one.
            sigma = 1.0

    weights = np.exp(-np.minimum((lengths / sigma) ** 2, _MAX_KERNEL_EXPONENT))
    adjacency = sp.csr_matrix(
        (np.concatenate([weights, weights]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
        shape=(n, n),
    )
    degrees = np.asarray(adjacency.sum(axis=1)).ravel()
    return NeighborhoodGraph(n=n, k=k, sigma=sigma, adjacency=adjacency, degrees=degrees)


def _check_signal(graph: NeighborhoodGraph, signal) -> np.ndarray:
    sig = np.asarray(signal, dtype=np.float64)
    if sig.shape != (graph.n,):
        raise ValueError(f"signal length {sig.shape} does not match node count {graph.n}")
    return sig


def transition_apply(graph: NeighborhoodGraph, signal) -> np.ndarray:
    """Weighted neighborhood average of a graph signal, (A x)_i."""
    return graph.transition @ _check_signal(graph, signal)


def laplacian_apply(graph: NeighborhoodGraph, signal) -> np.ndarray:
    """Second difference of a graph signal, (L x)_i."""
    return graph.laplacian @ _check_signal(graph, signal)


def edge_list_text(graph: NeighborhoodGraph) -> str:
    """Debug dump: one ``i j w`` line per undirected edge, sorted by (i, j)."""
    coo = sp.triu(graph.adjacency, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[t]} {coo.col[t]} {format_number(coo.data[t])}"
        for t in order
    ]
    return "\n".join(lines) + ("\n" if lines else "")
