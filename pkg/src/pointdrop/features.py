"""Fourteen per-point geometric features from graph-signal filtering.

Feature columns, in fixed order:

  f1       local variation v_i = ||p_i - pbar_i||
  f2..f4   weighted neighborhood average coordinates pbar_i (x, y, z)
  f5..f7   coordinate second differences ptilde_i = (L p)_i (x, y, z)
  f8       smoothed variation vbar = A v
  f9       variation second difference vtilde = L v
  f10      Euclidean distance from p_i to the cloud centroid
  f11      point count in the closed ball of radius r centered at p_i
  f12      low-pass residual h_i = ||p_i - q*_i||
  f13      smoothed residual hbar = A h
  f14      residual second difference htilde = L h

q* is the low-pass-filtered cloud: each coordinate column solves the
positive definite system (I + gamma L) q*_c = p_c, so large gamma pulls
q* toward the graph consensus and h measures high-frequency content.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from scipy.spatial import cKDTree

from .graph import NeighborhoodGraph, build_knn_graph, laplacian_apply, transition_apply
from .io import NUM_FEATURES, PointCloud, _readonly, format_number

FEATURE_NAMES = tuple(f"f{j}" for j in range(1, NUM_FEATURES + 1))

# Column positions (0-based) of the sign- and integrality-constrained features.
_NONNEGATIVE_COLUMNS = (0, 7, 9, 11, 12)  # f1, f8, f10, f12, f13
_COUNT_COLUMN = 10  # f11


@dataclass(frozen=True)
class LpfConfig:
    """Regularization weight of the low-pass coordinate solve."""

    gamma: float = 0.5

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class FeatureMatrix:
    """n x 14 per-point feature values, columns ordered f1..f14."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[1] != NUM_FEATURES or vals.shape[0] < 1:
            raise ValueError(f"feature matrix must be n x {NUM_FEATURES}, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature matrix contains non-finite entries")
        for c in _NONNEGATIVE_COLUMNS:
            if vals[:, c].min() < 0.0:
                raise ValueError(f"feature f{c + 1} must be non-negative")
        counts = vals[:, _COUNT_COLUMN]
        if np.any(counts != np.round(counts)) or counts.min() < 1.0:
            raise ValueError("feature f11 must be an integer count >= 1")
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        """Feature column by name, e.g. ``column("f12")``."""
        return self.values[:, FEATURE_NAMES.index(name)]


def weighted_avg_coords(graph: NeighborhoodGraph, cloud: PointCloud) -> np.ndarray:
    """Neighborhood-averaged coordinates pbar = A P, one row per point (f2..f4)."""
    return np.column_stack([transition_apply(graph, cloud.points[:, c]) for c in range(3)])


def second_diff_coords(graph: NeighborhoodGraph, cloud: PointCloud) -> np.ndarray:
    """Coordinate second differences ptilde = L P (f5..f7)."""
    return np.column_stack([laplacian_apply(graph, cloud.points[:, c]) for c in range(3)])


def local_variation(graph: NeighborhoodGraph, cloud: PointCloud) -> np.ndarray:
    """Distance from each point to its neighborhood average, v_i = ||p_i - pbar_i|| (f1)."""
    return np.linalg.norm(cloud.points - weighted_avg_coords(graph, cloud), axis=1)


def variation_smoothness(graph: NeighborhoodGraph, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smoothed variation vbar = A v and its second difference vtilde = L v (f8, f9)."""
    return transition_apply(graph, v), laplacian_apply(graph, v)


def lpf_solve(graph: NeighborhoodGraph, cloud: PointCloud, config: LpfConfig) -> np.ndarray:
    """Low-pass-filter the coordinates: solve (I + gamma L) q*_c = p_c per column.

    The system matrix is symmetric positive definite, so a sparse direct
    factorization always succeeds; the residual is still checked because the
    check is cheap and guards against factorization bugs.
    """
    points = cloud.points
    system = (sp.identity(graph.n, format="csr") + config.gamma * graph.laplacian).tocsc()
    qstar = splu(system).solve(np.array(points))

    # Relative residual bound, widened by the matvec rounding floor
    # eps*||M||*||q|| which dominates only for extreme gamma (~1e9).
    residual = np.linalg.norm(system @ qstar - points, axis=0)
    floor = 64.0 * np.finfo(np.float64).eps * np.abs(system).sum(axis=1).max()
    allowed = np.maximum(
        1e-8 * np.linalg.norm(points, axis=0),
        floor * np.linalg.norm(qstar, axis=0),
    )
    if np.any(residual > allowed):
        raise ValueError(
            f"low-pass solve failed: residual norms {residual.tolist()} "
            f"exceed tolerances {allowed.tolist()}"
        )
    return qstar


def lpf_distance_features(
    graph: NeighborhoodGraph, cloud: PointCloud, qstar: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point smoothing residual h = ||p - q*|| with A h and L h (f12, f13, f14)."""
    h = np.linalg.norm(cloud.points - qstar, axis=1)
    return h, transition_apply(graph, h), laplacian_apply(graph, h)


def centroid_distance(cloud: PointCloud) -> np.ndarray:
    """Distance from each point to the cloud centroid (f10)."""
    return np.linalg.norm(cloud.points - cloud.points.mean(axis=0), axis=1)


def ball_count(cloud: PointCloud, r: float) -> np.ndarray:
    """Points within the closed ball of radius r around each point, self included (f11)."""
    if not r > 0:
        raise ValueError(f"ball radius must be positive, got {r}")
    tree = cKDTree(cloud.points)
    return tree.query_ball_point(cloud.points, r, return_length=True).astype(np.int64)


def extract_features(
    cloud: PointCloud,
    k: int = 10,
    sigma: float | None = None,
    gamma: float = 0.5,
    ball_radius: float = 0.1,
) -> FeatureMatrix:
    """Assemble the full n x 14 feature matrix for one cloud.

    Parameters
    ----------
    cloud : PointCloud
    k : int
        Neighbors per point for the graph.
    sigma : float, optional
        Gaussian kernel width; ``None`` selects the mean retained-edge length.
    gamma : float
        Low-pass regularization weight.
    ball_radius : float
        Radius of the closed counting ball.
    """
    graph = build_knn_graph(cloud, k=k, sigma=sigma)
    pbar = weighted_avg_coords(graph, cloud)
    ptilde = second_diff_coords(graph, cloud)
    v = np.linalg.norm(cloud.points - pbar, axis=1)
    vbar, vtilde = variation_smoothness(graph, v)
    qstar = lpf_solve(graph, cloud, LpfConfig(gamma))
    h, hbar, htilde = lpf_distance_features(graph, cloud, qstar)
    columns = np.column_stack(
        [
            v,
            pbar,
            ptilde,
            vbar,
            vtilde,
            centroid_distance(cloud),
            ball_count(cloud, ball_radius).astype(np.float64),
            h,
            hbar,
            htilde,
        ]
    )
    return FeatureMatrix(columns)


def features_to_csv(features: FeatureMatrix) -> str:
    """CSV dump: header f1..f14, one row per point, full float precision."""
    lines = [",".join(FEATURE_NAMES)]
    lines.extend(",".join(format_number(x) for x in row) for row in features.values)
    return "\n".join(lines) + "\n"
