"""No-intercept least squares linking point features to adversarial scores.

The model is z = sum_j c_j f_j over the fourteen feature columns, with no
constant term. The fit reports classical OLS inference: standard errors from
s^2 (X^T X)^-1 with s^2 = RSS / (m - q), a two-sided t-test per coefficient,
and R^2 = 1 - RSS/TSS with TSS taken about the target mean. Coefficients
whose p-value clears the chosen alpha form the significant set used by
downstream score prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import t as student_t

from .features import FEATURE_NAMES, FeatureMatrix
from .io import NORMALIZED_ADVERSARIAL, NUM_FEATURES, CoefficientSet, ScoreVector, _readonly

# Residual energy at or below this fraction of the target energy counts as an
# exact interpolation. OLS inference degenerates there (s^2 = 0), so the guard
# reports p = 0 for nonzero coefficients and p = 1 for zero ones.
_ZERO_RESIDUAL_FRACTION = 1e-20


@dataclass(frozen=True)
class TrainingSample:
    """One (feature row, target score) pair.

    Targets produced by the score-normalization pipeline lie in [0, 1];
    arbitrary finite targets are accepted so planted and rescaled models
    remain expressible.
    """

    features: np.ndarray
    target: float

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.shape != (NUM_FEATURES,):
            raise ValueError(f"expected {NUM_FEATURES} features, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)) or not np.isfinite(self.target):
            raise ValueError("training sample contains non-finite values")
        object.__setattr__(self, "features", _readonly(feats))
        object.__setattr__(self, "target", float(self.target))


@dataclass(frozen=True)
class RegressionFit:
    """Coefficients with OLS inference for one fitted model.

    std_errors are zero only under the exact-interpolation guard, in which
    case t_stats hold +/-inf for nonzero coefficients and 0 for zero ones.
    r_squared is not clamped: a no-intercept model can in principle score
    below 0 on data whose mean it cannot absorb.
    """

    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r_squared: float
    sample_count: int
    alpha: float
    intercept: float | None = None

    def __post_init__(self):
        for field in ("coefficients", "std_errors", "t_stats", "p_values"):
            arr = np.asarray(getattr(self, field), dtype=np.float64)
            if arr.shape != (NUM_FEATURES,):
                raise ValueError(f"{field} must have length {NUM_FEATURES}")
            object.__setattr__(self, field, _readonly(arr))
        if self.p_values.min() < 0.0 or self.p_values.max() > 1.0:
            raise ValueError("p-values must lie in [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def significant(self) -> np.ndarray:
        """Boolean mask of coefficients with p < alpha."""
        return self.p_values < self.alpha

    def to_coefficient_set(self, provenance: str = "fitted") -> CoefficientSet:
        """Keep significant coefficients, zero the rest (intercept dropped)."""
        sig = self.significant
        return CoefficientSet(np.where(sig, self.coefficients, 0.0), sig, provenance)


def fit_mlr(samples, alpha: float = 0.05, intercept: bool = False) -> RegressionFit:
    """Least-squares fit of targets on the fourteen features.

    Parameters
    ----------
    samples : sequence of TrainingSample
        Pooled rows; must number more than the coefficient count.
    alpha : float
        Two-sided significance level for the per-coefficient t-tests.
    intercept : bool
        Append a constant column (exploration aid; the score model itself
        has no intercept and downstream prediction ignores it).
    """
    samples = list(samples)
    m = len(samples)
    q = NUM_FEATURES + (1 if intercept else 0)
    if m <= q:
        raise ValueError(f"need more than {q} samples to fit, got {m}")

    x = np.array([s.features for s in samples])
    y = np.array([s.target for s in samples])
    design = np.column_stack([x, np.ones(m)]) if intercept else x
    names = FEATURE_NAMES + ("intercept",) if intercept else FEATURE_NAMES

    # Pivoted QR gives the fit, the rank check, and (X^T X)^-1 in one pass.
    qmat, rmat, piv = scipy.linalg.qr(design, mode="economic", pivoting=True)
    rdiag = np.abs(np.diag(rmat))
    tol = rdiag[0] * max(m, q) * np.finfo(np.float64).eps if rdiag[0] > 0 else 0.0
    rank = int(np.sum(rdiag > tol))
    if rank < q:
        dependent = ", ".join(names[j] for j in sorted(piv[rank:]))
        raise ValueError(f"design matrix is rank-deficient; dependent columns: {dependent}")

    coef = np.empty(q)
    coef[piv] = scipy.linalg.solve_triangular(rmat, qmat.T @ y)
    residual = y - design @ coef
    rss = float(residual @ residual)
    df = m - q

    # diag((X^T X)^-1) = row sums of squares of R^-1, unpermuted.
    rinv = scipy.linalg.solve_triangular(rmat, np.eye(q))
    xtx_inv_diag = np.empty(q)
    xtx_inv_diag[piv] = np.sum(rinv * rinv, axis=1)

    if rss <= _ZERO_RESIDUAL_FRACTION * float(y @ y):
        # Exact interpolation: s^2 = 0 and the t statistics blow up. A
        # coefficient counts as nonzero only above the ambient rounding scale.
        magnitude = np.abs(coef)
        nonzero = magnitude > 1e-8 * magnitude.max() if magnitude.max() > 0 else magnitude > 0
        std_errors = np.zeros(q)
        t_stats = np.zeros(q)
        t_stats[nonzero] = np.sign(coef[nonzero]) * np.inf
        p_values = np.where(nonzero, 0.0, 1.0)
    else:
        s2 = rss / df
        std_errors = np.sqrt(s2 * xtx_inv_diag)
        t_stats = coef / std_errors
        p_values = 2.0 * student_t.sf(np.abs(t_stats), df)

    tss = float(np.sum((y - y.mean()) ** 2))
    if tss > 0.0:
        r_squared = 1.0 - rss / tss
    else:
        # Constant targets carry no variance to explain.
        r_squared = 1.0 if rss <= _ZERO_RESIDUAL_FRACTION * float(y @ y) else 0.0

    return RegressionFit(
        coefficients=coef[:NUM_FEATURES],
        std_errors=std_errors[:NUM_FEATURES],
        t_stats=t_stats[:NUM_FEATURES],
        p_values=p_values[:NUM_FEATURES],
        r_squared=r_squared,
        sample_count=m,
        alpha=alpha,
        intercept=float(coef[-1]) if intercept else None,
    )


def select_top_targets(cloud_scores: ScoreVector, features: FeatureMatrix, n_top: int):
    """Pair the highest-scoring points of one cloud with their feature rows.

    Scores must be normalized-adversarial; ties resolve to the lower index.
    Returns a list of TrainingSample in descending score order.
    """
    if cloud_scores.kind != NORMALIZED_ADVERSARIAL:
        raise ValueError(f"scores must be normalized-adversarial, got kind {cloud_scores.kind!r}")
    n = cloud_scores.n
    if features.n != n:
        raise ValueError(f"feature rows ({features.n}) do not match score count ({n})")
    if not 0 <= n_top <= n:
        raise ValueError(f"top count must satisfy 0 <= N <= {n}, got {n_top}")
    values = cloud_scores.values
    order = np.lexsort((np.arange(n), -values))[:n_top]
    return [TrainingSample(features.values[i], values[i]) for i in order]


def average_coefficients(sets) -> CoefficientSet:
    """Element-wise mean of coefficient sets.

    Insignificant entries contribute their stored zeros; an index is
    significant in the result when any input marks it significant.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one coefficient set to average")
    values = np.mean([s.coefficients for s in sets], axis=0)
    significant = np.any([s.significant for s in sets], axis=0)
    provenance = " + ".join(s.provenance for s in sets)
    return CoefficientSet(np.where(significant, values, 0.0), significant, provenance)


def fit_report(fit: RegressionFit) -> str:
    """Readable per-coefficient table plus the fit summary line."""
    header = f"{'term':>9} {'coefficient':>16} {'std_error':>16} {'t':>16} {'p':>12} {'sig':>5}"
    lines = [header]
    sig = fit.significant
    for j in range(NUM_FEATURES):
        lines.append(
            f"{FEATURE_NAMES[j]:>9} {fit.coefficients[j]:>16.9g} {fit.std_errors[j]:>16.9g} "
            f"{fit.t_stats[j]:>16.9g} {fit.p_values[j]:>12.4e} {'yes' if sig[j] else 'no':>5}"
        )
    if fit.intercept is not None:
        lines.append(f"{'intercept':>9} {fit.intercept:>16.9g}")
    lines.append(
        f"R^2 = {fit.r_squared:.6f}  samples = {fit.sample_count}  alpha = {fit.alpha:g}"
    )
    return "\n".join(lines) + "\n"
