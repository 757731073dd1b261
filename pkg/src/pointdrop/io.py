"""Reading, writing, and validating point clouds, score vectors, and coefficient sets.

Text formats:
  * ``.xyz`` clouds: one point per line, three whitespace-separated decimals,
    ``#``-prefixed comment lines and blank lines skipped.
  * score files: one decimal per line.
  * coefficient documents: JSON with ``provenance`` and a ``coefficients``
    list of ``{"index", "value", "significant"}`` records covering 1..14.

All serialized numbers carry 17 significant digits, so a write/parse cycle
is bit-exact for float64.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

NUM_FEATURES = 14

RAW_SALIENCY = "raw-saliency"
NORMALIZED_ADVERSARIAL = "normalized-adversarial"
PREDICTED = "predicted"
SCORE_KINDS = (RAW_SALIENCY, NORMALIZED_ADVERSARIAL, PREDICTED)


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PointCloud:
    """An n-by-3 array of finite xyz coordinates, immutable after construction.

    File ingestion requires n >= 2; attack outputs may transiently hold a
    single surviving point, so the constructor itself only requires n >= 1.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"point cloud must have shape (n, 3), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValueError("point cloud must contain at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", _readonly(pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Per-point scores of a given kind, paired with a cloud of the same length."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError(f"scores must be a 1-d vector, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("scores contain non-finite values")
        if self.kind not in SCORE_KINDS:
            raise ValueError(f"unknown score kind {self.kind!r}; expected one of {SCORE_KINDS}")
        if self.kind == NORMALIZED_ADVERSARIAL and vals.size:
            if vals.min() < 0.0 or vals.max() > 1.0:
                raise ValueError("normalized-adversarial scores must lie in [0, 1]")
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Fourteen linear-model coefficients with per-index significance flags.

    Insignificant entries must be exactly zero: only the significant set
    contributes to predicted scores.
    """

    coefficients: np.ndarray
    significant: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        sig = np.asarray(self.significant, dtype=bool)
        if coeffs.shape != (NUM_FEATURES,) or sig.shape != (NUM_FEATURES,):
            raise ValueError(f"expected {NUM_FEATURES} coefficients and flags")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients contain non-finite values")
        bad = np.nonzero(~sig & (coeffs != 0.0))[0]
        if bad.size:
            names = ", ".join(f"c{j + 1}" for j in bad)
            raise ValueError(f"insignificant coefficients must be zero: {names}")
        object.__setattr__(self, "coefficients", _readonly(coeffs))
        sig = sig.copy()
        sig.setflags(write=False)
        object.__setattr__(self, "significant", sig)


def _as_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    return source


def parse_xyz(source) -> PointCloud:
    """Parse whitespace-separated xyz text into a cloud of at least two points.

    ``source`` is a string or a file-like object. Malformed lines are
    reported with their 1-based line number.
    """
    text = _as_text(source)
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 3:
            raise ValueError(f"malformed line {lineno}: expected 3 coordinates, got {len(tokens)}")
        try:
            xyz = [float(t) for t in tokens]
        except ValueError:
            raise ValueError(f"malformed line {lineno}: {stripped!r} is not numeric") from None
        if not all(np.isfinite(xyz)):
            raise ValueError(f"non-finite coordinate on line {lineno}")
        rows.append(xyz)
    if len(rows) < 2:
        raise ValueError(f"point cloud needs at least 2 points, found {len(rows)}")
    return PointCloud(np.array(rows))


def format_number(value: float) -> str:
    """Decimal form with 17 significant digits; parses back to the same float64."""
    return f"{float(value):.16e}"


def write_xyz(cloud: PointCloud) -> str:
    """Serialize a cloud so that ``parse_xyz`` reproduces it bit-exactly."""
    lines = [" ".join(format_number(c) for c in p) for p in cloud.points]
    return "\n".join(lines) + "\n"


def parse_scores(source, n: int) -> ScoreVector:
    """Parse a one-number-per-line score file of exactly ``n`` values."""
    text = _as_text(source)
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if len(stripped.split()) != 1:
            raise ValueError(f"malformed line {lineno}: expected one number per line")
        try:
            value = float(stripped)
        except ValueError:
            raise ValueError(f"malformed line {lineno}: {stripped!r} is not numeric") from None
        if not np.isfinite(value):
            raise ValueError(f"non-finite score on line {lineno}")
        values.append(value)
    if len(values) != n:
        raise ValueError(f"score count mismatch: expected {n}, found {len(values)}")
    return ScoreVector(np.array(values), RAW_SALIENCY)


def write_scores(scores: ScoreVector) -> str:
    """Serialize scores one per line at full round-trip precision."""
    return "\n".join(format_number(v) for v in scores.values) + "\n"


def load_coefficients(source) -> CoefficientSet:
    """Load a coefficient document, enforcing the insignificant-implies-zero rule.

    The document must declare every index 1..14 exactly once.
    """
    text = _as_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid coefficient document: {exc}") from None
    if not isinstance(doc, dict) or "coefficients" not in doc:
        raise ValueError("coefficient document must be an object with a 'coefficients' list")
    provenance = str(doc.get("provenance", ""))
    values = np.zeros(NUM_FEATURES)
    flags = np.zeros(NUM_FEATURES, dtype=bool)
    seen = set()
    for entry in doc["coefficients"]:
        try:
            idx = int(entry["index"])
            value = float(entry["value"])
            significant = bool(entry["significant"])
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"bad coefficient entry: {entry!r}") from None
        if not 1 <= idx <= NUM_FEATURES:
            raise ValueError(f"coefficient index {idx} outside 1..{NUM_FEATURES}")
        if idx in seen:
            raise ValueError(f"duplicate coefficient index {idx}")
        seen.add(idx)
        if not significant and value != 0.0:
            raise ValueError(f"insignificant coefficient c{idx} must be zero, got {value}")
        values[idx - 1] = value
        flags[idx - 1] = significant
    missing = sorted(set(range(1, NUM_FEATURES + 1)) - seen)
    if missing:
        raise ValueError(f"missing coefficient indices: {missing}")
    return CoefficientSet(values, flags, provenance)


def write_coefficients(coeffs: CoefficientSet) -> str:
    """Serialize a coefficient set as a loadable JSON document."""
    doc = {
        "provenance": coeffs.provenance,
        "coefficients": [
            {
                "index": j + 1,
                "value": float(coeffs.coefficients[j]),
                "significant": bool(coeffs.significant[j]),
            }
            for j in range(NUM_FEATURES)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def normalize_cloud(cloud: PointCloud) -> PointCloud:
    """Center a cloud on its centroid and scale the farthest point to unit norm.

    Idempotent to within 1e-12. Raises on a degenerate cloud whose points
    all coincide.
    """
    pts = cloud.points - cloud.points.mean(axis=0)
    max_norm = np.linalg.norm(pts, axis=1).max()
    if max_norm == 0.0:
        raise ValueError("degenerate cloud: all points coincide")
    return PointCloud(pts / max_norm)
