"""Hop distances between curve vertices, truncated hop-distance matrices and
the rigid-superposition RMSD baseline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    CurveTooShort,
    DegenerateConfiguration,
    IndexOutOfRange,
    LengthMismatch,
)
from .pdb_ingest import DiscreteCurve

__all__ = [
    "HopDistanceMatrix",
    "BinaryMap",
    "AlignmentResult",
    "hop_distance",
    "truncated_hop_matrix",
    "threshold_map",
    "kabsch_align",
    "rmsd",
]


def _coords(curve) -> np.ndarray:
    if isinstance(curve, DiscreteCurve):
        return curve.vertices
    return np.asarray(curve, dtype=float)


@dataclass(frozen=True)
class HopDistanceMatrix:
    entries: np.ndarray
    labels: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class BinaryMap:
    entries: np.ndarray
    cutoff: float
    labels: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class AlignmentResult:
    """Proper rotation and translation taking ``p`` onto ``q``: ``q ~ p @ R.T + t``."""

    rotation: np.ndarray
    translation: np.ndarray
    rmsd: float

    def apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.rotation.T + self.translation


def hop_distance(curve, i: int, k: int) -> float:
    """Euclidean distance between vertices ``i`` and ``i + k``."""
    v = _coords(curve)
    j = i + k
    if not (0 <= i < len(v) and 0 <= j < len(v)):
        raise IndexOutOfRange(f"vertices {i} and {j} not both in [0, {len(v)})")
    return float(np.linalg.norm(v[i] - v[j]))


def truncated_hop_matrix(curve1, curve2, n: Optional[int] = None) -> HopDistanceMatrix:
    """``D[i, j] = |d(g_i, g_j) - d(g'_i, g'_j)|`` over the first ``n`` vertices.

    The two curves are assumed to correspond vertex by vertex (same sequence
    fragment); ``n`` defaults to the shorter length.
    """
    a, b = _coords(curve1), _coords(curve2)
    if n is None:
        n = min(len(a), len(b))
    if n < 1 or len(a) < n or len(b) < n:
        raise CurveTooShort(f"need {n} vertices, curves have {len(a)} and {len(b)}")
    da = cdist(a[:n], a[:n])
    db = cdist(b[:n], b[:n])
    d = np.abs(da - db)
    # exact symmetry/zero diagonal regardless of rounding in cdist
    d = np.triu(d, 1)
    d = d + d.T
    labels = ()
    if isinstance(curve1, DiscreteCurve) and curve1.labels:
        labels = tuple(lab.residue_label for lab in curve1.labels[:n])
    return HopDistanceMatrix(d, labels)


def threshold_map(matrix: HopDistanceMatrix, cutoff: float) -> BinaryMap:
    """Entries strictly greater than ``cutoff``."""
    if not cutoff > 0:
        raise ValueError("cutoff must be positive")
    return BinaryMap(matrix.entries > cutoff, float(cutoff), matrix.labels)


def rmsd(p, q) -> float:
    """Root mean square deviation of corresponding points, as given (no alignment)."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise LengthMismatch(f"point lists have shapes {p.shape} and {q.shape}")
    if len(p) == 0:
        raise LengthMismatch("empty point lists")
    return float(np.sqrt(np.sum((p - q) ** 2) / len(p)))


def kabsch_align(p, q) -> AlignmentResult:
    """Optimal proper rigid motion superposing ``p`` on ``q`` (Kabsch).

    Raises
    ------
    LengthMismatch
        Point lists differ in length, or have fewer than 3 points.
    DegenerateConfiguration
        All points of either list are collinear.
    """
    p, q = _coords(p), _coords(q)
    if p.shape != q.shape or p.ndim != 2 or p.shape[1] != 3:
        raise LengthMismatch(f"point lists have shapes {p.shape} and {q.shape}")
    if len(p) < 3:
        raise LengthMismatch("need at least 3 points")
    pc, qc = p.mean(axis=0), q.mean(axis=0)
    P, Q = p - pc, q - qc
    for name, X in (("p", P), ("q", Q)):
        s = np.linalg.svd(X, compute_uv=False)
        if s[0] == 0 or s[1] <= 1e-10 * s[0]:
            raise DegenerateConfiguration(f"points of {name} are collinear")
    H = P.T @ Q
    U, _, Vt = np.linalg.svd(H)
    sign = 1.0 if np.linalg.det(Vt.T @ U.T) > 0 else -1.0
    R = Vt.T @ np.diag([1.0, 1.0, sign]) @ U.T
    t = qc - R @ pc
    return AlignmentResult(R, t, rmsd(p @ R.T + t, q))
