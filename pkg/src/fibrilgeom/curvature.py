"""Discrete curvature and torsion from cross-ratios.

For a window ``g[i-1], g[i], g[i+1], g[i+2]`` the four cyclic diagonal points
``A, B, C, D`` are concyclic; the circle through them is the discrete
osculating circle at ``g[i]``.  Curvature is its inverse radius and the torsion
is

    tau = -9 <Im cr(g[i-1], g[i], g[i+1], g[i+2]), N> / (2 kappa |g[i] - g[i+1]|^2)

with ``N`` the unit radial vector of the circle at the anchor point (``B`` by
default).  Note that this sign convention is the negative of the usual
right-handed one: a right-handed helix gets negative torsion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    BranchFailure,
    DegenerateQuadruple,
    DegenerateWindow,
    LabelPatternViolation,
    SingularSystem,
)
from .pdb_ingest import DiscreteCurve, VertexLabel
from .quaternion import cross_ratio, diagonal_point

__all__ = [
    "OsculatingCircle",
    "VertexGeometry",
    "GeometryProfile",
    "ClassSummary",
    "inserting_points",
    "osculating_circle",
    "curvature_torsion_at",
    "curvature_torsion_along",
    "profile_backbone",
    "summarize",
    "ATOM_CLASSES",
    "merge_profiles",
]

ATOM_CLASSES = ("N", "CA", "C")

# relative thresholds, scaled by the window extent
COLLINEAR_TOL = 1e-9
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class OsculatingCircle:
    center: np.ndarray
    radius: float
    plane_normal: np.ndarray
    points: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    @property
    def curvature(self) -> float:
        return 1.0 / self.radius


@dataclass(frozen=True)
class VertexGeometry:
    vertex_index: int
    atom_class: str
    curvature: Optional[float]
    torsion: Optional[float]
    degenerate: Optional[str] = None
    label: Optional[VertexLabel] = None

    @property
    def is_degenerate(self) -> bool:
        return self.degenerate is not None


@dataclass(frozen=True)
class ClassSummary:
    """Mean and unbiased variance of |kappa| and |tau| over one atom class."""

    count: int
    mean_abs_curvature: float
    mean_abs_torsion: float
    var_abs_curvature: float
    var_abs_torsion: float
    excluded: int = 0


@dataclass(frozen=True)
class GeometryProfile:
    entries: tuple[VertexGeometry, ...]
    summary: dict[str, ClassSummary] = field(default_factory=dict)

    @property
    def degenerate_count(self) -> int:
        return sum(e.is_degenerate for e in self.entries)

    def by_class(self, atom_class: str) -> list[VertexGeometry]:
        return [e for e in self.entries if e.atom_class == atom_class]


def _window(w) -> tuple[np.ndarray, ...]:
    pts = np.asarray(w, dtype=float)
    if pts.shape != (4, 3):
        raise ValueError(f"window must be four 3-vectors, got shape {pts.shape}")
    return tuple(pts)


def _extent(pts) -> float:
    pts = np.asarray(pts)
    return float(np.max(np.linalg.norm(pts[:, None] - pts[None], axis=-1)))


def _cross(u, v) -> np.ndarray:
    # np.cross carries a lot of overhead for single 3-vectors
    return np.array([u[1] * v[2] - u[2] * v[1],
                     u[2] * v[0] - u[0] * v[2],
                     u[0] * v[1] - u[1] * v[0]])


def _norm(u) -> float:
    return math.sqrt(float(u @ u))


def _is_collinear(pts, scale: float) -> bool:
    base = pts[0]
    far = max(pts[1:], key=lambda p: _norm(p - base))
    axis = far - base
    for p in pts[1:]:
        if _norm(_cross(axis, p - base)) > COLLINEAR_TOL * scale * scale:
            return False
    return True


def _local_frame(pts: np.ndarray) -> np.ndarray:
    """Window coordinates centered and rotated onto principal axes (proper rotation).

    Kappa and tau are invariant under rigid motions; in this frame a planar
    window has z components at rounding level, so the quaternion products do
    not leak error across the plane.
    """
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered)
    if np.linalg.det(vt) < 0:
        vt[2] = -vt[2]
    return centered @ vt.T


def inserting_points(w) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four inserting points of a window ``(g0, g1, g2, g3)``.

    ``A = f(g3, g0, g1, g2)``, ``B = f(g0, g1, g2, g3)``,
    ``C = f(g1, g2, g3, g0)``, ``D = f(g2, g3, g0, g1)``.

    Raises
    ------
    DegenerateWindow
        Coincident or collinear vertices, or a square root on the ambiguous
        branch; ``reason`` names which.
    """
    g0, g1, g2, g3 = _window(w)
    scale = _extent((g0, g1, g2, g3))
    if scale == 0.0:
        raise DegenerateWindow("coincident", "all window vertices coincide")
    if _is_collinear((g0, g1, g2, g3), scale):
        raise DegenerateWindow("collinear", "window vertices are collinear")
    try:
        A = diagonal_point(g3, g0, g1, g2)
        B = diagonal_point(g0, g1, g2, g3)
        C = diagonal_point(g1, g2, g3, g0)
        D = diagonal_point(g2, g3, g0, g1)
    except BranchFailure as exc:
        raise DegenerateWindow("branch", str(exc)) from exc
    except DegenerateQuadruple as exc:
        raise DegenerateWindow("coincident", str(exc)) from exc
    return A, B, C, D


def osculating_circle(A, B, C, D=None) -> OsculatingCircle:
    """Circle through ``A, B, C`` from a direct 3x3 solve for its center.

    The center ``X`` satisfies ``(X - (A+B)/2).(B-A) = 0``,
    ``(X - (A+C)/2).(C-A) = 0`` and ``((B-A) x (C-A)).(X-A) = 0``.

    Raises
    ------
    SingularSystem
        ``A, B, C`` are (nearly) collinear.
    """
    A, B, C = (np.asarray(p, dtype=float) for p in (A, B, C))
    D = np.asarray(D, dtype=float) if D is not None else None
    u, v = B - A, C - A
    n = _cross(u, v)
    M = np.array([u, v, n])
    scale = max(_norm(u), _norm(v), _norm(B - C))
    # det(M) = |u x v|^2 has units length^4
    if scale == 0.0 or abs(np.linalg.det(M)) < SINGULAR_TOL * scale**4:
        raise SingularSystem("inserting points are collinear")
    # solve for the offset from A, then drop the residual out-of-plane part;
    # near-straight circles have huge centers and the solve leaks into n otherwise
    y = np.linalg.solve(M, np.array([u @ u / 2.0, v @ v / 2.0, 0.0]))
    y -= (y @ n) / (n @ n) * n
    center = A + y
    radius = _norm(A - center)
    pts = (A, B, C, D if D is not None else C)
    return OsculatingCircle(center, radius, n / _norm(n), pts)


def curvature_torsion_at(w, vertex_index: int = 1, atom_class: str = "",
                         normal_anchor: str = "B", label: Optional[VertexLabel] = None
                         ) -> VertexGeometry:
    """Curvature and torsion at ``g1`` of the window ``(g0, g1, g2, g3)``.

    Degenerate windows come back flagged (``degenerate`` holds the reason)
    with no curvature or torsion, instead of raising.
    """
    if normal_anchor not in ("A", "B"):
        raise ValueError("normal_anchor must be 'A' or 'B'")
    g0, g1, g2, g3 = _local_frame(np.array(_window(w)))
    try:
        A, B, C, D = inserting_points((g0, g1, g2, g3))
        circle = osculating_circle(A, B, C, D)
    except DegenerateWindow as exc:
        return VertexGeometry(vertex_index, atom_class, None, None, exc.reason, label)
    except SingularSystem:
        return VertexGeometry(vertex_index, atom_class, None, None, "singular", label)
    anchor = B if normal_anchor == "B" else A
    radial = circle.center - anchor
    normal = radial / _norm(radial)
    kappa = circle.curvature
    im_cr = cross_ratio(g0, g1, g2, g3).imag_array()
    edge2 = float(np.sum((g1 - g2) ** 2))
    tau = -9.0 * float(im_cr @ normal) / (2.0 * kappa * edge2)
    return VertexGeometry(vertex_index, atom_class, kappa, tau, None, label)


def curvature_torsion_along(vertices, normal_anchor: str = "B") -> list[VertexGeometry]:
    """Evaluate every interior window ``i = 1 .. len - 3`` of a vertex sequence."""
    v = np.asarray(vertices.vertices if isinstance(vertices, DiscreteCurve) else vertices,
                   dtype=float)
    labels = vertices.labels if isinstance(vertices, DiscreteCurve) else ()
    out = []
    for i in range(1, len(v) - 2):
        lab = labels[i] if labels else None
        cls = lab.atom_class if lab else ""
        out.append(curvature_torsion_at(v[i - 1:i + 3], i, cls, normal_anchor, lab))
    return out


def _stats(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    if n == 0:
        return math.nan, math.nan
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    var = float(arr.var(ddof=1)) if n > 1 else math.nan
    return mean, var


def summarize(entries: Iterable[VertexGeometry]) -> dict[str, ClassSummary]:
    """Per-class and pooled (key ``"all"``) statistics of |kappa|, |tau|.

    Degenerate entries are excluded and counted.  Variances use ``n - 1``.
    """
    entries = list(entries)
    groups = {"all": entries}
    for cls in ATOM_CLASSES:
        groups[cls] = [e for e in entries if e.atom_class == cls]
    out = {}
    for key, group in groups.items():
        good = [e for e in group if not e.is_degenerate]
        mk, vk = _stats([abs(e.curvature) for e in good])
        mt, vt = _stats([abs(e.torsion) for e in good])
        out[key] = ClassSummary(len(good), mk, mt, vk, vt, len(group) - len(good))
    return out


def profile_backbone(curve: DiscreteCurve, normal_anchor: str = "B") -> GeometryProfile:
    """Curvature/torsion at every interior atom of an N, CA, C backbone curve.

    The window at N_i is (C_{i-1}, N_i, CA_i, C_i), at CA_i it is
    (N_i, CA_i, C_i, N_{i+1}) and at C_i it is (CA_i, C_i, N_{i+1}, CA_{i+1}).
    The first vertex and the last two have no window and are omitted.

    Raises
    ------
    LabelPatternViolation
        The curve labels do not repeat N, CA, C.
    """
    classes = curve.atom_classes
    if not classes:
        raise LabelPatternViolation("curve carries no atom labels")
    for k, cls in enumerate(classes):
        if cls != ATOM_CLASSES[k % 3]:
            raise LabelPatternViolation(
                f"vertex {k} is {cls!r}, expected {ATOM_CLASSES[k % 3]!r} (pattern N, CA, C)")
    entries = tuple(curvature_torsion_along(curve, normal_anchor))
    return GeometryProfile(entries, summarize(entries))


def merge_profiles(profiles: Iterable[GeometryProfile]) -> GeometryProfile:
    """Pool the entries of several chains into one profile."""
    entries = tuple(e for p in profiles for e in p.entries)
    return GeometryProfile(entries, summarize(entries))

