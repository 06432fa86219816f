"""Quaternion algebra on points of R^3.

Points of R^3 are identified with pure-imaginary quaternions ``[0, v]``.  The
cross-ratio

    cr(a, b, c, d) = (a - b)(b - c)^-1 (c - d)(d - a)^-1

is invariant under Moebius transformations and is real exactly when the four
points are concyclic.  The "diagonal" point ``f(a, b, c, d)`` built from it is
the basic ingredient of the discrete osculating circle.

Arithmetic is done on Python floats: the inputs are tiny (four components) and
per-call numpy overhead would dominate.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BranchFailure,
    CoincidentPoints,
    DegenerateQuadruple,
    NonPositiveRealBranch,
    ZeroQuaternion,
)

__all__ = [
    "Quaternion",
    "qmul",
    "qinv",
    "cross_ratio",
    "sqrt_polar",
    "diagonal_point",
    "diagonal_point_quaternion",
    "quadruple_scale",
]


class Quaternion:
    """The pair ``[re, im]`` of a real scalar and a 3-vector."""

    __slots__ = ("re", "im")

    def __init__(self, re: float, im: Iterable[float] = (0.0, 0.0, 0.0)):
        x, y, z = im
        self.re = float(re)
        self.im = (float(x), float(y), float(z))
        if not all(math.isfinite(c) for c in (self.re, *self.im)):
            raise ValueError(f"non-finite quaternion component in {self!r}")

    @classmethod
    def pure(cls, v: Sequence[float]) -> "Quaternion":
        return cls(0.0, v)

    @classmethod
    def _raw(cls, re: float, x: float, y: float, z: float) -> "Quaternion":
        # skips validation; internal hot path only
        q = object.__new__(cls)
        q.re = re
        q.im = (x, y, z)
        return q

    def __repr__(self) -> str:
        return f"Quaternion({self.re!r}, {self.im!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        a, b = self.im, other.im
        return Quaternion._raw(self.re + other.re, a[0] + b[0], a[1] + b[1], a[2] + b[2])

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        a, b = self.im, other.im
        return Quaternion._raw(self.re - other.re, a[0] - b[0], a[1] - b[1], a[2] - b[2])

    def __neg__(self) -> "Quaternion":
        x, y, z = self.im
        return Quaternion._raw(-self.re, -x, -y, -z)

    def __mul__(self, other: "Quaternion | float") -> "Quaternion":
        if isinstance(other, Quaternion):
            return qmul(self, other)
        s = float(other)
        x, y, z = self.im
        return Quaternion._raw(self.re * s, x * s, y * s, z * s)

    __rmul__ = __mul__

    def conjugate(self) -> "Quaternion":
        x, y, z = self.im
        return Quaternion._raw(self.re, -x, -y, -z)

    def norm2(self) -> float:
        x, y, z = self.im
        return self.re * self.re + x * x + y * y + z * z

    def norm(self) -> float:
        return math.hypot(self.re, *self.im)

    def imag_norm(self) -> float:
        return math.hypot(*self.im)

    def as_array(self) -> np.ndarray:
        """Components as ``[re, x, y, z]``."""
        return np.array([self.re, *self.im])

    def imag_array(self) -> np.ndarray:
        return np.array(self.im)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``[r,v][s,w] = [rs - <v,w>, rw + sv + v x w]``."""
    r, (v0, v1, v2) = a.re, a.im
    s, (w0, w1, w2) = b.re, b.im
    return Quaternion._raw(
        r * s - (v0 * w0 + v1 * w1 + v2 * w2),
        r * w0 + s * v0 + (v1 * w2 - v2 * w1),
        r * w1 + s * v1 + (v2 * w0 - v0 * w2),
        r * w2 + s * v2 + (v0 * w1 - v1 * w0),
    )


def qinv(q: Quaternion) -> Quaternion:
    n2 = q.norm2()
    if n2 == 0.0:
        raise ZeroQuaternion("cannot invert the zero quaternion")
    x, y, z = q.im
    return Quaternion._raw(q.re / n2, -x / n2, -y / n2, -z / n2)


def _as_quaternion(p) -> Quaternion:
    if isinstance(p, Quaternion):
        return p
    return Quaternion._raw(0.0, float(p[0]), float(p[1]), float(p[2]))


def cross_ratio(a, b, c, d) -> Quaternion:
    """Quaternionic cross-ratio of four points.

    Points may be 3-vectors (embedded as pure-imaginary quaternions) or
    :class:`Quaternion` instances.

    Raises
    ------
    CoincidentPoints
        If ``b == c`` or ``d == a``, where an inverse would not exist.
    """
    a, b, c, d = (_as_quaternion(p) for p in (a, b, c, d))
    bc = b - c
    da = d - a
    if bc.norm2() == 0.0:
        raise CoincidentPoints("b and c coincide")
    if da.norm2() == 0.0:
        raise CoincidentPoints("d and a coincide")
    return qmul(qmul(qmul(a - b, qinv(bc)), c - d), qinv(da))


def sqrt_polar(q: Quaternion) -> Quaternion:
    """Principal square root through the polar form.

    With ``q = |q| [cos phi, v sin phi]``, ``|v| = 1`` and ``phi`` in
    ``[0, pi]``, the root is ``sqrt|q| [cos(phi/2), v sin(phi/2)]``.  The unit
    axis ``v`` is undefined for real ``q``; for positive reals the root is real,
    for non-positive reals there is no canonical choice.
    """
    n = q.norm()
    vn = q.imag_norm()
    if vn == 0.0:
        if q.re > 0.0:
            return Quaternion._raw(math.sqrt(q.re), 0.0, 0.0, 0.0)
        raise NonPositiveRealBranch(f"square root of non-positive real {q.re!r} is not unique")
    phi = math.atan2(vn, q.re)
    rn = math.sqrt(n)
    s = rn * math.sin(0.5 * phi) / vn
    x, y, z = q.im
    return Quaternion._raw(rn * math.cos(0.5 * phi), x * s, y * s, z * s)


def quadruple_scale(*points) -> float:
    """Largest pairwise distance among the given 3-vectors."""
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def diagonal_point_quaternion(a, b, c, d) -> Quaternion:
    """The diagonal point ``f(a, b, c, d)`` as a full quaternion.

    ``f = (x + 1)^-1 (x c + b)`` with ``x = (b - a)(c - a)^-1 sqrt(cr(c, a, b, d))``.
    For points of R^3 the result is pure imaginary up to rounding.
    """
    pts = np.asarray((a, b, c, d), dtype=float).tolist()
    # Work relative to the centroid; f commutes with translations and this keeps
    # the absolute terms ``x c + b`` well conditioned at Angstrom offsets.
    ox = (pts[0][0] + pts[1][0] + pts[2][0] + pts[3][0]) / 4.0
    oy = (pts[0][1] + pts[1][1] + pts[2][1] + pts[3][1]) / 4.0
    oz = (pts[0][2] + pts[1][2] + pts[2][2] + pts[3][2]) / 4.0
    qa, qb, qc, qd = (Quaternion._raw(0.0, x - ox, y - oy, z - oz) for x, y, z in pts)
    for (i, p), (j, r) in _pairs(((0, qa), (1, qb), (2, qc), (3, qd))):
        if p.im == r.im:
            raise DegenerateQuadruple(f"points {i} and {j} coincide")
    try:
        root = sqrt_polar(cross_ratio(qc, qa, qb, qd))
    except NonPositiveRealBranch as exc:
        raise BranchFailure(str(exc)) from exc
    x = qmul(qmul(qb - qa, qinv(qc - qa)), root)
    denom = x + Quaternion._raw(1.0, 0.0, 0.0, 0.0)
    if denom.norm2() == 0.0:
        raise DegenerateQuadruple("diagonal point is at infinity")
    f = qmul(qinv(denom), qmul(x, qc) + qb)
    fx, fy, fz = f.im
    return Quaternion._raw(f.re, fx + ox, fy + oy, fz + oz)


def diagonal_point(a, b, c, d) -> np.ndarray:
    """Diagonal point ``f(a, b, c, d)`` of four pairwise distinct points, as a 3-vector.

    The point lies on the circumsphere (or circumplane) of the four inputs.

    Raises
    ------
    DegenerateQuadruple
        Two input points coincide, or the point is sent to infinity.
    BranchFailure
        ``cr(c, a, b, d)`` is a non-positive real, so its square root is ambiguous.
    """
    return diagonal_point_quaternion(a, b, c, d).imag_array()


def _pairs(items):
    items = list(items)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            yield items[i], items[j]
