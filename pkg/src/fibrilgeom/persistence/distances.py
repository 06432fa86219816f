"""Bottleneck and Wasserstein-q distances between persistence diagrams.

Ground cost is the l-infinity distance; a point may instead be matched to its
nearest diagonal point at cost ``(death - birth) / 2``.  Both distances are
exact: the bottleneck value is found by binary search over all candidate
costs with a perfect-matching feasibility test, and Wasserstein-q by a
min-cost assignment on the diagonal-augmented cost matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ..errors import EssentialMismatch
from .homology import PersistenceDiagram

__all__ = ["DiagramDistance", "bottleneck", "wasserstein", "as_points"]

# (index in first diagram or None, index in second diagram or None)
Pairing = tuple[Optional[int], Optional[int]]


@dataclass(frozen=True)
class DiagramDistance:
    value: float
    kind: str
    q: Optional[float] = None
    matching: tuple[Pairing, ...] = field(default=(), compare=False)


def as_points(diagram, dim: Optional[int] = None) -> np.ndarray:
    """Coerce a diagram (or array-like of (birth, death)) to a ``(k, 2)`` array."""
    if isinstance(diagram, PersistenceDiagram):
        if dim is None:
            dims = {p[0] for p in diagram.points}
            if len(dims) > 1:
                raise ValueError("diagram spans several dimensions; pass dim=")
            dim = dims.pop() if dims else 0
        return diagram.in_dimension(dim)
    arr = np.asarray(diagram, dtype=float).reshape(-1, 2)
    if np.any(arr[:, 1] < arr[:, 0]):
        raise ValueError("diagram points must satisfy birth <= death")
    return arr


def _prepare(p1, p2, dim, cap):
    a, b = as_points(p1, dim), as_points(p2, dim)
    if cap is not None:
        a = a.copy()
        b = b.copy()
        a[np.isinf(a[:, 1]), 1] = cap
        b[np.isinf(b[:, 1]), 1] = cap
        return a, b, np.zeros(0)
    ea, eb = np.isinf(a[:, 1]), np.isinf(b[:, 1])
    if ea.sum() != eb.sum():
        raise EssentialMismatch(
            f"diagrams have {int(ea.sum())} and {int(eb.sum())} essential points")
    # essential points are matched among themselves by birth; sorted order is
    # optimal for any convex cost on the line
    ess = np.abs(np.sort(a[ea, 0]) - np.sort(b[eb, 0]))
    return a[~ea], b[~eb], ess


def _costs(a: np.ndarray, b: np.ndarray):
    cross = np.maximum(np.abs(a[:, None, 0] - b[None, :, 0]),
                       np.abs(a[:, None, 1] - b[None, :, 1])) if len(a) and len(b) \
        else np.zeros((len(a), len(b)))
    return cross, (a[:, 1] - a[:, 0]) / 2.0, (b[:, 1] - b[:, 0]) / 2.0


def _perfect_matching(cross, ga, gb, delta):
    """Perfect matching of the augmented graph using only edges of cost <= delta."""
    m, n = cross.shape
    size = m + n
    rows, cols = [], []
    # left: first-diagram points 0..m-1, then diagonal proxies of second-diagram points
    # right: second-diagram points 0..n-1, then diagonal proxies of first-diagram points
    for i in range(m):
        js = np.flatnonzero(cross[i] <= delta)
        rows.extend([i] * len(js))
        cols.extend(js.tolist())
        if ga[i] <= delta:
            rows.append(i)
            cols.append(n + i)
    for j in range(n):
        if gb[j] <= delta:
            rows.append(m + j)
            cols.append(j)
        rows.extend([m + j] * m)
        cols.extend(range(n, n + m))
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if np.any(match < 0):
        return None
    return match


def _pairings(match, m, n) -> tuple[Pairing, ...]:
    out = []
    for left, right in enumerate(match):
        left, right = int(left), int(right)
        if left < m and right < n:
            out.append((left, right))
        elif left < m:
            out.append((left, None))
        elif right < n:
            out.append((None, right))
    return tuple(sorted(out, key=lambda t: (t[0] is None, t[0] or 0, t[1] is None, t[1] or 0)))


def bottleneck(p1, p2, *, dim: Optional[int] = None, cap: Optional[float] = None) -> DiagramDistance:
    """Bottleneck distance ``W_inf`` between two single-dimension diagrams.

    Parameters
    ----------
    p1, p2 : PersistenceDiagram or array-like of (birth, death)
    dim : int, optional
        Dimension to extract when a full :class:`PersistenceDiagram` is given.
    cap : float, optional
        Replace infinite deaths by this value before matching.  Without it,
        essential points must pair up one-to-one (matched by birth).

    Raises
    ------
    EssentialMismatch
        No ``cap`` and the diagrams have different numbers of essential points.
    """
    a, b, ess = _prepare(p1, p2, dim, cap)
    cross, ga, gb = _costs(a, b)
    m, n = cross.shape
    ess_max = float(ess.max()) if len(ess) else 0.0
    if m == 0 and n == 0:
        return DiagramDistance(ess_max, "bottleneck")
    candidates = np.unique(np.concatenate([cross.ravel(), ga, gb, [0.0]]))
    lo, hi = 0, len(candidates) - 1
    best = _perfect_matching(cross, ga, gb, candidates[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        match = _perfect_matching(cross, ga, gb, candidates[mid])
        if match is None:
            lo = mid + 1
        else:
            hi = mid
            best = match
    if best is None or hi != lo:
        best = _perfect_matching(cross, ga, gb, candidates[lo])
    value = max(float(candidates[lo]), ess_max)
    return DiagramDistance(value, "bottleneck", None, _pairings(best, m, n))


def wasserstein(p1, p2, q: float = 1.0, *, dim: Optional[int] = None,
                cap: Optional[float] = None) -> DiagramDistance:
    """Wasserstein-q distance ``(min sum cost^q)^(1/q)`` with l-infinity ground cost.

    Same parameters and errors as :func:`bottleneck`.
    """
    if not q >= 1:
        raise ValueError("q must be >= 1")
    a, b, ess = _prepare(p1, p2, dim, cap)
    cross, ga, gb = _costs(a, b)
    m, n = cross.shape
    ess_terms = [float(c) ** q for c in ess]
    if m == 0 and n == 0:
        return DiagramDistance(math.fsum(ess_terms) ** (1.0 / q), "wasserstein", q)
    size = m + n
    big = np.inf
    cost = np.zeros((size, size))
    cost[:m, :n] = cross**q
    cost[:m, n:] = big
    cost[m:, :n] = big
    cost[np.arange(m), n + np.arange(m)] = ga**q
    cost[m + np.arange(n), np.arange(n)] = gb**q
    rows, cols = linear_sum_assignment(cost)
    match = np.empty(size, dtype=int)
    match[rows] = cols
    pairs = _pairings(match, m, n)
    terms = []
    for i, j in pairs:
        if i is not None and j is not None:
            terms.append(float(cross[i, j]) ** q)
        elif i is not None:
            terms.append(float(ga[i]) ** q)
        else:
            terms.append(float(gb[j]) ** q)
    value = math.fsum(terms + ess_terms) ** (1.0 / q)
    return DiagramDistance(value, "wasserstein", q, pairs)
