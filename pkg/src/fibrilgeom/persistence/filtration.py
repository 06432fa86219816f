"""Vietoris-Rips filtrations.

A simplex enters at ``eps`` once all its pairwise distances are ``<= 2 eps``,
i.e. its filtration value is half its diameter.  This radius convention
halves every birth and death compared with tools that filter by diameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import DuplicatePoints, UnsupportedDimension

__all__ = ["Simplex", "FilteredComplex", "vr_filtration", "pairwise_distances"]

MAX_DIM = 2


@dataclass(frozen=True, order=True)
class Simplex:
    value: float
    dim: int
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class FilteredComplex:
    """Simplices sorted by (filtration value, dimension, vertex tuple)."""

    simplices: tuple[Simplex, ...]
    n_points: int
    max_dim: int
    max_eps: float

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    def count(self, dim: int) -> int:
        return sum(1 for s in self.simplices if s.dim == dim)

    def index(self) -> dict[tuple[int, ...], int]:
        return {s.vertices: k for k, s in enumerate(self.simplices)}

    def is_face_monotone(self) -> bool:
        pos = self.index()
        for k, s in enumerate(self.simplices):
            if s.dim == 0:
                continue
            for face in combinations(s.vertices, s.dim):
                j = pos.get(face)
                if j is None or j >= k or self.simplices[j].value > s.value:
                    return False
        return True


def pairwise_distances(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = math.dist(pts[i], pts[j])
    return d


def vr_filtration(points, max_dim: int = 2, max_eps: float = math.inf) -> FilteredComplex:
    """Vietoris-Rips complex up to ``max_dim``, truncated at ``max_eps``.

    Raises
    ------
    DuplicatePoints
        Two input points coincide.
    UnsupportedDimension
        ``max_dim`` above 2.
    """
    if not 0 <= max_dim <= MAX_DIM:
        raise UnsupportedDimension(f"max_dim must be 0, 1 or 2, got {max_dim}")
    if not max_eps > 0:
        raise ValueError("max_eps must be positive")
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = len(pts)
    dist = pairwise_distances(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] == 0.0:
                raise DuplicatePoints(i, j)
    half = dist / 2.0

    simplices = [Simplex(0.0, 0, (i,)) for i in range(n)]
    # neighbours with larger index within reach
    nbrs = [[j for j in range(i + 1, n) if half[i, j] <= max_eps] for i in range(n)]
    if max_dim >= 1:
        for i in range(n):
            for j in nbrs[i]:
                simplices.append(Simplex(float(half[i, j]), 1, (i, j)))
    if max_dim >= 2:
        for i in range(n):
            ni = nbrs[i]
            for a, j in enumerate(ni):
                for k in ni[a + 1:]:
                    if half[j, k] <= max_eps:
                        v = max(half[i, j], half[i, k], half[j, k])
                        simplices.append(Simplex(float(v), 2, (i, j, k)))
    simplices.sort()
    return FilteredComplex(tuple(simplices), n, max_dim, float(max_eps))
