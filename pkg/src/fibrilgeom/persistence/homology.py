"""Persistent homology over Z/2 by boundary-matrix column reduction.

Columns are stored as Python integers used as bitsets: bit ``k`` set means
simplex ``k`` (in filtration order) is in the chain.  Adding columns is XOR
and the pivot (lowest one) is the highest set bit.  Dimensions are reduced
from the top down so that pivot rows found in dimension ``d`` clear the
corresponding columns of dimension ``d - 1`` (the twist optimisation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .filtration import FilteredComplex

__all__ = ["PersistencePair", "PersistenceDiagram", "compute_persistence", "boundary_columns"]


@dataclass(frozen=True)
class PersistencePair:
    dim: int
    birth: float
    death: float
    birth_simplex: int
    death_simplex: Optional[int] = None

    @property
    def essential(self) -> bool:
        return math.isinf(self.death)

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (dimension, birth, death) intervals; the diagonal is implicit.

    ``pairs`` keeps every interval found by the reduction, including
    zero-length ones; ``points`` and :meth:`in_dimension` omit those.
    """

    pairs: tuple[PersistencePair, ...]
    max_dim: int

    @property
    def points(self) -> list[tuple[int, float, float]]:
        return sorted((p.dim, p.birth, p.death) for p in self.pairs if p.death > p.birth)

    def in_dimension(self, dim: int) -> np.ndarray:
        """``(k, 2)`` array of (birth, death) in one dimension, sorted."""
        rows = [(b, d) for (q, b, d) in self.points if q == dim]
        return np.array(rows, dtype=float).reshape(-1, 2)

    def essential_count(self, dim: int) -> int:
        return sum(1 for p in self.pairs if p.dim == dim and p.essential)

    @property
    def dimensions(self) -> range:
        return range(self.max_dim)

    def with_dimension(self, dim: int) -> "PersistenceDiagram":
        return PersistenceDiagram(tuple(p for p in self.pairs if p.dim == dim), self.max_dim)


def boundary_columns(cx: FilteredComplex) -> list[int]:
    pos = cx.index()
    cols = []
    for s in cx.simplices:
        col = 0
        if s.dim > 0:
            for face in combinations(s.vertices, s.dim):
                col |= 1 << pos[face]
        cols.append(col)
    return cols


def compute_persistence(cx: FilteredComplex) -> PersistenceDiagram:
    """Persistence pairs of a filtered complex.

    Homology is reported in dimensions ``0 .. max_dim - 1``; the top dimension
    of a truncated complex has no cofaces, so its classes would be artifacts.
    """
    simplices = cx.simplices
    cols = boundary_columns(cx)
    dims = [s.dim for s in simplices]
    low_to_col: dict[int, int] = {}
    cleared = set()
    for d in range(cx.max_dim, 0, -1):
        for j, s in enumerate(simplices):
            if dims[j] != d or j in cleared:
                continue
            col = cols[j]
            while col:
                low = col.bit_length() - 1
                other = low_to_col.get(low)
                if other is None:
                    break
                col ^= cols[other]
            cols[j] = col
            if col:
                low = col.bit_length() - 1
                low_to_col[low] = j
                cleared.add(low)

    pairs = []
    paired = set(low_to_col)
    paired.update(low_to_col.values())
    for low, j in low_to_col.items():
        b = simplices[low]
        pairs.append(PersistencePair(b.dim, b.value, simplices[j].value, low, j))
    top = max(cx.max_dim, 1)
    for k, s in enumerate(simplices):
        # every unpaired simplex below the top dimension has a zero column
        if s.dim < top and k not in paired:
            pairs.append(PersistencePair(s.dim, s.value, math.inf, k, None))
    pairs.sort(key=lambda p: (p.dim, p.birth, p.death, p.birth_simplex))
    return PersistenceDiagram(tuple(pairs), top)
