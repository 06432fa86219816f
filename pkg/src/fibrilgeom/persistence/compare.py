"""Topological comparison of two point clouds."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .distances import bottleneck, wasserstein
from .filtration import vr_filtration
from .homology import PersistenceDiagram, compute_persistence

__all__ = ["diagram_of", "compare_structures", "thread_limit"]


def thread_limit() -> int:
    raw = os.environ.get("FIBRILGEOM_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return os.cpu_count() or 1


def diagram_of(points, max_eps: float, max_dim: int = 2) -> PersistenceDiagram:
    return compute_persistence(vr_filtration(points, max_dim=max_dim, max_eps=max_eps))


def compare_structures(p1, p2, max_eps: float, q: float = 1.0, *, return_diagrams: bool = False):
    """Bottleneck and Wasserstein-q distances between the H0 and H1 diagrams of two clouds.

    Both clouds are filtered up to ``max_eps``; infinite deaths are replaced
    by ``max_eps`` before matching.  Returns ``{"dim0": {...}, "dim1": {...}}``
    and, with ``return_diagrams``, the two diagrams as well.
    """
    p1, p2 = np.asarray(p1, dtype=float), np.asarray(p2, dtype=float)
    if len(p1) == 0 or len(p2) == 0:
        raise ValueError("point clouds must be non-empty")
    workers = min(2, thread_limit())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            d1, d2 = pool.map(lambda p: diagram_of(p, max_eps), (p1, p2))
    else:
        d1, d2 = diagram_of(p1, max_eps), diagram_of(p2, max_eps)
    result = {}
    for dim in (0, 1):
        b = bottleneck(d1, d2, dim=dim, cap=max_eps)
        w = wasserstein(d1, d2, q, dim=dim, cap=max_eps)
        result[f"dim{dim}"] = {"bottleneck": b.value, "wasserstein": w.value, "q": q}
    if return_diagrams:
        return result, d1, d2
    return result
