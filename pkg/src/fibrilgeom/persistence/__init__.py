"""Vietoris-Rips persistent homology and diagram distances."""

from .compare import compare_structures, diagram_of
from .distances import DiagramDistance, bottleneck, wasserstein
from .filtration import FilteredComplex, Simplex, vr_filtration
from .homology import PersistenceDiagram, PersistencePair, compute_persistence

__all__ = [
    "FilteredComplex",
    "Simplex",
    "vr_filtration",
    "PersistenceDiagram",
    "PersistencePair",
    "compute_persistence",
    "DiagramDistance",
    "bottleneck",
    "wasserstein",
    "compare_structures",
    "diagram_of",
]
