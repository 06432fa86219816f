"""CSV/JSON artifact writers and readers."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .curvature import ATOM_CLASSES, ClassSummary, GeometryProfile
from .persistence.homology import PersistenceDiagram

__all__ = [
    "matrix_csv",
    "binary_csv",
    "matrix_json",
    "diagram_csv",
    "read_diagram_csv",
    "parse_diagram_csv",
    "profile_csv",
    "summary_dict",
    "hbond_csv",
    "dump_json",
    "fmt_float",
]


def fmt_float(x: Optional[float], spec: str = ".10g") -> str:
    if x is None:
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, spec)


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dump_json(obj) -> str:
    """Deterministic JSON; non-finite floats become ``null``."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _write_rows(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def matrix_csv(entries: np.ndarray, labels: Sequence[str]) -> str:
    """Labelled square matrix, values in Angstrom with 3 decimals."""
    labels = list(labels) or [str(i) for i in range(len(entries))]
    rows = [[""] + labels]
    for lab, row in zip(labels, entries):
        rows.append([lab] + [f"{v:.3f}" for v in row])
    return _write_rows(rows)


def binary_csv(entries: np.ndarray, labels: Sequence[str]) -> str:
    labels = list(labels) or [str(i) for i in range(len(entries))]
    rows = [[""] + labels]
    for lab, row in zip(labels, entries):
        rows.append([lab] + [str(int(v)) for v in row])
    return _write_rows(rows)


def matrix_json(entries: np.ndarray, labels: Sequence[str], decimals: Optional[int] = 3) -> str:
    if entries.dtype == bool:
        matrix = entries.astype(int).tolist()
    else:
        matrix = [[round(float(v), decimals) for v in row] for row in entries]
    return dump_json({"labels": list(labels), "matrix": matrix})


def diagram_csv(diagram: PersistenceDiagram) -> str:
    rows = [("dimension", "birth", "death")]
    rows += [(dim, fmt_float(b, ".17g"), fmt_float(d, ".17g")) for dim, b, d in diagram.points]
    return _write_rows(rows)


def parse_diagram_csv(text: str) -> dict[int, np.ndarray]:
    """Parse diagram CSV text into ``{dimension: (k, 2) array}``; ``inf`` deaths allowed."""
    out: dict[int, list] = {}
    for row in csv.DictReader(io.StringIO(text)):
        out.setdefault(int(row["dimension"]), []).append((float(row["birth"]), float(row["death"])))
    return {k: np.array(v, dtype=float).reshape(-1, 2) for k, v in sorted(out.items())}


def read_diagram_csv(path) -> dict[int, np.ndarray]:
    return parse_diagram_csv(Path(path).read_text())


def profile_csv(profile: GeometryProfile) -> str:
    rows = [("chain", "residue_seq", "atom_class", "curvature", "torsion", "degenerate_reason")]
    for e in profile.entries:
        lab = e.label
        rows.append((
            lab.chain_id if lab else "",
            lab.residue_label if lab else e.vertex_index,
            e.atom_class,
            fmt_float(e.curvature),
            fmt_float(e.torsion),
            e.degenerate or "",
        ))
    return _write_rows(rows)


def summary_dict(summary: dict[str, ClassSummary]) -> dict:
    """Mean and unbiased variance of |kappa| and |tau|, pooled and per atom class."""
    keys = ("all",) + ATOM_CLASSES
    return {
        "mean_abs_curvature": {k: summary[k].mean_abs_curvature for k in keys},
        "mean_abs_torsion": {k: summary[k].mean_abs_torsion for k in keys},
        "var_abs_curvature": {k: summary[k].var_abs_curvature for k in keys},
        "var_abs_torsion": {k: summary[k].var_abs_torsion for k in keys},
        "count": {k: summary[k].count for k in keys},
        "excluded_degenerate": {k: summary[k].excluded for k in keys},
    }


def hbond_csv(records, taus) -> str:
    rows = [("layer", "residue", "d_minus", "d_plus", "dtilde", "abs_torsion_C")]
    for rec, tau in zip(records, taus):
        rows.append((rec.chain_id, rec.residue_index, fmt_float(rec.d_minus),
                     fmt_float(rec.d_plus), fmt_float(rec.dtilde), fmt_float(float(tau))))
    return _write_rows(rows)
