"""Fixed-column PDB parsing and backbone curve extraction.

Only ATOM records of the first MODEL are read.  Where an atom has alternate
locations the copy with the highest occupancy is kept (ties go to the
lexicographically smallest altLoc).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    ChainNotFound,
    CoincidentVertices,
    EmptyStructure,
    MalformedRecord,
    MissingBackboneAtom,
)

__all__ = [
    "Atom",
    "Residue",
    "Chain",
    "Structure",
    "AtomSelection",
    "VertexLabel",
    "DiscreteCurve",
    "parse_structure",
    "read_structure",
    "extract_curve",
    "format_atom_record",
    "write_structure",
]

BACKBONE = ("N", "CA", "C", "O")


@dataclass(frozen=True)
class Atom:
    serial: int
    name: str
    alt_loc: Optional[str]
    residue_seq: int
    insertion_code: Optional[str]
    chain_id: str
    position: tuple[float, float, float]
    element: str
    occupancy: float = 1.0
    residue_name: str = "UNK"

    @property
    def xyz(self) -> np.ndarray:
        return np.array(self.position)


@dataclass(frozen=True)
class Residue:
    seq: int
    name: str
    atoms: tuple[Atom, ...]
    insertion_code: Optional[str] = None

    @property
    def backbone_complete(self) -> bool:
        names = {a.name for a in self.atoms}
        return all(b in names for b in BACKBONE)

    @property
    def key(self) -> tuple[int, str]:
        return (self.seq, self.insertion_code or "")

    @property
    def label(self) -> str:
        return f"{self.seq}{self.insertion_code or ''}"

    def atom(self, name: str) -> Optional[Atom]:
        for a in self.atoms:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class Chain:
    id: str
    residues: tuple[Residue, ...]

    def residue(self, seq: int, insertion_code: str = "") -> Optional[Residue]:
        for r in self.residues:
            if r.key == (seq, insertion_code):
                return r
        return None


@dataclass(frozen=True)
class Structure:
    id: str
    chains: tuple[Chain, ...]

    def chain(self, chain_id: str) -> Chain:
        for c in self.chains:
            if c.id == chain_id:
                return c
        raise ChainNotFound(f"chain {chain_id!r} not in structure {self.id!r} "
                            f"(have {', '.join(c.id for c in self.chains) or 'none'})")

    @property
    def chain_ids(self) -> list[str]:
        return [c.id for c in self.chains]

    def atoms(self) -> Iterable[Atom]:
        for c in self.chains:
            for r in c.residues:
                yield from r.atoms


def _field(line: str, start: int, stop: int) -> str:
    return line[start:stop].strip()


def _number(line: str, lineno: int, start: int, stop: int, kind, what: str, default=None):
    raw = _field(line, start, stop)
    if not raw:
        if default is not None:
            return default
        raise MalformedRecord(lineno, f"missing {what} (columns {start + 1}-{stop})")
    try:
        value = kind(raw)
    except ValueError:
        raise MalformedRecord(lineno, f"bad {what} {raw!r} (columns {start + 1}-{stop})") from None
    if kind is float and not math.isfinite(value):
        raise MalformedRecord(lineno, f"non-finite {what} {raw!r}")
    return value


def _infer_element(name: str) -> str:
    letters = re.sub(r"[^A-Za-z]", "", name)
    return letters[:1].upper() or "X"


def _parse_atom_line(line: str, lineno: int) -> Atom:
    serial = _number(line, lineno, 6, 11, int, "serial")
    name = _field(line, 12, 16)
    if not name:
        raise MalformedRecord(lineno, "missing atom name")
    alt = line[16:17].strip() or None
    res_name = _field(line, 17, 20) or "UNK"
    chain_id = line[21:22].strip() or " "
    seq = _number(line, lineno, 22, 26, int, "residue number")
    icode = line[26:27].strip() or None
    x = _number(line, lineno, 30, 38, float, "x coordinate")
    y = _number(line, lineno, 38, 46, float, "y coordinate")
    z = _number(line, lineno, 46, 54, float, "z coordinate")
    occ = _number(line, lineno, 54, 60, float, "occupancy", default=1.0)
    if not 0.0 <= occ <= 1.0:
        raise MalformedRecord(lineno, f"occupancy {occ} outside [0, 1]")
    element = _field(line, 76, 78).upper() or _infer_element(name)
    return Atom(serial, name, alt, seq, icode, chain_id, (x, y, z), element, occ, res_name)


def _alt_rank(atom: Atom):
    # highest occupancy first, then smallest altLoc
    return (-atom.occupancy, atom.alt_loc or "")


def parse_structure(text: str | Iterable[str], structure_id: str = "") -> Structure:
    """Parse PDB text into a :class:`Structure`.

    Parameters
    ----------
    text : str or iterable of lines
        Fixed-column PDB content.
    structure_id : str
        Label stored on the result; defaults to the HEADER idCode if present.

    Raises
    ------
    MalformedRecord
        A numeric field of an ATOM record does not parse (line number attached).
    EmptyStructure
        No ATOM records in the first model.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    # chain id -> residue key -> {"name": str, "atoms": {atom name: [Atom, ...]}}
    chains: dict[str, dict[tuple[int, str], dict]] = {}
    seen_model = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        record = line[:6]
        if record.startswith("HEADER") and not structure_id:
            structure_id = _field(line, 62, 66)
        elif record.startswith("MODEL"):
            if seen_model:
                break
            seen_model = True
        elif record.startswith("ENDMDL"):
            break
        elif record == "ATOM  " or record.rstrip() == "ATOM":
            atom = _parse_atom_line(line, lineno)
            residues = chains.setdefault(atom.chain_id, {})
            key = (atom.residue_seq, atom.insertion_code or "")
            res = residues.setdefault(key, {"name": atom.residue_name, "atoms": {}})
            res["atoms"].setdefault(atom.name, []).append(atom)

    if not chains:
        raise EmptyStructure("no ATOM records found")

    built = []
    for chain_id, residues in chains.items():
        out = []
        for key in sorted(residues):
            res = residues[key]
            atoms = tuple(min(copies, key=_alt_rank) for copies in res["atoms"].values())
            out.append(Residue(key[0], res["name"], atoms, key[1] or None))
        built.append(Chain(chain_id, tuple(out)))
    return Structure(structure_id, tuple(built))


def read_structure(path: str | Path) -> Structure:
    path = Path(path)
    with path.open("r", errors="replace") as fh:
        return parse_structure(fh.read(), structure_id=path.stem)


def format_atom_record(atom: Atom) -> str:
    """Serialize one atom as an 80-column ATOM record."""
    name = atom.name
    # four-character names and two-letter elements start in column 13
    padded = name if len(name) >= 4 or len(atom.element) == 2 else f" {name}"
    x, y, z = atom.position
    return (
        f"ATOM  {atom.serial:5d} {padded:<4s}{atom.alt_loc or ' '}{atom.residue_name:>3s} "
        f"{atom.chain_id:1s}{atom.residue_seq:4d}{atom.insertion_code or ' '}   "
        f"{x:8.3f}{y:8.3f}{z:8.3f}{atom.occupancy:6.2f}{0.0:6.2f}          "
        f"{atom.element:>2s}  "
    )


def write_structure(structure: Structure) -> str:
    lines = [format_atom_record(a) for a in structure.atoms()]
    lines.append("END")
    return "\n".join(lines) + "\n"


class AtomSelection(enum.Enum):
    CA_ONLY = ("CA",)
    N_CA_C = ("N", "CA", "C")

    @classmethod
    def parse(cls, value: "str | AtomSelection") -> "AtomSelection":
        if isinstance(value, cls):
            return value
        key = value.strip().lower()
        aliases = {"ca": cls.CA_ONLY, "ca_only": cls.CA_ONLY,
                   "backbone": cls.N_CA_C, "n_ca_c": cls.N_CA_C, "ncac": cls.N_CA_C}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown atom selection {value!r}") from None


class VertexLabel(NamedTuple):
    chain_id: str
    residue_seq: int
    atom_class: str
    insertion_code: str = ""

    @property
    def residue_label(self) -> str:
        return f"{self.residue_seq}{self.insertion_code}"


@dataclass(frozen=True)
class DiscreteCurve:
    """Ordered vertices of a polygonal space curve, in Angstrom."""

    vertices: np.ndarray
    labels: tuple[VertexLabel, ...] = ()
    gaps: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 1:
            raise ValueError(f"vertices must be a non-empty (n, 3) array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        repeats = np.flatnonzero(np.all(v[1:] == v[:-1], axis=1))
        if len(repeats):
            raise CoincidentVertices(f"vertices {repeats[0]} and {repeats[0] + 1} coincide")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        labels = tuple(self.labels)
        if labels and len(labels) != len(v):
            raise ValueError("labels and vertices differ in length")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def has_gaps(self) -> bool:
        return bool(self.gaps)

    @property
    def atom_classes(self) -> list[str]:
        return [lab.atom_class for lab in self.labels]


def extract_curve(
    structure: Structure,
    chain_id: str,
    selection: "AtomSelection | str" = AtomSelection.CA_ONLY,
    residue_range: Optional[tuple[int, int]] = None,
) -> DiscreteCurve:
    """Backbone atoms of one chain as a discrete curve.

    ``CA_ONLY`` gives one vertex per residue; ``N_CA_C`` gives three, in the
    order N, CA, C.  ``residue_range`` is an inclusive ``(first, last)`` pair of
    residue numbers.  Breaks in residue numbering are recorded in ``gaps``
    rather than rejected.
    """
    selection = AtomSelection.parse(selection)
    chain = structure.chain(chain_id)
    residues = chain.residues
    if residue_range is not None:
        lo, hi = residue_range
        residues = tuple(r for r in residues if lo <= r.seq <= hi)
    if not residues:
        raise MissingBackboneAtom(residue_range[0] if residue_range else 0,
                                  "/".join(selection.value), chain_id)

    vertices: list[tuple[float, float, float]] = []
    labels: list[VertexLabel] = []
    for res in residues:
        for name in selection.value:
            atom = res.atom(name)
            if atom is None:
                raise MissingBackboneAtom(res.seq, name, chain_id)
            vertices.append(atom.position)
            labels.append(VertexLabel(chain_id, res.seq, name, res.insertion_code or ""))

    gaps = tuple((a.seq, b.seq) for a, b in zip(residues, residues[1:]) if b.seq - a.seq > 1)
    return DiscreteCurve(np.array(vertices), tuple(labels), gaps)


def shared_residue_keys(a: Chain, b: Chain, residue_range: Optional[tuple[int, int]] = None
                        ) -> list[tuple[int, str]]:
    """Residue keys present in both chains, in chain ``a`` order."""
    keys_b = {r.key for r in b.residues}
    out = [r.key for r in a.residues if r.key in keys_b]
    if residue_range is not None:
        out = [k for k in out if residue_range[0] <= k[0] <= residue_range[1]]
    return out


def select_residues(chain: Chain, keys: Sequence[tuple[int, str]]) -> Chain:
    wanted = set(keys)
    return Chain(chain.id, tuple(r for r in chain.residues if r.key in wanted))
