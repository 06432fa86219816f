"""Exception hierarchy.

Every error carries a ``category`` (the class name) and an ``exit_code`` used
by the command line front end: 2 for bad input, 3 for numeric degeneracy.
"""

from __future__ import annotations


class FibrilGeomError(ValueError):
    exit_code = 4

    @property
    def category(self) -> str:
        return type(self).__name__


class InputError(FibrilGeomError):
    exit_code = 2


class DegeneracyError(FibrilGeomError):
    exit_code = 3


# --- parsing / selection -------------------------------------------------
class MalformedRecord(InputError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class EmptyStructure(InputError):
    pass


class ChainNotFound(InputError):
    pass


class MissingBackboneAtom(InputError):
    def __init__(self, residue_seq: int, atom_name: str, chain_id: str = ""):
        self.residue_seq = residue_seq
        self.atom_name = atom_name
        self.chain_id = chain_id
        where = f"chain {chain_id} " if chain_id else ""
        super().__init__(f"{where}residue {residue_seq} lacks atom {atom_name}")


class CoincidentVertices(InputError):
    pass


class LabelPatternViolation(InputError):
    pass


# --- metrics ---------------------------------------------------------------
class IndexOutOfRange(InputError, IndexError):
    pass


class CurveTooShort(InputError):
    pass


class LengthMismatch(InputError):
    pass


class DegenerateConfiguration(DegeneracyError):
    pass


# --- quaternion layer ------------------------------------------------------
class ZeroQuaternion(DegeneracyError, ZeroDivisionError):
    pass


class CoincidentPoints(DegeneracyError):
    pass


class BranchFailure(DegeneracyError):
    pass


class NonPositiveRealBranch(BranchFailure):
    pass


class DegenerateQuadruple(DegeneracyError):
    pass


# --- curvature / torsion ---------------------------------------------------
class DegenerateWindow(DegeneracyError):
    def __init__(self, reason: str, message: str = ""):
        self.reason = reason
        super().__init__(message or reason)


class SingularSystem(DegeneracyError):
    pass


# --- statistics ------------------------------------------------------------
class LayerListTooShort(InputError):
    pass


class InsufficientData(InputError):
    pass


class ZeroVariance(DegeneracyError):
    pass


# --- persistence -----------------------------------------------------------
class DuplicatePoints(InputError):
    def __init__(self, i: int, j: int):
        self.indices = (i, j)
        super().__init__(f"points {i} and {j} coincide")


class EssentialMismatch(InputError):
    pass


class UnsupportedDimension(InputError):
    pass
