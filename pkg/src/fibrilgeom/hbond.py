"""Layer-to-layer O..N distances and the torsion/distance regression.

For layer ``*`` of a fibril stack and residue ``i`` the carbonyl oxygen
``O_i^*`` can donate to ``N_{i+1}`` of either neighbouring layer.  With
``d-`` the distance to the ``*-1`` layer and ``d+`` to the ``*+1`` layer the
squared distance difference is ``|d-^2 - d+^2|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curvature import GeometryProfile
from .errors import InsufficientData, LayerListTooShort, ZeroVariance
from .pdb_ingest import Structure

__all__ = [
    "LayerPairDistance",
    "DistanceScan",
    "RegressionResult",
    "squared_distance_differences",
    "join_carbonyl_torsions",
    "regress_torsion_vs_distance",
    "betainc_regularized",
    "t_cdf",
]


@dataclass(frozen=True)
class LayerPairDistance:
    layer_index: int
    chain_id: str
    residue_index: int
    d_minus: float
    d_plus: float

    @property
    def dtilde(self) -> float:
        return abs(self.d_minus**2 - self.d_plus**2)


@dataclass(frozen=True)
class DistanceScan:
    records: tuple[LayerPairDistance, ...]
    skipped_layers: int
    skipped_residues: int

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


def squared_distance_differences(structure: Structure, layer_order: Sequence[str]) -> DistanceScan:
    """O_i of each interior layer against N_{i+1} of the layers on either side.

    Residues are matched across layers by residue number.  The first and last
    layer have a single neighbour and are skipped, as are residues where any of
    the three atoms is missing; both counts are reported.

    Raises
    ------
    LayerListTooShort
        Fewer than three layers.
    """
    if len(layer_order) < 3:
        raise LayerListTooShort(f"need at least 3 layers, got {len(layer_order)}")
    chains = [structure.chain(cid) for cid in layer_order]

    def nitrogen(chain, seq):
        res = chain.residue(seq)
        atom = res.atom("N") if res is not None else None
        return np.array(atom.position) if atom is not None else None

    records = []
    skipped = 0
    for k in range(1, len(chains) - 1):
        below, layer, above = chains[k - 1], chains[k], chains[k + 1]
        for res in layer.residues:
            if res.insertion_code:
                skipped += 1
                continue
            o = res.atom("O")
            n_minus = nitrogen(below, res.seq + 1)
            n_plus = nitrogen(above, res.seq + 1)
            if o is None or n_minus is None or n_plus is None:
                skipped += 1
                continue
            op = np.array(o.position)
            records.append(LayerPairDistance(
                k, layer.id, res.seq,
                float(np.linalg.norm(op - n_minus)),
                float(np.linalg.norm(op - n_plus)),
            ))
    return DistanceScan(tuple(records), 2, skipped)


def join_carbonyl_torsions(scan: DistanceScan, profiles: dict[str, GeometryProfile]
                           ) -> tuple[list[LayerPairDistance], np.ndarray, np.ndarray, int]:
    """Pair each distance record with |tau| at the carbonyl carbon C_i of its layer.

    Returns the kept records, the |tau| values, the matching dtilde values and
    the number of records dropped for lack of a (non-degenerate) torsion.
    """
    lookup = {}
    for chain_id, profile in profiles.items():
        for e in profile.entries:
            if e.atom_class == "C" and e.label is not None and not e.is_degenerate:
                lookup[(chain_id, e.label.residue_seq)] = abs(e.torsion)
    kept, taus, dts = [], [], []
    for rec in scan.records:
        tau = lookup.get((rec.chain_id, rec.residue_index))
        if tau is None:
            continue
        kept.append(rec)
        taus.append(tau)
        dts.append(rec.dtilde)
    return kept, np.array(taus), np.array(dts), len(scan.records) - len(kept)


# --- t distribution --------------------------------------------------------

def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def _stirling_tail(x: float) -> float:
    # lgamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2], accurate to ~1e-16 for x >= 10
    x2 = x * x
    return (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - (1.0 / 1680 - 1.0 / (1188 * x2)) / x2) / x2) / x2) / x


def _log_beta_front(a: float, b: float) -> float:
    """``lgamma(a + b) - lgamma(a) - lgamma(b)`` without cancellation for large arguments."""
    big, small = max(a, b), min(a, b)
    if big < 10.0:
        return math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    # lgamma(big + small) - lgamma(big) from Stirling's series
    diff = ((big - 0.5) * math.log1p(small / big) + small * math.log(big + small) - small
            + _stirling_tail(big + small) - _stirling_tail(big))
    return diff - math.lgamma(small)


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = _log_beta_front(a, b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_sf_abs(t: float, df: float) -> float:
    """``P(T > |t|)`` for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return 0.5 * betainc_regularized(0.5 * df, 0.5, df / (df + t * t))


def t_cdf(t: float, df: float) -> float:
    tail = t_sf_abs(t, df)
    return tail if t < 0 else 1.0 - tail


# --- regression ------------------------------------------------------------

@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    pearson_r: float
    p_value: float
    se_slope: float
    se_intercept: float
    n: int
    t_statistic: float
    p_value_negative: float

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "pearson_r": self.pearson_r,
            "p_value": self.p_value,
            "p_value_one_sided_negative": self.p_value_negative,
            "se_slope": self.se_slope,
            "se_intercept": self.se_intercept,
            "t_statistic": self.t_statistic,
            "n": self.n,
        }


def regress_torsion_vs_distance(taus, dtildes) -> RegressionResult:
    """Ordinary least squares of |tau| (response) on dtilde (predictor).

    ``p_value`` is the two-sided Wald test of zero slope, with
    ``t = r sqrt((n-2)/(1-r^2))`` on ``n - 2`` degrees of freedom.
    ``p_value_negative`` is the one-sided value against the alternative of
    negative correlation.
    """
    y = np.asarray(taus, dtype=float)
    x = np.asarray(dtildes, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InsufficientData(f"mismatched inputs of shapes {y.shape} and {x.shape}")
    n = len(x)
    if n < 3:
        raise InsufficientData(f"need at least 3 samples, got {n}")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx, syy, sxy = float(dx @ dx), float(dy @ dy), float(dx @ dy)
    if sxx == 0.0:
        raise ZeroVariance("all predictor values are equal")
    if syy == 0.0:
        raise ZeroVariance("all response values are equal")
    slope = sxy / sxx
    intercept = float(ym - slope * xm)
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    resid = y - (intercept + slope * x)
    sse = float(resid @ resid)
    df = n - 2
    s2 = sse / df if df > 0 else math.nan
    se_slope = math.sqrt(s2 / sxx)
    se_intercept = math.sqrt(s2 * (1.0 / n + xm * xm / sxx))
    if abs(r) >= 1.0:
        t = math.copysign(math.inf, r)
    else:
        t = r * math.sqrt(df / (1.0 - r * r))
    p_two = min(1.0, 2.0 * t_sf_abs(t, df))
    p_neg = t_cdf(t, df) if math.isfinite(t) else (0.0 if t < 0 else 1.0)
    return RegressionResult(slope, intercept, r, p_two, se_slope, se_intercept, n, t, p_neg)
