"""The explicit two-party limited-detection inequality and its violation region.

For a postselected table ``P`` and symmetric detection bounds,

    eta_min^2 P(00|00) - eta_min eta_max (P(01|01) + P(10|10)) - eta_max^2 P(00|11) <= 0

holds for every limited-detection-local model with input-independent observed
efficiency. Outcome label ``0`` is alphabet index 1 (array index 0).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ScenarioMismatch
from .model import Number, PostselectedCorrelation

EXACT_TOL = 1e-12
FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class LdlIneqResult:
    lhs: Number
    violated: bool

    @property
    def margin(self) -> Number:
        return self.lhs

    def to_dict(self):
        lhs = str(self.lhs) if isinstance(self.lhs, Fraction) else float(self.lhs)
        return {"lhs": lhs, "lhs_float": float(self.lhs), "violated": self.violated, "margin": lhs}


def hardy_terms(target: PostselectedCorrelation):
    """``(P(00|00), P(01|01), P(10|10), P(00|11))`` from a two-party binary-input table."""
    sc = target.scenario
    if sc.n_parties != 2 or sc.inputs != (2, 2) or min(sc.outcomes) < 2:
        raise ScenarioMismatch("needs two parties, two inputs each and at least two outcomes")
    t = target.table
    return t[0, 0, 0, 0], t[0, 1, 0, 1], t[1, 0, 1, 0], t[1, 1, 0, 0]


def eq5_lhs(terms, eta_min, eta_max) -> Number:
    p00, p01, p10, p11 = terms
    return eta_min**2 * p00 - eta_min * eta_max * (p01 + p10) - eta_max**2 * p11


def eval_eq5(target: PostselectedCorrelation, eta_min, eta_max, tol: float | None = None) -> LdlIneqResult:
    if not 0 <= eta_min <= eta_max <= 1:
        raise ValueError(f"need 0 <= eta_min <= eta_max <= 1, got ({eta_min}, {eta_max})")
    exact = target.exact and isinstance(eta_min, (int, Fraction)) and isinstance(eta_max, (int, Fraction))
    if tol is None:
        tol = EXACT_TOL if exact else FLOAT_TOL
    terms = hardy_terms(target)
    if exact:
        lhs = eq5_lhs(terms, Fraction(eta_min), Fraction(eta_max))
    else:
        lhs = float(eq5_lhs([float(v) for v in terms], float(eta_min), float(eta_max)))
    return LdlIneqResult(lhs, bool(lhs > tol))


def eq5_region(target: PostselectedCorrelation, grid: int, tol: float | None = None):
    """Sweep ``eta_min <= eta_max`` on a ``grid x grid`` lattice of ``[0, 1]``.

    Returns rows ``(eta_min, eta_max, lhs, violated)`` in float arithmetic.
    """
    if grid < 2:
        raise ValueError("grid needs at least 2 points per axis")
    hardy_terms(target)
    tol = FLOAT_TOL if tol is None else tol
    terms = [float(v) for v in hardy_terms(target)]
    axis = np.linspace(0.0, 1.0, grid)
    rows = []
    for hi in axis:
        for lo in axis:
            if lo > hi:
                break
            lhs = float(eq5_lhs(terms, lo, hi))
            rows.append((float(lo), float(hi), lhs, lhs > tol))
    return rows


def region_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eta_min", "eta_max", "lhs", "violated"])
    for lo, hi, lhs, v in rows:
        w.writerow([repr(lo), repr(hi), repr(lhs), "true" if v else "false"])
    return buf.getvalue()
