"""Extremal limited-detection strategies and their multi-party products.

A single-party vertex fixes, for every input, one outcome that fires with
probability ``eta_min`` or ``eta_max`` (non-detection otherwise). A product
vertex is the tensor product of one such strategy per party.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ScenarioMismatch, SizeOverflow
from .model import DetectionBounds, FullCorrelation, Number, Scenario

DEFAULT_CAP = 10**7

MIN, MAX = "min", "max"


@dataclass(frozen=True)
class SinglePartyVertex:
    """Per input: chosen outcome (``None`` when the efficiency is zero), level, efficiency."""

    outcomes: tuple
    levels: tuple
    effs: tuple
    n_outcomes: int

    def table(self) -> np.ndarray:
        """``V(a|x)`` of shape ``(n_inputs, n_outcomes + 1)``, null outcome last."""
        exact = all(isinstance(e, Fraction) for e in self.effs)
        zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
        t = np.full((len(self.outcomes), self.n_outcomes + 1), zero, dtype=object if exact else np.float64)
        for x, (a, eta) in enumerate(zip(self.outcomes, self.effs)):
            if a is not None:
                t[x, a] = eta
            t[x, -1] = one - eta
        return t

    def label(self):
        return [
            [None if a is None else a + 1, lvl] for a, lvl in zip(self.outcomes, self.levels)
        ]


@dataclass(frozen=True)
class ProductVertex:
    parts: tuple

    @property
    def scenario(self) -> Scenario:
        return Scenario(
            tuple(len(p.outcomes) for p in self.parts), tuple(p.n_outcomes for p in self.parts)
        )

    def label(self):
        return [p.label() for p in self.parts]

    def detection(self, x) -> Number:
        """Probability that every party detects at input tuple ``x``."""
        return math.prod((p.effs[xi] for p, xi in zip(self.parts, x)), start=Fraction(1))


def _input_options(m: int, lo, hi):
    """Distinct (outcome, level, eta) choices for one input, in documented order."""
    levels = [(MIN, lo)] if lo == hi else [(MIN, lo), (MAX, hi)]
    opts = []
    seen_null = False
    for a in range(m):
        for lvl, eta in levels:
            if eta == 0:
                # a zero-efficiency choice is the same behavior for every outcome
                if seen_null:
                    continue
                seen_null = True
                opts.append((None, lvl, eta))
            else:
                opts.append((a, lvl, eta))
    return opts


def party_vertex_count(m: int, n: int, lo, hi) -> int:
    return len(_input_options(m, lo, hi)) ** n


def ldl_vertex_count(scenario: Scenario, bounds: DetectionBounds) -> int:
    _check(scenario, bounds)
    return math.prod(
        party_vertex_count(m, n, lo, hi)
        for m, n, (lo, hi) in zip(scenario.outcomes, scenario.inputs, bounds.per_party)
    )


def _check(scenario: Scenario, bounds: DetectionBounds):
    if bounds.n_parties != scenario.n_parties:
        raise ScenarioMismatch(
            f"bounds given for {bounds.n_parties} parties, scenario has {scenario.n_parties}"
        )


def enumerate_party_vertices(
    scenario: Scenario, party: int, bounds: DetectionBounds, cap: int = DEFAULT_CAP
) -> list[SinglePartyVertex]:
    """All vertices of one party's limited-detection polytope, lexicographically ordered.

    The count is ``(m * k) ** n`` with ``k = 2`` when ``eta_min < eta_max`` and
    ``k = 1`` otherwise. When ``eta_min == 0`` the ``m`` zero-efficiency
    choices coincide and are emitted once.
    """
    _check(scenario, bounds)
    if not 0 <= party < scenario.n_parties:
        raise ScenarioMismatch(f"party index {party} out of range")
    m, n = scenario.outcomes[party], scenario.inputs[party]
    lo, hi = bounds.per_party[party]
    opts = _input_options(m, lo, hi)
    count = len(opts) ** n
    if count > cap:
        raise SizeOverflow(count, cap)
    out = []
    for combo in itertools.product(opts, repeat=n):
        a, lvl, eta = zip(*combo)
        out.append(SinglePartyVertex(tuple(a), tuple(lvl), tuple(eta), m))
    return out


def enumerate_ldl_vertices(
    scenario: Scenario, bounds: DetectionBounds, cap: int = DEFAULT_CAP
) -> list[ProductVertex]:
    """Cartesian product of the per-party vertex lists (party 0 most significant)."""
    count = ldl_vertex_count(scenario, bounds)
    if count > cap:
        raise SizeOverflow(count, cap)
    per_party = [enumerate_party_vertices(scenario, i, bounds, cap) for i in range(scenario.n_parties)]
    return [ProductVertex(parts) for parts in itertools.product(*per_party)]


def _outer(tables):
    """Combine per-party ``(n_i, k_i)`` tables into ``[x_1..x_N, a_1..a_N]`` form."""
    result = tables[0]
    for t in tables[1:]:
        result = np.multiply.outer(result, t)
    n = len(tables)
    # axes are currently (x1, a1, x2, a2, ...)
    order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    return result.transpose(order)


def vertex_to_full(v: ProductVertex) -> FullCorrelation:
    return FullCorrelation(v.scenario, _outer([p.table() for p in v.parts]))


def vertex_matrix(vertices, scenario: Scenario, exact: bool) -> np.ndarray:
    """Rows are vertices, columns the all-detected entries ``V(a|x)`` in C order."""
    n_cols = math.prod(scenario.inputs) * math.prod(scenario.outcomes)
    mat = np.empty((len(vertices), n_cols), dtype=object if exact else np.float64)
    n = scenario.n_parties
    for r, v in enumerate(vertices):
        tables = [p.table()[:, : p.n_outcomes] for p in v.parts]
        if not exact:
            tables = [t.astype(np.float64) for t in tables]
        block = _outer(tables)
        assert block.ndim == 2 * n
        mat[r] = block.ravel()
    return mat


def redundant_vertices(vertices, scenario: Scenario) -> list[int]:
    """Indices of listed vertices that are convex combinations of the others.

    Solved by one small LP per vertex on the full (null-inclusive) tables, so
    only meant for desk-scale instances.
    """
    from scipy.optimize import linprog

    pts = np.array(
        [np.asarray(vertex_to_full(v).table, dtype=float).ravel() for v in vertices]
    )
    out = []
    for i in range(len(pts)):
        others = np.delete(pts, i, axis=0)
        a_eq = np.vstack([others.T, np.ones(len(others))])
        b_eq = np.append(pts[i], 1.0)
        res = linprog(np.zeros(len(others)), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if res.status == 0:
            out.append(i)
    return out
