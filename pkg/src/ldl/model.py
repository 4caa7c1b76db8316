"""Scenarios, correlation tables, detection bounds and observed efficiencies.

Tables are numpy arrays indexed ``table[x_1, ..., x_N, a_1, ..., a_N]`` with
0-based indices. Full correlations carry one extra outcome slot per party, the
last one, standing for a non-detection. Exact tables hold
:class:`fractions.Fraction` objects (``dtype=object``); everything else is
``float64``. Operations keep exact inputs exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Union

import numpy as np

from .errors import InconsistentEfficiencies, ScenarioMismatch, ZeroEfficiency

Number = Union[Fraction, float]

NULL_OUTCOME = "null-outcome"


def is_exact_number(v) -> bool:
    return isinstance(v, Rational) and not isinstance(v, (bool, np.bool_))


def to_number(v) -> Number:
    """Coerce to Fraction when the value is rational-typed, else to float.

    Strings are parsed exactly (``"1/3"``, ``"0.25"``, ``"1e-3"``).
    """
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, (Fraction,)):
        return v
    if isinstance(v, (Integral, np.integer)) and not isinstance(v, (bool, np.bool_)):
        return Fraction(int(v))
    if isinstance(v, Rational):
        return Fraction(v.numerator, v.denominator)
    return float(v)


def as_table(values) -> np.ndarray:
    """Return a read-only array, exact (object of Fraction) or float64."""
    if isinstance(values, np.ndarray) and values.dtype.kind == "f":
        arr = values.astype(np.float64, copy=True)
    else:
        arr = np.array(values, dtype=object)
        flat = arr.ravel()
        if all(is_exact_number(v) or isinstance(v, (np.integer, str)) for v in flat):
            conv = [to_number(v) for v in flat]
            if all(isinstance(v, Fraction) for v in conv):
                arr = np.empty(arr.shape, dtype=object)
                arr.ravel()[:] = conv
                arr = arr.reshape(np.shape(values))
            else:
                arr = np.array([float(v) for v in conv], dtype=np.float64).reshape(arr.shape)
        else:
            arr = np.array([float(v) for v in flat], dtype=np.float64).reshape(arr.shape)
    arr.setflags(write=False)
    return arr


def to_float_table(table: np.ndarray) -> np.ndarray:
    if table.dtype == object:
        return np.array([float(v) for v in table.ravel()], dtype=np.float64).reshape(table.shape)
    return table


@dataclass(frozen=True)
class Scenario:
    """Per-party input counts ``n_i`` and outcome counts ``m_i`` (no null outcome)."""

    inputs: tuple
    outcomes: tuple

    def __post_init__(self):
        inputs = tuple(int(n) for n in self.inputs)
        outcomes = tuple(int(m) for m in self.outcomes)
        if not inputs or len(inputs) != len(outcomes):
            raise ScenarioMismatch("inputs and outcomes must be nonempty lists of equal length")
        if min(inputs) < 1 or min(outcomes) < 1:
            raise ScenarioMismatch("alphabet sizes must be positive")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outcomes", outcomes)

    @classmethod
    def binary(cls, parties: int = 2) -> Scenario:
        return cls((2,) * parties, (2,) * parties)

    @property
    def n_parties(self) -> int:
        return len(self.inputs)

    def input_tuples(self):
        return list(itertools.product(*(range(n) for n in self.inputs)))

    def outcome_tuples(self, with_null: bool = False):
        extra = 1 if with_null else 0
        return list(itertools.product(*(range(m + extra) for m in self.outcomes)))

    def table_shape(self, full: bool) -> tuple:
        extra = 1 if full else 0
        return self.inputs + tuple(m + extra for m in self.outcomes)


class _Correlation:
    full: bool = False

    def __init__(self, scenario: Scenario, table):
        table = as_table(table)
        if table.shape != scenario.table_shape(self.full):
            raise ScenarioMismatch(
                f"table shape {table.shape} does not match scenario "
                f"(expected {scenario.table_shape(self.full)})"
            )
        self._scenario = scenario
        self._table = table

    @property
    def scenario(self) -> Scenario:
        return self._scenario

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def exact(self) -> bool:
        return self._table.dtype == object

    def __getitem__(self, key):
        return self._table[key]

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.scenario == other.scenario
            and self.table.shape == other.table.shape
            and bool(np.all(self.table == other.table))
        )

    __hash__ = None

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"{type(self).__name__}({self.scenario}, {kind})"

    def input_sums(self) -> np.ndarray:
        n = self.scenario.n_parties
        return self._table.sum(axis=tuple(range(n, 2 * n)))

    def as_float(self):
        return type(self)(self.scenario, to_float_table(self._table))


class FullCorrelation(_Correlation):
    """Distribution over outcomes including non-detection (last slot per party)."""

    full = True

    def detected_block(self) -> np.ndarray:
        n = self.scenario.n_parties
        idx = (slice(None),) * n + tuple(slice(0, m) for m in self.scenario.outcomes)
        return self._table[idx]


class PostselectedCorrelation(_Correlation):
    """Distribution conditioned on every party detecting."""

    full = False

    @classmethod
    def uniform(cls, scenario: Scenario, exact: bool = True) -> PostselectedCorrelation:
        k = math.prod(scenario.outcomes)
        val = Fraction(1, k) if exact else 1.0 / k
        table = np.full(scenario.table_shape(False), val, dtype=object if exact else np.float64)
        return cls(scenario, table)


@dataclass(frozen=True)
class DetectionBounds:
    """Per-party ``(eta_min, eta_max)`` limits on the per-hidden-state detection probability."""

    per_party: tuple

    def __post_init__(self):
        pairs = []
        for pair in self.per_party:
            lo, hi = (to_number(v) for v in pair)
            if not 0 <= lo <= hi <= 1:
                raise ValueError(f"need 0 <= eta_min <= eta_max <= 1, got ({lo}, {hi})")
            pairs.append((lo, hi))
        if not pairs:
            raise ValueError("at least one party required")
        object.__setattr__(self, "per_party", tuple(pairs))

    @classmethod
    def symmetric(cls, n_parties: int, eta_min, eta_max) -> DetectionBounds:
        return cls(((eta_min, eta_max),) * n_parties)

    @property
    def n_parties(self) -> int:
        return len(self.per_party)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for pair in self.per_party for v in pair)

    def joint_min(self) -> Number:
        return math.prod((lo for lo, _ in self.per_party), start=Fraction(1))

    def joint_max(self) -> Number:
        return math.prod((hi for _, hi in self.per_party), start=Fraction(1))

    def rationalized(self, max_denominator: int = 10**12) -> DetectionBounds:
        return DetectionBounds(
            tuple(tuple(_rat(v, max_denominator) for v in pair) for pair in self.per_party)
        )


def _rat(v, max_denominator):
    if isinstance(v, Fraction):
        return v
    return Fraction(v).limit_denominator(max_denominator)


class ObservedEfficiencies:
    """All-detected probability ``eta_x`` for every input tuple ``x``."""

    def __init__(self, scenario: Scenario, values):
        values = as_table(values)
        if values.shape != scenario.inputs:
            raise ScenarioMismatch(f"efficiency table shape {values.shape} != inputs {scenario.inputs}")
        for x in scenario.input_tuples():
            if not values[x] > 0:
                raise ZeroEfficiency(x, f"observed efficiency at input {[i + 1 for i in x]} must be > 0")
            if values[x] > 1:
                raise ValueError(f"efficiency {values[x]} exceeds 1")
        self._scenario = scenario
        self._values = values

    @classmethod
    def uniform(cls, scenario: Scenario, eta) -> ObservedEfficiencies:
        eta = to_number(eta)
        table = np.full(scenario.inputs, eta, dtype=object if isinstance(eta, Fraction) else np.float64)
        return cls(scenario, table)

    @classmethod
    def from_mapping(cls, scenario: Scenario, mapping) -> ObservedEfficiencies:
        vals = [to_number(mapping[x]) for x in scenario.input_tuples()]
        table = np.empty(scenario.inputs, dtype=object)
        table.ravel()[:] = vals
        return cls(scenario, table)

    @property
    def scenario(self) -> Scenario:
        return self._scenario

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def exact(self) -> bool:
        return self._values.dtype == object

    def __getitem__(self, x) -> Number:
        return self._values[tuple(x)]

    def items(self):
        return [(x, self._values[x]) for x in self._scenario.input_tuples()]

    def __eq__(self, other):
        return (
            isinstance(other, ObservedEfficiencies)
            and self.scenario == other.scenario
            and bool(np.all(self.values == other.values))
        )

    __hash__ = None

    def check_consistent(self, bounds: DetectionBounds, tol: float = 0.0) -> None:
        """Raise unless ``prod eta_min_i <= eta_x <= prod eta_max_i`` for every ``x``."""
        if bounds.n_parties != self._scenario.n_parties:
            raise ScenarioMismatch("bounds and scenario disagree on the number of parties")
        lo, hi = bounds.joint_min(), bounds.joint_max()
        for x, eta in self.items():
            if eta < lo - tol or eta > hi + tol:
                raise InconsistentEfficiencies(
                    f"eta at input {[i + 1 for i in x]} is {eta}, outside [{lo}, {hi}]"
                )

    def rationalized(self, max_denominator: int = 10**12) -> ObservedEfficiencies:
        table = np.empty(self._scenario.inputs, dtype=object)
        table.ravel()[:] = [_rat(v, max_denominator) for v in self._values.ravel()]
        return ObservedEfficiencies(self._scenario, table)


def postselect(full: FullCorrelation):
    """Condition on every party detecting.

    Returns the postselected correlation and the all-detected masses as
    :class:`ObservedEfficiencies`. Exact tables stay exact.
    """
    sc = full.scenario
    n = sc.n_parties
    block = full.detected_block()
    etas = block.sum(axis=tuple(range(n, 2 * n)))
    for x in sc.input_tuples():
        if not etas[x] > 0:
            raise ZeroEfficiency(x)
    expand = etas.reshape(etas.shape + (1,) * n)
    return PostselectedCorrelation(sc, block / expand), ObservedEfficiencies(sc, etas)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    worst_negative: Number
    negative_at: tuple | None
    worst_normalization_error: Number
    normalization_at: tuple | None
    message: str

    def to_dict(self):
        def num(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        def loc(t):
            return None if t is None else [i + 1 for i in t]

        return {
            "valid": self.valid,
            "worst_negative": num(self.worst_negative),
            "negative_at": loc(self.negative_at),
            "worst_normalization_error": num(self.worst_normalization_error),
            "normalization_at": loc(self.normalization_at),
            "message": self.message,
        }


def validate(corr: _Correlation, tol: float = 1e-9) -> Verdict:
    """Check nonnegativity and per-input normalization, reporting the worst offenses."""
    table = corr.table
    flat_min = min(table.ravel(), key=lambda v: v)
    neg_idx = None
    if flat_min < 0:
        neg_idx = tuple(int(i) for i in np.unravel_index(list(table.ravel()).index(flat_min), table.shape))
    sums = corr.input_sums()
    worst_err, worst_x = 0, None
    for x in corr.scenario.input_tuples():
        err = abs(sums[x] - 1)
        if err > worst_err:
            worst_err, worst_x = err, x
    problems = []
    if flat_min < -tol:
        problems.append(f"negative entry {flat_min} at {[i + 1 for i in neg_idx]}")
    if worst_err > tol:
        problems.append(f"normalization off by {worst_err} at input {[i + 1 for i in worst_x]}")
    return Verdict(
        valid=not problems,
        worst_negative=min(flat_min, 0),
        negative_at=neg_idx,
        worst_normalization_error=worst_err,
        normalization_at=worst_x,
        message="; ".join(problems) or "ok",
    )


def require_valid(corr: _Correlation, tol: float = 1e-9) -> None:
    verdict = validate(corr, tol)
    if not verdict.valid:
        raise ValueError(f"invalid correlation: {verdict.message}")


def _closest_fraction(v: float, tol: float) -> Fraction:
    f = Fraction(v)
    d = 1
    while True:
        g = f.limit_denominator(d)
        if abs(g - f) <= tol:
            return g
        d *= 2


def rationalize(corr: _Correlation, tol: float = 1e-9) -> _Correlation:
    """Replace every entry by a nearby fraction, keeping per-input sums exactly 1.

    Each entry moves by at most ``tol``; the largest entry of each input block
    absorbs the rounding residue. Negative float noise is clipped to zero.
    """
    if corr.exact:
        return corr
    sc = corr.scenario
    n = sc.n_parties
    k = int(np.prod(corr.table.shape[n:]))
    per_entry = tol / (2 * k)
    out = np.empty(corr.table.shape, dtype=object)
    for x in sc.input_tuples():
        block = corr.table[x]
        fr = np.empty(block.shape, dtype=object)
        fr.ravel()[:] = [_closest_fraction(max(float(v), 0.0), per_entry) for v in block.ravel()]
        top = np.unravel_index(int(np.argmax(block)), block.shape)
        fr[top] += 1 - fr.sum()
        out[x] = fr
    return type(corr)(sc, out)
