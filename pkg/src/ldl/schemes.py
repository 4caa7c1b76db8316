"""Partial outcome assignment for lost events, and the map to measurement-dependent locality.

With detector efficiency ``eta``, each non-detection is turned into an outcome
drawn from a local distribution with probability ``eta_assign``. Postselecting
on an outcome then yields a correlation with detection bounds
``(eta_assign, 1)``. ``eta_assign = 0`` is plain postselection,
``eta_assign = 1`` is full assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ScenarioMismatch, SignallingInput, ZeroEtaMin
from .model import Number, PostselectedCorrelation, as_table, to_number


def _local_table(dist, n_inputs, n_outcomes):
    t = as_table(dist)
    if t.shape != (n_inputs, n_outcomes):
        raise ScenarioMismatch(f"local distribution has shape {t.shape}, expected {(n_inputs, n_outcomes)}")
    for x in range(n_inputs):
        if min(t[x]) < 0 or abs(sum(t[x]) - 1) > 1e-12:
            raise ValueError(f"local distribution for input {x + 1} is not normalized")
    return t


@dataclass(frozen=True, eq=False)
class SchemeParams:
    eta: Number
    eta_min_assign: Number
    pl_a: np.ndarray
    pl_b: np.ndarray

    def __post_init__(self):
        eta, assign = to_number(self.eta), to_number(self.eta_min_assign)
        if not 0 < eta <= 1:
            raise ValueError("detector efficiency must lie in (0, 1]")
        if not 0 <= assign <= 1:
            raise ValueError("assignment probability must lie in [0, 1]")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "eta_min_assign", assign)
        object.__setattr__(self, "pl_a", as_table(self.pl_a))
        object.__setattr__(self, "pl_b", as_table(self.pl_b))

    @classmethod
    def uniform_local(cls, scenario, eta, eta_min_assign, exact=True) -> SchemeParams:
        tabs = []
        for n, m in zip(scenario.inputs, scenario.outcomes):
            val = Fraction(1, m) if exact else 1.0 / m
            tabs.append(np.full((n, m), val, dtype=object if exact else float))
        return cls(eta, eta_min_assign, tabs[0], tabs[1])


def marginals(p: PostselectedCorrelation, tol: float = 1e-9):
    """Alice's ``P(a|x)`` and Bob's ``P(b|y)``; raise if either depends on the remote input."""
    t = p.table
    alice = t.sum(axis=3)  # x, y, a
    bob = t.sum(axis=2)  # x, y, b
    for x in range(t.shape[0]):
        for y in range(t.shape[1]):
            if max(abs(alice[x, y] - alice[x, 0])) > tol:
                raise SignallingInput(f"Alice's marginal at x={x + 1} depends on y")
            if max(abs(bob[x, y] - bob[0, y])) > tol:
                raise SignallingInput(f"Bob's marginal at y={y + 1} depends on x")
    return alice[:, 0, :], bob[0, :, :]


def apply_scheme(p_nl: PostselectedCorrelation, params: SchemeParams, tol: float = 1e-9) -> PostselectedCorrelation:
    """Postselected correlation after partial assignment of lost events.

    ``(eta^2 P + eta(1-eta)s (P_A L_B + L_A P_B) + (1-eta)^2 s^2 L_A L_B) / (eta + (1-eta)s)^2``
    with ``s = eta_min_assign`` and ``P_A, P_B`` the marginals of ``p_nl``.
    """
    sc = p_nl.scenario
    if sc.n_parties != 2:
        raise ScenarioMismatch("the scheme is defined for two parties")
    la = _local_table(params.pl_a, sc.inputs[0], sc.outcomes[0])
    lb = _local_table(params.pl_b, sc.inputs[1], sc.outcomes[1])
    pa, pb = marginals(p_nl, tol)
    exact = p_nl.exact and la.dtype == object and lb.dtype == object and all(
        isinstance(v, Fraction) for v in (params.eta, params.eta_min_assign)
    )
    eta, s = params.eta, params.eta_min_assign
    t = p_nl.table
    if not exact:
        eta, s = float(eta), float(s)
        t, pa, pb, la, lb = (np.asarray(v, dtype=float) for v in (t, pa, pb, la, lb))

    def prod(u, v):
        # u[x, a] * v[y, b] laid out as [x, y, a, b]
        return np.multiply.outer(u, v).transpose(0, 2, 1, 3)

    mixed = (
        eta**2 * t
        + eta * (1 - eta) * s * (prod(pa, lb) + prod(la, pb))
        + (1 - eta) ** 2 * s**2 * prod(la, lb)
    )
    return PostselectedCorrelation(sc, mixed / (eta + (1 - eta) * s) ** 2)


def assignment_sweep(p_nl: PostselectedCorrelation, eta, assigns, pl_a, pl_b, tol: float = 1e-9):
    """Membership verdict of the scheme output along the postselection-assignment continuum.

    For each assignment probability ``s`` the output is tested against
    per-party detection bounds ``(s, 1)`` with observed efficiency
    ``(eta + (1 - eta) s)^2`` for every input pair. Returns ``(s, member)``
    pairs; nothing is concluded about how thresholds compare across ``s``.
    """
    from .geometry import MembershipProblem, check_membership
    from .model import DetectionBounds, ObservedEfficiencies

    rows = []
    for s in assigns:
        params = SchemeParams(eta, s, pl_a, pl_b)
        out = apply_scheme(p_nl, params, tol)
        eff = (params.eta + (1 - params.eta) * params.eta_min_assign) ** 2
        if not out.exact:
            eff = float(eff)
        bounds = DetectionBounds.symmetric(2, params.eta_min_assign, type(params.eta_min_assign)(1))
        problem = MembershipProblem(out, ObservedEfficiencies.uniform(out.scenario, eff), bounds)
        rows.append((s, check_membership(problem, tol=tol).member))
    return rows


@dataclass(frozen=True)
class MdlParams:
    """Bounds ``l <= P(xy|lambda) <= h`` on the hidden-variable input distribution."""

    l: Number
    h: Number
    n_inputs: int = 2
    clamped: bool = False

    def __post_init__(self):
        if not 0 <= self.l <= Fraction(1, self.n_inputs**2) <= self.h <= 1:
            raise ValueError(f"need 0 <= l <= 1/N^2 <= h <= 1 with N={self.n_inputs}, got l={self.l}, h={self.h}")

    def to_dict(self):
        def num(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        return {"l": num(self.l), "h": num(self.h), "n_inputs": self.n_inputs, "clamped": self.clamped}


def _ratio(eta_min, eta_max):
    eta_min, eta_max = to_number(eta_min), to_number(eta_max)
    if eta_min <= 0:
        raise ZeroEtaMin("eta_min must be strictly positive")
    if eta_min > eta_max:
        raise ValueError("eta_min exceeds eta_max")
    return eta_min / eta_max


def ldl_to_mdl(l, h, eta_min, eta_max, joint: bool = False, n_inputs: int = 2) -> MdlParams:
    """Measurement-dependence bounds that reproduce postselected limited-detection models.

    With ``joint=False`` the bounds are per party, so the joint detection
    probability ranges over ``[eta_min^2, eta_max^2]`` and the factors are
    squared. With ``joint=True`` the bounds already constrain the joint
    detection probability and enter to the first power. ``h'`` is clamped at
    1 and ``clamped`` records whether that happened.
    """
    l, h = to_number(l), to_number(h)
    MdlParams(l, h, n_inputs)
    r = _ratio(eta_min, eta_max)
    factor = r if joint else r * r
    new_l = l * factor
    new_h = h / factor
    clamped = new_h > 1
    if clamped:
        new_h = type(new_h)(1)
    return MdlParams(new_l, new_h, n_inputs, clamped)


def mdl_nonlocality_condition(eta_min, eta_max, n_inputs: int, l, h) -> bool:
    """``(eta_min/eta_max)^2 >= N^2 l`` and ``(eta_max/eta_min)^2 <= N^2 h``."""
    r2 = _ratio(eta_min, eta_max) ** 2
    l, h = to_number(l), to_number(h)
    n2 = n_inputs**2
    return bool(r2 >= n2 * l and 1 / r2 <= n2 * h)
