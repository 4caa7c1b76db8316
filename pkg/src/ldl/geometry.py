"""Membership in the postselected limited-detection-local polytope.

A postselected table ``P`` with observed efficiencies ``eta_x`` is a member
when some mixture ``Q = sum_v w_v V_v`` of product vertices reproduces the
all-detected block: ``Q(a|x) = eta_x P(a|x)`` for every ``x`` and detected
``a``. Summing over ``a`` gives the slice condition
``Q(all detect|x) = eta_x``, so those rows are implied and not stated twice.

Non-members come with a :class:`Certificate`: coefficients ``c(x, a)`` and a
bound such that ``sum c P <= bound`` for every member and is violated by the
target. The certificate is read off the dual of a ray-shooting LP from a
feasible point of the slice toward the target, so it supports the polytope
at the exit point, which is typically a facet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import InconsistentEfficiencies, NoFeasibleSample, ScenarioMismatch
from .model import (
    DetectionBounds,
    Number,
    ObservedEfficiencies,
    PostselectedCorrelation,
    Scenario,
    rationalize,
    require_valid,
)
from .simplex import INFEASIBLE, OPTIMAL, linprog_exact
from .vertices import DEFAULT_CAP, enumerate_ldl_vertices, vertex_matrix

FLOAT_TOL = 1e-9
_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True, eq=False)
class MembershipProblem:
    target: PostselectedCorrelation
    effs: ObservedEfficiencies
    bounds: DetectionBounds
    vertices: tuple = None
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        sc = self.target.scenario
        if self.effs.scenario != sc:
            raise ScenarioMismatch("efficiencies and target use different scenarios")
        if self.bounds.n_parties != sc.n_parties:
            raise ScenarioMismatch("bounds and target disagree on the number of parties")
        verts = self.vertices
        if verts is None:
            verts = enumerate_ldl_vertices(sc, self.bounds, self.cap)
        verts = tuple(verts)
        if not verts:
            raise ValueError("vertex list is empty")
        object.__setattr__(self, "vertices", verts)

    @property
    def scenario(self) -> Scenario:
        return self.target.scenario

    @property
    def exact(self) -> bool:
        return self.target.exact and self.effs.exact and self.bounds.exact

    def with_bounds(self, bounds: DetectionBounds) -> MembershipProblem:
        return MembershipProblem(self.target, self.effs, bounds, cap=self.cap)

    def rationalized(self, tol: float = FLOAT_TOL) -> MembershipProblem:
        bounds = self.bounds.rationalized()
        return MembershipProblem(
            rationalize(self.target, tol), self.effs.rationalized(), bounds, cap=self.cap
        )


@dataclass(frozen=True, eq=False)
class Certificate:
    """Bell-like inequality ``sum_{x,a} c(x,a) P(a|x) <= bound`` violated by the target."""

    scenario: Scenario
    coefficients: np.ndarray
    bound: Number
    violation: Number

    @property
    def exact(self) -> bool:
        return self.coefficients.dtype == object and isinstance(self.bound, Fraction)

    def value(self, corr) -> Number:
        table = corr.table if hasattr(corr, "table") else np.asarray(corr)
        if self.coefficients.dtype == object and table.dtype == object:
            return sum((c * t for c, t in zip(self.coefficients.ravel(), table.ravel())), Fraction(0))
        return float(np.sum(np.asarray(self.coefficients, dtype=float) * np.asarray(table, dtype=float)))

    def vertex_values(self, problem: MembershipProblem):
        """``sum c(x,a) V(a|x) / eta_x`` for every vertex of ``problem``."""
        ctx = _Context(problem, self.coefficients.dtype == object and problem.effs.exact and problem.bounds.exact)
        g = _flat(self.coefficients, ctx.exact) / ctx.eta_col
        return ctx.V.dot(g)


@dataclass(frozen=True, eq=False)
class Member:
    witness: tuple
    residual: Number = 0
    member: bool = field(default=True, init=False)


@dataclass(frozen=True, eq=False)
class NonMember:
    certificate: Certificate
    member: bool = field(default=False, init=False)


def _flat(arr, exact):
    if exact:
        out = np.empty(arr.size, dtype=object)
        out[:] = [Fraction(v) for v in arr.ravel()]
        return out
    return np.asarray(arr, dtype=float).ravel()


class _Context:
    """Dense LP data: vertex matrix ``V`` (vertices x detected entries) and friends."""

    def __init__(self, problem: MembershipProblem, exact: bool):
        sc = problem.scenario
        self.problem = problem
        self.scenario = sc
        self.exact = exact
        self.inputs = sc.input_tuples()
        k = math.prod(sc.outcomes)
        self.k = k
        self.V = vertex_matrix(problem.vertices, sc, exact)
        effs = problem.effs.values
        eta_in = _flat(effs, exact)
        self.eta_in = eta_in
        self.eta_col = np.repeat(eta_in, k)
        self.t = _flat(problem.target.table, exact)
        n_in = len(self.inputs)
        # detection of every vertex at every input tuple
        self.D = self.V.reshape(len(problem.vertices), n_in, k).sum(axis=2)
        self.shape = problem.target.table.shape

    @property
    def n_vertices(self):
        return self.V.shape[0]


def _zero(exact):
    return Fraction(0) if exact else 0.0


def _check_efficiencies(problem: MembershipProblem, exact: bool, tol: float):
    problem.effs.check_consistent(problem.bounds, 0 if exact else tol)


def check_membership(problem: MembershipProblem, tol: float = FLOAT_TOL, exact: bool | None = None, seed: int = 0):
    """Decide membership; return :class:`Member` or :class:`NonMember`.

    ``exact=None`` picks exact rational arithmetic whenever target, bounds and
    efficiencies are all rational. Forcing ``exact=True`` on float data first
    rationalizes it (entries move by at most ``tol``). In exact mode the
    decision is exact and ``tol`` only governs that rationalization; in float
    mode the equalities are relaxed to ``|Q/eta - P| <= tol``.
    """
    if exact is None:
        exact = problem.exact
    elif exact and not problem.exact:
        problem = problem.rationalized(tol)
    require_valid(problem.target, tol)
    _check_efficiencies(problem, exact, tol)
    ctx = _Context(problem, exact)
    rng = np.random.default_rng(seed)

    if not exact:
        w, resid = _relaxed_feasibility(ctx)
        if w is not None and resid <= tol:
            return Member(_witness(ctx, w), resid)

    start = _slice_point(ctx, rng)
    if start is None:
        g = _slice_farkas(ctx)
        return NonMember(_certificate(ctx, g))
    lam, w, g = _ray_shoot(ctx, start)
    if exact and lam == 1:
        return Member(_witness(ctx, w), Fraction(0))
    if not exact and lam >= 1 - tol:
        # ray reached the target although the relaxed LP did not certify it
        resid = float(np.max(np.abs(ctx.V.T.dot(w) / ctx.eta_col - ctx.t)))
        return Member(_witness(ctx, w), resid)
    return NonMember(_certificate(ctx, g))


def _witness(ctx: _Context, w):
    return tuple((v, wi) for v, wi in zip(ctx.problem.vertices, w) if wi > 0)


def _relaxed_feasibility(ctx: _Context):
    """``min r`` subject to ``|Q/eta - P| <= r`` entrywise and ``sum w = 1``."""
    nv = ctx.n_vertices
    m = ctx.V.T / ctx.eta_col[:, None]
    ones = np.ones((m.shape[0], 1))
    a_ub = np.vstack([np.hstack([m, -ones]), np.hstack([-m, -ones])])
    b_ub = np.concatenate([ctx.t, -ctx.t])
    a_eq = np.hstack([np.ones((1, nv)), np.zeros((1, 1))])
    c = np.zeros(nv + 1)
    c[-1] = 1
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=(0, None), method="highs", options=_HIGHS)
    if res.status != 0:
        return None, math.inf
    w = np.clip(res.x[:nv], 0, None)
    w /= w.sum()
    resid = float(np.max(np.abs(m.dot(w) - ctx.t)))
    return w, resid


def _slice_rows(ctx: _Context):
    """Normalization plus one detection row per input tuple (rows x vertices)."""
    nv = ctx.n_vertices
    one = Fraction(1) if ctx.exact else 1.0
    a = [np.full(nv, one, dtype=ctx.V.dtype)] + [ctx.D[:, i] for i in range(len(ctx.inputs))]
    b = [one] + list(ctx.eta_in)
    return np.array(a, dtype=ctx.V.dtype), b


def _slice_point(ctx: _Context, rng, n_lp: int | None = None):
    """A point of the slice, as vertex weights; ``None`` when the slice is empty.

    The uniform vertex mixture is used when it already has the observed
    efficiencies; otherwise the average of a few LP optima under random
    objectives.
    """
    nv = ctx.n_vertices
    det_mean = ctx.D.sum(axis=0) / nv
    if ctx.exact:
        on_slice = all(d == e for d, e in zip(det_mean, ctx.eta_in))
    else:
        on_slice = bool(np.max(np.abs(det_mean - ctx.eta_in)) <= 1e-12)
    if on_slice:
        w = np.full(nv, Fraction(1, nv) if ctx.exact else 1.0 / nv, dtype=ctx.V.dtype)
        return w
    a, b = _slice_rows(ctx)
    n_lp = n_lp or (4 if ctx.exact else 8)
    sols = []
    for _ in range(n_lp):
        r = rng.integers(-4, 5, size=ctx.V.shape[1])
        cost = ctx.V.dot(r.astype(object) if ctx.exact else r.astype(float))
        if ctx.exact:
            res = linprog_exact(list(cost), [list(row) for row in a], b)
            if res.status == INFEASIBLE:
                return None
            sols.append(np.array(res.x, dtype=object))
        else:
            res = linprog(cost, A_eq=a, b_eq=b, bounds=(0, None), method="highs", options=_HIGHS)
            if res.status == 2:
                return None
            if res.status != 0:
                continue
            w = np.clip(res.x, 0, None)
            sols.append(w / w.sum())
    if not sols:
        return None
    total = sols[0]
    for s in sols[1:]:
        total = total + s
    return total / len(sols)


def _slice_farkas(ctx: _Context):
    """Dual ray proving the slice empty, spread over detected entries as ``g(x, a)``."""
    a, b = _slice_rows(ctx)
    if ctx.exact:
        res = linprog_exact([0] * ctx.n_vertices, [list(row) for row in a], b)
        assert res.status == INFEASIBLE
        z = np.array(res.y[1:], dtype=object)
    else:
        m = a.shape[0]
        # max b.y  s.t.  a^T y <= 0, -1 <= y <= 1
        res = linprog(-np.asarray(b, float), A_ub=a.T.astype(float), b_ub=np.zeros(a.shape[1]),
                      bounds=[(-1, 1)] * m, method="highs", options=_HIGHS)
        z = res.x[1:]
    return np.repeat(z, ctx.k)


def _ray_shoot(ctx: _Context, w0):
    """``max lam`` with ``sum w V = eta * (p0 + lam (P - p0))``, ``0 <= lam <= 1``.

    Returns ``(lam, w, g)`` where ``g`` holds the duals of the detected-entry
    rows; they satisfy ``g0 + sum g V_v <= 0`` for every vertex.
    """
    nv = ctx.n_vertices
    q0 = ctx.V.T.dot(w0)
    p0 = q0 / ctx.eta_col
    d = ctx.eta_col * (ctx.t - p0)
    n_rows = ctx.V.shape[1]
    if ctx.exact:
        zero, one = Fraction(0), Fraction(1)
        rows = [[one] * nv + [zero, zero]]
        for col in range(n_rows):
            rows.append(list(ctx.V[:, col]) + [-d[col], zero])
        rows.append([zero] * nv + [one, one])
        rhs = [one] + list(q0) + [one]
        cost = [zero] * nv + [-one, zero]
        res = linprog_exact(cost, rows, rhs)
        assert res.status == OPTIMAL, res.status
        lam = res.x[nv]
        w = np.array(res.x[:nv], dtype=object)
        g = np.array(res.y[1 : 1 + n_rows], dtype=object)
        return lam, w, g
    a_eq = np.zeros((1 + n_rows, nv + 1))
    a_eq[0, :nv] = 1
    a_eq[1:, :nv] = ctx.V.T
    a_eq[1:, nv] = -d
    b_eq = np.concatenate([[1.0], q0])
    c = np.zeros(nv + 1)
    c[nv] = -1
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * nv + [(0, 1)], method="highs", options=_HIGHS)
    if res.status != 0:
        raise RuntimeError(f"ray-shooting LP failed: {res.message}")
    w = np.clip(res.x[:nv], 0, None)
    return float(res.x[nv]), w / w.sum(), np.asarray(res.eqlin.marginals[1:], dtype=float)


def _certificate(ctx: _Context, g) -> Certificate:
    """Turn row duals into a normalized inequality on postselected tables."""
    c = g * ctx.eta_col
    exact_data = ctx.problem.effs.exact and ctx.problem.bounds.exact
    if ctx.exact:
        scale = max(abs(v) for v in c)
        c = c / scale
    else:
        c = np.asarray(c, dtype=float)
        c = c / np.max(np.abs(c))
        c[np.abs(c) < 1e-10] = 0.0
        if exact_data:
            # rational reconstruction so the bound below is exact
            rc = np.empty(c.size, dtype=object)
            rc[:] = [Fraction(float(v)).limit_denominator(10**6) for v in c]
            c = rc / max(abs(v) for v in rc)
    exact_c = c.dtype == object
    if exact_c:
        eta_col = np.array([Fraction(v) for v in ctx.problem.effs.values.ravel()], dtype=object).repeat(ctx.k)
        verts = ctx.V if ctx.exact else vertex_matrix(ctx.problem.vertices, ctx.scenario, True)
    else:
        eta_col = np.asarray(ctx.eta_col, dtype=float)
        verts = np.asarray(ctx.V, dtype=float)
    bound = max(verts.dot(c / eta_col))
    coeffs = c.reshape(ctx.shape)
    coeffs.setflags(write=False)
    cert = Certificate(ctx.scenario, coeffs, bound, 0)
    value = cert.value(ctx.problem.target)
    violation = value - bound if isinstance(value, Fraction) else float(value) - float(bound)
    return Certificate(ctx.scenario, coeffs, bound, violation)


def reconstruct(problem: MembershipProblem, member: Member) -> PostselectedCorrelation:
    """Mix the witness vertices, slice-rescale, and return the postselected table."""
    ctx = _Context(problem, problem.exact)
    w = np.array([_zero(ctx.exact)] * ctx.n_vertices, dtype=ctx.V.dtype)
    index = {v: i for i, v in enumerate(problem.vertices)}
    for v, wi in member.witness:
        w[index[v]] = wi if ctx.exact else float(wi)
    p = ctx.V.T.dot(w) / ctx.eta_col
    return PostselectedCorrelation(problem.scenario, p.reshape(ctx.shape))


def sample_feasible_points(problem: MembershipProblem, n_samples: int, rng=None, n_extreme: int = 16) -> np.ndarray:
    """Random points of the sliced, rescaled polytope as float tables.

    Extreme points come from LPs over the slice with random linear objectives
    on the detected entries; samples are Dirichlet mixtures of them (the first
    ``n_extreme`` samples are the extreme points themselves).
    """
    rng = np.random.default_rng(rng)
    ctx = _Context(problem, False)
    a, b = _slice_rows(ctx)
    ext = []
    for _ in range(n_extreme):
        r = rng.normal(size=ctx.V.shape[1])
        res = linprog(ctx.V.dot(r), A_eq=a, b_eq=b, bounds=(0, None), method="highs", options=_HIGHS)
        if res.status == 2:
            raise NoFeasibleSample("the slice admits no point for these efficiencies")
        if res.status != 0:
            continue
        w = np.clip(res.x, 0, None)
        w /= w.sum()
        ext.append(ctx.V.T.dot(w) / ctx.eta_col)
    if not ext:
        raise NoFeasibleSample("no LP over the slice succeeded")
    ext = np.array(ext)
    out = list(ext[:n_samples])
    if n_samples > len(out):
        mix = rng.dirichlet(np.ones(len(ext)), size=n_samples - len(out))
        out.extend(mix.dot(ext))
    return np.array(out).reshape((n_samples,) + ctx.shape)


@dataclass(frozen=True)
class CertificateCheck:
    passed: bool
    violation_ok: bool
    vertex_bound_ok: bool
    samples_ok: bool
    n_samples: int
    worst_margin: float
    target_value: float
    message: str

    def to_dict(self):
        return dict(self.__dict__)


def certificate_check(cert: Certificate, problem: MembershipProblem, samples: int = 1000,
                      tol: float = FLOAT_TOL, seed: int = 0) -> CertificateCheck:
    """Re-verify a certificate: target beyond the bound, vertices and sampled members within it.

    ``worst_margin`` is ``bound - max(sampled values)``; negative means a
    sampled member violates the inequality.
    """
    target_value = cert.value(problem.target)
    violation_ok = float(target_value) > float(cert.bound) + tol
    vert_vals = cert.vertex_values(problem)
    vertex_bound_ok = float(max(vert_vals) - cert.bound) <= tol
    notes = []
    try:
        pts = sample_feasible_points(problem, samples, seed)
        coeffs = np.asarray(cert.coefficients, dtype=float).ravel()
        vals = pts.reshape(len(pts), -1).dot(coeffs)
        worst = float(cert.bound) - float(vals.max())
        samples_ok = worst >= -tol
        n = len(pts)
    except NoFeasibleSample as exc:
        notes.append(str(exc))
        worst, samples_ok, n = math.inf, True, 0
    if not violation_ok:
        notes.append("target does not violate the bound")
    if not vertex_bound_ok:
        notes.append("some vertex exceeds the bound")
    if not samples_ok:
        notes.append("a sampled member exceeds the bound")
    return CertificateCheck(
        passed=violation_ok and vertex_bound_ok and samples_ok,
        violation_ok=violation_ok,
        vertex_bound_ok=vertex_bound_ok,
        samples_ok=samples_ok,
        n_samples=n,
        worst_margin=worst,
        target_value=float(target_value),
        message="; ".join(notes) or "ok",
    )


def _rejects(target, effs, eta_min, eta_max, tol, exact, seed):
    bounds = DetectionBounds.symmetric(target.scenario.n_parties, eta_min, eta_max)
    try:
        res = check_membership(MembershipProblem(target, effs, bounds), tol=tol, exact=exact, seed=seed)
    except InconsistentEfficiencies:
        return True
    return not res.member


def critical_eta_min(target: PostselectedCorrelation, effs: ObservedEfficiencies, eta_max=1.0,
                     tol: float = 1e-3, lp_tol: float = FLOAT_TOL, exact: bool = False, seed: int = 0) -> float:
    """Smallest symmetric ``eta_min`` above which every LDL model is ruled out.

    Bisection on the monotone accept/reject boundary. Returns ``0`` when the
    target is rejected already at ``eta_min = 0`` and ``eta_max`` when it is
    accepted even at ``eta_min = eta_max``. Efficiencies inconsistent with a
    candidate bound count as rejection.
    """
    def point(v):
        return Fraction(v).limit_denominator(10**9) if exact else float(v)

    hi_val = point(eta_max)
    if _rejects(target, effs, point(0), hi_val, lp_tol, exact, seed):
        return 0.0
    if not _rejects(target, effs, hi_val, hi_val, lp_tol, exact, seed):
        return float(eta_max)
    lo, hi = 0.0, float(eta_max)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _rejects(target, effs, point(mid), hi_val, lp_tol, exact, seed):
            hi = mid
        else:
            lo = mid
    return hi
