"""Born-rule correlations of two qubits under projective measurements.

Outcome index 0 is the +1 eigenspace of the Bloch-vector observable
``n(theta, phi) . sigma``; index 1 is the -1 eigenspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateTau, ScenarioMismatch
from .model import PostselectedCorrelation, Scenario

NORM_TOL = 1e-12


@dataclass(frozen=True)
class TwoQubitState:
    """Amplitudes on ``|00>, |01>, |10>, |11>``."""

    amplitudes: tuple

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amplitudes)
        if len(amps) != 4:
            raise ValueError("a two-qubit state needs 4 amplitudes")
        norm = sum(abs(a) ** 2 for a in amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state norm {norm} differs from 1")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> TwoQubitState:
        v = np.asarray(amplitudes, dtype=complex)
        return cls(tuple(v / np.linalg.norm(v)))

    @classmethod
    def singlet(cls) -> TwoQubitState:
        s = 1 / math.sqrt(2)
        return cls((0, s, -s, 0))

    def vector(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=complex)


@dataclass(frozen=True)
class ProjectiveSetting:
    """Bloch angles ``(theta, phi)`` for each input of one party."""

    angles: tuple

    def __post_init__(self):
        norm = []
        for theta, phi in self.angles:
            theta, phi = float(theta), float(phi)
            if not (math.isfinite(theta) and math.isfinite(phi)):
                raise ValueError("measurement angles must be finite")
            theta %= 2 * math.pi
            if theta > math.pi:
                theta, phi = 2 * math.pi - theta, phi + math.pi
            norm.append((theta, phi % (2 * math.pi)))
        object.__setattr__(self, "angles", tuple(norm))

    @classmethod
    def planar(cls, *thetas) -> ProjectiveSetting:
        """Observables in the x-z plane of the Bloch sphere."""
        return cls(tuple((t, 0.0) for t in thetas))

    def projectors(self, x: int):
        theta, phi = self.angles[x]
        ket = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
        plus = np.outer(ket, ket.conj())
        return plus, np.eye(2) - plus


def born_correlation(
    state: TwoQubitState, alice: ProjectiveSetting, bob: ProjectiveSetting
) -> PostselectedCorrelation:
    """``P(ab|xy) = <psi| P_a^x (x) P_b^y |psi>`` as a float table."""
    psi = state.vector()
    na, nb = len(alice.angles), len(bob.angles)
    table = np.zeros((na, nb, 2, 2))
    for x in range(na):
        pa = alice.projectors(x)
        for y in range(nb):
            pb = bob.projectors(y)
            for a in range(2):
                for b in range(2):
                    op = np.kron(pa[a], pb[b])
                    table[x, y, a, b] = max(float(np.real(psi.conj() @ op @ psi)), 0.0)
            table[x, y] /= table[x, y].sum()
    return PostselectedCorrelation(Scenario((na, nb), (2, 2)), table)


def _ket(theta: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), math.sin(theta / 2)])


def _amplitude(psi: np.ndarray, u: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.kron(u, v).conj() @ psi)


def _null_angle(f) -> float:
    """Zero of ``f(beta) = A cos(beta/2) + B sin(beta/2)`` from two samples."""
    a, b = f(0.0), f(math.pi)
    return 2 * math.atan2(-a, b)


def hardy_state(tau: float) -> TwoQubitState:
    """``cos(alpha)|00> + sin(alpha)|11>`` with ``alpha = tau * pi / 4``."""
    if not 0 < tau < 1:
        raise DegenerateTau(f"tau must lie strictly inside (0, 1), got {tau}")
    alpha = tau * math.pi / 4
    return TwoQubitState((math.cos(alpha), 0, 0, math.sin(alpha)))


def _hardy_settings(psi: np.ndarray, a1: float):
    """Solve the three zero constraints given Alice's second angle."""
    # P(00|11) = 0
    b1 = _null_angle(lambda t: _amplitude(psi, _ket(a1), _ket(t)).real)
    # P(10|10) = 0: Alice's outcome 1 at x=1 is the antipodal ket
    b0 = _null_angle(lambda t: _amplitude(psi, _ket(a1 + math.pi), _ket(t)).real)
    # P(01|01) = 0
    a0 = _null_angle(lambda t: _amplitude(psi, _ket(t), _ket(b1 + math.pi)).real)
    return (a0, a1), (b0, b1)


def _hardy_p0000(psi, a1):
    (a0, _), (b0, _) = _hardy_settings(psi, a1)
    return abs(_amplitude(psi, _ket(a0), _ket(b0))) ** 2


def hardy_point(tau: float):
    """State and settings with ``P(01|01) = P(10|10) = P(00|11) = 0`` and ``P(00|00) > 0``.

    Alice's second angle is chosen to maximize ``P(00|00)`` for the given
    entanglement parameter; the other three angles follow from the zero
    constraints, each linear in one measurement ket.
    """
    state = hardy_state(tau)
    psi = state.vector().real
    grid = np.linspace(0, 2 * math.pi, 721)
    vals = [_hardy_p0000(psi, g) for g in grid]
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(
        lambda t: -_hardy_p0000(psi, t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    a1 = res.x if -res.fun >= vals[k] else grid[k]
    (a0, a1), (b0, b1) = _hardy_settings(psi, a1)
    return state, ProjectiveSetting.planar(a0, a1), ProjectiveSetting.planar(b0, b1)


def hardy_correlation(tau: float) -> PostselectedCorrelation:
    return born_correlation(*hardy_point(tau))


def hardy_probability(tau: float) -> float:
    return float(hardy_correlation(tau).table[0, 0, 0, 0])


def optimal_hardy_tau() -> float:
    res = minimize_scalar(
        lambda t: -hardy_probability(t), bounds=(0.05, 0.95), method="bounded", options={"xatol": 1e-9}
    )
    return float(res.x)


def _require_binary_pair(p: PostselectedCorrelation):
    if p.scenario != Scenario((2, 2), (2, 2)):
        raise ScenarioMismatch("expected two parties with binary inputs and outcomes")


def correlators(p: PostselectedCorrelation) -> np.ndarray:
    """``E(x, y) = sum_ab (-1)^(a+b) P(ab|xy)``."""
    _require_binary_pair(p)
    t = np.asarray(p.table, dtype=float)
    sign = np.array([[1, -1], [-1, 1]])
    return (t * sign).sum(axis=(2, 3))


def chsh_value(p: PostselectedCorrelation) -> float:
    """Largest ``|E00 + E01 + E10 + E11 - 2 E_xy|`` over the four sign placements."""
    e = correlators(p)
    total = e.sum()
    return float(max(abs(total - 2 * e[x, y]) for x in range(2) for y in range(2)))


def mix_with_white_noise(p: PostselectedCorrelation, visibility) -> PostselectedCorrelation:
    """``visibility * p + (1 - visibility) * uniform``; exact when both are exact."""
    if isinstance(visibility, (int, Fraction)) and p.exact:
        v = Fraction(visibility)
        uniform = PostselectedCorrelation.uniform(p.scenario, exact=True)
    else:
        v = float(visibility)
        uniform = PostselectedCorrelation.uniform(p.scenario, exact=False)
        p = p.as_float()
    if not 0 <= v <= 1:
        raise ValueError("visibility must lie in [0, 1]")
    return PostselectedCorrelation(p.scenario, v * p.table + (1 - v) * uniform.table)


def no_signalling_residual(p: PostselectedCorrelation) -> float:
    """Largest change of a party's marginal when the other party's input changes."""
    t = np.asarray(p.table, dtype=float)
    alice = t.sum(axis=3)  # (x, y, a)
    bob = t.sum(axis=2)  # (x, y, b)
    ra = np.max(np.abs(alice - alice[:, :1, :])) if t.shape[1] > 1 else 0.0
    rb = np.max(np.abs(bob - bob[:1, :, :])) if t.shape[0] > 1 else 0.0
    return float(max(ra, rb))


def random_state(rng: np.random.Generator) -> TwoQubitState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return TwoQubitState.normalized(v)


def random_setting(rng: np.random.Generator, n_inputs: int = 2) -> ProjectiveSetting:
    return ProjectiveSetting(
        tuple((math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi)) for _ in range(n_inputs))
    )
