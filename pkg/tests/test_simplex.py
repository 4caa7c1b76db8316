from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from ldl.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog_exact


def _random_lp(rng, m, n):
    a = rng.integers(-3, 4, size=(m, n))
    x0 = rng.integers(0, 3, size=n)
    b = a @ x0  # feasible by construction
    c = rng.integers(0, 5, size=n)  # nonnegative cost keeps it bounded
    return a, b, c


@pytest.mark.parametrize("seed", range(25))
def test_matches_highs_on_random_feasible_lps(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(2, 6), rng.integers(4, 10)
    a, b, c = _random_lp(rng, m, n)
    ref = linprog(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
    res = linprog_exact(c.tolist(), a.tolist(), b.tolist())
    assert res.status == OPTIMAL
    assert float(res.value) == pytest.approx(ref.fun, abs=1e-9)
    x = res.x
    assert all(v >= 0 for v in x)
    assert all(sum(Fraction(int(a[i, j])) * x[j] for j in range(n)) == b[i] for i in range(m))
    # dual feasibility and strong duality, exactly
    y = res.y
    for j in range(n):
        assert sum(y[i] * int(a[i, j]) for i in range(m)) <= c[j]
    assert sum(y[i] * int(b[i]) for i in range(m)) == res.value


def test_redundant_rows():
    a = [[1, 1, 0], [2, 2, 0], [0, 1, 1]]
    b = [1, 2, 1]
    res = linprog_exact([1, 0, 0], a, b)
    assert res.status == OPTIMAL and res.value == 0


@pytest.mark.parametrize("seed", range(10))
def test_farkas_certificate_on_infeasible(seed):
    rng = np.random.default_rng(100 + seed)
    n = 6
    a = rng.integers(0, 4, size=(3, n))
    b = np.array([-1, 2, 3])  # first row sums nonnegatives to a negative value
    res = linprog_exact([0] * n, a.tolist(), b.tolist())
    assert res.status == INFEASIBLE
    y = res.y
    for j in range(n):
        assert sum(y[i] * int(a[i, j]) for i in range(3)) <= 0
    assert sum(y[i] * int(b[i]) for i in range(3)) > 0


def test_unbounded():
    res = linprog_exact([-1, 0], [[1, -1]], [0])
    assert res.status == UNBOUNDED


def test_rational_data():
    res = linprog_exact([Fraction(1, 3), Fraction(1, 2)], [[Fraction(1, 7), Fraction(2, 7)]], [Fraction(1, 7)])
    assert res.status == OPTIMAL and res.value == Fraction(1, 4)
