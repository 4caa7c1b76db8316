import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CHSH, deterministic_point, exact_table, pr_box
from ldl.errors import SignallingInput, ZeroEtaMin
from ldl.model import PostselectedCorrelation, validate
from ldl.quantum import ProjectiveSetting, TwoQubitState, born_correlation
from ldl.schemes import MdlParams, SchemeParams, apply_scheme, assignment_sweep, ldl_to_mdl, mdl_nonlocality_condition

F = Fraction


def singlet_chsh():
    return born_correlation(TwoQubitState.singlet(), ProjectiveSetting.planar(0, math.pi / 2),
                            ProjectiveSetting.planar(math.pi / 4, 3 * math.pi / 4))


def test_endpoints_exact():
    p = pr_box()
    la = np.array([[F(1, 3), F(2, 3)], [F(1), F(0)]], dtype=object)
    lb = np.array([[F(1, 2), F(1, 2)], [F(1, 5), F(4, 5)]], dtype=object)
    assert apply_scheme(p, SchemeParams(F(1), F(1, 3), la, lb)) == p
    assert apply_scheme(p, SchemeParams(F(2, 7), F(0), la, lb)) == p


def test_half_efficiency_full_assignment():
    p = singlet_chsh()
    out = apply_scheme(p, SchemeParams.uniform_local(CHSH, F(1, 2), F(1), exact=False))
    # singlet marginals are uniform, so every cross and noise term is 1/4 * 1/4 per cell
    expected = 0.25 * p.table + 0.25 * (0.25 + 0.25) + 0.25 * 0.25
    assert np.allclose(out.table, expected, atol=1e-15)


def test_signalling_input_rejected():
    t = exact_table((2, 2, 2, 2))
    t[0, 0, 0, 0] = t[0, 1, 1, 0] = t[1, 0, 0, 0] = t[1, 1, 0, 0] = F(1)
    with pytest.raises(SignallingInput):
        apply_scheme(PostselectedCorrelation(CHSH, t), SchemeParams.uniform_local(CHSH, F(1, 2), F(1, 2)))


@settings(max_examples=100, deadline=None)
@given(st.fractions(F(1, 100), 1), st.fractions(0, 1), st.integers(0, 15), st.lists(st.integers(0, 9), min_size=4, max_size=4))
def test_exact_normalization(eta, assign, which, w):
    bits = [(which >> k) & 1 for k in range(4)]
    p = deterministic_point(*bits)
    la = np.array([[F(w[0], 9), 1 - F(w[0], 9)], [F(w[1], 9), 1 - F(w[1], 9)]], dtype=object)
    lb = np.array([[F(w[2], 9), 1 - F(w[2], 9)], [F(w[3], 9), 1 - F(w[3], 9)]], dtype=object)
    out = apply_scheme(p, SchemeParams(eta, assign, la, lb))
    assert out.exact and validate(out, 0).valid


def test_mdl_identity():
    for joint in (False, True):
        r = ldl_to_mdl(F(1, 5), F(3, 10), F(7, 10), F(7, 10), joint=joint)
        assert (r.l, r.h, r.clamped) == (F(1, 5), F(3, 10), False)


def test_mdl_examples():
    r = ldl_to_mdl(F(1, 4), F(1, 4), F(1, 2), F(1), joint=False)
    assert (r.l, r.h, r.clamped) == (F(1, 16), F(1), False)
    r = ldl_to_mdl(F(1, 4), F(1, 4), F(1, 2), F(1), joint=True)
    assert (r.l, r.h) == (F(1, 8), F(1, 2))
    r = ldl_to_mdl(F(1, 5), F(1, 2), F(1, 2), F(1))
    assert r.h == 1 and r.clamped


def test_mdl_errors():
    with pytest.raises(ZeroEtaMin):
        ldl_to_mdl(F(1, 5), F(1, 2), 0, 1)
    with pytest.raises(ValueError):
        MdlParams(F(1, 2), F(1, 2), 2)


def test_mdl_monotone():
    l, h = F(1, 6), F(1, 3)
    prev = None
    for lo in (F(1, 4), F(1, 2), F(3, 4), F(9, 10), F(1)):
        r = ldl_to_mdl(l, h, lo, F(1))
        if prev:
            assert prev.l <= r.l <= l and prev.h >= r.h >= h
        prev = r
    assert (prev.l, prev.h) == (l, h)


def test_nonlocality_condition_examples():
    assert mdl_nonlocality_condition(F(1, 2), F(1, 2), 2, F(1, 4), F(1, 4))
    assert not mdl_nonlocality_condition(math.sqrt(0.5), 1.0, 2, 0.25, 0.25)
    assert mdl_nonlocality_condition(math.sqrt(0.9), 1.0, 2, 0.2, 0.3)


def test_assignment_sweep_endpoints():
    p = singlet_chsh()
    uni = np.full((2, 2), 0.5)
    # full assignment at high efficiency keeps CHSH at 0.95^2 * 2 sqrt 2 > 2
    assert assignment_sweep(p, 0.95, [1.0], uni, uni) == [(1.0, False)]
    # at eta = 1/2 the assigned correlation is far inside the local polytope
    assert assignment_sweep(p, 0.5, [1.0], uni, uni) == [(1.0, True)]
    rows = assignment_sweep(p, 0.9, [0.0, 0.5, 1.0], uni, uni)
    assert [s for s, _ in rows] == [0.0, 0.5, 1.0]
