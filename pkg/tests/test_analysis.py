from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncrest import analysis
from ncrest.errors import DomainError
from oracles import exact_a_wnc, exact_a_wonc

probs = st.floats(0, 0.95)
alphas = st.floats(0, 1)


def test_examples():
    assert analysis.a_wonc(1000, 0.5) == pytest.approx(1000)
    assert analysis.a_wonc(1000, 0.9) == pytest.approx(9000)
    assert analysis.a_wonc(7, 0) == 0
    assert analysis.a_wnc(1000, 0.5, 0.3) == pytest.approx(176.470588, abs=1e-6)
    assert analysis.a_wnc(1000, 0.9, 0.7) == pytest.approx(1702.702703, abs=1e-6)


@pytest.mark.parametrize("p", ["0.1", "0.35", "0.5", "0.9"])
@pytest.mark.parametrize("alpha", ["0.3", "0.5", "0.7", "1"])
def test_against_exact_rationals(p, alpha):
    pf, af = Fraction(p), Fraction(alpha)
    assert analysis.a_wonc(1000, float(pf)) == pytest.approx(float(exact_a_wonc(1000, pf)), rel=1e-12)
    assert analysis.a_wnc(1000, float(pf), float(af)) == pytest.approx(
        float(exact_a_wnc(1000, pf, af)), rel=1e-12
    )


def test_sweep_examples():
    (pt,) = analysis.sweep(1000, [0.3], [0.1])
    assert pt.a_wonc == pytest.approx(111.111111)
    assert pt.a_wnc == pytest.approx(30.927835, abs=1e-6)
    assert pt.increase_percent == pytest.approx(259.259259, abs=1e-6)
    (pt,) = analysis.sweep(1000, [0.5], [0.1])
    assert pt.increase_percent == pytest.approx(111.111111, abs=1e-6)
    (pt,) = analysis.sweep(50, [0.7], [0])
    assert pt.a_wonc == pt.a_wnc == 0


def test_domain_errors():
    with pytest.raises(DomainError):
        analysis.a_wonc(10, 1.0)
    with pytest.raises(DomainError):
        analysis.a_wnc(10, 0.5, 1.2)
    with pytest.raises(DomainError):
        analysis.sweep(10, [-0.1], [0.5])


def test_grid():
    g = analysis.reference_p_grid()
    assert len(g) == 19 and g[0] == 0 and g[-1] == 0.9
    assert analysis.grid(0, 0.9, 0.05) == g
    assert len(analysis.sweep(1000, analysis.REFERENCE_ALPHAS, g)) == 76


@given(probs, alphas)
def test_ordering_and_equality(p, alpha):
    wonc, wnc = analysis.a_wonc(1000, p), analysis.a_wnc(1000, p, alpha)
    assert wnc <= wonc + 1e-9
    assert analysis.a_wnc(1000, p, 1.0) == pytest.approx(wonc)


@given(st.floats(0.01, 0.9), st.floats(0.01, 0.9), alphas)
def test_monotone_in_p(p1, p2, alpha):
    lo, hi = sorted((p1, p2))
    if hi - lo > 1e-6:
        assert analysis.a_wonc(100, lo) < analysis.a_wonc(100, hi)
        if alpha > 1e-3:
            assert analysis.a_wnc(100, lo, alpha) < analysis.a_wnc(100, hi, alpha)


@given(st.floats(0.01, 0.95), st.floats(0, 1), st.floats(0, 1))
def test_monotone_in_alpha(p, a1, a2):
    lo, hi = sorted((a1, a2))
    if hi - lo > 1e-6:
        assert analysis.a_wnc(100, p, lo) < analysis.a_wnc(100, p, hi)
