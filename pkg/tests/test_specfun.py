import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conewave import specfun
from conewave.errors import DomainError
from oracles import bessel_oracle

ORACLE = bessel_oracle()


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("kind", ["J", "Y"])
def test_j_y_match_frozen_mpmath_grid(kind):
    f = specfun.bessel_j if kind == "J" else specfun.bessel_y
    worst = max(rel(f(p["nu"], p["x"]), float(p[kind])) for p in ORACLE["grid"])
    assert worst <= 1e-10


def test_scaled_i_k_match_frozen_mpmath_grid():
    for p in ORACLE["grid"]:
        assert rel(specfun.bessel_ie(p["nu"], p["x"]), float(p["Ie"])) <= 1e-10
        assert rel(specfun.bessel_ke(p["nu"], p["x"]), float(p["Ke"])) <= 1e-10


def test_unscaled_i_k_agree_where_representable():
    for p in ORACLE["grid"]:
        nu, x = p["nu"], p["x"]
        if x > 600:
            continue
        assert rel(specfun.bessel_i(nu, x), float(p["Ie"]) * math.exp(x)) <= 1e-10
        assert rel(specfun.bessel_k(nu, x), float(p["Ke"]) * math.exp(-x)) <= 1e-10


def test_closed_form_values():
    assert specfun.bessel_j(0, 0.0) == 1.0
    assert specfun.bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-14)
    assert specfun.bessel_j(1, 1) == pytest.approx(float(ORACLE["points"]["J(1,1)"]), rel=1e-13)
    assert specfun.bessel_j(1, 1) == pytest.approx(0.4400505857, abs=1e-10)
    assert specfun.bessel_y(0.5, math.pi) == pytest.approx(math.sqrt(2) / math.pi, rel=1e-14)
    assert abs(specfun.bessel_y(0.5, math.pi / 2)) < 1e-15
    assert specfun.bessel_y(0, 1) == pytest.approx(0.0882569642, abs=1e-10)
    assert specfun.bessel_i(0.5, 1) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1), rel=1e-14)
    assert specfun.bessel_k(0.5, 1) == pytest.approx(math.sqrt(math.pi / 2) / math.e, rel=1e-14)


def test_ik_wronskian_at_sample_point():
    nu, x = 0.7, 2.3
    w = (specfun.bessel_i(nu, x) * specfun.bessel_kp(nu, x)
         - specfun.bessel_ip(nu, x) * specfun.bessel_k(nu, x))
    assert w == pytest.approx(-1 / x, rel=1e-13)


@given(st.floats(0, 50), st.floats(-3, 4))
def test_wronskians_on_log_grid(nu, logx):
    x = 10.0 ** logx
    assert specfun.wronskian_defect_jy(nu, x) <= 1e-10
    assert specfun.wronskian_defect_ik(nu, x) <= 1e-10


@given(st.floats(0, 20), st.floats(0.5, 100))
def test_derivative_recurrence(nu, x):
    """d/dx (x^-nu J_nu) = -x^-nu J_{nu+1}, by a fourth-order difference."""
    h = 1e-3
    g = lambda t: t ** -nu * specfun.bessel_j(nu, t)
    d = (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) / (12 * h)
    target = -x ** -nu * specfun.bessel_j(nu + 1, x)
    scale = x ** -nu * max(abs(specfun.bessel_j(nu, x)), abs(specfun.bessel_j(nu + 1, x)),
                           1 / math.sqrt(x + nu + 1))
    assert abs(d - target) <= 1e-8 * scale


@given(st.floats(0, 50), st.floats(1e-3, 1.0))
def test_error_estimate_small_argument(nu, x):
    for kind in "JYIK":
        ev = specfun.bessel_eval(kind, nu, x)
        assert ev.relative_error_estimate <= 1e-12 or not math.isfinite(ev.value)


def test_error_estimate_grows_near_a_zero():
    j1 = specfun.bessel_j_zeros(0, 1).zeros[0]
    near = specfun.bessel_eval("J", 0, j1 + 1e-9)
    away = specfun.bessel_eval("J", 0, 1.0)
    assert near.relative_error_estimate > 1e3 * away.relative_error_estimate


@pytest.mark.parametrize("nu", [0.1, 3.0, 17.5, 50.0])
@pytest.mark.parametrize("R", [1.0, 10.0, 100.0, 1e3, 1e4])
def test_dyadic_l2_mass_at_most_one(nu, R):
    # composite Gauss-Legendre, 24 points per panel of length at most 2
    panels = max(int(np.ceil(R / 2)), 1)
    x, w = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(R, 2 * R, panels + 1)
    half = 0.5 * np.diff(edges)
    r = (0.5 * (edges[1:] + edges[:-1]))[:, None] + half[:, None] * x[None]
    total = np.sum(half[:, None] * w[None] * specfun.bessel_j(nu, r) ** 2)
    assert total <= 1.0


def test_zeros_closed_form_and_oracle():
    z = specfun.bessel_j_zeros(0.5, 3).zeros
    np.testing.assert_allclose(z, [math.pi, 2 * math.pi, 3 * math.pi], rtol=1e-14)
    assert specfun.bessel_j_zeros(0, 1)[0] == pytest.approx(2.4048255577, abs=1e-10)
    z2 = specfun.bessel_j_zeros(0, 2).zeros
    assert z2[1] > z2[0] + 2
    for nu, ref in ORACLE["zeros"].items():
        got = specfun.bessel_j_zeros(float(nu), len(ref)).zeros
        np.testing.assert_allclose(got, [float(v) for v in ref], rtol=1e-13)


@given(st.floats(0, 60))
def test_zero_table_invariants(nu):
    z = specfun.bessel_j_zeros(nu, 60).zeros
    assert np.all(np.diff(z) > 0)
    env = np.sqrt(2 / (np.pi * z))
    assert np.max(np.abs(specfun.bessel_j(nu, z)) / env) <= 1e-11
    gaps = np.diff(z)[-10:]
    assert np.all((gaps > math.pi - 1) & (gaps < math.pi + 1))


def test_regime_bounds_examples():
    b = specfun.bessel_regime_bounds(10, 4)
    assert b.regime == "small" and b.satisfied
    b = specfun.bessel_regime_bounds(10, 10)
    assert b.regime == "transition" and b.satisfied
    b = specfun.bessel_regime_bounds(10, 40)
    assert b.regime == "oscillatory" and b.satisfied


@given(st.floats(2, 100), st.floats(1e-3, 2e3))
def test_regime_envelopes_hold(nu, x):
    assert specfun.bessel_regime_bounds(nu, x).satisfied


def test_domain_errors():
    with pytest.raises(DomainError):
        specfun.bessel_j(201, 1.0)
    with pytest.raises(DomainError):
        specfun.bessel_j(1, -1.0)
    with pytest.raises(DomainError):
        specfun.bessel_y(1, 0.0)
    with pytest.raises(DomainError):
        specfun.bessel_regime_bounds(1.5, 1.0)
    with pytest.raises(DomainError):
        specfun.bessel_j_zeros(1, 0)
