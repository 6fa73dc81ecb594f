import math

import numpy as np
import pytest
from scipy.integrate import simpson

from nldiff import (DomainError, UnsupportedKernel, critical_exp, domain,
                    gaussian, h_value, h_value_levy, ham_eval,
                    singular_compact, stretched_exp, uniform_compact)

# frozen closed-form values
SINH2_HALF_MINUS_1 = 0.8134302039235095          # sinh(2)/2 - 1
GAUSS_H1 = 0.6487212707001282                    # e^{1/2} - 1


def test_uniform_closed_form():
    k = uniform_compact(1.0)
    ev = h_value(k, 2.0)
    assert ev.method == "closed-form"
    assert ev.value == pytest.approx(SINH2_HALF_MINUS_1, rel=1e-14)
    # H'(p) = cosh(p)/p - sinh(p)/p^2, H'' by the same differentiation
    assert ev.deriv == pytest.approx(math.cosh(2) / 2 - math.sinh(2) / 4,
                                     rel=1e-13)


def test_uniform_series_branch_is_continuous():
    # the small-|eta p| series branch must agree with the direct formula
    # evaluated just inside the switch-over point
    k = uniform_compact(1.0)
    for p in (0.01, 0.0499999):
        ev = h_value(k, p)   # series branch
        direct = math.sinh(p) / p - 1.0
        assert ev.value == pytest.approx(direct, rel=1e-12, abs=1e-15)
        direct_d = math.cosh(p) / p - math.sinh(p) / (p * p)
        assert ev.deriv == pytest.approx(direct_d, rel=1e-9)
    assert h_value(k, 0.0).value == 0.0
    assert h_value(k, 0.0).deriv == 0.0
    assert h_value(k, 0.0).second == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_gaussian_closed_form():
    ev = h_value(gaussian(), 1.0)
    assert ev.value == pytest.approx(GAUSS_H1, rel=1e-14)
    assert ev.deriv == pytest.approx(math.exp(0.5), rel=1e-14)
    assert ev.second == pytest.approx(2.0 * math.exp(0.5), rel=1e-14)


def test_critical_closed_form():
    ev = h_value(critical_exp(), 0.5)
    assert ev.value == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert ev.deriv == pytest.approx(2.0 * 0.5 / 0.75 ** 2, rel=1e-13)


def test_critical_domain_enforced():
    k = critical_exp()
    assert domain(k).p_max == 1.0
    with pytest.raises(DomainError):
        h_value(k, 1.0)
    with pytest.raises(DomainError):
        h_value(k, -1.5)
    # quadrature just inside the edge still converges
    ev = h_value(k, 0.95, force_quadrature=True)
    assert ev.value == pytest.approx(0.95 ** 2 / (1 - 0.95 ** 2), rel=1e-8)


def test_quadrature_matches_closed_forms():
    for k in (uniform_compact(1.0), gaussian(), critical_exp()):
        p_max = domain(k).p_max
        for p in (0.1, 0.5, 1.0, 2.0, 5.0):
            if p >= p_max:
                continue
            a = h_value(k, p)
            b = h_value(k, p, force_quadrature=True)
            assert b.method == "quadrature"
            assert b.value == pytest.approx(a.value, rel=1e-8)
            assert b.deriv == pytest.approx(a.deriv, rel=1e-8)
            assert b.second == pytest.approx(a.second, rel=1e-8)


def test_stretched_alpha2_against_analytic():
    # for J = exp(-y^2): int e^{py} J dy = sqrt(pi) e^{p^2/4}
    k = stretched_exp(2.0)
    for p in (0.5, 1.0, 2.0, 4.0):
        ev = h_value(k, p)
        want = math.sqrt(math.pi) * (math.exp(p * p / 4.0) - 1.0)
        want_d = math.sqrt(math.pi) * math.exp(p * p / 4.0) * p / 2.0
        want_s = math.sqrt(math.pi) * math.exp(p * p / 4.0) * (0.5 + p * p / 4)
        assert ev.value == pytest.approx(want, rel=1e-9)
        assert ev.deriv == pytest.approx(want_d, rel=1e-9)
        assert ev.second == pytest.approx(want_s, rel=1e-9)


def test_evenness_and_odd_derivative():
    for k in (uniform_compact(2.0), gaussian(), stretched_exp(1.5),
              critical_exp()):
        top = min(3.0, 0.9 * domain(k).p_max)
        for p in np.linspace(0.1, top, 5):
            a, b = ham_eval(k, p), ham_eval(k, -p)
            assert b.value == pytest.approx(a.value, rel=1e-9)
            assert b.deriv == pytest.approx(-a.deriv, rel=1e-9)
            assert b.second == pytest.approx(a.second, rel=1e-9)


def _levy_oracle(alpha, p, m=8, n=2 ** 18 + 1):
    """Composite-Simpson oracle after the substitution y = s^m, which
    removes the origin singularity entirely (integrands vanish at s = 0)."""
    s = np.linspace(0.0, 1.0, n)
    y = s ** m
    fv = np.zeros_like(s)
    fd = np.zeros_like(s)
    fs = np.zeros_like(s)
    pos = s > 0
    yp, sp = y[pos], s[pos]
    jac = m * sp ** (m - 1)
    fv[pos] = 2.0 * np.sinh(0.5 * p * yp) ** 2 * yp ** (-1 - alpha) * jac
    fd[pos] = np.sinh(p * yp) * yp ** (-alpha) * jac
    fs[pos] = np.cosh(p * yp) * yp ** (1 - alpha) * jac
    return (2 * simpson(fv, x=s), 2 * simpson(fd, x=s), 2 * simpson(fs, x=s))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("p", [0.25, 1.0, 3.0])
def test_levy_corrector_against_simpson_oracle(alpha, p):
    ev = h_value_levy(singular_compact(alpha), p)
    v, d, s = _levy_oracle(alpha, p)
    assert ev.value == pytest.approx(v, rel=1e-8)
    assert ev.deriv == pytest.approx(d, rel=1e-8)
    assert ev.second == pytest.approx(s, rel=1e-8)


def test_levy_at_origin_and_oddness():
    k = singular_compact(0.5)
    ev0 = h_value_levy(k, 0.0)
    assert ev0.value == 0.0
    assert ev0.deriv == 0.0
    assert ev0.second == pytest.approx(2.0 / 1.5, rel=1e-12)
    a, b = h_value_levy(k, 1.5), h_value_levy(k, -1.5)
    assert b.value == pytest.approx(a.value, rel=1e-12)
    assert b.deriv == pytest.approx(-a.deriv, rel=1e-12)


def test_dispatch_and_misuse():
    with pytest.raises(UnsupportedKernel):
        h_value(singular_compact(0.5), 1.0)
    with pytest.raises(UnsupportedKernel):
        h_value_levy(gaussian(), 1.0)
    ev = ham_eval(singular_compact(0.5), 1.0)
    assert ev.value == pytest.approx(h_value_levy(singular_compact(0.5),
                                                  1.0).value)


def test_quadrature_error_estimates_reported():
    ev = h_value(stretched_exp(2.0), 3.0)
    assert ev.method == "quadrature"
    assert 0.0 <= ev.quad_error_estimate < 1e-6
