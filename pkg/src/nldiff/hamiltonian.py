"""Exponential-moment Hamiltonian H(p) = int (e^{py} - 1) J(y) dy.

Closed forms are used where available:

* uniform on [-eta, eta]:   H(p) = sinh(eta p)/(eta p) - 1
* standard Gaussian:        H(p) = exp(p^2/2) - 1
* critical (1/2)e^{-|y|}:   H(p) = p^2/(1 - p^2), finite only for |p| < 1

Everything else goes through adaptive Gauss-Kronrod quadrature with a
Laplace-type truncation of unbounded supports: the integrand maximum of
e^{py} J(y) sits at y0 = (p/(lam*alpha))^{1/(alpha-1)} for J ~ e^{-lam y^alpha},
and the window is cut where the exponent has dropped 40 natural-log units.

For kernels singular at the origin (Levy densities) the corrector form
H(p) = int (e^{py} - 1 - py 1_{|y|<1}) J(y) dy is provided; near the origin
the integrand is summed by series to avoid cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, QuadratureError, UnsupportedKernel
from .kernels import Family, Kernel, evaluate

__all__ = ["HamiltonianEval", "HamiltonianDomain", "h_value", "h_value_levy",
           "domain", "ham_eval"]

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"

_EPSABS = 1e-12
_EPSREL = 1e-10
_LOG_DROP = 40.0          # truncation depth of the integrand window
_SERIES_CUT = 1e-4        # |p y| below which e^x - 1 - x is summed by series


@dataclass(frozen=True)
class HamiltonianEval:
    value: float
    deriv: float
    second: float
    method: str
    quad_error_estimate: float = 0.0


@dataclass(frozen=True)
class HamiltonianDomain:
    p_max: float


def domain(k: Kernel) -> HamiltonianDomain:
    """Radius of the finiteness domain {p : H(p) < inf}."""
    if k.family is Family.CRITICAL:
        return HamiltonianDomain(1.0)
    if k.family is Family.CUSTOM and math.isinf(k.support_radius):
        return HamiltonianDomain(float(k.params.get("decay", math.inf)))
    return HamiltonianDomain(math.inf)


def _check_domain(k: Kernel, p: float) -> float:
    p_max = domain(k).p_max
    if abs(p) >= p_max:
        raise DomainError(
            f"H is finite only for |p| < {p_max:g}; got p = {p:g}", p_max=p_max)
    return p_max


# ---------------------------------------------------------------------------
# closed forms

def _uniform_closed(eta: float, p: float) -> tuple[float, float, float]:
    x = eta * p
    if abs(x) < 0.05:
        # series of sinh(x)/x - 1 and derivatives in p; avoids cancellation
        x2 = x * x
        value = x2 / 6.0 + x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0
        deriv = eta * (x / 3.0 + x * x2 / 30.0 + x * x2 * x2 / 840.0)
        second = eta * eta * (1.0 / 3.0 + x2 / 10.0 + x2 * x2 / 168.0)
        return value, deriv, second
    sh, ch = math.sinh(x), math.cosh(x)
    value = sh / x - 1.0
    deriv = eta * (ch / x - sh / (x * x))
    second = eta * eta * (sh / x - 2.0 * ch / (x * x) + 2.0 * sh / (x ** 3))
    return value, deriv, second


def _gaussian_closed(p: float) -> tuple[float, float, float]:
    e = math.exp(0.5 * p * p)
    return e - 1.0, p * e, (1.0 + p * p) * e


def _critical_closed(p: float) -> tuple[float, float, float]:
    d = 1.0 - p * p
    return p * p / d, 2.0 * p / (d * d), (2.0 + 6.0 * p * p) / (d ** 3)


# ---------------------------------------------------------------------------
# quadrature

def _quad(f, a, b, points=None):
    kw = dict(epsabs=_EPSABS, epsrel=_EPSREL, limit=400, full_output=1)
    if points is not None and a < min(points) and max(points) < b:
        kw["points"] = points
    res = integrate.quad(f, a, b, **kw)
    val, err = res[0], res[1]
    if len(res) > 3 or err > max(_EPSABS, 10.0 * _EPSREL * abs(val)) * 1e3:
        raise QuadratureError(
            f"quadrature did not converge on [{a:g}, {b:g}] (err={err:.2e})",
            error_estimate=err)
    return val, err


def _decay_profile(k: Kernel):
    """(lam, alpha) with J ~ const * exp(-lam |y|^alpha) at infinity."""
    if k.family is Family.GAUSSIAN:
        return 0.5, 2.0
    if k.family is Family.STRETCHED:
        return 1.0, k.params["alpha"]
    if k.family is Family.CRITICAL:
        return 1.0, 1.0
    raise UnsupportedKernel("no decay profile for this kernel")


def _window(k: Kernel, p: float) -> tuple[float, float, list[float]]:
    """Truncation window [a, b] plus interior break points, for p >= 0."""
    if math.isfinite(k.support_radius):
        return -k.support_radius, k.support_radius, [0.0]
    lam, alpha = _decay_profile(k)
    if k.family is Family.CRITICAL:
        # exponent (p - 1)y on the right: linear solve for the cut
        right = _LOG_DROP / max(1.0 - p, 1e-12)
        left = _LOG_DROP / (1.0 + p)
        return -left, right, [0.0]
    if p <= 0.0:
        y_top = (_LOG_DROP / lam) ** (1.0 / alpha) + 1.0
        return -y_top, y_top, [0.0]
    y0 = (p / (lam * alpha)) ** (1.0 / (alpha - 1.0))
    phi_max = p * y0 - lam * y0 ** alpha
    target = phi_max - _LOG_DROP

    def drop(y):
        return p * y - lam * y ** alpha - target

    hi = y0 + 1.0
    while drop(hi) > 0.0:
        hi = 2.0 * hi
    right = optimize.brentq(drop, y0, hi, xtol=1e-9)
    left = (( _LOG_DROP + max(0.0, phi_max)) / lam) ** (1.0 / alpha) + 1.0
    return -left, right, [0.0, y0]


def _quad_triple(k: Kernel, p: float) -> HamiltonianEval:
    """H, H', H'' by adaptive quadrature.  Uses evenness to work with |p|."""
    s = 1.0 if p >= 0 else -1.0
    ap = abs(p)
    a, b, pts = _window(k, ap)

    def _weighted(y):
        # exp(p y) J(y) evaluated in log space: exp(p y) alone can overflow
        # near a finite domain edge even though the product is tiny
        j = evaluate(k, y)
        if j <= 0.0:
            return 0.0, 0.0
        return math.exp(ap * y + math.log(j)), j

    def f_val(y):
        j = evaluate(k, y)
        if j <= 0.0:
            return 0.0
        e = ap * y
        if e < 1.0:     # expm1 avoids the cancellation of exp(p y) - 1
            return math.expm1(e) * j
        return math.exp(e + math.log(j)) - j

    def f_der(y):
        w, _ = _weighted(y)
        return y * w

    def f_sec(y):
        w, _ = _weighted(y)
        return y * y * w

    value, e1 = _quad(f_val, a, b, pts)
    deriv, e2 = _quad(f_der, a, b, pts)
    second, e3 = _quad(f_sec, a, b, pts)
    return HamiltonianEval(value, s * deriv, second, QUADRATURE, e1 + e2 + e3)


def h_value(k: Kernel, p: float, force_quadrature: bool = False) -> HamiltonianEval:
    """H(p) with first and second derivatives (integrable kernels).

    ``force_quadrature`` bypasses the closed forms; used to cross-check the
    quadrature path against them.
    """
    if k.singularity_order > 0:
        raise UnsupportedKernel(
            "kernel is singular at the origin; use h_value_levy")
    p = float(p)
    _check_domain(k, p)
    if not force_quadrature:
        if k.family is Family.UNIFORM:
            v, d, s = _uniform_closed(k.params["eta"], p)
            return HamiltonianEval(v, d, s, CLOSED_FORM)
        if k.family is Family.GAUSSIAN:
            v, d, s = _gaussian_closed(p)
            return HamiltonianEval(v, d, s, CLOSED_FORM)
        if k.family is Family.CRITICAL:
            v, d, s = _critical_closed(p)
            return HamiltonianEval(v, d, s, CLOSED_FORM)
    return _quad_triple(k, p)


def h_value_levy(k: Kernel, p: float) -> HamiltonianEval:
    """Corrector Hamiltonian for Levy kernels singular at the origin.

    For even J the corrector form symmetrizes to absolutely convergent
    integrals on (0, 1]:

        H(p)   = 2 int (cosh(py) - 1)  y^{-1-a} dy
        H'(p)  = 2 int  sinh(py)       y^{-a}   dy
        H''(p) = 2 int  cosh(py)       y^{1-a}  dy

    A series piece on [0, eps] with eps = 1e-4/|p| removes the cancellation
    of cosh(py) - 1 near the origin.
    """
    if k.singularity_order <= 0:
        raise UnsupportedKernel("h_value_levy expects a singular kernel")
    if k.family is not Family.SINGULAR:
        raise UnsupportedKernel(
            "the corrector Hamiltonian needs the analytic singularity model "
            "of the singular compact family")
    a = k.params["alpha"]
    p = float(p)
    ap = abs(p)
    s = 1.0 if p >= 0 else -1.0
    if ap == 0.0:
        return HamiltonianEval(0.0, 0.0, 2.0 / (2.0 - a), CLOSED_FORM)

    eps = min(1.0, _SERIES_CUT / ap)
    # analytic leading terms on [0, eps]
    v0 = ap * ap * eps ** (2.0 - a) / (2.0 * (2.0 - a)) \
        + ap ** 4 * eps ** (4.0 - a) / (24.0 * (4.0 - a))
    d0 = ap * eps ** (2.0 - a) / (2.0 - a) \
        + ap ** 3 * eps ** (4.0 - a) / (6.0 * (4.0 - a))
    s0 = eps ** (2.0 - a) / (2.0 - a) \
        + ap * ap * eps ** (4.0 - a) / (2.0 * (4.0 - a))

    value, e1 = (v0, 0.0) if eps >= 1.0 else _e(
        lambda y: (math.cosh(ap * y) - 1.0) * y ** (-1.0 - a), eps, v0)
    deriv, e2 = (d0, 0.0) if eps >= 1.0 else _e(
        lambda y: math.sinh(ap * y) * y ** (-a), eps, d0)
    second, e3 = (s0, 0.0) if eps >= 1.0 else _e(
        lambda y: math.cosh(ap * y) * y ** (1.0 - a), eps, s0)
    return HamiltonianEval(2.0 * value, s * 2.0 * deriv, 2.0 * second,
                           QUADRATURE, 2.0 * (e1 + e2 + e3))


def _e(f, eps, head):
    tail, err = _quad(f, eps, 1.0)
    return head + tail, err


def ham_eval(k: Kernel, p: float, force_quadrature: bool = False) -> HamiltonianEval:
    """Dispatch to the plain or corrector Hamiltonian by singularity."""
    if k.singularity_order > 0:
        return h_value_levy(k, p)
    return h_value(k, p, force_quadrature=force_quadrature)
