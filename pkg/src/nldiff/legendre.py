"""Legendre-Fenchel transform L(q) = sup_p { p q - H(p) }.

H' is strictly increasing (H'' > 0), so the supremum is characterized by
the unique root of H'(p) = q.  The root is found with Newton iterations on
a maintained bisection bracket grown geometrically from p = 0; kernels with
a finite domain radius p_max have the bracket capped just inside p_max and
the supremum over the open interval is taken as the limit value.

The module also evaluates the per-family growth laws of L at large q
(ratio probes, not sharp constants) and the two-sided q ln q sandwich for
the singular compact Levy kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConjugateError
from .hamiltonian import domain, ham_eval
from .kernels import Family, Kernel

__all__ = ["LegendrePoint", "AsymptoticLaw", "conjugate", "law_prediction",
           "asymptotic_ratio", "sandwich_check"]

_MAX_DOUBLINGS = 1000
_CAP_MARGIN = 1e-12


@dataclass(frozen=True)
class LegendrePoint:
    q: float
    p0: float
    value: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class AsymptoticLaw:
    family: Family
    form: str
    samples: tuple  # of (q, L(q) / f(q))


def conjugate(k: Kernel, q: float) -> LegendrePoint:
    """One evaluation of the convex conjugate, L(q) with its maximizer."""
    q = float(q)
    if not math.isfinite(q):
        raise ValueError("q must be finite")
    if q == 0.0:
        return LegendrePoint(0.0, 0.0, 0.0, 0, 0.0)
    sign = 1.0 if q > 0 else -1.0
    qa = abs(q)   # H' is odd, L even: solve on the positive side

    p_max = domain(k).p_max
    cap = p_max * (1.0 - _CAP_MARGIN) if math.isfinite(p_max) else math.inf

    tol = 1e-10 * max(1.0, qa)
    evals = 0

    def hp(p):
        nonlocal evals
        evals += 1
        return ham_eval(k, p)

    # grow the bracket [lo, hi] until H'(hi) >= q
    lo, flo = 0.0, -qa
    hi = min(1.0, cap / 2.0) if math.isfinite(cap) else 1.0
    ev = hp(hi)
    n = 0
    while ev.deriv < qa:
        lo, flo = hi, ev.deriv - qa
        if math.isfinite(cap):
            if hi >= cap:
                # supremum attained in the limit at the domain edge
                return LegendrePoint(q, sign * cap,
                                     max(0.0, cap * qa - ev.value),
                                     evals, abs(ev.deriv - qa))
            hi = cap - 0.5 * (cap - hi)
        else:
            hi *= 2.0
        n += 1
        if n > _MAX_DOUBLINGS:
            raise ConjugateError(
                f"could not bracket H'(p) = {qa:g} in {n} doublings")
        ev = hp(hi)

    # safeguarded Newton on f(p) = H'(p) - q
    p = min(max(0.5 * (lo + hi), lo + 1e-16), hi)
    start = math.copysign(min(1.0, cap / 2.0 if math.isfinite(cap) else 1.0), 1.0)
    if lo < start < hi:
        p = start
    ev = hp(p)
    for _ in range(200):
        f = ev.deriv - qa
        if abs(f) <= tol:
            break
        if f < 0.0:
            lo = p
        else:
            hi = p
        p_new = p - f / ev.second if ev.second > 0 else 0.5 * (lo + hi)
        if not lo < p_new < hi:
            p_new = 0.5 * (lo + hi)
        if hi - lo < 1e-15 * max(1.0, abs(p)):
            p = 0.5 * (lo + hi)
            ev = hp(p)
            break
        p = p_new
        ev = hp(p)

    value = p * qa - ev.value
    if value < 0.0:
        # rounding at q ~ 0; L >= 0 by construction
        value = 0.0
    return LegendrePoint(q, sign * p, value, evals, abs(ev.deriv - qa))


# ---------------------------------------------------------------------------
# asymptotic laws

def law_prediction(k: Kernel, q: float) -> float:
    """Predicted growth f(q) of L(q) for the kernel's family, q > e."""
    lnq = math.log(q)
    fam = k.family
    if fam in (Family.UNIFORM, Family.POLYNOMIAL, Family.SINGULAR):
        return q * lnq / k.support_radius
    if fam is Family.CUSTOM and math.isfinite(k.support_radius):
        return q * lnq / k.support_radius
    if fam is Family.STRETCHED:
        a = k.params["alpha"]
        return q * lnq ** ((a - 1.0) / a)
    if fam is Family.GAUSSIAN:
        return 2.0 * q * math.sqrt(lnq)
    if fam is Family.CRITICAL:
        return q
    raise ValueError(f"no asymptotic law for family {fam}")


def _law_form(k: Kernel) -> str:
    fam = k.family
    if fam in (Family.UNIFORM, Family.POLYNOMIAL, Family.SINGULAR) or (
            fam is Family.CUSTOM and math.isfinite(k.support_radius)):
        return f"q*ln(q)/{k.support_radius:g}"
    if fam is Family.STRETCHED:
        a = k.params["alpha"]
        return f"q*(ln q)^{(a - 1.0) / a:g}"
    if fam is Family.GAUSSIAN:
        return "2*q*(ln q)^0.5"
    if fam is Family.CRITICAL:
        return "q"
    raise ValueError(f"no asymptotic law for family {fam}")


def asymptotic_ratio(k: Kernel, q_list) -> AsymptoticLaw:
    """Ratios L(q)/f(q) along an increasing probe list with min(q) > e."""
    q_list = [float(q) for q in q_list]
    if any(b <= a for a, b in zip(q_list, q_list[1:])):
        raise ValueError("q_list must be strictly increasing")
    if q_list[0] <= math.e:
        raise ValueError("asymptotic probes need q > e so that ln q > 1")
    samples = tuple((q, conjugate(k, q).value / law_prediction(k, q))
                    for q in q_list)
    return AsymptoticLaw(k.family, _law_form(k), samples)


def sandwich_check(alpha: float, q_list) -> tuple[float, float]:
    """(min, max) of L(q)/(q ln q) for the singular compact kernel."""
    from .kernels import singular_compact

    k = singular_compact(alpha)
    law = asymptotic_ratio(k, q_list)
    ratios = [r for _, r in law.samples]
    return min(ratios), max(ratios)
