"""Runnable invariant suites backing the `nldiff selftest` subcommand.

Each suite returns (ok, detail).  They are deliberately independent of the
pytest suite so the installed CLI can verify itself without a test harness,
but the pytest acceptance tests call the same functions.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels as K
from .hamiltonian import domain, h_value, h_value_levy, ham_eval
from .legendre import conjugate
from .ratefn import rate, rate_capped
from .solver import (DIRECT, FFT, ConvolutionOperator, Field, SolveConfig,
                     integrate, make_grid)

_BUILTINS = None


def _builtins():
    global _BUILTINS
    if _BUILTINS is None:
        _BUILTINS = {
            "uniform": K.uniform_compact(1.0),
            "poly": K.polynomial_compact(),
            "gaussian": K.gaussian(),
            "stretched2": K.stretched_exp(2.0),
            "critical": K.critical_exp(),
        }
    return _BUILTINS


def _p_samples(k, count=8):
    p_max = domain(k).p_max
    top = min(3.0, 0.9 * p_max)
    return np.linspace(0.05, top, count)


# --------------------------------------------------------------------- kernel

def kernel_symmetry():
    rng = np.random.default_rng(7)
    for name, k in {**_builtins(), "singular": K.singular_compact(0.5)}.items():
        sr = k.support_radius if math.isfinite(k.support_radius) else 10.0
        y = rng.uniform(1e-6, sr, size=1000)
        if not np.array_equal(K.evaluate(k, y), K.evaluate(k, -y)):
            return False, f"{name}: J(y) != J(-y)"
    return True, "J(y) = J(-y) exactly on 1000 samples per builtin"


def kernel_mass():
    grids = {
        "uniform": np.linspace(-1, 1, 4097),
        "poly": np.linspace(-2, 2, 40001),
        "gaussian": np.linspace(-40, 40, 400001),
        "stretched2": np.linspace(-40, 40, 400001),
        "critical": np.linspace(-60, 60, 2400001),
    }
    for name, k in _builtins().items():
        y = grids[name]
        m = float(np.trapezoid(K.evaluate(k, y), y))
        rel = abs(m - k.mass) / k.mass
        if rel > 1e-8:
            return False, f"{name}: trapezoid mass off by {rel:.2e}"
    return True, "trapezoid mass matches analytic mass to 1e-8 relative"


def kernel_levy_moment():
    for alpha in (0.5, 1.0, 1.5):
        k = K.singular_compact(alpha)
        # int y^2 J over [-1,1] = 2/(2-alpha); analytic near 0, trapezoid above
        eps = 1e-6
        head = 2.0 * eps ** (2.0 - alpha) / (2.0 - alpha)
        y = np.geomspace(eps, 1.0, 200001)
        tail = 2.0 * float(np.trapezoid(y * y * K.evaluate(k, y), y))
        got = head + tail
        want = 2.0 / (2.0 - alpha)
        if not math.isfinite(got) or abs(got - want) / want > 1e-6:
            return False, f"alpha={alpha}: moment {got} != {want}"
    return True, "second Levy moment finite and equals 2/(2-alpha)"


# ---------------------------------------------------------------- hamiltonian

def hamiltonian_evenness():
    for name, k in _builtins().items():
        for p in _p_samples(k, 5):
            a, b = ham_eval(k, p), ham_eval(k, -p)
            if abs(a.value - b.value) > 1e-9 * max(1.0, abs(a.value)):
                return False, f"{name}: H({p}) != H(-{p})"
    k = K.singular_compact(0.5)
    for p in (0.5, 1.0, 2.0):
        a, b = h_value_levy(k, p), h_value_levy(k, -p)
        if abs(a.value - b.value) > 1e-9 * max(1.0, abs(a.value)):
            return False, f"singular: H({p}) != H(-{p})"
    return True, "H is even for every symmetric kernel"


def hamiltonian_convexity():
    for name, k in _builtins().items():
        ps = _p_samples(k, 12)
        for p1, p2, p3 in zip(ps, ps[1:], ps[2:]):
            lam = (p3 - p2) / (p3 - p1)
            h1, h2, h3 = (ham_eval(k, p).value for p in (p1, p2, p3))
            if h2 > lam * h1 + (1 - lam) * h3 + 1e-10 * max(1.0, h3):
                return False, f"{name}: convexity violated at p={p2}"
    return True, "H convex along every sampled chord"


def hamiltonian_derivative_consistency():
    rng = np.random.default_rng(11)
    step = 1e-5
    for name, k in _builtins().items():
        p_max = domain(k).p_max
        top = min(3.0, 0.8 * p_max)
        for p in rng.uniform(-top, top, size=10):
            ev = ham_eval(k, p)
            fd = (ham_eval(k, p + step).value
                  - ham_eval(k, p - step).value) / (2 * step)
            if abs(fd - ev.deriv) > max(1e-6, 1e-4 * abs(ev.deriv)):
                return False, f"{name}: H'({p:.3f}) = {ev.deriv} vs FD {fd}"
    return True, "H' matches central differences on 50 sampled points"


def hamiltonian_monotone_gradient():
    for name, k in _builtins().items():
        for p in np.concatenate([_p_samples(k, 6), -_p_samples(k, 6)]):
            if p * ham_eval(k, p).deriv <= 0.0:
                return False, f"{name}: p H'(p) <= 0 at p={p}"
    return True, "p * H'(p) > 0 away from the origin"


def hamiltonian_quadrature_vs_closed():
    for name in ("uniform", "gaussian", "critical"):
        k = _builtins()[name]
        p_max = domain(k).p_max
        for p in (0.1, 0.5, 1.0, 2.0, 5.0):
            if p >= p_max:
                continue
            a = h_value(k, p)
            b = h_value(k, p, force_quadrature=True)
            if abs(a.value - b.value) > 1e-8 * max(1e-12, abs(a.value)):
                return False, f"{name}: quadrature off at p={p}"
    return True, "quadrature reproduces every closed form to 1e-8 relative"


# ------------------------------------------------------------------- legendre

def legendre_fenchel_young():
    rng = np.random.default_rng(23)
    for name in ("uniform", "gaussian"):
        k = _builtins()[name]
        p = rng.uniform(-3.0, 3.0, size=100)
        q = rng.uniform(-20.0, 20.0, size=100)
        for pi, qi in zip(p, q):
            H = ham_eval(k, pi).value
            L = conjugate(k, qi).value
            if pi * qi > H + L + 1e-9:
                return False, f"{name}: p q > H + L at ({pi}, {qi})"
    return True, "p q <= H(p) + L(q) + 1e-9 on 200 random pairs"


def legendre_biconjugacy():
    from scipy.optimize import minimize_scalar

    for name in ("uniform", "gaussian"):
        k = _builtins()[name]
        for p in np.linspace(0.2, 3.0, 10):
            H = ham_eval(k, p).value
            q_hi = ham_eval(k, p + 2.0).deriv

            def neg(q, _p=p):
                return -( _p * q - conjugate(k, q).value)

            res = minimize_scalar(neg, bounds=(0.0, q_hi), method="bounded",
                                  options={"xatol": 1e-10})
            got = -res.fun
            if abs(got - H) > 1e-6 * max(1.0, abs(H)):
                return False, f"{name}: sup_q(pq - L) = {got} != H = {H}"
    return True, "biconjugate recovers H to 1e-6 relative on 20 samples"


def legendre_evenness():
    for name, k in _builtins().items():
        for q in (0.5, 2.0, 7.0, 40.0):
            a, b = conjugate(k, q), conjugate(k, -q)
            if abs(a.value - b.value) > 1e-9 * max(1.0, a.value):
                return False, f"{name}: L({q}) != L(-{q})"
            if abs(a.p0 + b.p0) > 1e-8 * max(1.0, abs(a.p0)):
                return False, f"{name}: p0(-q) != -p0(q) at q={q}"
    return True, "L even; maximizers odd"


def legendre_slope_monotonicity():
    for name, k in _builtins().items():
        for c in (0.5, 1.0, 3.0):
            rs = np.linspace(0.5, 6.0, 12)
            vals = [conjugate(k, c * r).value / r for r in rs]
            if any(b < a - 1e-10 for a, b in zip(vals, vals[1:])):
                return False, f"{name}: L(c r)/r not nondecreasing, c={c}"
    return True, "r -> L(c r)/r nondecreasing on all grids"


def legendre_convexity():
    for name, k in _builtins().items():
        qs = np.linspace(0.2, 12.0, 14)
        for q1, q2 in zip(qs, qs[1:]):
            mid = conjugate(k, 0.5 * (q1 + q2)).value
            avg = 0.5 * (conjugate(k, q1).value + conjugate(k, q2).value)
            if mid > avg + 1e-10 * max(1.0, avg):
                return False, f"{name}: L midpoint convexity fails at {q1}"
    return True, "L convex on midpoints"


# --------------------------------------------------------------------- ratefn

def rate_boundary_zero():
    for name, k in _builtins().items():
        for t in (0.05, 0.5, 3.0):
            if rate(k, 1.0, t) != 0.0 or rate(k, -1.0, t) != 0.0:
                return False, f"{name}: rate not 0 on the boundary"
    return True, "rate vanishes on the boundary for all t"


def rate_monotonicity():
    for name, k in _builtins().items():
        ts = np.linspace(0.05, 2.0, 8)
        vals = [rate(k, 0.3, t) for t in ts]
        if any(b > a + 1e-10 for a, b in zip(vals, vals[1:])):
            return False, f"{name}: rate not nonincreasing in t"
        xs = np.linspace(0.0, 0.95, 8)
        vals = [rate(k, x, 0.2) for x in xs]
        if any(b > a + 1e-10 for a, b in zip(vals, vals[1:])):
            return False, f"{name}: rate not nonincreasing toward the boundary"
    return True, "rate nonincreasing in t and in |x|"


def rate_cap_consistency():
    k = _builtins()["uniform"]
    for x, t, A in ((0.0, 0.1, 1e6), (0.5, 0.2, 0.5), (0.9, 1.0, 1e-6)):
        r, rc = rate(k, x, t), rate_capped(k, x, t, A)
        if rc > A or rc > r + 1e-15:
            return False, f"capped rate above cap or rate at ({x},{t},{A})"
        if r <= A and rc != r:
            return False, f"cap engaged below the cap at ({x},{t},{A})"
    return True, "rate_capped = min(A, rate) pointwise"


# --------------------------------------------------------------------- solver

def solver_convolution_paths():
    rng = np.random.default_rng(41)
    k = _builtins()["uniform"]
    grid = make_grid(k, 5.0, h=1.0 / 16.0)
    d = ConvolutionOperator(k, grid, DIRECT)
    f = ConvolutionOperator(k, grid, FFT)
    for _ in range(50):
        v = rng.uniform(-1.0, 1.0, size=grid.n)
        if float(np.max(np.abs(d(v) - f(v)))) > 1e-10:
            return False, "direct and fast-transform paths disagree"
    return True, "direct vs fast-transform agree to 1e-10 on 50 random fields"


def solver_convergence_order():
    k = K.polynomial_compact()
    errs = []
    for h in (0.125, 0.0625):
        grid = make_grid(k, 6.0, h=h)
        op = ConvolutionOperator(k, grid, DIRECT)
        out = op(np.ones(grid.n))
        errs.append(abs(out[grid.n // 2] - 1.0))
    ratio = errs[0] / errs[1]
    if not 3.5 <= ratio <= 4.5:
        return False, f"error ratio {ratio:.3f} outside [3.5, 4.5]"
    return True, f"halving h cuts the convolution error by {ratio:.2f}x"


def solver_maximum_principle():
    for name in ("uniform", "gaussian", "critical"):
        k = _builtins()[name]
        grid = make_grid(k, 8.0, h=1.0 / 16.0)
        cfg = SolveConfig(T=0.2, dt=0.01)
        u = integrate(k, Field(grid, np.ones(grid.n)), cfg)
        # discrete row mass can exceed 1 by the trapezoid error where J has
        # a convex kink; the discrete ceiling is exp((m_h - 1)+ t)
        op = ConvolutionOperator(k, grid, FFT)
        m_h = float(np.max(op(np.ones(grid.n))))
        ceiling = math.exp(max(0.0, m_h - 1.0) * cfg.T) + 1e-12
        if np.any(u.values < -1e-12) or np.any(u.values > ceiling):
            return False, f"{name}: values escaped [0, {ceiling}]"
    return True, "0 <= u <= max(u0) up to the discrete row-mass ceiling"


def solver_comparison():
    k = _builtins()["uniform"]
    grid = make_grid(k, 8.0, h=1.0 / 16.0)
    rng = np.random.default_rng(3)
    u0 = rng.uniform(0.0, 1.0, size=grid.n)
    cfg = SolveConfig(T=0.2, dt=0.01)
    u = integrate(k, Field(grid, u0), cfg)
    v = integrate(k, Field(grid, u0 + 0.3), cfg)
    if np.any(u.values > v.values + 1e-12):
        return False, "ordering of initial data not preserved"
    return True, "u0 <= v0 implies u <= v nodewise at T"


def solver_monotone_in_R():
    k = _builtins()["uniform"]
    cfg = SolveConfig(T=0.1, dt=0.005)
    fields = {}
    for R in (6.0, 10.0):
        grid = make_grid(k, R, h=1.0 / 16.0)
        fields[R] = integrate(k, Field(grid, np.ones(grid.n)), cfg)
    small, big = fields[6.0], fields[10.0]
    offset = (big.grid.n - small.grid.n) // 2
    common_big = big.values[offset:offset + small.grid.n]
    if np.any(common_big < small.values - 1e-12):
        return False, "u_R not increasing with R on the common grid"
    return True, "u_R increases nodewise with R"


def solver_decay_in_time():
    k = _builtins()["uniform"]
    grid = make_grid(k, 6.0, h=1.0 / 16.0)
    u1 = integrate(k, Field(grid, np.ones(grid.n)), SolveConfig(T=0.1, dt=0.005))
    u2 = integrate(k, Field(grid, np.ones(grid.n)), SolveConfig(T=0.3, dt=0.005))
    if np.any(u2.values > u1.values + 1e-12):
        return False, "constant-one solution not decaying in time"
    return True, "u(x, t2) <= u(x, t1) for t2 > t1 with u0 = 1"


SUITES = {
    "kernel-symmetry": kernel_symmetry,
    "kernel-mass": kernel_mass,
    "kernel-levy-moment": kernel_levy_moment,
    "hamiltonian-evenness": hamiltonian_evenness,
    "hamiltonian-convexity": hamiltonian_convexity,
    "hamiltonian-derivatives": hamiltonian_derivative_consistency,
    "hamiltonian-monotone-gradient": hamiltonian_monotone_gradient,
    "hamiltonian-quadrature": hamiltonian_quadrature_vs_closed,
    "fenchel-young": legendre_fenchel_young,
    "biconjugacy": legendre_biconjugacy,
    "legendre-evenness": legendre_evenness,
    "slope-monotonicity": legendre_slope_monotonicity,
    "legendre-convexity": legendre_convexity,
    "rate-boundary-zero": rate_boundary_zero,
    "rate-monotonicity": rate_monotonicity,
    "rate-cap": rate_cap_consistency,
    "convolution-paths": solver_convolution_paths,
    "convergence-order": solver_convergence_order,
    "maximum-principle": solver_maximum_principle,
    "comparison-principle": solver_comparison,
    "monotone-in-R": solver_monotone_in_R,
    "decay-in-time": solver_decay_in_time,
}


def run(names=None, report=print):
    """Run the selected suites (all by default); returns True if all passed."""
    names = list(names) if names else list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites: {', '.join(unknown)}")
    all_ok = True
    for name in names:
        try:
            ok, detail = SUITES[name]()
        except Exception as exc:  # surface the failure, keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        report(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
