"""Jump densities J and the queries every other module needs.

All kernels are 1-D, non-negative and even.  A kernel carries its support
radius, the order of its singularity at the origin (0 means bounded) and
its total mass (``inf`` for non-integrable singularities).  Built-in
families:

* ``uniform_compact(eta)``   -- J = 1/(2 eta) on [-eta, eta]
* ``polynomial_compact()``   -- J = -(3/32)(y-2)(y+2) on [-2, 2]
* ``gaussian()``             -- J = (2 pi)^{-1/2} exp(-y^2/2)
* ``stretched_exp(alpha)``   -- J = exp(-|y|^alpha), alpha > 1, unnormalized
* ``critical_exp()``         -- J = (1/2) exp(-|y|)
* ``singular_compact(alpha)``-- J = |y|^{-1-alpha} on [-1, 1], alpha in (0,2)
* ``custom_from_csv(path)``  -- tabulated (y, J), linear interpolation

Built-ins are deliberately NOT renormalized: a mass c != 1 only amounts to
a change of time variable, so the solver uses kernels exactly as written.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, UnsupportedKernel

__all__ = [
    "Family",
    "Kernel",
    "uniform_compact",
    "polynomial_compact",
    "gaussian",
    "stretched_exp",
    "critical_exp",
    "singular_compact",
    "custom_from_table",
    "custom_from_csv",
    "evaluate",
    "mass",
    "tail_mass",
    "kernel_samples",
]


class Family(enum.Enum):
    UNIFORM = "uniform"
    POLYNOMIAL = "poly"
    GAUSSIAN = "gaussian"
    STRETCHED = "stretched"
    CRITICAL = "critical"
    SINGULAR = "singular"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class Kernel:
    """Immutable jump density; safe to share across workers."""

    family: Family
    params: dict = field(default_factory=dict)
    support_radius: float = math.inf
    singularity_order: float = 0.0
    mass: float = math.inf
    # tabulated values, CUSTOM only
    table_y: np.ndarray | None = None
    table_j: np.ndarray | None = None

    def label(self) -> str:
        if self.params:
            inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items())
                             if isinstance(v, (int, float)) and math.isfinite(v))
            if inner:
                return f"{self.family.value}:{inner}"
        return self.family.value


def uniform_compact(eta: float = 1.0) -> Kernel:
    if eta <= 0:
        raise ValueError("eta must be positive")
    return Kernel(Family.UNIFORM, {"eta": float(eta)},
                  support_radius=float(eta), mass=1.0)


def polynomial_compact() -> Kernel:
    return Kernel(Family.POLYNOMIAL, {}, support_radius=2.0, mass=1.0)


def gaussian() -> Kernel:
    return Kernel(Family.GAUSSIAN, {}, support_radius=math.inf, mass=1.0)


def stretched_exp(alpha: float) -> Kernel:
    if alpha <= 1:
        raise ValueError("stretched-exponential decay needs alpha > 1")
    # integral of exp(-|y|^alpha) over the line
    m = 2.0 * special.gamma(1.0 + 1.0 / alpha)
    return Kernel(Family.STRETCHED, {"alpha": float(alpha)},
                  support_radius=math.inf, mass=m)


def critical_exp() -> Kernel:
    return Kernel(Family.CRITICAL, {}, support_radius=math.inf, mass=1.0)


def singular_compact(alpha: float) -> Kernel:
    if not 0.0 < alpha < 2.0:
        raise ValueError("Levy order alpha must lie in (0, 2)")
    return Kernel(Family.SINGULAR, {"alpha": float(alpha)},
                  support_radius=1.0, singularity_order=float(alpha),
                  mass=math.inf)


def custom_from_table(y, j, support_radius, singularity_order=0.0) -> Kernel:
    y = np.asarray(y, dtype=float)
    j = np.asarray(j, dtype=float)
    if y.ndim != 1 or y.shape != j.shape or y.size < 2:
        raise ValueError("custom kernel table needs matching 1-D y and J columns")
    order = np.argsort(y)
    y, j = y[order], j[order]
    if np.any(j < 0):
        raise ValueError("custom kernel values must be non-negative")
    m = math.inf if singularity_order > 0 else float(np.trapezoid(j, y))
    return Kernel(Family.CUSTOM, {}, support_radius=float(support_radius),
                  singularity_order=float(singularity_order), mass=m,
                  table_y=y, table_j=j)


def custom_from_csv(path) -> Kernel:
    """Load a tabulated kernel.  First line: ``# support=<r> singularity=<s>``,
    then two comma-separated columns y, J."""
    support = None
    singularity = 0.0
    ys, js = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line.lstrip("#").split():
                    if "=" in tok:
                        key, _, val = tok.partition("=")
                        if key == "support":
                            support = float(val)
                        elif key == "singularity":
                            singularity = float(val)
                continue
            if line.lower().startswith("y,"):
                continue
            a, _, b = line.partition(",")
            ys.append(float(a))
            js.append(float(b))
    if support is None:
        raise ValueError(f"{path}: missing '# support=<r>' header line")
    return custom_from_table(ys, js, support, singularity)


# ---------------------------------------------------------------------------
# evaluation

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def evaluate(k: Kernel, y):
    """J(y); vectorized.  Exactly 0 outside the (closed) support.

    Raises DomainError at y = 0 when the kernel is singular there.
    """
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if k.singularity_order > 0 and np.any(y == 0.0):
        raise DomainError("singular kernel cannot be evaluated at y = 0")
    a = np.abs(y)
    fam = k.family
    if fam is Family.UNIFORM:
        eta = k.params["eta"]
        out = np.where(a <= eta, 1.0 / (2.0 * eta), 0.0)
    elif fam is Family.POLYNOMIAL:
        out = np.where(a <= 2.0, (3.0 / 32.0) * (4.0 - y * y), 0.0)
    elif fam is Family.GAUSSIAN:
        out = np.exp(-0.5 * y * y) / _SQRT_2PI
    elif fam is Family.STRETCHED:
        out = np.exp(-a ** k.params["alpha"])
    elif fam is Family.CRITICAL:
        out = 0.5 * np.exp(-a)
    elif fam is Family.SINGULAR:
        alpha = k.params["alpha"]
        with np.errstate(divide="ignore"):
            out = np.where(a <= 1.0, a ** (-1.0 - alpha), 0.0)
    elif fam is Family.CUSTOM:
        out = np.interp(y, k.table_y, k.table_j, left=0.0, right=0.0)
        out = np.where(a <= k.support_radius, out, 0.0)
    else:  # pragma: no cover
        raise UnsupportedKernel(f"unknown family {fam}")
    return float(out[0]) if scalar else out


def mass(k: Kernel) -> float:
    """Total mass of J (inf for kernels singular at the origin)."""
    return k.mass


def tail_mass(k: Kernel, a: float) -> float:
    """One-sided tail integral of J over [a, infinity), a >= 0."""
    if a < 0:
        raise ValueError("tail_mass expects a >= 0")
    fam = k.family
    if fam is Family.UNIFORM:
        eta = k.params["eta"]
        return max(0.0, eta - a) / (2.0 * eta)
    if fam is Family.POLYNOMIAL:
        if a >= 2.0:
            return 0.0
        return (3.0 / 32.0) * (16.0 / 3.0 - 4.0 * a + a ** 3 / 3.0)
    if fam is Family.GAUSSIAN:
        return 0.5 * special.erfc(a / math.sqrt(2.0))
    if fam is Family.CRITICAL:
        return 0.5 * math.exp(-a)
    if fam is Family.STRETCHED:
        alpha = k.params["alpha"]
        if a == 0.0:
            return 0.5 * k.mass
        hi = (45.0 + a ** alpha) ** (1.0 / alpha)
        val, _ = integrate.quad(lambda y: math.exp(-y ** alpha), a, hi,
                                epsabs=1e-14, epsrel=1e-12, limit=200)
        return val
    if fam is Family.CUSTOM and k.singularity_order == 0:
        if a >= k.support_radius:
            return 0.0
        yy = k.table_y[k.table_y >= a]
        yy = np.concatenate(([a], yy))
        jj = np.interp(yy, k.table_y, k.table_j, left=0.0, right=0.0)
        return float(np.trapezoid(jj, yy))
    raise UnsupportedKernel("tail mass is not defined for singular kernels")


def kernel_samples(k: Kernel, offsets: np.ndarray) -> np.ndarray:
    """Kernel values at grid offsets for the trapezoidal convolution.

    Where an offset lands exactly on a jump discontinuity of J (the support
    edge of the uniform family) the one-sided average is used, which is what
    the trapezoidal rule gives when the subdivision is split at the jump.
    This keeps the discrete row mass at exactly 1 for aligned grids and
    preserves the discrete maximum principle.
    """
    vals = evaluate(k, offsets)
    if k.family is Family.UNIFORM:
        eta = k.params["eta"]
        edge = np.isclose(np.abs(offsets), eta, rtol=1e-12, atol=1e-12)
        vals = np.where(edge, 1.0 / (4.0 * eta), vals)
    return vals
