"""Rate function of the bounded-domain deviation and the predicted bound.

After the hyperbolic rescaling (Rx, Rt) the deviation decays like
exp(-R * I(x/R, t/R)) with

    I(x, t) = t * L((1 - |x|) / t)      on the rescaled unit interval,

where L is the convex conjugate of the kernel Hamiltonian and 1 - |x| is
the distance to the boundary in 1-D.  The capped variant min(A, I) is the
solution of the Cauchy-Dirichlet Hamilton-Jacobi problem with initial
value A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernels import Kernel
from .legendre import conjugate

__all__ = ["BoundPrediction", "rate", "rate_capped", "bound"]


@dataclass(frozen=True)
class BoundPrediction:
    R: float
    theta: float
    t_phys: float
    exponent: float            # R * I(theta, t_phys / R)
    bound: float               # exp(-exponent)
    # closed asymptotic exponent for compactly supported kernels, else None
    asymptotic_exponent: float | None = None


def rate(k: Kernel, x: float, t: float) -> float:
    """I(x, t) = t L((1 - |x|)/t) on [-1, 1] x (0, inf)."""
    x, t = float(x), float(t)
    if abs(x) > 1.0:
        raise ValueError(f"rescaled position must satisfy |x| <= 1; got {x:g}")
    if t <= 0.0:
        # the t = 0 slice is identically +inf; reject rather than return a
        # sentinel that could silently propagate into bounds
        raise ValueError("rate is defined for t > 0 only")
    dist = 1.0 - abs(x)
    if dist == 0.0:
        return 0.0
    return t * conjugate(k, dist / t).value


def rate_capped(k: Kernel, x: float, t: float, cap: float) -> float:
    """min(cap, rate); the Lax-Oleinik value with initial level cap."""
    if cap <= 0.0:
        raise ValueError("cap must be positive")
    return min(cap, rate(k, x, t))


def bound(k: Kernel, R: float, theta: float, t_phys: float) -> BoundPrediction:
    """Predicted deviation bound sup_{|x| <= theta R} |u - u_R|(t_phys)."""
    R, theta, t_phys = float(R), float(theta), float(t_phys)
    if R <= 0.0:
        raise ValueError("R must be positive")
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    if t_phys <= 0.0:
        raise ValueError("t_phys must be positive")
    exponent = R * rate(k, theta, t_phys / R)
    asym = None
    if math.isfinite(k.support_radius) and k.singularity_order == 0:
        arg = (1.0 - theta) * R / t_phys
        if arg > 1.0:
            asym = (1.0 - theta) * R / k.support_radius * math.log(arg)
    return BoundPrediction(R, theta, t_phys, exponent,
                           math.exp(-exponent), asym)
