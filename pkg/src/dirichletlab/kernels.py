"""Closed-form heat kernels and parametrized heat-kernel bound families.

Four bound families are supported, each with upper/lower envelope evaluators
that are pure functions of user-supplied constants (constants are never
fitted from data):

* ``gaussian_ahlfors(C1, C2, K1, K2, alpha)``:
  ``C2 t^(-a/2) exp(-d^2/(K2 t)) <= p <= C1 t^(-a/2) exp(-d^2/(K1 t))``
* ``sub_gaussian(c1, c2, c3, c4, alpha, beta)`` with beta >= 2:
  ``c1 t^(-a/b) exp(-c2 (d^b/t)^(1/(b-1))) <= p <= c3 ... exp(-c4 ...)``
* ``polynomial_nonlocal(c1, c2, alpha, beta)`` with beta < 2:
  ``t^(-a/b) (1 + c1 d/t^(1/b))^-(a+b) <= p <= t^(-a/b) (1 + c2 d/t^(1/b))^-(a+b)``
* ``lie_group(kappa, c1, c2, c3, nu)``:
  ``c1 t^(-nu/2) e^(-c2 t - c2 d^2/t) <= p <= kappa t^(-nu/2) e^(kappa t - c3 d^2/t)``

Derived quantities: the on-diagonal sup bound M(t), the exponential-envelope
constant C(lam) = inf_t M(t) e^(lam t), the volume threshold guaranteeing a
spectral gap for the lie_group family, per-family irreducibility time windows,
and the energy-scaling exponent estimate from two-sided bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DIRICHLET_FORM

FAMILIES = ("gaussian_ahlfors", "sub_gaussian", "polynomial_nonlocal", "lie_group")


class BoundError(ValueError):
    """Constants violate the family's constraints."""


@dataclass(frozen=True)
class KernelBound:
    """A two-sided heat-kernel bound family with positive constants."""

    family: str
    params: dict

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise BoundError(f"unknown bound family {self.family!r}")
        p = self.params
        for k, v in p.items():
            if not v > 0:
                raise BoundError(f"constant {k}={v} must be positive")
        if self.family == "gaussian_ahlfors":
            _need(p, "C1", "C2", "K1", "K2", "alpha")
            if p["C1"] < p["C2"] or p["K1"] < p["K2"]:
                raise BoundError("need C1 >= C2 and K1 >= K2 for upper >= lower")
        elif self.family == "sub_gaussian":
            _need(p, "c1", "c2", "c3", "c4", "alpha", "beta")
            if p["beta"] < 2:
                raise BoundError("sub_gaussian requires beta >= 2")
            if p["c3"] < p["c1"] or p["c4"] > p["c2"]:
                raise BoundError("need c3 >= c1 and c4 <= c2 for upper >= lower")
        elif self.family == "polynomial_nonlocal":
            _need(p, "c1", "c2", "alpha", "beta")
            if not p["beta"] < 2:
                raise BoundError("polynomial_nonlocal requires beta < 2")
            if p["c1"] < p["c2"]:
                raise BoundError("need c1 >= c2 for upper >= lower")
        else:
            _need(p, "kappa", "c1", "c2", "c3", "nu")
            if p["kappa"] < p["c1"] or p["c3"] > p["c2"]:
                raise BoundError("need kappa >= c1 and c3 <= c2 for upper >= lower")

    def __getattr__(self, name: str):
        try:
            return self.params[name]
        except KeyError as exc:  # pragma: no cover - attribute protocol
            raise AttributeError(name) from exc


def _need(p: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in p]
    extra = [k for k in p if k not in keys]
    if missing or extra:
        raise BoundError(f"missing {missing}, unexpected {extra}")


def gaussian_ahlfors(C1, C2, K1, K2, alpha) -> KernelBound:
    return KernelBound(
        "gaussian_ahlfors", dict(C1=C1, C2=C2, K1=K1, K2=K2, alpha=alpha)
    )


def sub_gaussian(c1, c2, c3, c4, alpha, beta) -> KernelBound:
    return KernelBound(
        "sub_gaussian", dict(c1=c1, c2=c2, c3=c3, c4=c4, alpha=alpha, beta=beta)
    )


def polynomial_nonlocal(c1, c2, alpha, beta) -> KernelBound:
    return KernelBound("polynomial_nonlocal", dict(c1=c1, c2=c2, alpha=alpha, beta=beta))


def lie_group(kappa, c1, c2, c3, nu) -> KernelBound:
    return KernelBound("lie_group", dict(kappa=kappa, c1=c1, c2=c2, c3=c3, nu=nu))


# ---------------------------------------------------------------------------
# exact Gaussian reference kernel


def gaussian_heat_kernel(t, p, q, n: int, scale: str = DIRICHLET_FORM):
    """Free-space Gaussian transition density on R^n.

    ``dirichlet_form`` scale has variance 2t per axis, ``probabilist`` has t.
    """
    if np.any(np.asarray(t) <= 0):
        raise ValueError("time must be positive")
    diff = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    if diff.ndim and diff.shape[-1] == n and (n > 1 or diff.ndim > 1):
        d2 = np.sum(diff * diff, axis=-1)  # rows are points
    else:
        d2 = diff * diff  # scalar coordinates (n = 1)
    var = 2.0 * np.asarray(t) if scale == DIRICHLET_FORM else np.asarray(t)
    return (2.0 * math.pi * var) ** (-n / 2.0) * np.exp(-d2 / (2.0 * var))


# ---------------------------------------------------------------------------
# envelopes


def envelope(bound: KernelBound, t, d):
    """(lower, upper) envelope values at time t and distance d."""
    t = np.asarray(t, dtype=float)
    d = np.asarray(d, dtype=float)
    if np.any(t <= 0) or np.any(d < 0):
        raise ValueError("need t > 0 and d >= 0")
    p = bound.params
    if bound.family == "gaussian_ahlfors":
        a = p["alpha"]
        lo = p["C2"] * t ** (-a / 2) * np.exp(-d * d / (p["K2"] * t))
        hi = p["C1"] * t ** (-a / 2) * np.exp(-d * d / (p["K1"] * t))
    elif bound.family == "sub_gaussian":
        a, b = p["alpha"], p["beta"]
        arg = (d**b / t) ** (1.0 / (b - 1.0))
        lo = p["c1"] * t ** (-a / b) * np.exp(-p["c2"] * arg)
        hi = p["c3"] * t ** (-a / b) * np.exp(-p["c4"] * arg)
    elif bound.family == "polynomial_nonlocal":
        a, b = p["alpha"], p["beta"]
        u = d / t ** (1.0 / b)
        lo = t ** (-a / b) * (1.0 + p["c1"] * u) ** (-(a + b))
        hi = t ** (-a / b) * (1.0 + p["c2"] * u) ** (-(a + b))
    else:
        nu = p["nu"]
        lo = p["c1"] * t ** (-nu / 2) * np.exp(-p["c2"] * t - p["c2"] * d * d / t)
        hi = p["kappa"] * t ** (-nu / 2) * np.exp(p["kappa"] * t - p["c3"] * d * d / t)
    return lo, hi


def sup_kernel(bound: KernelBound, t):
    """On-diagonal sup bound M(t): the upper envelope at distance zero."""
    return envelope(bound, t, 0.0)[1]


def _power_law(bound: KernelBound):
    """(C, gamma) with M(t) = C t^(-gamma), or None for lie_group."""
    p = bound.params
    if bound.family == "gaussian_ahlfors":
        return p["C1"], p["alpha"] / 2
    if bound.family == "sub_gaussian":
        return p["c3"], p["alpha"] / p["beta"]
    if bound.family == "polynomial_nonlocal":
        return 1.0, p["alpha"] / p["beta"]
    return None


def lambda_envelope_constant(bound: KernelBound, lam: float) -> float:
    """C(lam) = inf_{t>0} M(t) e^(lam t), by the calculus minimizer.

    For M(t) = C t^-g the minimizer is t* = g/lam giving C (e lam / g)^g.
    For the lie_group family, t* = (nu/2)/(kappa + lam).  Ties between the
    closed form and the grid fallback are broken toward the smallest t.
    """
    if not lam > 0:
        raise ValueError("lam must be positive (the infimum degenerates)")
    power = _power_law(bound)
    if power is not None:
        c, g = power
        return c * (math.e * lam / g) ** g
    p = bound.params
    kap, nu = p["kappa"], p["nu"]
    tstar = (nu / 2.0) / (kap + lam)
    closed = kap * tstar ** (-nu / 2) * math.exp((kap + lam) * tstar)
    # grid fallback guards against a mistyped closed form
    tg = np.exp(np.linspace(math.log(tstar) - 2, math.log(tstar) + 2, 201))
    grid = float(np.min(kap * tg ** (-nu / 2) * np.exp((kap + lam) * tg)))
    return min(closed, grid)


def good_set_threshold(kappa: float, nu: int) -> float:
    """Volume threshold below which the lie_group bound forces a spectral gap:
    (1/sqrt(kappa)) * (nu/(2 kappa e))^(nu/4)."""
    if not kappa > 0 or nu < 1:
        raise ValueError("need kappa > 0 and nu >= 1")
    return (1.0 / math.sqrt(kappa)) * (nu / (2.0 * kappa * math.e)) ** (nu / 4.0)


def spectral_gap_condition(
    bound: KernelBound, volume: float
) -> tuple[bool, Optional[float]]:
    """Search for a witness time with M(t) < 1/volume^2.

    Power-law families always admit one (M decays); the lie_group family
    admits one iff the volume is below ``good_set_threshold``.
    """
    if not volume > 0:
        raise ValueError("volume must be positive")
    target = 1.0 / volume**2
    power = _power_law(bound)
    if power is not None:
        c, g = power
        t = 2.0 * (c / target) ** (1.0 / g)
        assert sup_kernel(bound, t) < target
        return True, t
    p = bound.params
    kap, nu = p["kappa"], p["nu"]
    if volume < good_set_threshold(kap, nu):
        tstar = nu / (2.0 * kap)  # minimizer of kappa t^(-nu/2) e^(kappa t)
        assert sup_kernel(bound, tstar) < target
        return True, tstar
    return False, None


# ---------------------------------------------------------------------------
# irreducibility time windows


@dataclass(frozen=True)
class Window:
    t0: float
    r_condition: bool
    # comparison function f(t); increasing on (0, t0) by construction
    a: float
    b: float


def irreducibility_window(
    bound: KernelBound, d_xy: float, d_boundary: float
) -> Window:
    """Family-specific time window (0, t0) on which the two-point comparison
    function is increasing, plus whether the near-boundary gap condition
    holds.  ``d_xy`` is the chaining radius, ``d_boundary`` the distance from
    the target point to the complement."""
    if not d_xy > 0 or not d_boundary > 0:
        raise ValueError("distances must be positive")
    p = bound.params
    if bound.family in ("gaussian_ahlfors", "sub_gaussian"):
        if bound.family == "gaussian_ahlfors":
            # lower envelope carries exponent 1/K2, upper carries 1/K1
            alpha, beta = p["alpha"], 2.0
            cl, cu = 1.0 / p["K2"], 1.0 / p["K1"]
        else:
            alpha, beta = p["alpha"], p["beta"]
            cl, cu = p["c2"], p["c4"]
        nu = alpha / beta
        mu = 1.0 / (beta - 1.0)
        a = cl * d_xy ** (beta / (beta - 1.0))
        b = cu * d_boundary ** (beta / (beta - 1.0))
        t0 = (a * mu / nu) ** (1.0 / mu)
        return Window(t0=t0, r_condition=b > a, a=a, b=b)
    if bound.family == "polynomial_nonlocal":
        alpha, beta = p["alpha"], p["beta"]
        nu = 1.0 / (alpha + beta)
        mu = 1.0 / beta
        a = p["c1"] * d_xy
        b = p["c2"] * d_boundary
        t0 = (a * nu / (mu - nu)) ** (1.0 / mu)
        return Window(t0=t0, r_condition=b > a, a=a, b=b)
    # lie_group
    nu = p["nu"]
    a = p["c2"]
    b = p["c2"] * d_xy**2
    d = p["c3"] * d_boundary**2
    t0 = (math.sqrt(nu**2 + 16.0 * a * b) - nu) / (4.0 * a)
    return Window(t0=t0, r_condition=d > b, a=a, b=b)


def window_comparison_factor(bound: KernelBound, w: Window, t) -> np.ndarray:
    """The t-dependent factor of the comparison function for this family;
    strictly increasing on (0, w.t0)."""
    t = np.asarray(t, dtype=float)
    p = bound.params
    if bound.family in ("gaussian_ahlfors", "sub_gaussian"):
        beta = 2.0 if bound.family == "gaussian_ahlfors" else p["beta"]
        nu = p["alpha"] / beta
        mu = 1.0 / (beta - 1.0)
        return t ** (-nu) * np.exp(-w.a / t**mu)
    if bound.family == "polynomial_nonlocal":
        alpha, beta = p["alpha"], p["beta"]
        nu = 1.0 / (alpha + beta)
        mu = 1.0 / beta
        return t**nu / (t**mu + w.a)
    nu = p["nu"]
    return t ** (-nu / 2) * np.exp(-w.a * t - w.b / t)


# ---------------------------------------------------------------------------
# energy-scaling exponent from two-sided bounds


def kappa_estimate(
    J_g: float, alpha: float, beta: float, c1: float, c3: float
) -> tuple[float, float]:
    """Interval estimate for the energy-scaling exponent of a dilation with
    measure factor J_g under a two-sided (alpha, beta) kernel bound:
    center 1 - beta/alpha, radius (beta/alpha) ln(c3/c1) / |ln J_g|.
    Iterating the dilation shrinks the radius like 1/n."""
    if not (J_g > 0 and J_g != 1.0):
        raise ValueError("need J_g > 0, J_g != 1 (bound degenerate at J_g = 1)")
    if not (c3 >= c1 > 0):
        raise ValueError("need c3 >= c1 > 0")
    center = 1.0 - beta / alpha
    radius = (beta / alpha) * math.log(c3 / c1) / abs(math.log(J_g))
    return center, radius
