"""Independent oracles used to pin expected values in the tests.

These deliberately avoid the package's own code paths: plain formulas,
image charges, reflection series, the eigenvalue recursion for the gasket
graph, and brute-force grid minimization.
"""

import math

import numpy as np


def tridiag_dirichlet_eigs(h: float, length: float, scale: str = "dirichlet_form"):
    """Eigenvalues of the 1-D second-difference Dirichlet matrix on an
    interval of the given length: (4/h^2) sin^2(k pi h / (2 L))."""
    n = int(round(length / h)) - 1
    k = np.arange(1, n + 1)
    lam = (4.0 / h**2) * np.sin(k * math.pi * h / (2.0 * length)) ** 2
    return lam if scale == "dirichlet_form" else lam / 2.0


def gauss_density(t: float, d, sigma2: float = 1.0):
    d = np.asarray(d, dtype=float)
    return np.exp(-d * d / (2.0 * sigma2 * t)) / math.sqrt(2.0 * math.pi * sigma2 * t)


def images_interval_kernel(t, x, y, a, b, sigma2=1.0, n_images=12):
    """Killed kernel on (a, b) by the method of images."""
    length = b - a
    xs, ys = x - a, y - a
    total = 0.0
    for m in range(-n_images, n_images + 1):
        total += gauss_density(t, xs - ys - 2 * m * length, sigma2)
        total -= gauss_density(t, xs + ys - 2 * m * length, sigma2)
    return total


def interval_survival_series(t, x, a, b, sigma2=1.0, n_terms=5):
    """No-exit probability from x in (a, b) by separation of variables."""
    length = b - a
    xs = x - a
    total = 0.0
    for k in range(1, n_terms + 1):
        lam = sigma2 * (k * math.pi / length) ** 2 / 2.0
        c_k = (2.0 / (k * math.pi)) * (1.0 - (-1.0) ** k)
        total += c_k * math.sin(k * math.pi * xs / length) * math.exp(-lam * t)
    return total


def reflection_small_ball(t, eps, sigma2=1.0, n_terms=6):
    """P(sup_{s<=t} |B_s| < eps) for 1-D BM via the reflection series."""
    total = 0.0
    for k in range(n_terms):
        total += (
            (-1.0) ** k
            * (4.0 / ((2 * k + 1) * math.pi))
            * math.exp(-((2 * k + 1) ** 2) * math.pi**2 * sigma2 * t / (8.0 * eps**2))
        )
    return total


def decimation_map(lam):
    """Graph-eigenvalue recursion between consecutive gasket levels."""
    return lam * (5.0 - lam)


def decimation_preimage(lam):
    """Continuation branch: the small preimage of the recursion."""
    return (5.0 - math.sqrt(25.0 - 4.0 * lam)) / 2.0


def level1_gasket_dirichlet():
    """Dense 3x3 independent solve of the level-1 interior Laplacian."""
    l = np.array([[4.0, -1.0, -1.0], [-1.0, 4.0, -1.0], [-1.0, -1.0, 4.0]])
    return np.sort(np.linalg.eigvalsh(l))


def log_grid_min(fn, lo=1e-6, hi=1e6, n=10_000):
    ts = np.exp(np.linspace(math.log(lo), math.log(hi), n))
    with np.errstate(over="ignore"):  # inf far from the minimizer is fine
        vals = fn(ts)
    return float(np.min(vals)), float(ts[int(np.argmin(vals))])


def trapezoid(fn, a, b, n=20_001):
    xs = np.linspace(a, b, n)
    return float(np.trapezoid(fn(xs), xs))
