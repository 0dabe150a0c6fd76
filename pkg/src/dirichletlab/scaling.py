"""Dilation structures and the scaling calculus they induce.

A dilation structure couples a group action on the chart with its measure
factor J_g, the energy exponent kappa(g), and the induced time factor
ell_g = J_g^(kappa(g)-1).  Degenerate actions (J_g = 0) are unrepresentable:
only the positive reals and integer powers of a fixed generator are allowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import SpaceModel, heis_dilate
from .discrete import OperatorMesh, assemble_gasket
from .spectral import dense_propagator, eigensolve


@dataclass(frozen=True)
class DilationStructure:
    group: str  # "positive_reals" | "integers_pow"
    space: SpaceModel
    action: Callable
    jacobian: Callable
    kappa: Callable
    ell: Callable
    r0: float = 0.0  # spatial generator for integers_pow


def _ell_from(jac, kap):
    def ell(g):
        return jac(g) ** (kap(g) - 1.0)

    return ell


def euclidean_dilation(n: int) -> DilationStructure:
    """x -> r x with J_r = r^-n, kappa = 1 - 2/n, ell = r^2."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    jac = lambda r: float(r) ** (-n)
    kap = lambda r: 1.0 - 2.0 / n
    ds = DilationStructure(
        group="positive_reals",
        space=SpaceModel("euclidean", n),
        action=lambda r, pts: float(r) * np.asarray(pts, dtype=float),
        jacobian=jac,
        kappa=kap,
        ell=_ell_from(jac, kap),
    )
    _check_ell_square(ds)
    return ds


def carnot_dilation(Q: int = 4) -> DilationStructure:
    """Anisotropic dilations with homogeneous dimension Q (flat group chart
    action available for Q = 4): J_r = r^-Q, kappa = 1 - 2/Q, ell = r^2."""
    if Q < 3:
        raise ValueError("homogeneous dimension must be >= 3")
    jac = lambda r: float(r) ** (-Q)
    kap = lambda r: 1.0 - 2.0 / Q

    def action(r, pts):
        if Q != 4:
            raise NotImplementedError("chart action implemented for Q = 4")
        return heis_dilate(float(r), np.asarray(pts, dtype=float))

    ds = DilationStructure(
        group="positive_reals",
        space=SpaceModel("heisenberg3", 3),
        action=action,
        jacobian=jac,
        kappa=kap,
        ell=_ell_from(jac, kap),
    )
    _check_ell_square(ds)
    return ds


def _check_ell_square(ds: DilationStructure) -> None:
    # ell = J^(kappa-1) must collapse to r^2 for the continuous dilations
    for r in (0.5, 1.0, 2.0, 3.0):
        if abs(ds.ell(r) - r * r) > 1e-12 * r * r:
            raise AssertionError("ell(r) != r^2: inconsistent dilation data")


def gasket_dilation() -> DilationStructure:
    """Integer-power dilations of the gasket: one step halves lengths,
    multiplies measure by 3 (J = 3^n) and time by 1/5 (ell = 5^-n)."""
    kappa_val = 1.0 - math.log(5.0) / math.log(3.0)
    jac = lambda n: 3.0 ** float(n)
    kap = lambda n: kappa_val

    def action(n, pts):
        # n-fold contraction toward the corner at the origin
        return np.asarray(pts, dtype=float) / (2.0 ** float(n))

    return DilationStructure(
        group="integers_pow",
        space=SpaceModel("gasket", 0),
        action=action,
        jacobian=jac,
        kappa=kap,
        ell=_ell_from(jac, kap),
        r0=2.0,
    )


# ---------------------------------------------------------------------------
# scaling audits on mesh pairs


def verify_energy_scaling(
    ds: DilationStructure, mesh_base: OperatorMesh, mesh_scaled: OperatorMesh,
    g, n_vectors: int = 100, seed: int = 7, tol: float = 0.02,
) -> dict:
    """Energy ratio E_base(f o Phi_g) / E_scaled(f) against J_g^kappa over
    random vectors pulled back across matched mesh topologies."""
    if mesh_base.size != mesh_scaled.size:
        raise ValueError("mesh pair must have matched topology")
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    kb = mesh_base.form_matrix()
    ks = mesh_scaled.form_matrix()
    target = ds.jacobian(g) ** ds.kappa(g)
    ratios = np.empty(n_vectors)
    for i in range(n_vectors):
        f = rng.standard_normal(mesh_base.size)
        eb = float(f @ (kb @ f))
        es = float(f @ (ks @ f))
        ratios[i] = eb / es
    dev = float(np.abs(ratios / target - 1.0).max())
    return {
        "target": target,
        "ratios": ratios,
        "max_rel_deviation": dev,
        "pass": dev <= tol,
    }


def verify_semigroup_factorization(
    ds: DilationStructure, mesh_base: OperatorMesh, mesh_scaled: OperatorMesh,
    g, t: float, n_vectors: int = 20, seed: int = 11, tol: float = 0.02,
) -> dict:
    """Propagator factorization audit: e^(-M_base t) f against
    e^(-M_scaled ell t) f on matched topologies, plus the eigenvalue
    corollary lam_n(scaled) * ell = lam_n(base)."""
    if max(mesh_base.size, mesh_scaled.size) > 2000:
        raise ValueError("dense factorization audit limited to 2000 nodes")
    ell = ds.ell(g)
    pb = dense_propagator(mesh_base, t)
    ps = dense_propagator(mesh_scaled, ell * t)
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    worst = 0.0
    for _ in range(n_vectors):
        f = rng.standard_normal(mesh_base.size)
        a = pb @ f
        b = ps @ f
        worst = max(worst, float(np.abs(a - b).max() / max(np.abs(a).max(), 1e-300)))
    k = min(5, mesh_base.size)
    lam_b = eigensolve(mesh_base, k).eigenvalues
    lam_s = eigensolve(mesh_scaled, k).eigenvalues
    eig_dev = float(np.abs(lam_s * ell / lam_b - 1.0).max())
    return {
        "ell": ell,
        "max_rel_deviation": worst,
        "eigenvalue_rel_deviation": eig_dev,
        "pass": worst <= tol and eig_dev <= tol,
    }


# ---------------------------------------------------------------------------
# gasket spectral scaling


def gasket_eigen_scaling(levels, k: int = 3) -> dict:
    """Decimation time-scaling report across gasket refinement levels.

    The assembled operators carry the 5^m energy renormalization, so their
    low eigenvalues converge as m grows; the per-level time factor is read
    off as 5 * lam_n(m) / lam_n(m+1) and tends to the decimation value 5.
    The stability constant c bounds lam_1(m) against the pure 5^m law
    anchored at the coarsest level.
    """
    levels = sorted(levels)
    spectra = {}
    for m in levels:
        mesh = assemble_gasket(m)
        kk = min(k, mesh.size)
        spectra[m] = eigensolve(mesh, kk).eigenvalues
    ratios = []
    for m0, m1 in zip(levels, levels[1:]):
        kk = min(len(spectra[m0]), len(spectra[m1]))
        if m1 != m0 + 1:
            continue
        ratios.append(
            {
                "level": m0,
                "ratio": (5.0 * spectra[m0][:kk] / spectra[m1][:kk]).tolist(),
            }
        )
    base = levels[0]
    c = 1.0
    for m in levels[1:]:
        # raw graph eigenvalue ratio vs the pure decimation law 5^(m-base)
        s = (spectra[base][0] / 5.0**base) / (spectra[m][0] / 5.0**m)
        drift = s / 5.0 ** (m - base)
        c = max(c, drift, 1.0 / drift)
    return {
        "levels": levels,
        "eigenvalues": {m: spectra[m].tolist() for m in levels},
        "decimation_ratios": ratios,
        "envelope_c": c,
        "beta": math.log(5.0) / math.log(2.0),
        "length_scale": 2.0,
        "time_scale": 5.0,
    }


# ---------------------------------------------------------------------------
# small-deviation orchestration (spectral target vs Monte Carlo columns)


def small_deviation_orchestrator(
    *,
    domain,
    mesh: OperatorMesh,
    process,
    start,
    t: float,
    dilation: DilationStructure | None = None,
    exponents=None,
    epsilons=None,
    n_paths: int = 100_000,
    h_t: float = 1e-3,
    seed: int = 0,
    workers: int = 1,
    k: int = 4,
    bridge_correction: bool = True,
) -> dict:
    """Survival of the shrunken domains at fixed horizon, scaled by the
    base-domain spectral gap, against the ground-state target c1 phi1(x).

    Rows are indexed by the dilation exponent n (domain Phi_g^n(U), start
    Phi_g^n(x), scale factor e^(lam1 t / ell^n)) or by epsilon for the
    continuous family.
    """
    from .discrete import nearest_node
    from .stochastic import _dilate_shape, survival_estimate
    from .core import make_domain

    sd = eigensolve(mesh, k)
    lam1 = float(sd.eigenvalues[0])
    node = nearest_node(mesh, start)
    target = float(sd.coefficients[0] * sd.eigenfunctions[0, node])
    if epsilons is not None:
        factors = list(epsilons)
        labels = [("eps", e) for e in factors]
        ells = [e**2 for e in factors]
    else:
        exps = list(exponents if exponents is not None else [0, 1])
        if dilation is None:
            raise ValueError("need a dilation structure for exponent rows")
        if dilation.group != "positive_reals":
            raise ValueError("path simulation exists only for continuous dilations")
        r0 = dilation.r0 if dilation.r0 > 1.0 else 2.0  # shrinking generator
        factors = [r0 ** (-n) for n in exps]
        labels = [("n", n) for n in exps]
        ells = [dilation.ell(r) for r in factors]
    rows = []
    start = np.asarray(start, dtype=float)
    for (kind, val), r, ell in zip(labels, factors, ells):
        shape_n = _dilate_shape(domain.shape, r, domain.space.kind)
        dom_n = make_domain(domain.space, shape_n, label=f"{domain.label}_{kind}{val}")
        if process.kind == "euclidean_bm":
            start_n = r * start
        else:
            start_n = heis_dilate(r, start)
        batch = survival_estimate(
            process, start_n, dom_n, t, n_paths, h_t * ell,
            bridge_correction=bridge_correction and process.kind == "euclidean_bm"
            and domain.shape.boundary_gaps(start[None, :]) is not None,
            seed=seed, workers=workers, tag=f"orchestrate_{kind}{val}",
        )
        grow = math.exp(min(lam1 * t / ell, 700.0))
        rows.append(
            {
                kind: val,
                "r": r,
                "ell": ell,
                "p_hat": batch.estimate,
                "ci95": batch.ci95,
                "survived": batch.survived,
                "scaled": grow * batch.estimate,
                "scaled_ci": grow * batch.ci95,
                "undersampled": batch.survived == 0,
            }
        )
    return {"lam1": lam1, "target": target, "rows": rows}
