import math

import numpy as np
import pytest

import dirichletlab as dl
from dirichletlab.contraction import (
    su2_small_deviation_experiment,
    ContractionMaps,
    ball_sandwich_check,
    bracket_defect,
    coefficient_convergence,
    eigenvalue_contraction_experiment,
    haar_density_ratio,
    su2_bracket,
)

ANNULUS = dl.Box((0.4, 0.0, -0.5), (1.4, 2 * math.pi, 0.5))


def test_contraction_maps_identity():
    maps = ContractionMaps(1.0)
    pts = np.array([[0.3, 1.0, -0.2]])
    assert np.allclose(maps.phi(pts), pts)
    assert np.allclose(maps.u(np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])
    m = ContractionMaps(0.25)
    assert np.allclose(m.phi(pts), [[0.15, 1.0, -0.05]])
    assert np.allclose(m.u_inv(m.u(np.array([1.0, 2.0, 3.0]))), [1.0, 2.0, 3.0])


def test_structure_constants_cyclic():
    e1, e2, e3 = np.eye(3)
    assert np.allclose(su2_bracket(e1, e2), e3)
    assert np.allclose(su2_bracket(e2, e3), e1)
    assert np.allclose(su2_bracket(e3, e1), e2)


def test_bracket_defect_examples():
    assert bracket_defect(0.37, (1, 0, 0), (0, 1, 0)) == pytest.approx(0.0, abs=1e-15)
    # transverse part [e2, e3] = e1 survives scaled by exactly eps
    assert bracket_defect(0.01, (0, 1, 0), (0, 0, 1)) == pytest.approx(0.01)
    # exact linear rate in eps
    v, w = (0.3, -1.2, 0.7), (1.1, 0.4, -0.5)
    vals = [bracket_defect(eps, v, w) / eps for eps in (0.5, 0.1, 0.01)]
    assert max(vals) - min(vals) < 1e-12
    with pytest.raises(ValueError):
        bracket_defect(0.0, v, w)


def test_coefficient_convergence_table():
    rho = np.linspace(0.3, 1.4, 23)
    out = coefficient_convergence([0.1, 0.05, 0.025], rho)
    assert abs(out["fitted_rate"] - 2.0) <= 0.3
    devs = [row["max_dev"] for row in out["rows"]]
    assert devs[0] > devs[1] > devs[2]
    with pytest.raises(ValueError):
        coefficient_convergence([1.2], np.array([2.0]))


def test_haar_density_ratio():
    out = haar_density_ratio(0.01, np.array([1.0]))
    assert out["ratio"][0] == pytest.approx(math.sin(0.02) / 0.02)
    assert out["ratio"][0] == pytest.approx(0.99993, abs=1e-5)
    # removable limit at rho -> 0 and the quadratic deviation law
    out0 = haar_density_ratio(0.05, np.array([1e-14]))
    assert out0["ratio"][0] == pytest.approx(1.0)
    for r, rho in ((0.05, 0.8), (0.02, 1.3)):
        dev = 1.0 - haar_density_ratio(r, np.array([rho]))["ratio"][0]
        assert dev == pytest.approx((2 * r * rho) ** 2 / 6, rel=5e-3)


def test_ball_sandwich_models():
    # chart model: the sandwich is an identity at every scale
    for r in (1.0, 0.3):
        rep = ball_sandwich_check(r, 1e-9, model="chart")
        assert rep["margin"] < 1e-9
        assert rep["pass"]
    # matrix model: distortion below 0.05 at r = 0.1 and shrinking in r
    margins = []
    for r in (0.2, 0.1, 0.05):
        rep = ball_sandwich_check(r, 0.05, model="matrix")
        margins.append(rep["margin"])
        # sandwich: pullback boundary within [1 - margin, 1 + margin]
        assert 1.0 - rep["margin"] <= rep["min_gauge"] <= rep["max_gauge"] <= 1.0 + rep["margin"] + 1e-12
    assert margins[0] > margins[1] > margins[2]
    assert margins[1] < 0.05


def test_eigenvalue_contraction_experiment():
    dom = dl.make_domain(dl.su2_chart(), ANNULUS)
    out = eigenvalue_contraction_experiment((0.4, 0.2, 0.1), dom, h=0.1, k=4)
    assert out["monotone"]
    for n in range(3):
        assert abs(out["fitted_rates"][n] - 2.0) <= 0.3
    last = out["rows"][-1]
    assert max(last["rel_gaps"][:3]) < 0.02
    # sorted-output contract at every scale
    for row in out["rows"]:
        lam = row["eigenvalues"]
        assert all(a <= b + 1e-12 for a, b in zip(lam, lam[1:]))


def test_contraction_multiplicity_pairs():
    # theta-harmonics give degenerate pairs for the limit operator, and the
    # rescaled operator reproduces the pattern at small r
    dom = dl.make_domain(
        dl.su2_chart(), dl.Box((0.7, 0.0, -0.35), (1.3, 2 * math.pi, 0.35))
    )
    from dirichletlab.discrete import assemble_heisenberg_cylindrical, assemble_su2_rescaled
    from dirichletlab.spectral import eigensolve

    lam_h = eigensolve(assemble_heisenberg_cylindrical(dom, 0.06), 8).eigenvalues
    lam_r = eigensolve(assemble_su2_rescaled(0.05, dom, 0.06, rho_min=0.0), 8).eigenvalues

    def pair_pattern(lam, tol=1e-3):
        return [
            abs(a - b) / b < tol for a, b in zip(lam, lam[1:])
        ]

    assert any(pair_pattern(lam_h)), "expected at least one degenerate pair"
    assert pair_pattern(lam_h) == pair_pattern(lam_r)


def test_su2_small_deviation_with_control():
    out = su2_small_deviation_experiment(
        lam1_flat=8.376, eps_list=(0.5, 0.4), t=[11.0 * 0.25, 11.0 * 0.16],
        n_paths=250_000, h_t=2e-3, seed=61, workers=1, control=True,
    )
    for row in out["rows"] + out["control_rows"]:
        assert row["survived"] > 0
        # both pipelines estimate the same limit eigenvalue
        assert abs(row["lam_estimate"] - 8.376) / 8.376 < 0.25
    su2_vals = [r["lam_estimate"] for r in out["rows"]]
    ctrl_vals = [r["lam_estimate"] for r in out["control_rows"]]
    assert abs(np.mean(su2_vals) - np.mean(ctrl_vals)) < 1.0
