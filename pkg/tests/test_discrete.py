import math

import numpy as np
import pytest

import dirichletlab as dl
from dirichletlab.discrete import (
    assemble_heisenberg_cylindrical,
    assemble_su2_rescaled,
    cylindrical_coefficients,
    heisenberg_apply_fields,
    load_mesh,
    mmatrix_report,
    save_mesh,
)
from dirichletlab.spectral import dense_propagator, eigensolve
from oracles import decimation_map, level1_gasket_dirichlet, tridiag_dirichlet_eigs


def weighted_symmetry_defect(mesh):
    k = mesh.form_matrix()
    return abs(k - k.T).max() / max(abs(k).max(), 1e-300)


def min_rayleigh(mesh, n=300, seed=0):
    k = mesh.form_matrix()
    rng = np.random.default_rng(seed)
    return min(float(v @ (k @ v)) for v in rng.standard_normal((n, mesh.size)))


# ---------------------------------------------------------------------------
# euclidean


def test_interval_mesh_basics():
    dom = dl.make_domain(dl.euclidean(1), dl.Interval(0, 1))
    mesh = dl.assemble_euclidean(dom, 0.25)
    assert mesh.size == 3
    assert np.allclose(mesh.nodes[:, 0], [0.25, 0.5, 0.75])
    assert np.allclose(mesh.weights, 0.25)


def test_interval_spectrum_matches_formula_all_k():
    h = 1 / 32
    dom = dl.make_domain(dl.euclidean(1), dl.Interval(0, 1))
    mesh = dl.assemble_euclidean(dom, h)
    sd = eigensolve(mesh, mesh.size)
    expected = tridiag_dirichlet_eigs(h, 1.0)
    rel = np.abs(sd.eigenvalues - expected) / expected
    assert rel.max() < 1e-10


def test_generator_scale_halves_exactly():
    dom_d = dl.make_domain(dl.euclidean(1), dl.Interval(0, 1))
    dom_p = dl.make_domain(dl.euclidean(1, "probabilist"), dl.Interval(0, 1))
    m_d = dl.assemble_euclidean(dom_d, 1 / 16)
    m_p = dl.assemble_euclidean(dom_p, 1 / 16)
    lam_d = eigensolve(m_d, 5).eigenvalues
    lam_p = eigensolve(m_p, 5).eigenvalues
    assert np.abs(lam_d / lam_p - 2.0).max() < 1e-12


def test_interval_richardson_to_continuum():
    dom = dl.make_domain(dl.euclidean(1), dl.Interval(0, 1))
    lam = {}
    for h in (1 / 32, 1 / 64):
        lam[h] = eigensolve(dl.assemble_euclidean(dom, h), 1).eigenvalues[0]
    extrap = (4 * lam[1 / 64] - lam[1 / 32]) / 3
    assert extrap == pytest.approx(math.pi**2, rel=1e-5)


def test_euclidean_is_mmatrix_and_psd():
    dom = dl.make_domain(
        dl.euclidean(2), dl.GaugeBall(dl.Gauge("euclidean_norm"), 1.0, (0.0, 0.0))
    )
    mesh = dl.assemble_euclidean(dom, 1 / 12)
    assert mmatrix_report(mesh)["is_mmatrix"]
    assert weighted_symmetry_defect(mesh) == 0.0
    assert min_rayleigh(mesh) > -1e-10


def test_empty_interior_errors():
    dom = dl.make_domain(dl.euclidean(1), dl.Interval(0, 1))
    with pytest.raises(dl.MeshError):
        dl.assemble_euclidean(dom, 0.6)


# ---------------------------------------------------------------------------
# gasket


def test_gasket_level1_exact_spectrum():
    mesh = dl.assemble_gasket(1)
    lam = eigensolve(mesh, 3).eigenvalues
    assert np.allclose(lam, 5.0 * level1_gasket_dirichlet(), atol=1e-10)
    assert np.allclose(lam, [10.0, 25.0, 25.0], atol=1e-10)
    assert np.allclose(mesh.weights, (2 / 3) / 3)


def test_gasket_decimation_recursion_exact():
    k = 4
    lam2 = eigensolve(dl.assemble_gasket(2), k).eigenvalues / 5.0**2
    lam3 = eigensolve(dl.assemble_gasket(3), k).eigenvalues / 5.0**3
    # each low graph eigenvalue at level 3 maps to a level-2 one exactly
    assert np.allclose(decimation_map(lam3), lam2, atol=1e-8)


def test_gasket_constant_vector_supported_near_corners():
    mesh = dl.assemble_gasket(3)
    v = np.ones(mesh.size)
    residual = mesh.matrix @ v
    nonzero = np.abs(residual) > 1e-9
    # Laplacian of a constant vanishes except where a corner coupling dropped
    assert nonzero.sum() == 6  # two neighbors per outer corner
    corners = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    d = np.min(
        np.linalg.norm(mesh.nodes[nonzero][:, None, :] - corners[None], axis=2), axis=1
    )
    assert d.max() <= 2 ** -3 + 1e-12


def test_gasket_subset_domain():
    dom = dl.make_domain(dl.gasket(3), dl.GasketCells(((0,),)))
    mesh = dl.assemble_gasket(3, dom)
    full = dl.assemble_gasket(2)
    # a single corner cell at level m is the level-(m-1) gasket with energy 5x
    lam_cell = eigensolve(mesh, 3).eigenvalues
    lam_full = eigensolve(full, 3).eigenvalues
    assert np.allclose(lam_cell, 5.0 * lam_full, rtol=1e-12)
    assert mesh.size == full.size


def test_gasket_level_bounds():
    with pytest.raises(dl.MeshError):
        dl.assemble_gasket(0)
    with pytest.raises(dl.MeshError):
        dl.assemble_gasket(9)


# ---------------------------------------------------------------------------
# heisenberg, cartesian chart

HBOX = dl.Box((-1.0, -1.0, -0.6), (1.0, 1.0, 0.6))


def test_heisenberg_field_application_linear():
    dom = dl.make_domain(dl.heisenberg3(), HBOX)
    pts = np.array([[0.1, -0.2, 0.0], [0.3, 0.4, 0.1]])
    xf, yf = heisenberg_apply_fields(dom, 0.05, lambda p: p[:, 0], pts)
    assert np.allclose(xf, 1.0, atol=1e-12)
    assert np.allclose(yf, 0.0, atol=1e-12)
    xf, yf = heisenberg_apply_fields(dom, 0.05, lambda p: p[:, 2], pts)
    assert np.allclose(xf, -pts[:, 1] / 2, atol=1e-10)
    assert np.allclose(yf, pts[:, 0] / 2, atol=1e-10)


def test_heisenberg_symmetry_psd_and_signs():
    dom = dl.make_domain(dl.heisenberg3(), HBOX)
    mesh = dl.assemble_heisenberg(dom, 0.2)
    assert weighted_symmetry_defect(mesh) < 1e-14
    assert min_rayleigh(mesh) > -1e-10
    rep = mmatrix_report(mesh)
    assert not rep["is_mmatrix"]  # mixed terms break the sign structure
    assert rep["relative_to_diagonal"] < 0.25


def test_heisenberg_consistency_order_two():
    # smooth test function against the symbolic operator on a fixed region
    dom = dl.make_domain(dl.heisenberg3(), HBOX)

    def f(p):
        return np.sin(p[:, 0] + 0.3) * np.cos(2 * p[:, 1]) * np.exp(p[:, 2] / 2)

    def lf(p):
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        fx = np.cos(x + 0.3) * np.cos(2 * y) * np.exp(z / 2)
        fxx = -np.sin(x + 0.3) * np.cos(2 * y) * np.exp(z / 2)
        fy = -2 * np.sin(x + 0.3) * np.sin(2 * y) * np.exp(z / 2)
        fyy = -4 * np.sin(x + 0.3) * np.cos(2 * y) * np.exp(z / 2)
        fz = 0.5 * np.sin(x + 0.3) * np.cos(2 * y) * np.exp(z / 2)
        fzz = 0.5 * fz
        fxz = 0.5 * fx
        fyz = 0.5 * fy
        return (
            fxx + fyy + (x * x + y * y) / 4 * fzz - y * fxz + x * fyz
        )

    errs = []
    hs = (0.2, 0.1, 0.05)
    for h in hs:
        mesh = dl.assemble_heisenberg(dom, h)
        got = -(mesh.matrix @ f(mesh.nodes))
        want = lf(mesh.nodes)
        lo = np.array([-1, -1, -0.6])
        hi = np.array([1, 1, 0.6])
        dist = np.minimum(mesh.nodes - lo, hi - mesh.nodes).min(axis=1)
        errs.append(np.abs(got - want)[dist > 0.55].max())
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert abs(slope - 2.0) <= 0.3


def test_heisenberg_koranyi_ball_cauchy_refinement():
    dom = dl.make_domain(dl.heisenberg3(), dl.GaugeBall(dl.Gauge("koranyi"), 1.0))
    lam = [
        eigensolve(dl.assemble_heisenberg(dom, h), 1).eigenvalues[0]
        for h in (1 / 12, 1 / 16, 1 / 24)
    ]
    assert abs(lam[2] - lam[1]) / lam[2] < 0.02


# ---------------------------------------------------------------------------
# cylindrical chart

ANNULUS = dl.Box((0.4, 0.0, -0.5), (1.4, 2 * math.pi, 0.5))


def test_cylindrical_coefficient_values():
    c = cylindrical_coefficients(np.array([1.0]), 0.01)
    assert c["radial"][0] == pytest.approx(0.9998667, abs=2e-7)
    assert c["z2"][0] == pytest.approx(1.0000667, abs=2e-7)
    # Taylor: rho^2 (1 + 2 (r rho)^2 / 3 + ...) = 4.00106691 at rho=2, r=0.01
    c2 = cylindrical_coefficients(np.array([2.0]), 0.01)
    assert c2["z2"][0] == pytest.approx(np.tan(0.02) ** 2 / 1e-4, abs=1e-12)
    assert c2["z2"][0] == pytest.approx(4.0 * (1 + 2 * 0.02**2 / 3), abs=1e-6)
    lim = cylindrical_coefficients(np.array([2.0]), 0.0)
    assert lim["radial"][0] == pytest.approx(0.5)
    assert lim["theta2"][0] == pytest.approx(0.25)
    assert lim["z2"][0] == pytest.approx(4.0)
    assert lim["thetaz"][0] == pytest.approx(2.0)


def test_cylindrical_symmetry_psd_weights():
    dom = dl.make_domain(dl.su2_chart(), ANNULUS)
    mesh = assemble_su2_rescaled(0.3, dom, 0.1, rho_min=0.0)
    assert weighted_symmetry_defect(mesh) < 1e-13
    assert min_rayleigh(mesh, n=200) > -1e-10
    rho = mesh.nodes[:, 0]
    dens = np.sin(2 * 0.3 * rho) / (2 * 0.3)
    h_th = mesh.meta["spacings"][1]
    assert np.allclose(mesh.weights, dens * 0.1 * h_th * 0.1, rtol=1e-12)


def test_su2_entrywise_limit_rate():
    dom = dl.make_domain(dl.su2_chart(), ANNULUS)
    limit = assemble_heisenberg_cylindrical(dom, 0.12, rho_min=0.0)
    devs = []
    for r in (0.2, 0.1, 0.05):
        mr = assemble_su2_rescaled(r, dom, 0.12, rho_min=0.0)
        devs.append(abs(mr.matrix - limit.matrix).max())
    assert devs[0] > devs[1] > devs[2]
    slope = np.polyfit(np.log([0.2, 0.1, 0.05]), np.log(devs), 1)[0]
    assert abs(slope - 2.0) <= 0.3


def test_su2_domain_validation():
    dom = dl.make_domain(dl.su2_chart(), dl.Box((0.4, 0.0, -0.5), (2.0, 2 * math.pi, 0.5)))
    with pytest.raises(dl.MeshError):
        assemble_su2_rescaled(1.0, dom, 0.1, rho_min=0.0)  # r*rho reaches pi/2
    with pytest.raises(dl.MeshError):
        assemble_su2_rescaled(1.5, dl.make_domain(dl.su2_chart(), ANNULUS), 0.1)


def test_semigroup_positivity():
    # M-matrix scheme: propagator preserves positivity to rounding
    dom1 = dl.make_domain(dl.euclidean(1), dl.Interval(0, 1))
    m1 = dl.assemble_euclidean(dom1, 1 / 24)
    p = dense_propagator(m1, 0.05)
    rng = np.random.default_rng(4)
    for _ in range(20):
        v = np.abs(rng.standard_normal(m1.size))
        assert (p @ v).min() > -1e-10
    # mixed-term scheme: defect shrinks under refinement
    dom = dl.make_domain(dl.su2_chart(), dl.Box((0.4, 0.0, -0.4), (1.2, 2 * math.pi, 0.4)))
    defects = []
    for h in (0.2, 0.1):
        mesh = assemble_heisenberg_cylindrical(dom, h, rho_min=0.0)
        prop = dense_propagator(mesh, 0.002) if mesh.size <= 2000 else None
        if prop is None:
            mesh_small = mesh
            continue
        worst = 0.0
        for _ in range(10):
            v = np.abs(rng.standard_normal(mesh.size))
            worst = max(worst, float(-(prop @ v).min()) / v.max())
        defects.append(worst)
    if len(defects) == 2:
        assert defects[1] <= defects[0] + 1e-12


def test_mesh_serialization_roundtrip(tmp_path):
    dom = dl.make_domain(dl.heisenberg3(), dl.GaugeBall(dl.Gauge("koranyi"), 1.0))
    mesh = dl.assemble_heisenberg(dom, 1 / 12)
    path = str(tmp_path / "mesh.txt")
    save_mesh(mesh, path)
    back = load_mesh(path)
    assert back.space == mesh.space
    assert np.array_equal(back.nodes, mesh.nodes)
    assert np.array_equal(back.weights, mesh.weights)
    assert (back.matrix != mesh.matrix).nnz == 0


def test_cylindrical_consistency_order_two():
    dom = dl.make_domain(dl.su2_chart(), dl.Box((0.3, 0.0, -0.5), (1.5, 2 * math.pi, 0.5)))
    r = 0.3

    def f(p):
        return np.sin(p[:, 0]) * np.cos(2 * p[:, 1] - p[:, 2]) + p[:, 0] ** 2 * p[:, 2]

    def lf(p):
        rho, th, z = p[:, 0], p[:, 1], p[:, 2]
        c = cylindrical_coefficients(rho, r)
        s, w = np.sin(rho), np.cos(2 * th - z)
        frr = -s * w + 2 * z
        fr = np.cos(rho) * w + 2 * rho * z
        ftt = -4 * s * w
        fzz = -s * w
        ftz = 2 * s * w
        return frr + c["radial"] * fr + c["theta2"] * ftt + c["z2"] * fzz + c["thetaz"] * ftz

    errs = []
    hs = (0.12, 0.06, 0.03)
    for h in hs:
        mesh = assemble_su2_rescaled(r, dom, h, rho_min=0.0)
        got = -(mesh.matrix @ f(mesh.nodes))
        want = lf(mesh.nodes)
        rho, z = mesh.nodes[:, 0], mesh.nodes[:, 2]
        fixed = (rho > 0.55) & (rho < 1.25) & (np.abs(z) < 0.2)
        errs.append(np.abs(got - want)[fixed].max())
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert abs(slope - 2.0) <= 0.3


def test_psd_thousand_vectors():
    dom = dl.make_domain(dl.heisenberg3(), dl.GaugeBall(dl.Gauge("koranyi"), 1.0))
    mesh = dl.assemble_heisenberg(dom, 1 / 12)
    assert min_rayleigh(mesh, n=1000) > -1e-10
    cyl = assemble_su2_rescaled(0.4, dl.make_domain(dl.su2_chart(), ANNULUS), 0.12, rho_min=0.0)
    assert min_rayleigh(cyl, n=1000) > -1e-10
