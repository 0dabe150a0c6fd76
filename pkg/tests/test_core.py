import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dirichletlab as dl
from dirichletlab.core import (
    heis_dilate,
    heis_inv,
    heis_mul,
    quat_conj,
    quat_mul,
    su2_from_chart,
    su2_to_chart,
)


def test_space_validation():
    with pytest.raises(ValueError):
        dl.SpaceModel("euclidean", 0)
    with pytest.raises(ValueError):
        dl.SpaceModel("euclidean", 2, "banana")
    assert dl.euclidean(2).scale_factor == 1.0
    assert dl.euclidean(2, "probabilist").scale_factor == 0.5


@settings(max_examples=30, deadline=None)
@given(
    st.tuples(*[st.floats(-3, 3) for _ in range(3)]),
    st.sampled_from([0.25, 0.5, 2.0, 4.0]),
)
def test_gauge_homogeneity(p, r):
    for kind in ("euclidean_norm", "koranyi", "chart_radius"):
        g = dl.Gauge(kind)
        pt = np.array(p)
        if kind == "chart_radius":
            pt = np.abs(pt)  # rho >= 0
        v = g.value(pt[None, :])[0]
        vr = g.value(g.dilate(r, pt)[None, :])[0]
        assert vr == pytest.approx(r * v, rel=1e-12, abs=1e-12)


def test_gauge_scale_divides():
    g = dl.Gauge("euclidean_norm", scale=2.0)
    assert g.value(np.array([[3.0, 4.0]]))[0] == pytest.approx(2.5)


def test_heisenberg_group_ops():
    p = np.array([0.3, -0.7, 0.2])
    q = np.array([1.1, 0.4, -0.6])
    e = heis_mul(p, heis_inv(p))
    assert np.allclose(e, 0.0, atol=1e-15)
    # associativity on a sample
    r = np.array([-0.2, 0.9, 0.05])
    assert np.allclose(heis_mul(heis_mul(p, q), r), heis_mul(p, heis_mul(q, r)))
    # dilation is an automorphism
    lhs = heis_dilate(2.0, heis_mul(p, q))
    rhs = heis_mul(heis_dilate(2.0, p), heis_dilate(2.0, q))
    assert np.allclose(lhs, rhs)


def test_quaternions_realize_matrix_algebra():
    # X = -(i/2) sigma_x etc.: X^2 = -I/4, XY = Z/2, [X, Y] = Z, all to 1e-14
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    X, Y, Z = -0.5j * sx, -0.5j * sy, -0.5j * sz
    eye = np.eye(2)
    assert np.allclose(X @ X, -eye / 4, atol=1e-14)
    assert np.allclose(X @ Y, Z / 2, atol=1e-14)
    assert np.allclose(Y @ Z, X / 2, atol=1e-14)
    assert np.allclose(X @ Y - Y @ X, Z, atol=1e-14)
    assert np.allclose(Y @ Z - Z @ Y, X, atol=1e-14)
    assert np.allclose(Z @ X - X @ Z, Y, atol=1e-14)

    def as_matrix(q):
        a, b, c, d = q
        return a * eye + b * (2 * X) + c * (2 * Y) + d * (2 * Z)

    rng = np.random.default_rng(0)
    for _ in range(10):
        q1 = rng.standard_normal(4)
        q2 = rng.standard_normal(4)
        lhs = as_matrix(quat_mul(q1, q2))
        rhs = as_matrix(q1) @ as_matrix(q2)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_su2_chart_roundtrip():
    rng = np.random.default_rng(1)
    pts = np.stack(
        [rng.uniform(0.05, 1.2, 40), rng.uniform(0, 2 * math.pi, 40),
         rng.uniform(-0.8, 0.8, 40)], axis=-1
    )
    back = su2_to_chart(su2_from_chart(pts))
    assert np.allclose(back[:, 0], pts[:, 0], atol=1e-12)
    assert np.allclose(back[:, 2], pts[:, 2], atol=1e-12)
    dtheta = (back[:, 1] - pts[:, 1] + math.pi) % (2 * math.pi) - math.pi
    assert np.allclose(dtheta, 0.0, atol=1e-12)
    norms = (su2_from_chart(pts) ** 2).sum(axis=-1)
    assert np.allclose(norms, 1.0, atol=1e-14)


def test_make_domain_interval():
    dom = dl.make_domain(dl.euclidean(1), dl.Interval(0, 1))
    assert dom.bounding_box == ((0.0, 1.0),)
    assert dom.connected


def test_koranyi_ball_bbox_contains_ball():
    dom = dl.make_domain(dl.heisenberg3(), dl.GaugeBall(dl.Gauge("koranyi"), 1.0))
    lo = np.array([b[0] for b in dom.bounding_box])
    hi = np.array([b[1] for b in dom.bounding_box])
    # |x|,|y| <= 1 and |z| <= 1/4 inside the unit gauge ball
    assert np.all(lo >= np.array([-1, -1, -1]) - 1e-12)
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1.5, 1.5, size=(20000, 3))
    inside = dom.contains(pts)
    assert inside.any()
    assert np.all((pts[inside] >= lo - 1e-12) & (pts[inside] <= hi + 1e-12))


def test_difference_disconnected_flag():
    outer = dl.Box((0.0, 0.0), (3.0, 1.0))
    cut = dl.Box((1.0, -1.0), (2.0, 2.0))
    dom = dl.make_domain(dl.euclidean(2), dl.difference(outer, cut, connected=False))
    assert not dom.connected
    assert bool(dom.contains(np.array([[0.5, 0.5]]))[0])
    assert not bool(dom.contains(np.array([[1.5, 0.5]]))[0])


def test_empty_interior_rejected():
    with pytest.raises(dl.DomainError):
        dl.make_domain(
            dl.euclidean(2),
            dl.difference(dl.Box((0, 0), (1, 1)), dl.Box((-1, -1), (2, 2))),
        )


def test_union_shape():
    u = dl.union(dl.Interval(0, 1), dl.Interval(2, 3))
    dom = dl.make_domain(dl.euclidean(1), u)
    assert not dom.connected
    assert bool(dom.contains(np.array([[2.5]]))[0])


@settings(max_examples=20, deadline=None)
@given(st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(-0.5, 0.5)))
def test_membership_deterministic(p):
    dom = dl.make_domain(dl.heisenberg3(), dl.GaugeBall(dl.Gauge("koranyi"), 1.0))
    pt = np.array([p])
    assert dom.contains(pt)[0] == dom.contains(pt)[0]


def test_chart_distance_euclidean():
    assert dl.chart_distance(dl.euclidean(2), (0, 0), (3, 4)) == pytest.approx(5.0)
    assert dl.chart_distance(dl.euclidean(2), (1, 1), (1, 1)) == 0.0
    # symmetry and triangle inequality on random triples
    rng = np.random.default_rng(3)
    for _ in range(30):
        a, b, c = rng.standard_normal((3, 2))
        dab = dl.chart_distance(dl.euclidean(2), a, b)
        dba = dl.chart_distance(dl.euclidean(2), b, a)
        assert dab == pytest.approx(dba)
        assert dab <= dl.chart_distance(dl.euclidean(2), a, c) + dl.chart_distance(
            dl.euclidean(2), c, b
        ) + 1e-12


def test_chart_distance_group_cases():
    space = dl.heisenberg3()
    z = 0.09
    got = dl.chart_distance(space, (0, 0, 0), (0, 0, z))
    assert got == pytest.approx((16 * z * z) ** 0.25)
    assert got == pytest.approx(2 * math.sqrt(abs(z)))
    assert dl.chart_distance(space, (0.3, -0.2, 0.1), (0.3, -0.2, 0.1)) == 0.0
    su2 = dl.su2_chart()
    assert dl.chart_distance(su2, (0.2, 0.1, 0.05), (0.2, 0.1, 0.05)) == pytest.approx(0.0, abs=1e-9)
    assert dl.chart_distance(su2, (0.0, 0.0, 0.0), (0.3, 1.0, 0.0)) > 0


def test_polygon_membership():
    tri = dl.Polygon(((0, 0), (1, 0), (0, 1)))
    pts = np.array([[0.2, 0.2], [0.9, 0.9], [0.49, 0.49]])
    assert list(tri.contains(pts)) == [True, False, True]


def test_gasket_cells_shape():
    s = dl.GasketCells(((0,),))
    # corner-0 cell occupies the lower-left quarter triangle
    assert bool(s.contains(np.array([[0.2, 0.05]]))[0])
    assert not bool(s.contains(np.array([[0.9, 0.05]]))[0])
    dom = dl.make_domain(dl.gasket(3), s)
    assert dom.connected
    with pytest.raises(dl.DomainError):
        dl.make_domain(dl.gasket(3), dl.GasketCells(((7,),)))
