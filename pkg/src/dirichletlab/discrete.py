"""Symmetric sparse approximations of Dirichlet-restricted generators.

Every assembler returns an :class:`OperatorMesh` whose matrix M approximates
the *negative* generator with exterior-zero (Dirichlet) condition: grid nodes
failing the domain membership test are cemetery nodes and all couplings to
them are dropped, keeping the diagonal flux.  M is self-adjoint in the
weighted inner product <u, v>_w = sum w_i u_i v_i and positive semidefinite
by construction (all schemes are assembled from sums of squared first-order
differences, or conservative fluxes).

A node is interior iff membership holds at the node center; there are no cut
cells, so the boundary error is first order and is measured by refinement
studies, never assumed.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .core import Domain, GasketCells, SpaceModel


class MeshError(ValueError):
    """Raised when a mesh cannot be assembled."""


@dataclass(frozen=True)
class OperatorMesh:
    """Sparse approximation of -A_U plus node coordinates and measure."""

    nodes: np.ndarray  # (m, dim) chart coordinates
    weights: np.ndarray  # (m,) positive measure masses
    matrix: sp.csr_matrix  # operator form, self-adjoint w.r.t. weights
    h: float
    space: SpaceModel
    domain: Domain | None
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def volume(self) -> float:
        return float(self.weights.sum())

    def form_matrix(self) -> sp.csr_matrix:
        """Quadratic-form matrix K = W M (symmetric in the plain sense)."""
        k = sp.diags(self.weights) @ self.matrix
        return ((k + k.T) * 0.5).tocsr()

    def sym_matrix(self) -> sp.csr_matrix:
        """Plainly symmetric similarity W^(1/2) M W^(-1/2)."""
        s = np.sqrt(self.weights)
        d = sp.diags(1.0 / s)
        return (d @ self.form_matrix() @ d).tocsr()


def nearest_node(mesh: OperatorMesh, point) -> int:
    point = np.asarray(point, dtype=float)
    d2 = np.sum((mesh.nodes - point) ** 2, axis=1)
    return int(np.argmin(d2))


# ---------------------------------------------------------------------------
# grid scaffolding


def _axis_coords(lo: float, hi: float, h: float) -> np.ndarray:
    """Interior lattice at spacing h, centered so the margins match (exactly
    the classical lo + h, ..., hi - h lattice when (hi - lo)/h is integral);
    centering keeps reflection symmetries of symmetric domains exact."""
    n = int(math.floor((hi - lo) / h - 1e-9))
    offset = 0.5 * ((hi - lo) - (n + 1) * h)
    return lo + offset + h * np.arange(1, n + 1)


def _grid(domain: Domain, spacings) -> tuple[list[np.ndarray], np.ndarray, np.ndarray]:
    """Node coordinates per axis, boolean mask, and id array (-1 outside)."""
    axes = [
        _axis_coords(lo, hi, ha)
        for (lo, hi), ha in zip(domain.bounding_box, spacings)
    ]
    if any(len(a) == 0 for a in axes):
        raise MeshError("mesh spacing too coarse for the bounding box")
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    mask = domain.contains(pts).reshape(mesh[0].shape)
    ids = -np.ones(mask.shape, dtype=np.int64)
    ids[mask] = np.arange(int(mask.sum()))
    return axes, mask, ids


def _shift_pairs(ids: np.ndarray, axis: int):
    """(row, col) node ids for neighbor pairs along an axis (u, u+1)."""
    sl_lo = [slice(None)] * ids.ndim
    sl_hi = [slice(None)] * ids.ndim
    sl_lo[axis] = slice(None, -1)
    sl_hi[axis] = slice(1, None)
    a = ids[tuple(sl_lo)].ravel()
    b = ids[tuple(sl_hi)].ravel()
    keep = (a >= 0) & (b >= 0)
    return a[keep], b[keep]


# ---------------------------------------------------------------------------
# euclidean


def assemble_euclidean(domain: Domain, h, scale: str | None = None) -> OperatorMesh:
    """Standard 2n+1 point second-difference scheme on a masked grid.

    ``h`` may be a scalar or a per-axis tuple (used by dilation checks on
    anisotropically scaled boxes).  Weights are the cell volumes.
    """
    space = domain.space
    if space.kind != "euclidean":
        raise MeshError("assemble_euclidean needs a euclidean domain")
    n = space.n
    if n > 3:
        raise MeshError("dimensions above 3 are out of scope")
    if scale is None:
        scale = space.generator_scale
    spacings = (h,) * n if np.isscalar(h) else tuple(h)
    axes, mask, ids = _grid(domain, spacings)
    m = int(mask.sum())
    if m == 0:
        raise MeshError("empty interior: no grid node passes membership")
    if any(len(a) < 3 for a in axes):
        raise MeshError("need at least 3 interior nodes per axis")
    pts = np.stack(
        [g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1
    )[mask.ravel()]

    factor = 1.0 if scale == "dirichlet_form" else 0.5
    diag = np.full(m, factor * sum(2.0 / ha**2 for ha in spacings))
    rows, cols, vals = [], [], []
    for ax, ha in enumerate(spacings):
        a, b = _shift_pairs(ids, ax)
        off = -factor / ha**2
        rows += [a, b]
        cols += [b, a]
        vals += [np.full(a.size, off), np.full(a.size, off)]
    rows.append(np.arange(m))
    cols.append(np.arange(m))
    vals.append(diag)
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m, m),
    )
    weights = np.full(m, float(np.prod(spacings)))
    grid_index = np.argwhere(mask)
    return OperatorMesh(
        nodes=pts,
        weights=weights,
        matrix=mat,
        h=float(spacings[0]),
        space=space,
        domain=domain,
        meta={
            "grid_shape": mask.shape,
            "grid_index": grid_index,
            "spacings": spacings,
            "scheme": "euclidean_second_difference",
        },
    )


# ---------------------------------------------------------------------------
# gasket


def _gasket_cells(level: int):
    """Smallest cells of the level-m graph as integer corner triples, with
    their addresses.  Integer coordinates live on the lattice spanned by
    (1,0) and (1/2, sqrt(3)/2) scaled by 2^-m."""
    L = 1 << level
    cells = [(((0, 0), (L, 0), (0, L)), ())]
    for _ in range(level):
        nxt = []
        for (a, b, c), addr in cells:
            mab = ((a[0] + b[0]) // 2, (a[1] + b[1]) // 2)
            mbc = ((b[0] + c[0]) // 2, (b[1] + c[1]) // 2)
            mca = ((c[0] + a[0]) // 2, (c[1] + a[1]) // 2)
            nxt.append(((a, mab, mca), addr + (0,)))
            nxt.append(((mab, b, mbc), addr + (1,)))
            nxt.append(((mca, mbc, c), addr + (2,)))
        cells = nxt
    return cells, L


def gasket_vertex_coords(ij, L: int) -> np.ndarray:
    """Integer lattice pair -> planar embedding of the unit gasket."""
    ij = np.asarray(ij, dtype=float)
    x = (ij[..., 0] + 0.5 * ij[..., 1]) / L
    y = (math.sqrt(3.0) / 2.0) * ij[..., 1] / L
    return np.stack([x, y], axis=-1)


def assemble_gasket(level: int, domain: Domain | None = None) -> OperatorMesh:
    """Level-m gasket graph Laplacian with Dirichlet outer corners.

    Energy renormalization 5^m; cell-point measure: each of the 3^m cells
    carries mass 3^-m split equally over its three corners, so interior
    vertices (two incident cells) weigh (2/3) 3^-m and the total mass is 1.
    The matrix is 5^m times the combinatorial Laplacian restricted to
    interior vertices (degree 4 each).
    """
    if not 1 <= level <= 8:
        raise MeshError("gasket level must be in 1..8")
    cells, L = _gasket_cells(level)
    prefixes = None
    if domain is not None:
        if not isinstance(domain.shape, GasketCells):
            raise MeshError("gasket meshes need a GasketCells domain")
        prefixes = tuple(tuple(p) for p in domain.shape.prefixes)
        cells = [
            (tri, addr)
            for tri, addr in cells
            if any(addr[: len(p)] == p for p in prefixes)
        ]
        if not cells:
            raise MeshError("no gasket cell matches the requested prefixes")

    incident: dict[tuple[int, int], int] = {}
    edges = set()
    for (a, b, c), _addr in cells:
        for v in (a, b, c):
            incident[v] = incident.get(v, 0) + 1
        edges.update({frozenset((a, b)), frozenset((b, c)), frozenset((c, a))})

    corners = {(0, 0), (L, 0), (0, L)}
    # interior: both incident cells kept and not an outer corner
    interior = [v for v, cnt in incident.items() if cnt == 2 and v not in corners]
    interior.sort()
    index = {v: i for i, v in enumerate(interior)}
    m = len(interior)
    if m == 0:
        raise MeshError("gasket mesh has no interior vertex")

    space = domain.space if domain is not None else SpaceModel("gasket", level)
    energy = float(5**level) * space.scale_factor

    rows, cols, vals = [], [], []
    deg = np.zeros(m)
    for e in edges:
        u, v = tuple(e)
        iu, iv = index.get(u), index.get(v)
        if iu is not None:
            deg[iu] += 1.0
        if iv is not None:
            deg[iv] += 1.0
        if iu is not None and iv is not None:
            rows += [iu, iv]
            cols += [iv, iu]
            vals += [-energy, -energy]
    rows.append(np.arange(m))
    cols.append(np.arange(m))
    vals.append(energy * deg)
    mat = sp.csr_matrix(
        (
            np.concatenate([np.atleast_1d(np.asarray(v, dtype=float)) for v in vals]),
            (
                np.concatenate([np.atleast_1d(np.asarray(r)) for r in rows]),
                np.concatenate([np.atleast_1d(np.asarray(c)) for c in cols]),
            ),
        ),
        shape=(m, m),
    )
    weights = np.full(m, (2.0 / 3.0) * 3.0 ** (-level))
    nodes = gasket_vertex_coords(np.asarray(interior), L)
    return OperatorMesh(
        nodes=nodes,
        weights=weights,
        matrix=mat,
        h=1.0 / L,
        space=space,
        domain=domain,
        meta={"level": level, "scheme": "gasket_graph", "lattice": np.asarray(interior)},
    )


# ---------------------------------------------------------------------------
# Heisenberg group, Cartesian chart

# Fields X = d/dx - (y/2) d/dz and Y = d/dy + (x/2) d/dz.  The scheme squares
# edge-based field differences (forward difference along the field's axis
# plus the edge-averaged centered z-difference scaled by the drift
# coefficient), then swaps the resulting wide z-stencil for the narrow
# three-point one.  The swap adds a per-line nonnegative form, so the matrix
# stays PSD while the consistency order stays 2.


def _neighbor_ids(ids, it, axis, delta):
    """Node ids of the neighbors of ``it`` shifted by delta along axis
    (-1 where off-grid or masked out)."""
    nb = it.copy()
    nb[:, axis] += delta
    ok = (nb[:, axis] >= 0) & (nb[:, axis] < ids.shape[axis])
    out = np.full(len(it), -1, dtype=np.int64)
    out[ok] = ids[tuple(nb[ok].T)]
    return out


def _edge_rows_field(ids, axis, coef, hz_axis, spacings, rows, cols, vals,
                     rows_b, cols_b, vals_b, next_row):
    """Edge rows of one field (forward difference along ``axis`` plus the
    edge-averaged centered difference along ``hz_axis`` scaled by ``coef``).
    The drift entries are mirrored into the ``_b`` triplets so the caller can
    subtract their wide-stencil square.  Returns the running row counter."""
    ha = spacings[axis]
    hz = spacings[hz_axis]
    it = np.argwhere(ids >= 0)
    my_id = ids[tuple(it.T)]

    hi_id = _neighbor_ids(ids, it, axis, 1)
    both = hi_id >= 0
    u_in, uid, vid = it[both], my_id[both], hi_id[both]
    v_in = u_in.copy()
    v_in[:, axis] += 1
    b = coef[uid]
    n_edges = uid.size
    er = next_row + np.arange(n_edges)
    rows += [er, er]
    cols += [uid, vid]
    vals += [np.full(n_edges, -1.0 / ha), np.full(n_edges, 1.0 / ha)]
    for endpoint in (u_in, v_in):
        for dz, sgn in ((1, 1.0), (-1, -1.0)):
            nid = _neighbor_ids(ids, endpoint, hz_axis, dz)
            keep = nid >= 0
            coefv = sgn * b[keep] / (4.0 * hz)
            for r_, c_, v_ in ((rows, cols, vals), (rows_b, cols_b, vals_b)):
                r_.append(er[keep])
                c_.append(nid[keep])
                v_.append(coefv)
    next_row += n_edges

    # boundary edges (one endpoint exterior): plain Dirichlet flux, no drift
    for delta in (1, -1):
        nid = _neighbor_ids(ids, it, axis, delta)
        wid = my_id[nid < 0]
        if wid.size:
            er = next_row + np.arange(wid.size)
            rows.append(er)
            cols.append(wid)
            vals.append(np.full(wid.size, 1.0 / ha))
            next_row += wid.size
    return next_row


def assemble_heisenberg(domain: Domain, h) -> OperatorMesh:
    """Sub-Laplacian -(X^2 + Y^2) on a masked Cartesian grid; weights h^3."""
    space = domain.space
    if space.kind != "heisenberg3":
        raise MeshError("assemble_heisenberg needs a heisenberg3 domain")
    spacings = (h,) * 3 if np.isscalar(h) else tuple(h)
    axes, mask, ids = _grid(domain, spacings)
    m = int(mask.sum())
    if m == 0:
        raise MeshError("empty interior: no grid node passes membership")
    if any(len(a) < 5 for a in axes):
        raise MeshError("need at least 5 nodes per axis")
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)[mask.ravel()]

    bcoef = -pts[:, 1] / 2.0  # X drift in z
    ccoef = pts[:, 0] / 2.0  # Y drift in z
    q = bcoef**2 + ccoef**2

    rows: list = []
    cols: list = []
    vals: list = []
    rows_b: list = []
    cols_b: list = []
    vals_b: list = []
    nr = 0
    nr = _edge_rows_field(ids, 0, bcoef, 2, spacings, rows, cols, vals,
                          rows_b, cols_b, vals_b, nr)
    nr_bx_end = nr
    nr = _edge_rows_field(ids, 1, ccoef, 2, spacings, rows, cols, vals,
                          rows_b, cols_b, vals_b, nr)

    def build(rws, cls, vls, nrows):
        return sp.csr_matrix(
            (np.concatenate(vls), (np.concatenate(rws), np.concatenate(cls))),
            shape=(nrows, m),
        )

    E = build(rows, cols, vals, nr)
    Eb = build(rows_b, cols_b, vals_b, nr)

    # narrow z form with coefficient q (constant along z-lines)
    hz = spacings[2]
    a, b2 = _shift_pairs(ids, 2)
    qe = np.sqrt(q[a])
    zr, zc, zv = [], [], []
    n_ze = a.size
    er = np.arange(n_ze)
    zr += [er, er]
    zc += [a, b2]
    zv += [-qe / hz, qe / hz]
    nz = n_ze
    # z boundary edges
    it = np.argwhere(ids >= 0)
    for d in (-1, 1):
        nb = it.copy()
        nb[:, 2] += d
        ok = (nb[:, 2] >= 0) & (nb[:, 2] < ids.shape[2])
        out = np.ones(len(it), dtype=bool)
        out[ok] = ids[tuple(nb[ok].T)] < 0
        w_here = it[out]
        wid = ids[tuple(w_here.T)]
        if wid.size:
            er = nz + np.arange(wid.size)
            zr.append(er)
            zc.append(wid)
            zv.append(np.sqrt(q[wid]) / hz)
            nz += wid.size
    Ez = build(zr, zc, zv, nz)

    factor = space.scale_factor
    K = (E.T @ E) - (Eb.T @ Eb) + (Ez.T @ Ez)
    mat = (factor * ((K + K.T) * 0.5)).tocsr()
    weights = np.full(m, float(np.prod(spacings)))
    return OperatorMesh(
        nodes=pts,
        weights=weights,
        matrix=mat,
        h=float(spacings[0]),
        space=space,
        domain=domain,
        meta={
            "grid_shape": mask.shape,
            "grid_index": np.argwhere(mask),
            "spacings": spacings,
            "scheme": "heisenberg_field_squares",
        },
    )


def heisenberg_apply_fields(domain: Domain, h, f_values, pts):
    """Centered-difference field applications (Xf, Yf) at given grid points;
    used by consistency tests.  ``f_values`` is a callable on (m,3) arrays."""
    pts = np.atleast_2d(pts)
    ex = np.zeros(3)
    ex[0] = h
    ey = np.zeros(3)
    ey[1] = h
    ez = np.zeros(3)
    ez[2] = h
    dx = (f_values(pts + ex) - f_values(pts - ex)) / (2 * h)
    dy = (f_values(pts + ey) - f_values(pts - ey)) / (2 * h)
    dz = (f_values(pts + ez) - f_values(pts - ez)) / (2 * h)
    xf = dx - pts[:, 1] / 2.0 * dz
    yf = dy + pts[:, 0] / 2.0 * dz
    return xf, yf


# ---------------------------------------------------------------------------
# cylindrical chart operators (rescaled compact-group sub-Laplacian and its
# flat-group limit)


def _cyl_coeffs(rho: np.ndarray, r: float):
    """(a_rr weight w, a_theta, a_z, a_cross) at the given radii."""
    if r == 0.0:
        w = rho
        ath = 1.0 / rho**2
        az = rho**2
        ax = np.full_like(rho, 2.0)
    else:
        rr = r * rho
        w = np.sin(2.0 * rr) / (2.0 * r)
        t = np.tan(rr)
        c = 1.0 / t
        ath = 2.0 * r**2 + (r * c) ** 2 + (r * t) ** 2
        az = (t / r) ** 2
        ax = 2.0 * (1.0 + t * t)
    return w, ath, az, ax


def cylindrical_coefficients(rho, r: float) -> dict:
    """Printed coefficients of the rescaled operator at contraction scale r
    (r = 0 gives the flat-group limit): first-order radial, theta-theta,
    z-z, theta-z, and the volume density."""
    rho = np.asarray(rho, dtype=float)
    if r == 0.0:
        first = 1.0 / rho
    else:
        first = 2.0 * r / np.tan(2.0 * r * rho)
    w, ath, az, ax = _cyl_coeffs(rho, r)
    return {"radial": first, "theta2": ath, "z2": az, "thetaz": ax, "density": w}


def _assemble_cylindrical(
    domain: Domain, h: float, r: float, rho_min: float
) -> OperatorMesh:
    (rho_lo, rho_hi), (th_lo, th_hi), (z_lo, z_hi) = domain.bounding_box
    if rho_lo < 0:
        raise MeshError("radial coordinate must be nonnegative")
    full_theta = (th_hi - th_lo) >= 2.0 * math.pi - 1e-9
    if not full_theta:
        raise MeshError("cylindrical meshes require the full angular range")
    # half-offset radial grid: natural (zero-flux-weight) treatment at rho=0
    n_rho = int(math.floor((rho_hi - rho_lo) / h - 1e-9))
    rho = rho_lo + h * (np.arange(n_rho) + 0.5)
    n_th = max(8, 2 * int(math.ceil(math.pi / h)))
    if n_th % 2:
        n_th += 1
    h_th = 2.0 * math.pi / n_th
    theta = th_lo + h_th * np.arange(n_th)
    zc = _axis_coords(z_lo, z_hi, h)
    if len(zc) < 3:
        raise MeshError("need at least 3 interior z nodes")

    R, T, Z = np.meshgrid(rho, theta, zc, indexing="ij")
    pts = np.stack([R.ravel(), T.ravel(), Z.ravel()], axis=-1)
    # the angular coordinate is periodic and the domain must be a full body
    # of revolution, so membership is evaluated at a fixed interior angle
    # (otherwise the first angular slice would fall on the box boundary)
    probe = pts.copy()
    probe[:, 1] = 0.5 * (th_lo + th_hi)
    mask = domain.contains(probe).reshape(R.shape)
    if rho_min > 0:
        mask &= R >= rho_min
    ids = -np.ones(mask.shape, dtype=np.int64)
    mm = int(mask.sum())
    if mm == 0:
        raise MeshError("empty interior: no grid node passes membership")
    ids[mask] = np.arange(mm)
    pts = pts[mask.ravel()]

    if r > 0.0:
        if r * pts[:, 0].max() >= math.pi / 2 - 1e-9:
            raise MeshError("r * rho must stay below pi/2 on the domain")
    w_node, ath, az, ax = _cyl_coeffs(pts[:, 0], r)
    # radial fluxes at cell faces
    rho_faces_lo = pts[:, 0] - h / 2
    rho_faces_hi = pts[:, 0] + h / 2
    if r == 0.0:
        w_lo = np.maximum(rho_faces_lo, 0.0)
        w_hi = rho_faces_hi
    else:
        w_lo = np.sin(2.0 * r * np.maximum(rho_faces_lo, 0.0)) / (2.0 * r)
        w_hi = np.sin(2.0 * r * rho_faces_hi) / (2.0 * r)

    it = np.argwhere(mask)
    rows, cols, vals = [], [], []
    diag = np.zeros(mm)
    node_of = ids

    def add(rws, cls, v):
        rows.append(rws)
        cols.append(cls)
        vals.append(v)

    # radial conservative part: (1/w) [w_hi (f - f_up) + w_lo (f - f_dn)] / h^2
    diag += (w_hi + w_lo) / (w_node * h * h)
    for d, wface in ((1, w_hi), (-1, w_lo)):
        nb = it.copy()
        nb[:, 0] += d
        ok = (nb[:, 0] >= 0) & (nb[:, 0] < mask.shape[0])
        nid = np.full(mm, -1, dtype=np.int64)
        nid[ok] = node_of[tuple(nb[ok].T)]
        keep = nid >= 0
        me = node_of[tuple(it[keep].T)]
        add(me, nid[keep], -wface[me] / (w_node[me] * h * h))

    # angular part (periodic)
    diag += 2.0 * ath / h_th**2
    for d in (1, -1):
        nb = it.copy()
        nb[:, 1] = (nb[:, 1] + d) % n_th
        nid = node_of[tuple(nb.T)]
        keep = nid >= 0
        me = node_of[tuple(it[keep].T)]
        add(me, nid[keep], -ath[me] / h_th**2)

    # vertical part
    diag += 2.0 * az / h**2
    for d in (1, -1):
        nb = it.copy()
        nb[:, 2] += d
        ok = (nb[:, 2] >= 0) & (nb[:, 2] < mask.shape[2])
        nid = np.full(mm, -1, dtype=np.int64)
        nid[ok] = node_of[tuple(nb[ok].T)]
        keep = nid >= 0
        me = node_of[tuple(it[keep].T)]
        add(me, nid[keep], -az[me] / h**2)

    # mixed theta-z term, centered in both
    for dth, dz_, sgn in ((1, 1, -1.0), (1, -1, 1.0), (-1, 1, 1.0), (-1, -1, -1.0)):
        nb = it.copy()
        nb[:, 1] = (nb[:, 1] + dth) % n_th
        nb[:, 2] += dz_
        ok = (nb[:, 2] >= 0) & (nb[:, 2] < mask.shape[2])
        nid = np.full(mm, -1, dtype=np.int64)
        nid[ok] = node_of[tuple(nb[ok].T)]
        keep = nid >= 0
        me = node_of[tuple(it[keep].T)]
        add(me, nid[keep], sgn * ax[me] / (4.0 * h_th * h))

    add(np.arange(mm), np.arange(mm), diag)
    factor = domain.space.scale_factor
    mat = sp.csr_matrix(
        (
            factor * np.concatenate(vals),
            (np.concatenate(rows), np.concatenate(cols)),
        ),
        shape=(mm, mm),
    )
    weights = w_node * h * h_th * h
    return OperatorMesh(
        nodes=pts,
        weights=weights,
        matrix=mat,
        h=h,
        space=domain.space,
        domain=domain,
        meta={
            "grid_shape": mask.shape,
            "grid_index": it,
            "spacings": (h, h_th, h),
            "scheme": "cylindrical_divergence",
            "contraction_r": r,
            "n_theta": n_th,
        },
    )


def assemble_su2_rescaled(
    r: float, domain: Domain, h: float, rho_min: float | None = None
) -> OperatorMesh:
    """Rescaled compact-group operator at contraction scale r in cylindrical
    coordinates.  The r^2 rescaling is baked into the coefficients, so the
    assembled eigenvalues are directly comparable with the flat-group limit.
    The coordinate singularity at rho = 0 is excised (default radius 2h)."""
    if not 0.0 < r <= 1.0:
        raise MeshError("contraction scale must satisfy 0 < r <= 1")
    if domain.space.kind != "su2_chart":
        raise MeshError("assemble_su2_rescaled needs an su2_chart domain")
    return _assemble_cylindrical(domain, h, r, 2.0 * h if rho_min is None else rho_min)


def assemble_heisenberg_cylindrical(
    domain: Domain, h: float, rho_min: float = 0.0
) -> OperatorMesh:
    """Flat-group sub-Laplacian in cylindrical coordinates (the r -> 0 limit
    of the rescaled compact-group operator), on the same grid layout."""
    if domain.space.kind not in ("heisenberg3", "su2_chart"):
        raise MeshError("needs a cylindrical-chart domain")
    return _assemble_cylindrical(domain, h, 0.0, rho_min)


# ---------------------------------------------------------------------------
# structure reports and serialization


def mmatrix_report(mesh: OperatorMesh) -> dict:
    """Sign-structure report: positive off-diagonal entries break the
    discrete maximum principle (expected for the mixed-derivative terms of
    the group schemes; the euclidean and gasket schemes are M-matrices)."""
    coo = mesh.matrix.tocoo()
    off = coo.row != coo.col
    pos = off & (coo.data > 1e-14)
    dmax = float(np.abs(mesh.matrix.diagonal()).max())
    worst = float(coo.data[pos].max()) if pos.any() else 0.0
    return {
        "n_positive_offdiag": int(pos.sum()),
        "max_positive_offdiag": worst,
        "relative_to_diagonal": worst / dmax if dmax else 0.0,
        "is_mmatrix": not bool(pos.any()),
    }


_MESH_MAGIC = "dirichletlab-mesh-v1"


def save_mesh(mesh: OperatorMesh, path: str) -> None:
    """Plain-text triplet format: header, then nnz rows ``i j value``, then
    node coordinates and weights.  Deterministic (CSR order, repr floats)."""
    coo = mesh.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# {_MESH_MAGIC}\n")
        f.write(
            f"space {mesh.space.kind} {mesh.space.n} {mesh.space.generator_scale}\n"
        )
        f.write(f"h {float(mesh.h)!r} nodes {mesh.size} nnz {coo.nnz}\n")
        for k in order:
            f.write(f"{coo.row[k]} {coo.col[k]} {float(coo.data[k])!r}\n")
        f.write("nodes\n")
        for row in mesh.nodes:
            f.write(" ".join(repr(float(v)) for v in row) + "\n")
        f.write("weights\n")
        for w in mesh.weights:
            f.write(f"{float(w)!r}\n")


def load_mesh(path: str) -> OperatorMesh:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
        if header != f"# {_MESH_MAGIC}":
            raise MeshError(f"not a mesh file: {path}")
        _, kind, n, scale = f.readline().split()
        parts = f.readline().split()
        h = float(parts[1])
        m = int(parts[3])
        nnz = int(parts[5])
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        data = np.empty(nnz)
        for k in range(nnz):
            i, j, v = f.readline().split()
            rows[k], cols[k], data[k] = int(i), int(j), float(v)
        assert f.readline().strip() == "nodes"
        nodes = np.array(
            [[float(v) for v in f.readline().split()] for _ in range(m)]
        )
        assert f.readline().strip() == "weights"
        weights = np.array([float(f.readline()) for _ in range(m)])
    mat = sp.csr_matrix((data, (rows, cols)), shape=(m, m))
    return OperatorMesh(
        nodes=nodes,
        weights=weights,
        matrix=mat,
        h=h,
        space=SpaceModel(kind, int(n), scale),
        domain=None,
        meta={"loaded_from": path},
    )
