"""Seeded Monte Carlo for killed diffusions on R^n, the flat group chart,
and the compact matrix group.

Estimator contract: results are a deterministic function of (seed, tag,
stream layout) only.  Work is split into fixed-size Philox streams
(:mod:`dirichletlab.rng`); partial results are reduced in stream order, so
counts are bit-identical across reruns and worker counts.

Process conventions
-------------------
* ``euclidean_bm``: increments Normal(0, sigma^2 h) per axis with sigma^2 = 2
  under the form normalization and 1 under the probabilist one.
* ``heisenberg_bm``: probabilist normalization of the sub-Laplacian; the
  vertical coordinate uses the left-point area rule with sub-stepping.
* ``su2_sde``: geometric Euler step G <- G exp(sqrt(h)(xi1 X + xi2 Y)); the
  step is a closed-form unit quaternion, so the group constraints hold to
  rounding accuracy.  Generator: half the sub-Laplacian (probabilist).

The optional Brownian-bridge correction (euclidean only) kills a path within
a step with the half-space non-crossing probability exp(-2 d0 d1 / sigma^2 h)
per boundary face, which removes the O(sqrt(h)) exit-detection bias.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    DIRICHLET_FORM,
    PROBABILIST,
    Box,
    Domain,
    Gauge,
    GaugeBall,
    Interval,
    Shape,
    UnsupportedError,
    make_domain,
)
from .rng import STREAM_CHUNK, mix_key, stream_generator, stream_sizes

_COMPACT_EVERY = 16  # steps between alive-set compactions


@dataclass(frozen=True)
class ProcessSpec:
    kind: str  # euclidean_bm | heisenberg_bm | su2_sde
    dim: int = 1
    scale: str = PROBABILIST
    substeps: int = 4

    @property
    def sigma2(self) -> float:
        return 2.0 if self.scale == DIRICHLET_FORM else 1.0


def euclidean_bm(dim: int, scale: str = PROBABILIST) -> ProcessSpec:
    return ProcessSpec("euclidean_bm", dim=dim, scale=scale)


def heisenberg_bm(substeps: int = 4) -> ProcessSpec:
    return ProcessSpec("heisenberg_bm", dim=3, substeps=substeps)


def su2_sde() -> ProcessSpec:
    return ProcessSpec("su2_sde", dim=3)


@dataclass(frozen=True)
class PathSample:
    process: ProcessSpec
    start: np.ndarray
    step: float
    horizon: float
    states: np.ndarray  # (n_steps+1, dim) chart states (quaternions for su2)
    exit_time: float  # inf if the path never left the domain
    sup_gauge: np.ndarray  # running max of gauge distance from start


@dataclass(frozen=True)
class ExitBatch:
    samples: int
    survived: int
    estimate: float
    ci95: float
    seeds: dict
    params: dict
    chart_exits: int = 0

    @staticmethod
    def from_counts(n: int, survived: int, seeds: dict, params: dict, chart_exits=0):
        p = survived / n if n else 0.0
        ci = 1.96 * math.sqrt(p * (1.0 - p) / n) if n else 0.0
        return ExitBatch(n, survived, p, ci, seeds, params, chart_exits)


def _steps(t: float, h_t: float) -> tuple[int, float]:
    """Effective (n_steps, h): h_t is a target, t is hit exactly."""
    if h_t <= 0 or t < 0:
        raise ValueError("need h_t > 0 and t >= 0")
    if t == 0.0:
        return 0, h_t
    n = max(1, int(round(t / h_t)))
    return n, t / n


# ---------------------------------------------------------------------------
# single-path simulation (trajectory recording)


def simulate(
    process: ProcessSpec,
    start,
    t_max: float,
    h_t: float,
    stream: int,
    domain: Domain | None = None,
    gauge: Gauge | None = None,
) -> PathSample:
    """One recorded trajectory; exit_time is the first recorded time at which
    domain membership fails (inf sentinel if none)."""
    n_steps, h = _steps(t_max, h_t)
    rng = stream_generator(mix_key(int(stream), "simulate"), 0)
    start = np.asarray(start, dtype=float)
    if process.kind == "su2_sde":
        state = np.array([1.0, 0.0, 0.0, 0.0]) if start.size != 4 else start.copy()
        states = np.empty((n_steps + 1, 4))
    else:
        state = start.copy()
        states = np.empty((n_steps + 1, state.size))
    states[0] = state
    sup = np.zeros(n_steps + 1)
    exit_time = math.inf
    for k in range(1, n_steps + 1):
        state = _advance_one(process, state, h, rng)
        states[k] = state
        g = _gauge_from_start(process, start, state, gauge)
        sup[k] = max(sup[k - 1], g)
        if exit_time == math.inf and domain is not None:
            pt = _chart_point(process, state)
            if not bool(domain.contains(pt[None, :])[0]):
                exit_time = k * h
    return PathSample(
        process=process,
        start=start,
        step=h,
        horizon=t_max,
        states=states,
        exit_time=exit_time,
        sup_gauge=sup,
    )


def _advance_one(process: ProcessSpec, state, h, rng):
    if process.kind == "euclidean_bm":
        return state + rng.standard_normal(state.size) * math.sqrt(
            process.sigma2 * h
        )
    if process.kind == "heisenberg_bm":
        x, y, z = state
        hs = h / process.substeps
        for _ in range(process.substeps):
            dw = rng.standard_normal(2) * math.sqrt(hs)
            z += 0.5 * (x * dw[1] - y * dw[0])
            x += dw[0]
            y += dw[1]
        return np.array([x, y, z])
    # su2: closed-form exponential step
    xi = rng.standard_normal(2)
    return _su2_step(state[None, :], xi[None, :], h)[0]


def _su2_step(q: np.ndarray, xi: np.ndarray, h: float) -> np.ndarray:
    norm = np.hypot(xi[:, 0], xi[:, 1])
    phi = math.sqrt(h) * norm
    half = 0.5 * phi
    fac = np.where(norm > 1e-300, np.sin(half) / np.where(norm > 1e-300, norm, 1.0), 0.5 * math.sqrt(h))
    a2 = np.cos(half)
    b2 = fac * xi[:, 0]
    c2 = fac * xi[:, 1]
    a1, b1, c1, d1 = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty_like(q)
    # Hamilton product with a purely planar step quaternion (d2 = 0)
    out[:, 0] = a1 * a2 - b1 * b2 - c1 * c2
    out[:, 1] = a1 * b2 + b1 * a2 - d1 * c2
    out[:, 2] = a1 * c2 + c1 * a2 + d1 * b2
    out[:, 3] = d1 * a2 + b1 * c2 - c1 * b2
    return out


def su2_chart_gauge(q: np.ndarray) -> np.ndarray:
    """Fourth root of rho^4 + 4 z^2 in exact chart coordinates of q."""
    rho = np.arctan2(np.hypot(q[:, 1], q[:, 2]), np.hypot(q[:, 0], q[:, 3]))
    z = np.arctan2(q[:, 3], q[:, 0])
    return (rho**4 + 4.0 * z * z) ** 0.25


def _chart_point(process: ProcessSpec, state: np.ndarray) -> np.ndarray:
    if process.kind == "su2_sde":
        from .core import su2_to_chart

        return su2_to_chart(state)
    return state


def _gauge_from_start(process, start, state, gauge: Gauge | None) -> float:
    if gauge is None:
        return 0.0
    if process.kind == "euclidean_bm":
        return float(gauge.value((state - start)[None, :])[0])
    if process.kind == "heisenberg_bm":
        from .core import heis_inv, heis_mul

        rel = heis_mul(heis_inv(start), state)
        return float(gauge.value(rel[None, :])[0])
    return float(su2_chart_gauge(state[None, :])[0])


# ---------------------------------------------------------------------------
# stream engine
#
# Each worker consumes a spec tuple (fully picklable) and returns plain
# numbers / small arrays; reduction happens in stream order.


def _run_streams(fn, specs: list, workers: int) -> list:
    if workers <= 1 or len(specs) <= 1:
        return [fn(s) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, specs, chunksize=1))


def _euclid_stream_survival(spec) -> tuple:
    (key, si, n, start, shape, t, h_t, sigma2, bridge, collect, cell) = spec
    rng = stream_generator(key, si)
    n_steps, h = _steps(t, h_t)
    dim = len(start)
    sig = math.sqrt(sigma2 * h)
    x = np.tile(np.asarray(start, dtype=float), (n, 1))
    if n_steps == 0:
        return (n, 0.0, 0.0, 0) if collect else (n,)
    gaps = shape.boundary_gaps(x) if bridge else None
    if bridge and gaps is None:
        raise UnsupportedError("bridge correction needs a half-space boundary model")
    ksum = 0.0
    ksum2 = 0.0
    n_exit = 0
    faces = None
    if collect:
        faces = _face_positions(shape, dim)
    for step in range(n_steps):
        m = x.shape[0]
        if m == 0:
            break
        xn = x + rng.standard_normal((m, dim)) * sig
        inside = shape.contains(xn)
        if bridge:
            g1 = shape.boundary_gaps(xn)
            arg = np.clip(-2.0 * gaps * g1 / (sigma2 * h), None, 0.0)
            pcross = np.exp(arg)
            psurv = np.prod(1.0 - pcross, axis=1)
            u = rng.random(m)
            keep = inside & (u < psurv)
        else:
            keep = inside
        if collect:
            dead = ~keep
            if dead.any():
                tau = (step + 0.5) * h
                if bridge:
                    # face choice: crossed face for hard exits, else sample
                    # proportionally to the per-face crossing probabilities
                    w = np.where(g1[dead] < 0, 1e12, pcross[dead])
                else:
                    g1d = shape.boundary_gaps(xn[dead])
                    w = np.where(g1d < 0, 1.0, 0.0) + 1e-15
                r = rng.random(dead.sum())
                cw = np.cumsum(w, axis=1)
                pick = (cw / cw[:, -1:] < r[:, None]).sum(axis=1)
                pos = xn[dead].copy()
                ax = pick % dim
                val = faces[pick]
                pos[np.arange(len(pos)), ax] = val
                from .kernels import gaussian_heat_kernel

                scale = DIRICHLET_FORM if sigma2 == 2.0 else PROBABILIST
                gv = gaussian_heat_kernel(t - tau, pos, np.asarray(cell), dim, scale)
                ksum += float(gv.sum())
                ksum2 += float((gv * gv).sum())
                n_exit += int(dead.sum())
        x = xn[keep]
        if bridge:
            gaps = g1[keep]
    if collect:
        return (x.shape[0], ksum, ksum2, n_exit)
    return (x.shape[0],)


def _face_positions(shape: Shape, dim: int) -> np.ndarray:
    """Face coordinate values in boundary_gaps order (lo faces then hi)."""
    if isinstance(shape, Interval):
        return np.array([shape.a, shape.b])
    if isinstance(shape, Box):
        return np.array(list(shape.lo) + list(shape.hi))
    if isinstance(shape, GaugeBall) and shape.gauge.kind == "euclidean_norm":
        raise UnsupportedError("exit positions on curved boundaries are not recorded")
    raise UnsupportedError(f"no face model for {type(shape).__name__}")


def _heis_stream_survival(spec) -> tuple:
    (key, si, n, start, shape, t, h_t, substeps) = spec
    rng = stream_generator(key, si)
    n_steps, h = _steps(t, h_t)
    st = np.tile(np.asarray(start, dtype=float), (n, 1))
    if n_steps == 0:
        return (n,)
    sig = math.sqrt(h / substeps)
    for _step in range(n_steps):
        m = st.shape[0]
        if m == 0:
            break
        x, y, z = st[:, 0], st[:, 1], st[:, 2]
        for _ in range(substeps):
            dw = rng.standard_normal((m, 2)) * sig
            z += 0.5 * (x * dw[:, 1] - y * dw[:, 0])
            x += dw[:, 0]
            y += dw[:, 1]
        keep = shape.contains(st)
        st = st[keep]
    return (st.shape[0],)


def _su2_stream_survival(spec) -> tuple:
    (key, si, n, radius, t, h_t) = spec
    rng = stream_generator(key, si)
    n_steps, h = _steps(t, h_t)
    q = np.zeros((n, 4))
    q[:, 0] = 1.0
    chart_exits = 0
    if n_steps == 0:
        return (n, 0)
    r4 = radius**4
    for _step in range(n_steps):
        m = q.shape[0]
        if m == 0:
            break
        xi = rng.standard_normal((m, 2))
        q = _su2_step(q, xi, h)
        planar = np.hypot(q[:, 1], q[:, 2])
        axial = np.hypot(q[:, 0], q[:, 3])
        rho = np.arctan2(planar, axial)
        zz = np.arctan2(q[:, 3], q[:, 0])
        g4 = rho**4 + 4.0 * zz * zz
        valid = planar < math.sin(math.pi / 4.0)  # chart core: rho < pi/4
        keep = (g4 < r4) & valid
        chart_exits += int(((g4 < r4) & ~valid).sum())
        q = q[keep]
    return (q.shape[0], chart_exits)


# ---------------------------------------------------------------------------
# estimators


def survival_estimate(
    process: ProcessSpec,
    start,
    domain: Domain,
    t: float,
    n_paths: int,
    h_t: float,
    bridge_correction: bool = False,
    seed: int = 0,
    workers: int = 1,
    tag: str = "survival",
) -> ExitBatch:
    """Fraction of paths whose exit time exceeds t."""
    start = np.asarray(start, dtype=float)
    if process.kind != "su2_sde" and not bool(domain.contains(start[None, :])[0]):
        raise ValueError("start point must lie inside the domain")
    key = mix_key(seed, tag)
    sizes = stream_sizes(n_paths)
    params = {
        "process": process.kind,
        "scale": process.scale,
        "t": t,
        "h_t": h_t,
        "n_paths": n_paths,
        "bridge": bridge_correction,
        "label": domain.label,
    }
    seeds = {"seed": seed, "tag": tag, "family_key": key, "chunk": STREAM_CHUNK}
    if process.kind == "euclidean_bm":
        specs = [
            (key, i, n, tuple(start), domain.shape, t, h_t, process.sigma2,
             bridge_correction, False, None)
            for i, n in enumerate(sizes)
        ]
        res = _run_streams(_euclid_stream_survival, specs, workers)
        survived = sum(r[0] for r in res)
        return ExitBatch.from_counts(n_paths, survived, seeds, params)
    if process.kind == "heisenberg_bm":
        if bridge_correction:
            raise UnsupportedError("bridge correction is euclidean-only")
        specs = [
            (key, i, n, tuple(start), domain.shape, t, h_t, process.substeps)
            for i, n in enumerate(sizes)
        ]
        res = _run_streams(_heis_stream_survival, specs, workers)
        survived = sum(r[0] for r in res)
        return ExitBatch.from_counts(n_paths, survived, seeds, params)
    # su2
    if bridge_correction:
        raise UnsupportedError("bridge correction is euclidean-only")
    shape = domain.shape
    if not isinstance(shape, GaugeBall) or shape.gauge.kind != "chart_radius":
        raise UnsupportedError("compact-group exits support chart-radius balls only")
    radius = shape.radius * shape.gauge.scale
    specs = [(key, i, n, radius, t, h_t) for i, n in enumerate(sizes)]
    res = _run_streams(_su2_stream_survival, specs, workers)
    survived = sum(r[0] for r in res)
    chart_exits = sum(r[1] for r in res)
    return ExitBatch.from_counts(n_paths, survived, seeds, params, chart_exits)


def dynkin_hunt_estimate(
    process: ProcessSpec,
    start,
    domain: Domain,
    t: float,
    cell,
    n_paths: int,
    h_t: float,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Killed-kernel estimator: free kernel minus the mean over exited paths
    of the free kernel restarted at the exit point and time."""
    if process.kind != "euclidean_bm":
        raise UnsupportedError("closed-form free kernel needed: euclidean only")
    from .kernels import gaussian_heat_kernel

    start = np.asarray(start, dtype=float)
    cell = np.asarray(cell, dtype=float)
    key = mix_key(seed, "dynkin_hunt")
    sizes = stream_sizes(n_paths)
    specs = [
        (key, i, n, tuple(start), domain.shape, t, h_t, process.sigma2,
         True, True, tuple(cell))
        for i, n in enumerate(sizes)
    ]
    res = _run_streams(_euclid_stream_survival, specs, workers)
    ksum = sum(r[1] for r in res)
    ksum2 = sum(r[2] for r in res)
    n_exit = sum(r[3] for r in res)
    free = float(
        np.squeeze(gaussian_heat_kernel(t, start, cell, process.dim, process.scale))
    )
    mean_kill = ksum / n_paths
    var = max(ksum2 / n_paths - mean_kill**2, 0.0)
    se = math.sqrt(var / n_paths)
    return {
        "estimate": free - mean_kill,
        "free_kernel": free,
        "killing_term": mean_kill,
        "stderr": se,
        "n_exit": n_exit,
        "params": {"t": t, "h_t": h_t, "n_paths": n_paths, "seed": seed},
    }


def small_deviation_estimate(
    process: ProcessSpec,
    start,
    gauge: Gauge,
    t: float,
    eps_list,
    n_paths: int,
    h_t,
    lam1: float,
    beta: float,
    seed: int = 0,
    workers: int = 1,
    bridge_correction: bool = True,
) -> list[dict]:
    """Scaled gauge-ball survival rows e^(lam1 t / eps^beta) * P_hat, one per
    epsilon, plus the log form -eps^beta log(P_hat)/t.  ``h_t`` may be a
    scalar or per-epsilon list; undersampled rows (zero survivors) are
    flagged rather than fatal."""
    start = np.asarray(start, dtype=float)
    rows = []
    h_list = list(h_t) if np.ndim(h_t) else [h_t] * len(eps_list)
    for j, (eps, h) in enumerate(zip(eps_list, h_list)):
        if process.kind == "euclidean_bm":
            if process.dim == 1:
                shape = Interval(start[0] - eps * gauge.scale, start[0] + eps * gauge.scale)
            else:
                shape = GaugeBall(gauge, eps, tuple(start))
            dom = make_domain(
                _space_for(process), shape, label=f"gauge_ball_{eps}"
            )
            batch = survival_estimate(
                process, start, dom, t, n_paths, h,
                bridge_correction=bridge_correction,
                seed=seed, workers=workers, tag=f"smalldev_{j}",
            )
        elif process.kind == "heisenberg_bm":
            if np.any(start != 0.0):
                raise UnsupportedError("group small deviations start at the identity")
            dom = make_domain(_space_for(process), GaugeBall(gauge, eps), label=f"ball_{eps}")
            batch = survival_estimate(
                process, start, dom, t, n_paths, h, seed=seed,
                workers=workers, tag=f"smalldev_{j}",
            )
        else:
            dom = make_domain(_space_for(process), GaugeBall(gauge, eps), label=f"ball_{eps}")
            batch = survival_estimate(
                process, start, dom, t, n_paths, h, seed=seed,
                workers=workers, tag=f"smalldev_{j}",
            )
        p = batch.estimate
        scaled = math.exp(lam1 * t / eps**beta) * p
        scaled_ci = math.exp(lam1 * t / eps**beta) * batch.ci95
        rows.append(
            {
                "eps": eps,
                "p_hat": p,
                "ci95": batch.ci95,
                "survived": batch.survived,
                "scaled": scaled,
                "scaled_ci": scaled_ci,
                "neg_log_rate": (-(eps**beta) * math.log(p) / t) if p > 0 else float("nan"),
                "undersampled": batch.survived == 0,
                "chart_exits": batch.chart_exits,
            }
        )
    return rows


def _space_for(process: ProcessSpec):
    from .core import euclidean, heisenberg3, su2_chart

    if process.kind == "euclidean_bm":
        return euclidean(process.dim, process.scale)
    if process.kind == "heisenberg_bm":
        return heisenberg3(process.scale)
    return su2_chart(process.scale)


def heat_content_estimate(
    process: ProcessSpec,
    domain: Domain,
    t: float,
    nodes: np.ndarray,
    weights: np.ndarray,
    n_per_node: int,
    h_t: float,
    bridge_correction: bool = True,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Weighted quadrature of per-node survival estimates over mesh nodes."""
    if process.kind != "euclidean_bm":
        raise UnsupportedError("heat content estimation is euclidean-only")
    key0 = mix_key(seed, "heat_content")
    specs = []
    layout = []
    for j, node in enumerate(np.atleast_2d(nodes)):
        key = mix_key(seed, "heat_content", j)
        sizes = stream_sizes(n_per_node)
        for i, n in enumerate(sizes):
            specs.append(
                (key, i, n, tuple(np.atleast_1d(node)), domain.shape, t, h_t,
                 process.sigma2, bridge_correction, False, None)
            )
        layout.append(len(sizes))
    res = _run_streams(_euclid_stream_survival, specs, workers)
    q = 0.0
    var = 0.0
    pos = 0
    per_node = []
    for j, n_streams in enumerate(layout):
        surv = sum(r[0] for r in res[pos : pos + n_streams])
        pos += n_streams
        p = surv / n_per_node
        q += weights[j] * p
        var += weights[j] ** 2 * p * (1.0 - p) / n_per_node
        per_node.append(p)
    return {
        "estimate": q,
        "ci95": 1.96 * math.sqrt(var),
        "per_node": np.asarray(per_node),
        "params": {
            "t": t,
            "h_t": h_t,
            "n_per_node": n_per_node,
            "seed": seed,
            "family_key": key0,
        },
    }


def _stream_alive_curve(spec) -> np.ndarray:
    """Alive counts after each step (survival-curve stream worker)."""
    (kind, key, si, n, start, shape, t, h_t, sigma2, substeps) = spec
    rng = stream_generator(key, si)
    n_steps, h = _steps(t, h_t)
    counts = np.zeros(n_steps, dtype=np.int64)
    st = np.tile(np.asarray(start, dtype=float), (n, 1))
    sig = math.sqrt(sigma2 * h)
    sub = math.sqrt(h / substeps)
    for step in range(n_steps):
        m = st.shape[0]
        if m == 0:
            break
        if kind == "euclidean_bm":
            st = st + rng.standard_normal((m, st.shape[1])) * sig
        else:
            x, y, z = st[:, 0], st[:, 1], st[:, 2]
            for _ in range(substeps):
                dw = rng.standard_normal((m, 2)) * sub
                z += 0.5 * (x * dw[:, 1] - y * dw[:, 0])
                x += dw[:, 0]
                y += dw[:, 1]
        st = st[shape.contains(st)]
        counts[step] = st.shape[0]
    return counts


def exit_time_mean(
    process: ProcessSpec,
    domain: Domain,
    start,
    horizon: float,
    n_paths: int,
    h_t: float,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """E[min(exit time, horizon)] from the discrete survival curve."""
    if process.kind not in ("euclidean_bm", "heisenberg_bm"):
        raise UnsupportedError("mean exit time implemented for R^n and the flat group")
    key = mix_key(seed, "exit_mean")
    sizes = stream_sizes(n_paths)
    specs = [
        (process.kind, key, i, n, tuple(np.atleast_1d(start)), domain.shape,
         horizon, h_t, process.sigma2, process.substeps)
        for i, n in enumerate(sizes)
    ]
    res = _run_streams(_stream_alive_curve, specs, workers)
    counts = np.zeros(max(len(r) for r in res), dtype=np.int64)
    for r in res:
        counts[: len(r)] += r
    _, h = _steps(horizon, h_t)
    survival = counts / n_paths
    mean = float(h * (0.5 + survival[:-1].sum() + 0.5 * survival[-1]))
    return {"mean_capped": mean, "survival_curve": survival, "h": h,
            "truncated_mass": float(survival[-1])}


def _dilate_shape(shape: Shape, r: float, kind: str = "euclidean") -> Shape:
    """Image of a shape under the dilation (anisotropic in z on the group)."""
    if isinstance(shape, Interval):
        return Interval(r * shape.a, r * shape.b)
    if isinstance(shape, Box):
        lo = [r * v for v in shape.lo]
        hi = [r * v for v in shape.hi]
        if kind == "heisenberg3":
            lo[-1] = r * r * shape.lo[-1]
            hi[-1] = r * r * shape.hi[-1]
        return Box(tuple(lo), tuple(hi))
    if isinstance(shape, GaugeBall):
        center = tuple(
            r * v for v in shape.center
        ) if shape.gauge.kind == "euclidean_norm" else shape.center
        return GaugeBall(shape.gauge, r * shape.radius, center)
    raise UnsupportedError(f"no dilation model for {type(shape).__name__}")


def exit_scaling_check(
    process: ProcessSpec,
    domain: Domain,
    r: float,
    ell: float,
    t: float,
    n_paths: int,
    h_t: float,
    start=None,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Exact-scaling audit: survival in the dilated domain at horizon t
    against survival in the base domain at horizon t/ell, matched steps."""
    if process.kind == "su2_sde":
        raise UnsupportedError("exact dilations exist for euclidean and flat-group only")
    start = (
        np.zeros(process.dim)
        if start is None
        else np.asarray(start, dtype=float)
    )
    if process.kind == "euclidean_bm":
        start_g = r * start
    else:
        from .core import heis_dilate

        start_g = heis_dilate(r, start)
    shape_g = _dilate_shape(domain.shape, r, domain.space.kind)
    dom_g = make_domain(domain.space, shape_g, label=domain.label + f"_dil{r}")
    bridge = process.kind == "euclidean_bm" and domain.shape.boundary_gaps(
        start[None, :]
    ) is not None
    base = survival_estimate(
        process, start, domain, t / ell, n_paths, h_t / ell,
        bridge_correction=bridge, seed=seed, workers=workers, tag="scale_base",
    )
    dil = survival_estimate(
        process, start_g, dom_g, t, n_paths, h_t,
        bridge_correction=bridge, seed=seed, workers=workers, tag="scale_dil",
    )
    diff = dil.estimate - base.estimate
    joint = math.sqrt(base.ci95**2 + dil.ci95**2)
    return {
        "base": base,
        "dilated": dil,
        "difference": diff,
        "joint_ci95": joint,
        "within_ci": abs(diff) <= max(joint, 1e-12),
        "r": r,
        "ell": ell,
    }
