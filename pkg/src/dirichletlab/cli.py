"""Experiment runner: declarative JSON configs in, deterministic CSV/JSON out.

Subcommands
-----------
``run --config cfg.json [--seed N] [--workers N] [--out DIR]``
    Executes one experiment and writes ``results.csv``, ``report.json`` and
    ``resolved_config.json`` into the output directory.  Exit status 0 when
    every hard audit passes, 2 on config errors, 3 on numerical failure.
``compare A B``
    Column-wise relative differences between two runs of the same kind.
``list-kinds``
    Prints the supported experiment kinds.

Hard audits (mesh invariants, eigensolver residuals) gate the exit status;
soft comparisons (Monte Carlo against series oracles) are recorded in
report.json and only gate it when the config sets ``"require_soft": true``.
Every numeric output is a pure function of (config, seed); reruns are
byte-identical and independent of the worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import core, discrete, kernels, spectral, stochastic
from .contraction import (
    coefficient_convergence,
    eigenvalue_contraction_experiment,
    haar_density_ratio,
)
from .core import DomainError, UnsupportedError
from .discrete import MeshError
from .spectral import SolveError

KINDS = (
    "spectrum",
    "smalldev",
    "heatcontent",
    "dilation_check",
    "contraction",
    "kernel_bounds",
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# strict config parsing


def _take(d: dict, path: str, allowed: dict) -> dict:
    """Validate keys of d against allowed {key: kind}, returning defaults."""
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = [k for k in d if k not in allowed]
    if unknown:
        raise ConfigError(f"{path}: unknown field(s) {unknown}")
    return d


_SHAPE_FIELDS = {
    "interval": {"type", "a", "b"},
    "box": {"type", "lo", "hi"},
    "ball": {"type", "gauge", "radius", "center", "scale"},
    "polygon": {"type", "vertices"},
    "union": {"type", "parts", "connected"},
    "difference": {"type", "base", "cut", "connected"},
    "gasket_cells": {"type", "prefixes"},
}


def parse_shape(spec: dict, path: str = "domain.shape") -> core.Shape:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"{path}: shape needs a 'type' field")
    kind = spec["type"]
    if kind not in _SHAPE_FIELDS:
        raise ConfigError(f"{path}: unknown shape type {kind!r}")
    extra = set(spec) - _SHAPE_FIELDS[kind]
    if extra:
        raise ConfigError(f"{path}: unknown field(s) {sorted(extra)}")
    try:
        if kind == "interval":
            return core.Interval(float(spec["a"]), float(spec["b"]))
        if kind == "box":
            return core.Box(tuple(map(float, spec["lo"])), tuple(map(float, spec["hi"])))
        if kind == "ball":
            gauge = core.Gauge(spec.get("gauge", "euclidean_norm"), float(spec.get("scale", 1.0)))
            center = tuple(map(float, spec.get("center", ())))
            return core.GaugeBall(gauge, float(spec["radius"]), center)
        if kind == "polygon":
            return core.Polygon(tuple((float(x), float(y)) for x, y in spec["vertices"]))
        if kind == "union":
            parts = tuple(parse_shape(p, path + ".parts") for p in spec["parts"])
            return core.ShapeUnion(parts, connected=bool(spec.get("connected", False)))
        if kind == "difference":
            return core.ShapeDifference(
                parse_shape(spec["base"], path + ".base"),
                parse_shape(spec["cut"], path + ".cut"),
                connected=bool(spec.get("connected", False)),
            )
        return core.GasketCells(tuple(tuple(p) for p in spec.get("prefixes", [[]])))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_space(spec: dict) -> core.SpaceModel:
    _take(spec, "space", {"kind": 1, "n": 1, "generator_scale": 1})
    try:
        return core.SpaceModel(
            spec.get("kind", "euclidean"),
            int(spec.get("n", 1)),
            spec.get("generator_scale", core.DIRICHLET_FORM),
        )
    except ValueError as exc:
        raise ConfigError(f"space: {exc}") from exc


_TOP_FIELDS = {
    "kind", "seed", "output_dir", "space", "domain", "mesh", "mc",
    "dilation", "bounds", "require_soft", "workers",
}


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            cfg = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    _take(cfg, "config", {k: 1 for k in _TOP_FIELDS})
    if cfg.get("kind") not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {cfg.get('kind')!r}")
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


# ---------------------------------------------------------------------------
# experiment kinds


def _mesh_from_config(cfg: dict):
    space = parse_space(cfg.get("space", {}))
    dom_cfg = _take(cfg.get("domain", {}), "domain", {"shape": 1, "label": 1})
    domain = core.make_domain(space, parse_shape(dom_cfg.get("shape", {})),
                              label=dom_cfg.get("label", ""))
    mesh_cfg = _take(cfg.get("mesh", {}), "mesh", {"h": 1, "k": 1, "rho_min": 1})
    h = float(mesh_cfg.get("h", 1 / 32))
    if space.kind == "euclidean":
        mesh = discrete.assemble_euclidean(domain, h)
    elif space.kind == "heisenberg3":
        mesh = discrete.assemble_heisenberg(domain, h)
    elif space.kind == "gasket":
        mesh = discrete.assemble_gasket(space.n, domain)
    else:
        mesh = discrete.assemble_heisenberg_cylindrical(
            domain, h, rho_min=float(mesh_cfg.get("rho_min", 0.0)))
    return space, domain, mesh, int(mesh_cfg.get("k", 6))


def _mesh_audits(mesh) -> list[dict]:
    rng = np.random.Generator(np.random.Philox(key=np.array([5, 5], dtype=np.uint64)))
    k = mesh.form_matrix()
    asym = abs(k - k.T).max() / max(abs(k).max(), 1e-300)
    vecs = rng.standard_normal((64, mesh.size))
    rayleigh = min(float(v @ (k @ v)) for v in vecs)
    rep = discrete.mmatrix_report(mesh)
    return [
        {"name": "weighted_symmetry", "passed": bool(asym < 1e-10), "value": float(asym)},
        {"name": "positive_semidefinite", "passed": bool(rayleigh > -1e-10), "value": rayleigh},
        {"name": "sign_structure", "passed": True, "value": rep, "informational": True},
    ]


def run_spectrum(cfg: dict, seed: int, workers: int) -> tuple[list, list, list]:
    space, domain, mesh, k = _mesh_from_config(cfg)
    sd = spectral.eigensolve(mesh, k)
    gs = spectral.ground_state_audit(sd) if k >= 2 else None
    audits = _mesh_audits(mesh)
    audits.append(
        {"name": "eigensolver_residuals", "passed": bool(np.all(sd.residuals <= 1e-8 * np.maximum(sd.eigenvalues, 1e-30))),
         "value": sd.residuals.tolist()}
    )
    if gs is not None:
        audits.append({"name": "spectral_gap_positive", "passed": bool(sd.eigenvalues[0] > 0),
                       "value": float(sd.eigenvalues[0])})
        audits.append({"name": "ground_state", "passed": bool(gs.simple and gs.positive_after_sign_fix) or not domain.connected,
                       "value": {"simple": gs.simple, "gap": gs.gap,
                                 "positive": gs.positive_after_sign_fix}})
    header = ["n", "lambda", "c_n", "sup_norm", "residual"]
    rows = [
        [i + 1, float(sd.eigenvalues[i]), float(sd.coefficients[i]),
         float(np.abs(sd.eigenfunctions[i]).max()), float(sd.residuals[i])]
        for i in range(k)
    ]
    return header, rows, audits


def _mc_cfg(cfg: dict) -> dict:
    mc = _take(cfg.get("mc", {}), "mc", {
        "n_paths": 1, "t": 1, "t_list": 1, "h_t": 1, "bridge": 1, "start": 1,
        "eps_list": 1, "n_per_node": 1, "process_scale": 1, "substeps": 1,
    })
    return mc


def run_smalldev(cfg: dict, seed: int, workers: int):
    space, domain, mesh, k = _mesh_from_config(cfg)
    mc = _mc_cfg(cfg)
    sd = spectral.eigensolve(mesh, max(k, 2))
    lam1 = float(sd.eigenvalues[0])
    node = discrete.nearest_node(mesh, mc.get("start", [0.0] * space.dim))
    target = float(sd.coefficients[0] * sd.eigenfunctions[0, node])
    shape = domain.shape
    if not isinstance(shape, core.GaugeBall) and not isinstance(shape, core.Interval):
        raise ConfigError("smalldev needs a gauge-ball (or interval) domain")
    if isinstance(shape, core.Interval):
        gauge = core.Gauge("euclidean_norm", (shape.b - shape.a) / 2.0)
        start = np.array([0.5 * (shape.a + shape.b)])
        beta = 2.0
    else:
        gauge = core.Gauge(shape.gauge.kind, shape.gauge.scale * shape.radius)
        start = np.asarray(mc.get("start", [0.0] * space.dim), dtype=float)
        beta = 2.0
    if space.kind == "euclidean":
        proc = stochastic.euclidean_bm(space.n, mc.get("process_scale", space.generator_scale))
    elif space.kind == "heisenberg3":
        proc = stochastic.heisenberg_bm()
    else:
        raise ConfigError("smalldev supports euclidean and heisenberg3 spaces")
    lam_proc = lam1 if proc.scale == space.generator_scale else (
        lam1 / 2.0 if space.generator_scale == core.DIRICHLET_FORM else lam1 * 2.0
    )
    rows_ = stochastic.small_deviation_estimate(
        proc, start, gauge, float(mc.get("t", 1.0)), mc.get("eps_list", [0.5]),
        int(mc.get("n_paths", 10000)), mc.get("h_t", 1e-3), lam1=lam_proc,
        beta=beta, seed=seed, workers=workers,
        bridge_correction=bool(mc.get("bridge", True)),
    )
    header = ["eps", "p_hat", "ci95", "scaled", "scaled_ci", "neg_log_rate",
              "undersampled"]
    rows = [[r["eps"], r["p_hat"], r["ci95"], r["scaled"], r["scaled_ci"],
             r["neg_log_rate"], r["undersampled"]] for r in rows_]
    audits = _mesh_audits(mesh)
    flat = [r for r in rows_ if not r["undersampled"]]
    if len(flat) >= 2:
        drift = abs(flat[0]["scaled"] - flat[-1]["scaled"])
        envelope = flat[0]["scaled_ci"] + flat[-1]["scaled_ci"]
        audits.append({"name": "flat_trend_soft", "passed": bool(drift <= max(envelope, 0.1 * abs(target))),
                       "value": {"drift": drift, "envelope": envelope, "target": target},
                       "soft": True})
    return header, rows, audits


def run_heatcontent(cfg: dict, seed: int, workers: int):
    space, domain, mesh, k = _mesh_from_config(cfg)
    mc = _mc_cfg(cfg)
    sd = spectral.eigensolve(mesh, k)
    proc_scale = mc.get("process_scale", space.generator_scale)
    if proc_scale != space.generator_scale:
        raise ConfigError("heatcontent: mesh and process scales must match")
    proc = stochastic.euclidean_bm(space.n, proc_scale)
    t_list = mc.get("t_list", [mc.get("t", 1.0)])
    n_per_node = int(mc.get("n_per_node", 0))
    header = ["t", "q_series", "asymptote", "scaled_series", "q_mc", "mc_ci95"]
    rows = []
    audits = _mesh_audits(mesh)
    for t in t_list:
        q, asym = spectral.heat_content_series(sd, float(t))
        lam1 = float(sd.eigenvalues[0])
        q_mc, ci = float("nan"), float("nan")
        if n_per_node > 0:
            est = stochastic.heat_content_estimate(
                proc, domain, float(t), mesh.nodes, mesh.weights, n_per_node,
                float(mc.get("h_t", 1e-3)), bridge_correction=bool(mc.get("bridge", True)),
                seed=seed + int(round(1000 * t)), workers=workers,
            )
            q_mc, ci = est["estimate"], est["ci95"]
            audits.append({"name": f"mc_vs_series_t{t}", "soft": True,
                           "passed": bool(abs(q_mc - q) <= max(3 * ci, 0.03 * q)),
                           "value": {"series": q, "mc": q_mc, "ci95": ci}})
        rows.append([float(t), q, asym, math.exp(lam1 * float(t)) * q, q_mc, ci])
    return header, rows, audits


def run_dilation_check(cfg: dict, seed: int, workers: int):
    from .scaling import (
        carnot_dilation,
        euclidean_dilation,
        verify_energy_scaling,
        verify_semigroup_factorization,
    )

    space, domain, mesh, k = _mesh_from_config(cfg)
    dil = _take(cfg.get("dilation", {}), "dilation", {"kind": 1, "r0": 1, "exponents": 1, "epsilons": 1, "t": 1})
    r = float(dil.get("r0", 2.0))
    if space.kind == "euclidean":
        ds = euclidean_dilation(space.n)
        scaled_shape = stochastic._dilate_shape(domain.shape, r, space.kind)
        dom_r = core.make_domain(space, scaled_shape, label=domain.label + "_r")
        mesh_r = discrete.assemble_euclidean(dom_r, tuple(s * r for s in mesh.meta["spacings"]))
    elif space.kind == "heisenberg3":
        ds = carnot_dilation(4)
        scaled_shape = stochastic._dilate_shape(domain.shape, r, space.kind)
        dom_r = core.make_domain(space, scaled_shape, label=domain.label + "_r")
        sp_ = mesh.meta["spacings"]
        mesh_r = discrete.assemble_heisenberg(dom_r, (sp_[0] * r, sp_[1] * r, sp_[2] * r * r))
    else:
        raise ConfigError("dilation_check supports euclidean and heisenberg3")
    energy = verify_energy_scaling(ds, mesh, mesh_r, r)
    audits = _mesh_audits(mesh)
    audits.append({"name": "energy_scaling", "passed": bool(energy["pass"]),
                   "value": {"target": energy["target"], "max_rel_deviation": energy["max_rel_deviation"]}})
    rows = [["energy_ratio", float(np.mean(energy["ratios"])), energy["target"], energy["max_rel_deviation"]]]
    if mesh.size <= 2000:
        fact = verify_semigroup_factorization(ds, mesh, mesh_r, r, float(dil.get("t", 0.05)))
        audits.append({"name": "semigroup_factorization", "passed": bool(fact["pass"]),
                       "value": {"max_rel_deviation": fact["max_rel_deviation"],
                                 "eigenvalue_rel_deviation": fact["eigenvalue_rel_deviation"]}})
        rows.append(["factorization_dev", fact["max_rel_deviation"], 0.0, fact["eigenvalue_rel_deviation"]])
    header = ["check", "value", "target", "deviation"]
    return header, rows, audits


def run_contraction(cfg: dict, seed: int, workers: int):
    space, domain, mesh, k = _mesh_from_config(cfg)
    dil = _take(cfg.get("dilation", {}), "dilation", {"kind": 1, "r0": 1, "exponents": 1, "epsilons": 1, "t": 1})
    r_list = dil.get("epsilons", [0.4, 0.2, 0.1, 0.05])
    mesh_cfg = cfg.get("mesh", {})
    h = float(mesh_cfg.get("h", 0.07))
    table = eigenvalue_contraction_experiment(
        r_list, domain, h, k=k, rho_min=float(mesh_cfg.get("rho_min", 0.0)))
    rho = np.linspace(0.3, 1.4, 23)
    coeff = coefficient_convergence(r_list, rho)
    haar = haar_density_ratio(min(r_list), rho)
    header = ["r", "n", "eigenvalue", "gap_to_limit", "rate_estimate"]
    rows = []
    for row in table["rows"]:
        for n in range(len(row["eigenvalues"])):
            rows.append([row["r"], n + 1, row["eigenvalues"][n], row["gaps"][n],
                         table["fitted_rates"][n]])
    audits = [
        {"name": "coefficient_rate", "passed": bool(abs(coeff["fitted_rate"] - 2.0) <= 0.3),
         "value": coeff["fitted_rate"]},
        {"name": "haar_ratio", "passed": bool(haar["max_deviation"] < 0.1),
         "value": haar["max_deviation"]},
        {"name": "eigenvalue_monotone", "passed": bool(table["monotone"]),
         "value": {"rates": table["fitted_rates"]}},
    ]
    return header, rows, audits


def run_kernel_bounds(cfg: dict, seed: int, workers: int):
    b = _take(cfg.get("bounds", {}), "bounds", {
        "family": 1, "params": 1, "volume": 1, "lam_list": 1,
        "d_xy": 1, "d_boundary": 1,
    })
    family = b.get("family")
    params = b.get("params", {})
    maker = {
        "gaussian_ahlfors": kernels.gaussian_ahlfors,
        "sub_gaussian": kernels.sub_gaussian,
        "polynomial_nonlocal": kernels.polynomial_nonlocal,
        "lie_group": kernels.lie_group,
    }.get(family)
    if maker is None:
        raise ConfigError(f"bounds.family must be a known family, got {family!r}")
    try:
        bound = maker(**params)
    except (TypeError, kernels.BoundError) as exc:
        raise ConfigError(f"bounds.params: {exc}") from exc
    rows = []
    header = ["quantity", "input", "value", "extra"]
    for lam in b.get("lam_list", [1.0]):
        rows.append(["envelope_constant", lam, kernels.lambda_envelope_constant(bound, lam), ""])
    if family == "lie_group":
        thr = kernels.good_set_threshold(params["kappa"], params["nu"])
        rows.append(["good_set_threshold", "", thr, ""])
    vol = b.get("volume")
    if vol is not None:
        ok, wit = kernels.spectral_gap_condition(bound, float(vol))
        rows.append(["spectral_gap_condition", vol, ok, wit if wit is not None else ""])
    if b.get("d_xy") is not None:
        w = kernels.irreducibility_window(bound, float(b["d_xy"]), float(b["d_boundary"]))
        rows.append(["irreducibility_window_t0", b["d_xy"], w.t0, w.r_condition])
    return header, rows, [{"name": "bounds_valid", "passed": True, "value": family}]


_RUNNERS = {
    "spectrum": run_spectrum,
    "smalldev": run_smalldev,
    "heatcontent": run_heatcontent,
    "dilation_check": run_dilation_check,
    "contraction": run_contraction,
    "kernel_bounds": run_kernel_bounds,
}

# per-kind relative tolerance used by `compare`
_COMPARE_TOL = {
    "spectrum": 1e-12,
    "smalldev": 0.25,
    "heatcontent": 0.1,
    "dilation_check": 0.05,
    "contraction": 1e-9,
    "kernel_bounds": 1e-12,
}


def run(config_path: str, seed: int | None, workers: int, out_dir: str | None) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    seed = int(cfg.get("seed", 0)) if seed is None else seed
    workers = int(cfg.get("workers", 1)) if workers is None else workers
    out = out_dir or cfg.get("output_dir", "runs/latest")
    os.makedirs(out, exist_ok=True)
    resolved = dict(cfg)
    resolved["seed"] = seed
    resolved["workers"] = workers
    resolved["output_dir"] = out
    try:
        header, rows, audits = _RUNNERS[cfg["kind"]](cfg, seed, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, MeshError, SolveError, UnsupportedError) as exc:
        print(f"numerical failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3
    write_csv(os.path.join(out, "results.csv"), header, rows)
    with open(os.path.join(out, "resolved_config.json"), "w", encoding="utf-8") as f:
        json.dump(resolved, f, indent=2, sort_keys=True)
    if cfg["kind"] in ("smalldev", "heatcontent"):
        from .rng import STREAM_CHUNK

        sidecar = {
            "seed": seed,
            "stream_chunk": STREAM_CHUNK,
            "mc": cfg.get("mc", {}),
            "generator": "philox: key = (mix(seed, tag), stream_index)",
        }
        with open(os.path.join(out, "mc_sidecar.json"), "w", encoding="utf-8") as f:
            json.dump(sidecar, f, indent=2, sort_keys=True)
    if cfg["kind"] == "kernel_bounds":
        bounds = cfg.get("bounds", {})
        payload = [
            {"family": bounds.get("family"), "params": bounds.get("params", {}),
             "result": {"quantity": r[0], "input": r[1], "value": r[2], "extra": r[3]}}
            for r in rows
        ]
        with open(os.path.join(out, "threshold_rows.json"), "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True, default=float)
    require_soft = bool(cfg.get("require_soft", False))
    hard_fail = [a for a in audits if not a["passed"] and not a.get("soft") and not a.get("informational")]
    soft_fail = [a for a in audits if not a["passed"] and a.get("soft")]
    report = {
        "kind": cfg["kind"],
        "seed": seed,
        "audits": audits,
        "hard_failures": [a["name"] for a in hard_fail],
        "soft_failures": [a["name"] for a in soft_fail],
    }
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True, default=float)
    for a in audits:
        status = "pass" if a["passed"] else ("soft-fail" if a.get("soft") else "FAIL")
        print(f"[{status}] {a['name']}")
    if hard_fail or (require_soft and soft_fail):
        return 3
    return 0


def compare(path_a: str, path_b: str) -> int:
    try:
        ra = json.load(open(os.path.join(path_a, "resolved_config.json"), encoding="utf-8"))
        rb = json.load(open(os.path.join(path_b, "resolved_config.json"), encoding="utf-8"))
        ha, rows_a = read_csv(os.path.join(path_a, "results.csv"))
        hb, rows_b = read_csv(os.path.join(path_b, "results.csv"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read runs: {exc}", file=sys.stderr)
        return 2
    if ra.get("kind") != rb.get("kind") or ha != hb or len(rows_a) != len(rows_b):
        print("schema mismatch between runs", file=sys.stderr)
        return 2
    tol = _COMPARE_TOL.get(ra["kind"], 1e-9)
    worst = 0.0
    worst_loc = ""
    for i, (a, b) in enumerate(zip(rows_a, rows_b)):
        for j, (va, vb) in enumerate(zip(a, b)):
            try:
                fa, fb = float(va), float(vb)
            except ValueError:
                if va != vb:
                    print(f"row {i} col {ha[j]}: {va!r} != {vb!r}")
                    worst = math.inf
                continue
            if math.isnan(fa) and math.isnan(fb):
                continue
            denom = max(abs(fa), abs(fb), 1e-12)
            rel = abs(fa - fb) / denom
            if rel > worst:
                worst, worst_loc = rel, f"row {i} col {ha[j]}"
    print(f"max relative difference: {worst:.3e} ({worst_loc or 'identical'})")
    return 0 if worst <= tol else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="dirichletlab")
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_cmp = sub.add_parser("compare", help="diff two run directories")
    p_cmp.add_argument("run_a")
    p_cmp.add_argument("run_b")
    sub.add_parser("list-kinds", help="print supported experiment kinds")
    args = ap.parse_args(argv)
    if args.command == "run":
        return run(args.config, args.seed, args.workers, args.out)
    if args.command == "compare":
        return compare(args.run_a, args.run_b)
    print("\n".join(KINDS))
    return 0


if __name__ == "__main__":
    sys.exit(main())
