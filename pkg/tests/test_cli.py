import json
import math
import os

import pytest

from dirichletlab import cli


def write_cfg(tmp_path, name, payload):
    path = str(tmp_path / name)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)
    return path


SPECTRUM_CFG = {
    "kind": "spectrum",
    "seed": 3,
    "space": {"kind": "euclidean", "n": 1, "generator_scale": "dirichlet_form"},
    "domain": {"shape": {"type": "interval", "a": 0.0, "b": 1.0}, "label": "unit"},
    "mesh": {"h": 1 / 64, "k": 4},
}


def test_run_spectrum_and_replay(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "cfg.json", SPECTRUM_CFG)
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    assert cli.main(["run", "--config", cfg, "--out", out_a]) == 0
    assert cli.main(["run", "--config", cfg, "--out", out_b]) == 0
    with open(os.path.join(out_a, "results.csv"), "rb") as fa:
        raw_a = fa.read()
    with open(os.path.join(out_b, "results.csv"), "rb") as fb:
        raw_b = fb.read()
    assert raw_a == raw_b  # byte-identical replay
    header, rows = cli.read_csv(os.path.join(out_a, "results.csv"))
    lam1 = float(rows[0][header.index("lambda")])
    assert abs(lam1 - math.pi**2) / math.pi**2 < 0.002
    report = json.load(open(os.path.join(out_a, "report.json")))
    assert report["hard_failures"] == []
    assert any(a["name"] == "ground_state" for a in report["audits"])
    resolved = json.load(open(os.path.join(out_a, "resolved_config.json")))
    assert resolved["seed"] == 3
    assert cli.main(["compare", out_a, out_b]) == 0


def test_compare_detects_refinement_ratio(tmp_path):
    cfg_h = dict(SPECTRUM_CFG)
    cfg_h2 = dict(SPECTRUM_CFG)
    cfg_h["mesh"] = {"h": 1 / 32, "k": 3}
    cfg_h2["mesh"] = {"h": 1 / 64, "k": 3}
    pa = write_cfg(tmp_path, "a.json", cfg_h)
    pb = write_cfg(tmp_path, "b.json", cfg_h2)
    oa, ob = str(tmp_path / "ra"), str(tmp_path / "rb")
    assert cli.main(["run", "--config", pa, "--out", oa]) == 0
    assert cli.main(["run", "--config", pb, "--out", ob]) == 0
    # strict spectrum tolerance: the h-difference must trip the comparator
    assert cli.main(["compare", oa, ob]) == 1
    _, rows_a = cli.read_csv(os.path.join(oa, "results.csv"))
    _, rows_b = cli.read_csv(os.path.join(ob, "results.csv"))
    err_a = float(rows_a[0][1]) - math.pi**2
    err_b = float(rows_b[0][1]) - math.pi**2
    assert err_a / err_b == pytest.approx(4.0, rel=0.05)  # O(h^2) Richardson ratio


def test_config_errors(tmp_path):
    bad = dict(SPECTRUM_CFG)
    bad["mystery_field"] = 1
    path = write_cfg(tmp_path, "bad.json", bad)
    assert cli.main(["run", "--config", path, "--out", str(tmp_path / "x")]) == 2
    bad2 = dict(SPECTRUM_CFG)
    bad2["kind"] = "florble"
    path2 = write_cfg(tmp_path, "bad2.json", bad2)
    assert cli.main(["run", "--config", path2, "--out", str(tmp_path / "y")]) == 2
    bad3 = dict(SPECTRUM_CFG)
    bad3["domain"] = {"shape": {"type": "interval", "a": 0.0, "b": 1.0, "weird": 2}}
    path3 = write_cfg(tmp_path, "bad3.json", bad3)
    assert cli.main(["run", "--config", path3, "--out", str(tmp_path / "z")]) == 2


def test_numerical_failure_status(tmp_path):
    cfg = dict(SPECTRUM_CFG)
    cfg["mesh"] = {"h": 0.7, "k": 2}  # coarser than the interval: no nodes
    path = write_cfg(tmp_path, "cfg.json", cfg)
    assert cli.main(["run", "--config", path, "--out", str(tmp_path / "n")]) == 3


def test_heatcontent_kind(tmp_path):
    cfg = {
        "kind": "heatcontent",
        "seed": 5,
        "space": {"kind": "euclidean", "n": 1, "generator_scale": "probabilist"},
        "domain": {"shape": {"type": "interval", "a": -1.0, "b": 1.0}},
        "mesh": {"h": 2 / 34, "k": 6},
        "mc": {"t_list": [1.0, 2.0], "n_per_node": 4000, "h_t": 1 / 16},
    }
    path = write_cfg(tmp_path, "hc.json", cfg)
    out = str(tmp_path / "hc")
    assert cli.main(["run", "--config", path, "--out", out]) == 0
    header, rows = cli.read_csv(os.path.join(out, "results.csv"))
    asym = float(rows[0][header.index("asymptote")])
    assert asym == pytest.approx(16 / math.pi**2, rel=0.01)


def test_smalldev_kind_and_seed_variation(tmp_path):
    base = {
        "kind": "smalldev",
        "space": {"kind": "euclidean", "n": 1, "generator_scale": "probabilist"},
        "domain": {"shape": {"type": "interval", "a": -1.0, "b": 1.0}},
        "mesh": {"h": 2 / 34, "k": 3},
        "mc": {"t": 1.0, "eps_list": [1.0], "n_paths": 40_000, "h_t": 1 / 16},
    }
    path = write_cfg(tmp_path, "sd.json", base)
    oa, ob = str(tmp_path / "sa"), str(tmp_path / "sb")
    assert cli.main(["run", "--config", path, "--seed", "1", "--out", oa]) == 0
    assert cli.main(["run", "--config", path, "--seed", "2", "--out", ob]) == 0
    ha, rows_a = cli.read_csv(os.path.join(oa, "results.csv"))
    hb, rows_b = cli.read_csv(os.path.join(ob, "results.csv"))
    i = ha.index("p_hat")
    j = ha.index("ci95")
    pa, pb = float(rows_a[0][i]), float(rows_b[0][i])
    joint = math.hypot(float(rows_a[0][j]), float(rows_b[0][j]))
    assert pa != pb
    assert abs(pa - pb) <= 3 * joint


def test_kernel_bounds_kind(tmp_path):
    cfg = {
        "kind": "kernel_bounds",
        "bounds": {
            "family": "lie_group",
            "params": {"kappa": 1.0, "c1": 1.0, "c2": 1.0, "c3": 1.0, "nu": 4},
            "volume": 0.5,
            "lam_list": [1.0],
            "d_xy": 1.0,
            "d_boundary": 2.0,
        },
    }
    path = write_cfg(tmp_path, "kb.json", cfg)
    out = str(tmp_path / "kb")
    assert cli.main(["run", "--config", path, "--out", out]) == 0
    header, rows = cli.read_csv(os.path.join(out, "results.csv"))
    byname = {r[0]: r for r in rows}
    assert float(byname["good_set_threshold"][2]) == pytest.approx(2 / math.e)
    side = json.load(open(os.path.join(out, "threshold_rows.json")))
    assert side[0]["family"] == "lie_group"
    assert {"quantity", "value"} <= set(side[0]["result"])
    assert byname["spectral_gap_condition"][2] == "true"
    assert float(byname["spectral_gap_condition"][3]) == pytest.approx(2.0)


def test_dilation_check_kind(tmp_path):
    cfg = {
        "kind": "dilation_check",
        "space": {"kind": "euclidean", "n": 1},
        "domain": {"shape": {"type": "interval", "a": 0.0, "b": 1.0}},
        "mesh": {"h": 1 / 32, "k": 3},
        "dilation": {"r0": 2.0, "t": 0.05},
    }
    path = write_cfg(tmp_path, "dc.json", cfg)
    out = str(tmp_path / "dc")
    assert cli.main(["run", "--config", path, "--out", out]) == 0
    report = json.load(open(os.path.join(out, "report.json")))
    names = {a["name"]: a["passed"] for a in report["audits"]}
    assert names["energy_scaling"]
    assert names["semigroup_factorization"]


def test_compare_schema_mismatch(tmp_path):
    cfg_a = write_cfg(tmp_path, "a.json", SPECTRUM_CFG)
    kb = {
        "kind": "kernel_bounds",
        "bounds": {"family": "gaussian_ahlfors",
                   "params": {"C1": 1, "C2": 1, "K1": 1, "K2": 1, "alpha": 2},
                   "lam_list": [1.0]},
    }
    cfg_b = write_cfg(tmp_path, "b.json", kb)
    oa, ob = str(tmp_path / "ca"), str(tmp_path / "cb")
    assert cli.main(["run", "--config", cfg_a, "--out", oa]) == 0
    assert cli.main(["run", "--config", cfg_b, "--out", ob]) == 0
    assert cli.main(["compare", oa, ob]) == 2


def test_list_kinds(capsys):
    assert cli.main(["list-kinds"]) == 0
    out = capsys.readouterr().out
    for kind in cli.KINDS:
        assert kind in out


def test_contraction_kind(tmp_path):
    cfg = {
        "kind": "contraction",
        "space": {"kind": "su2_chart", "n": 3},
        "domain": {"shape": {"type": "box", "lo": [0.4, 0.0, -0.5],
                              "hi": [1.4, 6.283185307179586, 0.5]}},
        "mesh": {"h": 0.12, "k": 3},
        "dilation": {"epsilons": [0.2, 0.1, 0.05]},
    }
    path = write_cfg(tmp_path, "ct.json", cfg)
    out = str(tmp_path / "ct")
    assert cli.main(["run", "--config", path, "--out", out]) == 0
    report = json.load(open(os.path.join(out, "report.json")))
    names = {a["name"]: a["passed"] for a in report["audits"]}
    assert names["coefficient_rate"] and names["eigenvalue_monotone"]


def test_dilation_check_heisenberg(tmp_path):
    cfg = {
        "kind": "dilation_check",
        "space": {"kind": "heisenberg3", "n": 3},
        "domain": {"shape": {"type": "box", "lo": [-1.0, -1.0, -0.6],
                              "hi": [1.0, 1.0, 0.6]}},
        "mesh": {"h": 0.2, "k": 2},
        "dilation": {"r0": 2.0, "t": 0.01},
    }
    path = write_cfg(tmp_path, "dh.json", cfg)
    out = str(tmp_path / "dh")
    assert cli.main(["run", "--config", path, "--out", out]) == 0
    report = json.load(open(os.path.join(out, "report.json")))
    names = {a["name"]: a["passed"] for a in report["audits"]}
    assert names["energy_scaling"]
