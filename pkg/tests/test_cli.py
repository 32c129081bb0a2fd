import json
import math
import subprocess
import sys

import pytest
import yaml

from rotlab.cli import main


def write_config(tmp_path, name, cfg):
    cfg = {"output_dir": f"out_{name}", **cfg}
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path, tmp_path / cfg["output_dir"]


def run(path, *args):
    return main(["run", str(path), *args])


def load(out):
    return json.loads((out / "result.json").read_text())


def test_rotset_rigid(tmp_path):
    path, out = write_config(tmp_path, "rotset", {
        "map": {"kind": "rigid", "rho": 0.3}, "experiment": "rotset",
        "parameters": {"n_samples": 100, "max_iter": 300},
    })
    assert run(path) == 0
    res = load(out)
    assert res["mean"] == pytest.approx(0.3, abs=1e-9)
    lines = (out / "data.csv").read_text().splitlines()
    assert lines[0] == "i,x0,u0,value,converged,birkhoff" and len(lines) == 101
    meta = json.loads((out / "meta.json").read_text())
    assert meta["status"] == "ok" and meta["seed"] == 0


def test_line_verify_not_disjoint(tmp_path):
    path, out = write_config(tmp_path, "lv", {
        "map": {"kind": "rigid", "rho": 0.5}, "experiment": "line-verify",
        "parameters": {"n": 2, "rho": 0.5},
    })
    assert run(path) == 3
    res = load(out)
    assert res["error"]["type"] == "NotDisjoint"
    assert (out / "meta.json").exists()


def test_sweep_rows(tmp_path):
    rho = math.sqrt(2) - 1
    path, out = write_config(tmp_path, "sweep", {
        "map": {"kind": "rigid", "rho": rho}, "experiment": "sweep",
        "parameters": {"thetas": {"start": -0.05, "stop": 0.05, "num": 101}, "max_q": 10},
    })
    assert run(path, "--workers", "2") == 0
    rows = (out / "data.csv").read_text().splitlines()
    assert rows[0] == "theta,has_orbit,p,q,residual,theta_witness,error"
    assert len(rows) == 102
    assert load(out)["n_detected"] == 4


def test_seed_override_and_determinism(tmp_path):
    cfg = {"map": {"kind": "twist", "profile": {"bernstein": [0.0, 1.0]}}, "experiment": "rotset",
           "parameters": {"n_samples": 200, "max_iter": 400, "seed": 1}}
    path, out = write_config(tmp_path, "det", cfg)
    assert run(path, "--workers", "1", "--seed", "7") == 0
    first = (out / "data.csv").read_bytes()
    assert json.loads((out / "meta.json").read_text())["seed"] == 7
    assert run(path, "--workers", "3", "--seed", "7") == 0
    assert (out / "data.csv").read_bytes() == first
    assert run(path, "--workers", "3") == 0
    assert (out / "data.csv").read_bytes() != first


def test_precondition_exit(tmp_path):
    path, out = write_config(tmp_path, "bad", {
        "map": {"kind": "rigid", "rho": 0.3}, "experiment": "rotset",
        "parameters": {"n_samples": 0},
    })
    assert run(path) == 2
    assert load(out)["error"]["parameter"] == "n_samples"
    assert json.loads((out / "meta.json").read_text())["status"] == "error"


def test_unknown_parameter_and_experiment(tmp_path):
    path, _ = write_config(tmp_path, "bad2", {
        "map": {"kind": "rigid", "rho": 0.3}, "experiment": "rotset", "parameters": {"grid": 3},
    })
    assert run(path) == 2
    path, _ = write_config(tmp_path, "bad3", {"map": {"kind": "rigid", "rho": 0.3}, "experiment": "nope"})
    assert run(path) == 2


def test_validate(tmp_path, capsys):
    path, out = write_config(tmp_path, "val", {
        "map": {"kind": "rigid", "rho": 0.3}, "experiment": "farey", "parameters": {"lo": 0.416, "hi": 0.419},
    })
    assert main(["validate", str(path)]) == 0
    assert "valid" in capsys.readouterr().out
    assert not out.exists()


def test_workers_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ROTLAB_WORKERS", "0")
    path, _ = write_config(tmp_path, "env", {
        "map": {"kind": "rigid", "rho": 0.3}, "experiment": "rotset", "parameters": {"n_samples": 10},
    })
    assert run(path) == 2


@pytest.mark.parametrize("experiment,params,check", [
    ("farey", {"lo": 0.416, "hi": 0.419}, lambda r: r["interval"] == "(2/5, 3/7)"),
    ("rotnum", {"point": [0.0, 0.25]}, lambda r: abs(r["value"] - 0.25) < 1e-9),
    ("perorb", {"p": 1, "q": 2}, lambda r: r["found"] and abs(r["point"][1] - 0.5) < 1e-12),
    ("perorb", {"p": 1, "q": 2, "z_minus": [0, 0.2], "z_plus": [0, 0.8]}, lambda r: r["found"]),
    ("pseudo-test", {"max_q": 3}, lambda r: not r["pseudo_rotation_consistent"]),
    ("area-check", {"n_samples": 20000, "max_iter": 200}, lambda r: r["max_difference"] < 1e-2),
    ("return-stats", {"point": [0.1, 0.5], "horizon": 1000}, lambda r: abs(r["ratio"] - 0.5) < 1e-3),
    ("morphism-check", {"other": {"kind": "rigid", "rho": 0.25}, "n_samples": 20000, "max_iter": 50},
     lambda r: r["within_3sigma"]),
    ("invariance-check", {"n_samples": 200, "max_iter": 500}, lambda r: r["shift_error"] < 1e-9),
])
def test_experiments_on_twist(tmp_path, experiment, params, check):
    path, out = write_config(tmp_path, experiment, {
        "map": {"kind": "twist", "profile": {"bernstein": [0.0, 1.0]}}, "experiment": experiment,
        "parameters": params,
    })
    assert run(path) == 0
    assert check(load(out))


def test_line_search_and_verify(tmp_path):
    path, out = write_config(tmp_path, "ls", {
        "map": {"kind": "twist", "profile": {"bernstein": [0.414], "bumps": [{"amplitude": 0.01}]}},
        "experiment": "line-search", "parameters": {"interval": "2/5,3/7", "budget": 100},
    })
    assert run(path) == 0
    res = load(out)
    assert res["verification"]["matched"]
    path2, out2 = write_config(tmp_path, "lv2", {
        "map": {"kind": "twist", "profile": {"bernstein": [0.414], "bumps": [{"amplitude": 0.01}]}},
        "experiment": "line-verify",
        "parameters": {"line": {"csv": str(out / "data.csv")}, "n": 11, "rho": 0.414},
    })
    assert run(path2) == 0
    assert load(out2)["matched"]


def test_flow_check(tmp_path):
    path, out = write_config(tmp_path, "flow", {
        "experiment": "flow-check",
        "parameters": {"field": {"kind": "cutoff", "s": 1.0, "base": {"kind": "constant"}},
                       "n_samples": 500, "max_iter": 50, "slowdown_samples": 200},
    })
    assert run(path) == 0
    res = load(out)
    assert res["max_deviation"] < 1e-3 and res["slowdown"]["violations"] == 0


def test_sweep_timing_separate(tmp_path):
    path, out = write_config(tmp_path, "timing", {
        "map": {"kind": "rigid", "rho": 0.4}, "experiment": "sweep",
        "parameters": {"thetas": [0.0, 0.01], "max_q": 5, "timing": True},
    })
    assert run(path) == 0
    assert (out / "timing.csv").exists()
    assert "seconds" not in (out / "data.csv").read_text()


def test_console_entry_point(tmp_path):
    path, out = write_config(tmp_path, "sub", {
        "map": {"kind": "rigid", "rho": 0.3}, "experiment": "rotset", "parameters": {"n_samples": 10},
    })
    proc = subprocess.run([sys.executable, "-m", "rotlab", "run", str(path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "data.csv").exists()
