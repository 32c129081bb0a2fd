"""Batch experiment driver.

    rotlab run <config.yaml> [--workers N] [--seed S]
    rotlab validate <config.yaml>

A config is a YAML mapping with keys ``map``, ``experiment``,
``parameters`` and ``output_dir``.  Every run writes ``result.json``,
``data.csv`` and ``meta.json`` into ``output_dir`` (``meta.json`` even on
failure).  Exit status: 0 success, 2 precondition violation, 3 numerical
failure.  See README.md for the per-experiment parameters and CSV columns.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .cover import MapFamily, check_lifted_map
from .errors import NumericalFailure, PreconditionError, RotlabError
from .farey import FareyInterval, decompose, enclosing_farey, fmt_rational, mediant
from .flows import FieldSpec, check_field, check_flow_linearity, slowdown_violations
from .lines import EssentialLine, area_between, search_line, verify_line_translation
from .orbits import (
    bracketed_search,
    find_orbit,
    locked_intervals,
    perturbation_sweep,
    pseudo_rotation_test,
)
from .rotation import (
    check_morphism,
    check_invariance,
    point_rotation,
    return_map_stats,
    rotation_set,
)

EXIT_OK, EXIT_PRECONDITION, EXIT_NUMERICAL = 0, 2, 3


# --- parameter schema --------------------------------------------------------

def _int(lo=None):
    def conv(name, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
            raise PreconditionError(f"parameter {name!r} must be an integer", parameter=name, value=v)
        v = int(v)
        if lo is not None and v < lo:
            raise PreconditionError(f"parameter {name!r} must be >= {lo}", parameter=name, value=v)
        return v
    return conv


def _float(lo=None, strict=False):
    def conv(name, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise PreconditionError(f"parameter {name!r} must be a finite number", parameter=name, value=v)
        v = float(v)
        if lo is not None and (v <= lo if strict else v < lo):
            op = ">" if strict else ">="
            raise PreconditionError(f"parameter {name!r} must be {op} {lo}", parameter=name, value=v)
        return v
    return conv


def _bool(name, v):
    if not isinstance(v, bool):
        raise PreconditionError(f"parameter {name!r} must be true or false", parameter=name, value=v)
    return v


def _point(name, v):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise PreconditionError(f"parameter {name!r} must be a pair [x, u]", parameter=name, value=v)
    x, u = (_float()(name, c) for c in v)
    if not 0 < u < 1:
        raise PreconditionError(f"parameter {name!r} needs 0 < u < 1", parameter=name, value=v)
    return (x, u)


def _floats(name, v):
    if not isinstance(v, (list, tuple)) or not v:
        raise PreconditionError(f"parameter {name!r} must be a non-empty list", parameter=name, value=v)
    return [_float()(name, c) for c in v]


def _thetas(name, v):
    if isinstance(v, dict):
        try:
            start, stop, num = float(v["start"]), float(v["stop"]), int(v["num"])
        except (KeyError, TypeError, ValueError):
            raise PreconditionError(f"{name!r} needs start, stop and num", parameter=name, value=v)
        if num < 1:
            raise PreconditionError(f"{name!r}.num must be >= 1", parameter=name, value=v)
        return np.linspace(start, stop, num).tolist()
    return _floats(name, v)


def _interval(name, v):
    try:
        return FareyInterval.parse(v)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise PreconditionError(f"parameter {name!r} is not a pair of rationals", parameter=name, value=v)


def _line(name, v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return EssentialLine.vertical(float(v))
    if isinstance(v, dict) and "x0" in v:
        return EssentialLine.vertical(_float()(name, v["x0"]))
    if isinstance(v, dict) and "csv" in v:
        path = Path(v["csv"])
        if not path.is_file():
            raise PreconditionError(f"line file {path} not found", parameter=name)
        return EssentialLine.from_csv(path.read_text())
    raise PreconditionError(f"parameter {name!r} must be {{x0: ...}} or {{csv: path}}", parameter=name, value=v)


def _map(name, v):
    if not isinstance(v, dict):
        raise PreconditionError(f"parameter {name!r} must be a map description", parameter=name)
    return MapFamily.from_dict(v).build()


def _field(name, v):
    if not isinstance(v, dict):
        raise PreconditionError(f"parameter {name!r} must be a field description", parameter=name)
    return FieldSpec.from_dict(v).build()


def _opt(conv):
    return lambda name, v: None if v is None else conv(name, v)


_COMMON = {"seed": _int(0)}
_SAMPLING = {"n_samples": _int(1), "max_iter": _int(1)}

SCHEMAS = {
    "rotset": {**_SAMPLING, "backward": _bool, "min_converged": _float(0.0)},
    "rotnum": {"point": _point, "max_iter": _int(1), "backward": _bool},
    "farey": {**_SAMPLING, "lo": _float(), "hi": _float(), "max_den": _int(1), "m_max": _int(1)},
    "line-verify": {**_SAMPLING, "line": _line, "n": _int(1), "rho": _float()},
    "line-search": {**_SAMPLING, "interval": _interval, "max_den": _int(1), "budget": _int(1),
                    "knots": _int(2)},
    "perorb": {"p": _int(), "q": _int(1), "grid": _int(2), "residual_tol": _float(0.0, True),
               "u_range": _floats, "z_minus": _point, "z_plus": _point, "max_grid": _int(2)},
    "pseudo-test": {**_SAMPLING, "max_q": _int(1), "grid": _int(2), "residual_tol": _float(0.0, True)},
    "sweep": {**_SAMPLING, "thetas": _thetas, "max_q": _int(1), "grid": _int(2),
              "residual_tol": _float(0.0, True), "cell": _opt(_float(0.0)), "timing": _bool},
    "flow-check": {**_SAMPLING, "field": _field, "ts": _floats, "step": _float(0.0, True),
                   "slowdown_samples": _int(0)},
    "area-check": {**_SAMPLING, "x0": _floats},
    "return-stats": {"line": _line, "point": _point, "horizon": _int(1)},
    "morphism-check": {**_SAMPLING, "other": _map},
    "invariance-check": {**_SAMPLING, "k": _int(), "q": _int(1)},
}

DEFAULTS = {
    "rotset": {"n_samples": 1000, "max_iter": 1000, "backward": False, "min_converged": 0.5},
    "rotnum": {"max_iter": 10_000, "backward": False},
    "farey": {"n_samples": 1000, "max_iter": 1000, "max_den": 10},
    "line-verify": {"n_samples": 1000, "max_iter": 1000, "line": {"x0": 0.0}},
    "line-search": {"n_samples": 1000, "max_iter": 1000, "max_den": 10, "budget": 400, "knots": 16},
    "perorb": {"grid": 64, "residual_tol": 1e-10, "u_range": [0.0, 1.0], "max_grid": 1024},
    "pseudo-test": {"n_samples": 200, "max_iter": 1000, "max_q": 10, "grid": 64, "residual_tol": 1e-10},
    "sweep": {"n_samples": 64, "max_iter": 400, "max_q": 10, "grid": 64, "residual_tol": 1e-10,
              "cell": None, "timing": False},
    "flow-check": {"n_samples": 2000, "max_iter": 200, "ts": [0.25, 0.5, 1.0, 2.0], "step": 1e-3,
                   "slowdown_samples": 0},
    "area-check": {"n_samples": 10_000, "max_iter": 1000, "x0": [0.0, 0.3, 0.7]},
    "return-stats": {"line": {"x0": 0.0}, "horizon": 100_000},
    "morphism-check": {"n_samples": 100_000, "max_iter": 100},
    "invariance-check": {"n_samples": 1000, "max_iter": 1000, "k": 1, "q": 2},
}

REQUIRED = {
    "rotnum": ("point",),
    "line-verify": ("n",),
    "perorb": ("p", "q"),
    "sweep": ("thetas",),
    "flow-check": ("field",),
    "return-stats": ("point",),
    "morphism-check": ("other",),
}

# experiments that do not need a map
MAPLESS = {"flow-check"}


@dataclass
class ExperimentConfig:
    experiment: str
    map_spec: dict | None
    parameters: dict
    output_dir: Path
    raw: dict = field(default_factory=dict)
    map: object = None

    @classmethod
    def load(cls, path, seed=None):
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text())
        except OSError as exc:
            raise PreconditionError(f"cannot read config {path}: {exc}", path=str(path))
        except yaml.YAMLError as exc:
            raise PreconditionError(f"config {path} is not valid YAML: {exc}", path=str(path))
        return cls.from_dict(raw, base=path.parent, seed=seed)

    @classmethod
    def from_dict(cls, raw, base=Path("."), seed=None):
        if not isinstance(raw, dict):
            raise PreconditionError("config must be a mapping")
        unknown = set(raw) - {"map", "experiment", "parameters", "output_dir"}
        if unknown:
            raise PreconditionError(f"unknown config keys {sorted(unknown)}", keys=sorted(unknown))
        exp = raw.get("experiment")
        if exp not in SCHEMAS:
            raise PreconditionError(f"unknown experiment {exp!r}; expected one of {sorted(SCHEMAS)}",
                                    experiment=exp)
        if "output_dir" not in raw:
            raise PreconditionError("config needs output_dir")
        params = raw.get("parameters") or {}
        if not isinstance(params, dict):
            raise PreconditionError("parameters must be a mapping")
        params = dict(params)
        if seed is not None:
            params["seed"] = seed
        map_spec = raw.get("map")
        if map_spec is None and exp not in MAPLESS:
            raise PreconditionError(f"experiment {exp!r} needs a map")
        out = Path(raw["output_dir"])
        if not out.is_absolute():
            out = base / out
        cfg = cls(exp, map_spec, params, out, raw)
        cfg.validate()
        return cfg

    def validate(self):
        """Check and convert every parameter before anything runs."""
        schema = {**_COMMON, **SCHEMAS[self.experiment]}
        unknown = set(self.parameters) - set(schema)
        if unknown:
            raise PreconditionError(
                f"unknown parameters {sorted(unknown)} for {self.experiment}",
                parameters=sorted(unknown), allowed=sorted(schema),
            )
        for key in REQUIRED.get(self.experiment, ()):
            if key not in self.parameters:
                raise PreconditionError(f"{self.experiment} needs parameter {key!r}", parameter=key)
        merged = {"seed": 0, **DEFAULTS.get(self.experiment, {}), **self.parameters}
        self.values = {k: schema[k](k, v) for k, v in merged.items()}
        if self.map_spec is not None:
            if not isinstance(self.map_spec, dict):
                raise PreconditionError("map must be a mapping with a 'kind'")
            try:
                self.map = MapFamily.from_dict(self.map_spec).build()
            except (KeyError, TypeError) as exc:
                raise PreconditionError(f"bad map description: {exc}", map=self.map_spec)
        v = self.values
        if self.experiment == "farey" and (("lo" in v) != ("hi" in v)):
            raise PreconditionError("farey needs both lo and hi, or neither")
        if self.experiment == "perorb" and (("z_minus" in v) != ("z_plus" in v)):
            raise PreconditionError("perorb bracketing needs both z_minus and z_plus")
        if self.experiment == "perorb" and len(v["u_range"]) != 2:
            raise PreconditionError("u_range must be [lo, hi]", parameter="u_range")
        return self


# --- experiments -------------------------------------------------------------

@dataclass
class Outcome:
    result: dict
    header: list
    rows: list
    extra: dict = field(default_factory=dict)  # additional csv files: name -> (header, rows)


def _rotset(m, v, workers):
    est = rotation_set(m, v["n_samples"], v["max_iter"], v["seed"], backward=v["backward"],
                       workers=workers, min_converged=v["min_converged"])
    rows = [(i, x, u, val, int(c), float(b))
            for (i, x, u, val, c), b in zip(est.rows(), est.birkhoff)]
    return Outcome(est.summary(), ["i", "x0", "u0", "value", "converged", "birkhoff"], rows)


def _rotnum(m, v, workers):
    r = point_rotation(m, v["point"], v["max_iter"], backward=v["backward"])
    res = {"point": list(v["point"]), "value": r.value, "converged": r.converged,
           "recurrence_gap": r.recurrence_gap, "n_returns": len(r.return_times),
           "birkhoff": r.birkhoff}
    rows = list(zip(range(len(r.return_times)), r.return_times, r.quotients))
    return Outcome(res, ["k", "return_time", "quotient"], rows)


def _measured(m, v, workers):
    est = rotation_set(m, v["n_samples"], v["max_iter"], v["seed"], workers=workers, min_converged=0.0)
    return est


def _farey(m, v, workers):
    if "lo" in v:
        lo, hi, src = v["lo"], v["hi"], "given"
    else:
        lo, hi = _measured(m, v, workers).interval
        src = "measured"
    iv = enclosing_farey(lo, hi, v["max_den"])
    m_max = v.get("m_max", iv.horizon)
    rows = []
    for mm in range(1, m_max + 1):
        for n in range(math.floor(mm * iv.left), math.ceil(mm * iv.right) + 1):
            if iv.left < Fraction(n, mm) < iv.right:
                k, l = decompose(iv, mm, n)
                rows.append((mm, n, k, l))
    res = {"lo": lo, "hi": hi, "source": src, "interval": str(iv), "mediant": fmt_rational(mediant(iv)),
           "horizon": iv.horizon, "max_den": v["max_den"]}
    return Outcome(res, ["m", "n", "k", "l"], rows)


def _line_verify(m, v, workers):
    rho = v["rho"] if "rho" in v else _measured(m, v, workers).mean
    rep = verify_line_translation(m, v["line"], v["n"], rho)
    rows = [(i, rep.deck_offsets[i], rep.permutation.permutation.index(i)) for i in range(rep.n + 1)]
    return Outcome(rep.to_dict(), ["i", "deck_offset", "position"], rows)


def _line_search(m, v, workers):
    if "interval" in v:
        iv = v["interval"]
    else:
        iv = enclosing_farey(*_measured(m, v, workers).interval, v["max_den"])
    res = search_line(m, iv, v["budget"], v["seed"], knots=v["knots"])
    out = {"interval": str(iv), "stage": res.stage, "objective": res.objective,
           "evaluations": res.evaluations, "verification": res.verification.to_dict()}
    rows = list(zip(res.line.heights.tolist(), res.line.xs.tolist()))
    return Outcome(out, ["u", "x"], rows)


def _orbit_row(rec):
    x, u = rec.point if rec.point is not None else (float("nan"), float("nan"))
    return (rec.p, rec.q, int(rec.found), x, u, rec.residual)


_ORBIT_HEADER = ["p", "q", "found", "x", "u", "residual"]


def _perorb(m, v, workers):
    if "z_minus" in v:
        rec = bracketed_search(m, v["z_minus"], v["z_plus"], v["p"], v["q"], v["grid"], v["max_grid"],
                               v["residual_tol"])
    else:
        rec = find_orbit(m, v["p"], v["q"], v["grid"], v["residual_tol"], tuple(v["u_range"]))
    return Outcome(rec.to_dict(), _ORBIT_HEADER, [_orbit_row(rec)])


def _pseudo(m, v, workers):
    est = rotation_set(m, v["n_samples"], v["max_iter"], v["seed"], workers=workers, min_converged=0.0)
    rep = pseudo_rotation_test(m, v["max_q"], v["grid"], residual_tol=v["residual_tol"], estimate=est)
    rows = [_orbit_row(r) for r in rep.pop("records")]
    return Outcome(rep, _ORBIT_HEADER, rows)


def _sweep(m, v, workers):
    rows = perturbation_sweep(m, v["thetas"], v["max_q"], v["grid"], v["n_samples"], v["max_iter"],
                              v["seed"], v["residual_tol"], v["cell"], timing=v["timing"],
                              workers=workers)
    data = [(r.theta, int(r.has_orbit), r.p, r.q, r.residual, r.theta_witness, r.error) for r in rows]
    res = {"n_thetas": len(rows), "n_detected": sum(r.has_orbit for r in rows),
           "n_errors": sum(r.error is not None for r in rows),
           "locked_intervals": [list(t) for t in locked_intervals(rows)]}
    extra = {}
    if v["timing"]:
        # wall-clock times are not reproducible, so they stay out of data.csv
        extra["timing.csv"] = (["theta", "seconds"], [(r.theta, r.seconds) for r in rows])
    return Outcome(res, ["theta", "has_orbit", "p", "q", "residual", "theta_witness", "error"], data, extra)


def _flow_check(m, v, workers):
    fld = v["field"]
    rep = check_flow_linearity(fld, v["ts"], v["n_samples"], v["max_iter"], v["seed"], v["step"])
    rep["field"] = check_field(fld, seed=v["seed"])
    if v["slowdown_samples"]:
        rep["slowdown"] = slowdown_violations(fld, v["slowdown_samples"], v["seed"])
    rows = [(t, mu, rep["slope"] * t) for t, mu in zip(rep["ts"], rep["means"])]
    return Outcome(rep, ["t", "mean", "linear_fit"], rows)


def _area_check(m, v, workers):
    est = rotation_set(m, v["n_samples"], v["max_iter"], v["seed"], workers=workers, min_converged=0.0)
    areas = [area_between(m, x0) for x0 in v["x0"]]
    rows = [(x0, a, est.mean, a - est.mean) for x0, a in zip(v["x0"], areas)]
    res = {"rotation_mean": est.mean, "stderr": est.stderr, "areas": areas,
           "max_difference": max(abs(r[3]) for r in rows),
           "x0_spread": max(areas) - min(areas)}
    return Outcome(res, ["x0", "area", "rotation_mean", "difference"], rows)


def _return_stats(m, v, workers):
    st = return_map_stats(m, v["line"], v["point"], v["horizon"])
    res = {"nu_star": st.nu_star, "tau_star": st.tau_star, "ratio": st.ratio,
           "n_returns": len(st.nu_values), "tau_values": sorted(set(st.tau_values))}
    rows = list(zip(range(len(st.nu_values)), st.nu_values, st.tau_values))
    return Outcome(res, ["k", "nu", "tau"], rows)


def _morphism(m, v, workers):
    rep = check_morphism(m, v["other"], v["n_samples"], v["max_iter"], v["seed"])
    rows = [("f", rep["rho_f"], rep["stderr_f"]), ("g", rep["rho_g"], rep["stderr_g"]),
            ("fg", rep["rho_fg"], rep["stderr_fg"])]
    return Outcome(rep, ["map", "mean", "stderr"], rows)


def _invariance(m, v, workers):
    rep = check_invariance(m, v["k"], v["q"], v["n_samples"], v["max_iter"], v["seed"])
    rows = [(name, rep[name]["interval"][0], rep[name]["interval"][1], rep[name]["mean"],
             rep[name]["stderr"]) for name in ("base", "shifted", "power")]
    return Outcome(rep, ["estimate", "lo", "hi", "mean", "stderr"], rows)


EXPERIMENTS = {
    "rotset": _rotset,
    "rotnum": _rotnum,
    "farey": _farey,
    "line-verify": _line_verify,
    "line-search": _line_search,
    "perorb": _perorb,
    "pseudo-test": _pseudo,
    "sweep": _sweep,
    "flow-check": _flow_check,
    "area-check": _area_check,
    "return-stats": _return_stats,
    "morphism-check": _morphism,
    "invariance-check": _invariance,
}


# --- output --------------------------------------------------------------------

def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(c) for c in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (str, int)) or obj is None:
        return obj
    return str(obj)


def write_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def resolve_workers(arg):
    if arg is not None:
        n = arg
    elif os.environ.get("ROTLAB_WORKERS"):
        try:
            n = int(os.environ["ROTLAB_WORKERS"])
        except ValueError:
            raise PreconditionError("ROTLAB_WORKERS must be an integer")
    else:
        n = os.cpu_count() or 1
    if n < 1:
        raise PreconditionError("workers must be >= 1", workers=n)
    return n


def _exit_code(exc):
    if isinstance(exc, NumericalFailure):
        return EXIT_NUMERICAL
    return EXIT_PRECONDITION


def _meta(raw, workers, seed, started, status, error=None):
    return {
        "config": raw,
        "seed": seed,
        "workers": workers,
        "status": status,
        "error": error,
        "versions": {"rotlab": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "wall_time_s": time.perf_counter() - started,
    }


def run(config_path, workers=None, seed=None):
    """Run one experiment; returns the exit status."""
    started = time.perf_counter()
    raw, out, n_workers = None, None, None
    try:
        raw = yaml.safe_load(Path(config_path).read_text())
        if isinstance(raw, dict) and "output_dir" in raw:
            out = Path(raw["output_dir"])
            if not out.is_absolute():
                out = Path(config_path).parent / out
    except (OSError, yaml.YAMLError):
        pass
    try:
        n_workers = resolve_workers(workers)
        cfg = ExperimentConfig.load(config_path, seed)
        out = cfg.output_dir
        out.mkdir(parents=True, exist_ok=True)
        outcome = EXPERIMENTS[cfg.experiment](cfg.map, cfg.values, n_workers)
    except RotlabError as exc:
        err = {"type": type(exc).__name__, **exc.to_dict()}
        code = _exit_code(exc)
        print(f"rotlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        if out is not None:
            try:
                out.mkdir(parents=True, exist_ok=True)
                write_json(out / "result.json", {"status": "error", "error": err})
                write_csv(out / "data.csv", ["error"], [])
                write_json(out / "meta.json", _meta(raw, n_workers, seed, started, "error", err))
            except OSError as io:
                print(f"rotlab: cannot write outputs: {io}", file=sys.stderr)
        return code
    write_json(out / "result.json", {"status": "ok", "experiment": cfg.experiment, **outcome.result})
    write_csv(out / "data.csv", outcome.header, outcome.rows)
    for name, (header, rows) in outcome.extra.items():
        write_csv(out / name, header, rows)
    write_json(out / "meta.json", _meta(raw, n_workers, cfg.values["seed"], started, "ok"))
    print(f"rotlab: {cfg.experiment} done, outputs in {out}")
    return EXIT_OK


def validate(config_path):
    try:
        cfg = ExperimentConfig.load(config_path)
    except RotlabError as exc:
        print(f"invalid: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    if cfg.map is not None:
        rep = check_lifted_map(cfg.map, n=200)
        print(json.dumps(_jsonable({"map": cfg.map.label, **rep}), sort_keys=True))
    print(f"valid: {cfg.experiment} -> {cfg.output_dir}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="rotlab", description="Rotation-number experiments on the annulus.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--seed", type=int, default=None)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args.config, args.workers, args.seed)
    return validate(args.config)


if __name__ == "__main__":
    sys.exit(main())
