"""Acceptance criteria, each at its stated tolerance and time budget.

A PASS/FAIL line per criterion is printed in the "acceptance criteria"
section at the end of the pytest run.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
import yaml

from helpers import GOLDEN, SQRT2M1, hamiltonian_map, twist_linear
from rotlab.cli import main as cli_main
from rotlab.cover import Composition, Rigid, deck_shift, iterate, perturbed_rotation, power_with_deck
from rotlab.farey import (
    FareyInterval,
    decompose,
    enclosing_farey,
    farey_intervals,
    is_farey,
    mediant,
    rationals_between,
    rigid_cyclic_order,
)
from rotlab.flows import ConstantField, check_flow_linearity, cutoff_field, slowdown_violations
from rotlab.lines import (
    EssentialLine,
    LineRelation,
    area_between,
    chain_join,
    height_grid,
    order,
    search_line,
    translate,
    vee_join,
    verify_line_translation,
)
from rotlab.orbits import locked_intervals, perturbation_sweep
from rotlab.profiles import Profile
from rotlab.rotation import check_morphism, point_rotation, return_map_stats, rotation_set

pytestmark = pytest.mark.acceptance


@pytest.fixture
def criterion(record_property):
    """Tag the test with its criterion name and enforce the time budget."""
    state = {}

    def start(name, budget):
        record_property("criterion", name)
        state.update(name=name, budget=budget, t0=time.perf_counter())

    yield start
    if state:
        elapsed = time.perf_counter() - state["t0"]
        assert elapsed < state["budget"], f"{state['name']} took {elapsed:.1f}s > {state['budget']}s"


def test_01_rigid_oracles(criterion):
    criterion("1. rigid-rotation oracle suite", 10)
    rng = np.random.default_rng(2024)
    line = EssentialLine.vertical(0.0)
    # ρ near a low-denominator rational needs a few thousand steps for its
    # return quotients to settle
    max_iter = 5000
    for rho in rng.uniform(0.0, 1.0, 20):
        rho = float(rho)
        m = Rigid(rho)
        est = rotation_set(m, n_samples=100, max_iter=max_iter, seed=1)
        assert abs(est.mean - rho) < 1e-6
        pr = point_rotation(m, (0.0, 0.5), max_iter=max_iter)
        assert abs(pr.value - rho) <= 10 / max_iter
        assert abs(area_between(m, 0.0) - rho) < 1e-9
        n = int(rng.integers(1, 51))
        rep = verify_line_translation(m, line, n, rho)
        assert rep.permutation == rigid_cyclic_order(rho, n)


INVARIANCE_MAPS = [Rigid(0.3), Rigid(SQRT2M1), twist_linear(), twist_linear(0.25, 0.75),
               perturbed_rotation(SQRT2M1, 0.05)]


def test_02_invariance_invariances(criterion):
    criterion("2. deck shift and power invariance", 30)
    for m in INVARIANCE_MAPS:
        base = rotation_set(m, 500, 1000, seed=3)
        for k in (-2, 1, 3):
            shifted = rotation_set(deck_shift(m, k), 500, 1000, seed=3)
            # deck translation is one floating addition per step
            assert abs(shifted.interval[0] - base.interval[0] - k) < 1e-9
            assert abs(shifted.interval[1] - base.interval[1] - k) < 1e-9
        for q in (2, 3, 5):
            power = rotation_set(power_with_deck(m, q, 0), 500, 1000, seed=3)
            tol = 3 * power.stderr + 1e-9
            assert abs(power.interval[0] - q * base.interval[0]) <= tol
            assert abs(power.interval[1] - q * base.interval[1]) <= tol


def _random_twist_or_rigid(rng):
    if rng.uniform() < 0.4:
        return Rigid(float(rng.uniform(0, 1)))
    # the stderr of a linear twist is |b - a| / sqrt(12 n), so slopes up to
    # 1/2 keep every estimate (composites included) under 1e-3 at 1e5 samples
    a = rng.uniform(0, 1)
    b = a + rng.uniform(-0.5, 0.5)
    return twist_linear(float(a), float(b))


def test_03_morphism(criterion):
    criterion("3. mean rotation morphism", 60)
    rng = np.random.default_rng(7)
    for i in range(10):
        f, g = _random_twist_or_rigid(rng), _random_twist_or_rigid(rng)
        rep = check_morphism(f, g, n_samples=100_000, max_iter=100, seed=i)
        for key in ("stderr_f", "stderr_g", "stderr_fg"):
            assert rep[key] < 1e-3
        assert rep["within_3sigma"], rep


@pytest.mark.parametrize("rho", [SQRT2M1, GOLDEN, math.pi - 3], ids=["sqrt2-1", "golden", "pi-3"])
def test_04_return_map(criterion, rho):
    criterion("4. return-map identity", 30)
    st = return_map_stats(Rigid(rho), EssentialLine.vertical(0.0), (0.01, 0.5), horizon=100_000)
    assert set(st.tau_values) == {1}
    assert abs(st.tau_star / st.nu_star - rho) < 1e-3


def test_05_farey_exactness(criterion):
    criterion("5. Farey exactness", 5)
    level = [FareyInterval(Fraction(0), Fraction(1))]
    for _ in range(12):
        nxt = []
        for iv in level:
            m = mediant(iv)
            assert is_farey(iv.left, m) and is_farey(m, iv.right)
            nxt.extend(iv.children())
        level = nxt
    for iv in farey_intervals(12):
        for m in range(1, 201):
            for n in range(math.floor(m * iv.left), math.ceil(m * iv.right) + 1):
                if iv.left < Fraction(n, m) < iv.right:
                    k, l = decompose(iv, m, n)
                    assert k >= 1 and l >= 1
    rng = np.random.default_rng(5)
    ivs = [iv for iv in farey_intervals(12) if iv.left > 0]
    for _ in range(100):
        iv = ivs[int(rng.integers(len(ivs)))]
        rho = float(rng.uniform(0, 1))
        h = Rigid(rho)
        phi = power_with_deck(h, iv.q, iv.p)
        psi = power_with_deck(h, -iv.q2, -iv.p2)
        m = int(rng.integers(iv.q + iv.q2, 60))
        inside = rationals_between(float(iv.left), float(iv.right), m)
        ns = [n for n in range(math.floor(m * iv.left), math.ceil(m * iv.right) + 1)
              if iv.left < Fraction(n, m) < iv.right]
        if not ns:
            continue
        n = ns[int(rng.integers(len(ns)))]
        k, l = decompose(iv, m, n)
        z = (float(rng.uniform(0, 1)), 0.5)
        a = iterate(h, z, m)
        b = iterate(phi, iterate(psi, z, -l), k)
        assert abs((a[0] - n) - b[0]) < 1e-9
        assert inside is not None


def test_06_line_translation(criterion):
    criterion("6. line translation at desk scale", 120)
    alpha = SQRT2M1
    h = perturbed_rotation(alpha, 0.005)
    est = rotation_set(h, n_samples=1000, max_iter=1000, seed=0)
    iv = enclosing_farey(*est.interval, max_den=10)
    assert (iv.left, iv.right) == (Fraction(2, 5), Fraction(3, 7))
    res = search_line(h, iv, budget=400, seed=0)
    assert iv.q + iv.q2 - 1 == 11
    rep = verify_line_translation(h, res.line, 11, alpha)
    assert rep.disjoint
    assert rep.permutation == rigid_cyclic_order(alpha, 11)


AREA_MAPS = [
    ("rigid", Rigid(0.3), 1000, 10),
    ("twist", twist_linear(), 1_000_000, 10),
    ("perturbed", perturbed_rotation(SQRT2M1, 0.02), 200_000, 10),
    ("hamiltonian", hamiltonian_map(), 8000, 3),
    ("composition", Composition((twist_linear(0.0, 0.5), Rigid(0.1))), 1_000_000, 10),
]


def test_07_area_identity(criterion):
    criterion("7. area identity", 30)
    for name, m, n, it in AREA_MAPS:
        est = rotation_set(m, n, it, seed=0, min_converged=0.0)
        areas = [area_between(m, x0) for x0 in (0.0, 0.37, 0.81)]
        for a in areas:
            assert abs(a - est.mean) < 1e-3, (name, a, est.mean)
        assert max(areas) - min(areas) < 1e-6, name


def _random_line(rng, grid):
    knots = np.linspace(grid[0], grid[-1], 6)
    return EssentialLine(grid, np.interp(grid, knots, rng.uniform(-0.3, 0.3, 6)) + rng.uniform(-1, 1))


def test_08_join_properties(criterion):
    criterion("8. join properties", 10)
    grid = height_grid(257)
    rng = np.random.default_rng(8)
    for _ in range(1000):
        a, b = _random_line(rng, grid), _random_line(rng, grid)
        j = vee_join(a, b)
        assert np.all(j.xs <= a.xs) and np.all(j.xs <= b.xs)
        assert np.all((j.xs == a.xs) | (j.xs == b.xs))
        c = EssentialLine(grid, np.minimum(a.xs, b.xs) - rng.uniform(0.001, 0.5))
        assert order(c, a).relation == LineRelation.LEFT_OF
        assert order(c, b).relation == LineRelation.LEFT_OF
        assert order(c, j).relation == LineRelation.LEFT_OF
    done = 0
    while done < 100:
        q = int(rng.integers(2, 8))
        base = _random_line(rng, grid)
        offs = np.sort(rng.uniform(0.02, q - 0.02, q - 1))
        inner = [EssentialLine(grid, base.xs - o + rng.uniform(-0.01, 0.01, len(grid))) for o in offs]
        chain = [translate(base, -q)] + inner[::-1] + [base]
        if any(order(x, y).relation != LineRelation.LEFT_OF for x, y in zip(chain, chain[1:])):
            continue
        out = chain_join(base, inner, q)
        assert order(out, translate(out)).relation == LineRelation.LEFT_OF
        done += 1


def test_09_sweep(criterion):
    criterion("9. perturbation sweep", 300)
    thetas = np.linspace(-0.05, 0.05, 10_000)
    spacing = thetas[1] - thetas[0]
    centers = [float(r) - SQRT2M1 for r in rationals_between(SQRT2M1 - 0.05, SQRT2M1 + 0.05, 10)]
    rows = perturbation_sweep(Rigid(SQRT2M1), thetas, 10, residual_tol=1e-10)
    detected = {r.theta for r in rows if r.has_orbit}
    expected = {float(t) for t in thetas if any(abs(t - c) <= spacing / 2 for c in centers)}
    assert detected == expected
    assert all(r.residual < 1e-10 for r in rows if r.has_orbit)

    eps = 0.02
    h = perturbed_rotation(SQRT2M1, eps)
    rows = perturbation_sweep(h, thetas, 10, residual_tol=1e-10)
    runs = locked_intervals(rows)
    assert runs
    multi = [r for r in runs if r[1] > r[0]]
    assert multi, "no interval of consecutive locked thetas"
    for lo, hi in runs:
        assert any(lo - spacing <= c <= hi + spacing for c in centers), (lo, hi)


def test_10_flows(criterion):
    criterion("10. flow properties", 60)
    for fld in (ConstantField(1.0), cutoff_field(ConstantField(1.0), 1.0), cutoff_field(ConstantField(1.0), 2.5)):
        rep = check_flow_linearity(fld, [0.25, 0.5, 1.0, 2.0], n_samples=2000, max_iter=200)
        assert rep["max_deviation"] < 1e-3
    rep = slowdown_violations(ConstantField(1.0), n=10_000, seed=0)
    assert rep["violations"] == 0


DETERMINISM_CONFIGS = [
    ("rotset", {"kind": "rigid", "rho": 0.3}, {"n_samples": 300, "max_iter": 500}),
    ("invariance-check", {"kind": "twist", "profile": {"bernstein": [0.0, 1.0]}}, {"n_samples": 300, "q": 3}),
    ("morphism-check", {"kind": "twist", "profile": {"bernstein": [0.0, 1.0]}},
     {"n_samples": 20_000, "max_iter": 50, "other": {"kind": "rigid", "rho": 0.25}}),
    ("return-stats", {"kind": "rigid", "rho": SQRT2M1}, {"point": [0.01, 0.5], "horizon": 5000}),
    ("farey", {"kind": "twist", "profile": {"bernstein": [SQRT2M1], "bumps": [{"amplitude": 0.005}]}},
     {"n_samples": 300, "max_iter": 1000}),
    ("line-search", {"kind": "twist", "profile": {"bernstein": [SQRT2M1], "bumps": [{"amplitude": 0.005}]}},
     {"n_samples": 300, "max_iter": 1000, "budget": 200}),
    ("area-check", {"kind": "twist", "profile": {"bernstein": [0.0, 1.0]}}, {"n_samples": 50_000, "max_iter": 10}),
    ("sweep", {"kind": "twist", "profile": {"bernstein": [SQRT2M1], "bumps": [{"amplitude": 0.02}]}},
     {"thetas": {"start": -0.05, "stop": 0.05, "num": 301}, "max_q": 10}),
    ("flow-check", None, {"field": {"kind": "cutoff", "s": 1.0, "base": {"kind": "constant"}},
                          "n_samples": 500, "max_iter": 50}),
]


def test_11_determinism(criterion, tmp_path):
    criterion("11. determinism across workers", 600)
    for exp, mp, params in DETERMINISM_CONFIGS:
        outputs = []
        for workers in ("1", "4"):
            cfg = {"experiment": exp, "parameters": params, "output_dir": f"out_{exp}_{workers}"}
            if mp is not None:
                cfg["map"] = mp
            path = tmp_path / f"{exp}_{workers}.yaml"
            path.write_text(yaml.safe_dump(cfg))
            assert cli_main(["run", str(path), "--workers", workers, "--seed", "11"]) == 0, exp
            outputs.append((tmp_path / cfg["output_dir"] / "data.csv").read_bytes())
        assert outputs[0] == outputs[1], exp
        assert len(outputs[0]) > 0
