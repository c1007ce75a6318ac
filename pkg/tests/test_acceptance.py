"""End-to-end acceptance checks, one group per numbered criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion.
"""
import math
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from qrc import quantum as q
from qrc.config import EXPERIMENTS, build_config
from qrc.experiments import run_experiment, write_csv
from qrc.linalg import pseudoinverse
from qrc.tasks import MGTSParams, gen_mackey_glass, nrmse

acceptance = pytest.mark.acceptance

_first_runs = {}


def run_default(name, **overrides):
    """Run an experiment once per session and keep the result."""
    key = (name, tuple(sorted(overrides.items())))
    if key not in _first_runs:
        t0 = time.perf_counter()
        result = run_experiment(build_config(name, {}, {k: str(v) for k, v in overrides.items()}))
        _first_runs[key] = (result, time.perf_counter() - t0)
    return _first_runs[key]


# 1 -------------------------------------------------------------------------

def long_run_defects(g, gz, beta, kappa, nf):
    ops = q.build_operators(q.FockQubitSpace(nf), kappa)
    H = q.hamiltonian(ops, q.HamiltonianParams(g, gz, beta, kappa))
    rho = q.integrate(q.vacuum_ground(ops.space), H, ops.collapse, q.DEFAULT_DT, 10_000)
    return q.density_defects(rho)


valid_configs = st.tuples(
    st.floats(0, 20), st.floats(0, 10), st.floats(0, 15),
    st.one_of(st.just(0.0), st.floats(0, 30)), st.integers(2, 8))


@acceptance(1, "density-matrix invariants over 1e4 RK4 steps, under 10 s")
@settings(max_examples=20, derandomize=True, database=None,
          suppress_health_check=[HealthCheck.too_slow])
@given(valid_configs)
def test_invariants_over_long_runs(cfg):
    g, gz, beta, kappa, nf = cfg
    d = long_run_defects(g, gz, beta, kappa, nf)
    assert d["trace_error"] <= 1e-8
    assert d["hermiticity"] <= 1e-9
    assert d["min_eigenvalue"] >= -1e-8, f"min eigenvalue {d['min_eigenvalue']:.3e}"


@acceptance(1, "density-matrix invariants over 1e4 RK4 steps, under 10 s")
def test_invariants_runtime():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    for _ in range(20):
        long_run_defects(rng.uniform(0, 20), rng.uniform(0, 10), rng.uniform(0, 15),
                         rng.uniform(0, 30), int(rng.integers(2, 9)))
    assert time.perf_counter() - t0 < 10.0


# 2 -------------------------------------------------------------------------

@acceptance(2, "Rabi and photon-decay oracles within 1e-6, under 5 s")
def test_analytic_oracles():
    t0 = time.perf_counter()
    gz = 2.0
    ops = q.build_operators(q.FockQubitSpace(2), 0.0)
    params = q.HamiltonianParams(0.0, gz, 0.0, 0.0)
    rho = q.vacuum_ground(ops.space)
    worst = 0.0
    chunk = 10
    n_chunks = int(round(10 * math.pi / gz / (q.DEFAULT_DT * chunk)))
    for k in range(1, n_chunks + 1):
        rho = q.evolve(rho, params, ops, q.DEFAULT_DT, chunk)
        expected = math.sin(gz * k * chunk * q.DEFAULT_DT) ** 2
        worst = max(worst, abs(q.expectation(rho, ops.atom_excitation).real - expected))
    assert worst <= 1e-6

    kappa = 10.0
    ops = q.build_operators(q.FockQubitSpace(3), kappa)
    params = q.HamiltonianParams(0.0, 0.0, 0.0, kappa)
    rho = q.basis_state(ops.space, 1, q.GROUND)
    worst = 0.0
    for k in range(1, 101):
        rho = q.evolve(rho, params, ops, q.DEFAULT_DT, 5)
        worst = max(worst, abs(q.expectation(rho, ops.number_op).real
                               - math.exp(-kappa * k * 5 * q.DEFAULT_DT)))
    assert worst <= 1e-6
    assert time.perf_counter() - t0 < 5.0


# 3 -------------------------------------------------------------------------

@acceptance(3, "Moore-Penrose conditions on 100 random matrices, under 5 s")
def test_moore_penrose_suite():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(100):
        rows, cols = int(rng.integers(1, 9)), int(rng.integers(1, 33))
        rank = int(rng.integers(0, min(rows, cols) + 1)) if k % 2 else min(rows, cols)
        A = rng.normal(size=(rows, rank)) + 1j * rng.normal(size=(rows, rank))
        B = rng.normal(size=(rank, cols)) + 1j * rng.normal(size=(rank, cols))
        M = A @ B
        P = pseudoinverse(M)
        worst = max(worst,
                    np.max(np.abs(M @ P @ M - M)), np.max(np.abs(P @ M @ P - P)),
                    np.max(np.abs((M @ P).conj().T - M @ P)),
                    np.max(np.abs((P @ M).conj().T - P @ M)))
    assert worst <= 1e-8
    assert time.perf_counter() - t0 < 5.0


# 4 -------------------------------------------------------------------------

@acceptance(4, "Mackey-Glass fixed point and dt-halving convergence")
def test_mackey_glass_generator():
    p = MGTSParams(history_value=1.0, transient=0.0, spacing=0.1)
    x = gen_mackey_glass(10_001, p).values
    assert np.max(np.abs(x - 1.0)) <= 1e-12
    a = gen_mackey_glass(1001, MGTSParams(transient=0.0, dt=0.1)).values
    b = gen_mackey_glass(1001, MGTSParams(transient=0.0, dt=0.05)).values
    assert np.max(np.abs(a - b)) < 1e-4


# 5 -------------------------------------------------------------------------

@acceptance(5, "classification: 16 neurons >= 95 % and beats 8 neurons, under 60 s")
def test_classification():
    r16, t16 = run_default("classify")
    r8, _ = run_default("classify", n_neurons=8)
    acc16, acc8 = r16.summary.metrics["accuracy"], r8.summary.metrics["accuracy"]
    print(f"accuracy 16 neurons {acc16:.2f} %, 8 neurons {acc8:.2f} %, {t16:.1f} s")
    assert acc16 >= 95.0
    assert acc16 > acc8
    assert t16 <= 60.0


# 6 -------------------------------------------------------------------------

@acceptance(6, "g_z sweep minimum is interior to the grid, under 10 min")
def test_gz_optimum_interior():
    r, elapsed = run_default("gz-sweep")
    nrmse = r.column("nrmse")
    assert np.all(np.isfinite(nrmse)) and np.all(nrmse >= 0)
    best = int(np.argmin(nrmse))
    print(f"g_z NRMSE {np.round(nrmse, 4).tolist()}, minimum at g_z={r.column('gz')[best]}")
    assert 0 < best < nrmse.size - 1
    assert elapsed <= 600.0


# 7 -------------------------------------------------------------------------

@acceptance(7, "Mackey-Glass free run: NRMSE <= 0.1 over 100 steps, no divergence in 300")
def test_mackey_glass_forecast():
    r, elapsed = run_default("mgts-forecast")
    m = r.summary.metrics
    print(f"forecast NRMSE {m['nrmse']:.4f}, diverged {m['diverged']}, {elapsed:.1f} s")
    assert not m["diverged"] and m["n_forecast"] == 300
    assert m["nrmse"] <= 0.1
    assert elapsed <= 300.0


def test_first_fifty_generative_outputs_track_truth():
    r, _ = run_default("mgts-forecast")
    truth, pred = r.column("truth")[:50], r.column("prediction")[:50]
    score = nrmse(truth, pred)
    print(f"NRMSE over the first 50 free-running steps {score:.4f}")
    assert score <= 0.1


def test_mackey_glass_forecast_stays_bounded():
    r, _ = run_default("mgts-forecast")
    assert r.summary.metrics["max_abs_excess"] <= 0.5


# 8 -------------------------------------------------------------------------

@acceptance(8, "training length: NRMSE(300) <= 2 x NRMSE(1000), under 10 min")
def test_training_length():
    r, elapsed = run_default("train-length-sweep")
    nrmse = dict(zip(r.column("train_length").astype(int), r.column("nrmse")))
    print(f"NRMSE by training length {nrmse}")
    assert nrmse[300] <= 2.0 * nrmse[1000]
    assert elapsed <= 600.0


def test_short_training_degrades():
    r, _ = run_default("train-length-sweep")
    nrmse = dict(zip(r.column("train_length").astype(int), r.column("nrmse")))
    assert nrmse[100] > nrmse[1000]
    assert nrmse[1500] >= 0.0


# 9 -------------------------------------------------------------------------

@acceptance(9, "oscillator free run: NRMSE <= 0.15 over two periods, decaying peaks")
def test_oscillator_forecast():
    r, elapsed = run_default("oscillator-forecast")
    m = r.summary.metrics
    print(f"oscillator NRMSE {m['nrmse']:.4f}, peaks {m['peaks']}, {elapsed:.1f} s")
    assert not m["diverged"]
    assert m["nrmse"] <= 0.15
    assert m["peaks_non_increasing"]
    assert elapsed <= 120.0


def test_undamped_oscillator_keeps_its_envelope():
    r, _ = run_default("oscillator-forecast", osc_zeta=0.0)
    amplitude = r.summary.config["osc_amplitude"]
    peaks = np.array(r.summary.metrics["peaks"][:2])
    print(f"undamped forecast peaks {peaks}")
    assert np.all(np.abs(peaks - amplitude) <= 0.2 * amplitude)


# 10 ------------------------------------------------------------------------

@acceptance(10, "default two-g_z demo shows an oscillating and a frozen trace, under 5 s")
def test_zeno_regimes():
    r, elapsed = run_default("zeno-demo")
    swings = sorted(r.summary.metrics.values())
    print(f"peak-to-peak excursions {swings}")
    assert swings[0] < 0.1 and swings[-1] > 0.5
    assert elapsed < 5.0


# 11 ------------------------------------------------------------------------

@acceptance(11, "every experiment reproduces its CSV byte for byte")
@pytest.mark.parametrize("name", EXPERIMENTS)
def test_determinism(name, tmp_path):
    first, _ = run_default(name)
    second = run_experiment(build_config(name))
    write_csv(first, tmp_path / "first.csv")
    write_csv(second, tmp_path / "second.csv")
    assert (tmp_path / "first.csv").read_bytes() == (tmp_path / "second.csv").read_bytes()
