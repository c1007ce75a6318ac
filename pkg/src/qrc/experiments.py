"""End-to-end experiments: each returns CSV rows plus a run summary.

All experiments are deterministic for a fixed configuration.  Datasets are
drawn from the seeded SplitMix64 generator; the quantum evolution itself
consumes no randomness.
"""
from __future__ import annotations

import json
import math
import re
import time
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import quantum
from . import reservoir as res
from .config import ExperimentConfig, replace_config
from .errors import NumericalError, QRCWarning, ValidationError
from .rng import SplitMix64
from .tasks import (
    accuracy,
    gen_damped_oscillator,
    gen_mackey_glass,
    gen_sine_square,
    nrmse,
)

FADING_TOL = 1e-3
FADING_INPUTS = 20


@dataclass
class RunSummary:
    experiment: str
    config: dict
    config_hash: str
    metrics: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    warnings: list = field(default_factory=list)

    def to_json(self) -> str:
        data = {
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "config": self.config,
            "metrics": {k: _json_number(v) for k, v in self.metrics.items()},
            "wall_clock_s": self.wall_clock_s,
            "warnings": list(self.warnings),
        }
        return json.dumps(data, indent=2, allow_nan=False)


@dataclass
class ExperimentResult:
    columns: list
    rows: list
    summary: RunSummary

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)


def _json_number(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _json_number(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_number(x) for x in v]
    return v


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(result: ExperimentResult, path) -> None:
    lines = [f"# qrc {result.summary.experiment} config_sha256={result.summary.config_hash}",
             ",".join(result.columns)]
    lines += [",".join(format_value(v) for v in row) for row in result.rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_outputs(result: ExperimentResult, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = result.summary.experiment
    csv_path = out / f"{name}.csv"
    json_path = out / f"{name}.summary.json"
    write_csv(result, csv_path)
    json_path.write_text(result.summary.to_json() + "\n", encoding="utf-8")
    return csv_path, json_path


# ---------------------------------------------------------------------------
# shared pieces


def _map_grid(fn, points, workers: int):
    """Evaluate ``fn`` over ``points``; results come back in grid order."""
    if workers <= 1 or len(points) <= 1:
        return [fn(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def check_fading_memory(rcfg: res.ReservoirConfig, ops=None) -> float:
    """Worst fading-memory gap over the lowest, middle and highest input."""
    ops = ops or res.make_operators(rcfg)
    mid = 0.5 * (rcfg.u_min + rcfg.u_max)
    gap = max(res.fading_memory_gap(rcfg, ops, u, n_inputs=FADING_INPUTS)
              for u in (rcfg.u_min, mid, rcfg.u_max))
    if gap >= FADING_TOL:
        raise ValidationError(
            f"reservoir lacks fading memory: activations of two initial states still differ "
            f"by {gap:.2e} after {FADING_INPUTS} identical inputs")
    return gap


_NUMBER = re.compile(r"[-+]?\d[\d.]*(?:e[-+]?\d+)?")


def _summarise_warnings(caught) -> list[str]:
    """One line per distinct warning; messages differing only in numbers merge."""
    counts = Counter()
    first = {}
    for w in caught:
        key = (w.category.__name__, _NUMBER.sub("#", str(w.message)))
        counts[key] += 1
        first.setdefault(key, str(w.message))
    return [f"{key[0]} x{n}: {first[key]}" for key, n in counts.items()]


# ---------------------------------------------------------------------------
# physics demos


def _zeno_trace(cfg: ExperimentConfig, gz: float) -> list[tuple]:
    space = quantum.FockQubitSpace(
        cfg.n_fock or res.default_n_fock(cfg.n_neurons, cfg.zeno_beta, cfg.kappa))
    ops = quantum.build_operators(space, cfg.kappa)
    params = quantum.HamiltonianParams(cfg.g, gz, cfg.zeno_beta, cfg.kappa)
    n = max(cfg.zeno_samples, 2)
    dt_sample = cfg.zeno_t_max / (n - 1)
    steps = int(round(dt_sample / cfg.rk4_dt))
    if abs(steps * cfg.rk4_dt - dt_sample) > 1e-9 * max(1.0, dt_sample):
        raise ValidationError("zeno sample spacing must be a multiple of rk4_dt")
    rho = quantum.vacuum_ground(space)
    rows = []
    for k in range(n):
        if k:
            rho = quantum.evolve(rho, params, ops, cfg.rk4_dt, steps, strict=cfg.strict)
        rows.append((k * dt_sample, gz, quantum.expectation(rho, ops.atom_excitation).real))
    return rows


def run_zeno_demo(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    if len(cfg.zeno_gz) < 2:
        raise ValidationError("zeno-demo needs at least two g_z values")
    rows, metrics = [], {}
    for gz in cfg.zeno_gz:
        trace = _zeno_trace(cfg, gz)
        vals = [r[2] for r in trace]
        metrics[f"peak_to_peak_gz_{gz:g}"] = max(vals) - min(vals)
        rows += trace
    return ["time", "gz", "expectation"], rows, metrics


def run_beta_sweep(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    rcfg = cfg.reservoir()
    if rcfg.n_fock < 3:
        raise ValidationError("beta-sweep needs at least three Fock levels")
    ops = res.make_operators(rcfg)
    probe = rcfg.t_input if cfg.probe_time is None else cfg.probe_time
    steps = int(round(probe / rcfg.rk4_dt))
    n_beta = int(math.floor((cfg.beta_stop - cfg.beta_start) / cfg.beta_step + 1e-9)) + 1
    cols = ["beta"] + [f"P_{n}_{s}" for n in range(3) for s in range(2)]
    rows = []
    for k in range(n_beta):
        beta = cfg.beta_start + k * cfg.beta_step
        rho = quantum.evolve(quantum.vacuum_ground(rcfg.space), rcfg.params(beta), ops,
                             rcfg.rk4_dt, steps, strict=cfg.strict)
        rows.append((beta, *quantum.occupations(rho)[:6]))
    in_window = [r for r in rows if 10.0 <= r[0] <= 15.0]
    metrics = {"min_peak_occupation_beta_10_15":
               min(max(r[i] for r in in_window) for i in range(1, 7)) if in_window else float("nan")}
    return cols, rows, metrics


# ---------------------------------------------------------------------------
# classification


def classification_split(cfg: ExperimentConfig) -> int:
    """Number of training segments; the split never cuts a segment."""
    n_train = int(round(cfg.train_fraction * cfg.n_segments))
    return min(max(n_train, 1), cfg.n_segments - 1)


def classify_once(cfg: ExperimentConfig, **reservoir_changes) -> dict:
    """Train on the leading segments and score the held-out tail."""
    wave = gen_sine_square(cfg.n_segments, cfg.pts_per_segment, cfg.seed)
    rcfg = cfg.reservoir(**reservoir_changes)
    ops = res.make_operators(rcfg)
    n_train = classification_split(cfg) * cfg.pts_per_segment
    u_train, u_test = wave.samples[:n_train], wave.samples[n_train:]
    y = wave.labels.astype(float)
    y_train = y[rcfg.washout:n_train]
    if cfg.shuffle_labels:
        perm = SplitMix64(cfg.seed ^ 0x5EED).permutation(y_train.size)
        y_train = y_train[perm]
    F, state = res.harvest(u_train, rcfg, ops, res.initial_state(rcfg))
    model = res.train(F, y_train, rcfg)
    if cfg.reset_state:
        state = res.initial_state(rcfg)
    out = res.predict_series(model, u_test, rcfg, ops, state)
    y_test = y[n_train:]
    cls = (out >= cfg.threshold).astype(float)
    return {
        "prediction": out,
        "target": y_test,
        "offset": n_train,
        "accuracy": accuracy(y_test, cls, cfg.epsilon),
        "nrmse": nrmse(y_test, out),
        "train_accuracy": accuracy(y_train, (model.W[0] @ F >= cfg.threshold).astype(float),
                                   cfg.epsilon),
    }


def run_classify(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    r = classify_once(cfg)
    rows = [(r["offset"] + k, t, p) for k, (t, p) in enumerate(zip(r["target"], r["prediction"]))]
    metrics = {k: r[k] for k in ("accuracy", "nrmse", "train_accuracy")}
    metrics["n_test"] = len(rows)
    return ["sample", "target", "prediction"], rows, metrics


def _gz_point(args):
    cfg, gz = args
    r = classify_once(cfg, g_z=gz)
    return (gz, r["nrmse"], r["accuracy"])


def run_gz_sweep(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    rows = _map_grid(_gz_point, [(cfg, gz) for gz in cfg.gz_grid], cfg.workers)
    best = min(range(len(rows)), key=lambda i: rows[i][1])
    metrics = {"best_gz": rows[best][0], "best_nrmse": rows[best][1],
               "best_is_interior": 0 < best < len(rows) - 1}
    return ["gz", "nrmse", "accuracy"], rows, metrics


def _neurons_point(args):
    cfg, nn = args
    r = classify_once(cfg, n_neurons=nn)
    return (nn, r["nrmse"], r["accuracy"])


def run_neurons_sweep(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    rows = _map_grid(_neurons_point, [(cfg, nn) for nn in cfg.neurons_grid], cfg.workers)
    metrics = {f"accuracy_{r[0]}": r[2] for r in rows}
    return ["n_neurons", "nrmse", "accuracy"], rows, metrics


# ---------------------------------------------------------------------------
# free-running forecasts


def forecast(cfg: ExperimentConfig, train: np.ndarray, n_forecast: int) -> dict:
    """Teacher-forced training on ``train`` followed by a closed-loop forecast.

    The readout is trained to map each sample to its successor.  The first
    forecast value is the readout applied to the final training state, and
    every later value is fed back as the next input.
    """
    lo, hi = float(np.min(train)), float(np.max(train))
    rcfg = cfg.reservoir(u_min=lo if cfg.u_min is None else cfg.u_min,
                         u_max=hi if cfg.u_max is None else cfg.u_max)
    ops = res.make_operators(rcfg)
    inputs, targets = train[:-1], train[1:]
    F, state = res.harvest(inputs, rcfg, ops, res.initial_state(rcfg))
    y_train = targets[rcfg.washout:]
    model = res.train(F, y_train, rcfg)
    train_nrmse = nrmse(y_train, model.W[0] @ F)
    # the last training sample has only served as a target so far
    state, act = res.step(state, train[-1], rcfg, ops)
    preds = np.empty(0)
    diverged = False
    if n_forecast > 0:
        first = float(model.W[0] @ res._feature_column(act, rcfg))
        preds = np.array([first])
        if n_forecast > 1:
            gen = res.run_generative(model, rcfg, ops, state, first, n_forecast - 1)
            preds = np.concatenate([preds, gen.outputs])
            diverged = gen.diverged
    if diverged and cfg.strict:
        raise NumericalError("free-running forecast diverged")
    return {"prediction": preds, "diverged": diverged, "train_nrmse": train_nrmse}


def _forecast_rows(truth: np.ndarray, pred: np.ndarray, offset: int) -> list[tuple]:
    return [(offset + k, truth[k], pred[k]) for k in range(pred.size)]


def mgts_series(cfg: ExperimentConfig, n_points: int) -> np.ndarray:
    return gen_mackey_glass(n_points, cfg.mgts_params()).values


def run_mgts_forecast(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    if cfg.train_length < cfg.washout + 2:
        raise ValidationError("train_length must exceed washout + 1")
    x = mgts_series(cfg, cfg.train_length + cfg.forecast_length)
    train, truth = x[:cfg.train_length], x[cfg.train_length:]
    r = forecast(cfg, train, cfg.forecast_length)
    pred = r["prediction"]
    n_score = min(cfg.score_steps, pred.size)
    metrics = {
        "nrmse": nrmse(truth[:n_score], pred[:n_score]) if n_score > 1 else float("nan"),
        "train_nrmse": r["train_nrmse"],
        "diverged": r["diverged"],
        "n_forecast": int(pred.size),
        "max_abs_excess": float(np.max(np.maximum(pred - truth.max(), truth.min() - pred),
                                       initial=-np.inf)) if pred.size else float("nan"),
    }
    return ["step", "truth", "prediction"], _forecast_rows(truth, pred, cfg.train_length), metrics


def _length_point(args):
    cfg, length, x, t0 = args
    # every training window ends where the shared forecast window begins
    r = forecast(cfg, x[t0 - length:t0], cfg.score_steps)
    truth = x[t0:t0 + cfg.score_steps]
    return (length, nrmse(truth, r["prediction"]) if not r["diverged"] else float("inf"),
            r["train_nrmse"])


def run_train_length_sweep(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    grid = sorted(cfg.length_grid)
    if grid[0] < cfg.washout + 2:
        raise ValidationError("every training length must exceed washout + 1")
    x = mgts_series(cfg, grid[-1] + cfg.score_steps)
    t0 = grid[-1]
    rows = _map_grid(_length_point, [(cfg, n, x, t0) for n in cfg.length_grid], cfg.workers)
    metrics = {f"nrmse_{r[0]}": r[1] for r in rows}
    return ["train_length", "nrmse", "train_nrmse"], rows, metrics


def peak_envelope(y: np.ndarray, period: float, n_periods: int) -> np.ndarray:
    """Largest value inside each of the first ``n_periods`` period-long windows."""
    peaks = []
    for k in range(n_periods):
        lo, hi = int(round(k * period)), int(round((k + 1) * period))
        if hi > y.size or hi <= lo:
            break
        peaks.append(float(np.max(y[lo:hi])))
    return np.array(peaks)


def run_oscillator_forecast(cfg: ExperimentConfig) -> tuple[list, list, dict]:
    op = cfg.oscillator_params()
    x = gen_damped_oscillator(op).values
    n_train = int(round(cfg.osc_train_fraction * x.size))
    if n_train < cfg.washout + 2 or n_train >= x.size:
        raise ValidationError("oscillator training split leaves no usable data")
    train, truth = x[:n_train], x[n_train:]
    r = forecast(cfg, train, truth.size)
    pred = r["prediction"]
    period = op.period_samples
    n_score = min(int(round(cfg.score_periods * period)), pred.size)
    peaks = peak_envelope(pred, period, 3)
    metrics = {
        "nrmse": nrmse(truth[:n_score], pred[:n_score]) if n_score > 1 else float("nan"),
        "train_nrmse": r["train_nrmse"],
        "diverged": r["diverged"],
        "peaks": peaks.tolist(),
        "peaks_non_increasing": bool(peaks.size == 3 and np.all(np.diff(peaks) <= 0)),
    }
    return ["step", "truth", "prediction"], _forecast_rows(truth, pred, n_train), metrics


# ---------------------------------------------------------------------------
# dispatch

RUNNERS = {
    "zeno-demo": run_zeno_demo,
    "beta-sweep": run_beta_sweep,
    "classify": run_classify,
    "gz-sweep": run_gz_sweep,
    "neurons-sweep": run_neurons_sweep,
    "mgts-forecast": run_mgts_forecast,
    "train-length-sweep": run_train_length_sweep,
    "oscillator-forecast": run_oscillator_forecast,
}

# experiments whose base reservoir has to forget its initial state
_RESERVOIR_EXPERIMENTS = ("classify", "gz-sweep", "neurons-sweep", "mgts-forecast",
                          "train-length-sweep", "oscillator-forecast")


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment; warnings are collected into the summary.

    In strict mode any package warning is promoted to an exception.
    """
    t_start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if cfg.strict:
            warnings.simplefilter("error", QRCWarning)
        if cfg.check_memory and cfg.experiment in _RESERVOIR_EXPERIMENTS:
            check_fading_memory(cfg.reservoir())
        columns, rows, metrics = RUNNERS[cfg.experiment](cfg)
    elapsed = time.perf_counter() - t_start
    summary = RunSummary(
        experiment=cfg.experiment,
        config=_json_number(cfg.resolved()),
        config_hash=cfg.config_hash(),
        metrics=metrics,
        wall_clock_s=elapsed,
        warnings=_summarise_warnings([w for w in caught if issubclass(w.category, Warning)]),
    )
    return ExperimentResult(columns, rows, summary)
