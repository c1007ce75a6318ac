"""Experiment configuration: flat ``key = value`` files plus CLI overrides.

Every key is a field of :class:`ExperimentConfig`; dashes and underscores are
interchangeable.  Resolution order: dataclass defaults, per-experiment
defaults, config file, command-line overrides.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import typing
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ValidationError
from .reservoir import ReservoirConfig
from .tasks import MGTSParams, OscillatorParams

EXPERIMENTS = (
    "zeno-demo",
    "beta-sweep",
    "classify",
    "gz-sweep",
    "neurons-sweep",
    "mgts-forecast",
    "train-length-sweep",
    "oscillator-forecast",
)

# keys that only affect where/how fast results are produced
_NON_SEMANTIC = ("out", "workers")


@dataclass
class ExperimentConfig:
    experiment: str = "classify"
    seed: int = 42
    out: str = "."
    strict: bool = False
    reset_state: bool = False
    workers: int = 1
    check_memory: bool = True

    # reservoir
    n_neurons: int = 16
    n_fock: typing.Optional[int] = None
    g: float = 5.0
    g_z: float = 5.0
    kappa: float = 18.0
    beta_min: float = 10.0
    beta_max: float = 15.0
    u_min: typing.Optional[float] = None
    u_max: typing.Optional[float] = None
    t_input: float = 0.3
    rk4_dt: float = 1e-3
    washout: int = 50
    ridge_lambda: float = 0.0
    use_bias: bool = True

    # zeno-demo
    zeno_gz: list[float] = field(default_factory=lambda: [0.5, 5.0])
    zeno_beta: float = 15.0
    zeno_t_max: float = 2.0
    zeno_samples: int = 201

    # beta-sweep
    beta_start: float = 0.0
    beta_stop: float = 20.0
    beta_step: float = 0.5
    probe_time: typing.Optional[float] = None

    # classification tasks
    n_segments: int = 150
    pts_per_segment: int = 8
    train_fraction: float = 0.7
    epsilon: float = 1e-2
    threshold: float = 0.5
    shuffle_labels: bool = False
    gz_grid: list[float] = field(
        default_factory=lambda: [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 14.0, 20.0])
    neurons_grid: list[int] = field(default_factory=lambda: [4, 8, 12, 16, 20, 24])

    # Mackey-Glass tasks
    train_length: int = 1000
    forecast_length: int = 300
    score_steps: int = 100
    length_grid: list[int] = field(
        default_factory=lambda: [100, 200, 300, 500, 700, 1000, 1500])
    mg_tau: float = 17.0
    mg_dt: float = 0.1
    mg_history: float = 1.2
    mg_spacing: float = 1.0
    mg_transient: float = 500.0

    # oscillator task
    osc_amplitude: float = 1.0
    osc_omega: float = 0.12566370614359174
    osc_zeta: float = 0.005
    osc_phase: float = 0.0
    osc_dt: float = 1.0
    osc_points: int = 600
    osc_train_fraction: float = 0.6
    score_periods: float = 2.0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(
                f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        if not 0 < self.train_fraction < 1 or not 0 < self.osc_train_fraction < 1:
            raise ValidationError("train fractions must lie in (0, 1)")

    def reservoir(self, **changes) -> ReservoirConfig:
        """ReservoirConfig for this experiment; ``changes`` override fields."""
        kw = dict(
            n_neurons=self.n_neurons, n_fock=self.n_fock, g=self.g, g_z=self.g_z,
            kappa=self.kappa, beta_min=self.beta_min, beta_max=self.beta_max,
            u_min=-1.0 if self.u_min is None else self.u_min,
            u_max=1.0 if self.u_max is None else self.u_max,
            t_input=self.t_input, rk4_dt=self.rk4_dt, washout=self.washout,
            ridge_lambda=self.ridge_lambda, use_bias=self.use_bias, strict=self.strict,
        )
        if "n_neurons" in changes and "n_fock" not in changes:
            changes["n_fock"] = None
        kw.update(changes)
        return ReservoirConfig(**kw)

    def mgts_params(self) -> MGTSParams:
        return MGTSParams(tau=self.mg_tau, dt=self.mg_dt, history_value=self.mg_history,
                          spacing=self.mg_spacing, transient=self.mg_transient)

    def oscillator_params(self, **changes) -> OscillatorParams:
        kw = dict(amplitude=self.osc_amplitude, omega=self.osc_omega, zeta=self.osc_zeta,
                  phase=self.osc_phase, dt=self.osc_dt, n_points=self.osc_points)
        kw.update(changes)
        return OscillatorParams(**kw)

    def resolved(self) -> dict:
        """All fields in declaration order."""
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def config_hash(self) -> str:
        data = {k: v for k, v in self.resolved().items() if k not in _NON_SEMANTIC}
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


# Per-experiment defaults.  The forecasting tasks need a more strongly coupled
# reservoir than the classification tasks.  Values were picked by free-running
# forecasts on validation stretches that the scored runs never use (Mackey-Glass
# samples 2000-2900, phase-shifted oscillators).
_MGTS_RESERVOIR = dict(g=53.517, g_z=4.16, kappa=24.0, beta_min=10.898, beta_max=16.847,
                       t_input=0.35, ridge_lambda=1e-7)

EXPERIMENT_DEFAULTS: dict[str, dict] = {
    "mgts-forecast": dict(_MGTS_RESERVOIR),
    "train-length-sweep": dict(_MGTS_RESERVOIR),
    "oscillator-forecast": dict(g=48.85, g_z=3.255, kappa=24.0, beta_min=13.233,
                                beta_max=16.616, t_input=0.3),
}


_FIELD_TYPES = typing.get_type_hints(ExperimentConfig)


def _normalise_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


def _convert(key: str, value):
    if key not in _FIELD_TYPES:
        raise ValidationError(f"unknown configuration key {key!r}")
    tp = _FIELD_TYPES[key]
    if not isinstance(value, str):
        return value
    text = value.strip()
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    try:
        if origin is typing.Union and type(None) in args:
            if text.lower() in ("", "none", "auto"):
                return None
            inner = next(a for a in args if a is not type(None))
            return inner(text)
        if origin is list:
            item = args[0]
            return [item(p) for p in text.replace(";", ",").split(",") if p.strip()]
        if tp is bool:
            return _parse_bool(text)
        if tp is int:
            as_float = float(text)
            if as_float != int(as_float):
                raise ValueError
            return int(as_float)
        return tp(text)
    except (ValueError, TypeError, StopIteration):
        raise ValidationError(f"invalid value for {key}: {value!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = _normalise_key(key)
        out[key] = _convert(key, value)
    return out


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from None
    return parse_config_text(text)


def build_config(experiment: str, file_values: dict | None = None,
                 overrides: dict | None = None) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ValidationError(
            f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    values = dict(EXPERIMENT_DEFAULTS.get(experiment, {}))
    for source in (file_values or {}, overrides or {}):
        for k, v in source.items():
            key = _normalise_key(k)
            values[key] = _convert(key, v)
    values["experiment"] = experiment
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None


def replace_config(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return dataclasses.replace(cfg, **changes)
