"""Quantum reservoir: input encoding, feature harvesting, linear readout.

Each input sample sets the cavity drive ``beta`` through an affine map and the
density matrix is evolved for ``t_input`` at that fixed drive.  The neuron
activations are the first ``n_neurons`` occupation probabilities
``P(n, sigma)``; the state carries over between samples.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import quantum
from .errors import DivergenceWarning, NumericalError, ValidationError
from .linalg import pseudoinverse
from .quantum import FockQubitSpace, HamiltonianParams, OperatorSet

GUARD_LEVELS = 4
# largest Poisson weight tolerated on the top retained Fock level
COHERENT_TAIL = 1e-4


def coherent_fock_floor(beta_max: float, kappa: float, tail: float = COHERENT_TAIL) -> int:
    """Fewest Fock levels whose top level carries at most ``tail`` of the
    coherent steady state reached at the strongest drive (``|alpha| = 2 beta / kappa``).
    """
    if kappa <= 0 or beta_max <= 0:
        return 2
    mean = (2.0 * beta_max / kappa) ** 2
    n = max(math.ceil(mean), 1)
    # walk down the Poisson tail from the peak
    while math.exp(n * math.log(mean) - mean - math.lgamma(n + 1)) > tail:
        n += 1
    return n + 1


def default_n_fock(n_neurons: int, beta_max: float, kappa: float) -> int:
    return max(math.ceil(n_neurons / 2) + GUARD_LEVELS, coherent_fock_floor(beta_max, kappa))


@dataclass(frozen=True)
class ReservoirConfig:
    n_neurons: int = 16
    n_fock: int | None = None
    g: float = 5.0
    g_z: float = 5.0
    kappa: float = 18.0
    beta_min: float = 10.0
    beta_max: float = 15.0
    u_min: float = -1.0
    u_max: float = 1.0
    t_input: float = 0.3
    rk4_dt: float = quantum.DEFAULT_DT
    washout: int = 50
    ridge_lambda: float = 0.0
    use_bias: bool = True
    strict: bool = False

    def __post_init__(self):
        if self.n_fock is None:
            object.__setattr__(self, "n_fock",
                               default_n_fock(self.n_neurons, self.beta_max, self.kappa))
        if self.n_neurons < 1 or self.n_neurons > 2 * self.n_fock:
            raise ValidationError(
                f"n_neurons must lie in [1, 2*n_fock]; got {self.n_neurons} with n_fock={self.n_fock}")
        if not self.beta_min < self.beta_max:
            raise ValidationError("beta_min must be below beta_max")
        if not self.u_min < self.u_max:
            raise ValidationError("u_min must be below u_max")
        if not (self.t_input >= 0 and self.rk4_dt > 0):
            raise ValidationError("t_input must be >= 0 and rk4_dt > 0")
        ratio = self.t_input / self.rk4_dt
        if abs(ratio - round(ratio)) > 1e-6 * max(1.0, ratio):
            raise ValidationError("t_input must be an integer multiple of rk4_dt")
        if self.washout < 0 or self.ridge_lambda < 0:
            raise ValidationError("washout and ridge_lambda must be non-negative")
        # HamiltonianParams re-checks these when the reservoir is driven
        HamiltonianParams(self.g, self.g_z, self.beta_min, self.kappa)

    @property
    def space(self) -> FockQubitSpace:
        return FockQubitSpace(self.n_fock)

    @property
    def steps_per_input(self) -> int:
        return int(round(self.t_input / self.rk4_dt))

    @property
    def n_features(self) -> int:
        return self.n_neurons + int(self.use_bias)

    def params(self, beta: float) -> HamiltonianParams:
        return HamiltonianParams(self.g, self.g_z, beta, self.kappa)

    def with_(self, **changes) -> "ReservoirConfig":
        """Copy with ``changes``; a derived ``n_fock`` is re-derived when the
        neuron count or drive range changes."""
        if {"n_neurons", "beta_max", "kappa"} & changes.keys() and "n_fock" not in changes:
            changes["n_fock"] = None
        return replace(self, **changes)


@dataclass
class ReservoirState:
    rho: np.ndarray
    samples_seen: int = 0


@dataclass(frozen=True, eq=False)
class ReadoutModel:
    W: np.ndarray
    use_bias: bool
    n_features: int
    residual: float = 0.0
    target_scale: float = 1.0

    @property
    def n_outputs(self) -> int:
        return self.W.shape[0]


@dataclass
class GenerativeRun:
    outputs: np.ndarray
    diverged: bool
    state: ReservoirState
    inputs: np.ndarray = field(default_factory=lambda: np.empty(0))


def make_operators(cfg: ReservoirConfig) -> OperatorSet:
    return quantum.build_operators(cfg.space, cfg.kappa)


def initial_state(cfg: ReservoirConfig) -> ReservoirState:
    return ReservoirState(quantum.vacuum_ground(cfg.space), 0)


def encode_input(u: float, cfg: ReservoirConfig) -> float:
    """Affine map of ``u`` (clamped to ``[u_min, u_max]``) onto ``[beta_min, beta_max]``."""
    u = min(max(float(u), cfg.u_min), cfg.u_max)
    frac = (u - cfg.u_min) / (cfg.u_max - cfg.u_min)
    return cfg.beta_min + frac * (cfg.beta_max - cfg.beta_min)


def step(state: ReservoirState, u: float, cfg: ReservoirConfig,
         ops: OperatorSet) -> tuple[ReservoirState, np.ndarray]:
    beta = encode_input(u, cfg)
    rho = quantum.evolve(state.rho, cfg.params(beta), ops, cfg.rk4_dt,
                         cfg.steps_per_input, strict=cfg.strict)
    activations = quantum.occupations(rho)[: cfg.n_neurons]
    return ReservoirState(rho, state.samples_seen + 1), activations


def _feature_column(activations: np.ndarray, cfg: ReservoirConfig) -> np.ndarray:
    if cfg.use_bias:
        return np.append(activations, 1.0)
    return activations


def drive(series, cfg: ReservoirConfig, ops: OperatorSet,
          initial: ReservoirState) -> tuple[np.ndarray, ReservoirState]:
    """Feature columns for every sample of ``series`` (no washout)."""
    series = np.asarray(series, dtype=float).ravel()
    F = np.empty((cfg.n_features, series.size))
    state = initial
    for k, u in enumerate(series):
        state, act = step(state, u, cfg, ops)
        F[:, k] = _feature_column(act, cfg)
    return F, state


def harvest(series, cfg: ReservoirConfig, ops: OperatorSet,
            initial: ReservoirState) -> tuple[np.ndarray, ReservoirState]:
    """Feature matrix with the first ``cfg.washout`` columns discarded."""
    series = np.asarray(series, dtype=float).ravel()
    if series.size < cfg.washout + 1:
        raise ValidationError(
            f"series of length {series.size} is too short for washout {cfg.washout}")
    F, state = drive(series, cfg, ops, initial)
    return F[:, cfg.washout:], state


def train(F, Y, cfg: ReservoirConfig) -> ReadoutModel:
    """Least-squares readout ``W`` with ``W F ~ Y``.

    ``ridge_lambda == 0`` uses the Moore-Penrose pseudoinverse of ``F``;
    otherwise the ridge normal equations are solved.
    """
    F = np.asarray(F, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[None, :]
    if F.ndim != 2 or Y.shape[1] != F.shape[1]:
        raise ValidationError(f"column mismatch: F {F.shape}, Y {Y.shape}")
    lam = cfg.ridge_lambda
    if lam == 0:
        W = Y @ pseudoinverse(F).real
    else:
        gram = F @ F.T + lam * np.eye(F.shape[0])
        W = np.linalg.solve(gram, F @ Y.T).T
    if not np.all(np.isfinite(W)):
        raise NumericalError("readout weights are not finite")
    residual = float(np.linalg.norm(W @ F - Y))
    scale = float(np.max(np.abs(Y))) if Y.size else 1.0
    return ReadoutModel(W, cfg.use_bias, F.shape[0], residual, scale)


def _check_model(model: ReadoutModel, cfg: ReservoirConfig) -> None:
    if model.n_features != cfg.n_features or model.use_bias != cfg.use_bias:
        raise ValidationError(
            f"model expects {model.n_features} features, config yields {cfg.n_features}")


def _squeeze(Y: np.ndarray) -> np.ndarray:
    return Y[0] if Y.shape[0] == 1 else Y


def predict_series(model: ReadoutModel, series, cfg: ReservoirConfig, ops: OperatorSet,
                   initial: ReservoirState, return_state: bool = False):
    """Teacher-forced outputs ``W F`` for every sample of ``series``."""
    _check_model(model, cfg)
    F, state = drive(series, cfg, ops, initial)
    out = _squeeze(model.W @ F)
    return (out, state) if return_state else out


def run_generative(model: ReadoutModel, cfg: ReservoirConfig, ops: OperatorSet,
                   state: ReservoirState, seed_input: float, n_steps: int) -> GenerativeRun:
    """Closed-loop forecast where each output is fed back as the next input.

    Stops early, with ``diverged`` set, once ``|y|`` exceeds ten times the
    largest training target.
    """
    _check_model(model, cfg)
    if model.n_outputs != 1:
        raise ValidationError("generative mode needs a single-output readout")
    if n_steps < 1:
        raise ValidationError("n_steps must be >= 1")
    limit = 10.0 * model.target_scale
    w = model.W[0]
    outputs, inputs = [], []
    u = float(seed_input)
    diverged = False
    for _ in range(n_steps):
        state, act = step(state, u, cfg, ops)
        y = float(w @ _feature_column(act, cfg))
        inputs.append(u)
        outputs.append(y)
        if not math.isfinite(y) or abs(y) > limit:
            diverged = True
            warnings.warn(f"generative output {y:.3g} exceeded {limit:.3g}",
                          DivergenceWarning, stacklevel=2)
            break
        u = y
    return GenerativeRun(np.array(outputs), diverged, state, np.array(inputs))


def fading_memory_gap(cfg: ReservoirConfig, ops: OperatorSet, u: float | None = None,
                      n_inputs: int = 20) -> float:
    """Largest activation difference after ``n_inputs`` identical inputs.

    The two runs start from the vacuum with the atom in its ground state and
    from the first excited Fock level with the atom excited.
    """
    if u is None:
        u = 0.5 * (cfg.u_min + cfg.u_max)
    a = initial_state(cfg)
    b = ReservoirState(quantum.basis_state(cfg.space, 1, quantum.EXCITED))
    for _ in range(n_inputs):
        a, act_a = step(a, u, cfg, ops)
        b, act_b = step(b, u, cfg, ops)
    return float(np.max(np.abs(act_a - act_b)))
