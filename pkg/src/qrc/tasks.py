"""Benchmark datasets and figures of merit.

* sine/square waveform classification
* Mackey-Glass chaotic series (delay differential equation)
* damped harmonic oscillator
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrationError, ValidationError
from .rng import SplitMix64

SQUARE = 0
SINE = 1


@dataclass
class LabeledWaveform:
    samples: np.ndarray
    labels: np.ndarray
    segment_boundaries: list[int] = field(default_factory=list)

    @property
    def n_segments(self) -> int:
        return len(self.segment_boundaries)


@dataclass
class TimeSeries:
    values: np.ndarray
    dt: float

    def __len__(self):
        return len(self.values)


def _sine_period(pts: int) -> np.ndarray:
    s = np.sin(2.0 * np.pi * np.arange(pts) / pts)
    # sin(pi) and friends are exact zeros, not +-1e-16
    s[np.abs(s) < 1e-12] = 0.0
    return s


def gen_sine_square(n_segments: int, pts_per_segment: int = 8,
                    rng_seed: int = 0) -> LabeledWaveform:
    """Random concatenation of one-period sine and square segments.

    Each segment is a sine (label 1) or a square wave (label 0) with
    probability 1/2.  The square wave is the sign of the sine with
    ``sign(0) = +1``.
    """
    if n_segments < 1 or pts_per_segment < 4:
        raise ValidationError("need n_segments >= 1 and pts_per_segment >= 4")
    rng = SplitMix64(rng_seed)
    sine = _sine_period(pts_per_segment)
    square = np.where(sine >= 0.0, 1.0, -1.0)
    samples, labels, bounds = [], [], []
    for k in range(n_segments):
        kind = rng.bit()
        bounds.append(k * pts_per_segment)
        samples.append(sine if kind == SINE else square)
        labels.append(np.full(pts_per_segment, kind, dtype=np.int64))
    return LabeledWaveform(np.concatenate(samples), np.concatenate(labels), bounds)


@dataclass(frozen=True)
class MGTSParams:
    tau: float = 17.0
    q: float = 10.0
    beta_mgts: float = 0.2
    gamma_mgts: float = 0.1
    dt: float = 0.1
    history_value: float = 1.2
    spacing: float = 1.0
    transient: float = 500.0

    def __post_init__(self):
        if not (self.tau > 0 and self.dt > 0 and self.spacing > 0 and self.transient >= 0):
            raise ValidationError("tau, dt, spacing must be positive and transient >= 0")
        lag = self.tau / self.dt
        if abs(lag - round(lag)) > 1e-9:
            raise ValidationError("dt must divide tau exactly")
        sub = self.spacing / self.dt
        if abs(sub - round(sub)) > 1e-9:
            raise ValidationError("dt must divide the sample spacing exactly")
        skip = self.transient / self.dt
        if abs(skip - round(skip)) > 1e-9:
            raise ValidationError("dt must divide the transient exactly")


def gen_mackey_glass(n_points: int, params: MGTSParams = MGTSParams()) -> TimeSeries:
    """Integrate the Mackey-Glass equation with RK4 and a ring-buffered history.

    The delayed argument at the RK4 half step falls midway between two stored
    samples and is evaluated by cubic Hermite interpolation from their values
    and slopes, which keeps the scheme fourth-order accurate.  The first
    ``params.transient`` time units are dropped, then one value is kept every
    ``params.spacing`` time units.
    """
    if n_points < 1:
        raise ValidationError("n_points must be >= 1")
    p = params
    dt = p.dt
    lag = int(round(p.tau / dt))
    sub = int(round(p.spacing / dt))
    skip = int(round(p.transient / dt))
    b, g, q = p.beta_mgts, p.gamma_mgts, p.q

    def f(x, xd):
        return b * xd / (1.0 + xd ** q) - g * x

    x0 = float(p.history_value)
    # xs[0] = x(t - tau), xs[-1] = x(t).  Slopes are kept from both sides of
    # each sample because the constant history has a kink at t = 0.
    xs = deque([x0] * (lag + 1), maxlen=lag + 1)
    slope_right = deque([0.0] * (lag + 1), maxlen=lag + 1)
    slope_left = deque([0.0] * (lag + 1), maxlen=lag + 1)
    slope_right[-1] = f(x0, x0)
    out = np.empty(n_points)
    n_total = skip + (n_points - 1) * sub
    k = 0
    if skip == 0:
        out[0] = x0
        k = 1
    h = 0.5 * dt
    for step in range(1, n_total + 1):
        x = xs[-1]
        xd0, xd1 = xs[0], xs[1]
        xdh = 0.5 * (xd0 + xd1) + 0.125 * dt * (slope_right[0] - slope_left[1])
        k1 = f(x, xd0)
        k2 = f(x + h * k1, xdh)
        k3 = f(x + h * k2, xdh)
        k4 = f(x + dt * k3, xd1)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(x):
            raise IntegrationError(f"Mackey-Glass state became non-finite at step {step}")
        xs.append(x)
        slope = f(x, xs[0])
        slope_right.append(slope)
        slope_left.append(slope)
        if step >= skip and (step - skip) % sub == 0:
            out[k] = x
            k += 1
    return TimeSeries(out, p.spacing)


@dataclass(frozen=True)
class OscillatorParams:
    amplitude: float = 1.0
    omega: float = 2.0 * math.pi / 50.0
    zeta: float = 0.005
    phase: float = 0.0
    dt: float = 1.0
    n_points: int = 600

    def __post_init__(self):
        if not (self.omega > 0 and self.zeta >= 0 and self.dt > 0 and self.n_points >= 1):
            raise ValidationError("need omega > 0, zeta >= 0, dt > 0, n_points >= 1")

    @property
    def period_samples(self) -> float:
        return 2.0 * math.pi / (self.omega * self.dt)


def gen_damped_oscillator(params: OscillatorParams = OscillatorParams()) -> TimeSeries:
    t = np.arange(params.n_points) * params.dt
    x = params.amplitude * np.exp(-params.zeta * t) * np.cos(params.omega * t + params.phase)
    return TimeSeries(x, params.dt)


def nrmse(y, y_hat) -> float:
    """RMSE normalised by the range of the target ``y``."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.ndim != 1 or y.size == 0:
        raise ValidationError("nrmse needs two equal-length non-empty vectors")
    span = y.max() - y.min()
    if not span > 0:
        raise ValidationError("target is constant; its range is zero")
    return float(np.sqrt(np.mean((y - y_hat) ** 2)) / span)


def accuracy(y, y_hat, epsilon: float = 1e-2) -> float:
    """Percentage of predictions within ``epsilon`` of the target."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.ndim != 1 or y.size == 0:
        raise ValidationError("accuracy needs two equal-length non-empty vectors")
    return float(100.0 * np.count_nonzero(np.abs(y - y_hat) < epsilon) / y.size)
