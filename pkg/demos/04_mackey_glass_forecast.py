"""
Free-running Mackey-Glass forecast
==================================

The reservoir is trained to map each Mackey-Glass sample to the next one.
After training the readout output is fed back as the next input, so the
reservoir generates the series on its own without ever seeing the truth.
"""
import numpy as np

from qrc.config import build_config
from qrc.experiments import forecast, mgts_series
from qrc.tasks import nrmse

cfg = build_config("mgts-forecast")
print(f"reservoir: g={cfg.g:g}, g_z={cfg.g_z:g}, kappa={cfg.kappa:g}, "
      f"beta in [{cfg.beta_min:g}, {cfg.beta_max:g}], t_input={cfg.t_input:g}")

x = mgts_series(cfg, cfg.train_length + cfg.forecast_length)
train, truth = x[:cfg.train_length], x[cfg.train_length:]
print(f"series: tau={cfg.mg_tau:g}, sample spacing {cfg.mg_spacing:g}, "
      f"range [{x.min():.3f}, {x.max():.3f}]")

r = forecast(cfg, train, cfg.forecast_length)
pred = r["prediction"]
print(f"one-step training error (NRMSE): {r['train_nrmse']:.4f}")

# errors compound once the loop is closed
for n in (25, 50, 100, 200, 300):
    print(f"first {n:3d} free-running steps: NRMSE {nrmse(truth[:n], pred[:n]):.3f}")

print("\nstep   truth   forecast")
for k in range(0, 100, 10):
    print(f"{k:4d}   {truth[k]:.3f}   {pred[k]:.3f}")
print("diverged:", r["diverged"])
