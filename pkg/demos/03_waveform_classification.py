"""
Telling sine from square
========================

A random sequence of sine and square periods is fed into the reservoir one
sample at a time.  A linear readout on the occupation probabilities learns to
output 1 on sine samples and 0 on square samples.
"""
import numpy as np

from qrc import reservoir as res
from qrc.tasks import accuracy, gen_sine_square, nrmse

wave = gen_sine_square(n_segments=100, pts_per_segment=8, rng_seed=42)
print("first segment labels:", wave.labels[:16])

cfg = res.ReservoirConfig()          # 16 neurons, g = g_z = 5, kappa = 18
ops = res.make_operators(cfg)
print(f"{cfg.n_neurons} neurons on {cfg.n_fock} Fock levels, "
      f"{cfg.steps_per_input} RK4 steps per input sample")

gap = res.fading_memory_gap(cfg, ops)
print(f"fading memory: two different initial states differ by {gap:.1e} after 20 inputs")

# train on the first 70 segments, test on the remaining 30
split = 70 * 8
F, state = res.harvest(wave.samples[:split], cfg, ops, res.initial_state(cfg))
model = res.train(F, wave.labels[cfg.washout:split].astype(float), cfg)

out = res.predict_series(model, wave.samples[split:], cfg, ops, state)
target = wave.labels[split:].astype(float)
cls = (out >= 0.5).astype(float)
print(f"held-out accuracy {accuracy(target, cls):.1f} %, raw-output NRMSE {nrmse(target, out):.3f}")

print("\nlast two test segments (target, readout):")
for t, y in zip(target[-16:], out[-16:]):
    print(f"  {int(t)}  {y:+.3f}")
