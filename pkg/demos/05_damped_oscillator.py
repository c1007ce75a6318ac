"""
Forecasting a damped oscillator
===============================

A slowly decaying cosine is used for training on its first 60 %.  The free
running reservoir should keep the period and carry on the decay, at least for
the first few periods.  Setting the damping to zero gives a control case with
a constant envelope.
"""
from qrc.config import build_config
from qrc.experiments import forecast, peak_envelope
from qrc.tasks import gen_damped_oscillator, nrmse

for zeta in (0.005, 0.0):
    cfg = build_config("oscillator-forecast", overrides={"osc_zeta": zeta})
    op = cfg.oscillator_params()
    x = gen_damped_oscillator(op).values
    n_train = int(round(cfg.osc_train_fraction * x.size))
    r = forecast(cfg, x[:n_train], x.size - n_train)
    pred, truth = r["prediction"], x[n_train:]
    period = op.period_samples
    n2 = int(round(2 * period))

    print(f"zeta = {zeta:g}: period {period:.1f} samples, {n_train} training samples")
    print(f"  NRMSE over two periods: {nrmse(truth[:n2], pred[:n2]):.4f}")
    print("  peaks per period, truth:   ", [round(float(p), 3) for p in peak_envelope(truth, period, 4)])
    print("  peaks per period, forecast:", [round(float(p), 3) for p in peak_envelope(pred, period, 4)])
