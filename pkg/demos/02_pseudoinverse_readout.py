"""
Least-squares readouts with a Jacobi SVD
========================================

The reservoir readout is a linear map fitted by a Moore-Penrose
pseudoinverse.  The pseudoinverse here is built on a one-sided Jacobi SVD;
this script checks it against the four defining conditions and shows the
effect of ridge regularisation.
"""
import numpy as np

from qrc.linalg import pseudoinverse, svd
from qrc import reservoir as res

rng = np.random.default_rng(0)

# a rank-2 complex 5x7 matrix
M = (rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))) @ rng.normal(size=(2, 7))
U, s, Vh = svd(M)
print("singular values:", np.array2string(s, precision=3))

P = pseudoinverse(M)
checks = {
    "M P M = M": np.abs(M @ P @ M - M).max(),
    "P M P = P": np.abs(P @ M @ P - P).max(),
    "(M P)^H = M P": np.abs((M @ P).conj().T - M @ P).max(),
    "(P M)^H = P M": np.abs((P @ M).conj().T - P @ M).max(),
}
for name, err in checks.items():
    print(f"{name:15s} max error {err:.1e}")

# Readout training on a short-and-wide feature matrix, as produced by a
# reservoir: 9 features (8 neurons + bias) by 200 samples.
F = np.vstack([rng.random((8, 200)), np.ones(200)])
y = np.sin(np.arange(200) / 7.0)
cfg = res.ReservoirConfig(n_neurons=8)
print("\nridge lambda   residual   max |W|")
for lam in (0.0, 1e-4, 1e-1, 1e1, 1e3):
    model = res.train(F, y, cfg.with_(ridge_lambda=lam))
    print(f"{lam:10.0e}   {model.residual:8.4f}   {np.abs(model.W).max():8.4f}")
