"""Compiled RK4 kernel for the Lindblad equation on row-sparse operators.

Operators are passed as padded per-row (column index, value) tables, which
keeps the cost proportional to the number of nonzeros.  The banded
Fock-qubit operators have at most five nonzeros per row.
"""
import numba
import numpy as np


def row_tables(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pack the nonzeros of a square matrix row by row (zero padded)."""
    d = M.shape[0]
    r, c = np.nonzero(M)
    counts = np.bincount(r, minlength=d)
    width = max(1, int(counts.max()) if counts.size else 1)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    slot = np.arange(r.size) - starts[r]
    cols = np.zeros((d, width), dtype=np.int64)
    vals = np.zeros((d, width), dtype=np.complex128)
    cols[r, slot] = c
    vals[r, slot] = M[r, c]
    return cols, vals


@numba.njit(cache=True)
def _rhs(rho, hc, hv, cc, cv, out):
    # out = -i (Heff rho - rho Heff^dag) + C rho C^dag
    d = rho.shape[0]
    nh = hc.shape[1]
    nc = cc.shape[1]
    for i in range(d):
        for j in range(d):
            acc = 0j
            for p in range(nh):
                acc += hv[i, p] * rho[hc[i, p], j]
                acc -= rho[i, hc[j, p]] * np.conj(hv[j, p])
            acc = -1j * acc
            for p in range(nc):
                cip = cv[i, p]
                if cip == 0:
                    continue
                for q in range(nc):
                    acc += cip * rho[cc[i, p], cc[j, q]] * np.conj(cv[j, q])
            out[i, j] = acc


@numba.njit(cache=True)
def rk4_lindblad(rho0, hc, hv, cc, cv, dt, n_steps):
    d = rho0.shape[0]
    rho = rho0.copy()
    k = np.empty_like(rho)
    acc = np.empty_like(rho)
    tmp = np.empty_like(rho)
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(n_steps):
        _rhs(rho, hc, hv, cc, cv, k)
        for i in range(d):
            for j in range(d):
                acc[i, j] = k[i, j]
                tmp[i, j] = rho[i, j] + half * k[i, j]
        _rhs(tmp, hc, hv, cc, cv, k)
        for i in range(d):
            for j in range(d):
                acc[i, j] += 2.0 * k[i, j]
                tmp[i, j] = rho[i, j] + half * k[i, j]
        _rhs(tmp, hc, hv, cc, cv, k)
        for i in range(d):
            for j in range(d):
                acc[i, j] += 2.0 * k[i, j]
                tmp[i, j] = rho[i, j] + dt * k[i, j]
        _rhs(tmp, hc, hv, cc, cv, k)
        for i in range(d):
            for j in range(d):
                rho[i, j] += sixth * (acc[i, j] + k[i, j])
    return rho
