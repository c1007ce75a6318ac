"""Driven atom in a lossy cavity: operators, Hamiltonian and Lindblad evolution.

The joint space is a truncated Fock ladder (``n = 0 .. n_fock-1``) tensored
with a two-level atom.  Basis index ``2*n + sigma`` enumerates ``|n, sigma>``,
where ``sigma = 0`` is the ground state ``|up>`` and ``sigma = 1`` is the
excited state ``|down>``.  ``sigma_plus`` raises ``|up> -> |down>``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    IntegrationError,
    TraceDriftWarning,
    TruncationError,
    TruncationWarning,
    ValidationError,
)
from .linalg import adjoint, max_hermitian_defect

GROUND = 0
EXCITED = 1

DEFAULT_DT = 1e-3
TRACE_TOL = 1e-8
TRACE_FAIL = 1e-5
TRUNCATION_GUARD = 1e-3


@dataclass(frozen=True)
class FockQubitSpace:
    n_fock: int

    def __post_init__(self):
        if int(self.n_fock) != self.n_fock or self.n_fock < 2:
            raise ValidationError(f"n_fock must be an integer >= 2, got {self.n_fock}")

    @property
    def dim(self) -> int:
        return 2 * self.n_fock

    def index(self, n: int, sigma: int) -> int:
        if not (0 <= n < self.n_fock and sigma in (GROUND, EXCITED)):
            raise ValidationError(f"|{n},{sigma}> is outside the truncated space")
        return 2 * n + sigma


@dataclass(frozen=True, eq=False)
class OperatorSet:
    space: FockQubitSpace
    kappa: float
    a: np.ndarray
    a_dag: np.ndarray
    sigma_minus: np.ndarray
    sigma_plus: np.ndarray
    number_op: np.ndarray
    atom_excitation: np.ndarray
    collapse: np.ndarray

    @property
    def dim(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class HamiltonianParams:
    """Coupling ``g``, atomic drive ``g_z``, cavity drive ``beta``, decay ``kappa``."""

    g: float
    g_z: float
    beta: float
    kappa: float

    def __post_init__(self):
        for name in ("g", "g_z", "beta", "kappa"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")


def build_operators(space: FockQubitSpace, kappa: float) -> OperatorSet:
    if not math.isfinite(kappa) or kappa < 0:
        raise ValidationError(f"kappa must be finite and >= 0, got {kappa}")
    nf = space.n_fock
    a_fock = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), 1).astype(complex)
    # sigma_minus = |up><down|
    sm = np.zeros((2, 2), dtype=complex)
    sm[GROUND, EXCITED] = 1.0
    a = np.kron(a_fock, np.eye(2))
    sigma_minus = np.kron(np.eye(nf), sm)
    a_dag = adjoint(a)
    sigma_plus = adjoint(sigma_minus)
    ops = OperatorSet(
        space=space,
        kappa=float(kappa),
        a=a,
        a_dag=a_dag,
        sigma_minus=sigma_minus,
        sigma_plus=sigma_plus,
        number_op=a_dag @ a,
        atom_excitation=sigma_plus @ sigma_minus,
        collapse=math.sqrt(kappa) * a,
    )
    for arr in (ops.a, ops.a_dag, ops.sigma_minus, ops.sigma_plus,
                ops.number_op, ops.atom_excitation, ops.collapse):
        arr.setflags(write=False)
    return ops


def hamiltonian(ops: OperatorSet, params: HamiltonianParams) -> np.ndarray:
    """``g a^dag a sm sp - i beta (a^dag - a) + g_z (sp + sm)``."""
    interaction = params.g * (ops.number_op @ (ops.sigma_minus @ ops.sigma_plus))
    cavity_drive = -1j * params.beta * (ops.a_dag - ops.a)
    atom_drive = params.g_z * (ops.sigma_plus + ops.sigma_minus)
    return interaction + cavity_drive + atom_drive


def lindblad_rhs(rho, H, C) -> np.ndarray:
    """Dense right-hand side ``-i[H, rho] + C rho C^dag - {C^dag C, rho}/2``."""
    rho = np.asarray(rho)
    H = np.asarray(H)
    C = np.asarray(C)
    if not (rho.shape == H.shape == C.shape) or rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(
            f"shape mismatch: rho {rho.shape}, H {H.shape}, C {C.shape}")
    Cd = adjoint(C)
    CdC = Cd @ C
    return (-1j * (H @ rho - rho @ H) + C @ rho @ Cd
            - 0.5 * (CdC @ rho) - 0.5 * (rho @ CdC))


def basis_state(space: FockQubitSpace, n: int = 0, sigma: int = GROUND) -> np.ndarray:
    """Pure density matrix ``|n, sigma><n, sigma|``."""
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    k = space.index(n, sigma)
    rho[k, k] = 1.0
    return rho


def vacuum_ground(space: FockQubitSpace) -> np.ndarray:
    return basis_state(space, 0, GROUND)


def density_defects(rho) -> dict:
    """Hermiticity defect, trace error and smallest eigenvalue of ``rho``."""
    rho = np.asarray(rho)
    herm = 0.5 * (rho + rho.conj().T)
    return {
        "hermiticity": max_hermitian_defect(rho),
        "trace_error": abs(np.trace(rho) - 1.0),
        "min_eigenvalue": float(np.linalg.eigvalsh(herm)[0]),
    }


def check_density_matrix(rho, herm_tol=1e-9, trace_tol=TRACE_TOL, psd_tol=1e-8) -> None:
    d = density_defects(rho)
    if d["hermiticity"] > herm_tol:
        raise ValidationError(f"density matrix not Hermitian (defect {d['hermiticity']:.2e})")
    if d["trace_error"] > trace_tol:
        raise ValidationError(f"density matrix trace off by {d['trace_error']:.2e}")
    if d["min_eigenvalue"] < -psd_tol:
        raise ValidationError(f"density matrix not PSD (min eigenvalue {d['min_eigenvalue']:.2e})")


def integrate(rho0, H, C, dt: float, n_steps: int) -> np.ndarray:
    """Raw fixed-step RK4 of the Lindblad equation, without any checks."""
    H = np.asarray(H, dtype=complex)
    C = np.asarray(C, dtype=complex)
    heff = H - 0.5j * (adjoint(C) @ C)
    hc, hv = _kernels.row_tables(heff)
    cc, cv = _kernels.row_tables(C)
    rho0 = np.ascontiguousarray(rho0, dtype=complex)
    return _kernels.rk4_lindblad(rho0, hc, hv, cc, cv, float(dt), int(n_steps))


def top_level_population(rho, space: FockQubitSpace) -> float:
    d = np.real(np.diagonal(rho))
    return float(d[-2] + d[-1]) if space.n_fock else 0.0


def evolve(rho0, params: HamiltonianParams, ops: OperatorSet,
           dt: float = DEFAULT_DT, n_steps: int = 0, strict: bool = False) -> np.ndarray:
    """Propagate ``rho0`` for ``n_steps`` RK4 steps of size ``dt`` at fixed ``params``.

    Trace drift above 1e-5 raises IntegrationError.  Drift above 1e-8 emits a
    TraceDriftWarning (an error when ``strict``); the returned state is then
    divided by its trace.  A top Fock level population above 1e-3 emits a
    TruncationWarning, or raises TruncationError when ``strict``.
    """
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if int(n_steps) != n_steps or n_steps < 0:
        raise ValidationError(f"n_steps must be a non-negative integer, got {n_steps}")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (ops.dim, ops.dim):
        raise ValidationError(f"state shape {rho0.shape} does not match dim {ops.dim}")
    if params.kappa != ops.kappa:
        raise ValidationError("params.kappa differs from the collapse operator's kappa")
    if n_steps == 0:
        return rho0.copy()

    rho = integrate(rho0, hamiltonian(ops, params), ops.collapse, dt, n_steps)
    if not np.all(np.isfinite(rho)):
        raise IntegrationError("non-finite density matrix; dt is too large")
    tr = np.trace(rho).real
    drift = abs(tr - np.trace(rho0).real)
    if drift > TRACE_FAIL:
        raise IntegrationError(f"trace drift {drift:.2e} exceeds {TRACE_FAIL:g}; dt is too large")
    if drift > TRACE_TOL:
        if strict:
            raise IntegrationError(f"trace drift {drift:.2e} exceeds {TRACE_TOL:g}")
        warnings.warn(f"trace drift {drift:.2e} renormalised", TraceDriftWarning, stacklevel=2)
    if tr != 1.0:
        rho /= tr

    top = top_level_population(rho, ops.space)
    if top > TRUNCATION_GUARD:
        msg = (f"top Fock level n={ops.space.n_fock - 1} holds population {top:.2e}; "
               "increase n_fock")
        if strict:
            raise TruncationError(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=2)
    return rho


def occupations(rho, space: FockQubitSpace | None = None) -> np.ndarray:
    """Occupation probabilities ``P(n, sigma)`` in basis order."""
    rho = np.asarray(rho)
    if space is not None and rho.shape != (space.dim, space.dim):
        raise ValidationError("state does not match the space dimension")
    return np.real(np.diagonal(rho)).copy()


def expectation(rho, O) -> complex:
    """``Tr(rho O)``."""
    rho = np.asarray(rho)
    O = np.asarray(O)
    if rho.shape != O.shape or rho.ndim != 2:
        raise ValidationError(f"shape mismatch: rho {rho.shape}, O {O.shape}")
    # Tr(rho O) = sum_ij rho_ij O_ji
    return complex(np.sum(rho * O.T))
