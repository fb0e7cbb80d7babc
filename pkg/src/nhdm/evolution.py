"""Von Neumann evolution under a Hermitian reference Hamiltonian.

The deformed states of both models follow a two-step recipe: evolve the
density matrix ``rho0`` with ``d rho0/dt = -i [H0, rho0]`` (hbar = 1) and
then deform with ``R``.  Closed forms are provided for both models, and a
fixed-step RK4 integrator serves as an independent oracle.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .density import DensityMatrix, RieszDM, dm_new, rdm_new
from .errors import DomainError, ExceptionalPoint
from .matcore import DEFAULT_TOL, Tolerances, as_cmatrix, dagger, is_hermitian, operator_norm
from .models import (
    RegionTag,
    SwansonParams,
    swanson_R,
    swanson_region,
    swanson_spectrum,
    rdm1_lambdas,
    thermal_lambdas,
    two_state_R,
)

__all__ = [
    "EvolutionSpec",
    "default_step",
    "evolve_numeric",
    "two_state_rho0_closed",
    "two_state_rdm_closed",
    "swanson_rho0_closed",
    "swanson_rdm_closed",
    "swanson_rdm1_state",
    "swanson_thermal_state",
]

SQRT2 = math.sqrt(2.0)
TWO_STATE_C = (2 / 3, 0.0, 0.0, 1 / 3)


def default_step(H0) -> float:
    """``1e-3 / ||H0||`` (``1e-3`` for the zero matrix)."""
    nrm = operator_norm(H0)
    return 1e-3 / nrm if nrm > 0 else 1e-3


@dataclass(frozen=True)
class EvolutionSpec:
    """Integration request.

    Parameters
    ----------
    H0 : array_like
        Hermitian generator.
    rho_init : DensityMatrix
        State at ``t = 0``.
    t_grid : sequence of float
        Non-negative, strictly increasing output times.
    step : float, optional
        Maximal RK4 step; defaults to :func:`default_step`.
    """

    H0: np.ndarray
    rho_init: DensityMatrix
    t_grid: tuple
    step: float | None = None
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        H0 = as_cmatrix(self.H0)
        object.__setattr__(self, "H0", H0)
        if not is_hermitian(H0, self.tol):
            raise DomainError("H0 must be Hermitian")
        if H0.shape != self.rho_init.mat.shape:
            raise DomainError("H0 and rho_init have different dimensions")
        grid = tuple(float(t) for t in self.t_grid)
        if not grid:
            raise DomainError("t_grid is empty")
        if grid[0] < 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("t_grid must be non-negative and strictly increasing")
        object.__setattr__(self, "t_grid", grid)
        step = default_step(H0) if self.step is None else float(self.step)
        if not step > 0:
            raise DomainError(f"step must be positive, got {step}", value=step)
        object.__setattr__(self, "step", step)


def _rk4_step(H: np.ndarray, rho: np.ndarray, h: float) -> np.ndarray:
    def f(r):
        return -1j * (H @ r - r @ H)

    k1 = f(rho)
    k2 = f(rho + 0.5 * h * k1)
    k3 = f(rho + 0.5 * h * k2)
    k4 = f(rho + h * k3)
    return rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve_numeric(spec: EvolutionSpec) -> list[np.ndarray]:
    """``rho(t)`` at every grid time.

    Each interval between output times is split into equal steps no longer
    than ``spec.step``, so grid times are hit exactly.  After every step the
    state is re-Hermitized and its trace reset to one.
    """
    H = spec.H0
    rho = spec.rho_init.mat.copy()
    out = []
    t_prev = 0.0
    for t in spec.t_grid:
        span = t - t_prev
        if span > 0:
            n = max(1, math.ceil(span / spec.step - 1e-9))
            h = span / n
            for _ in range(n):
                rho = _rk4_step(H, rho, h)
                rho = (rho + dagger(rho)) / 2
                rho = rho / np.trace(rho).real
        out.append(rho.copy())
        t_prev = t
    return out


# ---------------------------------------------------------------------------
# two-state model


def two_state_rho0_closed(t: float, c, d: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Evolved state for ``H0 = [[r, d], [d, r]]`` from ``[[c1, c2], [c3, c4]]``."""
    c1, c2, c3, c4 = (complex(x) for x in c)
    if abs(c1 + c4 - 1) > tol.eq_tol or abs(c3 - np.conj(c2)) > tol.eq_tol:
        raise DomainError("initial entries need c1 + c4 = 1 and c3 = conj(c2)")
    dm_new(np.array([[c1, c2], [c3, c4]]), tol)
    om = 2 * d * t
    s, co = math.sin(om), math.cos(om)
    return 0.5 * np.array(
        [[1 + 1j * (c2 - c3) * s + (c1 - c4) * co, c2 + c3 + 1j * (c1 - c4) * s - (c3 - c2) * co],
         [c2 + c3 - 1j * (c1 - c4) * s + (c3 - c2) * co, 1 - 1j * (c2 - c3) * s - (c1 - c4) * co]]
    )


def two_state_rdm_closed(t: float, y: float, tol: Tolerances = DEFAULT_TOL) -> RieszDM:
    """Deformed two-state trajectory at ``r = 1``, ``d = 1/2``, ``sin(theta) = y``.

    The initial state is ``diag(2/3, 1/3)``; purity and entropy do not
    depend on ``t`` or ``y``.
    """
    R = two_state_R(y, tol)
    q = math.sqrt(1 - 4 * y * y)
    s, co = math.sin(t), math.cos(t)
    mat = np.array(
        [[0.5 + 1j * y * co / (3 * q) + 2 * y * s / 3, co / (6 * q) + 1j * (1 - 16 * y * y) * s / 6],
         [co / (6 * q) - 1j * s / 6, 0.5 - 1j * y * co / (3 * q) - 2 * y * s / 3]]
    )
    base = dm_new(two_state_rho0_closed(t, TWO_STATE_C, 0.5, tol), tol)
    return dataclasses.replace(rdm_new(R, base, tol), mat=mat)


# ---------------------------------------------------------------------------
# Swanson model


def _check_lambdas(lambdas, tol: Tolerances) -> tuple[float, float, float]:
    lam = tuple(float(x) for x in lambdas)
    if len(lam) != 3:
        raise DomainError("three weights expected")
    if any(x < -tol.psd_tol or x > 1 + tol.psd_tol for x in lam) or abs(sum(lam) - 1) > tol.eq_tol:
        raise DomainError(f"weights must lie in [0, 1] and sum to 1, got {lam}")
    return lam


def _trig(t: float, alpha1: float):
    X = 1 + 2 * alpha1 ** 2
    w = math.sqrt(X)
    return X, w, math.sin(w * t), math.cos(w * t), math.cos(2 * w * t)


def swanson_rho0_closed(t: float, alpha1: float, lambdas, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Evolution of ``diag(lambdas)`` under the Hermitian ``H(alpha1, alpha1)``.

    Only levels 1 and 3 mix, at angular frequency ``sqrt(1 + 2 alpha1^2)``.
    """
    l1, l2, l3 = _check_lambdas(lambdas, tol)
    X, w, S, C, C2 = _trig(t, alpha1)
    a2 = alpha1 ** 2
    off = SQRT2 * alpha1 * S * (l1 - l3) / X
    return np.array(
        [[(l1 + C2 * a2 * (l1 - l3) + a2 * (l1 + l3)) / X, 0, off * (1j * C * w - S)],
         [0, l2, 0],
         [off * (-1j * C * w - S), 0, (l3 + C2 * a2 * (l3 - l1) + a2 * (l1 + l3)) / X]],
        dtype=complex,
    )


def swanson_rdm_closed(t: float, p: SwansonParams, lambdas, tol: Tolerances = DEFAULT_TOL) -> RieszDM:
    """Explicit ``R rho0(t) R^-1`` with ``R`` from :func:`~nhdm.models.swanson_R`.

    Raises
    ------
    ExceptionalPoint
        On the hyperbola ``1 + 2 a1 a2 = 0``, where ``mu2 = mu3``.
    DomainError
        For ``a1 a2 = 0``, where the closed form divides by zero.
    """
    if swanson_region(p).tag is RegionTag.EXCEPTIONAL:
        raise ExceptionalPoint(1.0)
    if p.alpha1 * p.alpha2 == 0:
        raise DomainError("closed form needs alpha1 * alpha2 != 0")
    l1, l2, l3 = _check_lambdas(lambdas, tol)
    spec = swanson_spectrum(p, tol)
    _, m2, m3 = spec.eigenvalues
    h2 = spec.normalizers[0]
    a1, a2 = p.alpha1, p.alpha2
    sq = a1 ** 2
    X, w, S, C, C2 = _trig(t, a1)
    X32 = X * w
    d = l1 - l3
    up = 1j * X * C - w * S
    mat = np.array(
        [[(-X * m3 * l2 + m2 * (l3 + sq * (l1 + l3)) + sq * m2 * (l3 - l1) * C2) / (X * (m2 - m3)),
          h2 * a1 * m2 * S * (1j * X * C + w * S) * d / (a2 * X32),
          m2 * m3 * (l3 - l2 + sq * (l1 - 2 * l2 + l3) + sq * (l3 - l1) * C2) / (SQRT2 * X * a2 * (m2 - m3))],
         [2 * a1 * a2 * S * up * d / (h2 * X32 * (m3 - m2)),
          (l1 + sq * (l1 + l3) + sq * d * C2) / X,
          SQRT2 * a1 * m3 * S * up * d / (h2 * X32 * (m3 - m2))],
         [SQRT2 * a2 * (l2 - l3 - sq * (l1 - 2 * l2 + l3) + sq * d * C2) / (X * (m2 - m3)),
          SQRT2 * h2 * a1 * S * (-1j * X * C - w * S) * d / X32,
          ((m2 + 2 * sq * m2) * l2 - m3 * (l3 + sq * (l1 + l3)) + sq * m3 * d * C2) / (X * (m2 - m3))]],
        dtype=complex,
    )
    base = dm_new(swanson_rho0_closed(t, a1, (l1, l2, l3), tol), tol)
    return dataclasses.replace(rdm_new(swanson_R(p, tol), base, tol), mat=mat)


def swanson_rdm1_state(p: SwansonParams, t: float = 0.0, tol: Tolerances = DEFAULT_TOL) -> RieszDM:
    """Riesz state with weights ``|mu_j|^2 / sum |mu_k|^2`` evolved to time ``t``."""
    lam = rdm1_lambdas(swanson_spectrum(p, tol).eigenvalues)
    base = dm_new(swanson_rho0_closed(t, p.alpha1, lam, tol), tol)
    return rdm_new(swanson_R(p, tol), base, tol)


def swanson_thermal_state(beta: float, p: SwansonParams, tol: Tolerances = DEFAULT_TOL) -> RieszDM:
    """Riesz state built on the Boltzmann weights of the Swanson spectrum."""
    lam = thermal_lambdas(beta, swanson_spectrum(p, tol).eigenvalues, tol)
    return rdm_new(swanson_R(p, tol), dm_new(np.diag(lam).astype(complex), tol), tol)
