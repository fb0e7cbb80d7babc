"""Biorthogonal systems, deformation operators and intertwining checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PropertyPIError, SingularMatrix, SpanError
from .matcore import DEFAULT_TOL, Tolerances, as_cmatrix, dagger, mat_inverse, operator_norm

__all__ = [
    "BiorthogonalSystem",
    "DeformationOp",
    "deformation",
    "riesz_pair_from",
    "gdm_duals",
    "span_system",
    "has_property_pi",
    "intertwines",
    "basis_expand",
    "resolution",
]


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Paired families stored column-wise: ``phis[:, j]`` and ``psis[:, j]``.

    Only the first ``span_dim`` pairs are biorthonormal.  ``lambdas`` is set
    when the family diagonalizes a density-matrix-like operator.
    """

    phis: np.ndarray
    psis: np.ndarray
    span_dim: int
    lambdas: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.phis.shape[0]

    def gram(self) -> np.ndarray:
        """Matrix of inner products ``<phi_i, psi_j>``."""
        return dagger(self.phis) @ self.psis

    def biorthonormality_error(self) -> float:
        k = self.span_dim
        G = self.gram()[:k, :k]
        return float(np.max(np.abs(G - np.eye(k)))) if k else 0.0


@dataclass(frozen=True)
class DeformationOp:
    R: np.ndarray
    invertible: bool
    pi_holds: bool

    @property
    def dim(self) -> int:
        return self.R.shape[0]


def _pi(R: np.ndarray, tol: Tolerances) -> bool:
    # eigenvalues of R^dagger R are the squared singular values of R
    s = np.linalg.svd(R, compute_uv=False)
    return bool(s[0] > 0 and (s[-1] / s[0]) ** 2 > tol.psd_tol ** 2)


def has_property_pi(R, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when ``R^dagger R`` is invertible.

    Singular values of ``R`` are used instead of forming ``R^dagger R``, which
    would square the condition number.  In finite dimension this coincides
    with invertibility of ``R``.
    """
    return _pi(as_cmatrix(R), tol)


def deformation(R, tol: Tolerances = DEFAULT_TOL) -> DeformationOp:
    M = as_cmatrix(R)
    pi = _pi(M, tol)
    return DeformationOp(M, invertible=pi, pi_holds=pi)


def _as_op(R, tol: Tolerances) -> DeformationOp:
    return R if isinstance(R, DeformationOp) else deformation(R, tol)


def _onb(onb, n: int) -> np.ndarray:
    if onb is None:
        return np.eye(n, dtype=complex)
    E = np.array(onb, dtype=complex)
    if E.ndim == 2 and E.shape == (n, n):
        # rows given as a list of vectors
        E = E.T
    else:
        raise DimensionError(f"expected {n} orthonormal vectors of length {n}")
    if np.max(np.abs(dagger(E) @ E - np.eye(n))) > 1e-10:
        raise ValueError("basis vectors are not orthonormal")
    return E


def riesz_pair_from(R, onb=None, tol: Tolerances = DEFAULT_TOL) -> BiorthogonalSystem:
    """``phi_j = R e_j`` and ``psi_j = (R^-1)^dagger e_j``."""
    op = _as_op(R, tol)
    if not op.invertible:
        raise SingularMatrix(np.linalg.det(op.R))
    E = _onb(onb, op.dim)
    Rinv = mat_inverse(op.R, tol)
    return BiorthogonalSystem(op.R @ E, dagger(Rinv) @ E, span_dim=op.dim)


def gdm_duals(R, onb=None, tol: Tolerances = DEFAULT_TOL) -> BiorthogonalSystem:
    """``phi_j = R e_j`` and ``psi_j = R (R^dagger R)^-1 e_j``."""
    op = _as_op(R, tol)
    if not op.pi_holds:
        raise PropertyPIError("R^dagger R is not invertible")
    E = _onb(onb, op.dim)
    # R (R^dagger R)^-1 = pinv(R)^dagger, without squaring the condition number
    return BiorthogonalSystem(op.R @ E, dagger(np.linalg.pinv(op.R)) @ E, span_dim=op.dim)


def span_system(R, lambdas=None, onb=None, tol: Tolerances = DEFAULT_TOL) -> BiorthogonalSystem:
    """Biorthogonal system on the span of ``phi_j = R e_j``.

    Directions that are linearly dependent on lower-index ones are dropped
    (Gram-Schmidt residual below ``1e-10 * ||R||``).  The kept vectors form a
    basis of their span and receive the unique duals inside that span.  The
    kept pairs come first; dropped ``phi`` follow with zero duals.
    """
    op = _as_op(R, tol)
    E = _onb(onb, op.dim)
    phis = op.R @ E
    cutoff = 1e-10 * max(operator_norm(op.R), np.finfo(float).tiny)
    kept, dropped, basis = [], [], []
    for j in range(op.dim):
        v = phis[:, j].copy()
        for q in basis:
            v -= q * np.vdot(q, v)
        for q in basis:
            v -= q * np.vdot(q, v)
        nv = np.linalg.norm(v)
        if nv > cutoff:
            basis.append(v / nv)
            kept.append(j)
        else:
            dropped.append(j)
    P = phis[:, kept]
    # duals in span(P): Psi = P (P^dagger P)^-1
    Psi = P @ np.linalg.inv(dagger(P) @ P)
    order = kept + dropped
    psis = np.zeros_like(phis)
    psis[:, : len(kept)] = Psi
    lam = None
    if lambdas is not None:
        lam = np.asarray(lambdas, dtype=float)[order]
    return BiorthogonalSystem(phis[:, order], psis, span_dim=len(kept), lambdas=lam)


def intertwines(A, R, B, tol: float = 1e-10) -> tuple[bool, float]:
    """Check ``A R = R B``; the residual is the operator norm of ``AR - RB``."""
    A, R, B = (np.asarray(x, dtype=complex) for x in (A, R, B))
    if not (A.shape[0] == R.shape[0] and R.shape[1] == B.shape[0] and A.shape[0] == A.shape[1]
            and B.shape[0] == B.shape[1]):
        raise DimensionError(f"incompatible shapes {A.shape}, {R.shape}, {B.shape}")
    residual = operator_norm(A @ R - R @ B)
    nR = operator_norm(R)
    bound = tol * (operator_norm(A) * nR + nR * operator_norm(B) + np.finfo(float).eps)
    return bool(residual <= bound), residual


def basis_expand(system: BiorthogonalSystem, f, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Coefficients ``c_j = <psi_j, f>`` with ``f = sum_j c_j phi_j``.

    Raises
    ------
    SpanError
        If ``f`` is not reproduced, i.e. lies outside the span of the kept phis.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != (system.dim,):
        raise DimensionError(f"vector of length {system.dim} expected")
    k = system.span_dim
    coeffs = dagger(system.psis[:, :k]) @ f
    residual = float(np.linalg.norm(system.phis[:, :k] @ coeffs - f))
    if residual > tol.eq_tol * max(1.0, float(np.linalg.norm(f))):
        raise SpanError(residual)
    return coeffs


def resolution(system: BiorthogonalSystem) -> np.ndarray:
    """``sum_j |phi_j><psi_j|`` over the biorthonormal part."""
    k = system.span_dim
    return system.phis[:, :k] @ dagger(system.psis[:, :k])
