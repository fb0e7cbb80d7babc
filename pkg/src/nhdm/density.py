"""Density matrices and their deformed versions.

Three grades share one small interface (``mat``, :func:`purity`,
:func:`entropy_trace`, :func:`functional_eval`):

* :class:`DensityMatrix` -- Hermitian, positive, unit trace.
* :class:`RieszDM` -- ``rho = R rho0 R^-1`` for an invertible ``R``.
* :class:`GeneralizedDM` -- ``rho R = R rho0`` for a possibly singular ``R``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .biortho import (
    BiorthogonalSystem,
    DeformationOp,
    deformation,
    gdm_duals,
    intertwines,
    riesz_pair_from,
    span_system,
)
from .errors import (
    DefectiveMatrix,
    DimensionError,
    DomainError,
    IntertwiningViolation,
    NotPSD,
    PropertyPIError,
    RMismatch,
    SingularMatrix,
    TraceNotOne,
)
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    as_cmatrix,
    condition_number,
    dagger,
    format_matrix,
    is_positive_semidefinite,
    mat_function,
    operator_norm,
    parse_matrix,
)

__all__ = [
    "Grade",
    "DensityMatrix",
    "RieszDM",
    "GeneralizedDM",
    "EntropyOperator",
    "dm_new",
    "pure_state",
    "rdm_new",
    "riesz_pure_state",
    "gdm_from_pi",
    "gdm_check",
    "entropy_operator",
    "purity",
    "entropy_trace",
    "entropy_of_spectrum",
    "functional_eval",
    "deformed_observable",
    "is_pure",
    "convex_combine",
    "dump_state",
    "load_state",
]

# below this, lam log lam is replaced by its limit 0
_UNDERFLOW = 1e-300
PURE_TOL = 1e-8


class Grade(str, enum.Enum):
    STANDARD = "Standard"
    RIESZ = "Riesz"
    GENERALIZED = "Generalized"


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix with its orthonormal eigenbasis.

    ``vectors[:, j]`` is the eigenvector for ``lambdas[j]``; eigenvalues are
    sorted in descending order.
    """

    mat: np.ndarray
    lambdas: np.ndarray
    vectors: np.ndarray

    grade = Grade.STANDARD

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def projectors(self) -> list[np.ndarray]:
        return [np.outer(v, v.conj()) for v in self.vectors.T]


@dataclass(frozen=True)
class RieszDM:
    mat: np.ndarray
    R: DeformationOp
    base: DensityMatrix
    system: BiorthogonalSystem

    grade = Grade.RIESZ

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def projectors(self) -> list[np.ndarray]:
        """Non-orthogonal projectors ``|phi_j><psi_j|``."""
        return [np.outer(p, q.conj()) for p, q in zip(self.system.phis.T, self.system.psis.T)]


@dataclass(frozen=True)
class GeneralizedDM:
    """Operator intertwined with a density matrix: ``mat @ R = R @ base``.

    ``via_pi`` marks the trace-preserving construction available when
    ``R^dagger R`` is invertible; otherwise the trace is unconstrained.
    """

    mat: np.ndarray
    R: DeformationOp
    base: DensityMatrix
    system: BiorthogonalSystem
    via_pi: bool

    grade = Grade.GENERALIZED

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def span_dim(self) -> int:
        return self.system.span_dim


@dataclass(frozen=True)
class EntropyOperator:
    mat: np.ndarray
    grade: Grade

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.mat))


# ---------------------------------------------------------------------------
# constructors


def dm_new(M, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Validate ``M`` as a density matrix.

    Raises
    ------
    NotPSD
        With the most negative eigenvalue of the Hermitian part.
    TraceNotOne
        With the offending trace.
    """
    M = as_cmatrix(M)
    herm = (M + dagger(M)) / 2
    if not is_positive_semidefinite(M, tol):
        raise NotPSD(np.min(np.linalg.eigvalsh(herm)))
    tr = np.trace(M)
    if abs(tr - 1) > tol.eq_tol:
        raise TraceNotOne(tr)
    w, v = np.linalg.eigh(herm)
    order = np.argsort(-w, kind="stable")
    return DensityMatrix(M, w[order], v[:, order])


def pure_state(psi, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """``|psi><psi|`` for a vector normalized on the way in."""
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise DomainError("zero vector has no pure state")
    psi = psi / nrm
    return dm_new(np.outer(psi, psi.conj()), tol)


def _as_op(R, tol: Tolerances) -> DeformationOp:
    return R if isinstance(R, DeformationOp) else deformation(R, tol)


def _check_dims(R: DeformationOp, rho0: DensityMatrix) -> None:
    if R.dim != rho0.dim:
        raise DimensionError(f"R is {R.dim}x{R.dim} but rho0 is {rho0.dim}x{rho0.dim}")


def _right_solve(A: np.ndarray, R: np.ndarray) -> np.ndarray:
    """``A @ R^-1`` via a linear solve."""
    return np.linalg.solve(R.T, A.T).T


def _left_inverse(R: np.ndarray) -> np.ndarray:
    """``(R^dagger R)^-1 R^dagger`` via the SVD, avoiding the squared condition number."""
    return np.linalg.pinv(R)


def rdm_new(R, rho0: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> RieszDM:
    """The Riesz density matrix ``R rho0 R^-1``."""
    op = _as_op(R, tol)
    _check_dims(op, rho0)
    if not op.invertible:
        raise SingularMatrix(np.linalg.det(op.R))
    mat = _right_solve(op.R @ rho0.mat, op.R)
    system = riesz_pair_from(op, onb=rho0.vectors.T, tol=tol)
    system = BiorthogonalSystem(system.phis, system.psis, system.span_dim, rho0.lambdas.copy())
    return RieszDM(mat, op, rho0, system)


def riesz_pure_state(R, phi0, tol: Tolerances = DEFAULT_TOL) -> tuple[RieszDM, np.ndarray, np.ndarray]:
    """Deformed pure state ``|phi0'><psi0'|`` with ``phi0' = R phi0``, ``psi0' = (R^-1)^dagger phi0``.

    Returns the state together with the two vectors.
    """
    op = _as_op(R, tol)
    base = pure_state(phi0, tol)
    phi0 = np.asarray(phi0, dtype=complex) / np.linalg.norm(phi0)
    rho = rdm_new(op, base, tol)
    phi = op.R @ phi0
    psi = np.linalg.solve(dagger(op.R), phi0)
    return rho, phi, psi


def gdm_from_pi(R, rho0: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> GeneralizedDM:
    """``rho = R rho0 (R^dagger R)^-1 R^dagger``, which has unit trace."""
    op = _as_op(R, tol)
    _check_dims(op, rho0)
    if not op.pi_holds:
        raise PropertyPIError("R^dagger R is not invertible; use gdm_check with an explicit rho")
    mat = op.R @ rho0.mat @ _left_inverse(op.R)
    system = gdm_duals(op, onb=rho0.vectors.T, tol=tol)
    system = BiorthogonalSystem(system.phis, system.psis, system.span_dim, rho0.lambdas.copy())
    return GeneralizedDM(mat, op, rho0, system, via_pi=True)


def gdm_check(rho, R, rho0: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> GeneralizedDM:
    """Wrap an explicit ``rho`` after verifying ``rho R = R rho0``."""
    mat = as_cmatrix(rho)
    op = _as_op(R, tol)
    _check_dims(op, rho0)
    ok, residual = intertwines(mat, op.R, rho0.mat, tol.eq_tol)
    if not ok:
        raise IntertwiningViolation(residual)
    system = span_system(op, lambdas=rho0.lambdas, onb=rho0.vectors.T, tol=tol)
    return GeneralizedDM(mat, op, rho0, system, via_pi=False)


# ---------------------------------------------------------------------------
# entropy


def _neg_xlogx(lam, tol: Tolerances) -> complex:
    z = complex(lam)
    if abs(z.imag) <= tol.eq_tol:
        x = z.real
        if x < -tol.psd_tol:
            raise DomainError(f"negative eigenvalue {x:.3e} has no entropy", value=x)
        if x < _UNDERFLOW:
            return 0j
        return complex(-x * math.log(x))
    return -z * np.log(z)


def entropy_of_spectrum(lambdas, tol: Tolerances = DEFAULT_TOL) -> float:
    """``-sum lam log lam`` with ``0 log 0 = 0``."""
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam < -tol.psd_tol) or np.any(lam > 1 + tol.eq_tol):
        raise DomainError("eigenvalues must lie in [0, 1]")
    if lam.sum() > 1 + tol.eq_tol:
        raise DomainError(f"eigenvalues sum to {lam.sum():.12g} > 1")
    return float(sum(_neg_xlogx(x, tol).real for x in lam))


def _standard_entropy(dm: DensityMatrix, tol: Tolerances) -> np.ndarray:
    s = np.array([_neg_xlogx(x, tol).real for x in dm.lambdas])
    return (dm.vectors * s) @ dagger(dm.vectors)


def entropy_operator(x, tol: Tolerances = DEFAULT_TOL) -> EntropyOperator:
    """Entropy operator of any grade.

    For a generalized density matrix without the PI construction the operator
    is ``-rho log rho`` taken through the spectral decomposition of ``rho``
    itself; the kernel of ``rho`` is sent to zero.  When ``rho`` is not
    diagonalizable the biorthogonal system on the span of the ``phi_j`` is
    used instead.  Either way ``S(rho) R = R S(rho0)`` is verified.
    """
    if isinstance(x, DensityMatrix):
        return EntropyOperator(_standard_entropy(x, tol), Grade.STANDARD)
    if isinstance(x, RieszDM):
        S0 = _standard_entropy(x.base, tol)
        return EntropyOperator(_right_solve(x.R.R @ S0, x.R.R), Grade.RIESZ)
    if isinstance(x, GeneralizedDM):
        S0 = _standard_entropy(x.base, tol)
        R = x.R.R
        if x.via_pi:
            S = R @ S0 @ _left_inverse(R)
            return EntropyOperator(S, Grade.GENERALIZED)
        try:
            S = mat_function(x.mat, lambda z: _neg_xlogx(z, tol), tol)
        except DefectiveMatrix:
            S = None
        if S is None or not intertwines(S, R, S0, tol.eq_tol)[0]:
            k = x.system.span_dim
            s = np.array([_neg_xlogx(v, tol) for v in x.system.lambdas[:k]])
            S = (x.system.phis[:, :k] * s) @ dagger(x.system.psis[:, :k])
        ok, residual = intertwines(S, R, S0, tol.eq_tol)
        if not ok:
            raise IntertwiningViolation(residual)
        return EntropyOperator(S, Grade.GENERALIZED)
    raise TypeError(f"not a density matrix grade: {type(x).__name__}")


def entropy_trace(x, tol: Tolerances = DEFAULT_TOL) -> float:
    """Von Neumann entropy.

    Computed from the base spectrum; for a generalized density matrix only
    the eigenvalues attached to independent ``phi_j`` contribute.
    """
    if isinstance(x, DensityMatrix):
        return entropy_of_spectrum(x.lambdas, tol)
    if isinstance(x, RieszDM):
        return entropy_of_spectrum(x.base.lambdas, tol)
    if isinstance(x, GeneralizedDM):
        return entropy_of_spectrum(x.system.lambdas[: x.system.span_dim], tol)
    raise TypeError(f"not a density matrix grade: {type(x).__name__}")


# ---------------------------------------------------------------------------
# scalar characteristics


def purity(x, tol: Tolerances = DEFAULT_TOL) -> float:
    """``Re tr(rho^2)``.

    For the standard and Riesz grades the imaginary part must vanish up to
    rounding, scaled by ``cond(R)^2`` for Riesz states.
    """
    value = complex(np.sum(x.mat * x.mat.T))
    if isinstance(x, (DensityMatrix, RieszDM)):
        scale = 1.0 if isinstance(x, DensityMatrix) else condition_number(x.R.R) ** 2
        if abs(value.imag) > tol.eq_tol * scale:
            raise DomainError(f"tr(rho^2) has imaginary part {value.imag:.3e}", value=value)
    return value.real


def is_pure(x, tol: float = PURE_TOL) -> bool:
    return abs(purity(x) - 1.0) <= tol


def functional_eval(x, X) -> complex:
    """``tr(rho X)``."""
    X = np.asarray(X, dtype=complex)
    if X.shape != x.mat.shape:
        raise DimensionError(f"observable of shape {x.mat.shape} expected, got {X.shape}")
    return complex(np.sum(x.mat * X.T))


def deformed_observable(x, X) -> np.ndarray:
    """Observable ``Y`` with ``tr(rho X) = tr(rho0 Y)``.

    ``R^-1 X R`` for Riesz states, ``(R^dagger R)^-1 R^dagger X R`` for the
    PI construction, ``X`` itself for a standard density matrix.
    """
    X = np.asarray(X, dtype=complex)
    if isinstance(x, DensityMatrix):
        return X
    R = x.R.R
    if isinstance(x, RieszDM):
        return np.linalg.solve(R, X @ R)
    if isinstance(x, GeneralizedDM) and x.via_pi:
        return _left_inverse(R) @ X @ R
    raise PropertyPIError("no deformed observable without the PI construction")


def convex_combine(x1, x2, w: float, tol: Tolerances = DEFAULT_TOL):
    """``w x1 + (1 - w) x2`` within the same grade (and the same ``R``)."""
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"weight must lie in [0, 1], got {w}", value=w)
    if type(x1) is not type(x2):
        raise TypeError("cannot combine states of different grades")
    if isinstance(x1, DensityMatrix):
        return dm_new(w * x1.mat + (1 - w) * x2.mat, tol)
    if np.max(np.abs(x1.R.R - x2.R.R)) > tol.eq_tol:
        raise RMismatch("states are deformed by different operators R")
    base = dm_new(w * x1.base.mat + (1 - w) * x2.base.mat, tol)
    if isinstance(x1, RieszDM):
        return rdm_new(x1.R, base, tol)
    if x1.via_pi and x2.via_pi:
        return gdm_from_pi(x1.R, base, tol)
    return gdm_check(w * x1.mat + (1 - w) * x2.mat, x1.R, base, tol)


# ---------------------------------------------------------------------------
# serialization


def dump_state(x) -> str:
    """Serialize a state as tagged matrix blocks (``mat``, ``R``, ``base``)."""
    lines = [f"# grade: {x.grade.value}"]
    if isinstance(x, GeneralizedDM):
        lines.append(f"# via_pi: {str(x.via_pi).lower()}")
    out = "\n".join(lines) + "\n"
    out += "# block: mat\n" + format_matrix(x.mat)
    if not isinstance(x, DensityMatrix):
        out += "# block: R\n" + format_matrix(x.R.R)
        out += "# block: base\n" + format_matrix(x.base.mat)
    return out


def load_state(text: str, tol: Tolerances = DEFAULT_TOL):
    header: dict[str, str] = {}
    blocks: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").strip().partition(":")
            if key.strip() == "block":
                current = value.strip()
                blocks[current] = []
            elif value:
                header[key.strip()] = value.strip()
            continue
        if current is not None and stripped:
            blocks[current].append(stripped)
    grade = Grade(header.get("grade", Grade.STANDARD.value))
    mat = parse_matrix("\n".join(blocks["mat"]))
    if grade is Grade.STANDARD:
        return dm_new(mat, tol)
    R = parse_matrix("\n".join(blocks["R"]))
    base = dm_new(parse_matrix("\n".join(blocks["base"])), tol)
    if grade is Grade.RIESZ:
        state = rdm_new(R, base, tol)
        scale = max(1.0, operator_norm(state.mat))
        if np.max(np.abs(state.mat - mat)) > tol.eq_tol * scale:
            raise IntertwiningViolation(float(np.max(np.abs(state.mat - mat))))
        return state
    if header.get("via_pi") == "true":
        return gdm_from_pi(R, base, tol)
    return gdm_check(mat, R, base, tol)
