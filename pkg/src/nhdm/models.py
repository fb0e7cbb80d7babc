"""The two finite-dimensional non-Hermitian models.

* Two-state gain/loss model ``H = [[r e^{i theta}, d], [d, r e^{-i theta}]]``.
* Three-level Swanson model ``H = c^dagger c + a1 c^2 + a2 (c^dagger)^2`` with
  the truncated lowering operator ``c``.

All square roots use the principal branch, so ``sqrt(-x) = +i sqrt(x)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .biortho import BiorthogonalSystem, DeformationOp, deformation
from .density import GeneralizedDM, dm_new, gdm_check
from .errors import (
    BrokenRegion,
    ComplexSpectrum,
    DomainError,
    ExceptionalPoint,
    NoSolution,
    OutOfRegion,
)
from .matcore import DEFAULT_TOL, Tolerances, _csqrt, dagger, eig

__all__ = [
    "EP_TOL",
    "RegionTag",
    "Region",
    "TwoStateParams",
    "SwansonParams",
    "ModelSpectrum",
    "classify",
    "two_state_h",
    "two_state_region",
    "two_state_spectrum",
    "two_state_R",
    "swanson_h",
    "swanson_region",
    "swanson_mus",
    "swanson_spectrum",
    "swanson_R",
    "exceptional_R",
    "thermal_lambdas",
    "rdm1_lambdas",
    "rdm2_closed_forms",
    "gdm_rho",
    "exceptional_locus",
]

EP_TOL = 1e-10
SQRT2 = math.sqrt(2.0)


class RegionTag(str, enum.Enum):
    UNBROKEN = "Unbroken"
    BROKEN = "Broken"
    EXCEPTIONAL = "Exceptional"


@dataclass(frozen=True)
class Region:
    tag: RegionTag
    discriminant: float


def classify(discriminant: float, tol: float = EP_TOL) -> Region:
    if discriminant > tol:
        tag = RegionTag.UNBROKEN
    elif discriminant < -tol:
        tag = RegionTag.BROKEN
    else:
        tag = RegionTag.EXCEPTIONAL
    return Region(tag, float(discriminant))


@dataclass(frozen=True)
class TwoStateParams:
    r: float
    d: float
    theta: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.r, self.d, self.theta)):
            raise DomainError("two-state parameters must be finite")
        if self.r <= 0:
            raise DomainError(f"r must be positive, got {self.r}", value=self.r)

    @property
    def discriminant(self) -> float:
        return self.d ** 2 - (self.r * math.sin(self.theta)) ** 2


@dataclass(frozen=True)
class SwansonParams:
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha1) and math.isfinite(self.alpha2)):
            raise DomainError("Swanson parameters must be finite")

    @property
    def discriminant(self) -> float:
        return 1.0 + 2.0 * self.alpha1 * self.alpha2


@dataclass(frozen=True)
class ModelSpectrum:
    """Eigenvalues in model order with the matching biorthonormal system.

    ``normalizers`` holds ``(A+, A-)`` for the two-state model and
    ``(h2, h3)`` for the Swanson model; it is empty when the closed-form
    eigenvectors were replaced by numerically computed ones.
    """

    eigenvalues: np.ndarray
    system: BiorthogonalSystem
    normalizers: tuple[complex, ...]
    region: Region


def _pair_duals(H: np.ndarray, mus, phis: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Match each ``phi_j`` with the candidate eigenvector of ``H^dagger`` at ``conj(mu_j)``.

    The chosen dual is rescaled so that ``<phi_j, psi_j> = 1``.
    """
    Hd = dagger(H)
    n = len(mus)
    psis = np.zeros_like(phis)
    free = list(range(n))
    for j, mu in enumerate(mus):
        target = np.conj(mu)

        def residual(k):
            v = candidates[:, k]
            nv = np.linalg.norm(v)
            return np.linalg.norm(Hd @ v - target * v) / nv if nv > 0 else np.inf

        k = min(free, key=residual)
        free.remove(k)
        v = candidates[:, k]
        psis[:, j] = v / np.vdot(phis[:, j], v)
    return psis


def _numeric_system(H: np.ndarray, mus, tol: Tolerances) -> BiorthogonalSystem:
    """Eigenvectors from :func:`eig` ordered to follow ``mus``; duals by inversion."""
    spec = eig(H, tol)
    free = list(range(len(mus)))
    cols = []
    for mu in mus:
        k = min(free, key=lambda i: abs(spec.eigenvalues[i] - mu))
        free.remove(k)
        cols.append(spec.vectors[:, k])
    phis = np.column_stack(cols)
    psis = dagger(np.linalg.inv(phis))
    return BiorthogonalSystem(phis, psis, span_dim=len(mus))


# ---------------------------------------------------------------------------
# two-state model


def two_state_h(p: TwoStateParams) -> np.ndarray:
    z = p.r * np.exp(1j * p.theta)
    return np.array([[z, p.d], [p.d, np.conj(z)]], dtype=complex)


def two_state_region(p: TwoStateParams, tol: float = EP_TOL) -> Region:
    return classify(p.discriminant, tol)


def two_state_spectrum(p: TwoStateParams, tol: Tolerances = DEFAULT_TOL) -> ModelSpectrum:
    """Eigenvalues ``mu+-`` and biorthonormal eigenvectors.

    In the broken region the dual of ``phi+`` is the ``psi-`` formula and
    vice versa; the pairing is found by matching eigenvalues of ``H^dagger``.

    Raises
    ------
    ExceptionalPoint
        When ``d^2 = r^2 sin^2(theta)`` within ``EP_TOL``.
    """
    region = two_state_region(p)
    rc = p.r * math.cos(p.theta)
    if region.tag is RegionTag.EXCEPTIONAL:
        raise ExceptionalPoint(rc)
    rs = p.r * math.sin(p.theta)
    sq = _csqrt(p.discriminant)
    mus = np.array([rc + sq, rc - sq])
    H = two_state_h(p)
    if p.d == 0:
        return ModelSpectrum(mus, _numeric_system(H, mus, tol), (), region)
    # k_plus k_minus = -d^2: take the larger directly, the smaller from the product
    k_plus, k_minus = 1j * rs + sq, 1j * rs - sq
    if abs(k_plus) >= abs(k_minus):
        k_minus = -p.d ** 2 / k_plus
    else:
        k_plus = -p.d ** 2 / k_minus
    a_plus = _csqrt(k_plus ** 2 + p.d ** 2)
    a_minus = _csqrt(k_minus ** 2 + p.d ** 2)
    if a_plus == 0 or a_minus == 0:
        return ModelSpectrum(mus, _numeric_system(H, mus, tol), (), region)
    phis = np.array(
        [[k_plus / np.conj(a_plus), k_minus / np.conj(a_minus)],
         [p.d / np.conj(a_plus), p.d / np.conj(a_minus)]]
    )
    candidates = np.array(
        [[-k_minus / a_plus, -k_plus / a_minus],
         [p.d / a_plus, p.d / a_minus]]
    )
    psis = _pair_duals(H, mus, phis, candidates)
    return ModelSpectrum(mus, BiorthogonalSystem(phis, psis, span_dim=2), (a_plus, a_minus), region)


def two_state_R(y: float, tol: Tolerances = DEFAULT_TOL) -> DeformationOp:
    """Deformation built from ``phi+-`` at ``r = 1``, ``d = 1/2``, ``y = sin(theta)``.

    Raises
    ------
    OutOfRegion
        For ``|y| >= 1/2``, where the normalizers vanish.
    """
    if not abs(y) < 0.5:
        raise OutOfRegion(f"two-state R needs |sin(theta)| < 1/2, got {y}")
    q = math.sqrt(1 - 4 * y * y)
    den_minus = _csqrt(2 * (1 - 4 * y * y) - 4j * y * q)
    den_plus = _csqrt(2 * (1 - 4 * y * y) + 4j * y * q)
    R = np.array(
        [[(2j * y + q) / den_minus, (2j * y - q) / den_plus],
         [1 / den_minus, 1 / den_plus]]
    )
    return deformation(R, tol)


# ---------------------------------------------------------------------------
# Swanson model


def swanson_h(p: SwansonParams) -> tuple[np.ndarray, np.ndarray]:
    """Truncated lowering operator ``c`` and Hamiltonian ``H``."""
    c = np.array([[0, 1, 0], [0, 0, SQRT2], [0, 0, 0]], dtype=complex)
    cd = dagger(c)
    H = cd @ c + p.alpha1 * (c @ c) + p.alpha2 * (cd @ cd)
    return c, H


def swanson_region(p: SwansonParams, tol: float = EP_TOL) -> Region:
    return classify(p.discriminant, tol)


def swanson_mus(p: SwansonParams) -> np.ndarray:
    """``(1, 1 - sqrt(D), 1 + sqrt(D))`` with ``D = 1 + 2 a1 a2``."""
    D = p.discriminant
    root = _csqrt(D)
    # 1 - sqrt(D) rewritten to avoid cancellation for small a1 a2
    low = -2 * p.alpha1 * p.alpha2 / (1 + root) if D > 0 else 1 - root
    return np.array([1.0 + 0j, low + 0j, 1 + root])


def _swanson_h_normalizers(p: SwansonParams, mus) -> tuple[complex, complex] | None:
    prod = 2 * p.alpha1 * p.alpha2
    if prod == 0:
        return None
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        h2 = 1 / _csqrt(mus[1] ** 2 / prod + 1)
        h3 = 1 / _csqrt(mus[2] ** 2 / prod + 1)
    if not (np.isfinite(h2) and np.isfinite(h3)) or h2 == 0 or h3 == 0:
        return None
    return h2, h3


def swanson_spectrum(p: SwansonParams, tol: Tolerances = DEFAULT_TOL) -> ModelSpectrum:
    """Closed-form eigenvalues and biorthonormal eigenvectors.

    For ``a1 a2 = 0`` the ``h2, h3`` normalizers are undefined and the
    eigenvectors come from :func:`~nhdm.matcore.eig` instead.

    Raises
    ------
    ExceptionalPoint
        When ``1 + 2 a1 a2 = 0`` within ``EP_TOL``.
    """
    region = swanson_region(p)
    if region.tag is RegionTag.EXCEPTIONAL:
        raise ExceptionalPoint(1.0)
    mus = swanson_mus(p)
    _, H = swanson_h(p)
    hs = _swanson_h_normalizers(p, mus)
    if hs is None:
        return ModelSpectrum(mus, _numeric_system(H, mus, tol), (), region)
    h2, h3 = hs
    a1, a2 = p.alpha1, p.alpha2
    m2, m3 = mus[1], mus[2]
    phis = np.array(
        [[0, -h3 * m3 / (SQRT2 * a2), -h2 * m2 / (SQRT2 * a2)],
         [1, 0, 0],
         [0, h3, h2]], dtype=complex,
    )
    candidates = np.array(
        [[0, -h3 * m3 / (SQRT2 * a1), -h2 * m2 / (SQRT2 * a1)],
         [1, 0, 0],
         [0, h3, h2]], dtype=complex,
    )
    psis = _pair_duals(H, mus, phis, candidates)
    return ModelSpectrum(mus, BiorthogonalSystem(phis, psis, span_dim=3), (h2, h3), region)


def exceptional_R(alpha1: float, tol: Tolerances = DEFAULT_TOL) -> DeformationOp:
    """The singular deformation used on the exceptional hyperbola."""
    b = SQRT2 * alpha1
    R = np.array([[0, b, b], [1, 0, 0], [0, 1, 1]], dtype=complex)
    return deformation(R, tol)


def swanson_R(p: SwansonParams, tol: Tolerances = DEFAULT_TOL) -> DeformationOp:
    """Matrix whose columns are ``phi_1, phi_2, phi_3``.

    On the exceptional hyperbola the closed form diverges; the singular matrix
    of :func:`exceptional_R` is returned instead (flagged non-invertible).
    """
    if swanson_region(p).tag is RegionTag.EXCEPTIONAL:
        return exceptional_R(p.alpha1, tol)
    return deformation(swanson_spectrum(p, tol).system.phis, tol)


def thermal_lambdas(beta: float, mus, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Boltzmann weights ``exp(-beta mu_j) / Z``.

    Raises
    ------
    ComplexSpectrum
        If any ``mu_j`` has a non-negligible imaginary part.
    """
    mus = np.asarray(mus, dtype=complex)
    if np.any(np.abs(mus.imag) > tol.eq_tol):
        raise ComplexSpectrum("thermal weights need a real spectrum")
    if not beta >= 0:
        raise DomainError(f"beta must be non-negative, got {beta}", value=beta)
    e = mus.real
    w = np.exp(-beta * (e - e.min()))
    return w / w.sum()


def rdm1_lambdas(mus) -> np.ndarray:
    """Weights ``|mu_j|^2 / sum_k |mu_k|^2``."""
    a = np.abs(np.asarray(mus, dtype=complex)) ** 2
    total = a.sum()
    if total == 0:
        raise DomainError("all eigenvalues vanish")
    return a / total


def rdm2_closed_forms(beta: float, p: SwansonParams) -> tuple[float, float]:
    """Purity and entropy of the thermal Riesz state as functions of
    ``X = beta sqrt(1 + 2 a1 a2)``.

    Both are evaluated in terms of ``u = exp(-X)`` so that large ``X`` does
    not overflow; the expressions are algebraically identical to the
    ``cosh`` forms.
    """
    D = p.discriminant
    if D < -EP_TOL:
        raise BrokenRegion(f"closed forms need 1 + 2 a1 a2 >= 0, got {D}")
    if not beta >= 0:
        raise DomainError(f"beta must be non-negative, got {beta}", value=beta)
    X = beta * math.sqrt(max(D, 0.0))
    u = math.exp(-X)
    z = 1 + u + u * u
    # 1 - 2 / (2 cosh X + 1)
    purity = 1 - 2 * u / z
    L = math.log(z)
    entropy = (u * u * (2 * X + L) + u * (X + L) + L) / z
    return purity, entropy


def gdm_rho(alpha1: float, lambda1: float, tol: Tolerances = DEFAULT_TOL) -> GeneralizedDM:
    """Generalized density matrix at the exceptional point.

    ``rho0 = diag(l1, (1 - l1)/2, (1 - l1)/2)`` and ``R`` from
    :func:`exceptional_R`; the returned state has trace ``(1 + l1)/2``.
    """
    if alpha1 == 0 or not math.isfinite(alpha1):
        raise DomainError("alpha1 must be finite and non-zero", value=alpha1)
    if not 0.0 <= lambda1 <= 1.0:
        raise DomainError(f"lambda1 must lie in [0, 1], got {lambda1}", value=lambda1)
    m = (1 - lambda1) / 2
    rho = np.array([[m, 0, 0], [0, lambda1, 0], [m / (SQRT2 * alpha1), 0, 0]], dtype=complex)
    base = dm_new(np.diag([lambda1, m, m]).astype(complex), tol)
    return gdm_check(rho, exceptional_R(alpha1, tol), base, tol)


def exceptional_locus(model: str, fixed) -> float:
    """Conjugate parameter on the exceptional set.

    ``model="swanson"``: ``fixed`` is ``alpha1``; returns ``alpha2 = -1/(2 alpha1)``.
    ``model="two-state"``: ``fixed`` is ``(r, d)``; returns ``sin(theta) = |d|/r``
    (``-|d|/r`` is the mirror solution).
    """
    key = model.lower().replace("_", "-")
    if key == "swanson":
        a1 = float(fixed)
        if a1 == 0:
            raise NoSolution("1 + 2 a1 a2 = 1 for a1 = 0")
        return -1.0 / (2.0 * a1)
    if key in ("two-state", "twostate"):
        r, d = fixed
        if r <= 0:
            raise DomainError("r must be positive", value=r)
        s = abs(d) / r
        if s > 1:
            raise NoSolution(f"|d/r| = {s} > 1 has no sin(theta) solution")
        return s
    raise ValueError(f"unknown model {model!r}")
