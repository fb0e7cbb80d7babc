"""Dense complex matrix primitives for small (n <= 8) operators.

Matrices are plain ``numpy`` complex arrays; :func:`as_cmatrix` is the single
entry point that validates shape and finiteness.  Eigenvalues of 2x2 and 3x3
matrices come from closed forms (quadratic formula, Cardano), larger ones from
LAPACK.  Eigenvectors are always taken from the null space of ``A - lam I``.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DefectiveMatrix, DimensionError, DomainError, SingularMatrix

MAX_DIM = 8
_EPS = np.finfo(float).eps

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "Spectrum",
    "as_cmatrix",
    "dagger",
    "trace",
    "commutator",
    "eig",
    "eigvals",
    "mat_inverse",
    "mat_function",
    "is_positive_semidefinite",
    "is_hermitian",
    "operator_norm",
    "condition_number",
    "format_matrix",
    "parse_matrix",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every module.

    eq_tol
        Equality of matrices and scalars.
    psd_tol
        Positivity margin, also the relative singularity cutoff.
    defect_tol
        A matrix whose eigenvector matrix has condition number above
        ``1 / defect_tol`` is reported as defective.
    """

    eq_tol: float = 1e-10
    psd_tol: float = 1e-12
    defect_tol: float = 1e-8

    def __post_init__(self):
        for name in ("eq_tol", "psd_tol", "defect_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by (real, imag) and matching unit eigenvector columns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    defect_flag: bool
    cond: float

    def __iter__(self):
        yield self.eigenvalues
        yield self.vectors


def as_cmatrix(A) -> np.ndarray:
    """Return ``A`` as a square, finite complex128 array (always a copy)."""
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        raise DimensionError("empty matrix")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def dagger(A) -> np.ndarray:
    return np.conj(np.asarray(A)).T


def trace(A) -> complex:
    return complex(np.trace(np.asarray(A)))


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def operator_norm(A) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(A, dtype=complex), 2))


def condition_number(A) -> float:
    s = np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def _csqrt(z) -> complex:
    # +0.0 turns a signed zero imaginary part into +0.0 so that sqrt(-x) = +i sqrt(x).
    z = complex(z)
    return cmath.sqrt(complex(z.real + 0.0, z.imag + 0.0))


def _cbrt(z: complex) -> complex:
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / 3.0)


def _scale(M: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(M))) * M.shape[0])


def _roots_2x2(M: np.ndarray) -> list[complex]:
    a, b, c, d = (complex(x) for x in M.ravel())
    half_diff = (a - d) / 2
    disc = half_diff * half_diff + b * c
    noise = 8 * _EPS * (abs(half_diff) ** 2 + abs(b * c))
    mid = (a + d) / 2
    if abs(disc) <= noise:
        return [mid, mid]
    root = _csqrt(disc)
    return [mid - root, mid + root]


def _roots_3x3(M: np.ndarray) -> list[complex]:
    tr = complex(np.trace(M))
    minors = (
        M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
        + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    )
    det = complex(np.linalg.det(M))
    minors = complex(minors)
    # x^3 - tr x^2 + minors x - det = 0, shifted x = t + tr/3
    shift = tr / 3
    p = minors - tr * tr / 3
    q = -2 * tr ** 3 / 27 + tr * minors / 3 - det
    S = _scale(M) / M.shape[0]
    if abs(p) <= 1e-12 * S * S and abs(q) <= 1e-12 * S ** 3:
        return [shift] * 3
    # branch with the larger |u^3| avoids cancellation
    root = _csqrt(q * q / 4 + p ** 3 / 27)
    u3 = -q / 2 + root if abs(-q / 2 + root) >= abs(-q / 2 - root) else -q / 2 - root
    u = _cbrt(u3)
    omega = complex(-0.5, np.sqrt(3) / 2)
    roots = []
    for k in range(3):
        uk = u * omega ** k
        roots.append(uk - p / (3 * uk) + shift)

    def poly(x):
        return ((x - tr) * x + minors) * x - det

    def dpoly(x):
        return (3 * x - 2 * tr) * x + minors

    polished = []
    for r in roots:
        for _ in range(3):
            d = dpoly(r)
            if abs(d) < 1e-3 * S * S:
                break
            step = poly(r) / d
            r = r - step
            if abs(step) <= _EPS * max(1.0, abs(r)):
                break
        polished.append(r)
    return polished


def _raw_eigenvalues(M: np.ndarray) -> list[complex]:
    n = M.shape[0]
    if n == 1:
        return [complex(M[0, 0])]
    if n == 2:
        return _roots_2x2(M)
    if n == 3:
        return _roots_3x3(M)
    return [complex(x) for x in np.linalg.eigvals(M)]


def _clusters(values: list[complex], radius: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        for g in groups:
            if abs(v - values[g[0]]) <= radius:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _sort_key(values: np.ndarray, scale: float) -> np.ndarray:
    grid = 1e-12 * scale
    re_ = np.round(values.real / grid) * grid
    im_ = np.round(values.imag / grid) * grid
    return np.lexsort((im_, re_))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > np.max(np.abs(v)) * (1 - 1e-9)))
    return v * (abs(v[k]) / v[k])


def _ritz_cluster(M: np.ndarray, roots: list[complex], S: float):
    # close roots of a diagonalizable block: the roots themselves carry
    # O(sqrt(eps)) error, the Rayleigh-Ritz values of the subspace only O(eps)
    n, m = M.shape[0], len(roots)
    center = complex(np.mean(roots))
    spread = max(abs(r - center) for r in roots)
    _, s, vh = np.linalg.svd(M - center * np.eye(n))
    if np.sum(s <= max(1e-8 * S, 4 * spread)) < m:
        return None
    W = np.conj(vh[n - m:]).T
    ritz, Y = np.linalg.eig(dagger(W) @ M @ W)
    X = W @ Y
    if np.linalg.norm(M @ X - X * ritz, 2) > 1e-12 * S * max(1.0, np.linalg.norm(X, 2)):
        return None
    if condition_number(Y) > 1e6:
        return None
    return list(ritz), list(X.T)


def eig(A, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Eigen-decomposition with deterministic ordering and defect detection.

    Eigenvalues closer than ``1e-7`` (relative) are treated as one cluster.  A
    cluster whose geometric multiplicity falls short of its size is reported
    as defective and its eigenvalues are replaced by the cluster mean, which
    is far more accurate than the individual perturbed roots.

    Raises
    ------
    DimensionError
        If ``A`` is not square or larger than 8x8.
    """
    M = as_cmatrix(A)
    n = M.shape[0]
    if n > MAX_DIM:
        raise DimensionError(f"dimension {n} exceeds supported maximum {MAX_DIM}")
    # subnormal entries can stall LAPACK's SVD; they are far below any tolerance
    M = np.where(np.abs(M) < np.finfo(float).tiny, 0, M)
    S = _scale(M)
    values = _raw_eigenvalues(M)
    defective = False
    out_vals = np.array(values, dtype=complex)
    vectors = np.zeros((n, n), dtype=complex)
    groups = []
    for loose in _clusters(values, 1e-5 * S):
        refined = _ritz_cluster(M, [values[i] for i in loose], S) if len(loose) > 1 else None
        if refined is None:
            groups.extend([[loose[j] for j in g] for g in _clusters([values[i] for i in loose], 1e-7 * S)])
            continue
        ritz, cols = refined
        for i, r, col in zip(loose, ritz, cols):
            out_vals[i] = r
            vectors[:, i] = _fix_phase(col)
    for group in groups:
        m = len(group)
        center = complex(np.mean([values[i] for i in group]))
        spread = max(abs(values[i] - center) for i in group)
        _, s, vh = np.linalg.svd(M - center * np.eye(n))
        null_tol = max(1e-8 * S, 4 * spread)
        nullity = int(np.sum(s <= null_tol))
        if m == 1:
            cols = [np.conj(vh[-1])]
        elif nullity >= m:
            # Rayleigh-Ritz on the invariant subspace: the roots of a multiple
            # eigenvalue are only accurate to sqrt(eps), the projection to eps
            W = np.conj(vh[n - m:]).T
            ritz, Y = np.linalg.eig(dagger(W) @ M @ W)
            for i, r in zip(group, ritz):
                out_vals[i] = r
            cols = list((W @ Y).T)
        else:
            defective = True
            for i in group:
                out_vals[i] = center
            k = max(nullity, 1)
            cols = [np.conj(vh[n - k + min(j, k - 1)]) for j in range(m)]
        for i, col in zip(group, cols):
            vectors[:, i] = _fix_phase(col)
    # clean numerical dust on the imaginary axis
    dust = 1e-14 * S
    out_vals = np.where(np.abs(out_vals.imag) <= dust, out_vals.real + 0j, out_vals)
    order = _sort_key(out_vals, S)
    out_vals = out_vals[order]
    vectors = vectors[:, order]
    cond = condition_number(vectors)
    defective = defective or not np.isfinite(cond) or cond > 1.0 / tol.defect_tol
    return Spectrum(out_vals, vectors, bool(defective), cond)


def eigvals(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return eig(A, tol).eigenvalues


def _is_singular(M: np.ndarray, tol: Tolerances) -> bool:
    s = np.linalg.svd(M, compute_uv=False)
    return s[-1] <= tol.psd_tol * s[0] or s[0] == 0.0


def mat_inverse(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Inverse of ``A``.

    ``A`` counts as singular when its smallest singular value is below
    ``psd_tol`` times its largest one.

    Raises
    ------
    SingularMatrix
        Carrying ``|det A|``.
    """
    M = as_cmatrix(A)
    if _is_singular(M, tol):
        raise SingularMatrix(np.linalg.det(M))
    return np.linalg.inv(M)


def mat_function(A, f: Callable[[complex], complex], tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Apply the scalar function ``f`` spectrally: ``V diag(f(lam)) V^-1``."""
    spec = eig(A, tol)
    if spec.defect_flag:
        raise DefectiveMatrix(f"matrix is not diagonalizable (eigenvector condition {spec.cond:.3e})")
    fv = np.empty(len(spec.eigenvalues), dtype=complex)
    for k, lam in enumerate(spec.eigenvalues):
        value = complex(f(lam))
        if not cmath.isfinite(value):
            raise DomainError(f"function is not finite at eigenvalue {lam:.12g}", value=lam)
        fv[k] = value
    V = spec.vectors
    # V diag(fv) V^-1 without forming the inverse explicitly
    return np.linalg.solve(V.T, (V * fv).T).T


def is_hermitian(A, tol: Tolerances = DEFAULT_TOL) -> bool:
    M = np.asarray(A, dtype=complex)
    return bool(np.max(np.abs(M - dagger(M))) <= tol.eq_tol)


def is_positive_semidefinite(A, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Hermitian within ``eq_tol`` and no eigenvalue below ``-psd_tol``."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if not is_hermitian(M, tol):
        return False
    herm = (M + dagger(M)) / 2
    return bool(np.min(np.linalg.eigvalsh(herm)) >= -tol.psd_tol)


# ---------------------------------------------------------------------------
# text serialization

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_UNUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>{_NUM})(?P<im>[+-]{_UNUM})i$")
_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_UNUM})?)i$")
_REAL = re.compile(rf"^{_NUM}$")


def _fmt_real(x: float) -> str:
    x = float(x) + 0.0
    return repr(x) if x != int(x) or abs(x) >= 1e16 else str(int(x))


def format_entry(z: complex) -> str:
    z = complex(z)
    re_, im_ = _fmt_real(z.real), _fmt_real(z.imag)
    sign = "-" if im_.startswith("-") else "+"
    return f"{re_}{sign}{im_.lstrip('-')}i"


def parse_entry(token: str) -> complex:
    """Parse ``a+bi``, ``a``, or ``bi`` into a complex number."""
    token = token.strip()
    if _REAL.match(token):
        return complex(float(token), 0.0)
    m = _COMPLEX.match(token)
    if m:
        return complex(float(m.group("re")), float(m.group("im")))
    m = _IMAG.match(token)
    if m:
        coef = m.group("im")
        return complex(0.0, float(coef + "1") if coef in ("", "+", "-") else float(coef))
    raise ValueError(f"cannot parse matrix entry {token!r}")


def format_matrix(A, comment: str | None = None) -> str:
    """One row per line, ``a+bi`` entries separated by single spaces."""
    M = as_cmatrix(A)
    lines = [f"# {line}" for line in comment.splitlines()] if comment else []
    lines += [" ".join(format_entry(z) for z in row) for row in M]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([parse_entry(tok) for tok in line.split(" ") if tok])
    if not rows or any(len(r) != len(rows) for r in rows):
        raise DimensionError("matrix text must describe a non-empty square matrix")
    return as_cmatrix(rows)
