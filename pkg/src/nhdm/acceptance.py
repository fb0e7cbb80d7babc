"""Acceptance suite: eight numbered criteria with PASS/FAIL reporting.

Each criterion collects a list of :class:`Check` items (a measured value and
the limit it must not exceed) and passes when every check does.  A global
tolerance override replaces each stated limit ``L`` with ``min(L, override)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .biortho import has_property_pi, intertwines, resolution
from .density import (
    dm_new,
    entropy_operator,
    entropy_trace,
    functional_eval,
    gdm_from_pi,
    purity,
    pure_state,
    rdm_new,
)
from .errors import NHDMError
from .evolution import (
    EvolutionSpec,
    evolve_numeric,
    swanson_rdm1_state,
    swanson_rho0_closed,
    swanson_thermal_state,
    two_state_rdm_closed,
    two_state_rho0_closed,
)
from .matcore import eigvals, is_positive_semidefinite, operator_norm
from .models import (
    SwansonParams,
    TwoStateParams,
    exceptional_R,
    gdm_rho,
    rdm2_closed_forms,
    swanson_h,
    two_state_h,
)

__all__ = ["Check", "CriterionResult", "CRITERIA", "run_acceptance", "format_result"]

LOG3 = math.log(3)
LOG2 = math.log(2)
# purity threshold separating pure from mixed draws in the randomized suite
PURITY_GAP = 1e-3


@dataclass(frozen=True)
class Check:
    label: str
    value: float
    limit: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.limit)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    checks: tuple[Check, ...] = ()
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def worst(self) -> Check | None:
        def ratio(c):
            if c.limit > 0:
                return c.value / c.limit
            return math.inf if c.value > 0 else 0.0

        return max(self.checks, key=ratio, default=None)


class _Ctx:
    def __init__(self, override: float | None):
        self.override = override
        self.checks: list[Check] = []

    def le(self, label: str, value, limit: float) -> None:
        if self.override is not None:
            limit = min(limit, self.override)
        self.checks.append(Check(label, float(value), float(limit)))

    def count(self, label: str, failures: int) -> None:
        self.checks.append(Check(label, float(failures), 0.0))


# ---------------------------------------------------------------------------
# criteria


def _counterexample(ctx: _Ctx, rng) -> None:
    rho0 = dm_new(np.array([[2, 1], [1, 3]]) / 5)
    rho = rdm_new(np.array([[1, 2], [1, 3]]), rho0).mat
    expected = np.array([[1, -0.2], [1, 0]])
    ctx.le("max |rho - [[1,-1/5],[1,0]]|", np.max(np.abs(rho - expected)), 1e-14)
    f = np.array([0.4, -1.0])
    ctx.le("|<f, rho f> + 4/25|", abs(np.vdot(f, rho @ f) + 4 / 25), 1e-14)
    ctx.count("rho reported PSD", int(is_positive_semidefinite(rho)))
    ctx.le("|tr rho - 1|", abs(np.trace(rho) - 1), 1e-14)


def _two_state(ctx: _Ctx, rng) -> None:
    target_s = LOG3 - 2 / 3 * LOG2
    tr = pu = en = ent_op = 0.0
    for t in np.linspace(0, 4 * math.pi, 20):
        for y in np.linspace(-0.45, 0.45, 9):
            rho = two_state_rdm_closed(float(t), float(y))
            tr = max(tr, abs(np.trace(rho.mat) - 1))
            pu = max(pu, abs(purity(rho) - 5 / 9))
            en = max(en, abs(entropy_trace(rho) - target_s))
            ent_op = max(ent_op, abs(entropy_operator(rho).trace - target_s))
    ctx.le("max |tr rho - 1|", tr, 1e-11)
    ctx.le("max |purity - 5/9|", pu, 1e-10)
    ctx.le("max |entropy_trace - (log 3 - 2/3 log 2)|", en, 1e-10)
    ctx.le("max |tr S(rho) - (log 3 - 2/3 log 2)|", ent_op, 1e-10)


def _rdm1_limits(ctx: _Ctx, rng) -> None:
    near = swanson_rdm1_state(SwansonParams(1.0, -0.5 + 1e-6))
    ctx.le("near EP |purity - 1/3|", abs(purity(near) - 1 / 3), 5e-3)
    ctx.le("near EP |entropy - log 3|", abs(entropy_trace(near) - LOG3), 5e-3)
    for a2 in (1e4, -1e4):
        far = swanson_rdm1_state(SwansonParams(1.0, a2))
        ctx.le(f"alpha2={a2:g} |purity - 1/2|", abs(purity(far) - 0.5), 1e-3)
        ctx.le(f"alpha2={a2:g} |entropy - log 2|", abs(entropy_trace(far) - LOG2), 1e-3)


def _rdm2_closed(ctx: _Ctx, rng) -> None:
    dp = de = 0.0
    for beta in (0.5, 1.0, 2.0, 5.0):
        for a2 in np.linspace(-0.499, 10, 30):
            p = SwansonParams(1.0, float(a2))
            rho = swanson_thermal_state(beta, p)
            cp, ce = rdm2_closed_forms(beta, p)
            dp = max(dp, abs(purity(rho) - cp))
            de = max(de, abs(entropy_trace(rho) - ce), abs(entropy_operator(rho).trace.real - ce))
    ctx.le("max |constructed purity - closed form|", dp, 1e-9)
    ctx.le("max |constructed entropy - closed form|", de, 1e-9)
    p0, e0 = rdm2_closed_forms(0.0, SwansonParams(1.0, 1.0))
    ctx.le("X=0 |purity - 1/3|", abs(p0 - 1 / 3), 1e-10)
    ctx.le("X=0 |entropy - log 3|", abs(e0 - LOG3), 1e-10)
    p50, e50 = rdm2_closed_forms(50 / math.sqrt(3), SwansonParams(1.0, 1.0))
    ctx.le("X=50 |purity - 1|", abs(p50 - 1), 1e-10)
    ctx.le("X=50 |entropy|", abs(e50), 1e-10)


def _gdm(ctx: _Ctx, rng) -> None:
    res = sres = tr = pu = 0.0
    for a1 in (0.5, 1.0, 2.0):
        for l1 in (0.0, 0.2, 0.5, 1.0):
            g = gdm_rho(a1, l1)
            R = g.R.R
            res = max(res, intertwines(g.mat, R, g.base.mat)[1])
            S = entropy_operator(g).mat
            S0 = entropy_operator(g.base).mat
            sres = max(sres, operator_norm(S @ R - R @ S0))
            tr = max(tr, abs(np.trace(g.mat) - (1 + l1) / 2))
            pu = max(pu, abs(purity(g) - (((1 - l1) / 2) ** 2 + l1 ** 2)))
    ctx.le("max ||rho R - R rho0||", res, 1e-12)
    ctx.le("max ||S(rho) R - R S(rho0)||", sres, 1e-12)
    ctx.le("max |tr rho - (1 + l1)/2|", tr, 1e-12)
    ctx.le("max |purity - closed form|", pu, 1e-12)
    grid = np.linspace(0, 1, 101)
    values = [purity(gdm_rho(1.0, float(l))) for l in grid]
    ctx.le("|argmin purity - 1/5|", abs(grid[int(np.argmin(values))] - 0.2), 1e-12)
    ctx.le("|purity(1/5) - 1/5|", abs(purity(gdm_rho(1.0, 0.2)) - 0.2), 1e-12)
    top = gdm_rho(1.0, 1.0)
    e2 = np.zeros((3, 3))
    e2[1, 1] = 1
    ctx.le("l1=1 max |rho - |e2><e2||", np.max(np.abs(top.mat - e2)), 1e-12)
    ctx.le("l1=1 |purity - 1|", abs(purity(top) - 1), 1e-12)
    ctx.le("l1=1 |entropy|", max(abs(entropy_trace(top)), abs(entropy_operator(top).trace)), 1e-12)


def _trajectory(ctx: _Ctx, label, H0, rho_init, closed) -> None:
    grid = np.linspace(0, 10, 201)
    traj = evolve_numeric(EvolutionSpec(H0, rho_init, grid))
    lam = np.sort(rho_init.lambdas)
    err = tr = spec = 0.0
    for t, rho in zip(grid, traj):
        err = max(err, np.max(np.abs(rho - closed(t))))
        tr = max(tr, abs(np.trace(rho) - 1))
        spec = max(spec, np.max(np.abs(np.linalg.eigvalsh(rho) - lam)))
    ctx.le(f"{label} max |RK4 - closed form|", err, 1e-8)
    ctx.le(f"{label} trace drift", tr, 1e-10)
    ctx.le(f"{label} eigenvalue drift", spec, 1e-8)


def _evolution(ctx: _Ctx, rng) -> None:
    c = (2 / 3, 0.0, 0.0, 1 / 3)
    H2 = two_state_h(TwoStateParams(1.0, 0.5, 0.0))
    _trajectory(ctx, "two-state", H2, dm_new(np.diag([2 / 3, 1 / 3])),
                lambda t: two_state_rho0_closed(t, c, 0.5))
    lam = (0.5, 0.3, 0.2)
    _, H3 = swanson_h(SwansonParams(1.0, 1.0))
    _trajectory(ctx, "swanson", H3, dm_new(np.diag(lam)),
                lambda t: swanson_rho0_closed(t, 1.0, lam))


def _haar(rng, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_deformation(rng, n: int, max_cond: float = 1e6) -> np.ndarray:
    """``U diag(s) W`` with Haar ``U, W`` and condition number log-uniform in ``[1, max_cond]``."""
    cond = 10 ** rng.uniform(0, math.log10(max_cond))
    s = np.exp(rng.uniform(-math.log(cond), 0, size=n))
    s[0], s[-1] = 1.0, 1.0 / cond
    return _haar(rng, n) @ np.diag(s) @ _haar(rng, n)


def random_state(rng, n: int, pure: bool):
    """Random density matrix; mixed draws have purity at most ``1 - 10 PURITY_GAP``."""
    if pure:
        return pure_state(rng.normal(size=n) + 1j * rng.normal(size=n))
    while True:
        lam = rng.dirichlet(np.ones(n))
        if np.sum(lam ** 2) <= 1 - 10 * PURITY_GAP:
            break
    U = _haar(rng, n)
    return dm_new((U * lam) @ U.conj().T)


def _properties(ctx: _Ctx, rng) -> None:
    spec = tr = res = adj = proj = 0.0
    cont = p12 = 0
    for i in range(500):
        n = int(rng.integers(2, 5))
        R = random_deformation(rng, n)
        pure = i % 5 == 0
        base = random_state(rng, n, pure)
        rdm = rdm_new(R, base)
        gdm = gdm_from_pi(R, base)
        spec = max(spec, np.max(np.abs(np.sort(eigvals(rdm.mat).real) - np.sort(base.lambdas))))
        tr = max(tr, abs(np.trace(rdm.mat) - 1), abs(np.trace(gdm.mat) - 1))
        X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        nX = operator_norm(X)
        sv = np.linalg.svd(R, compute_uv=False)
        bound_r = sv[0] / sv[-1] * nX
        bound_g = (sv[0] / sv[-1]) ** 2 * nX
        cont += int(abs(functional_eval(rdm, X)) > bound_r * (1 + 1e-12))
        cont += int(abs(functional_eval(gdm, X)) > bound_g * (1 + 1e-12))
        for state in (base, rdm, gdm):
            p1 = abs(purity(state) - 1) <= PURITY_GAP
            p2 = operator_norm(entropy_operator(state).mat) <= PURITY_GAP
            p12 += int(p1 != p2 or p1 != pure)
        res = max(res, np.max(np.abs(resolution(rdm.system) - np.eye(n))))
        nR = operator_norm(R)
        for j in range(n):
            phi, psi = rdm.system.phis[:, j], rdm.system.psis[:, j]
            lj = rdm.system.lambdas[j]
            adj = max(adj, np.linalg.norm(rdm.mat.conj().T @ psi - lj * psi) / np.linalg.norm(psi))
            e = base.vectors[:, j]
            P = np.outer(phi, psi.conj())
            proj = max(proj, operator_norm(P @ R - R @ np.outer(e, e.conj())) / nR)
    ctx.le("spectrum preservation max |eig(rho) - eig(rho0)|", spec, 1e-9)
    ctx.le("max |tr rho - 1| (Riesz and PI)", tr, 1e-10)
    ctx.count("continuity bound violations", cont)
    ctx.count("purity/entropy-operator equivalence mismatches", p12)
    ctx.le("resolution of identity max error", res, 1e-9)
    ctx.le("adjoint relation max ||rho^dagger psi - lam psi|| / ||psi||", adj, 1e-9)
    ctx.le("max ||P_j R - R P_j0|| / ||R||", proj, 1e-10)


def _property_pi(ctx: _Ctx, rng) -> None:
    wrong_star = wrong_random = 0
    for _ in range(200):
        a1 = float(rng.uniform(0.05, 5.0) * rng.choice([-1.0, 1.0]))
        wrong_star += int(has_property_pi(exceptional_R(a1).R))
        n = int(rng.integers(2, 9))
        R = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        wrong_random += int(not has_property_pi(R))
    ctx.count("exceptional R reported PI", wrong_star)
    ctx.count("random invertible R reported not PI", wrong_random)


CRITERIA = {
    "counterexample": (1, _counterexample),
    "two-state": (2, _two_state),
    "rdm1-limits": (3, _rdm1_limits),
    "rdm2-closed-forms": (4, _rdm2_closed),
    "gdm": (5, _gdm),
    "evolution": (6, _evolution),
    "properties": (7, _properties),
    "property-pi": (8, _property_pi),
}


def _select(only) -> list[str]:
    if not only:
        return list(CRITERIA)
    chosen = []
    for key in only:
        key = str(key).strip()
        match = [n for n, (num, _) in CRITERIA.items() if key in (n, str(num))]
        if not match:
            raise KeyError(f"unknown criterion {key!r}; choose from {', '.join(CRITERIA)}")
        chosen.extend(m for m in match if m not in chosen)
    return sorted(chosen, key=lambda n: CRITERIA[n][0])


def run_acceptance(only=None, tol: float | None = None, seed: int = 0) -> list[CriterionResult]:
    """Run the selected criteria (all by default).

    Parameters
    ----------
    only : iterable of str or int, optional
        Criterion names or numbers.
    tol : float, optional
        Tightens every stated limit to ``min(limit, tol)``.
    seed : int
        Seed for the randomized criteria; each criterion gets its own stream.
    """
    results = []
    for name in _select(only):
        number, func = CRITERIA[name]
        ctx = _Ctx(tol)
        rng = np.random.default_rng([seed, number])
        try:
            func(ctx, rng)
            results.append(CriterionResult(number, name, tuple(ctx.checks)))
        except NHDMError as exc:
            results.append(CriterionResult(number, name, tuple(ctx.checks), error=f"{type(exc).__name__}: {exc}"))
    return results


def format_result(r: CriterionResult, verbose: bool = False) -> str:
    status = "PASS" if r.passed else "FAIL"
    head = f"{status} [{r.number}] {r.name}"
    if r.error is not None:
        line = f"{head}: error {r.error}"
    else:
        w = r.worst()
        failing = [c for c in r.checks if not c.passed]
        shown = failing if failing else [w]
        line = head + ": " + "; ".join(f"{c.label} = {c.value:.3g} (limit {c.limit:.3g})" for c in shown)
    if verbose:
        line += "".join(
            f"\n    {'ok ' if c.passed else 'BAD'} {c.label} = {c.value:.3g} (limit {c.limit:.3g})"
            for c in r.checks
        )
    return line
