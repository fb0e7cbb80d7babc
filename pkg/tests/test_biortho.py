import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_unitary
from nhdm.biortho import (
    basis_expand,
    deformation,
    gdm_duals,
    has_property_pi,
    intertwines,
    resolution,
    riesz_pair_from,
    span_system,
)
from nhdm.errors import DimensionError, PropertyPIError, SingularMatrix, SpanError
from nhdm.models import SwansonParams, exceptional_R, gdm_rho, swanson_R, swanson_spectrum

R_CE = np.array([[1, 2], [1, 3]])


def random_R(seed, n, cond):
    rng = np.random.default_rng(seed)
    s = np.geomspace(1.0, 1.0 / cond, n)
    return random_unitary(rng, n) @ np.diag(s) @ random_unitary(rng, n)


class TestRieszPair:
    def test_identity(self):
        sys = riesz_pair_from(np.eye(3))
        assert np.allclose(sys.phis, np.eye(3))
        assert np.allclose(sys.psis, np.eye(3))

    def test_counterexample(self):
        sys = riesz_pair_from(R_CE)
        assert np.allclose(sys.phis.T, [[1, 1], [2, 3]])
        assert np.allclose(sys.psis.T, [[3, -2], [-1, 1]])
        assert sys.biorthonormality_error() < 1e-14

    def test_swanson_duals_match_closed_form(self):
        p = SwansonParams(1.0, 1.0)
        sys = riesz_pair_from(swanson_R(p))
        closed = swanson_spectrum(p).system
        assert np.allclose(sys.psis, closed.psis, atol=1e-12)

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            riesz_pair_from(exceptional_R(1.0))

    def test_bad_basis(self):
        with pytest.raises(ValueError):
            riesz_pair_from(np.eye(2), onb=[[1, 0], [1, 0]])
        with pytest.raises(DimensionError):
            riesz_pair_from(np.eye(2), onb=[[1, 0, 0]])

    @given(st.integers(0, 10_000), st.integers(2, 6), st.floats(1.0, 1e6))
    def test_resolution_of_identity(self, seed, n, cond):
        sys = riesz_pair_from(random_R(seed, n, cond))
        assert np.max(np.abs(resolution(sys) - np.eye(n))) <= 1e-9


class TestGdmDuals:
    def test_unitary(self, rng):
        U = random_unitary(rng, 3)
        sys = gdm_duals(U)
        assert np.allclose(sys.psis, sys.phis)
        assert np.allclose(sys.phis, U)

    def test_scaling(self):
        sys = gdm_duals(2 * np.eye(2))
        assert np.allclose(sys.phis, 2 * np.eye(2))
        assert np.allclose(sys.psis, 0.5 * np.eye(2))

    def test_agrees_with_riesz(self):
        assert np.allclose(gdm_duals(R_CE).psis, riesz_pair_from(R_CE).psis)

    def test_requires_pi(self):
        with pytest.raises(PropertyPIError):
            gdm_duals(exceptional_R(2.0))

    @given(st.integers(0, 10_000), st.integers(2, 5), st.floats(1.0, 1e4))
    def test_resolution_is_range_projector(self, seed, n, cond):
        R = random_R(seed, n, cond)
        sys = gdm_duals(R)
        proj = R @ np.linalg.pinv(R)
        assert np.max(np.abs(resolution(sys) - proj)) <= 1e-9
        assert np.max(np.abs(sys.psis - riesz_pair_from(R).psis)) <= 1e-9 * cond


class TestPropertyPI:
    def test_examples(self):
        assert has_property_pi(np.eye(3))
        assert has_property_pi(R_CE)
        for a1 in (0.3, 1.0, -2.0):
            assert not has_property_pi(exceptional_R(a1).R)

    def test_flags_agree(self):
        op = deformation(R_CE)
        assert op.invertible and op.pi_holds
        op = exceptional_R(1.0)
        assert not op.invertible and not op.pi_holds


class TestIntertwines:
    def test_trivial(self, rng):
        A = rng.normal(size=(3, 3))
        assert intertwines(A, np.eye(3), A) == (True, 0.0)

    def test_gdm_triple(self):
        g = gdm_rho(1.0, 1 / 3)
        ok, residual = intertwines(g.mat, g.R.R, g.base.mat)
        assert ok and residual < 1e-15

    def test_nilpotent(self):
        ok, residual = intertwines(np.array([[0, 1], [0, 0]]), np.eye(2), np.zeros((2, 2)))
        assert not ok
        assert residual == pytest.approx(1.0)

    def test_shapes(self):
        with pytest.raises(DimensionError):
            intertwines(np.eye(2), np.eye(3), np.eye(3))


class TestSpanSystem:
    def test_exceptional_span(self):
        sys = span_system(exceptional_R(1.0), lambdas=[0.5, 0.25, 0.25])
        assert sys.span_dim == 2
        assert sys.biorthonormality_error() < 1e-12
        # the dropped direction comes last, with a zero dual
        assert np.allclose(sys.psis[:, 2], 0)
        assert np.allclose(sys.lambdas, [0.5, 0.25, 0.25])

    def test_full_rank(self):
        sys = span_system(R_CE)
        assert sys.span_dim == 2
        assert np.allclose(sys.psis, riesz_pair_from(R_CE).psis)


class TestBasisExpand:
    def test_canonical(self):
        sys = riesz_pair_from(np.eye(3))
        assert np.allclose(basis_expand(sys, [0, 1, 0]), [0, 1, 0])

    def test_counterexample(self):
        sys = riesz_pair_from(R_CE)
        assert np.allclose(basis_expand(sys, [1, 0]), [3, -1])

    def test_span_error(self):
        R = exceptional_R(1.0)
        sys = span_system(R)
        phi3 = R.R[:, 2]
        c = basis_expand(sys, phi3)
        assert np.allclose(sys.phis[:, :2] @ c, phi3)
        e1 = np.array([1, 0, 0], dtype=complex)
        Q, _ = np.linalg.qr(sys.phis[:, :2])
        outside = e1 - Q @ (Q.conj().T @ e1)
        with pytest.raises(SpanError) as info:
            basis_expand(sys, outside)
        assert info.value.residual > 0.1

    def test_length(self):
        with pytest.raises(DimensionError):
            basis_expand(riesz_pair_from(np.eye(2)), [1, 0, 0])
