import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nhdm.errors import DefectiveMatrix, DimensionError, DomainError, SingularMatrix
from nhdm.matcore import (
    DEFAULT_TOL,
    Tolerances,
    condition_number,
    eig,
    eigvals,
    format_matrix,
    is_hermitian,
    is_positive_semidefinite,
    mat_function,
    mat_inverse,
    operator_norm,
    parse_entry,
    parse_matrix,
    trace,
)
from nhdm.models import SwansonParams, TwoStateParams, exceptional_R, swanson_h, two_state_h

RHO_CE = np.array([[1, -0.2], [1, 0]])

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def complex_matrices(n):
    return st.tuples(arrays(float, (n, n), elements=finite), arrays(float, (n, n), elements=finite)).map(
        lambda ab: ab[0] + 1j * ab[1]
    )


class TestTolerances:
    def test_defaults(self):
        assert (DEFAULT_TOL.eq_tol, DEFAULT_TOL.psd_tol, DEFAULT_TOL.defect_tol) == (1e-10, 1e-12, 1e-8)

    @pytest.mark.parametrize("field", ["eq_tol", "psd_tol", "defect_tol"])
    def test_must_be_positive(self, field):
        with pytest.raises(ValueError):
            Tolerances(**{field: 0.0})


class TestEig:
    def test_identity(self):
        s = eig(np.eye(2))
        assert np.allclose(s.eigenvalues, [1, 1])
        assert not s.defect_flag

    def test_two_state_broken(self):
        H = two_state_h(TwoStateParams(1.0, 0.5, math.pi / 2))
        s = eig(H)
        w = math.sqrt(0.75)
        assert np.allclose(s.eigenvalues, [-1j * w, 1j * w], atol=1e-14)

    def test_swanson_exceptional_point_is_defective(self):
        _, H = swanson_h(SwansonParams(1.0, -0.5))
        s = eig(H)
        assert np.allclose(s.eigenvalues, [1, 1, 1], atol=1e-7)
        assert s.defect_flag

    def test_ordering_real_then_imaginary(self):
        A = np.diag([2, 1j, -1j, 0.5])
        assert np.allclose(eigvals(A), [-1j, 1j, 0.5, 2])

    def test_non_square(self):
        with pytest.raises(DimensionError):
            eig(np.zeros((2, 3)))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_residuals_random(self, rng, n):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        s = eig(A)
        for lam, v in zip(s.eigenvalues, s.vectors.T):
            assert np.linalg.norm(A @ v - lam * v) <= 1e-10 * operator_norm(A) * np.linalg.norm(v)

    @given(complex_matrices(3))
    def test_reconstruction(self, A):
        s = eig(A)
        if s.defect_flag:
            return
        V = s.vectors
        rebuilt = V @ np.diag(s.eigenvalues) @ np.linalg.inv(V)
        assert np.max(np.abs(rebuilt - A)) <= 1e-9 * max(1.0, operator_norm(A))


class TestInverse:
    def test_counterexample(self):
        assert np.array_equal(mat_inverse([[1, 2], [1, 3]]), np.array([[3, -2], [-1, 1]]))

    def test_identity(self):
        assert np.allclose(mat_inverse(np.eye(3)), np.eye(3))

    def test_exceptional_R_singular(self):
        with pytest.raises(SingularMatrix) as info:
            mat_inverse(exceptional_R(1.0).R)
        assert info.value.det < 1e-12


class TestMatFunction:
    def test_identity_function(self, rng):
        A = rng.normal(size=(3, 3))
        assert np.allclose(mat_function(A, lambda z: z), A, atol=1e-10)

    def test_entropy_kernel(self):
        f = lambda z: 0 if z == 0 else -z * np.log(z)
        S = mat_function(np.diag([2 / 3, 1 / 3]), f)
        assert np.allclose(S, np.diag([2 / 3 * math.log(1.5), math.log(3) / 3]))
        assert trace(S).real == pytest.approx(math.log(3) - 2 / 3 * math.log(2))

    def test_square_matches_product(self):
        assert np.allclose(mat_function(RHO_CE, lambda z: z * z), RHO_CE @ RHO_CE, atol=1e-12)

    def test_defective(self):
        with pytest.raises(DefectiveMatrix):
            mat_function(np.array([[1, 1], [0, 1]]), lambda z: z)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            mat_function(np.diag([0.0, 1.0]), lambda z: np.log(z) if z else -np.inf)

    @given(arrays(float, 3, elements=st.floats(0.05, 1.0)))
    def test_exp_log_round_trip(self, lam):
        rng = np.random.default_rng(0)
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        A = q @ np.diag(lam) @ q.T
        back = mat_function(mat_function(A, np.log), np.exp)
        assert np.max(np.abs(back - A)) <= 1e-8


class TestPositivity:
    def test_examples(self):
        assert is_positive_semidefinite(np.diag([2 / 3, 1 / 3]))
        assert not is_positive_semidefinite(RHO_CE)
        assert is_positive_semidefinite(np.array([[2, 1], [1, 3]]) / 5)

    @given(complex_matrices(3))
    def test_psd_implies_hermitian(self, A):
        if is_positive_semidefinite(A):
            assert is_hermitian(A)

    @given(complex_matrices(3))
    def test_gram_matrices_are_psd(self, A):
        assert is_positive_semidefinite(A @ A.conj().T / max(1.0, operator_norm(A)) ** 2)


class TestNorms:
    def test_operator_norm_examples(self):
        assert operator_norm(np.eye(4)) == pytest.approx(1)
        assert operator_norm(np.diag([3, -2])) == pytest.approx(3)
        assert operator_norm(np.array([[1, 2], [1, 3]])) == pytest.approx(math.sqrt((15 + math.sqrt(221)) / 2))

    def test_condition_number(self):
        assert condition_number(np.diag([1, 1e-3])) == pytest.approx(1e3)
        assert condition_number(exceptional_R(1.0).R) > 1e15

    @given(complex_matrices(3), complex_matrices(3))
    def test_trace_cyclic(self, A, B):
        assert abs(trace(A @ B) - trace(B @ A)) <= 1e-9 * (1 + operator_norm(A) * operator_norm(B))


class TestSerialization:
    @pytest.mark.parametrize(
        "token, value",
        [("1", 1), ("1+0i", 1), ("2i", 2j), ("-i", -1j), ("i", 1j), ("0.5-2.5i", 0.5 - 2.5j), ("1e-3+1e2i", 1e-3 + 100j)],
    )
    def test_parse_entry(self, token, value):
        assert parse_entry(token) == value

    def test_bad_entry(self):
        with pytest.raises(ValueError):
            parse_entry("1+")

    def test_round_trip_with_comment(self, rng):
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        text = format_matrix(A, comment="random")
        assert text.startswith("# random\n")
        assert np.array_equal(parse_matrix(text), A)

    def test_integer_format(self):
        assert format_matrix(np.eye(2)) == "1+0i 0+0i\n0+0i 1+0i\n"
