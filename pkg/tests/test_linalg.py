import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_complex
from wrhss.linalg import (Banded, BandedLU, KroneckerSum, ScaledIdentity,
                          Shifted, SingularPivotError, Tridiagonal,
                          as_cvector, banded_lu_solve, vector_norms)


def test_as_cvector_checks():
    assert as_cvector([1, 2]).dtype == np.complex128
    with pytest.raises(ValueError):
        as_cvector([1, 2], length=3)
    with pytest.raises(ValueError):
        as_cvector([np.nan])
    with pytest.raises(ValueError):
        as_cvector(np.zeros((2, 2)))


def test_vector_norms_345():
    assert vector_norms([3, 4j]) == (5.0, 4.0)


class TestTridiagonal:
    def test_matvec_matches_dense(self, rng):
        n = 9
        T = Tridiagonal(random_complex(rng, n - 1), random_complex(rng, n),
                        random_complex(rng, n - 1))
        x = random_complex(rng, 3, n)
        np.testing.assert_allclose(T.matvec(x), x @ T.todense().T,
                                   atol=1e-13)

    def test_adjoint_is_conjugate_transpose(self, rng):
        T = Tridiagonal(random_complex(rng, 4), random_complex(rng, 5),
                        random_complex(rng, 4))
        np.testing.assert_array_equal(T.adjoint().todense(),
                                      T.todense().conj().T)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            Tridiagonal.constant(4, -1, 2, -1).matvec(np.ones(5))

    def test_sparse_matches_dense(self):
        T = Tridiagonal.constant(6, -1.5, 2.0, 0.5)
        np.testing.assert_array_equal(T.tosparse().toarray(), T.todense())


class TestKroneckerSum:
    def test_matvec_matches_kron_assembly(self, rng):
        n = 5
        T = Tridiagonal.constant(n, -1.3, 2.0, -0.7)
        K = KroneckerSum(T)
        t = T.todense()
        dense = np.kron(np.eye(n), t) + np.kron(t, np.eye(n))
        x = random_complex(rng, n * n)
        np.testing.assert_allclose(K.matvec(x), dense @ x, atol=1e-13)
        np.testing.assert_allclose(K.todense(), dense)
        np.testing.assert_allclose(K.tosparse().toarray(), dense)

    def test_rejects_non_square_grid(self):
        with pytest.raises(ValueError):
            KroneckerSum(Tridiagonal.constant(3, 1, 2, 1)).matvec(np.ones(8))


class TestBandedLU:
    def test_hand_solved_system(self):
        # tridiag(-1, 3, -1) x = e1, solved by hand: (8/21, 1/7, 1/21)
        band = Banded.from_tridiagonal(Tridiagonal.constant(3, -1, 3, -1))
        x = banded_lu_solve(band, np.array([1.0, 0, 0]))
        np.testing.assert_allclose(x, [8 / 21, 1 / 7, 1 / 21], atol=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 30), kl=st.integers(0, 4), ku=st.integers(0, 4),
           seed=st.integers(0, 2 ** 32 - 1))
    def test_random_band_residual(self, n, kl, ku, seed):
        rng = np.random.default_rng(seed)
        a = random_complex(rng, n, n)
        a = np.triu(np.tril(a, ku), -kl) + 4 * (kl + ku + 1) * np.eye(n)
        b = random_complex(rng, n)
        x = BandedLU(Banded.from_dense(a, kl, ku)).solve(b)
        assert np.linalg.norm(a @ x - b) <= 1e-12 * np.linalg.norm(b)

    def test_pivoting_handles_zero_leading_entry(self):
        a = np.array([[0.0, 1.0], [1.0, 1.0]])
        x = banded_lu_solve(Banded.from_dense(a, 1, 1), np.array([2.0, 3.0]))
        np.testing.assert_allclose(x, [1.0, 2.0])

    def test_singular_reports_column(self):
        with pytest.raises(SingularPivotError) as info:
            BandedLU(Banded.from_dense(np.zeros((3, 3)), 1, 1))
        assert info.value.index == 0

    def test_multiple_right_hand_sides(self, rng):
        a = np.diag(np.full(6, 4.0)) + np.diag(np.ones(5), 1)
        b = random_complex(rng, 6, 3)
        x = BandedLU(Banded.from_dense(a, 0, 1)).solve(b)
        np.testing.assert_allclose(a @ x, b, atol=1e-13)


def test_shifted_and_scaled_identity():
    T = Tridiagonal.constant(4, -1, 2, -1)
    op = Shifted(T, 3.0, -1.0)
    np.testing.assert_allclose(op.todense(), 3 * np.eye(4) - T.todense())
    np.testing.assert_allclose(op.tosparse().toarray(), op.todense())
    x = np.arange(4.0)
    np.testing.assert_allclose(op.matvec(x), op.todense() @ x)
    assert ScaledIdentity(0.0).is_zero and not ScaledIdentity(2).is_zero
