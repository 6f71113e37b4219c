from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from quadham.linalg import (
    AsymmetricMatrixError,
    exact_pinv,
    exact_rank,
    exact_rref,
    numeric_rank,
    subspace_intersection_dim,
    sym_pinv,
)


def random_symmetric(rng, m, r):
    basis = rng.standard_normal((m, r))
    weights = rng.choice([-1, 1], size=r) * rng.uniform(0.5, 3.0, size=r)
    return (basis * weights) @ basis.T


class TestSymPinv:
    def test_identity(self):
        np.testing.assert_allclose(sym_pinv(np.eye(2)), np.eye(2))

    def test_rank_one(self):
        np.testing.assert_allclose(sym_pinv([[1, 1], [1, 1]]), np.full((2, 2), 0.25), atol=1e-15)

    def test_zero(self):
        np.testing.assert_array_equal(sym_pinv(np.zeros((3, 3))), np.zeros((3, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(AsymmetricMatrixError):
            sym_pinv([[1, 2], [0, 1]])

    def test_tolerance_zeroes_small_eigenvalues(self):
        out = sym_pinv(np.diag([1.0, 1e-12]))
        assert out[1, 1] == 0.0

    @given(st.integers(1, 5), st.data(), st.integers(0, 2**31))
    def test_penrose_identities(self, m, data, seed):
        r = data.draw(st.integers(0, m))
        a = random_symmetric(np.random.default_rng(seed), m, r)
        s = sym_pinv(a)
        scale = max(1.0, np.max(np.abs(a)), np.max(np.abs(s)))
        assert np.max(np.abs(a @ s @ a - a)) <= 1e-10 * scale**3
        assert np.max(np.abs(s @ a @ s - s)) <= 1e-10 * scale**3
        assert np.max(np.abs(s - s.T)) <= 1e-12 * scale
        assert numeric_rank(a) == r


rational_matrix = st.integers(1, 4).flatmap(
    lambda n: st.lists(
        st.lists(st.builds(Fraction, st.integers(-3, 3), st.integers(1, 3)), min_size=n, max_size=n),
        min_size=1,
        max_size=4,
    )
)


class TestExact:
    @given(rational_matrix)
    def test_rank_matches_sympy(self, rows):
        assert exact_rank(rows) == sp.Matrix(rows).rank()

    @given(rational_matrix)
    def test_rref_matches_sympy(self, rows):
        red, piv = exact_rref(rows)
        ref, spiv = sp.Matrix(rows).rref()
        assert list(piv) == list(spiv)
        assert [[sp.Rational(x.numerator, x.denominator) for x in r] for r in red] == ref.tolist()[: len(piv)]

    @given(rational_matrix)
    def test_pinv_matches_sympy(self, rows):
        got = exact_pinv(rows)
        want = sp.Matrix(rows).pinv()
        assert sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in r] for r in got]) == want

    def test_pinv_rank_one(self):
        assert exact_pinv([[1, 1], [1, 1]]) == [[Fraction(1, 4)] * 2] * 2

    def test_sparse_rows(self):
        assert exact_rank([{0: 1, 3: 2}, {3: 4, 0: 2}, {1: 1}]) == 2

    def test_intersection(self):
        # span{e0 + e1, e2}; coordinates {0, 2} only see e2
        assert subspace_intersection_dim([{0: 1, 1: 1}, {2: 1}], [0, 2]) == 1
        assert subspace_intersection_dim([{0: 1, 1: 1}, {1: 1}], [0]) == 1
