import itertools

import numpy as np
import pytest

from bernstein_simplex import (
    MomentQuery,
    SimplexPoint,
    ValidationError,
    central_moment_analytic,
    central_moment_bruteforce,
    fourth_moment_scaling,
)

from conftest import binom_pmf_exact


def random_point(rng, d):
    return SimplexPoint.of(rng.dirichlet(np.ones(d + 1))[:d])


class TestQueries:
    def test_order_bounds(self):
        with pytest.raises(ValidationError):
            MomentQuery(m=3, x=SimplexPoint.of(0.5), indices=(1,))
        with pytest.raises(ValidationError):
            MomentQuery(m=3, x=SimplexPoint.of(0.5), indices=(1,) * 5)

    def test_index_range(self):
        with pytest.raises(ValidationError):
            MomentQuery(m=3, x=SimplexPoint.of((0.2, 0.3)), indices=(1, 3))

    def test_order_four_has_no_closed_form(self):
        query = MomentQuery(m=3, x=SimplexPoint.of(0.5), indices=(1, 1, 1, 1))
        with pytest.raises(ValidationError):
            central_moment_analytic(query)


class TestClosedForms:
    def test_variance_hand_value(self):
        q = MomentQuery(m=3, x=SimplexPoint.of((0.2, 0.3)), indices=(1, 1))
        assert central_moment_analytic(q) == pytest.approx(0.48, abs=1e-15)
        assert central_moment_bruteforce(q) == pytest.approx(0.48, abs=1e-13)

    def test_covariance_hand_value(self):
        q = MomentQuery(m=3, x=SimplexPoint.of((0.2, 0.3)), indices=(1, 2))
        assert central_moment_analytic(q) == pytest.approx(-0.18, abs=1e-15)
        assert central_moment_bruteforce(q) == pytest.approx(-0.18, abs=1e-13)

    def test_third_moment_vanishes_at_half(self):
        q = MomentQuery(m=2, x=SimplexPoint.of(0.5), indices=(1, 1, 1))
        assert central_moment_analytic(q) == pytest.approx(0.0, abs=1e-15)
        assert central_moment_bruteforce(q) == pytest.approx(0.0, abs=1e-14)

    def test_exhaustive_oracle_equivalence(self):
        rng = np.random.default_rng(7)
        for d in (1, 2, 3):
            index_sets = list(itertools.product(range(1, d + 1), repeat=2)) + list(
                itertools.product(range(1, d + 1), repeat=3)
            )
            for m in range(1, 7):
                for _ in range(3):
                    x = random_point(rng, d)
                    for indices in index_sets:
                        q = MomentQuery(m=m, x=x, indices=indices)
                        assert central_moment_analytic(q) == pytest.approx(
                            central_moment_bruteforce(q), abs=1e-12
                        )

    def test_permutation_symmetry(self):
        rng = np.random.default_rng(8)
        x = random_point(rng, 3)
        for indices in [(1, 2, 3), (2, 1, 3), (3, 2, 1)]:
            q = MomentQuery(m=5, x=x, indices=indices)
            base = MomentQuery(m=5, x=x, indices=(1, 2, 3))
            assert central_moment_analytic(q) == pytest.approx(
                central_moment_analytic(base), abs=1e-15
            )
            assert central_moment_bruteforce(q) == pytest.approx(
                central_moment_bruteforce(base), abs=1e-13
            )

    @pytest.mark.parametrize("d", [2, 3])
    def test_covariance_matrix_psd(self, d):
        rng = np.random.default_rng(9 + d)
        x = random_point(rng, d)
        m = 5
        cov = np.array(
            [
                [
                    central_moment_bruteforce(MomentQuery(m=m, x=x, indices=(i, j)))
                    for j in range(1, d + 1)
                ]
                for i in range(1, d + 1)
            ]
        )
        eigenvalues = np.linalg.eigvalsh(cov)
        assert np.all(eigenvalues >= -1e-12)

    def test_vertex_is_degenerate(self):
        q = MomentQuery(m=4, x=SimplexPoint.of((1.0, 0.0)), indices=(1, 1))
        assert central_moment_bruteforce(q) == pytest.approx(0.0, abs=1e-14)
        q4 = MomentQuery(m=4, x=SimplexPoint.of(1.0), indices=(1, 1, 1, 1))
        assert central_moment_bruteforce(q4) == pytest.approx(0.0, abs=1e-14)


class TestFourthMoment:
    def test_hand_enumeration(self):
        q = MomentQuery(m=2, x=SimplexPoint.of(0.5), indices=(1, 1, 1, 1))
        assert central_moment_bruteforce(q) == pytest.approx(0.5, abs=1e-14)

    def test_binomial_kurtosis_formula(self):
        p, q = 0.3, 0.7
        for m in (4, 8, 16):
            query = MomentQuery(m=m, x=SimplexPoint.of(p), indices=(1, 1, 1, 1))
            expected = m * p * q * (1 + 3 * (m - 2) * p * q)
            assert central_moment_bruteforce(query) == pytest.approx(expected, rel=1e-12)

    def test_scaling_sequence(self):
        seq = fourth_moment_scaling((4, 8, 16, 32), 0.5, (1, 1, 1, 1))
        pmf_check = [
            np.sum((np.arange(m + 1) - m * 0.5) ** 4 * binom_pmf_exact(m, 0.5)) / m**2
            for m in (4, 8, 16, 32)
        ]
        np.testing.assert_allclose(seq, pmf_check, rtol=1e-12)
        assert max(seq) <= 3.0 / 16.0 + 0.05

    def test_requires_four_indices(self):
        with pytest.raises(ValidationError):
            fourth_moment_scaling((4, 8), 0.5, (1, 1))
