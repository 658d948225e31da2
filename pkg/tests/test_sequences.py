import numpy as np
import pytest

from jsrkit import (
    ComputeError,
    MalformedInput,
    MatrixSet,
    NotSupermultiplicative,
    best_bracket,
    bounded_ratio_check,
    fekete_check,
    fekete_check_log,
    growth_fit,
    norm_table,
    random_set,
    trace_limit,
)


def cycle3():
    return MatrixSet([[[0, 1, 0], [0, 0, 1], [1, 0, 0]]])


def golden_pair():
    return MatrixSet([[[1, 1], [0, 1]], [[1, 0], [1, 1]]])


class TestFekete:
    def test_geometric(self):
        d = fekete_check([2.0**n for n in range(1, 21)])
        assert d.sup_root == pytest.approx(2.0, rel=1e-12)
        assert d.converged and d.support_period == 1
        assert len(d.tail_estimates) == 20

    def test_even_support(self):
        a = [2.0**n if n % 2 == 0 else 0.0 for n in range(1, 21)]
        d = fekete_check(a)
        assert d.sup_root == pytest.approx(2.0, rel=1e-12)
        assert d.support_period == 2
        assert d.converged
        assert all(k % 2 == 0 for k, _ in d.tail_estimates)

    def test_constant_and_zero(self):
        d = fekete_check([1.0] * 10)
        assert d.sup_root == 1.0 and d.converged
        z = fekete_check([0.0] * 10)
        assert z.sup_root == 0.0 and z.converged and z.tail_estimates == ()

    def test_linear_sequence_is_rejected(self):
        with pytest.raises(NotSupermultiplicative) as exc:
            fekete_check([float(n) for n in range(1, 11)])
        assert (exc.value.m, exc.value.n) == (2, 3)
        assert exc.value.lhs == pytest.approx(5.0)
        assert exc.value.rhs == pytest.approx(6.0)

    def test_validation(self):
        for bad in ([], [1.0, -2.0], [1.0, float("nan")]):
            with pytest.raises(MalformedInput):
                fekete_check(bad)
        with pytest.raises(MalformedInput):
            fekete_check_log([0.0, float("inf")])
        with pytest.raises(MalformedInput):
            fekete_check_log([0.0, float("nan")])

    def test_log_variant_matches_and_survives_huge_growth(self):
        a = [3.0**n for n in range(1, 16)]
        d1 = fekete_check(a)
        d2 = fekete_check_log(np.log(a))
        assert d1 == d2
        # growth far beyond float range is fine in log form
        big = fekete_check_log([np.log(10.0) * n for n in range(1, 400)])
        assert big.sup_root == pytest.approx(10.0, rel=1e-12)
        assert big.converged

    def test_table_diagonals_are_supermultiplicative(self):
        for seed in range(12):
            S = random_set(3, 2, 0.6, (0.1, 2.0), seed=seed)
            T = norm_table(S, 8)
            for i in range(3):
                d = fekete_check_log(T.diag_sequence(i))
                assert d.sup_root >= 0.0


class TestBoundedRatio:
    def test_identity(self):
        T = norm_table(MatrixSet([np.eye(2)]), 10)
        r = bounded_ratio_check(T, 0, 1, (1, 9))
        assert r.max_ratio == pytest.approx(1.0) and r.at_n == 1 and r.gap == 1

    def test_cycle_respects_period(self):
        T = norm_table(cycle3(), 12)
        r = bounded_ratio_check(T, 0, 3, (1, 9))
        assert r.max_ratio == pytest.approx(1.0) and r.at_n == 3
        assert bounded_ratio_check(T, 0, 1, (1, 9)) is None

    def test_golden_frozen(self):
        T = norm_table(golden_pair(), 15)
        r = bounded_ratio_check(T, 0, 1, (4, 14))
        assert r.max_ratio == pytest.approx(13 / 8, rel=1e-12)
        assert r.at_n == 5 and r.i == 0 and r.gap == 1

    def test_diagonal_matrix(self):
        T = norm_table(MatrixSet([np.diag([2.0, 3.0])]), 10)
        assert bounded_ratio_check(T, 0, 2, (1, 8)).max_ratio == pytest.approx(4.0)
        assert bounded_ratio_check(T, 1, 2, (1, 8)).max_ratio == pytest.approx(9.0)

    def test_empty_window_and_validation(self):
        T = norm_table(MatrixSet([np.eye(2)]), 10)
        assert bounded_ratio_check(T, 0, 1, (20, 30)) is None
        with pytest.raises(MalformedInput):
            bounded_ratio_check(T, 0, 0, (1, 5))


class TestTraceLimit:
    def test_cycle(self):
        t = trace_limit(cycle3(), 12)
        assert t.Delta == 3
        for k, r in t.trace_roots:
            assert r == pytest.approx(3 ** (1 / k) if k % 3 == 0 else 0.0, rel=1e-12)
        assert [k for k, _ in t.subsequence] == [3, 6, 9, 12]
        for k, r in t.diag_roots:
            assert r == pytest.approx(1.0, rel=1e-12)
        assert t.sandwich_ok and t.within_bracket is None

    def test_scaled_cycle_diag_roots_hit_radius(self):
        S = cycle3().scale(2.0)
        t = trace_limit(S, 12, bracket=(2.0, 2.0))
        for k, r in t.diag_roots:
            assert r == pytest.approx(2.0, rel=1e-12)
        # trace roots carry the 3^(1/k) factor, diag roots do not
        assert t.subsequence[-1][1] == pytest.approx(2 * 3 ** (1 / 12), rel=1e-12)
        assert t.within_bracket is False

    def test_golden_within_bracket(self):
        S = golden_pair()
        r = best_bracket(S, 12)
        t = trace_limit(S, 12, bracket=(r.best_lower, r.best_upper))
        assert t.Delta == 1
        assert t.within_bracket is True
        assert t.sandwich_ok

    def test_horizon_below_period(self):
        with pytest.raises(MalformedInput):
            trace_limit(cycle3(), 2)

    def test_precomputed_table(self):
        S = golden_pair()
        T = norm_table(S, 10)
        assert trace_limit(S, 10, table=T) == trace_limit(S, 10)


class TestGrowthFit:
    def test_shear_degree_one(self):
        T = norm_table(MatrixSet([[[1, 1], [0, 1]]]), 40)
        assert growth_fit(T, 1.0, (2, 40)) == pytest.approx(1.0, abs=1e-9)

    def test_identity_degree_zero(self):
        T = norm_table(MatrixSet([np.eye(2)]), 12)
        assert growth_fit(T, 1.0, (1, 12)) == pytest.approx(0.0, abs=1e-12)

    def test_golden_degree_near_zero(self):
        S = golden_pair()
        T = norm_table(S, 16)
        phi = (1 + 5**0.5) / 2
        assert abs(growth_fit(T, phi, (8, 16))) < 0.2

    def test_validation(self):
        T = norm_table(MatrixSet([np.eye(2)]), 12)
        with pytest.raises(MalformedInput):
            growth_fit(T, 0.0, (1, 12))
        with pytest.raises(ComputeError):
            growth_fit(T, 1.0, (1, 2))  # two points only
        Z = norm_table(MatrixSet([[[0, 1], [0, 0]]]), 8)
        with pytest.raises(ComputeError):
            growth_fit(Z, 1.0, (2, 8))  # norms vanish from k = 2 on
