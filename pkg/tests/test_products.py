import numpy as np
import pytest

from jsrkit import (
    GuardExceeded,
    InvariantViolation,
    MatrixSet,
    brute_norm_table,
    extend,
    norm_table,
    random_set,
    seed_frontier,
)

NEG_INF = float("-inf")


def golden_pair():
    return MatrixSet([[[1, 1], [0, 1]], [[1, 0], [1, 1]]])


def eval_word(S, word):
    """Recompute a word's product with the same normalize-each-step
    arithmetic the frontier uses; returns (entries, log_scale)."""
    entries = None
    log_scale = 0.0
    for g in word:
        entries = S[g].copy() if entries is None else entries @ S[g]
        mx = entries.max()
        if mx == 0:
            return np.zeros_like(entries), 0.0
        entries = entries / mx
        log_scale += float(np.log(mx))
    return entries, log_scale


def log_true(entries, log_scale):
    with np.errstate(divide="ignore"):
        return np.log(entries) + log_scale


class TestFrontier:
    def test_seed_identity(self):
        F = seed_frontier(MatrixSet([np.eye(2)]))
        assert len(F) == 1 and F.length == 1 and F.exact
        item = F.items[0]
        np.testing.assert_array_equal(item.entries, np.eye(2))
        assert item.log_scale == 0.0
        assert item.word == (0,)

    def test_seed_drops_zero_generators(self):
        F = seed_frontier(MatrixSet([np.zeros((2, 2)), np.eye(2)]))
        assert len(F) == 1
        assert F.items[0].word == (1,)

    def test_scaled_copy_is_dominated(self):
        A = np.array([[1.0, 2.0], [0.0, 1.0]])
        F = seed_frontier(MatrixSet([A, 0.5 * A]))
        assert len(F) == 1
        assert F.items[0].word == (0,)

    def test_exact_duplicates_keep_smallest_word(self):
        A = np.array([[1.0, 1.0], [1.0, 0.0]])
        F = seed_frontier(MatrixSet([A, A.copy()]))
        assert len(F) == 1
        assert F.items[0].word == (0,)

    def test_extend_identity_idempotent(self):
        S = MatrixSet([np.eye(2)])
        F = extend(seed_frontier(S), S)
        assert len(F) == 1 and F.length == 2 and F.exact
        np.testing.assert_array_equal(F.items[0].entries, np.eye(2))

    def test_golden_pair_length_two_is_an_antichain_of_four(self):
        S = golden_pair()
        F = extend(seed_frontier(S), S)
        assert len(F) == 4
        assert [it.word for it in F.items] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        L = np.array([log_true(it.entries, it.log_scale).ravel() for it in F.items])
        for a in range(4):
            for b in range(4):
                if a != b:
                    assert not (L[a] <= L[b]).all(), (a, b)

    def test_true_value_semantics(self):
        S = golden_pair()
        F = extend(seed_frontier(S), S)
        for it in F.items:
            expect = S[it.word[0]] @ S[it.word[1]]
            np.testing.assert_allclose(it.true_value(), expect, rtol=1e-14)

    def test_max_entry_is_exactly_one(self):
        for seed in range(10):
            S = random_set(3, 2, 0.6, (0.1, 2.0), seed=seed)
            F = seed_frontier(S)
            for _ in range(5):
                if len(F) == 0:
                    break
                assert F.entries.reshape(len(F), -1).max(axis=1).tolist() == [1.0] * len(F)
                F = extend(F, S)

    def test_frontier_is_always_an_antichain(self):
        for seed in range(15):
            S = random_set(3, 3, 0.5, (0.1, 2.0), seed=100 + seed)
            F = seed_frontier(S)
            for _ in range(6):
                if len(F) <= 1:
                    break
                L = np.array([log_true(F.entries[i], F.log_scale[i]).ravel()
                              for i in range(len(F))])
                for a in range(len(F)):
                    dom = (L <= L[a]).all(axis=1)
                    dom[a] = False
                    assert not dom.any(), (seed, F.length, a)
                F = extend(F, S)

    def test_capacity_pruning_flags_and_orders(self):
        S = golden_pair()
        F = seed_frontier(S, cap=3)
        F = extend(F, S, cap=3)
        assert len(F) == 3 and not F.exact
        # kept items must be the largest-scale ones of the four products
        full = extend(seed_frontier(S), S)
        top = sorted(full.log_scale, reverse=True)[:3]
        assert sorted(F.log_scale, reverse=True) == pytest.approx(top)
        # once inexact, always inexact
        F = extend(F, S, cap=1000)
        assert not F.exact

    def test_extend_of_empty_frontier(self):
        S = MatrixSet([np.zeros((2, 2))])
        F = seed_frontier(S)
        assert len(F) == 0
        F2 = extend(F, S)
        assert len(F2) == 0 and F2.length == 2 and F2.exact


class TestNormTable:
    def test_permutation_matrix(self):
        T = norm_table(MatrixSet([[[0, 1], [1, 0]]]), 4)
        for k in range(1, 5):
            assert T.log_norm(k) == 0.0
            diag = T.log_entry(k, 0, 0)
            if k % 2 == 0:
                assert diag == 0.0
            else:
                assert diag == NEG_INF

    def test_shear_norm_is_k(self):
        T = norm_table(MatrixSet([[[1, 1], [0, 1]]]), 5)
        for k in range(1, 6):
            assert T.log_norm(k) == pytest.approx(np.log(k), abs=1e-12)

    def test_nilpotent_dies_at_dimension(self):
        A = np.array([[0, 1, 1], [0, 0, 1], [0, 0, 0]], dtype=float)
        T = norm_table(MatrixSet([A]), 4)
        assert T.log_norm(2) > NEG_INF
        assert T.log_norm(3) == NEG_INF
        assert T.log_norm(4) == NEG_INF
        assert all(T.exact(k) for k in range(1, 5))

    def test_zero_set(self):
        T = norm_table(MatrixSet([np.zeros((2, 2))]), 3)
        for k in range(1, 4):
            assert T.log_norm(k) == NEG_INF
            assert T.log_max_trace(k) == NEG_INF
            assert T.exact(k)

    def test_component_norms_definition(self):
        for seed in range(10):
            S = random_set(4, 2, 0.5, (0.1, 2.0), seed=200 + seed)
            T = norm_table(S, 6)
            for k in range(1, 7):
                block = T.log_entry(k)
                for c, comp in enumerate(T.components):
                    sub = block[np.ix_(comp, comp)]
                    assert T.log_comp_norm(k, c) == sub.max()
                assert T.log_norm(k) == block.max()

    def test_exact_horizon(self):
        S = golden_pair()
        T = norm_table(S, 6, cap=3)
        assert T.exact_horizon() < 6
        assert norm_table(S, 6).exact_horizon() == 6

    def test_capped_values_are_lower_bounds(self):
        S = golden_pair()
        full = norm_table(S, 10)
        capped = norm_table(S, 10, cap=2)
        for k in range(1, 11):
            assert (capped.log_entry(k) <= full.log_entry(k) + 1e-12).all()

    def test_witness_words_reproduce_entries(self):
        for seed in range(8):
            S = random_set(3, 3, 0.6, (0.1, 2.0), seed=300 + seed)
            T = norm_table(S, 6, keep_witness=True)
            for k in (2, 4, 6):
                block = T.log_entry(k)
                for i in range(3):
                    for j in range(3):
                        w = T.witness(k, i, j)
                        if block[i, j] == NEG_INF:
                            assert w is None
                            continue
                        entries, ls = eval_word(S, w)
                        got = log_true(entries, ls)[i, j]
                        assert got == pytest.approx(block[i, j], abs=1e-9 * k)

    def test_spectral_witness_reproduces_value(self):
        S = golden_pair()
        T = norm_table(S, 8)
        for k in (2, 5, 8):
            w = T.spectral_witness(k)
            entries, ls = eval_word(S, w)
            rho = np.abs(np.linalg.eigvals(entries)).max()
            assert np.log(rho) + ls == pytest.approx(T.log_spectral(k), abs=1e-9)

    def test_golden_spectral_at_two_is_phi_squared(self):
        T = norm_table(golden_pair(), 2)
        phi = (1 + 5**0.5) / 2
        assert np.exp(T.log_spectral(2)) == pytest.approx(phi**2, rel=1e-12)
        assert T.spectral_witness(2) == (0, 1)

    def test_dump_frontier(self):
        T = norm_table(golden_pair(), 4, dump_frontier_at=3)
        dump = T.frontier_dump
        assert dump["length"] == 3 and dump["exact"]
        assert all(len(w) == 3 for w in dump["words"])
        assert len(dump["words"]) == len(dump["log_scales"])

    def test_validate_catches_corruption(self):
        T = norm_table(golden_pair(), 6)
        T._log_entries[3, 0, 0] = -50.0  # breaks diagonal supermultiplicativity
        with pytest.raises(InvariantViolation):
            T.validate()


class TestBruteEquivalence:
    def test_log_entries_match(self):
        for seed in range(30):
            d = 1 + seed % 4
            m = 1 + seed % 3
            density = 0.3 if seed % 2 else 0.7
            S = random_set(d, m, density, (0.1, 2.0), seed=400 + seed)
            T1 = norm_table(S, 7, cap=10**6)
            T2 = brute_norm_table(S, 7)
            for k in range(1, 8):
                a, b = T1.log_entry(k), T2.log_entry(k)
                both_zero = np.isneginf(a) & np.isneginf(b)
                with np.errstate(invalid="ignore"):
                    close = np.abs(np.where(both_zero, 0.0, a - b)) < 1e-12
                assert (both_zero | close).all()
                assert T1.log_max_trace(k) == pytest.approx(
                    T2.log_max_trace(k), abs=1e-12
                ) or (np.isneginf(T1.log_max_trace(k)) and np.isneginf(T2.log_max_trace(k)))
                for c in range(len(T1.components)):
                    x, y = T1.log_comp_norm(k, c), T2.log_comp_norm(k, c)
                    assert (x == y) or abs(x - y) < 1e-12

    def test_single_matrix_identical(self):
        S = MatrixSet([[[0.3, 1.1], [0.7, 0.2]]])
        T1 = norm_table(S, 8)
        T2 = brute_norm_table(S, 8)
        for k in range(1, 9):
            np.testing.assert_array_equal(T1.log_entry(k), T2.log_entry(k))

    def test_guard(self):
        S = random_set(2, 3, 0.8, (0.5, 1.5), seed=1)
        with pytest.raises(GuardExceeded):
            brute_norm_table(S, 16)  # 3**16 > 10**7

    def test_pruned_spectral_never_exceeds_brute(self):
        for seed in range(10):
            S = random_set(3, 2, 0.6, (0.1, 2.0), seed=500 + seed)
            T1 = norm_table(S, 6)
            T2 = brute_norm_table(S, 6)
            for k in range(1, 7):
                assert T1.log_spectral(k) <= T2.log_spectral(k) + 1e-9


class TestReductionSoundness:
    def test_domination_pruning_changes_nothing(self):
        for seed in range(20):
            d = 1 + seed % 4
            m = 1 + seed % 3
            S = random_set(d, m, 0.5, (0.1, 2.0), seed=600 + seed)
            on = norm_table(S, 7, prune=True)
            off = norm_table(S, 7, prune=False)
            for k in range(1, 8):
                np.testing.assert_array_equal(on.log_entry(k), off.log_entry(k))
                assert on.log_max_trace(k) == off.log_max_trace(k)

    def test_scale_equivariance(self):
        for seed in range(10):
            S = random_set(3, 2, 0.6, (0.1, 2.0), seed=700 + seed)
            base = norm_table(S, 8)
            for c in (0.25, 3.0):
                T = norm_table(S.scale(c), 8)
                for k in range(1, 9):
                    a, b = T.log_entry(k), base.log_entry(k)
                    inf = np.isneginf(b)
                    assert (np.isneginf(a) == inf).all()
                    with np.errstate(invalid="ignore"):
                        diff = np.abs(np.where(inf, 0.0, a - (b + k * np.log(c))))
                    assert diff.max() <= 1e-9 * k

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(9)
        for seed in range(10):
            S = random_set(4, 2, 0.5, (0.1, 2.0), seed=800 + seed)
            perm = rng.permutation(4)
            P = MatrixSet([a[np.ix_(perm, perm)] for a in S])
            T1 = norm_table(S, 6)
            T2 = norm_table(P, 6)
            for k in range(1, 7):
                a = T1.log_entry(k)[np.ix_(perm, perm)]
                b = T2.log_entry(k)
                inf = np.isneginf(a)
                assert (np.isneginf(b) == inf).all()
                # matmul sums run in permuted order, so allow rounding noise
                with np.errstate(invalid="ignore"):
                    diff = np.abs(np.where(inf, 0.0, a - b))
                assert diff.max() <= 1e-9 * k
