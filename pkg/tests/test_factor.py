"""Factorization engine: all strategies, blocked panels, guarded mode."""

import numpy as np
import pytest

from randldl import (
    FactorConfig,
    NumericalError,
    OpCounters,
    PAT_DEFICIENT,
    PAT_PAIR_END,
    PAT_PAIR_START,
    PAT_SINGLE,
    SBKP_ALPHA,
    Strategy,
    compute_panel_columns,
    factor,
    factor_robust,
    reconstruct,
)
from helpers import random_symmetric, recon_error

STRATEGIES = ["rcp", "bkpp", "bbk"]


# -- basic contracts -------------------------------------------------------


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_identity_matrix(strategy):
    a = np.eye(8)
    f = factor(a, strategy=strategy, seed=0)
    assert np.array_equal(f.L, np.eye(8))
    assert np.array_equal(f.D.to_dense(), np.eye(8))
    assert np.array_equal(np.sort(f.perm), np.arange(8))
    assert np.array_equal(reconstruct(f), np.eye(8))
    if strategy != "rcp":  # the randomized column swap may relabel indices
        assert np.array_equal(f.perm, np.arange(8))


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_exchange_matrix_is_factored_exactly(strategy):
    a = np.eye(4)[::-1].copy()
    f = factor(a, strategy=strategy, seed=0, b=1)
    permuted = a[np.ix_(f.perm, f.perm)]
    assert np.array_equal(reconstruct(f), permuted)
    # Zero diagonal forces 2x2 pivots throughout.
    assert [blk.shape[0] for blk in f.D.blocks] == [2, 2]
    assert np.array_equal(f.pattern, [PAT_PAIR_START, PAT_PAIR_END] * 2)


def test_one_by_one_input():
    f = factor(np.array([[3.0]]), strategy="bkpp")
    assert np.array_equal(f.L, [[1.0]])
    assert np.array_equal(f.D.to_dense(), [[3.0]])
    assert f.stats.rho_cheap == 1.0


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("b,q", [(1, 1), (8, 1), (8, 8), (64, 1), (64, 64)])
def test_reconstruction_accuracy(strategy, b, q):
    if strategy != "rcp" and q != 1:
        pytest.skip("batched column selection applies to the sketched strategy only")
    a = random_symmetric(100, seed=1)
    f = factor(a, strategy=strategy, b=b, q=q, p=max(5, q), seed=7)
    assert recon_error(a, f) <= 1e-13
    assert np.array_equal(np.sort(f.perm), np.arange(100))


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_pattern_labels_tile_the_index_range(strategy):
    a = random_symmetric(61, seed=2)
    f = factor(a, strategy=strategy, seed=3)
    assert f.D.dim == 61
    sizes = iter(blk.shape[0] for blk in f.D.blocks)
    i = 0
    while i < 61:
        s = next(sizes)
        if s == 2:
            assert f.pattern[i] == PAT_PAIR_START
            assert f.pattern[i + 1] == PAT_PAIR_END
        else:
            assert f.pattern[i] in (PAT_SINGLE, PAT_DEFICIENT)
        i += s


def test_two_by_two_blocks_have_dominant_off_diagonal():
    # The simplified rule only takes a 2x2 pivot when both candidate
    # diagonals failed the threshold test against the off-diagonal entry.
    inputs = [random_symmetric(60, seed=seed + 10) for seed in range(6)]
    inputs.append(np.eye(6)[::-1].copy())  # zero diagonal: all pivots are 2x2
    found = 0
    for seed, a in enumerate(inputs):
        f = factor(a, strategy="rcp", seed=seed)
        for blk in f.D.blocks:
            if blk.shape[0] == 2:
                found += 1
                d11, d21, d22 = abs(blk[0, 0]), abs(blk[1, 0]), abs(blk[1, 1])
                assert max(d11, d22) <= SBKP_ALPHA * d21 * (1.0 + 1e-12)
                det = blk[0, 0] * blk[1, 1] - blk[1, 0] * blk[0, 1]
                assert abs(det) >= (1.0 - SBKP_ALPHA**2) * d21 * d21 * (1.0 - 1e-12)
    assert found >= 3


def test_factorization_is_deterministic():
    a = random_symmetric(50, seed=4)
    f1 = factor(a, strategy="rcp", seed=9)
    f2 = factor(a, strategy="rcp", seed=9)
    assert np.array_equal(f1.perm, f2.perm)
    assert np.array_equal(f1.L, f2.L)
    assert np.array_equal(f1.D.to_dense(), f2.D.to_dense())


def test_blocked_matches_unblocked():
    a = random_symmetric(80, seed=3)
    eager = factor(a, strategy="rcp", b=1, q=1, seed=3)
    blocked = factor(a, strategy="rcp", b=64, q=1, seed=3)
    assert np.array_equal(eager.perm, blocked.perm)
    assert np.array_equal(eager.pattern, blocked.pattern)
    assert np.allclose(eager.L, blocked.L, rtol=1e-10, atol=1e-12)
    assert np.allclose(
        eager.D.to_dense(), blocked.D.to_dense(), rtol=1e-10, atol=1e-12
    )


def test_reconstruct_is_ldlt():
    a = random_symmetric(30, seed=6)
    f = factor(a, strategy="bbk", b=8)
    assert np.array_equal(reconstruct(f), f.L @ f.D.to_dense() @ f.L.T)


# -- zero and deficient inputs ---------------------------------------------


def test_zero_matrix_partial_pivoting_skips_every_column():
    f = factor(np.zeros((5, 5)), strategy="bkpp")
    assert np.array_equal(f.L, np.eye(5))
    assert np.array_equal(f.D.to_dense(), np.zeros((5, 5)))
    assert np.all(f.pattern == PAT_SINGLE)
    assert f.stats.rho_cheap == 1.0  # zero input, zero blocks


def test_zero_matrix_guarded_mode_terminates_immediately():
    f = factor(np.zeros((5, 5)), strategy="rcp", seed=0)  # guard armed by default
    assert f.deficient_from == 0
    assert np.all(f.pattern == PAT_DEFICIENT)
    assert np.array_equal(f.L, np.eye(5))
    assert np.array_equal(f.D.to_dense(), np.zeros((5, 5)))


def test_zero_matrix_unguarded_sketch_skips():
    f = factor(np.zeros((5, 5)), strategy="rcp", robust_r=0, seed=0)
    assert f.deficient_from is None
    assert np.all(f.pattern == PAT_SINGLE)


def test_guarded_mode_detects_zero_tail():
    a = np.zeros((65, 65))
    a[:40, :40] = random_symmetric(40, seed=5)
    f = factor_robust(a, strategy="rcp", p=6, seed=2)
    assert f.deficient_from == 40
    assert np.all(f.pattern[40:] == PAT_DEFICIENT)
    assert np.all(f.pattern[:40] != PAT_DEFICIENT)
    assert f.stats.recompute_count == 1
    assert np.array_equal(f.D.to_dense()[40:, 40:], np.zeros((25, 25)))
    assert recon_error(a, f) <= 1e-12


# -- panel column helper -----------------------------------------------------


def test_panel_columns_single_pivot():
    a = np.array([[2.0, 1.0, 3.0], [1.0, 1.0, 1.0], [3.0, 1.0, 1.0]])
    lcols, dblock = compute_panel_columns(a, k=0, s=1)
    assert np.array_equal(lcols, [[0.5], [1.5]])
    assert np.array_equal(dblock, [[2.0]])


def test_panel_columns_two_by_two_pivot():
    a = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
    lcols, dblock = compute_panel_columns(a, k=0, s=2)
    assert np.array_equal(lcols, [[3.0, 2.0]])
    assert np.array_equal(dblock, [[0.0, 1.0], [1.0, 0.0]])


def test_panel_columns_zero_trailing_rows():
    a = np.array([[2.0, 0.0], [0.0, 5.0]])
    lcols, _ = compute_panel_columns(a, k=0, s=1)
    assert np.array_equal(lcols, [[0.0]])


def test_panel_columns_interior_offset():
    a = np.zeros((4, 4))
    a[1:, 1] = [4.0, 2.0, 6.0]
    lcols, dblock = compute_panel_columns(a, k=1, s=1)
    assert np.array_equal(lcols, [[0.5], [1.5]])
    assert np.array_equal(dblock, [[4.0]])


def test_panel_columns_pivot_block_override():
    a = np.array([[9.0, 9.0], [4.0, 9.0]])
    lcols, dblock = compute_panel_columns(a, k=0, s=1, pivot_block=[[2.0]])
    assert np.array_equal(lcols, [[2.0]])
    assert np.array_equal(dblock, [[2.0]])


def test_panel_columns_charge_counters():
    a = np.array([[2.0, 1.0, 3.0], [1.0, 1.0, 1.0], [3.0, 1.0, 1.0]])
    counters = OpCounters()
    compute_panel_columns(a, k=0, s=1, counters=counters)
    assert (counters.divs, counters.mults, counters.adds) == (2, 0, 0)
    counters = OpCounters()
    b = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
    compute_panel_columns(b, k=0, s=2, counters=counters)
    assert (counters.divs, counters.mults, counters.adds) == (2, 6, 3)
    counters = OpCounters()
    compute_panel_columns(np.array([[2.0, 0.0], [0.0, 5.0]]), 0, 1, counters=counters)
    assert counters.divs == 0  # zero column, no divisions performed


def test_panel_columns_validation():
    a = np.eye(3)
    with pytest.raises(ValueError, match="1 or 2"):
        compute_panel_columns(a, k=0, s=3)
    with pytest.raises(ValueError, match="out of range"):
        compute_panel_columns(a, k=2, s=2)


def test_panel_columns_numerical_errors():
    with pytest.raises(NumericalError, match="zero 1x1 pivot"):
        compute_panel_columns(np.array([[0.0, 1.0], [1.0, 0.0]]), k=0, s=1)
    singular = np.array([[1.0, 1.0, 5.0], [1.0, 1.0, 7.0], [5.0, 7.0, 0.0]])
    with pytest.raises(NumericalError, match="singular 2x2"):
        compute_panel_columns(singular, k=0, s=2)


# -- diagnostics -------------------------------------------------------------


def test_full_tracking_fills_growth_stats():
    a = random_symmetric(50, seed=8)
    f = factor(a, strategy="rcp", track_growth="full", seed=1)
    stats = f.stats
    assert stats.rho_elem is not None and stats.rho_elem >= 1.0 - 1e-12
    assert stats.rho_col is not None and stats.rho_col >= 1.0 - 1e-12
    assert stats.L_norm1 is not None and stats.Linv_norm1 is not None
    assert stats.snapshots[0][0] == np.abs(a).max()


def test_cheap_tracking_leaves_full_stats_unset():
    a = random_symmetric(20, seed=8)
    f = factor(a, strategy="rcp", seed=1)
    assert f.stats.rho_elem is None
    assert f.stats.snapshots is None
    assert f.stats.rho_cheap > 0.0


def test_audit_mode_reports_tiny_sketch_drift():
    a = random_symmetric(60, seed=1)
    f = factor(a, strategy="rcp", p=8, audit_sketch=True, seed=1)
    drift = f.stats.sketch_drift
    assert drift and max(drift) <= 1e-10


def test_counters_are_populated():
    a = random_symmetric(40, seed=9)
    f = factor(a, strategy="rcp", b=1, seed=0)
    c = f.stats.counters
    assert c.mults > 0 and c.adds > 0 and c.divs > 0 and c.comps > 0


# -- configuration and validation ---------------------------------------------


def test_config_accepts_enum_and_string_strategies():
    a = random_symmetric(10, seed=0)
    f1 = factor(a, cfg=FactorConfig(strategy=Strategy.BBK, b=1))
    f2 = factor(a, strategy="bbk", b=1)
    assert np.array_equal(f1.perm, f2.perm)


def test_config_rejects_cfg_plus_overrides():
    with pytest.raises(ValueError, match="not both"):
        factor(np.eye(3), cfg=FactorConfig(), b=1)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"p": 0},
        {"b": 0},
        {"q": 3, "b": 8},
        {"q": 8, "b": 8, "p": 5},
        {"robust_r": -1},
        {"strategy": "newton"},
        {"track_growth": "sometimes"},
    ],
    ids=["p", "b", "q-not-1-or-b", "p-below-q", "robust_r", "strategy", "tracking"],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        FactorConfig(**kwargs)


@pytest.mark.parametrize(
    "a",
    [
        np.zeros((0, 0)),
        np.zeros((2, 3)),
        np.array([[1.0, 2.0], [3.0, 4.0]]),
        np.array([[np.nan, 0.0], [0.0, 1.0]]),
        np.array([[np.inf, 0.0], [0.0, 1.0]]),
    ],
    ids=["empty", "rectangular", "asymmetric", "nan", "inf"],
)
def test_input_validation(a):
    with pytest.raises(ValueError):
        factor(a, strategy="bkpp")


def test_factor_robust_requires_sketched_strategy():
    with pytest.raises(ValueError, match="rcp"):
        factor_robust(np.eye(3), strategy="bkpp")
    with pytest.raises(ValueError, match="robust_r"):
        factor_robust(np.eye(3), strategy="rcp", robust_r=0)
