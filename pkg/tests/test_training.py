"""End-to-end checks of the training loop against hand-computed quantities.

The first-iteration numbers are derived on paper for the three-card game:
starting from the all-uniform profile, every opening information set values
checking at -5/12, -1/12 or +1/4 (J, Q, K) and betting a quarter-chip
higher, giving per-action advantages of exactly [-1/8, +1/8].
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from regret_forge.exploitability import StrategyProfile, expected_utility
from regret_forge.game import InfoSetKey
from regret_forge.solver import (
    SolverError,
    SolverState,
    VariantPolicy,
    counterfactual_values,
    extract_average_strategy,
    train,
)

OPENING_KEYS = ("P0|J||", "P0|Q||", "P0|K||")


def test_first_iteration_regrets_match_hand_computation(kuhn):
    state, _ = train(kuhn, VariantPolicy("cfr"), 1, record_timing=False)
    for text in OPENING_KEYS:
        record = state.record(text)
        assert record.actions == ("check", "bet")
        np.testing.assert_allclose(record.last_instant_regret, [-0.125, 0.125], atol=1e-12)


def test_counterfactual_values_match_terminal_enumeration(kuhn, leduc):
    profile = StrategyProfile.uniform()
    for game in (kuhn, leduc):
        for player in (0, 1):
            root, _ = counterfactual_values(game, profile, player)
            assert root == pytest.approx(expected_utility(game, profile, player), abs=1e-10)


def test_counterfactual_values_at_the_opening_set(kuhn):
    _, values = counterfactual_values(kuhn, StrategyProfile.uniform(), 0)
    v_set, v_actions = values[InfoSetKey.parse("P0|J||")]
    np.testing.assert_allclose(v_actions, [-5.0 / 12.0, -1.0 / 6.0], atol=1e-12)
    assert v_set == pytest.approx(-7.0 / 24.0, abs=1e-12)


def test_counterfactual_values_vanish_when_opponent_never_arrives(kuhn):
    always_check = StrategyProfile(
        {InfoSetKey.parse(k): [1.0, 0.0] for k in OPENING_KEYS}
    )
    _, values = counterfactual_values(kuhn, always_check, 1)
    v_set, v_actions = values[InfoSetKey.parse("P1|Q||b")]
    assert v_set == 0.0
    np.testing.assert_allclose(v_actions, 0.0)


def test_average_strategy_after_one_cfr_iteration_is_uniform(kuhn):
    state, _ = train(kuhn, VariantPolicy("cfr"), 1, record_timing=False)
    np.testing.assert_allclose(
        state.average_strategy_matrix(), state.compiled.uniform_strategy(), atol=1e-12
    )


def test_ecfr_average_weights_tilt_toward_high_advantage(kuhn):
    # numerator after one step: e^(l1) * 0.5 per action with l1 = [-1/8, +1/8],
    # so the bet share is the logistic of 1/4
    state, _ = train(kuhn, VariantPolicy("ecfr"), 1, record_timing=False)
    record = state.record("P0|J||")
    np.testing.assert_allclose(record.last_l1, [-0.125, 0.125], atol=1e-12)
    bet_share = 1.0 / (1.0 + math.exp(-0.25))
    np.testing.assert_allclose(
        state.average_strategy_matrix()[state.compiled.key_index[record.key]][:2],
        [1.0 - bet_share, bet_share],
        atol=1e-12,
    )


def test_regret_matching_commits_after_one_iteration(kuhn):
    state, _ = train(kuhn, VariantPolicy("cfr"), 1, record_timing=False)
    np.testing.assert_allclose(state.record("P0|J||").current_strategy, [0.0, 1.0])


def test_lcfr_cumulates_linearly_weighted_regrets(kuhn):
    state = SolverState(kuhn, VariantPolicy("lcfr"))
    state.step()
    r1 = state.last_instant_regret.copy()
    state.step()
    r2 = state.last_instant_regret.copy()
    np.testing.assert_allclose(state.cumulative_regret, r1 + 2.0 * r2, atol=1e-12)


def test_dcfr_first_iteration_discounts(kuhn):
    state, _ = train(kuhn, VariantPolicy("dcfr"), 1, record_timing=False)
    record = state.record("P0|J||")
    # positive and negative totals are both halved at t=1 (alpha=1.5, beta=0)
    np.testing.assert_allclose(record.cumulative_regret, [-0.0625, 0.0625], atol=1e-12)
    # the average-strategy mass decays by (1/2)^gamma = 1/4
    np.testing.assert_allclose(record.avg_strategy_numerator, [0.125, 0.125], atol=1e-12)


def test_cfr_plus_regrets_stay_nonnegative(kuhn):
    state, _ = train(kuhn, VariantPolicy("cfr_plus"), 50, record_timing=False)
    assert float(state.cumulative_regret.min()) >= 0.0


@pytest.mark.parametrize("name", ["cfr", "cfr_plus", "lcfr", "dcfr", "ecfr"])
def test_invariants_hold_every_iteration(kuhn, name):
    train(kuhn, VariantPolicy(name), 30, record_timing=False, invariant_check_every=1)


def test_training_is_deterministic(kuhn):
    for name in ("cfr", "ecfr"):
        a, rows_a = train(kuhn, VariantPolicy(name), 50, record_timing=False)
        b, rows_b = train(kuhn, VariantPolicy(name), 50, record_timing=False)
        assert np.array_equal(a.cumulative_regret, b.cumulative_regret)
        assert np.array_equal(a.avg_strategy_numerator, b.avg_strategy_numerator)
        assert rows_a == rows_b


def test_train_validates_arguments(kuhn):
    with pytest.raises(ValueError):
        train(kuhn, VariantPolicy("cfr"), 0)
    with pytest.raises(ValueError):
        train(kuhn, VariantPolicy("cfr"), 5, eval_points=[0])
    with pytest.raises(ValueError):
        train(kuhn, VariantPolicy("cfr"), 5, eval_points=[6])


def test_train_reports_on_the_requested_schedule(kuhn):
    _, rows = train(
        kuhn, VariantPolicy("cfr"), 10, eval_points=[1, 5, 10],
        label="tagged", record_timing=False,
    )
    assert [r.iteration for r in rows] == [1, 5, 10]
    assert all(r.game == "kuhn" and r.solver == "tagged" for r in rows)
    assert all(r.elapsed_ms == 0 for r in rows)
    assert all(math.isfinite(r.exploitability) and r.exploitability >= 0.0 for r in rows)


def test_nonfinite_accumulator_aborts_with_the_offending_key(kuhn):
    state = SolverState(kuhn, VariantPolicy("cfr"))
    state.cumulative_regret[0, 0] = np.nan
    with pytest.raises(SolverError, match="non-finite"):
        state.step()


def test_fresh_state_averages_to_uniform(kuhn):
    state = SolverState(kuhn, VariantPolicy("cfr"))
    np.testing.assert_allclose(
        state.average_strategy_matrix(), state.compiled.uniform_strategy()
    )
    profile = extract_average_strategy(state)
    assert len(profile) == state.compiled.n_infosets


def test_record_views_write_through(kuhn):
    state = SolverState(kuhn, VariantPolicy("cfr"))
    record = state.record("P0|J||")
    record.cumulative_regret[:] = [5.0, 7.0]
    idx = state.compiled.key_index[record.key]
    np.testing.assert_allclose(state.cumulative_regret[idx, :2], [5.0, 7.0])
