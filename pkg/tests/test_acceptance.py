"""Acceptance suite: one test per shipped guarantee, one verdict line each.

Each test emits a single ``[PASS]``/``[FAIL]`` line before asserting, so a
red run still reports every measured number it was judged on; the lines are
echoed in the terminal summary at the end of the session.
"""
from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from regret_forge.bench import (
    final_exploitability,
    run_beta_ablation,
    run_comparison,
    run_with_without_beta,
)
from regret_forge.exploitability import (
    StrategyProfile,
    best_response_value,
    expected_utility,
    exploitability,
)
from regret_forge.solver import (
    BetaMode,
    SolverState,
    VariantPolicy,
    counterfactual_values,
    train,
)
from regret_forge.tree import compile_game

from conftest import random_profile, record_verdict


def announce(ok: bool, name: str, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(line)
    record_verdict(line)


# 1 ------------------------------------------------------------------------------


def test_traversal_matches_terminal_enumeration(kuhn):
    rng = np.random.default_rng(1)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        profile = random_profile(kuhn, rng)
        for player in (0, 1):
            fast, _ = counterfactual_values(kuhn, profile, player)
            slow = expected_utility(kuhn, profile, player)
            worst = max(worst, abs(fast - slow))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-10 and elapsed < 5.0
    announce(ok, "tree traversal vs terminal enumeration",
             f"50 random profiles, max |diff| {worst:.3e}, {elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 5.0


# 2 ------------------------------------------------------------------------------


def test_best_response_matches_pure_strategy_maximum(kuhn):
    started = time.perf_counter()
    uniform = StrategyProfile.uniform()
    cg = compile_game(kuhn)
    results = []
    for player in (0, 1):
        keys = [k for k in cg.infoset_keys if k.player == player]
        best = -math.inf
        for choice in itertools.product((0, 1), repeat=len(keys)):
            table = {}
            for key, act in zip(keys, choice):
                row = np.zeros(2)
                row[act] = 1.0
                table[key] = row
            best = max(best, expected_utility(kuhn, StrategyProfile(table), player))
        results.append((best_response_value(kuhn, uniform, player), best))
    elapsed = time.perf_counter() - started
    ok = all(br == brute for br, brute in results) and elapsed < 5.0
    announce(ok, "best response vs 64-pure-strategy maximum",
             f"P0 {results[0][0]:.12g}, P1 {results[1][0]:.12g}, {elapsed:.2f}s")
    for br, brute in results:
        assert br == brute
    assert elapsed < 5.0


# 3 ------------------------------------------------------------------------------


def test_vanilla_cfr_long_run_convergence(kuhn):
    iterations = 100_000
    started = time.perf_counter()
    state = SolverState(kuhn, VariantPolicy("cfr"))
    spread = kuhn.max_payoff_spread
    root_na = np.sqrt(state.n_actions.astype(float))
    points = set()
    decade = 1
    while decade <= iterations:
        points.update(m * decade for m in (1, 2, 5) if m * decade <= iterations)
        decade *= 10
    points.add(iterations)
    worst_ratio = 0.0
    for t in range(1, iterations + 1):
        state.step()
        if t in points:
            avg_regret = state.cumulative_regret.max(axis=1) / t
            bound = spread * root_na / math.sqrt(t)
            worst_ratio = max(worst_ratio, float((avg_regret / bound).max()))
    final = exploitability(kuhn, state.average_strategy()).total_exploitability
    elapsed = time.perf_counter() - started
    ok = final < 1e-3 and worst_ratio <= 1.0 and elapsed < 120.0
    announce(ok, "vanilla long-run convergence",
             f"final exploitability {final:.3e} (< 1e-3), worst regret/bound "
             f"ratio {worst_ratio:.3f} (<= 1), {elapsed:.1f}s")
    assert final < 1e-3
    assert worst_ratio <= 1.0
    assert elapsed < 120.0


# 4 ------------------------------------------------------------------------------


def test_exponential_solver_degenerates_to_vanilla_cfr(kuhn):
    started = time.perf_counter()
    degenerate = VariantPolicy("ecfr", l1_scale=0.0, beta_mode=BetaMode.parse("r"))
    a = SolverState(kuhn, degenerate)
    b = SolverState(kuhn, VariantPolicy("cfr"))
    worst = 0.0
    for _ in range(100):
        a.step()
        b.step()
        worst = max(worst, float(np.abs(a.cumulative_regret - b.cumulative_regret).max()))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-9 and elapsed < 5.0
    announce(ok, "degenerate exponential update equals vanilla",
             f"max |regret diff| {worst:.3e} over 100 iterations, {elapsed:.2f}s")
    assert worst <= 1e-9
    assert elapsed < 5.0


# 5 ------------------------------------------------------------------------------


def test_final_exploitability_comparison_trend():
    solvers = ["cfr", "cfr+", "lcfr", "dcfr", "ecfr"]
    budgets = {"kuhn": 60.0, "leduc": 900.0, "royal": 2700.0}
    finals: dict[tuple[str, str], float] = {}
    timings = {}
    for game, budget in budgets.items():
        started = time.perf_counter()
        rows, failures = run_comparison(
            games=[game], solvers=solvers, iterations=10_000, eval_every=10_000,
        )
        timings[game] = time.perf_counter() - started
        assert failures == []
        finals.update(final_exploitability(rows))

    beats_vanilla = [g for g in budgets if finals[(g, "ecfr")] <= finals[(g, "cfr")]]
    pairwise_wins = {
        other: [g for g in budgets if finals[(g, "ecfr")] <= finals[(g, other)]]
        for other in ("cfr+", "lcfr", "dcfr")
    }
    ok = (
        len(beats_vanilla) == 3
        and all(len(v) >= 2 for v in pairwise_wins.values())
        and all(timings[g] < budgets[g] for g in budgets)
    )
    summary = "; ".join(
        f"{g}: " + " ".join(f"{s}={finals[(g, s)]:.3e}" for s in solvers)
        for g in budgets
    )
    announce(ok, "final-sample comparison trend",
             f"beats vanilla on {beats_vanilla or 'none'}; "
             + "; ".join(f"<= {k} on {v or 'none'}" for k, v in pairwise_wins.items())
             + f" | {summary}"
             + " | " + ", ".join(f"{g} {timings[g]:.0f}s" for g in budgets))
    for game in budgets:
        assert timings[game] < budgets[game]
    assert len(beats_vanilla) == 3, (
        f"exponential variant final exploitability exceeds vanilla on "
        f"{sorted(set(budgets) - set(beats_vanilla))}"
    )
    for other, wins in pairwise_wins.items():
        assert len(wins) >= 2, f"beats {other} only on {wins}"


# 6 ------------------------------------------------------------------------------


def test_default_beta_leads_the_ablation_grids():
    started = time.perf_counter()
    ranks = {}
    for grid in ("coarse", "fine"):
        rows, failures = run_beta_ablation("kuhn", grid=grid, iterations=1_000,
                                           eval_every=1_000)
        assert failures == []
        finals = final_exploitability(rows)
        ordered = sorted(finals.items(), key=lambda kv: kv[1])
        ranks[grid] = 1 + [k for (_, k), _ in ordered].index("ecfr[neg-r2]")
    elapsed = time.perf_counter() - started
    ok = ranks["coarse"] <= 4 and ranks["fine"] <= 2 and elapsed < 600.0
    announce(ok, "default substitute leads the ablation",
             f"rank {ranks['coarse']}/27 coarse (top 4 required), "
             f"{ranks['fine']}/8 fine (top 2 required), {elapsed:.0f}s")
    assert ranks["coarse"] <= 4
    assert ranks["fine"] <= 2
    assert elapsed < 600.0


# 7 ------------------------------------------------------------------------------


def test_beta_branch_improves_the_final_sample():
    started = time.perf_counter()
    outcomes = {}
    for game in ("kuhn", "leduc"):
        rows, failures = run_with_without_beta(game, iterations=10_000,
                                               eval_every=10_000)
        assert failures == []
        finals = final_exploitability(rows)
        outcomes[game] = (
            finals[(game, "ecfr-with-beta")],
            finals[(game, "ecfr-without-beta")],
        )
    elapsed = time.perf_counter() - started
    ok = all(with_b < without_b for with_b, without_b in outcomes.values())
    ok = ok and elapsed < 1200.0
    announce(ok, "substitute branch helps at the final sample",
             "; ".join(f"{g}: with {w:.3e} < without {wo:.3e}"
                       for g, (w, wo) in outcomes.items())
             + f", {elapsed:.0f}s")
    for game, (with_b, without_b) in outcomes.items():
        assert with_b < without_b, f"{game}: {with_b} !< {without_b}"
    assert elapsed < 1200.0


# 8 ------------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["cfr", "cfr_plus", "lcfr", "dcfr", "ecfr"])
def test_training_invariants(kuhn, name):
    # invariant_check_every=1 turns on the per-iteration structural checks:
    # emitted strategies are distributions, the strategy-weighted instant
    # regrets cancel at every information set, and cfr_plus stays nonnegative
    state, rows = train(kuhn, VariantPolicy(name), 300, record_timing=False,
                        invariant_check_every=1,
                        eval_points=[100, 200, 300])
    state.verify_invariants()
    avg = state.average_strategy_matrix()
    sums_ok = bool(np.allclose(avg.sum(axis=1), 1.0, atol=1e-9) and (avg >= 0).all())
    nonneg = all(r.exploitability >= -1e-9 for r in rows)
    ok = sums_ok and nonneg
    announce(ok, f"training invariants [{name}]",
             f"300 iterations checked every step, "
             f"final exploitability {rows[-1].exploitability:.3e}")
    assert sums_ok
    assert nonneg


# 9 ------------------------------------------------------------------------------


def test_comparison_reruns_are_byte_identical(tmp_path):
    args = dict(games=["kuhn", "leduc"], solvers=["cfr", "ecfr"],
                iterations=300, eval_every=100)
    paths = []
    for tag, threads in (("a", 1), ("b", 1), ("c", 3)):
        out = tmp_path / f"{tag}.csv"
        _, failures = run_comparison(out=out, threads=threads, **args)
        assert failures == []
        paths.append(out.read_bytes())
    ok = paths[0] == paths[1] == paths[2]
    announce(ok, "identical configurations reproduce byte-identical output",
             f"{len(paths)} runs, thread counts 1/1/3, "
             f"{len(paths[0])} bytes each" if ok else "outputs diverged")
    assert paths[0] == paths[1]
    assert paths[0] == paths[2]
