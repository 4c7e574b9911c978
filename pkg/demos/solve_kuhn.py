"""
Solving three-card poker from scratch
=====================================

Builds the smallest bundled game, trains the exponentially weighted solver,
and inspects what it learned: the convergence curve, the final strategy at
the opening information sets, and the gap to a perfect opponent.
"""

import numpy as np

from regret_forge import (
    VariantPolicy,
    build_kuhn,
    eval_points,
    exploitability,
    train,
    tree_stats,
)

# The game object is a pure rules engine; the tree behind it is tiny.
game = build_kuhn()
stats = tree_stats(game)
print(f"{game.name}: {stats.nodes} histories, {stats.terminals} terminals, "
      f"{stats.total_infosets} information sets, depth {stats.max_depth}")

# Train for 2000 iterations, sampling exploitability on the 1-2-5 ladder.
points = eval_points(2000, 1, "geometric")
state, rows = train(game, VariantPolicy("ecfr"), 2000,
                    eval_points=points, record_timing=False)

print("\n iteration   exploitability (chips/hand)")
for row in rows:
    print(f"{row.iteration:>10}   {row.exploitability:.6f}")

# The average strategy is the object that approaches equilibrium.  The
# well-known shape: never bet the middle card as the opener, bluff the
# lowest card some of the time, bet the highest for value.
profile = state.average_strategy()
print("\nopening strategy (average):")
for text in ("P0|J||", "P0|Q||", "P0|K||"):
    record = state.record(text)
    probs = ", ".join(
        f"{a}={p:.3f}" for a, p in zip(record.actions, profile.table[record.key])
    )
    print(f"  {text}: {probs}")

report = exploitability(game, profile)
print(f"\nbest responses: P0 {report.best_response_values[0]:+.5f}, "
      f"P1 {report.best_response_values[1]:+.5f}")
print(f"total exploitability: {report.total_exploitability:.6f}")
print(f"game value estimate for the opener: {report.game_value_estimate:+.5f} "
      "(the exact value is -1/18)")

# Sanity: the two best responses always bound the value of the game, so the
# total can never be negative.
assert report.total_exploitability >= -1e-9
assert np.isfinite(report.total_exploitability)
