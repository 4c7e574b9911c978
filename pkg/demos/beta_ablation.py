"""
Choosing the substitute for nonpositive regrets
===============================================

The exponential update never adds a nonpositive instantaneous regret
directly; it adds a substitute value beta(r, t) instead.  This script sweeps
the narrowed grid of candidate substitutes on the three-card game, ranks
them, and then isolates the effect of the branch entirely by racing the
shipped default against a run whose substitute is identically zero.

Shell equivalents:

    regret-forge ablate-beta --game kuhn --grid fine --iterations 1000
    regret-forge ablate-with-without --game kuhn --iterations 2000
"""

from regret_forge import (
    FINE_BETA_GRID,
    final_exploitability,
    run_beta_ablation,
    run_with_without_beta,
)

# -- sweep the narrowed grid --------------------------------------------------

rows, failures = run_beta_ablation("kuhn", grid="fine", iterations=1000,
                                   eval_every=1000)
assert not failures, failures
finals = final_exploitability(rows)

print(f"fine grid on kuhn, 1000 iterations ({len(FINE_BETA_GRID)} modes)")
ranked = sorted(finals.items(), key=lambda kv: kv[1])
for rank, ((_, label), value) in enumerate(ranked, start=1):
    print(f"  {rank}. {label:<28} {value:.3e}")

best = ranked[0][0][1]
print(f"\nbest mode: {best}")

# -- with vs. without the branch ------------------------------------------------

rows, failures = run_with_without_beta("kuhn", iterations=2000, eval_every=200)
assert not failures, failures

print("\nwith vs. without the substitute branch (kuhn)")
print(" iteration        with     without")
with_curve = {r.iteration: r for r in rows if r.solver == "ecfr-with-beta"}
without_curve = {r.iteration: r for r in rows if r.solver == "ecfr-without-beta"}
for t in sorted(with_curve):
    print(f"{t:>10}  {with_curve[t].exploitability:>10.3e}"
          f"  {without_curve[t].exploitability:>10.3e}")

final_with = with_curve[max(with_curve)].exploitability
final_without = without_curve[max(without_curve)].exploitability
print(f"\nfinal: with {final_with:.3e} vs without {final_without:.3e} "
      f"({'with' if final_with < final_without else 'without'} wins)")
