"""
Racing the solver family on two games
=====================================

Runs every bundled regret-minimization variant on the three-card and
six-card games with a shared iteration budget, then prints the final
exploitability table.  The same experiment is available from the shell as

    regret-forge compare --games kuhn,leduc --iterations 2000 --out cmp.csv
"""

from regret_forge import SOLVER_NAMES, final_exploitability, run_comparison

GAMES = ("kuhn", "leduc")
ITERATIONS = 2000

rows, failures = run_comparison(
    games=GAMES,
    solvers=SOLVER_NAMES,
    iterations=ITERATIONS,
    eval_every=500,
)
assert not failures, failures

# One row per evaluation point per cell came back; the trend check only
# needs the last sample of each curve.
finals = final_exploitability(rows)

print(f"final exploitability after {ITERATIONS} iterations (chips/hand)")
header = "game    " + "".join(f"{s:>12}" for s in SOLVER_NAMES)
print(header)
print("-" * len(header))
for game in GAMES:
    cells = "".join(f"{finals[(game, s)]:>12.3e}" for s in SOLVER_NAMES)
    print(f"{game:<8}{cells}")

# The curves themselves are in `rows`; re-run with out="cmp.csv" (or use the
# CLI above, plus --gnuplot-script cmp.gp) to keep and plot them.
for game in GAMES:
    curve = [r for r in rows if r.game == game and r.solver == "ecfr"]
    first, last = curve[0], curve[-1]
    print(f"\n{game}/ecfr: {first.exploitability:.3e} at t={first.iteration} "
          f"-> {last.exploitability:.3e} at t={last.iteration}")
