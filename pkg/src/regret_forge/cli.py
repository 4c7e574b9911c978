"""Command-line front end for the benchmark runners.

Subcommands
-----------
``solve``                one game, one solver, CSV of convergence samples
``compare``              games x solvers cross product, merged CSV
``ablate-beta``          one ECFR run per beta mode over a grid
``ablate-with-without``  ECFR with the default beta vs. the zero branch

Exit codes: 0 on success, 2 on usage errors (unknown names, bad flags, bad
config files), 1 on runtime failures.  ``--config FILE`` reads flat
``key=value`` lines supplying defaults; explicit flags win.  ``--timing``
opts into wall-clock ``elapsed_ms`` values; without it runs are byte-for-byte
reproducible.  ``REGRET_FORGE_THREADS`` sets the default worker count.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from .bench import (
    SOLVER_NAMES,
    CellFailure,
    ConvergenceRow,
    RunConfig,
    UsageError,
    run_beta_ablation,
    run_comparison,
    run_single,
    run_with_without_beta,
)
from .poker import game_names
from .solver import SolverError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

_CONFIG_KEYS = {
    "game", "games", "solver", "solvers", "iterations", "eval_every",
    "eval_schedule", "beta_mode", "dcfr_alpha", "dcfr_beta", "dcfr_gamma",
    "out", "threads", "timing", "grid", "gnuplot_script",
}


def _default_threads() -> int:
    raw = os.environ.get("REGRET_FORGE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regret-forge",
        description="Regret-minimization benchmark runner for small poker games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, iterations: int) -> None:
        p.add_argument("--config", help="flat key=value file with defaults; flags win")
        p.add_argument("--iterations", type=int, default=None,
                       help=f"training iterations (default {iterations})")
        p.add_argument("--eval-every", type=int, default=None,
                       help="evaluation cadence in iterations (default 100)")
        p.add_argument("--eval-schedule", choices=("every", "geometric"), default=None,
                       help="fixed cadence or the 1-2-5 ladder (default every)")
        p.add_argument("--out", default=None, help="CSV output path")
        p.add_argument("--threads", type=int, default=None,
                       help="worker pool size (default $REGRET_FORGE_THREADS or 1)")
        p.add_argument("--timing", action="store_true", default=None,
                       help="record wall-clock elapsed_ms (off by default, "
                            "keeping reruns byte-identical)")
        p.add_argument("--gnuplot-script", default=None,
                       help="also emit a gnuplot script plotting the CSV")
        p.set_defaults(default_iterations=iterations)

    p_solve = sub.add_parser("solve", help="train one solver on one game")
    p_solve.add_argument("--game", choices=game_names(), default=None)
    p_solve.add_argument("--solver", choices=SOLVER_NAMES, default=None)
    p_solve.add_argument("--beta-mode", default=None,
                         help="substitute for nonpositive regrets (default neg-r2)")
    p_solve.add_argument("--dcfr-alpha", type=float, default=None)
    p_solve.add_argument("--dcfr-beta", type=float, default=None)
    p_solve.add_argument("--dcfr-gamma", type=float, default=None)
    common(p_solve, iterations=10_000)

    p_cmp = sub.add_parser("compare", help="cross product of games and solvers")
    p_cmp.add_argument("--games", default=None,
                       help=f"comma list from {{{','.join(game_names())}}} (default all)")
    p_cmp.add_argument("--solvers", default=None,
                       help=f"comma list from {{{','.join(SOLVER_NAMES)}}} (default all)")
    p_cmp.add_argument("--beta-mode", default=None)
    common(p_cmp, iterations=10_000)

    p_beta = sub.add_parser("ablate-beta", help="sweep beta modes for ECFR")
    p_beta.add_argument("--game", choices=game_names(), default=None)
    p_beta.add_argument("--grid", default=None,
                        help="coarse, fine, or a comma list of mode specs "
                             "(default coarse)")
    common(p_beta, iterations=1_000)

    p_ww = sub.add_parser("ablate-with-without",
                          help="ECFR with the beta branch vs. a zero branch")
    p_ww.add_argument("--game", choices=game_names(), default=None)
    p_ww.add_argument("--beta-mode", default=None)
    common(p_ww, iterations=10_000)

    return parser


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _merge(args: argparse.Namespace, key: str, fallback):
    """Explicit flag > config file > fallback default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    config = getattr(args, "_config_values", {})
    if key in config:
        raw = config[key]
        if isinstance(fallback, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(fallback, int):
            return int(raw)
        if isinstance(fallback, float):
            return float(raw)
        return raw
    return fallback


def _comma_list(raw: str) -> tuple[str, ...]:
    items = tuple(part.strip() for part in raw.split(",") if part.strip())
    if not items:
        raise UsageError(f"empty list {raw!r}")
    return items


def _emit_gnuplot(script_path: str, csv_path: str | None,
                  rows: Sequence[ConvergenceRow]) -> None:
    if csv_path is None:
        raise UsageError("--gnuplot-script needs --out so the script has data")
    series = sorted({(r.game, r.solver) for r in rows})
    games = sorted({g for g, _ in series})
    lines = [
        "# gnuplot script generated alongside " + csv_path,
        'set datafile separator ","',
        "set logscale y",
        'set xlabel "iteration"',
        'set ylabel "exploitability (chips)"',
        "set key outside",
    ]
    if len(games) > 1:
        lines.append(f"set multiplot layout {len(games)},1")
    for game in games:
        solvers = [s for g, s in series if g == game]
        lines.append(f'set title "{game}"')
        plots = []
        for solver in solvers:
            cond = f'(strcol(1) eq "{game}" && strcol(2) eq "{solver}" ? $4 : 1/0)'
            plots.append(
                f"'{csv_path}' using 3:{cond} with lines title \"{solver}\""
            )
        lines.append("plot \\\n    " + ", \\\n    ".join(plots))
    if len(games) > 1:
        lines.append("unset multiplot")
    Path(script_path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _report_failures(failures: Sequence[CellFailure]) -> None:
    for failure in failures:
        print(f"cell failed: game={failure.game} solver={failure.solver}: "
              f"{failure.error}", file=sys.stderr)


def _run(args: argparse.Namespace) -> int:
    threads = _merge(args, "threads", _default_threads())
    iterations = _merge(args, "iterations", args.default_iterations)
    eval_every = _merge(args, "eval_every", 100)
    schedule = _merge(args, "eval_schedule", "every")
    out = _merge(args, "out", None)
    timing = bool(_merge(args, "timing", False))
    gnuplot = _merge(args, "gnuplot_script", None)

    if args.command == "solve":
        config = RunConfig(
            game=_merge(args, "game", "kuhn"),
            solver=_merge(args, "solver", "ecfr"),
            iterations=iterations,
            eval_every=eval_every,
            eval_schedule=schedule,
            beta_mode=_merge(args, "beta_mode", "neg-r2"),
            dcfr_alpha=_merge(args, "dcfr_alpha", 1.5),
            dcfr_beta=_merge(args, "dcfr_beta", 0.0),
            dcfr_gamma=_merge(args, "dcfr_gamma", 2.0),
            out=out,
            threads=threads,
            record_timing=timing,
        )
        rows = run_single(config)
        failures: list[CellFailure] = []
    elif args.command == "compare":
        rows, failures = run_comparison(
            games=_comma_list(_merge(args, "games", ",".join(game_names()))),
            solvers=_comma_list(_merge(args, "solvers", ",".join(SOLVER_NAMES))),
            iterations=iterations,
            eval_every=eval_every,
            out=out,
            threads=threads,
            eval_schedule=schedule,
            record_timing=timing,
            beta_mode=_merge(args, "beta_mode", "neg-r2"),
        )
    elif args.command == "ablate-beta":
        rows, failures = run_beta_ablation(
            game=_merge(args, "game", "kuhn"),
            grid=_merge(args, "grid", "coarse"),
            iterations=iterations,
            eval_every=eval_every,
            out=out,
            threads=threads,
            eval_schedule=schedule,
            record_timing=timing,
        )
    else:  # ablate-with-without
        rows, failures = run_with_without_beta(
            game=_merge(args, "game", "kuhn"),
            iterations=iterations,
            eval_every=eval_every,
            out=out,
            threads=threads,
            eval_schedule=schedule,
            record_timing=timing,
            beta_mode=_merge(args, "beta_mode", "neg-r2"),
        )

    if gnuplot:
        _emit_gnuplot(gnuplot, out, rows)
    if failures:
        _report_failures(failures)
        return EXIT_RUNTIME
    if not rows:
        print("no rows produced", file=sys.stderr)
        return EXIT_RUNTIME
    final = rows[-1]
    print(f"{len(rows)} rows"
          + (f" -> {out}" if out else "")
          + f"; last: {final.game}/{final.solver} t={final.iteration}"
          + f" exploitability={final.exploitability:.6g}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags already
        return int(exc.code or 0)
    try:
        config_path = getattr(args, "config", None)
        args._config_values = _read_config_file(config_path) if config_path else {}
        return _run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
