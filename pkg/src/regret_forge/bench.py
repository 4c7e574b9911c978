"""Benchmark runners: convergence comparisons and the beta ablations.

Every runner trains fresh solver states, samples exploitability of the
extracted average strategy on a schedule, and emits ``ConvergenceRow``
records.  Output is CSV with the fixed header
``game,solver,iteration,exploitability,elapsed_ms``; exploitability is
printed with 12 significant digits so identical configurations reproduce
byte-identical files.  Timing is opt-in: with ``record_timing=False`` (the
default used by the CLI unless ``--timing`` is passed) the ``elapsed_ms``
column is 0 and reruns are deterministic end to end.
"""
from __future__ import annotations

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .game import GameDefinition
from .poker import game_by_name, game_names
from .solver import (
    VARIANTS,
    BetaMode,
    ConvergenceRow,
    VariantPolicy,
    train,
)

CSV_HEADER = "game,solver,iteration,exploitability,elapsed_ms"

#: user-facing solver spellings accepted by the CLI and the configs
SOLVER_NAMES = ("cfr", "cfr+", "lcfr", "dcfr", "ecfr")

_SOLVER_CANON = {
    "cfr": "cfr",
    "cfr+": "cfr_plus",
    "cfr_plus": "cfr_plus",
    "lcfr": "lcfr",
    "dcfr": "dcfr",
    "ecfr": "ecfr",
}

#: the broad sweep of beta settings: signed constants spanning five decades,
#: signed powers of the instant regret, signed inverse-iteration decays, and
#: iteration-times-regret growth modes.
COARSE_BETA_GRID = (
    "const:1", "const:-1",
    "const:0.1", "const:-0.1",
    "const:0.01", "const:-0.01",
    "const:0.001", "const:-0.001",
    "const:0.0001", "const:-0.0001",
    "const:0.00001", "const:-0.00001",
    "r", "neg-r",
    "r2", "neg-r2",
    "r3", "neg-r3",
    "inv-t", "neg-inv-t",
    "inv-t2", "neg-inv-t2",
    "inv-t3", "neg-inv-t3",
    "t-r", "t-r2", "t-r3",
)

#: the narrowed sweep around the strongest coarse settings.
FINE_BETA_GRID = (
    "const:-0.008",
    "const:-0.009",
    "const:-0.0001",
    "const:-0.00011",
    "const:-0.00012",
    "neg-r2",
    "neg-r2-over-t",
    "neg-r2-over-t2",
)


class UsageError(ValueError):
    """Bad game/solver/mode names or malformed run parameters."""


def canonical_solver(name: str) -> str:
    """Map a user-facing solver spelling to the internal variant name."""
    try:
        return _SOLVER_CANON[name.strip().lower()]
    except KeyError:
        raise UsageError(
            f"unknown solver {name!r}; expected one of {', '.join(SOLVER_NAMES)}"
        ) from None


def resolve_game(name: str) -> GameDefinition:
    try:
        return game_by_name(name)
    except (KeyError, ValueError):
        raise UsageError(
            f"unknown game {name!r}; expected one of {', '.join(game_names())}"
        ) from None


@dataclass(frozen=True)
class RunConfig:
    """Everything one training cell needs, validated at construction."""

    game: str
    solver: str
    iterations: int = 10_000
    eval_every: int = 100
    eval_schedule: str = "every"  # "every" | "geometric"
    beta_mode: str = "neg-r2"
    dcfr_alpha: float = 1.5
    dcfr_beta: float = 0.0
    dcfr_gamma: float = 2.0
    out: str | None = None
    threads: int = 1
    record_timing: bool = False
    label: str | None = None

    def __post_init__(self) -> None:
        if self.game not in game_names():
            raise UsageError(
                f"unknown game {self.game!r}; expected one of {', '.join(game_names())}"
            )
        canonical_solver(self.solver)  # raises UsageError on bad names
        if self.iterations < 1:
            raise UsageError("iterations must be >= 1")
        if self.eval_every < 1:
            raise UsageError("eval-every must be >= 1")
        if self.eval_schedule not in ("every", "geometric"):
            raise UsageError("eval-schedule must be 'every' or 'geometric'")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        try:
            BetaMode.parse(self.beta_mode)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def policy(self) -> VariantPolicy:
        return VariantPolicy(
            canonical_solver(self.solver),
            dcfr_alpha=self.dcfr_alpha,
            dcfr_beta=self.dcfr_beta,
            dcfr_gamma=self.dcfr_gamma,
            beta_mode=BetaMode.parse(self.beta_mode),
        )

    def points(self) -> tuple[int, ...]:
        return eval_points(self.iterations, self.eval_every, self.eval_schedule)


def eval_points(iterations: int, eval_every: int, schedule: str = "every") -> tuple[int, ...]:
    """Iterations at which exploitability is sampled; always includes the last.

    ``every`` yields multiples of ``eval_every``; ``geometric`` yields the
    1-2-5 decade ladder, which keeps expensive evaluations rare on long runs.
    """
    if iterations < 1:
        raise UsageError("iterations must be >= 1")
    if schedule == "every":
        pts = list(range(eval_every, iterations + 1, eval_every))
    elif schedule == "geometric":
        pts = []
        decade = 1
        while decade <= iterations:
            for mult in (1, 2, 5):
                p = mult * decade
                if p <= iterations:
                    pts.append(p)
            decade *= 10
    else:
        raise UsageError("eval-schedule must be 'every' or 'geometric'")
    if not pts or pts[-1] != iterations:
        pts.append(iterations)
    return tuple(pts)


def format_row(row: ConvergenceRow) -> str:
    return (
        f"{row.game},{row.solver},{row.iteration},"
        f"{format(row.exploitability, '.12g')},{row.elapsed_ms}"
    )


def write_csv(path: str | Path, rows: Iterable[ConvergenceRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(format_row(row) + "\n")


def read_csv(path: str | Path) -> list[ConvergenceRow]:
    rows: list[ConvergenceRow] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise UsageError(f"{path}: unexpected CSV header {header!r}")
        for line in fh:
            game, solver, iteration, exploit, elapsed = line.strip().split(",")
            rows.append(ConvergenceRow(game, solver, int(iteration),
                                       float(exploit), int(elapsed)))
    return rows


def run_single(
    config: RunConfig,
    on_row: Callable[[ConvergenceRow], None] | None = None,
) -> list[ConvergenceRow]:
    """Train one cell, streaming rows to ``config.out`` as they appear.

    The output file is opened up front and flushed after every row, so a
    crashed run still leaves the samples computed so far on disk.
    """
    game = resolve_game(config.game)
    label = config.label if config.label is not None else config.solver
    sink = open(config.out, "w", encoding="utf-8") if config.out else None
    try:
        if sink is not None:
            sink.write(CSV_HEADER + "\n")
            sink.flush()

        def emit(row: ConvergenceRow) -> None:
            if sink is not None:
                sink.write(format_row(row) + "\n")
                sink.flush()
            if on_row is not None:
                on_row(row)

        _, rows = train(
            game,
            config.policy(),
            config.iterations,
            eval_points=config.points(),
            label=label,
            record_timing=config.record_timing,
            on_row=emit,
        )
    finally:
        if sink is not None:
            sink.close()
    return rows


@dataclass(frozen=True)
class CellFailure:
    """One comparison cell that raised; the run carries on without it."""

    game: str
    solver: str
    error: str


def _run_cells(
    configs: Sequence[RunConfig],
    out: str | Path | None,
    threads: int,
) -> tuple[list[ConvergenceRow], list[CellFailure]]:
    """Run independent cells on a worker pool and merge their temp files.

    Each cell streams into its own temporary CSV next to the final output;
    results are merged sorted by ``(game, solver, iteration)`` after every
    cell finishes, so thread count and completion order never change the
    merged bytes.
    """
    out_dir = Path(out).parent if out else Path(tempfile.gettempdir())
    out_dir.mkdir(parents=True, exist_ok=True)
    tmp_paths: dict[int, Path] = {}
    for idx in range(len(configs)):
        fd, tmp = tempfile.mkstemp(prefix="cell-", suffix=".csv", dir=out_dir)
        os.close(fd)
        tmp_paths[idx] = Path(tmp)

    failures: list[CellFailure] = []
    collected: list[ConvergenceRow] = []

    def work(idx: int) -> list[ConvergenceRow]:
        cfg = replace(configs[idx], out=str(tmp_paths[idx]))
        return run_single(cfg)

    try:
        if threads > 1 and len(configs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = {idx: pool.submit(work, idx) for idx in range(len(configs))}
            for idx, fut in futures.items():
                cfg = configs[idx]
                try:
                    collected.extend(fut.result())
                except Exception as exc:  # noqa: BLE001 - reported per cell
                    failures.append(CellFailure(cfg.game, cfg.solver, str(exc)))
        else:
            for idx, cfg in enumerate(configs):
                try:
                    collected.extend(work(idx))
                except Exception as exc:  # noqa: BLE001 - reported per cell
                    failures.append(CellFailure(cfg.game, cfg.solver, str(exc)))
    finally:
        for tmp in tmp_paths.values():
            tmp.unlink(missing_ok=True)

    collected.sort(key=lambda r: (r.game, r.solver, r.iteration))
    if out is not None:
        write_csv(out, collected)
    return collected, failures


def run_comparison(
    games: Sequence[str],
    solvers: Sequence[str],
    iterations: int = 10_000,
    eval_every: int = 100,
    out: str | Path | None = None,
    threads: int = 1,
    eval_schedule: str = "every",
    record_timing: bool = False,
    beta_mode: str = "neg-r2",
) -> tuple[list[ConvergenceRow], list[CellFailure]]:
    """Cross product of games and solvers, one independent state per cell."""
    if not games or not solvers:
        raise UsageError("need at least one game and one solver")
    configs = [
        RunConfig(
            game=g, solver=s, iterations=iterations, eval_every=eval_every,
            eval_schedule=eval_schedule, beta_mode=beta_mode,
            record_timing=record_timing,
        )
        for g in games
        for s in solvers
    ]
    return _run_cells(configs, out, threads)


def beta_grid(name_or_list: str) -> tuple[str, ...]:
    """Expand ``coarse``/``fine`` or a comma-separated list of mode specs."""
    token = name_or_list.strip()
    if token == "coarse":
        return COARSE_BETA_GRID
    if token == "fine":
        return FINE_BETA_GRID
    modes = tuple(part.strip() for part in token.split(",") if part.strip())
    if not modes:
        raise UsageError("empty beta grid")
    for mode in modes:
        try:
            BetaMode.parse(mode)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return modes


def run_beta_ablation(
    game: str,
    grid: str | Sequence[str] = "coarse",
    iterations: int = 1_000,
    eval_every: int = 100,
    out: str | Path | None = None,
    threads: int = 1,
    eval_schedule: str = "every",
    record_timing: bool = False,
) -> tuple[list[ConvergenceRow], list[CellFailure]]:
    """One ECFR run per beta mode; rows labeled ``ecfr[<mode>]``."""
    modes = beta_grid(grid) if isinstance(grid, str) else tuple(grid)
    configs = [
        RunConfig(
            game=game, solver="ecfr", iterations=iterations,
            eval_every=eval_every, eval_schedule=eval_schedule,
            beta_mode=mode, record_timing=record_timing,
            label=f"ecfr[{mode}]",
        )
        for mode in modes
    ]
    return _run_cells(configs, out, threads)


def run_with_without_beta(
    game: str,
    iterations: int = 10_000,
    eval_every: int = 100,
    out: str | Path | None = None,
    threads: int = 1,
    eval_schedule: str = "every",
    record_timing: bool = False,
    beta_mode: str = "neg-r2",
) -> tuple[list[ConvergenceRow], list[CellFailure]]:
    """Two ECFR runs differing only in the nonpositive-regret branch.

    ``ecfr-with-beta`` uses ``beta_mode``; ``ecfr-without-beta`` accumulates
    zero whenever the instant regret is nonpositive.
    """
    configs = [
        RunConfig(
            game=game, solver="ecfr", iterations=iterations,
            eval_every=eval_every, eval_schedule=eval_schedule,
            beta_mode=beta_mode, record_timing=record_timing,
            label="ecfr-with-beta",
        ),
        RunConfig(
            game=game, solver="ecfr", iterations=iterations,
            eval_every=eval_every, eval_schedule=eval_schedule,
            beta_mode="zero", record_timing=record_timing,
            label="ecfr-without-beta",
        ),
    ]
    return _run_cells(configs, out, threads)


def final_exploitability(rows: Iterable[ConvergenceRow]) -> dict[tuple[str, str], float]:
    """Last sample per (game, solver) — the number the trend checks compare."""
    best: dict[tuple[str, str], ConvergenceRow] = {}
    for row in rows:
        key = (row.game, row.solver)
        if key not in best or row.iteration > best[key].iteration:
            best[key] = row
    return {key: row.exploitability for key, row in best.items()}
