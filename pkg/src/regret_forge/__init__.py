"""regret-forge: regret-minimization solvers for small imperfect-information games.

The package splits into five layers: game definitions (:mod:`.game`,
:mod:`.poker`), the flat-array tree compiler (:mod:`.tree`) with its numba
kernels (:mod:`.kernels`), the solver variants (:mod:`.solver`), evaluation
(:mod:`.exploitability`), and the benchmark runners plus CLI (:mod:`.bench`,
:mod:`.cli`).
"""
from .game import (
    CHANCE,
    PLAYERS,
    Action,
    GameDefinition,
    GameError,
    HistoryState,
    IllegalActionError,
    InfoSetKey,
    TerminalStateError,
    TreeStats,
    iter_states,
    tree_stats,
    verify_game,
)
from .poker import (
    BettingRules,
    Card,
    LimitPokerGame,
    build_kuhn,
    build_leduc,
    build_royal,
    game_by_name,
    game_names,
)
from .tree import CompiledGame, compile_game
from .solver import (
    DEFAULT_BETA_MODE,
    VARIANTS,
    BetaMode,
    ConvergenceRow,
    RegretRecord,
    SolverError,
    SolverState,
    VariantPolicy,
    accumulate_average_strategy,
    accumulate_regret_ecfr,
    accumulate_regret_variant,
    centered_regret,
    counterfactual_values,
    ecfr_l1,
    exp_weight,
    extract_average_strategy,
    instant_regret,
    next_strategy_ecfr,
    regret_matching,
    train,
)
from .exploitability import (
    ExploitabilityReport,
    StrategyProfile,
    best_response_value,
    expected_utility,
    exploitability,
    profile_matrix,
)
from .bench import (
    COARSE_BETA_GRID,
    CSV_HEADER,
    FINE_BETA_GRID,
    SOLVER_NAMES,
    CellFailure,
    RunConfig,
    UsageError,
    beta_grid,
    canonical_solver,
    eval_points,
    final_exploitability,
    read_csv,
    run_beta_ablation,
    run_comparison,
    run_single,
    run_with_without_beta,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CHANCE", "PLAYERS", "Action", "GameDefinition", "GameError",
    "HistoryState", "IllegalActionError", "InfoSetKey", "TerminalStateError",
    "TreeStats", "iter_states", "tree_stats", "verify_game",
    "BettingRules", "Card", "LimitPokerGame", "build_kuhn", "build_leduc",
    "build_royal", "game_by_name", "game_names",
    "CompiledGame", "compile_game",
    "DEFAULT_BETA_MODE", "VARIANTS", "BetaMode", "ConvergenceRow",
    "RegretRecord", "SolverError", "SolverState", "VariantPolicy",
    "accumulate_average_strategy", "accumulate_regret_ecfr",
    "accumulate_regret_variant", "centered_regret", "counterfactual_values",
    "ecfr_l1", "exp_weight", "extract_average_strategy", "instant_regret",
    "next_strategy_ecfr", "regret_matching", "train",
    "ExploitabilityReport", "StrategyProfile", "best_response_value",
    "expected_utility", "exploitability", "profile_matrix",
    "COARSE_BETA_GRID", "CSV_HEADER", "FINE_BETA_GRID", "SOLVER_NAMES",
    "CellFailure",
    "RunConfig", "UsageError", "beta_grid", "canonical_solver", "eval_points",
    "final_exploitability", "read_csv", "run_beta_ablation", "run_comparison",
    "run_single", "run_with_without_beta", "write_csv",
    "__version__",
]
