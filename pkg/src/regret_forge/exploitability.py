"""Strategy evaluation: expected utility, best response, exploitability.

``expected_utility`` deliberately walks history objects recursively — slow
but direct — so it can serve as an independent cross-check for the compiled
tree passes used everywhere else.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .game import CHANCE, GameDefinition, GameError, InfoSetKey
from .kernels import best_response_kernel
from .tree import CompiledGame, compile_game


class StrategyProfile:
    """Map from information-set keys to action distributions.

    Keys carry their player, so one table covers both seats.  Any key not in
    the table plays uniformly, which makes the empty profile the all-uniform
    one.  Rows are validated on construction: finite, nonnegative within
    tolerance, summing to one.
    """

    __slots__ = ("table",)

    def __init__(self, table: Mapping[InfoSetKey, Sequence[float]] | None = None) -> None:
        cleaned: dict[InfoSetKey, np.ndarray] = {}
        for key, row in (table or {}).items():
            probs = np.asarray(row, dtype=float)
            if probs.ndim != 1 or probs.size == 0:
                raise ValueError(f"{key}: probability row must be a non-empty vector")
            if not np.isfinite(probs).all() or np.any(probs < -1e-12):
                raise ValueError(f"{key}: invalid probabilities {probs}")
            if abs(float(probs.sum()) - 1.0) > 1e-9:
                raise ValueError(f"{key}: probabilities sum to {probs.sum()}, not 1")
            cleaned[key] = np.clip(probs, 0.0, None)
        self.table = cleaned

    @classmethod
    def uniform(cls) -> "StrategyProfile":
        return cls()

    def probs(self, key: InfoSetKey, n_actions: int) -> np.ndarray:
        row = self.table.get(key)
        if row is None:
            return np.full(n_actions, 1.0 / n_actions)
        if row.size != n_actions:
            raise ValueError(f"{key}: profile row has {row.size} entries, game has {n_actions}")
        return row

    def __len__(self) -> int:
        return len(self.table)

    def __contains__(self, key: InfoSetKey) -> bool:
        return key in self.table


@dataclass(frozen=True)
class ExploitabilityReport:
    """Best-response values against a profile and their sum.

    ``best_response_values[i]`` is what player ``i`` could win by playing
    perfectly against the profile's other seat.  The sum is zero exactly at
    an equilibrium, and ``game_value_estimate`` is the midpoint of the
    bracket the two best responses pin around player 0's game value.
    """

    best_response_values: tuple[float, float]
    total_exploitability: float
    game_value_estimate: float


def profile_matrix(compiled: CompiledGame, profile: StrategyProfile) -> np.ndarray:
    """Dense ``(n_infosets, max_actions)`` view of a profile (uniform fill)."""
    strat = compiled.uniform_strategy()
    for key, row in profile.table.items():
        idx = compiled.key_index.get(key)
        if idx is None:
            raise GameError(f"{compiled.game.name}: unknown information set {key}")
        na = int(compiled.infoset_n_actions[idx])
        if row.size != na:
            raise GameError(f"{key}: row length {row.size} != {na} legal actions")
        strat[idx, :na] = row
        strat[idx, na:] = 0.0
    return strat


def expected_utility(game: GameDefinition, profile: StrategyProfile, player: int) -> float:
    """Exact expected chips for ``player`` by full terminal enumeration.

    Every terminal history is visited once and weighted by the product of
    the chance probabilities and both players' action probabilities along
    the way.  This is the reference implementation the fast tree passes are
    tested against.
    """
    if player not in (0, 1):
        raise GameError(f"no payoff for actor {player}")

    def walk(state, reach: float) -> float:
        if state.terminal:
            return reach * game.terminal_utility(state, player)
        if game.current_player(state) == CHANCE:
            return sum(
                walk(game.next_state(state, action), reach * p)
                for action, p in game.chance_probabilities(state)
            )
        actions = game.legal_actions(state)
        probs = profile.probs(game.infoset_key(state), len(actions))
        return sum(
            walk(game.next_state(state, action), reach * probs[action.id])
            for action in actions
        )

    return walk(game.root(), 1.0)


def best_response_value(game: GameDefinition, profile: StrategyProfile, player: int) -> float:
    """Value of the exact best response for ``player`` against ``profile``.

    Computed by backward induction over the compiled tree: deeper
    information sets commit to their maximizing action first, weighting each
    member history by the opponent's and chance's reach.
    """
    if player not in (0, 1):
        raise GameError(f"no payoff for actor {player}")
    cg = compile_game(game)
    strat = profile_matrix(cg, profile)
    value, _ = best_response_kernel(
        cg.node_kind, cg.node_player, cg.node_infoset, cg.node_util0,
        cg.child_start, cg.edge_child, cg.edge_widx, cg.pass_weights(strat),
        cg.nodes_by_depth, cg.depth_node_start, cg.infoset_n_actions,
        player, cg.n_infosets, cg.max_actions,
    )
    return float(value)


def exploitability(game: GameDefinition, profile: StrategyProfile) -> ExploitabilityReport:
    """How many chips per hand a perfect opponent pair would extract.

    The total is the sum of both players' best-response values; it is
    nonnegative for every profile and zero exactly at a Nash equilibrium.
    """
    br0 = best_response_value(game, profile, 0)
    br1 = best_response_value(game, profile, 1)
    return ExploitabilityReport(
        best_response_values=(br0, br1),
        total_exploitability=br0 + br1,
        game_value_estimate=(br0 - br1) / 2.0,
    )
