"""Extensive-form game contract shared by solvers and evaluators.

A game is a finite tree of histories.  At every non-terminal history either
one of the two players or the chance dealer acts; payoffs live at the leaves
and are zero-sum in chips.  Histories the acting player cannot tell apart
share an information-set key, and every strategy object in this package is a
map from those keys to action distributions.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterator

#: Sentinel actor id for the chance dealer.  Chance never receives a payoff.
CHANCE = -1

#: The two decision players.
PLAYERS = (0, 1)


class GameError(Exception):
    """A game operation was called in a state where it has no meaning."""


class TerminalStateError(GameError):
    """A decision-only query (actions, actor, key) hit a terminal history."""


class IllegalActionError(GameError):
    """``next_state`` was asked to apply an action that is not available."""


@dataclass(frozen=True)
class Action:
    """One edge out of a decision or chance node.

    ``id`` is the dense index of the action at its state (0..k-1 with no
    gaps); ``label`` is the human-readable name, unique among siblings.
    """

    id: int
    label: str

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class InfoSetKey:
    """Canonical identity of an information set.

    ``observation`` packs everything the acting player can see, as
    ``"<private cards>|<public cards>|<betting string>"`` for the poker
    games.  The string form ``P<player>|<observation>`` is what appears in
    reports and strategy dumps.
    """

    player: int
    observation: str

    def __str__(self) -> str:
        return f"P{self.player}|{self.observation}"

    @classmethod
    def parse(cls, text: str) -> "InfoSetKey":
        """Inverse of ``str()``: ``"P0|J||"`` -> ``InfoSetKey(0, "J||")``."""
        if not text.startswith("P") or "|" not in text:
            raise ValueError(f"not an info-set key: {text!r}")
        head, observation = text.split("|", 1)
        return cls(int(head[1:]), observation)


@dataclass(frozen=True)
class HistoryState:
    """Immutable history node.

    Concrete games subclass this with whatever cached bookkeeping they need;
    the solver only relies on the three fields below.

    Attributes:
        actions: ids of the actions taken from the root, in order.
        player: the actor at this history (0, 1 or ``CHANCE``); meaningless
            when ``terminal`` is set.
        terminal: whether the history is a leaf.
    """

    actions: tuple[int, ...] = field(default=())
    player: int = CHANCE
    terminal: bool = False


class GameDefinition(ABC):
    """Rules object: pure functions over immutable history states.

    Implementations must be deterministic — repeated calls with equal
    arguments return equal results — so that tree enumeration, training and
    evaluation are exactly reproducible.
    """

    #: short lowercase identifier, e.g. ``"kuhn"``
    name: str = "?"

    #: Largest possible gap between a player's best and worst payoff, in
    #: chips.  Used by regret-bound checks and normalizations.
    max_payoff_spread: float = 0.0

    @abstractmethod
    def root(self) -> HistoryState:
        """The empty history."""

    @abstractmethod
    def legal_actions(self, state: HistoryState) -> list[Action]:
        """Actions available to the actor at ``state``.

        Defined for decision and chance nodes; raises
        :class:`TerminalStateError` on leaves.
        """

    @abstractmethod
    def next_state(self, state: HistoryState, action: Action | int) -> HistoryState:
        """Child history after ``action``; ``state`` itself is unchanged."""

    @abstractmethod
    def current_player(self, state: HistoryState) -> int:
        """Actor at ``state``: 0, 1 or ``CHANCE``; error on terminals."""

    @abstractmethod
    def chance_probabilities(self, state: HistoryState) -> list[tuple[Action, float]]:
        """Outcome distribution at a chance node (probabilities sum to 1)."""

    @abstractmethod
    def terminal_utility(self, state: HistoryState, player: int) -> float:
        """Chips won by ``player`` at a leaf; the two players sum to zero."""

    @abstractmethod
    def infoset_key(self, state: HistoryState) -> InfoSetKey:
        """Information-set key of a decision node."""

    # -- generic helpers ----------------------------------------------------

    def action_by_id(self, state: HistoryState, action_id: int) -> Action:
        for a in self.legal_actions(state):
            if a.id == action_id:
                return a
        raise IllegalActionError(f"{self.name}: action id {action_id} not legal at {state}")


@dataclass(frozen=True)
class TreeStats:
    """Exhaustive enumeration counts for a game tree."""

    nodes: int
    terminals: int
    chance_nodes: int
    decision_nodes: int
    infosets: tuple[int, int]  # per player
    max_depth: int

    @property
    def total_infosets(self) -> int:
        return sum(self.infosets)


def iter_states(game: GameDefinition) -> Iterator[HistoryState]:
    """Depth-first enumeration of every history in the game, root first.

    Child subtrees are visited in action-id order, so the sequence is
    deterministic.
    """
    stack = [game.root()]
    while stack:
        state = stack.pop()
        yield state
        if state.terminal:
            continue
        children = [game.next_state(state, a) for a in game.legal_actions(state)]
        stack.extend(reversed(children))


def tree_stats(game: GameDefinition) -> TreeStats:
    """Walk the full tree once and count what is in it."""
    nodes = terminals = chance_nodes = decision_nodes = 0
    keys: tuple[set[InfoSetKey], set[InfoSetKey]] = (set(), set())
    max_depth = 0
    for state in iter_states(game):
        nodes += 1
        max_depth = max(max_depth, len(state.actions))
        if state.terminal:
            terminals += 1
        elif state.player == CHANCE:
            chance_nodes += 1
        else:
            decision_nodes += 1
            keys[state.player].add(game.infoset_key(state))
    return TreeStats(
        nodes=nodes,
        terminals=terminals,
        chance_nodes=chance_nodes,
        decision_nodes=decision_nodes,
        infosets=(len(keys[0]), len(keys[1])),
        max_depth=max_depth,
    )


def verify_game(game: GameDefinition, atol: float = 1e-12) -> TreeStats:
    """Full-tree consistency audit; raises ``GameError`` on any violation.

    Checks, for every history: the actor is 0/1/chance; chance outcome
    probabilities are positive and sum to one; terminal payoffs are zero-sum
    and bounded by ``max_payoff_spread``; action ids are dense and labels
    unique; and all histories sharing an info-set key agree on actor and
    action labels.
    """
    infoset_shape: dict[InfoSetKey, tuple[int, tuple[str, ...]]] = {}
    for state in iter_states(game):
        if state.terminal:
            u0 = game.terminal_utility(state, 0)
            u1 = game.terminal_utility(state, 1)
            if abs(u0 + u1) > atol:
                raise GameError(f"{game.name}: terminal {state.actions} not zero-sum: {u0}+{u1}")
            if abs(u0) > game.max_payoff_spread + atol:
                raise GameError(f"{game.name}: |payoff| {u0} exceeds spread {game.max_payoff_spread}")
            continue
        actions = game.legal_actions(state)
        if [a.id for a in actions] != list(range(len(actions))):
            raise GameError(f"{game.name}: action ids not dense at {state.actions}")
        if len({a.label for a in actions}) != len(actions):
            raise GameError(f"{game.name}: duplicate action labels at {state.actions}")
        actor = game.current_player(state)
        if actor == CHANCE:
            outcomes = game.chance_probabilities(state)
            if [a.id for a, _ in outcomes] != [a.id for a in actions]:
                raise GameError(f"{game.name}: chance outcomes disagree with actions at {state.actions}")
            total = 0.0
            for _, p in outcomes:
                if p <= 0.0:
                    raise GameError(f"{game.name}: non-positive chance probability at {state.actions}")
                total += p
            if abs(total - 1.0) > atol:
                raise GameError(f"{game.name}: chance probabilities sum to {total} at {state.actions}")
        else:
            if actor not in PLAYERS:
                raise GameError(f"{game.name}: bad actor {actor} at {state.actions}")
            key = game.infoset_key(state)
            if key.player != actor:
                raise GameError(f"{game.name}: key {key} does not match actor {actor}")
            shape = (actor, tuple(a.label for a in actions))
            seen = infoset_shape.setdefault(key, shape)
            if seen != shape:
                raise GameError(f"{game.name}: inconsistent shape for info set {key}: {seen} vs {shape}")
    return tree_stats(game)
