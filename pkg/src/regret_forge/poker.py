"""Heads-up fixed-limit poker games on tiny decks.

One parametric engine covers all three benchmark games:

* ``kuhn``  — 3 cards (J,Q,K), one betting round, 1-chip bets, one raise cap.
* ``leduc`` — 6 cards (J,Q,K in two suits), two rounds with bets 2 then 4,
  one public card before the second round, at most two raises per round.
* ``royal`` — 8 cards (J,Q,K,A in two suits), three rounds with bets 2/4/4,
  a public card before the second and third rounds, two raises per round.

Both players ante one chip.  Player 0 opens every betting round.  A betting
round ends when both players check, a bet is called, or someone folds (which
ends the hand).  At showdown a private card that pairs any public card beats
any unpaired hand; ties on the resulting rank split the pot (utility 0).

Betting strings use one character per action — ``k`` check/call, ``b`` bet,
``r`` raise, ``f`` fold — with ``/`` between rounds, so an info-set key looks
like ``P1|Qh|Ks|kb/ b`` minus the space.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .game import (
    CHANCE,
    Action,
    GameDefinition,
    GameError,
    HistoryState,
    IllegalActionError,
    InfoSetKey,
    TerminalStateError,
)

RANK_LABELS = "JQKA"
SUIT_LABELS = "sh"


@dataclass(frozen=True)
class Card:
    """A physical card; ``rank`` orders showdowns, ``suit`` only tells cards apart."""

    rank: int
    suit: int

    @property
    def label(self) -> str:
        base = RANK_LABELS[self.rank]
        return base + SUIT_LABELS[self.suit] if self.n_suits > 1 else base

    # label depends on whether the deck is suited at all; the game sets this
    # once at construction time.
    n_suits: int = 1


@dataclass(frozen=True)
class BettingRules:
    """Fixed-limit structure shared by the engine."""

    rounds: int
    bet_sizes: tuple[int, ...]
    ante: int = 1
    max_raises: int = 2
    publics_per_round: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rounds < 1 or len(self.bet_sizes) != self.rounds:
            raise ValueError("need one bet size per betting round")
        if len(self.publics_per_round) != self.rounds:
            raise ValueError("need one public-card count per betting round")
        if self.publics_per_round[0] != 0:
            raise ValueError("the first round starts right after the private deal")


@dataclass(frozen=True)
class PokerState(HistoryState):
    """History in a limit-poker hand; all bookkeeping is precomputed."""

    # deck indices dealt so far: (p0 private, p1 private, publics...)
    board: tuple[int, ...] = ()
    round_no: int = 0
    # one betting string per round opened so far; the last one is in progress
    bet_rounds: tuple[str, ...] = ("",)
    # chips put in during the current round, per player
    street: tuple[int, int] = (0, 0)
    # total chips put in (antes included), per player
    contrib: tuple[int, int] = (0, 0)
    raises: int = 0
    folder: int | None = None

    @property
    def betting_string(self) -> str:
        return "/".join(self.bet_rounds)


class LimitPokerGame(GameDefinition):
    """Engine instance for a concrete deck and betting structure."""

    def __init__(self, name: str, deck: Sequence[Card], rules: BettingRules) -> None:
        self.name = name
        self.deck = tuple(deck)
        self.rules = rules
        if len({(c.rank, c.suit) for c in self.deck}) != len(self.deck):
            raise ValueError("duplicate cards in deck")
        self.total_publics = sum(rules.publics_per_round)
        if len(self.deck) < 2 + self.total_publics:
            raise ValueError("deck too small for the deal")
        # worst case: ante plus a capped raising war every round
        self.max_payoff_spread = float(
            rules.ante + sum(rules.max_raises * b for b in rules.bet_sizes)
        )
        self._root = PokerState(contrib=(rules.ante, rules.ante))

    # -- helpers -------------------------------------------------------------

    def _publics_dealt(self, state: PokerState) -> int:
        return max(0, len(state.board) - 2)

    def _publics_needed(self, state: PokerState) -> int:
        return sum(self.rules.publics_per_round[: state.round_no + 1])

    def _in_deal_phase(self, state: PokerState) -> bool:
        return len(state.board) < 2 or self._publics_dealt(state) < self._publics_needed(state)

    def _require_decision(self, state: PokerState) -> None:
        if state.terminal:
            raise TerminalStateError(f"{self.name}: terminal history {state.actions}")

    # -- contract ------------------------------------------------------------

    def root(self) -> PokerState:
        return self._root

    def current_player(self, state: PokerState) -> int:
        self._require_decision(state)
        return state.player

    def legal_actions(self, state: PokerState) -> list[Action]:
        self._require_decision(state)
        if state.player == CHANCE:
            return [a for a, _ in self.chance_probabilities(state)]
        me, opp = state.player, 1 - state.player
        outstanding = state.street[opp] - state.street[me]
        can_raise = state.raises < self.rules.max_raises
        if outstanding == 0:
            acts = [Action(0, "check")]
            if can_raise:
                acts.append(Action(1, "bet"))
        else:
            acts = [Action(0, "fold"), Action(1, "call")]
            if can_raise:
                acts.append(Action(2, "raise"))
        return acts

    def chance_probabilities(self, state: PokerState) -> list[tuple[Action, float]]:
        self._require_decision(state)
        if state.player != CHANCE:
            raise GameError(f"{self.name}: {state.actions} is a decision node, not chance")
        if len(state.board) < 2:
            pairs = [
                (i, j)
                for i in range(len(self.deck))
                for j in range(len(self.deck))
                if i != j
            ]
            p = 1.0 / len(pairs)
            return [
                (Action(k, f"{self.deck[i].label},{self.deck[j].label}"), p)
                for k, (i, j) in enumerate(pairs)
            ]
        remaining = [i for i in range(len(self.deck)) if i not in state.board]
        p = 1.0 / len(remaining)
        return [(Action(k, self.deck[i].label), p) for k, i in enumerate(remaining)]

    def next_state(self, state: PokerState, action: Action | int) -> PokerState:
        self._require_decision(state)
        action_id = action.id if isinstance(action, Action) else int(action)
        if state.player == CHANCE:
            return self._deal(state, action_id)
        return self._bet(state, action_id)

    def terminal_utility(self, state: PokerState, player: int) -> float:
        if not state.terminal:
            raise TerminalStateError(f"{self.name}: {state.actions} is not terminal")
        if player not in (0, 1):
            raise GameError(f"{self.name}: no payoff for actor {player}")
        if state.folder is not None:
            lost = state.contrib[state.folder]
            return float(-lost if player == state.folder else lost)
        publics = [self.deck[i] for i in state.board[2:]]
        mine = self.hand_rank(self.deck[state.board[player]], publics)
        theirs = self.hand_rank(self.deck[state.board[1 - player]], publics)
        if mine == theirs:
            return 0.0
        # all bets were called, so both stakes are equal
        return float(state.contrib[1 - player] if mine > theirs else -state.contrib[player])

    def infoset_key(self, state: PokerState) -> InfoSetKey:
        self._require_decision(state)
        if state.player == CHANCE:
            raise GameError(f"{self.name}: chance nodes have no information set")
        private = self.deck[state.board[state.player]].label
        publics = "".join(self.deck[i].label for i in state.board[2:])
        return InfoSetKey(state.player, f"{private}|{publics}|{state.betting_string}")

    # -- showdown ranking ----------------------------------------------------

    def hand_rank(self, private: Card, publics: Sequence[Card]) -> int:
        """Comparable strength of ``private`` against the full board.

        Pairing any public card dominates every unpaired hand; within each
        tier the private rank decides.
        """
        if len(publics) != self.total_publics:
            raise GameError(
                f"{self.name}: showdown needs {self.total_publics} public cards, got {len(publics)}"
            )
        paired = any(p.rank == private.rank for p in publics)
        return 1000 * int(paired) + private.rank

    # -- transitions ----------------------------------------------------------

    def _deal(self, state: PokerState, action_id: int) -> PokerState:
        outcomes = self.chance_probabilities(state)
        if not 0 <= action_id < len(outcomes):
            raise IllegalActionError(f"{self.name}: chance outcome {action_id} out of range")
        if len(state.board) < 2:
            pairs = [
                (i, j)
                for i in range(len(self.deck))
                for j in range(len(self.deck))
                if i != j
            ]
            board = pairs[action_id]
        else:
            remaining = [i for i in range(len(self.deck)) if i not in state.board]
            board = state.board + (remaining[action_id],)
        nxt = replace(
            state,
            actions=state.actions + (action_id,),
            board=board,
        )
        if self._in_deal_phase(nxt):
            return nxt  # another public card still owed
        return replace(nxt, player=0)

    def _bet(self, state: PokerState, action_id: int) -> PokerState:
        acts = {a.id: a for a in self.legal_actions(state)}
        if action_id not in acts:
            raise IllegalActionError(
                f"{self.name}: action {action_id} not legal at {state.actions} "
                f"(legal: {sorted(acts)})"
            )
        label = acts[action_id].label
        me, opp = state.player, 1 - state.player
        round_str = state.bet_rounds[-1]
        bet = self.rules.bet_sizes[state.round_no]

        if label == "fold":
            return replace(
                state,
                actions=state.actions + (action_id,),
                bet_rounds=state.bet_rounds[:-1] + (round_str + "f",),
                player=opp,
                terminal=True,
                folder=me,
            )

        if label == "check":
            nxt = replace(
                state,
                actions=state.actions + (action_id,),
                bet_rounds=state.bet_rounds[:-1] + (round_str + "k",),
                player=opp,
            )
            if round_str == "k":  # both players checked
                return self._close_round(nxt)
            return nxt

        if label == "call":
            owed = state.street[opp] - state.street[me]
            street = list(state.street)
            contrib = list(state.contrib)
            street[me] += owed
            contrib[me] += owed
            nxt = replace(
                state,
                actions=state.actions + (action_id,),
                bet_rounds=state.bet_rounds[:-1] + (round_str + "k",),
                street=(street[0], street[1]),
                contrib=(contrib[0], contrib[1]),
                player=opp,
            )
            return self._close_round(nxt)

        # bet or raise: match whatever is owed, then add one fixed bet
        added = (state.street[opp] - state.street[me]) + bet
        street = list(state.street)
        contrib = list(state.contrib)
        street[me] += added
        contrib[me] += added
        char = "b" if label == "bet" else "r"
        return replace(
            state,
            actions=state.actions + (action_id,),
            bet_rounds=state.bet_rounds[:-1] + (round_str + char,),
            street=(street[0], street[1]),
            contrib=(contrib[0], contrib[1]),
            raises=state.raises + 1,
            player=opp,
        )

    def _close_round(self, state: PokerState) -> PokerState:
        if state.round_no == self.rules.rounds - 1:
            return replace(state, terminal=True)
        nxt = replace(
            state,
            round_no=state.round_no + 1,
            bet_rounds=state.bet_rounds + ("",),
            street=(0, 0),
            raises=0,
        )
        if self._in_deal_phase(nxt):
            return replace(nxt, player=CHANCE)
        return replace(nxt, player=0)


# -- builders -----------------------------------------------------------------


def _deck(n_ranks: int, n_suits: int) -> tuple[Card, ...]:
    return tuple(
        Card(rank=r, suit=s, n_suits=n_suits) for r in range(n_ranks) for s in range(n_suits)
    )


def build_kuhn() -> LimitPokerGame:
    """Three-card one-round game: ante 1, single 1-chip bet, no raises."""
    rules = BettingRules(
        rounds=1, bet_sizes=(1,), ante=1, max_raises=1, publics_per_round=(0,)
    )
    return LimitPokerGame("kuhn", _deck(3, 1), rules)


def build_leduc() -> LimitPokerGame:
    """Six-card two-round game with one public card and bets of 2 then 4."""
    rules = BettingRules(
        rounds=2, bet_sizes=(2, 4), ante=1, max_raises=2, publics_per_round=(0, 1)
    )
    return LimitPokerGame("leduc", _deck(3, 2), rules)


def build_royal() -> LimitPokerGame:
    """Eight-card three-round game (J..A, two suits) with bets 2/4/4."""
    rules = BettingRules(
        rounds=3, bet_sizes=(2, 4, 4), ante=1, max_raises=2, publics_per_round=(0, 1, 1)
    )
    return LimitPokerGame("royal", _deck(4, 2), rules)


_BUILDERS = {"kuhn": build_kuhn, "leduc": build_leduc, "royal": build_royal}


def game_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILDERS))


def game_by_name(name: str) -> LimitPokerGame:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown game {name!r}; expected one of {', '.join(game_names())}") from None
