"""Regret-minimization solvers for two-player zero-sum games.

Five update rules share one training loop.  All of them walk the full tree
once per player per iteration, turn counterfactual values into per-action
instant regrets, and play the next iteration proportionally to accumulated
regret; they differ only in how regret and the average strategy are
accumulated:

* ``cfr``      — plain cumulative regret, uniform averaging.
* ``cfr_plus`` — cumulative regret floored at zero each update, linear
  (weight ``t``) averaging.
* ``lcfr``     — instant regret weighted by ``t``, linear averaging.
* ``dcfr``     — after each update positive totals shrink by
  ``t^a/(t^a+1)`` and negative totals by ``t^b/(t^b+1)``; average-strategy
  mass shrinks by ``(t/(t+1))^g``.
* ``ecfr``     — every instant regret is first centred against its
  information set's mean, and that centred value (clamped, exponentiated)
  scales the update.  Nonpositive instant regrets contribute a substitute
  value ``beta`` instead of the raw regret; the next strategy and the
  average strategy are weighted by the same exponential factor.

Strategies start uniform, iterations are counted from 1, and both players
are updated in turn inside one iteration (player 1 already sees player 0's
refreshed strategy).  Everything is float64 and free of randomness, so runs
are exactly reproducible.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .exploitability import StrategyProfile, exploitability
from .game import GameDefinition, InfoSetKey
from .kernels import walk_values
from .tree import CompiledGame, compile_game

VARIANTS = ("cfr", "cfr_plus", "lcfr", "dcfr", "ecfr")


class SolverError(Exception):
    """Training produced an inconsistent or non-finite update."""


# ---------------------------------------------------------------------------
# substitute values for nonpositive instant regrets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaMode:
    """Substitute value fed into the update when an instant regret is <= 0.

    Every supported mode is of the form ``coef * r**r_power * t**t_power``
    where ``r`` is the instant regret and ``t`` the 1-based iteration, so a
    mode is a pure, finite function of ``(r, t)``.  ``spec`` keeps the
    original mode string for reports.
    """

    coef: float
    r_power: int = 0
    t_power: int = 0
    spec: str = ""

    def __call__(self, r: np.ndarray | float, t: int) -> np.ndarray | float:
        out = self.coef
        if self.r_power:
            out = out * np.asarray(r, dtype=float) ** self.r_power
        if self.t_power:
            out = out * float(t) ** self.t_power
        return out

    def __str__(self) -> str:
        return self.spec or f"const:{self.coef:g}"

    @classmethod
    def parse(cls, spec: str) -> "BetaMode":
        """Parse a mode string.

        Grammar: ``zero``; ``const:<float>``; ``[neg-]r``/``r2``/``r3``;
        ``[neg-]inv-t``/``inv-t2``/``inv-t3``; ``t-r``/``t-r2``/``t-r3``;
        ``[neg-]r2-over-t``/``r2-over-t2`` (and the r/r3 spellings).
        Examples: ``const:-0.0001`` is the constant -1e-4, ``neg-r2`` is
        ``-r^2``, ``r2-over-t`` at ``r=2, t=4`` gives 1.
        """
        text = spec.strip().lower()
        if not text:
            raise ValueError("empty beta mode")
        if text == "zero":
            return cls(0.0, spec="zero")
        if text.startswith("const:"):
            try:
                value = float(text[len("const:"):])
            except ValueError:
                raise ValueError(f"bad constant in beta mode {spec!r}") from None
            return cls(value, spec=f"const:{value:g}")
        coef = 1.0
        body = text
        if body.startswith("neg-"):
            coef = -1.0
            body = body[len("neg-"):]

        def r_pow(token: str) -> int:
            if token == "r":
                return 1
            if token in ("r2", "r3"):
                return int(token[1])
            raise ValueError(f"bad beta mode {spec!r}")

        if body.startswith("t-"):
            if coef < 0:
                raise ValueError(f"bad beta mode {spec!r}")
            return cls(1.0, r_pow(body[2:]), 1, spec=text)
        if "-over-t" in body:
            num, _, tail = body.partition("-over-t")
            t_power = -1 if tail == "" else -int(tail)
            if t_power not in (-1, -2, -3):
                raise ValueError(f"bad beta mode {spec!r}")
            return cls(coef, r_pow(num), t_power, spec=text)
        if body.startswith("inv-t"):
            tail = body[len("inv-t"):]
            t_power = -1 if tail == "" else -int(tail)
            if t_power not in (-1, -2, -3):
                raise ValueError(f"bad beta mode {spec!r}")
            return cls(coef, 0, t_power, spec=text)
        return cls(coef, r_pow(body), 0, spec=text)


#: shipped default: minus the squared instant regret
DEFAULT_BETA_MODE = BetaMode.parse("neg-r2")


@dataclass(frozen=True)
class VariantPolicy:
    """Solver selection plus every tunable the update rules read."""

    name: str
    dcfr_alpha: float = 1.5
    dcfr_beta: float = 0.0
    dcfr_gamma: float = 2.0
    beta_mode: BetaMode = DEFAULT_BETA_MODE
    #: centred regrets are clipped to +-l1_clamp before exponentiation
    l1_clamp: float = 20.0
    #: multiplier on the centred regret inside the exponent; 0 turns the
    #: exponential weighting off entirely (every weight becomes 1)
    l1_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.name not in VARIANTS:
            raise ValueError(f"unknown solver {self.name!r}; expected one of {VARIANTS}")
        if self.l1_clamp <= 0:
            raise ValueError("l1_clamp must be positive")


# ---------------------------------------------------------------------------
# update primitives (rows or matrices; padded slots stay at zero)
# ---------------------------------------------------------------------------


def _with_mask(arr: np.ndarray, n_actions) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    a = np.asarray(arr, dtype=float)
    squeeze = a.ndim == 1
    mat = np.atleast_2d(a)
    if n_actions is None:
        na = np.full(mat.shape[0], mat.shape[1], dtype=np.int64)
    else:
        na = np.atleast_1d(np.asarray(n_actions, dtype=np.int64))
    mask = np.arange(mat.shape[1])[None, :] < na[:, None]
    return mat, na, mask, squeeze


def regret_matching(cumulative_regret, n_actions=None) -> np.ndarray:
    """Distribution proportional to positive accumulated regret.

    When nothing is positive the whole information set falls back to the
    uniform distribution.  Accepts a single row or a stacked matrix with a
    per-row legal-action count.
    """
    mat, na, mask, squeeze = _with_mask(cumulative_regret, n_actions)
    pos = np.where(mask, np.maximum(mat, 0.0), 0.0)
    total = pos.sum(axis=1, keepdims=True)
    uniform = np.where(mask, 1.0 / na[:, None], 0.0)
    out = np.where(total > 0.0, pos / np.where(total > 0.0, total, 1.0), uniform)
    return out[0] if squeeze else out


def instant_regret(v_node, v_action) -> np.ndarray:
    """Per-action advantage over the current mixture at one information set."""
    v_action = np.asarray(v_action, dtype=float)
    return v_action - np.asarray(v_node, dtype=float)[..., None]


def centered_regret(r, n_actions=None) -> np.ndarray:
    """Instant regret minus its information-set mean (zero-mean per set)."""
    mat, na, mask, squeeze = _with_mask(r, n_actions)
    mean = mat.sum(axis=1, keepdims=True) / na[:, None]
    out = np.where(mask, mat - mean, 0.0)
    return out[0] if squeeze else out


#: alias used by the update rules: the "loss" each action carries into the
#: exponential weight is its distance from the set average
ecfr_l1 = centered_regret


def exp_weight(x, alpha, beta):
    """``e^alpha * x`` for positive ``x``; ``e^alpha * beta`` otherwise."""
    scale = np.exp(np.asarray(alpha, dtype=float))
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0.0, scale * x, scale * np.asarray(beta, dtype=float))
    return float(out) if out.ndim == 0 else out


def accumulate_regret_ecfr(cumulative, r, l1, t, *, beta_mode=DEFAULT_BETA_MODE,
                           l1_scale=1.0, n_actions=None) -> np.ndarray:
    """Exponentially weighted regret accumulation.

    Positive instant regrets are added scaled by ``e^(l1_scale * l1)``;
    nonpositive ones contribute the scaled substitute ``beta_mode(r, t)``.
    Returns the new cumulative array.
    """
    mat, na, mask, squeeze = _with_mask(cumulative, n_actions)
    r_m = np.atleast_2d(np.asarray(r, dtype=float))
    l1_m = np.atleast_2d(np.asarray(l1, dtype=float))
    beta = np.broadcast_to(np.asarray(beta_mode(r_m, t), dtype=float), r_m.shape)
    inc = np.where(mask, exp_weight(r_m, l1_scale * l1_m, beta), 0.0)
    out = mat + inc
    return out[0] if squeeze else out


def accumulate_regret_variant(cumulative, r, t, policy: VariantPolicy,
                              n_actions=None) -> np.ndarray:
    """Regret accumulation for the non-exponential variants."""
    mat, na, mask, squeeze = _with_mask(cumulative, n_actions)
    r_m = np.where(mask, np.atleast_2d(np.asarray(r, dtype=float)), 0.0)
    if policy.name == "cfr":
        out = mat + r_m
    elif policy.name == "cfr_plus":
        out = np.maximum(mat + r_m, 0.0)
    elif policy.name == "lcfr":
        out = mat + t * r_m
    elif policy.name == "dcfr":
        out = mat + r_m
        ta = float(t) ** policy.dcfr_alpha
        tb = float(t) ** policy.dcfr_beta
        out = np.where(out > 0.0, out * (ta / (ta + 1.0)),
                       np.where(out < 0.0, out * (tb / (tb + 1.0)), out))
    else:
        raise ValueError(f"use accumulate_regret_ecfr for {policy.name}")
    return out[0] if squeeze else out


def next_strategy_ecfr(cumulative, l1, l1_scale=1.0, n_actions=None) -> np.ndarray:
    """Next strategy: positive regret mass tilted by the exponential weight.

    Weights are ``e^(l1_scale * l1) * max(cumulative, 0)``; a set with no
    positive mass plays uniformly.
    """
    mat, na, mask, squeeze = _with_mask(cumulative, n_actions)
    l1_m = np.atleast_2d(np.asarray(l1, dtype=float))
    w = np.where(mask, np.exp(l1_scale * l1_m) * np.maximum(mat, 0.0), 0.0)
    total = w.sum(axis=1, keepdims=True)
    uniform = np.where(mask, 1.0 / na[:, None], 0.0)
    out = np.where(total > 0.0, w / np.where(total > 0.0, total, 1.0), uniform)
    return out[0] if squeeze else out


def accumulate_average_strategy(numerator, reach_self, strategy, weight=1.0,
                                n_actions=None) -> np.ndarray:
    """Add one iteration's weighted strategy mass to the running average."""
    mat, na, mask, squeeze = _with_mask(numerator, n_actions)
    sig = np.atleast_2d(np.asarray(strategy, dtype=float))
    reach = np.atleast_1d(np.asarray(reach_self, dtype=float))[:, None]
    w = np.asarray(weight, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    out = mat + np.where(mask, w * reach * sig, 0.0)
    return out[0] if squeeze else out


# ---------------------------------------------------------------------------
# solver state
# ---------------------------------------------------------------------------


@dataclass
class RegretRecord:
    """Live view of one information set's accumulators (mutations stick)."""

    key: InfoSetKey
    actions: tuple[str, ...]
    cumulative_regret: np.ndarray
    avg_strategy_numerator: np.ndarray
    current_strategy: np.ndarray
    last_instant_regret: np.ndarray
    last_l1: np.ndarray


@dataclass(frozen=True)
class ConvergenceRow:
    """One benchmark sample emitted on the evaluation schedule."""

    game: str
    solver: str
    iteration: int
    exploitability: float
    elapsed_ms: int


class SolverState:
    """All mutable training state for one (game, policy) pair.

    The per-set accumulators live in dense ``(n_infosets, max_actions)``
    matrices; unused action slots are permanently zero.  ``record`` exposes
    the rows of a single information set as writable views.
    """

    def __init__(self, game: GameDefinition, policy: VariantPolicy) -> None:
        self.game = game
        self.policy = policy
        self.compiled: CompiledGame = compile_game(game)
        cg = self.compiled
        self.t = 0
        self.n_actions = cg.infoset_n_actions
        self.mask = cg.legal_mask()
        shape = (cg.n_infosets, cg.max_actions)
        self.cumulative_regret = np.zeros(shape)
        self.avg_strategy_numerator = np.zeros(shape)
        self.current_strategy = cg.uniform_strategy()
        self.last_instant_regret = np.zeros(shape)
        self.last_l1 = np.zeros(shape)

    # -- queries -------------------------------------------------------------

    def record(self, key: InfoSetKey | str) -> RegretRecord:
        if isinstance(key, str):
            key = InfoSetKey.parse(key)
        idx = self.compiled.key_index[key]
        na = int(self.n_actions[idx])
        return RegretRecord(
            key=key,
            actions=self.compiled.infoset_labels[idx],
            cumulative_regret=self.cumulative_regret[idx, :na],
            avg_strategy_numerator=self.avg_strategy_numerator[idx, :na],
            current_strategy=self.current_strategy[idx, :na],
            last_instant_regret=self.last_instant_regret[idx, :na],
            last_l1=self.last_l1[idx, :na],
        )

    def average_strategy_matrix(self) -> np.ndarray:
        """Normalized average strategy; never-reached sets play uniformly."""
        total = self.avg_strategy_numerator.sum(axis=1, keepdims=True)
        uniform = self.compiled.uniform_strategy()
        with np.errstate(invalid="ignore"):
            out = np.where(
                total > 0.0,
                self.avg_strategy_numerator / np.where(total > 0.0, total, 1.0),
                uniform,
            )
        return out

    def average_strategy(self) -> StrategyProfile:
        matrix = self.average_strategy_matrix()
        table = {
            key: matrix[i, : self.n_actions[i]].copy()
            for i, key in enumerate(self.compiled.infoset_keys)
        }
        return StrategyProfile(table)

    # -- updates -------------------------------------------------------------

    def step(self, check_invariants: bool = False) -> None:
        """Run one full iteration: player 0's update, then player 1's."""
        self.t += 1
        t = self.t
        cg = self.compiled
        for player in (0, 1):
            weights = cg.pass_weights(self.current_strategy)
            _, cf_action, reach_inf = walk_values(
                cg.node_kind, cg.node_player, cg.node_infoset, cg.node_util0,
                cg.child_start, cg.edge_child, cg.edge_widx, weights,
                player, cg.n_infosets, cg.max_actions,
            )
            rows = cg.player_rows[player]
            self._update_player(rows, cf_action[rows], reach_inf[rows], t, check_invariants)
        if check_invariants:
            self.verify_invariants()

    def _update_player(self, rows, cf_action, reach_inf, t: int,
                       check_invariants: bool) -> None:
        policy = self.policy
        mask = self.mask[rows]
        na = self.n_actions[rows]
        sigma = self.current_strategy[rows]
        v_node = (sigma * cf_action).sum(axis=1)
        r = np.where(mask, cf_action - v_node[:, None], 0.0)
        l1 = np.clip(centered_regret(r, na), -policy.l1_clamp, policy.l1_clamp)
        self.last_instant_regret[rows] = r
        self.last_l1[rows] = l1

        if check_invariants:
            residual = np.abs((sigma * r).sum(axis=1))
            worst = int(np.argmax(residual))
            if residual[worst] > 1e-9:
                raise SolverError(
                    f"instant regrets unbalanced at {self._row_key(rows, worst)}: "
                    f"{residual[worst]:.3e}"
                )

        if policy.name == "ecfr":
            cum = accumulate_regret_ecfr(
                self.cumulative_regret[rows], r, l1, t,
                beta_mode=policy.beta_mode, l1_scale=policy.l1_scale, n_actions=na,
            )
            avg_w = np.exp(policy.l1_scale * l1)
        else:
            cum = accumulate_regret_variant(
                self.cumulative_regret[rows], r, t, policy, n_actions=na
            )
            avg_w = float(t) if policy.name in ("cfr_plus", "lcfr") else 1.0

        if not np.isfinite(cum).all():
            bad = int(np.argmax(~np.isfinite(cum).all(axis=1)))
            raise SolverError(
                f"non-finite cumulative regret at {self._row_key(rows, bad)} (t={t})"
            )
        self.cumulative_regret[rows] = cum

        numer = accumulate_average_strategy(
            self.avg_strategy_numerator[rows], reach_inf, sigma, avg_w, n_actions=na
        )
        if policy.name == "dcfr":
            numer = numer * (t / (t + 1.0)) ** policy.dcfr_gamma
        self.avg_strategy_numerator[rows] = numer

        if policy.name == "ecfr":
            self.current_strategy[rows] = next_strategy_ecfr(
                cum, l1, policy.l1_scale, n_actions=na
            )
        else:
            self.current_strategy[rows] = regret_matching(cum, n_actions=na)

    def _row_key(self, rows, offset: int) -> InfoSetKey:
        return self.compiled.infoset_keys[int(rows[offset])]

    def verify_invariants(self, atol: float = 1e-9) -> None:
        """Structural checks; raises :class:`SolverError` on violation."""
        strat = self.current_strategy
        if np.any(strat < -atol) or np.any(strat[~self.mask] != 0.0):
            raise SolverError("current strategy has negative or out-of-range mass")
        sums = strat.sum(axis=1)
        bad = np.abs(sums - 1.0) > atol
        if bad.any():
            raise SolverError(
                f"current strategy not normalized at "
                f"{self.compiled.infoset_keys[int(np.argmax(bad))]}"
            )
        if self.policy.name == "cfr_plus" and np.any(self.cumulative_regret < 0.0):
            raise SolverError("cfr_plus cumulative regret went negative")
        if not np.isfinite(self.avg_strategy_numerator).all():
            raise SolverError("average-strategy mass is not finite")


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------


def train(
    game: GameDefinition,
    policy: VariantPolicy,
    iterations: int,
    *,
    eval_points: Iterable[int] | None = None,
    label: str | None = None,
    record_timing: bool = True,
    invariant_check_every: int = 100,
    on_row: Callable[[ConvergenceRow], None] | None = None,
) -> tuple[SolverState, list[ConvergenceRow]]:
    """Train ``policy`` on ``game`` and sample exploitability along the way.

    ``eval_points`` lists the iterations at which the average strategy is
    scored (default: only the last one).  ``invariant_check_every`` sets the
    cadence of the structural self-checks (1 = every iteration).  Returns the
    final state and one convergence row per evaluation point.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    points = {int(p) for p in (eval_points if eval_points is not None else [iterations])}
    if points and (min(points) < 1 or max(points) > iterations):
        raise ValueError("evaluation points must fall inside 1..iterations")
    state = SolverState(game, policy)
    solver_label = label if label is not None else policy.name
    rows: list[ConvergenceRow] = []
    started = time.perf_counter()
    for t in range(1, iterations + 1):
        check = invariant_check_every > 0 and (t % invariant_check_every == 1 or invariant_check_every == 1)
        state.step(check_invariants=check)
        if t in points:
            report = exploitability(game, state.average_strategy())
            elapsed = int(round((time.perf_counter() - started) * 1000)) if record_timing else 0
            row = ConvergenceRow(
                game=game.name,
                solver=solver_label,
                iteration=t,
                exploitability=report.total_exploitability,
                elapsed_ms=elapsed,
            )
            rows.append(row)
            if on_row is not None:
                on_row(row)
    return state, rows


def extract_average_strategy(state: SolverState) -> StrategyProfile:
    """Normalized average strategy of a solver state."""
    return state.average_strategy()


def counterfactual_values(
    game: GameDefinition,
    profile: StrategyProfile | Mapping[InfoSetKey, np.ndarray],
    player: int,
) -> tuple[float, dict[InfoSetKey, tuple[float, np.ndarray]]]:
    """Tree-pass counterfactual values for every information set of ``player``.

    Returns the root expected utility and, per information set, the pair
    ``(v_set, v_actions)`` where ``v_set`` is the strategy-weighted mixture
    of ``v_actions``.
    """
    from .exploitability import profile_matrix  # local import to stay acyclic

    cg = compile_game(game)
    if not isinstance(profile, StrategyProfile):
        profile = StrategyProfile(dict(profile))
    strat = profile_matrix(cg, profile)
    root_value, cf_action, _ = walk_values(
        cg.node_kind, cg.node_player, cg.node_infoset, cg.node_util0,
        cg.child_start, cg.edge_child, cg.edge_widx, cg.pass_weights(strat),
        player, cg.n_infosets, cg.max_actions,
    )
    out: dict[InfoSetKey, tuple[float, np.ndarray]] = {}
    for i in cg.player_rows[player]:
        na = int(cg.infoset_n_actions[i])
        v_actions = cf_action[i, :na].copy()
        v_set = float(strat[i, :na] @ v_actions)
        out[cg.infoset_keys[i]] = (v_set, v_actions)
    return float(root_value), out
