"""Flat array form of a game tree.

Training and evaluation both walk the full tree thousands of times, so the
tree is compiled once into contiguous arrays (one row per history, CSR edge
lists, dense information-set ids) and the hot loops run over those arrays.
Node ids are assigned so that every parent id is smaller than its children's
ids, which lets a single ascending pass propagate reach probabilities and a
single descending pass back up expected values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import CHANCE, GameDefinition, GameError, InfoSetKey

KIND_TERMINAL = 0
KIND_CHANCE = 1
KIND_DECISION = 2

_CACHE_ATTR = "_regret_forge_compiled"


@dataclass
class CompiledGame:
    """Array view of one game tree plus its information-set registry."""

    game: GameDefinition
    n_nodes: int
    n_edges: int
    n_infosets: int
    max_actions: int

    node_kind: np.ndarray  # int8[n]
    node_player: np.ndarray  # int8[n]; CHANCE for chance nodes, -2 for leaves
    node_infoset: np.ndarray  # int64[n]; -1 unless a decision node
    node_util0: np.ndarray  # float64[n]; player-0 payoff at leaves
    node_depth: np.ndarray  # int64[n]

    child_start: np.ndarray  # int64[n+1]; CSR offsets into the edge arrays
    edge_child: np.ndarray  # int64[e]
    edge_widx: np.ndarray  # int64[e]; index into the per-pass weight vector
    chance_w: np.ndarray  # float64; fixed chance probabilities

    infoset_keys: list[InfoSetKey]
    infoset_player: np.ndarray  # int8[ni]
    infoset_n_actions: np.ndarray  # int64[ni]
    infoset_labels: list[tuple[str, ...]]

    nodes_by_depth: np.ndarray  # int64[n]; node ids sorted by depth, stable
    depth_node_start: np.ndarray  # int64[max_depth+2]

    key_index: dict[InfoSetKey, int]
    player_rows: tuple[np.ndarray, np.ndarray]  # infoset ids per player

    @property
    def n_strategy_slots(self) -> int:
        return self.n_infosets * self.max_actions

    def legal_mask(self) -> np.ndarray:
        cols = np.arange(self.max_actions)[None, :]
        return cols < self.infoset_n_actions[:, None]

    def uniform_strategy(self) -> np.ndarray:
        """(n_infosets, max_actions) matrix, uniform over each key's actions."""
        mask = self.legal_mask()
        return np.where(mask, 1.0 / self.infoset_n_actions[:, None], 0.0)

    def pass_weights(self, strategy: np.ndarray) -> np.ndarray:
        """Edge-weight vector for one tree pass: strategies then chance."""
        return np.concatenate((strategy.ravel(), self.chance_w))


def compile_game(game: GameDefinition) -> CompiledGame:
    """Enumerate the full tree once and freeze it into arrays (cached)."""
    cached = getattr(game, _CACHE_ATTR, None)
    if cached is not None:
        return cached

    node_kind: list[int] = []
    node_player: list[int] = []
    node_infoset: list[int] = []
    node_util0: list[float] = []
    node_depth: list[int] = []

    edge_parent: list[int] = []
    edge_child_l: list[int] = []
    edge_action: list[int] = []
    edge_prob: list[float] = []

    infoset_keys: list[InfoSetKey] = []
    infoset_player_l: list[int] = []
    infoset_n_actions_l: list[int] = []
    infoset_labels: list[tuple[str, ...]] = []
    key_index: dict[InfoSetKey, int] = {}

    def add_node(state, depth: int) -> int:
        uid = len(node_kind)
        node_depth.append(depth)
        if state.terminal:
            node_kind.append(KIND_TERMINAL)
            node_player.append(-2)
            node_infoset.append(-1)
            node_util0.append(game.terminal_utility(state, 0))
        elif state.player == CHANCE:
            node_kind.append(KIND_CHANCE)
            node_player.append(CHANCE)
            node_infoset.append(-1)
            node_util0.append(0.0)
        else:
            key = game.infoset_key(state)
            idx = key_index.get(key)
            if idx is None:
                idx = len(infoset_keys)
                key_index[key] = idx
                infoset_keys.append(key)
                infoset_player_l.append(state.player)
                infoset_n_actions_l.append(-1)
                infoset_labels.append(())
            elif infoset_player_l[idx] != state.player:
                raise GameError(f"{game.name}: info set {key} claimed by both players")
            node_kind.append(KIND_DECISION)
            node_player.append(state.player)
            node_infoset.append(idx)
            node_util0.append(0.0)
        return uid

    root = game.root()
    add_node(root, 0)
    stack: list[tuple[object, int, int]] = [(root, 0, 0)]
    while stack:
        state, uid, depth = stack.pop()
        if state.terminal:  # type: ignore[attr-defined]
            continue
        is_chance = node_kind[uid] == KIND_CHANCE
        if is_chance:
            outcomes = game.chance_probabilities(state)  # type: ignore[arg-type]
            actions = [a for a, _ in outcomes]
            probs = [p for _, p in outcomes]
        else:
            actions = game.legal_actions(state)  # type: ignore[arg-type]
            probs = [0.0] * len(actions)
            idx = node_infoset[uid]
            labels = tuple(a.label for a in actions)
            if infoset_n_actions_l[idx] < 0:
                infoset_n_actions_l[idx] = len(actions)
                infoset_labels[idx] = labels
            elif infoset_labels[idx] != labels:
                raise GameError(
                    f"{game.name}: info set {infoset_keys[idx]} has inconsistent actions"
                )
        children = []
        for a, p in zip(actions, probs):
            child = game.next_state(state, a)  # type: ignore[arg-type]
            cid = add_node(child, depth + 1)
            edge_parent.append(uid)
            edge_child_l.append(cid)
            edge_action.append(a.id)
            edge_prob.append(p)
            children.append((child, cid))
        for child, cid in reversed(children):
            stack.append((child, cid, depth + 1))

    n_nodes = len(node_kind)
    kind = np.asarray(node_kind, dtype=np.int8)
    player = np.asarray(node_player, dtype=np.int8)
    infoset = np.asarray(node_infoset, dtype=np.int64)
    util0 = np.asarray(node_util0, dtype=np.float64)
    depth_arr = np.asarray(node_depth, dtype=np.int64)

    ep = np.asarray(edge_parent, dtype=np.int64)
    order = np.argsort(ep, kind="stable")
    ep = ep[order]
    ec = np.asarray(edge_child_l, dtype=np.int64)[order]
    ea = np.asarray(edge_action, dtype=np.int64)[order]
    eprob = np.asarray(edge_prob, dtype=np.float64)[order]
    n_edges = ep.shape[0]

    child_start = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(child_start, ep + 1, 1)
    child_start = np.cumsum(child_start)

    n_infosets = len(infoset_keys)
    inf_n_actions = np.asarray(infoset_n_actions_l, dtype=np.int64)
    inf_player = np.asarray(infoset_player_l, dtype=np.int8)
    max_actions = int(inf_n_actions.max()) if n_infosets else 0
    n_slots = n_infosets * max_actions

    # weight-vector index per edge: strategy slot for decision edges, a slot
    # past the strategy block for chance edges
    widx = np.empty(n_edges, dtype=np.int64)
    from_chance = kind[ep] == KIND_CHANCE
    widx[~from_chance] = infoset[ep[~from_chance]] * max_actions + ea[~from_chance]
    n_chance_edges = int(from_chance.sum())
    widx[from_chance] = n_slots + np.arange(n_chance_edges)
    chance_w = eprob[from_chance].copy()

    nodes_by_depth = np.argsort(depth_arr, kind="stable")
    max_depth = int(depth_arr.max())
    depth_node_start = np.searchsorted(
        depth_arr[nodes_by_depth], np.arange(max_depth + 2)
    ).astype(np.int64)

    compiled = CompiledGame(
        game=game,
        n_nodes=n_nodes,
        n_edges=n_edges,
        n_infosets=n_infosets,
        max_actions=max_actions,
        node_kind=kind,
        node_player=player,
        node_infoset=infoset,
        node_util0=util0,
        node_depth=depth_arr,
        child_start=child_start,
        edge_child=np.ascontiguousarray(ec),
        edge_widx=np.ascontiguousarray(widx),
        chance_w=chance_w,
        infoset_keys=infoset_keys,
        infoset_player=inf_player,
        infoset_n_actions=inf_n_actions,
        infoset_labels=infoset_labels,
        nodes_by_depth=np.ascontiguousarray(nodes_by_depth),
        depth_node_start=depth_node_start,
        key_index=key_index,
        player_rows=(
            np.flatnonzero(inf_player == 0),
            np.flatnonzero(inf_player == 1),
        ),
    )
    try:
        setattr(game, _CACHE_ATTR, compiled)
    except AttributeError:
        pass
    return compiled
