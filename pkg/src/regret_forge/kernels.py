"""Hot tree-walk loops, JIT-compiled with numba.

Each kernel takes the flat arrays from :mod:`regret_forge.tree` plus a weight
vector (current strategies followed by chance probabilities) and runs plain
sequential loops, so results are bit-for-bit reproducible regardless of
thread counts or call order.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .tree import KIND_DECISION, KIND_TERMINAL


@njit(cache=True, nogil=True)
def walk_values(
    node_kind,
    node_player,
    node_infoset,
    node_util0,
    child_start,
    edge_child,
    edge_widx,
    weights,
    player,
    n_infosets,
    max_actions,
):
    """One full tree pass for ``player`` under the profile in ``weights``.

    Returns ``(root_value, cf_action, reach_inf)`` where ``cf_action[i, a]``
    is the opponent-and-chance weighted expected payoff of taking ``a`` at
    information set ``i`` and ``reach_inf[i]`` is the player's own reach
    probability of that set.
    """
    n = node_kind.shape[0]
    reach_self = np.zeros(n)
    reach_other = np.zeros(n)
    reach_self[0] = 1.0
    reach_other[0] = 1.0
    for u in range(n):
        k = node_kind[u]
        if k == KIND_TERMINAL:
            continue
        rs = reach_self[u]
        ro = reach_other[u]
        own = k == KIND_DECISION and node_player[u] == player
        for e in range(child_start[u], child_start[u + 1]):
            c = edge_child[e]
            w = weights[edge_widx[e]]
            if own:
                reach_self[c] = rs * w
                reach_other[c] = ro
            else:
                reach_self[c] = rs
                reach_other[c] = ro * w

    value = np.zeros(n)
    for u in range(n - 1, -1, -1):
        if node_kind[u] == KIND_TERMINAL:
            value[u] = node_util0[u] if player == 0 else -node_util0[u]
        else:
            acc = 0.0
            for e in range(child_start[u], child_start[u + 1]):
                acc += weights[edge_widx[e]] * value[edge_child[e]]
            value[u] = acc

    cf_action = np.zeros((n_infosets, max_actions))
    reach_inf = np.zeros(n_infosets)
    for u in range(n):
        if node_kind[u] == KIND_DECISION and node_player[u] == player:
            i = node_infoset[u]
            ro = reach_other[u]
            a = 0
            for e in range(child_start[u], child_start[u + 1]):
                cf_action[i, a] += ro * value[edge_child[e]]
                a += 1
            if reach_self[u] > reach_inf[i]:
                reach_inf[i] = reach_self[u]
    return value[0], cf_action, reach_inf


@njit(cache=True, nogil=True)
def best_response_kernel(
    node_kind,
    node_player,
    node_infoset,
    node_util0,
    child_start,
    edge_child,
    edge_widx,
    weights,
    nodes_by_depth,
    depth_node_start,
    infoset_n_actions,
    player,
    n_infosets,
    max_actions,
):
    """Exact best-response value for ``player`` against a fixed opponent.

    The opponent's strategy and the chance probabilities come in through
    ``weights``; the player's own entries are ignored.  Deeper information
    sets are resolved first, every member history of a set shares one argmax
    action, and ties break toward the lowest action id.  Returns
    ``(root_value, best_action_per_infoset)``.
    """
    n = node_kind.shape[0]
    reach = np.zeros(n)
    reach[0] = 1.0
    for u in range(n):
        k = node_kind[u]
        if k == KIND_TERMINAL:
            continue
        r = reach[u]
        own = k == KIND_DECISION and node_player[u] == player
        for e in range(child_start[u], child_start[u + 1]):
            c = edge_child[e]
            if own:
                reach[c] = r
            else:
                reach[c] = r * weights[edge_widx[e]]

    value = np.zeros(n)
    q = np.zeros((n_infosets, max_actions))
    best = np.zeros(n_infosets, dtype=np.int64)
    decided = np.zeros(n_infosets, dtype=np.uint8)
    n_depths = depth_node_start.shape[0] - 1
    for d in range(n_depths - 1, -1, -1):
        lo = depth_node_start[d]
        hi = depth_node_start[d + 1]
        # aggregate values; own decision nodes only feed their infoset tally
        for idx in range(lo, hi):
            u = nodes_by_depth[idx]
            k = node_kind[u]
            if k == KIND_TERMINAL:
                value[u] = node_util0[u] if player == 0 else -node_util0[u]
            elif k == KIND_DECISION and node_player[u] == player:
                i = node_infoset[u]
                ru = reach[u]
                a = 0
                for e in range(child_start[u], child_start[u + 1]):
                    q[i, a] += ru * value[edge_child[e]]
                    a += 1
            else:
                acc = 0.0
                for e in range(child_start[u], child_start[u + 1]):
                    acc += weights[edge_widx[e]] * value[edge_child[e]]
                value[u] = acc
        # commit one maximizing action per infoset completed at this depth
        for idx in range(lo, hi):
            u = nodes_by_depth[idx]
            if node_kind[u] == KIND_DECISION and node_player[u] == player:
                i = node_infoset[u]
                if decided[i] == 0:
                    na = infoset_n_actions[i]
                    b = 0
                    for a in range(1, na):
                        if q[i, a] > q[i, b]:
                            b = a
                    best[i] = b
                    decided[i] = 1
                value[u] = value[edge_child[child_start[u] + best[node_infoset[u]]]]
    return value[0], best
