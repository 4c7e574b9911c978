"""Tree enumeration, information-set keys, and the structural game audit."""
from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from regret_forge.game import (
    CHANCE,
    Action,
    GameError,
    IllegalActionError,
    InfoSetKey,
    TerminalStateError,
    iter_states,
    tree_stats,
    verify_game,
)
from regret_forge.tree import KIND_CHANCE, KIND_DECISION, KIND_TERMINAL, compile_game


def test_kuhn_tree_counts(kuhn):
    stats = tree_stats(kuhn)
    assert stats.nodes == 55
    assert stats.terminals == 30
    assert stats.chance_nodes == 1
    assert stats.decision_nodes == 24
    assert stats.infosets == (6, 6)
    assert stats.max_depth == 4


def test_leduc_tree_counts(leduc):
    stats = tree_stats(leduc)
    assert stats.nodes == 9_451
    assert stats.terminals == 5_520
    assert stats.chance_nodes == 151
    assert stats.decision_nodes == 3_780
    assert stats.infosets == (468, 468)
    assert stats.max_depth == 10


def test_royal_tree_counts(royal):
    stats = tree_stats(royal)
    assert stats.nodes == 656_041
    assert stats.terminals == 384_944
    assert stats.chance_nodes == 8_681
    assert stats.decision_nodes == 262_416
    assert stats.infosets == (26_064, 26_064)
    assert stats.max_depth == 15


@pytest.mark.parametrize("fixture", ["kuhn", "leduc", "royal"])
def test_structural_audit_passes(request, fixture):
    verify_game(request.getfixturevalue(fixture))


def test_iter_states_is_deterministic(kuhn):
    first = [s.actions for s in iter_states(kuhn)]
    second = [s.actions for s in iter_states(kuhn)]
    assert first == second
    assert len(first) == 55


def test_infoset_key_string_roundtrip():
    key = InfoSetKey(0, "J||kb")
    assert str(key) == "P0|J||kb"
    assert InfoSetKey.parse(str(key)) == key
    with pytest.raises(ValueError):
        InfoSetKey.parse("nonsense")


def test_history_state_and_action_are_frozen(kuhn):
    root = kuhn.root()
    with pytest.raises(dataclasses.FrozenInstanceError):
        root.terminal = True
    with pytest.raises(dataclasses.FrozenInstanceError):
        Action(0, "check").label = "x"


def test_error_contracts(kuhn):
    root = kuhn.root()
    assert root.player == CHANCE
    with pytest.raises(GameError):
        kuhn.terminal_utility(root, 0)  # not terminal
    deal = kuhn.next_state(root, kuhn.chance_probabilities(root)[0][0].id)
    with pytest.raises(IllegalActionError):
        kuhn.next_state(deal, 99)
    with pytest.raises(GameError):
        kuhn.chance_probabilities(deal)  # decision node, not chance
    # walk to a terminal: P0 bet, P1 fold
    bet = kuhn.next_state(deal, 1)
    folded = kuhn.next_state(bet, 0)
    assert folded.terminal
    with pytest.raises(TerminalStateError):
        kuhn.legal_actions(folded)
    with pytest.raises(TerminalStateError):
        kuhn.next_state(folded, 0)


# --- flat compilation ---------------------------------------------------------


def test_compiled_arrays_are_consistent(leduc):
    cg = compile_game(leduc)
    n = cg.node_kind.shape[0]
    assert n == 9_451
    # CSR edges: parents precede children, child ranges partition the edge list
    assert cg.child_start[0] == 0
    assert cg.child_start[-1] == cg.edge_child.shape[0]
    for u in range(n):
        for e in range(cg.child_start[u], cg.child_start[u + 1]):
            assert cg.edge_child[e] > u
    # kind bookkeeping
    assert int((cg.node_kind == KIND_TERMINAL).sum()) == 5_520
    assert int((cg.node_kind == KIND_CHANCE).sum()) == 151
    assert int((cg.node_kind == KIND_DECISION).sum()) == 3_780
    # weight indices: decision edges address strategy slots, chance edges the tail
    n_slots = cg.n_infosets * cg.max_actions
    kinds = cg.node_kind
    for u in range(n):
        lo, hi = cg.child_start[u], cg.child_start[u + 1]
        if kinds[u] == KIND_DECISION:
            i = cg.node_infoset[u]
            expect = [i * cg.max_actions + a for a in range(hi - lo)]
            assert list(cg.edge_widx[lo:hi]) == expect
        elif kinds[u] == KIND_CHANCE:
            assert all(cg.edge_widx[lo:hi] >= n_slots)


def test_compiled_depth_partition(kuhn):
    cg = compile_game(kuhn)
    seen = np.sort(cg.nodes_by_depth)
    assert np.array_equal(seen, np.arange(cg.node_kind.shape[0]))
    for d in range(cg.depth_node_start.shape[0] - 1):
        chunk = cg.nodes_by_depth[cg.depth_node_start[d]:cg.depth_node_start[d + 1]]
        assert np.all(cg.node_depth[chunk] == d)


def test_pass_weights_layout(kuhn):
    cg = compile_game(kuhn)
    strat = cg.uniform_strategy()
    w = cg.pass_weights(strat)
    n_slots = cg.n_infosets * cg.max_actions
    assert w.shape[0] == n_slots + cg.chance_w.shape[0]
    assert np.array_equal(w[:n_slots], strat.ravel())
    assert np.array_equal(w[n_slots:], cg.chance_w)
    rows = strat.sum(axis=1)
    assert np.allclose(rows, 1.0)


def test_compile_cache_returns_same_object(kuhn):
    assert compile_game(kuhn) is compile_game(kuhn)
