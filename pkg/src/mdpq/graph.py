"""Qualitative analyses on the underlying graph of an MDP."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .model import Mdp, MrPolicy


@dataclass(frozen=True)
class MecDecomposition:
    """Maximal end components as ``(states, state_action_pairs)`` pairs."""

    mecs: tuple
    membership: dict

    def __len__(self):
        return len(self.mecs)

    def pairs(self) -> frozenset:
        return frozenset(sa for _, pairs in self.mecs for sa in pairs)


def reachable_from(m: Mdp, sources) -> frozenset:
    seen = set(sources)
    todo = deque(seen)
    while todo:
        s = todo.popleft()
        for t in m.successors(s):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def _backward(m: Mdp, targets, edges) -> set:
    """States that can reach ``targets`` using the pairs allowed by ``edges(s)``."""
    preds = {s: set() for s in m.states}
    for s in m.states:
        for a in edges(s):
            for t in m.trans[(s, a)]:
                preds[t].add(s)
    seen = set(targets)
    todo = deque(seen)
    while todo:
        t = todo.popleft()
        for s in preds[t]:
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def can_reach(m: Mdp, targets) -> frozenset:
    """States with a positive-probability path to ``targets`` under some policy."""
    return frozenset(_backward(m, targets, m.enabled))


def zero_states(m: Mdp, support: MrPolicy, target) -> frozenset:
    """States that cannot reach ``target`` in the chain induced by the policy's support."""
    ok = _backward(m, target, support.support)
    return frozenset(s for s in m.states if s not in ok)


def _sccs(nodes, edges):
    """Strongly connected components of the graph ``nodes``/``edges`` (list of lists)."""
    idx = {v: i for i, v in enumerate(nodes)}
    rows, cols = [], []
    for u, vs in edges.items():
        for v in vs:
            if v in idx:
                rows.append(idx[u])
                cols.append(idx[v])
    n = len(nodes)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    comp = {}
    for v, lab in zip(nodes, labels):
        comp.setdefault(lab, []).append(v)
    return list(comp.values())


def mec_decomposition(m: Mdp) -> MecDecomposition:
    """Maximal end components by iterated SCC pruning."""
    acts = {s: set(m.enabled(s)) for s in m.nonterminals}
    while True:
        live = [s for s in m.states if acts.get(s)]
        edges = {s: {t for a in acts[s] for t in m.trans[(s, a)]} for s in live}
        comp_of = {}
        for i, comp in enumerate(_sccs(live, edges)):
            for s in comp:
                comp_of[s] = i
        changed = False
        for s in live:
            keep = {
                a for a in acts[s]
                if all(comp_of.get(t) == comp_of[s] for t in m.trans[(s, a)])
            }
            if keep != acts[s]:
                acts[s] = keep
                changed = True
        if not changed:
            break
    live = [s for s in m.states if acts.get(s)]
    edges = {s: {t for a in acts[s] for t in m.trans[(s, a)]} for s in live}
    found = []
    for comp in _sccs(live, edges):
        states = sorted(comp, key=m.index.__getitem__)
        pairs = tuple((s, a) for s in states for a in m.enabled(s) if a in acts[s])
        if pairs:
            found.append((tuple(states), pairs))
    found.sort(key=lambda mec: m.index[mec[0][0]])
    membership = {s: i for i, (states, _) in enumerate(found) for s in states}
    return MecDecomposition(tuple(found), membership)


def has_end_component(m: Mdp) -> bool:
    return len(mec_decomposition(m)) > 0


def model_diagnostics(m: Mdp) -> list:
    """Non-fatal warnings about a model: unreachable states and end components."""
    notes = []
    unreachable = [s for s in m.states if s not in reachable_from(m, {m.init})]
    if unreachable:
        notes.append("unreachable states: " + ", ".join(unreachable))
    dec = mec_decomposition(m)
    for states, _ in dec.mecs:
        notes.append("end component: {" + ", ".join(states) + "}")
    return notes
