"""Reachability under fixed policies, optimal reachability, state-action frequencies."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import has_end_component, zero_states
from .linalg import solve_float, solve_fraction
from .model import Mdp, MrPolicy, md_policy

FREQ_TOL = 1e-9


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class ReachabilityTable:
    """Probability to eventually reach ``target`` from every state."""

    values: dict
    target: frozenset
    exact: bool

    def __getitem__(self, s):
        return self.values[s]


def _policy_rows(m: Mdp, x: MrPolicy, unknowns, target, zero_value):
    """Rows of ``(I - P_x)`` restricted to ``unknowns`` plus the one-step mass into ``target``."""
    col = {s: i for i, s in enumerate(unknowns)}
    one = Fraction(1) if x.exact else 1.0
    rows, rhs = [], []
    for s in unknowns:
        row = {col[s]: one}
        b = zero_value
        for a in m.enabled(s):
            pa = x.prob(s, a)
            if not pa:
                continue
            for t, p in m.trans[(s, a)].items():
                w = pa * (p if x.exact else float(p))
                if t in target:
                    b += w
                elif t in col:
                    row[col[t]] = row.get(col[t], 0) - w
        rows.append(row)
        rhs.append(b)
    return rows, rhs


def reach_under_policy(m: Mdp, x: MrPolicy, target) -> ReachabilityTable:
    """Solve the reachability equations for ``target`` under the MR policy ``x``.

    States that cannot reach the target in the induced chain are fixed to zero
    first, which makes the remaining system uniquely solvable. Exact whenever
    the policy is rational.
    """
    target = frozenset(target)
    zero = zero_states(m, x, target)
    unknowns = [s for s in m.states if s not in target and s not in zero]
    zero_value = Fraction(0) if x.exact else 0.0
    rows, rhs = _policy_rows(m, x, unknowns, target, zero_value)
    if x.exact:
        sol = solve_fraction(rows, rhs)
    else:
        sol = [float(v) for v in solve_float(rows, rhs, len(unknowns))]
    one = Fraction(1) if x.exact else 1.0
    values = {s: (one if s in target else zero_value) for s in m.states}
    values.update(zip(unknowns, sol))
    return ReachabilityTable(values, target, x.exact)


# -- optimal reachability ------------------------------------------------------

def _q_value(m, s, a, v):
    return sum(p * v[t] for t, p in m.trans[(s, a)].items())


def min_zero_states(m: Mdp, target) -> frozenset:
    """States with minimal reachability probability 0 (``target`` avoidable surely)."""
    z = {s for s in m.states if s not in target}
    changed = True
    while changed:
        changed = False
        for s in list(z):
            acts = m.enabled(s)
            if acts and not any(all(t in z for t in m.trans[(s, a)]) for a in acts):
                z.discard(s)
                changed = True
    return frozenset(z)


def _value_iteration(m, target, better, sweeps=2000, tol=1e-12):
    v = {s: (1.0 if s in target else 0.0) for s in m.states}
    ptrans = {sa: {t: float(p) for t, p in d.items()} for sa, d in m.trans.items()}
    for _ in range(sweeps):
        delta = 0.0
        for s in m.nonterminals:
            if s in target:
                continue
            vals = [sum(p * v[t] for t, p in ptrans[(s, a)].items()) for a in m.enabled(s)]
            new = max(vals) if better is max else min(vals)
            delta = max(delta, abs(new - v[s]))
            v[s] = new
        if delta < tol:
            break
    choice = {}
    for s in m.nonterminals:
        if s in target:
            choice[s] = m.enabled(s)[0]
            continue
        vals = [sum(p * v[t] for t, p in ptrans[(s, a)].items()) for a in m.enabled(s)]
        best = better(vals)
        choice[s] = next(a for a, q in zip(m.enabled(s), vals) if abs(q - best) <= 1e-9)
    return choice


def optimal_reach(m: Mdp, target, sense="max"):
    """Exact ``Pr^min`` or ``Pr^max`` of reaching ``target`` plus an optimal MD policy.

    Float value iteration proposes a policy; exact policy iteration confirms or
    improves it; the returned policy picks the smallest-index optimal action
    (for ``max`` restricted to actions that make progress towards the target).
    """
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    target = frozenset(target)
    maximize = sense == "max"
    better = max if maximize else min
    zero = frozenset() if maximize else min_zero_states(m, target)

    choice = _value_iteration(m, target, better)
    for s in zero:
        if not m.is_terminal(s):
            choice[s] = next(a for a in m.enabled(s) if all(t in zero for t in m.trans[(s, a)]))

    while True:
        v = reach_under_policy(m, md_policy(m, choice), target).values
        switched = False
        for s in m.nonterminals:
            if s in target or s in zero:
                continue
            qs = [(_q_value(m, s, a, v), a) for a in m.enabled(s)]
            best = better(q for q, _ in qs)
            if (best > v[s]) if maximize else (best < v[s]):
                choice[s] = next(a for q, a in qs if q == best)
                switched = True
        if not switched:
            break

    final = {}
    for s in m.nonterminals:
        optimal = [a for a in m.enabled(s) if _q_value(m, s, a, v) == v[s]]
        final[s] = optimal[0] if optimal else m.enabled(s)[0]
    if maximize:
        # pick, layer by layer, optimal actions that move closer to the target
        settled = set(target) | {s for s in m.states if v[s] == 0}
        pending = [s for s in m.nonterminals if s not in settled]
        while pending:
            progress = []
            for s in pending:
                for a in m.enabled(s):
                    if _q_value(m, s, a, v) == v[s] and any(t in settled for t in m.trans[(s, a)]):
                        final[s] = a
                        progress.append(s)
                        break
            if not progress:
                raise SolverError("no attractor-compatible optimal action found")
            settled.update(progress)
            pending = [s for s in pending if s not in settled]
    policy = md_policy(m, final)
    check = reach_under_policy(m, policy, target).values
    if check != v:
        raise SolverError("optimal policy does not realize the optimal values")
    return v, policy


# -- state-action frequencies ---------------------------------------------------

@dataclass(frozen=True)
class FrequencySolution:
    """Expected number of times each state-action pair is taken.

    ``inflow`` holds ``x_s`` for every state: the sum of its pair frequencies
    for non-terminal states and the expected number of entries for terminals.
    """

    freq: dict
    inflow: dict
    exact: bool

    def residuals(self, m: Mdp) -> dict:
        """Violation of the balance equations per state (zero when feasible)."""
        zero = Fraction(0) if self.exact else 0.0
        incoming = {s: (1 if s == m.init else 0) + zero for s in m.states}
        for (t, a), val in self.freq.items():
            for s, p in m.trans[(t, a)].items():
                incoming[s] += val * (p if self.exact else float(p))
        out = {}
        for s in m.states:
            if m.is_terminal(s):
                out[s] = self.inflow.get(s, zero) - incoming[s]
            else:
                out[s] = sum((self.freq.get((s, a), zero) for a in m.enabled(s)), zero) - incoming[s]
        return out


def frequencies_of(m: Mdp, x: MrPolicy) -> FrequencySolution:
    """Frequencies of ``x`` from the transposed expected-visits system."""
    if has_end_component(m):
        raise SolverError("model has an end component; frequencies may diverge")
    n = len(m.states)
    exact = x.exact
    zero = Fraction(0) if exact else 0.0
    rows = [{i: (Fraction(1) if exact else 1.0)} for i in range(n)]
    for t in m.nonterminals:
        j = m.index[t]
        for a in m.enabled(t):
            pa = x.prob(t, a)
            if not pa:
                continue
            for s, p in m.trans[(t, a)].items():
                i = m.index[s]
                rows[i][j] = rows[i].get(j, 0) - pa * (p if exact else float(p))
    rhs = [(1 if s == m.init else 0) + zero for s in m.states]
    visits = solve_fraction(rows, rhs) if exact else [float(v) for v in solve_float(rows, rhs, n)]
    inflow = dict(zip(m.states, visits))
    freq = {(s, a): inflow[s] * x.prob(s, a) for s, a in m.stact}
    return FrequencySolution(freq, inflow, exact)


def policy_from_frequencies(m: Mdp, f: FrequencySolution) -> MrPolicy:
    """Normalize frequencies per state; states never visited get the uniform choice."""
    res = f.residuals(m)
    bad = [s for s, r in res.items() if (r != 0 if f.exact else abs(r) > FREQ_TOL)]
    if bad:
        raise SolverError(f"frequency vector violates balance equations at {bad}")
    if any((v < 0 if f.exact else v < -FREQ_TOL) for v in f.freq.values()):
        raise SolverError("frequency vector has negative entries")
    choice = {}
    for s in m.nonterminals:
        acts = m.enabled(s)
        if f.exact:
            vals = {a: f.freq.get((s, a), Fraction(0)) for a in acts}
            total = sum(vals.values(), Fraction(0))
            if total > 0:
                choice[s] = {a: v / total for a, v in vals.items()}
            else:
                choice[s] = {a: Fraction(1, len(acts)) for a in acts}
        else:
            vals = {a: max(float(f.freq.get((s, a), 0.0)), 0.0) for a in acts}
            total = sum(vals.values())
            if total > 0:
                choice[s] = {a: v / total for a, v in vals.items()}
            else:
                choice[s] = {a: 1.0 / len(acts) for a in acts}
    return MrPolicy(choice, f.exact)


def flow_constraints(m: Mdp):
    """Balance equations ``A x = b`` over ``m.stact`` and the terminal inflow map.

    Returns ``(A, b, J)`` with ``J[i] @ x`` the inflow into ``m.terminals[i]``.
    """
    nonterm = m.nonterminals
    row_of = {s: i for i, s in enumerate(nonterm)}
    term_of = {s: i for i, s in enumerate(m.terminals)}
    k = len(m.stact)
    a_mat = np.zeros((len(nonterm), k))
    j_mat = np.zeros((len(term_of), k))
    b = np.zeros(len(nonterm))
    if m.init in row_of:
        b[row_of[m.init]] = 1.0
    for col, (s, a) in enumerate(m.stact):
        a_mat[row_of[s], col] += 1.0
        for t, p in m.trans[(s, a)].items():
            if t in row_of:
                a_mat[row_of[t], col] -= float(p)
            else:
                j_mat[term_of[t], col] += float(p)
    return a_mat, b, j_mat
