"""Model transformations: two-copy MDP, canonical MDP and the star MDP family."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graph import mec_decomposition, reachable_from
from .model import Mdp, ModelError, MrPolicy, Query, check_reserved, validate_query
from .solve import optimal_reach

TP, FP, FN, TN = "__TP", "__FP", "__FN", "__TN"
ALPHA_MIN, ALPHA_MAX = "__alpha_min", "__alpha_max"
TAU, DELTA, SWITCH = "__tau", "__delta", "__switch"


def _copy_name(s, bit):
    return f"{s}@{bit}"


@dataclass(frozen=True)
class TwoCopyMdp:
    """Product of a model with one bit recording whether C was visited.

    Entering ``c`` in copy 0 leaves a single ``__switch`` action to ``c`` in
    copy 1; copy-1 states that no switch leads to are dropped.
    """

    mdp: Mdp
    origin: dict
    copy0: dict
    copy1: dict
    c0: frozenset
    c1: frozenset
    e0: frozenset
    e1: frozenset

    def lift(self, x: MrPolicy) -> MrPolicy:
        """Interpret a policy of the original model as a policy of the product."""
        one = Fraction(1) if x.exact else 1.0
        choice = {}
        for s in self.mdp.nonterminals:
            orig, bit = self.origin[s]
            if bit == 0 and s in self.c0:
                choice[s] = {SWITCH: one}
            else:
                choice[s] = dict(x.choice[orig])
        return MrPolicy(choice, x.exact)

    def sidecar(self) -> dict:
        return {
            "kind": "two-copy",
            "origin": {s: [o, b] for s, (o, b) in self.origin.items()},
            "C0": sorted(self.c0),
            "C1": sorted(self.c1),
            "E0": sorted(self.e0),
            "E1": sorted(self.e1),
        }


def two_copy(m: Mdp, q: Query) -> TwoCopyMdp:
    for e in q.effect:
        if not m.is_terminal(e):
            raise ModelError(f"effect state not terminal: {e!r}")
    if q.predictor & q.effect:
        raise ModelError("C and E intersect")
    trans = {}
    for bit in (0, 1):
        for s, a in m.stact:
            if bit == 0 and s in q.predictor:
                continue
            trans[(_copy_name(s, bit), a)] = {
                _copy_name(t, bit): p for t, p in m.trans[(s, a)].items()
            }
    for c in q.predictor:
        trans[(_copy_name(c, 0), SWITCH)] = {_copy_name(c, 1): Fraction(1)}
    states = [_copy_name(s, 0) for s in m.states] + [_copy_name(s, 1) for s in m.states]
    full = Mdp(tuple(states), _copy_name(m.init, 0), trans)
    # copy 0 is kept whole, so keep what its switch actions lead to
    keep = reachable_from(full, {full.init} | {_copy_name(c, 0) for c in q.predictor})
    states = [s for s in states if s.endswith("@0") or s in keep]
    kept = set(states)
    trans = {sa: d for sa, d in trans.items() if sa[0] in kept}
    mdp = Mdp(tuple(states), full.init, trans)
    origin = {}
    for s in m.states:
        for bit in (0, 1):
            name = _copy_name(s, bit)
            if name in kept:
                origin[name] = (s, bit)
    copy0 = {s: _copy_name(s, 0) for s in m.states}
    copy1 = {s: _copy_name(s, 1) for s in m.states if _copy_name(s, 1) in kept}
    return TwoCopyMdp(
        mdp,
        origin,
        copy0,
        copy1,
        frozenset(copy0[c] for c in q.predictor),
        frozenset(copy1[c] for c in q.predictor if c in copy1),
        frozenset(copy0[e] for e in q.effect),
        frozenset(copy1[e] for e in q.effect if e in copy1),
    )


@dataclass(frozen=True)
class CanonicalMdp:
    """EC-free model whose only terminals are TP, FP, FN and TN.

    Cause states keep two summary actions to TP/FP realizing the minimal and
    maximal probability of reaching E from them in the original model.
    """

    mdp: Mdp
    query: Query
    original: Mdp
    original_query: Query
    p_min: dict
    p_max: dict
    p_star: Fraction
    state_map: dict
    mecs: tuple
    action_map: dict
    pruned: tuple
    warnings: tuple = field(default=())

    @property
    def causes(self) -> frozenset:
        return self.query.predictor

    def sidecar(self) -> dict:
        return {
            "kind": "canonical",
            "effect": sorted(self.query.effect),
            "predictor": sorted(self.query.predictor),
            "p_min": {c: str(v) for c, v in sorted(self.p_min.items())},
            "p_max": {c: str(v) for c, v in sorted(self.p_max.items())},
            "p_star": str(self.p_star),
            "state_map": self.state_map,
            "mecs": [list(states) for states in self.mecs],
            "action_map": [
                {"state": s, "action": a, "origin": list(o) if o else None}
                for (s, a), o in self.action_map.items()
            ],
            "pruned": list(self.pruned),
            "warnings": list(self.warnings),
        }


def canonical(m: Mdp, q: Query) -> CanonicalMdp:
    """Build the canonical MDP: cause summaries, MEC quotient, terminal collapse."""
    problems = validate_query(m, q)
    if problems:
        raise ModelError("; ".join(problems))
    check_reserved(m)
    warnings = []
    vmin, _ = optimal_reach(m, q.effect, "min")
    vmax, _ = optimal_reach(m, q.effect, "max")
    p_min = {c: vmin[c] for c in q.predictor}
    p_max = {c: vmax[c] for c in q.predictor}

    # (i) summary actions at cause states
    trans = {}
    action_map = {}
    for s, a in m.stact:
        if s not in q.predictor:
            trans[(s, a)] = dict(m.trans[(s, a)])
            action_map[(s, a)] = (s, a)
    for c in sorted(q.predictor, key=m.index.__getitem__):
        variants = [(ALPHA_MIN, p_min[c])]
        if p_max[c] != p_min[c]:
            variants.append((ALPHA_MAX, p_max[c]))
        for name, p in variants:
            trans[(c, name)] = {TP: p, FP: 1 - p}
            action_map[(c, name)] = None
    step1 = Mdp(tuple(m.states) + (TP, FP), m.init, trans)
    alive = reachable_from(step1, {m.init})
    pruned = tuple(s for s in m.states if s not in alive)
    if not any(c in alive for c in q.predictor):
        warnings.append("C is unreachable from the initial state")
    states1 = [s for s in step1.states if s in alive or s in (TP, FP)]
    step1 = Mdp(
        tuple(states1),
        m.init,
        {sa: d for sa, d in trans.items() if sa[0] in alive},
    )

    # (ii) MEC quotient, one representative per MEC
    dec = mec_decomposition(step1)
    rep = {s: s for s in step1.states}
    for states, _ in dec.mecs:
        for s in states:
            rep[s] = states[0]
    inner = dec.pairs()

    # (iii) collapse E into FN and the other original terminals into TN
    for s in step1.states:
        if s in (TP, FP):
            continue
        if s in q.effect:
            rep[s] = FN
        elif step1.is_terminal(s):
            rep[s] = TN

    by_state = {}
    for s, a in step1.stact:
        if (s, a) in inner:
            continue
        src = rep[s]
        name = f"{s}/{a}" if s in dec.membership else a
        dist = {}
        for t, p in step1.trans[(s, a)].items():
            dist[rep[t]] = dist.get(rep[t], Fraction(0)) + p
        by_state.setdefault(src, []).append((name, dist, action_map[(s, a)]))
    for states, _ in dec.mecs:
        by_state.setdefault(states[0], []).append((TAU, {TN: Fraction(1)}, None))

    kept = [s for s in step1.states if s not in (TP, FP) and rep[s] == s]
    cstates = tuple(kept) + (TP, FP, FN, TN)
    ordered, new_actions = {}, {}
    for s in cstates:
        for name, dist, origin in by_state.get(s, ()):
            ordered[(s, name)] = dist
            new_actions[(s, name)] = origin
    cm = Mdp(cstates, rep[m.init], ordered)
    causes = q.predictor & set(cstates)
    state_map = {s: (rep[s] if s in rep else None) for s in m.states}
    return CanonicalMdp(
        mdp=cm,
        query=Query(causes, frozenset({TP, FN})),
        original=m,
        original_query=q,
        p_min=p_min,
        p_max=p_max,
        p_star=max((p_max[c] for c in causes), default=Fraction(0)),
        state_map=state_map,
        mecs=tuple(states for states, _ in dec.mecs),
        action_map={sa: new_actions[sa] for sa in ordered},
        pruned=pruned,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class StarMdp:
    """Canonical MDP where every cause state has one action to TP/FP."""

    mdp: Mdp
    p: Fraction
    canonical: CanonicalMdp

    def sidecar(self) -> dict:
        out = self.canonical.sidecar()
        out["kind"] = "star"
        out["p"] = str(self.p)
        return out


def star(cm: CanonicalMdp, p) -> StarMdp:
    """Replace the cause actions by ``__delta`` reaching TP with ``max(p, p_min(c))``."""
    p = Fraction(p)
    if not 0 < p <= cm.p_star:
        raise ValueError(f"p must lie in (0, p*] = (0, {cm.p_star}], got {p}")
    return StarMdp(_with_cause_probs(cm, {c: max(p, cm.p_min[c]) for c in cm.causes}), p, cm)


def _with_cause_probs(cm: CanonicalMdp, probs: dict, drop=frozenset()) -> Mdp:
    """Copy of the canonical MDP where cause ``c`` goes to TP with ``probs[c]``.

    States in ``drop`` lose their actions entirely (they become dead ends).
    """
    trans = {}
    for s, a in cm.mdp.stact:
        if s in cm.causes:
            continue
        trans[(s, a)] = cm.mdp.trans[(s, a)]
    for c in cm.causes:
        if c in drop:
            continue
        p = probs[c]
        trans[(c, DELTA)] = {TP: p, FP: 1 - p}
    ordered = {sa: trans[sa] for s in cm.mdp.states for sa in trans if sa[0] == s}
    return Mdp(cm.mdp.states, cm.mdp.init, ordered)
