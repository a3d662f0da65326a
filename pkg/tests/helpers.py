"""Random models and brute-force oracles shared by the test modules."""

import itertools
import random
from fractions import Fraction

from mdpq.model import Mdp, MrPolicy, Query, md_policy
from mdpq.graph import reachable_from


def random_distribution(rng, targets, denom=4):
    k = rng.randint(1, min(3, len(targets), denom))
    chosen = rng.sample(targets, k)
    cuts = sorted(rng.sample(range(1, denom), k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [denom])]
    return {t: Fraction(p, denom) for t, p in zip(chosen, parts)}


def random_mdp(rng, n_nonterm, n_term, max_actions=2, acyclic=False, branching=None, denom=4):
    """Random model ``s0..`` (non-terminal) and ``t0..`` (terminal), init ``s0``.

    ``branching`` caps the number of states with more than one action.
    """
    inner = [f"s{i}" for i in range(n_nonterm)]
    terms = [f"t{i}" for i in range(n_term)]
    multi = set(range(n_nonterm))
    if branching is not None:
        multi = set(rng.sample(range(n_nonterm), min(branching, n_nonterm)))
    trans = {}
    for i, s in enumerate(inner):
        succ = (inner[i + 1:] if acyclic else inner) + terms
        n_act = rng.randint(1, max_actions) if i in multi else 1
        for a in range(n_act):
            trans[(s, f"a{a}")] = random_distribution(rng, succ, denom)
    return Mdp(tuple(inner + terms), inner[0], trans)


def random_query(rng, m, max_causes=2):
    terms = list(m.terminals)
    effect = frozenset(rng.sample(terms, rng.randint(1, max(1, len(terms) - 1))))
    rest = [s for s in m.states if s not in effect]
    reach = [s for s in rest if s in reachable_from(m, {m.init})]
    pool = reach if reach else rest
    causes = frozenset(rng.sample(pool, rng.randint(1, min(max_causes, len(pool)))))
    return Query(causes, effect)


def path_enumeration(m, x, target):
    """Probability of reaching ``target`` by listing every maximal path (acyclic models)."""
    total = Fraction(0)
    stack = [(m.init, Fraction(1))]
    while stack:
        s, p = stack.pop()
        if s in target:
            total += p
            continue
        for a in m.enabled(s):
            pa = x.prob(s, a)
            if pa:
                for t, pt in m.trans[(s, a)].items():
                    stack.append((t, p * pa * pt))
    return total


def md_policies(m):
    states = m.nonterminals
    for combo in itertools.product(*(m.enabled(s) for s in states)):
        yield md_policy(m, dict(zip(states, combo)))


def simplex_grid(k, steps=8):
    """Points of the (k-1)-simplex with coordinates in multiples of 1/steps."""
    for cuts in itertools.combinations_with_replacement(range(steps + 1), k - 1):
        edges = (0,) + cuts + (steps,)
        yield tuple(Fraction(b - a, steps) for a, b in zip(edges, edges[1:]))


def grid_policies(m, steps=8):
    states = m.nonterminals
    per_state = [list(simplex_grid(len(m.enabled(s)), steps)) for s in states]
    for combo in itertools.product(*per_state):
        yield MrPolicy(
            {s: dict(zip(m.enabled(s), pt)) for s, pt in zip(states, combo)},
            True,
        )


def polytope_dim(m):
    return sum(len(m.enabled(s)) - 1 for s in m.nonterminals)


def network_policy(m, p, q):
    """Network-model policy: alpha with probability p at A, beta with q at B."""
    p, q = Fraction(p), Fraction(q)
    return MrPolicy(
        {"send": {"tau": Fraction(1)}, "A": {"alpha": p, "gamma": 1 - p}, "B": {"beta": q, "delta": 1 - q}},
        True,
    )


def corpus(seed, count, **kw):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = random_mdp(rng, **{k: (v(rng) if callable(v) else v) for k, v in kw.items()})
        out.append((m, random_query(rng, m)))
    return out


def pr_corpus(seed, count, max_dim=3, max_causes=3):
    """Small models (polytope dimension 1..max_dim) with reachable, E-reaching causes."""
    from mdpq.graph import can_reach

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = random_mdp(
            rng,
            rng.randint(2, 5),
            rng.randint(2, 3),
            max_actions=rng.choice([2, 3]),
            branching=rng.randint(1, 3),
            acyclic=rng.random() < 0.5,
        )
        if not 1 <= polytope_dim(m) <= max_dim:
            continue
        effect = frozenset(rng.sample(m.terminals, rng.randint(1, len(m.terminals) - 1)))
        live = reachable_from(m, {m.init}) & can_reach(m, effect)
        pool = sorted(s for s in live if s not in effect and not m.is_terminal(s))
        if not pool:
            continue
        causes = frozenset(rng.sample(pool, rng.randint(1, min(max_causes, len(pool)))))
        out.append((m, Query(causes, effect)))
    return out
