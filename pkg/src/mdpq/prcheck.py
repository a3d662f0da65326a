"""Existence checks for strict and global probability-raising policies."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .graph import reachable_from
from .model import (
    Mdp,
    ModelError,
    MrPolicy,
    Query,
    format_fraction,
    md_policy,
    rationalize,
    uniform_policy,
    validate_query,
)
from .quality import ConfusionMatrix, confusion, measure, pr_quantities
from .solve import (
    FrequencySolution,
    SolverError,
    flow_constraints,
    frequencies_of,
    min_zero_states,
    optimal_reach,
    policy_from_frequencies,
    reach_under_policy,
)
from .transform import (
    ALPHA_MAX,
    ALPHA_MIN,
    FN,
    FP,
    TN,
    TP,
    CanonicalMdp,
    _with_cause_probs,
    canonical,
    star,
)

EPS_HALVINGS = 200
ASCENT_TOL = 1e-9
STEP_MIN = 1e-12
ZERO_TOL = 1e-12


def _fmt(v):
    return None if v is None else format_fraction(v)


# -- exact witness verification ------------------------------------------------------

@dataclass(frozen=True)
class WitnessCertificate:
    holds: bool
    mode: str
    reason: str
    quantities: dict

    def to_json(self) -> dict:
        return {"holds": self.holds, "mode": self.mode, "reason": self.reason, **self.quantities}


def _quantities_json(qty) -> dict:
    cm = qty["confusion"]
    return {
        "reach_c": _fmt(qty["reach_c"]),
        "effect": _fmt(qty["effect"]),
        "first_visit": {c: _fmt(v) for c, v in sorted(qty["first_visit"].items())},
        "conditional": {c: _fmt(v) for c, v in sorted(qty["conditional"].items())},
        "confusion": {k: _fmt(getattr(cm, k)) for k in ("tp", "fp", "fn", "tn")},
        "gpr_value": _fmt(qty["gpr_value"]),
    }


def _certify(qty, mode) -> WitnessCertificate:
    if not qty["reach_c"] > 0:
        return WitnessCertificate(False, mode, "(R) fails: C is not reached", _quantities_json(qty))
    if mode == "spr":
        bad = [
            c for c, w in sorted(qty["first_visit"].items())
            if w > 0 and not qty["conditional"][c] > qty["effect"]
        ]
        reason = "ok" if not bad else "(S) fails at " + ", ".join(bad)
        return WitnessCertificate(not bad, mode, reason, _quantities_json(qty))
    ok = qty["gpr_value"] > 0
    reason = "ok" if ok else "(G) fails: tp*tn - fp*fn <= 0"
    return WitnessCertificate(ok, mode, reason, _quantities_json(qty))


def verify_witness(m: Mdp, q: Query, x: MrPolicy, mode="spr") -> WitnessCertificate:
    """Check (R) and (S) or (G) for ``x`` on ``m`` in rational arithmetic."""
    if mode not in ("spr", "gpr"):
        raise ValueError("mode must be 'spr' or 'gpr'")
    if not x.exact:
        raise ValueError("verify_witness needs a rational policy")
    return _certify(pr_quantities(m, q, x), mode)


# -- back-mapping to the original model -------------------------------------------------

@dataclass(frozen=True)
class MemoryPolicy:
    """Two-phase policy on the original model.

    Memory starts in ``pre`` and plays ``pre_choice``. At the first visit of a
    cause ``c`` it moves to ``max`` with probability ``switch[c]`` and to ``min``
    otherwise; from then on the optimal MD policy for that memory cell is used.
    """

    pre_choice: dict
    switch: dict
    max_choice: dict
    min_choice: dict

    def to_json(self) -> dict:
        return {
            "memory": ["pre", "max", "min"],
            "initial": "pre",
            "update": "on the first visit of a cause c: max with probability switch[c], else min",
            "pre": {s: {a: _fmt(p) for a, p in d.items()} for s, d in self.pre_choice.items()},
            "switch": {c: _fmt(r) for c, r in self.switch.items()},
            "max": dict(self.max_choice),
            "min": dict(self.min_choice),
        }


def back_map(cm: CanonicalMdp, x: MrPolicy):
    """Translate a canonical-MDP policy into a :class:`MemoryPolicy` on the original.

    Returns ``None`` when MECs were collapsed; that correspondence is not built.
    """
    if cm.mecs:
        return None
    m, q = cm.original, cm.original_query
    _, smax = optimal_reach(m, q.effect, "max")
    _, smin = optimal_reach(m, q.effect, "min")
    pick = lambda pol: {s: next(a for a, p in d.items() if p) for s, d in pol.choice.items()}
    pre = {}
    for s in m.nonterminals:
        if s in q.predictor:
            continue
        if s in x.choice:
            pre[s] = {cm.action_map[(s, a)][1]: p for a, p in x.choice[s].items()}
        else:
            pre[s] = {a: Fraction(1, len(m.enabled(s))) for a in m.enabled(s)}
    switch = {c: x.prob(c, ALPHA_MAX) for c in sorted(cm.causes, key=m.index.__getitem__)}
    return MemoryPolicy(pre, switch, pick(smax), pick(smin))


def memory_product(m: Mdp, q: Query, mp: MemoryPolicy):
    """Markov chain (as a one-action MDP) of ``m`` under ``mp``, plus state naming."""
    name = lambda s, mem: f"{s}|{mem}"
    trans, states = {}, []
    start = (m.init, "pre")
    seen, todo = {start}, [start]
    while todo:
        s, mem = todo.pop()
        states.append((s, mem))
        if m.is_terminal(s):
            continue
        dist = {}
        if mem == "pre" and s in q.predictor:
            r = mp.switch.get(s, Fraction(0))
            parts = [(r, mp.max_choice[s], "max"), (1 - r, mp.min_choice[s], "min")]
            for w, a, nxt in parts:
                if w:
                    for t, p in m.trans[(s, a)].items():
                        key = (t, nxt)
                        dist[key] = dist.get(key, Fraction(0)) + w * p
        else:
            table = mp.pre_choice[s] if mem == "pre" else {(mp.max_choice if mem == "max" else mp.min_choice)[s]: Fraction(1)}
            for a, w in table.items():
                if w:
                    for t, p in m.trans[(s, a)].items():
                        dist[(t, mem)] = dist.get((t, mem), Fraction(0)) + w * p
        trans[(name(s, mem), "step")] = {name(*k): p for k, p in dist.items()}
        for k in dist:
            if k not in seen:
                seen.add(k)
                todo.append(k)
    order = sorted(states, key=lambda sm: (sm != start, m.index[sm[0]], sm[1]))
    names = [name(*sm) for sm in order]
    chain = Mdp(tuple(names), names[0], {(s, "step"): trans[(s, "step")] for s in names if (s, "step") in trans})
    return chain, order


def verify_memory_policy(m: Mdp, q: Query, mp: MemoryPolicy, mode="spr") -> WitnessCertificate:
    """Exact (R)/(S)/(G) check of a memory policy via the product chain."""
    chain, order = memory_product(m, q, mp)
    step = MrPolicy({s: {"step": Fraction(1)} for s in chain.nonterminals}, True)
    effect_states = {f"{s}|{mem}" for s, mem in order if s in q.effect}
    to_e = reach_under_policy(chain, step, effect_states)
    firsts = {c: f"{c}|pre" for c in q.predictor}
    h, g = {}, {}
    for c, node in firsts.items():
        if node in chain.index:
            h[c] = reach_under_policy(chain, step, {node})[chain.init]
            g[c] = to_e[node]
        else:
            h[c], g[c] = Fraction(0), Fraction(0)
    effect = to_e[chain.init]
    tp = sum((h[c] * g[c] for c in h), Fraction(0))
    fp = sum((h[c] * (1 - g[c]) for c in h), Fraction(0))
    fn = effect - tp
    tn = 1 - tp - fp - fn
    qty = {
        "confusion": ConfusionMatrix(tp, fp, fn, tn, True),
        "reach_c": sum(h.values(), Fraction(0)),
        "effect": effect,
        "first_visit": h,
        "conditional": g,
        "gpr_value": tp * tn - fp * fn,
    }
    return _certify(qty, mode)


# -- SPR ---------------------------------------------------------------------------------

@dataclass
class SprVerdict:
    exists: bool
    p_star: Fraction
    min_value: object
    reason: str
    one_shot_test: object = None
    threshold: object = None
    epsilon: object = None
    witness: MrPolicy = None
    certificate: WitnessCertificate = None
    memory_policy: MemoryPolicy = None
    canonical: CanonicalMdp = field(default=None, repr=False)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "exists": self.exists,
            "p_star": _fmt(self.p_star),
            "min_value": _fmt(self.min_value),
            "one_shot_test": self.one_shot_test,
            "threshold": _fmt(self.threshold),
            "epsilon": _fmt(self.epsilon),
            "reason": self.reason,
            "witness": self.witness.to_json() if self.witness else None,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "memory_policy": self.memory_policy.to_json() if self.memory_policy else None,
            "notes": list(self.notes),
        }


def _c_reachable(m, q) -> bool:
    return bool(q.predictor & reachable_from(m, {m.init}))


def _precheck(m, q):
    problems = validate_query(m, q)
    if problems:
        raise ModelError("; ".join(problems))


def _restrict(n: Mdp, forbidden):
    """Sub-MDP of ``n`` keeping the actions from which ``forbidden`` is surely avoided."""
    safe = min_zero_states(n, frozenset(forbidden))
    trans = {
        (s, a): d for (s, a), d in n.trans.items()
        if s in safe and all(t in safe for t in d)
    }
    return Mdp(n.states, n.init, trans), safe


def _mix(cm: CanonicalMdp, restricted: Mdp, sigma: MrPolicy, eps, target_probs) -> MrPolicy:
    """(1-eps)*sigma + eps*uniform on safe actions; causes realize ``target_probs``."""
    n = cm.mdp
    choice = {}
    for s in n.nonterminals:
        acts = n.enabled(s)
        if s in cm.causes:
            lo, hi = cm.p_min[s], cm.p_max[s]
            q = target_probs.get(s)
            if q is None or hi == lo:
                choice[s] = {a: Fraction(a == ALPHA_MIN) for a in acts}
            else:
                r = (q - lo) / (hi - lo)
                choice[s] = {ALPHA_MIN: 1 - r, ALPHA_MAX: r}
            continue
        safe_acts = restricted.enabled(s)
        if not safe_acts:
            choice[s] = {a: Fraction(1, len(acts)) for a in acts}
            continue
        u = Fraction(1, len(safe_acts))
        choice[s] = {
            a: ((1 - eps) * sigma.prob(s, a) + eps * u) if a in safe_acts else Fraction(0)
            for a in acts
        }
    return MrPolicy(choice, True)


def _spr_sweep(cm: CanonicalMdp):
    """Search thresholds ``v`` (cause maxima, descending) for an SPR policy.

    For threshold ``v`` the causes with ``p_max < v`` must be avoided surely; the
    others are sent to TP with probability ``max(v, p_min)``. A policy exists iff
    for some ``v`` the minimal effect probability of that restricted model is
    below ``v`` and some allowed cause stays reachable.
    """
    causes = cm.causes
    for v in sorted({cm.p_max[c] for c in causes if cm.p_max[c] > 0}, reverse=True):
        allowed = {c for c in causes if cm.p_max[c] >= v}
        forbidden = causes - allowed
        probs = {c: max(v, cm.p_min[c]) for c in allowed}
        mv = _with_cause_probs(cm, probs, drop=forbidden)
        restricted, safe = _restrict(mv, forbidden)
        if restricted.init not in safe:
            continue
        if not allowed & reachable_from(restricted, {restricted.init}):
            continue
        values, sigma = optimal_reach(restricted, {TP, FN}, "min")
        low = values[restricted.init]
        if low < v:
            return v, low, probs, restricted, sigma
    return None


def check_spr(m: Mdp, q: Query) -> SprVerdict:
    """Decide whether some MR policy satisfies the strict probability-raising condition.

    Works on the canonical MDP. Besides the decision it reports the classical
    one-shot test ``Pr^min(M*) < p*``, which can claim existence wrongly when a
    low-valued cause is forced on every path; the decision itself comes from a
    threshold sweep that forbids such causes (see ``_spr_sweep``). A positive
    answer carries a rational witness verified exactly on the canonical MDP.
    """
    _precheck(m, q)
    if not _c_reachable(m, q):
        return SprVerdict(False, Fraction(0), None, "(R) unsatisfiable")
    cm = canonical(m, q)
    p_star = cm.p_star
    if p_star == 0:
        return SprVerdict(False, p_star, None, "p* = 0: no cause can reach E", canonical=cm)
    mstar = star(cm, p_star).mdp
    min_value = optimal_reach(mstar, {TP, FN}, "min")[0][mstar.init]
    one_shot = min_value < p_star
    verdict = SprVerdict(False, p_star, min_value, "", one_shot_test=one_shot, canonical=cm)
    found = _spr_sweep(cm)
    if found is None:
        verdict.reason = "no threshold admits a policy whose effect probability stays below every reached cause"
        if one_shot:
            verdict.notes.append("Pr^min(M*) < p* although no SPR policy exists")
        return verdict
    v, low, probs, restricted, sigma = found
    gap = v - low
    eps = min(Fraction(1, 2), gap / (1 + gap) / 2)
    for _ in range(EPS_HALVINGS):
        x = _mix(cm, restricted, sigma, eps, probs)
        cert = verify_witness(cm.mdp, cm.query, x, "spr")
        if cert.holds:
            break
        eps /= 2
    else:
        raise SolverError("could not construct a verified SPR witness")
    verdict.exists = True
    verdict.threshold = v
    verdict.epsilon = eps
    verdict.witness = x
    verdict.certificate = cert
    verdict.reason = "witness verified"
    verdict.memory_policy = back_map(cm, x)
    if verdict.memory_policy is None:
        verdict.notes.append("model has MECs; witness is not mapped back to the original model")
    return verdict


def check_spr_singleton(m: Mdp, q: Query) -> SprVerdict:
    """Fast check for a single cause: only its maximizing summary action is kept."""
    if len(q.predictor) != 1:
        raise ValueError("check_spr_singleton needs exactly one cause state")
    _precheck(m, q)
    if not _c_reachable(m, q):
        return SprVerdict(False, Fraction(0), None, "(R) unsatisfiable")
    cm = canonical(m, q)
    (c,) = tuple(q.predictor)
    hi = cm.p_max[c]
    if hi == 0:
        return SprVerdict(False, hi, None, "p* = 0: no cause can reach E", canonical=cm)
    n = _with_cause_probs(cm, {c: hi})
    low = optimal_reach(n, {TP, FN}, "min")[0][n.init]
    exists = hi > low
    reason = f"p_max = {_fmt(hi)} {'>' if exists else '<='} Pr^min = {_fmt(low)}"
    return SprVerdict(exists, hi, low, reason, one_shot_test=exists, threshold=hi if exists else None, canonical=cm)


# -- GPR ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class GprConfig:
    starts: int = 8
    enumeration_cap: int = 16
    seed: int = 0
    max_iters: int = 500
    threads: int = 1


@dataclass
class GprVerdict:
    found: bool
    exactness: str
    reason: str
    witness: MrPolicy = None
    frequencies: dict = None
    certificate: WitnessCertificate = None
    memory_policy: MemoryPolicy = None
    trace: dict = field(default_factory=dict)

    @property
    def outcome(self) -> str:
        return "found" if self.found else "not-found"

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "exactness": self.exactness,
            "reason": self.reason,
            "witness": self.witness.to_json() if self.witness else None,
            "frequencies": self.frequencies,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "memory_policy": self.memory_policy.to_json() if self.memory_policy else None,
            "trace": self.trace,
        }


class _FreqSearch:
    """Projected gradient ascent of f = x_TP x_TN - x_FP x_FN over the flow polytope."""

    def __init__(self, n: Mdp, max_iters):
        self.n = n
        self.a, self.b, self.j = flow_constraints(n)
        term = {s: i for i, s in enumerate(n.terminals)}
        self.rows = [self.j[term[t]] for t in (TP, FP, FN, TN)]
        self.max_iters = max_iters

    def f(self, x):
        tp, fp, fn, tn = (r @ x for r in self.rows)
        return tp * tn - fp * fn

    def grad(self, x):
        tp, fp, fn, tn = (r @ x for r in self.rows)
        r = self.rows
        return tn * r[0] + tp * r[3] - fn * r[1] - fp * r[2]

    def _direction(self, x, g):
        fixed = np.zeros(len(x), dtype=bool)
        for _ in range(len(x) + 1):
            free = ~fixed
            d = np.zeros(len(x))
            af = self.a[:, free]
            gf = g[free]
            if af.size:
                lam, *_ = np.linalg.lstsq(af @ af.T, af @ gf, rcond=None)
                d[free] = gf - af.T @ lam
            else:
                d[free] = gf
            blocked = free & (x <= ZERO_TOL) & (d < 0)
            if not blocked.any():
                return d
            fixed |= blocked
        return np.zeros(len(x))

    def ascend(self, x):
        x = np.array(x, dtype=float)
        fx = self.f(x)
        for _ in range(self.max_iters):
            if fx > ASCENT_TOL:
                break
            d = self._direction(x, self.grad(x))
            if np.linalg.norm(d) < STEP_MIN:
                break
            neg = d < 0
            limit = np.min(x[neg] / -d[neg]) if neg.any() else np.inf
            t = min(1.0, limit)
            improved = False
            while t >= STEP_MIN:
                y = np.maximum(x + t * d, 0.0)
                fy = self.f(y)
                if fy > fx:
                    x, fx, improved = y, fy, True
                    break
                t /= 2
            if not improved:
                break
        return x, fx

    def solution(self, x) -> FrequencySolution:
        n = self.n
        freq = {sa: float(v) for sa, v in zip(n.stact, x)}
        inflow = {s: 0.0 for s in n.states}
        for (s, _), v in freq.items():
            inflow[s] += v
        for t, v in zip(n.terminals, self.j @ x):
            inflow[t] = float(v)
        return FrequencySolution(freq, inflow, False)


def _md_policies(n: Mdp):
    states = n.nonterminals
    for combo in itertools.product(*(n.enabled(s) for s in states)):
        yield md_policy(n, dict(zip(states, combo)))


def check_gpr(m: Mdp, q: Query, cfg: GprConfig = GprConfig()) -> GprVerdict:
    """Search for a global probability-raising policy.

    ``found`` always carries an exactly verified witness. ``not-found`` is
    definitive ("oracle-complete") only for a single cause, where the question
    reduces to :func:`check_spr`; otherwise it is marked "heuristic".
    """
    _precheck(m, q)
    if not _c_reachable(m, q):
        return GprVerdict(False, "oracle-complete", "(R) unsatisfiable")
    if len(q.predictor) == 1:
        spr = check_spr(m, q)
        trace = {"delegated": "check_spr", "p_star": _fmt(spr.p_star), "min_value": _fmt(spr.min_value)}
        if not spr.exists:
            return GprVerdict(False, "oracle-complete", "single cause: " + spr.reason, trace=trace)
        cm = spr.canonical
        cert = verify_witness(cm.mdp, cm.query, spr.witness, "gpr")
        if not cert.holds:
            raise SolverError("SPR witness for a single cause failed the GPR check")
        return GprVerdict(
            True, "oracle-complete", "single cause: witness verified", spr.witness,
            _freq_json(cm.mdp, spr.witness), cert, spr.memory_policy, trace,
        )

    cm = canonical(m, q)
    n = cm.mdp
    search = _FreqSearch(n, cfg.max_iters)
    trace = {"starts": cfg.starts, "seed": cfg.seed, "evaluations": 0, "best_f": None, "enumerated": 0}
    best = [-np.inf]

    def attempt(x_float):
        trace["evaluations"] += 1
        xf, fx = search.ascend(x_float)
        best[0] = max(best[0], fx)
        if fx <= 0:
            return None
        try:
            pol = rationalize(policy_from_frequencies(n, search.solution(xf)))
        except SolverError:
            return None
        cert = verify_witness(n, cm.query, pol, "gpr")
        return (pol, cert) if cert.holds else None

    def finish(pol, cert, how):
        trace["best_f"] = float(best[0])
        return GprVerdict(True, "oracle-complete", how, pol, _freq_json(n, pol), cert, back_map(cm, pol), trace)

    uni = uniform_policy(n)
    cert = verify_witness(n, cm.query, uni, "gpr")
    trace["evaluations"] += 1
    best[0] = float(Fraction(cert.quantities["gpr_value"]))
    if cert.holds:
        return finish(uni, cert, "uniform policy is a witness")
    found = attempt(_freq_vector(n, uni))
    if found:
        return finish(*found, "ascent from the uniform policy")

    def start(i):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(i,)))
        choice = {}
        for s in n.nonterminals:
            w = rng.dirichlet(np.ones(len(n.enabled(s))))
            choice[s] = dict(zip(n.enabled(s), w))
        return _freq_vector(n, MrPolicy(choice, False))

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            points = list(pool.map(start, range(cfg.starts)))
    else:
        points = [start(i) for i in range(cfg.starts)]
    for pt in points:
        found = attempt(pt)
        if found:
            return finish(*found, "multi-start ascent")

    if len(n.stact) <= cfg.enumeration_cap:
        for pol in _md_policies(n):
            trace["enumerated"] += 1
            cert = verify_witness(n, cm.query, pol, "gpr")
            if cert.holds:
                return finish(pol, cert, "deterministic policy enumeration")
            found = attempt(_freq_vector(n, pol))
            if found:
                return finish(*found, "ascent from a deterministic policy")
    trace["best_f"] = float(best[0])
    return GprVerdict(False, "heuristic", "search budget exhausted without a verified witness", trace=trace)


def _freq_vector(n: Mdp, x: MrPolicy) -> np.ndarray:
    fx = frequencies_of(n, x)
    return np.array([float(fx.freq[sa]) for sa in n.stact])


def _freq_json(n: Mdp, x: MrPolicy) -> list:
    fx = frequencies_of(n, x)
    return [{"state": s, "action": a, "value": _fmt(fx.freq[(s, a)])} for s, a in n.stact]


# -- optimization of linear-fractional measures ----------------------------------------

@dataclass
class OptimumReport:
    kind: str
    sense: str
    value: object
    policy: MrPolicy
    lp_value: float

    def to_json(self) -> dict:
        return {
            "measure": self.kind,
            "sense": self.sense,
            "value": _fmt(self.value),
            "lp_value": self.lp_value,
            "policy": self.policy.to_json(),
        }


def optimize_measure(m: Mdp, q: Query, kind="precision", sense="max") -> OptimumReport:
    """Extremal precision, recall or f-score over MR policies.

    Charnes-Cooper transform of the linear-fractional program over the
    state-action frequencies of the canonical MDP, solved with ``linprog``; the
    optimal policy is rounded to rationals and its measure evaluated exactly.
    """
    _precheck(m, q)
    weights = {
        "precision": ((1, 0, 0, 0), (1, 1, 0, 0)),
        "recall": ((1, 0, 0, 0), (1, 0, 1, 0)),
        "fscore": ((2, 0, 0, 0), (2, 1, 1, 0)),
    }
    if kind not in weights:
        raise ValueError("optimize_measure supports precision, recall and fscore")
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    cm = canonical(m, q)
    n = cm.mdp
    a, b, j = flow_constraints(n)
    term = {s: i for i, s in enumerate(n.terminals)}
    rows = np.array([j[term[t]] for t in (TP, FP, FN, TN)])
    num = np.array(weights[kind][0]) @ rows
    den = np.array(weights[kind][1]) @ rows
    k = len(n.stact)
    # variables (y, t) with y = t * x
    obj = np.append(-num if sense == "max" else num, 0.0)
    a_eq = np.vstack([np.hstack([a, -b[:, None]]), np.append(den, 0.0)])
    b_eq = np.append(np.zeros(len(b)), 1.0)
    res = linprog(obj, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * (k + 1), method="highs")
    if res.status != 0:
        raise SolverError(f"linear program failed: {res.message}")
    y, t = res.x[:k], res.x[k]
    if t <= 0:
        raise SolverError("optimum approached only in the limit")
    sol = _FreqSearch(n, 0).solution(y / t)
    pol = rationalize(policy_from_frequencies(n, sol))
    value = measure(confusion(n, cm.query, pol), kind)
    lp_value = float(-res.fun if sense == "max" else res.fun)
    return OptimumReport(kind, sense, value, pol, lp_value)


__all__ = [
    "GprConfig",
    "GprVerdict",
    "MemoryPolicy",
    "OptimumReport",
    "SprVerdict",
    "WitnessCertificate",
    "back_map",
    "check_gpr",
    "check_spr",
    "check_spr_singleton",
    "memory_product",
    "optimize_measure",
    "verify_memory_policy",
    "verify_witness",
]

