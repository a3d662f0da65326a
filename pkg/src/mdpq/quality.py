"""Confusion matrices, quality measures and averages over the MR-policy polytope."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .graph import _backward, has_end_component, zero_states
from .model import Mdp, ModelError, MrPolicy, Query, validate_query
from .solve import reach_under_policy
from .transform import SWITCH, two_copy

MEASURES = ("precision", "recall", "fscore", "mcc")
CHUNK = 4096
SKIP_WARN_FRACTION = 0.01
SUM_TOL = 1e-9


class EstimateError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: object
    fp: object
    fn: object
    tn: object
    exact: bool = True

    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def to_json(self) -> dict:
        fmt = str if self.exact else float
        return {k: fmt(getattr(self, k)) for k in ("tp", "fp", "fn", "tn")}


def _exact_sqrt(value: Fraction):
    """Square root as a Fraction when it is rational, otherwise as a float."""
    rn, rd = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if rn * rn == value.numerator and rd * rd == value.denominator:
        return Fraction(rn, rd)
    return math.sqrt(value)


def measure(cm: ConfusionMatrix, kind: str):
    """Precision, recall, f-score or MCC of a confusion matrix.

    Returns ``None`` where the measure is undefined (zero denominator), except
    MCC which is 0 whenever one of its denominator factors vanishes.
    """
    tp, fp, fn, tn = cm.tp, cm.fp, cm.fn, cm.tn
    if kind == "precision":
        den = tp + fp
        return tp / den if den else None
    if kind == "recall":
        den = tp + fn
        return tp / den if den else None
    if kind == "fscore":
        den = 2 * tp + fp + fn
        return 2 * tp / den if den else None
    if kind == "mcc":
        factors = (tp + fp, tp + fn, tn + fp, tn + fn)
        if any(f == 0 for f in factors):
            return Fraction(0) if cm.exact else 0.0
        num = tp * tn - fp * fn
        prod = factors[0] * factors[1] * factors[2] * factors[3]
        if cm.exact:
            root = _exact_sqrt(prod)
            return num / root if isinstance(root, Fraction) else float(num) / root
        return num / math.sqrt(prod)
    raise ValueError(f"unknown measure {kind!r}; expected one of {MEASURES}")


def _measure_arrays(kind, tp, fp, fn, tn):
    """Vectorized :func:`measure`; undefined entries come back as NaN."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "precision":
            den = tp + fp
            return np.where(den == 0, np.nan, tp / den)
        if kind == "recall":
            den = tp + fn
            return np.where(den == 0, np.nan, tp / den)
        if kind == "fscore":
            den = 2 * tp + fp + fn
            return np.where(den == 0, np.nan, 2 * tp / den)
        if kind == "mcc":
            prod = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
            return np.where(prod == 0, 0.0, (tp * tn - fp * fn) / np.sqrt(prod))
    raise ValueError(f"unknown measure {kind!r}; expected one of {MEASURES}")


class PolicyEvaluator:
    """Confusion-matrix and first-visit quantities of one query, many policies.

    Builds the two-copy MDP once. :meth:`confusion` and :meth:`first_visit`
    evaluate single policies (exactly for rational ones); :meth:`batch`
    evaluates a stack of float policy vectors laid out along ``m.stact``.
    """

    def __init__(self, m: Mdp, q: Query):
        self.m = m
        self.q = q
        self.causes = tuple(sorted(q.predictor, key=m.index.__getitem__))
        self.tc = two_copy(m, q)
        self._prepared = False

    # -- single policies -------------------------------------------------------

    def confusion(self, x: MrPolicy) -> ConfusionMatrix:
        tc = self.tc
        lifted = tc.lift(x)
        init = tc.mdp.init
        zero = Fraction(0) if x.exact else 0.0
        tp = reach_under_policy(tc.mdp, lifted, tc.e1)[init] if tc.e1 else zero
        fn = reach_under_policy(tc.mdp, lifted, tc.e0)[init]
        h, g = self._first_visit_lifted(lifted)
        fp = sum((h[c] * (1 - g[c]) for c in self.causes), zero)
        tn = 1 - tp - fp - fn
        return ConfusionMatrix(tp, fp, fn, tn, x.exact)

    def _first_visit_lifted(self, lifted):
        tc = self.tc
        init = tc.mdp.init
        e1 = reach_under_policy(tc.mdp, lifted, tc.e1) if tc.e1 else None
        h, g = {}, {}
        zero = Fraction(0) if lifted.exact else 0.0
        for c in self.causes:
            c0 = tc.copy0[c]
            h[c] = reach_under_policy(tc.mdp, lifted, {c0})[init]
            c1 = tc.copy1.get(c)
            g[c] = e1[c1] if (e1 is not None and c1 is not None) else zero
        return h, g

    def first_visit(self, x: MrPolicy):
        """``(h, g)``: probability that ``c`` is the first C-state reached, and the
        probability of reaching E from ``c``, for every cause ``c``."""
        return self._first_visit_lifted(self.tc.lift(x))

    # -- batched float evaluation ---------------------------------------------

    def _prepare(self):
        tc, m = self.tc, self.m
        big = tc.mdp
        n = len(big.states)
        self.n = n
        cols = []
        for s, a in big.stact:
            orig, _ = tc.origin[s]
            cols.append(-1 if a == SWITCH else m.stact_index[(orig, a)])
        self.cols = np.array(cols, dtype=int)
        w = np.zeros((len(big.stact), n * n))
        for k, (s, a) in enumerate(big.stact):
            i = big.index[s]
            for t, p in big.trans[(s, a)].items():
                w[k, i * n + big.index[t]] = float(p)
        self.w = w

        # Outcomes are solved for directly instead of as complements, so that
        # structurally zero quantities come out as exact zeros.
        copy0 = [s for s in big.states if tc.origin[s][1] == 0]
        copy1 = [s for s in big.states if tc.origin[s][1] == 1]
        hit0 = set(tc.c0) | set(tc.e0)
        live0 = _backward(big, hit0, big.enabled) - hit0
        rest0 = [s for s in copy0 if s not in hit0 and s not in live0]
        self.groups0 = [[big.index[tc.copy0[c]]] for c in self.causes]
        self.groups0.append([big.index[e] for e in sorted(tc.e0)])
        self.groups0.append([big.index[s] for s in rest0])
        self.u0 = np.array(sorted(big.index[s] for s in live0), dtype=int)

        live1 = _backward(big, tc.e1, big.enabled) - set(tc.e1) if tc.e1 else set()
        rest1 = [s for s in copy1 if s not in tc.e1 and s not in live1]
        self.groups1 = [[big.index[s] for s in sorted(tc.e1)], [big.index[s] for s in rest1]]
        self.u1 = np.array(sorted(big.index[s] for s in live1), dtype=int)
        self.init_idx = big.index[big.init]
        self.c1_idx = [big.index[tc.copy1[c]] if c in tc.copy1 else -1 for c in self.causes]
        self._prepared = True

    @staticmethod
    def _absorb(pmat, unknown, groups):
        """Probability to hit each group first, for each state in ``unknown``."""
        bsz = pmat.shape[0]
        if len(unknown) == 0:
            return np.zeros((bsz, 0, len(groups)))
        q = pmat[:, unknown[:, None], unknown[None, :]]
        a = np.eye(len(unknown))[None, :, :] - q
        rhs = np.stack([pmat[:, unknown][:, :, grp].sum(axis=2) for grp in groups], axis=2)
        return np.linalg.solve(a, rhs)

    def _outcomes(self, pmat, unknown, groups, start):
        """Group hitting probabilities from state index ``start``."""
        out = np.zeros((pmat.shape[0], len(groups)))
        for j, grp in enumerate(groups):
            if start in grp:
                out[:, j] = 1.0
                return out
        pos = np.flatnonzero(unknown == start)
        if len(pos):
            out[:] = self._absorb(pmat, unknown, groups)[:, pos[0], :]
        return out

    def batch(self, xs: np.ndarray) -> "BatchResult":
        """Evaluate float policy vectors ``xs`` of shape ``(B, |StAct|)``.

        Vectors with zero entries change the induced graph and are evaluated
        one by one.
        """
        if not self._prepared:
            self._prepare()
        xs = np.asarray(xs, dtype=float)
        bsz = xs.shape[0]
        k = len(self.causes)
        h = np.zeros((bsz, k))
        g = np.zeros((bsz, k))
        ng = np.ones((bsz, k))
        fn = np.zeros(bsz)
        tn = np.zeros(bsz)
        degenerate = np.any(xs <= 0.0, axis=1) if xs.shape[1] else np.zeros(bsz, bool)
        full = np.flatnonzero(~degenerate)
        step = max(16, min(bsz, int(8e6 // max(self.n * self.n, 1))))
        for lo in range(0, len(full), step):
            rows = full[lo:lo + step]
            lifted = np.ones((len(rows), len(self.cols)))
            mask = self.cols >= 0
            lifted[:, mask] = xs[rows][:, self.cols[mask]]
            pmat = (lifted @ self.w).reshape(len(rows), self.n, self.n)
            first = self._outcomes(pmat, self.u0, self.groups0, self.init_idx)
            h[rows] = first[:, :k]
            fn[rows] = first[:, k]
            tn[rows] = first[:, k + 1]
            for j, ci in enumerate(self.c1_idx):
                if ci >= 0:
                    after = self._outcomes(pmat, self.u1, self.groups1, ci)
                    g[rows, j] = after[:, 0]
                    ng[rows, j] = after[:, 1]
        for r in np.flatnonzero(degenerate):
            hh, gg, ngg, fn[r], tn[r] = self._single_float(_vector_policy(self.m, xs[r]))
            h[r] = [hh[c] for c in self.causes]
            g[r] = [gg[c] for c in self.causes]
            ng[r] = [ngg[c] for c in self.causes]
        return BatchResult((h * g).sum(axis=1), (h * ng).sum(axis=1), fn, tn, h, g, ng)

    def _single_float(self, x: MrPolicy):
        """Float outcomes of one policy whose support may be partial."""
        tc = self.tc
        big = tc.mdp
        lifted = tc.lift(x)
        reach = lambda target: reach_under_policy(big, lifted, target)
        copy0 = [s for s in big.states if tc.origin[s][1] == 0]
        copy1 = [s for s in big.states if tc.origin[s][1] == 1]
        hit0 = set(tc.c0) | set(tc.e0)
        dead0 = zero_states(big, lifted, hit0)
        tn = reach({s for s in copy0 if s in dead0})[big.init]
        fn = reach(tc.e0)[big.init]
        to_e1 = reach(tc.e1) if tc.e1 else None
        dead1 = zero_states(big, lifted, tc.e1)
        to_rest1 = reach({s for s in copy1 if s in dead1})
        h, g, ng = {}, {}, {}
        for c in self.causes:
            h[c] = reach({tc.copy0[c]})[big.init]
            c1 = tc.copy1.get(c)
            g[c] = to_e1[c1] if (to_e1 is not None and c1 is not None) else 0.0
            ng[c] = to_rest1[c1] if c1 is not None else 1.0
        return h, g, ng, fn, tn


@dataclass(frozen=True)
class BatchResult:
    """Per-sample confusion entries and first-visit quantities.

    ``h[:, j]`` is the probability that cause ``j`` is the first C-state
    reached, ``g[:, j]`` / ``ng[:, j]`` the probabilities of ending in / outside
    E after it.
    """

    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray
    h: np.ndarray
    g: np.ndarray
    ng: np.ndarray


def _vector_policy(m: Mdp, vec) -> MrPolicy:
    choice = {}
    for (s, a), p in zip(m.stact, vec):
        choice.setdefault(s, {})[a] = float(p)
    return MrPolicy(choice, False)


def confusion(m: Mdp, q: Query, x: MrPolicy) -> ConfusionMatrix:
    """Confusion matrix of ``(C, E)`` under ``x`` via the two-copy MDP."""
    return PolicyEvaluator(m, q).confusion(x)


# -- the policy polytope ---------------------------------------------------------

@dataclass(frozen=True)
class PolytopeSpec:
    """Product of simplices, one per non-terminal state."""

    mdp: Mdp
    simplices: tuple
    dimension: int
    volume: Fraction


def polytope(m: Mdp) -> PolytopeSpec:
    simplices = tuple((s, len(m.enabled(s)) - 1) for s in m.nonterminals)
    volume = Fraction(1)
    for _, n in simplices:
        volume /= math.factorial(n)
    return PolytopeSpec(m, simplices, sum(n for _, n in simplices), volume)


def sample_vectors(spec: PolytopeSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` uniform points of the polytope laid out along ``mdp.stact``.

    Each simplex is sampled by the gaps between sorted uniforms.
    """
    m = spec.mdp
    out = np.empty((count, len(m.stact)))
    for s, n in spec.simplices:
        first = m.stact_index[(s, m.enabled(s)[0])]
        if n == 0:
            out[:, first] = 1.0
            continue
        cuts = np.sort(rng.random((count, n)), axis=1)
        edges = np.concatenate([np.zeros((count, 1)), cuts, np.ones((count, 1))], axis=1)
        out[:, first:first + n + 1] = np.diff(edges, axis=1)
    return out


def sample_policy(spec: PolytopeSpec, rng: np.random.Generator) -> MrPolicy:
    return _vector_policy(spec.mdp, sample_vectors(spec, rng, 1)[0])


# -- Monte-Carlo estimates -----------------------------------------------------

@dataclass
class EstimateReport:
    estimate: float
    stderr: object
    samples: int
    skipped: int
    seed: int
    seconds: float
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


def _chunk_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _run_chunks(spec, samples, seed, threads, work):
    sizes = [min(CHUNK, samples - lo) for lo in range(0, samples, CHUNK)]

    def job(i):
        xs = sample_vectors(spec, _chunk_rng(seed, i), sizes[i])
        return work(xs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    return np.concatenate(parts) if parts else np.zeros(0)


def _summarize(values, samples, seed, started, extra_warnings=()):
    valid = values[~np.isnan(values)]
    skipped = int(samples - len(valid))
    warnings = list(extra_warnings)
    if samples and skipped / samples > SKIP_WARN_FRACTION:
        warnings.append(f"{skipped} of {samples} samples had an undefined value and were skipped")
    if len(valid) and np.all(valid == valid[0]):
        estimate, stderr = float(valid[0]), 0.0
    else:
        estimate = float(np.mean(valid))
        stderr = float(np.std(valid, ddof=1) / math.sqrt(len(valid))) if len(valid) > 1 else None
    return EstimateReport(estimate, stderr, samples, skipped, seed, time.perf_counter() - started, warnings)


def _model_warnings(m):
    return ["model has end components; EC-trapped mass counts as true negative"] if has_end_component(m) else []


def _check_query(m, q):
    problems = validate_query(m, q)
    if problems:
        raise ModelError("; ".join(problems))


def average_measure(m: Mdp, q: Query, kind: str, samples=100_000, seed=0, threads=1) -> EstimateReport:
    """Monte-Carlo average of a quality measure over uniformly sampled MR policies."""
    if kind not in MEASURES:
        raise ValueError(f"unknown measure {kind!r}; expected one of {MEASURES}")
    if samples < 2:
        raise ValueError("average_measure needs at least 2 samples")
    _check_query(m, q)
    started = time.perf_counter()
    spec = polytope(m)
    ev = PolicyEvaluator(m, q)

    def work(xs):
        res = ev.batch(xs)
        return _measure_arrays(kind, res.tp, res.fp, res.fn, res.tn)

    values = _run_chunks(spec, samples, seed, threads, work)
    if np.all(np.isnan(values)):
        raise EstimateError("measure undefined a.e.")
    return _summarize(values, samples, seed, started, _model_warnings(m))


def _predicate_arrays(mode, res: BatchResult):
    reached = res.h.sum(axis=1) > 0
    if mode == "gpr":
        return reached & (res.tp * res.tn - res.fp * res.fn > 0)
    if mode == "spr":
        # Pr(E | c first) - Pr(E), expanded so that exact ties cancel exactly:
        # sum_d h_d (g_c - g_d) + tn g_c - fn (1 - g_c)
        cross = (res.h[:, None, :] * (res.g[:, :, None] - res.g[:, None, :])).sum(axis=2)
        margin = cross + res.tn[:, None] * res.g - res.fn[:, None] * res.ng
        ok = np.where(res.h > 0, margin > 0, True)
        return reached & ok.all(axis=1)
    raise ValueError("mode must be 'spr' or 'gpr'")


def causal_volume(m: Mdp, q: Query, mode="spr", samples=10_000, seed=0, threads=1) -> EstimateReport:
    """Estimated fraction of the policy polytope made of SPR (or GPR) policies."""
    if samples < 1:
        raise ValueError("causal_volume needs at least 1 sample")
    if mode not in ("spr", "gpr"):
        raise ValueError("mode must be 'spr' or 'gpr'")
    _check_query(m, q)
    started = time.perf_counter()
    spec = polytope(m)
    ev = PolicyEvaluator(m, q)

    def work(xs):
        return _predicate_arrays(mode, ev.batch(xs)).astype(float)

    values = _run_chunks(spec, samples, seed, threads, work)
    return _summarize(values, samples, seed, started, _model_warnings(m))


# -- single-policy predicates ----------------------------------------------------

def pr_quantities(m: Mdp, q: Query, x: MrPolicy) -> dict:
    """Everything the PR conditions compare, for one policy."""
    ev = PolicyEvaluator(m, q)
    cm = ev.confusion(x)
    h, g = ev.first_visit(x)
    return {
        "confusion": cm,
        "reach_c": sum(h.values(), Fraction(0) if x.exact else 0.0),
        "effect": cm.tp + cm.fn,
        "first_visit": h,
        "conditional": g,
        "gpr_value": cm.tp * cm.tn - cm.fp * cm.fn,
    }


def _spr_holds(qty) -> bool:
    if not qty["reach_c"] > 0:
        return False
    return all(
        qty["conditional"][c] > qty["effect"]
        for c, w in qty["first_visit"].items()
        if w > 0
    )


def spr_predicate(m: Mdp, q: Query, x: MrPolicy) -> bool:
    """(R) and, for every first-reached cause, Pr(E | first visit c) > Pr(E)."""
    return _spr_holds(pr_quantities(m, q, x))


def gpr_predicate(m: Mdp, q: Query, x: MrPolicy) -> bool:
    """(R) and tp*tn - fp*fn > 0."""
    qty = pr_quantities(m, q, x)
    return qty["reach_c"] > 0 and qty["gpr_value"] > 0
