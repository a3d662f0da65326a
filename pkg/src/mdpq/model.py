"""MDP and policy data types, the JSON model format, and query validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Union

Number = Union[Fraction, float]

# Names introduced by the model transformations; input models may not use them.
RESERVED_STATES = frozenset({"__TP", "__FP", "__FN", "__TN"})
RESERVED_ACTIONS = frozenset(
    {"__alpha_min", "__alpha_max", "__tau", "__delta", "__switch"}
)

FLOAT_SUM_TOL = 1e-12


class ModelError(ValueError):
    """Raised for malformed model or policy documents."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


def parse_probability(value) -> Fraction:
    """Parse ``"n/d"``, a decimal literal or an int into an exact fraction."""
    if isinstance(value, bool):
        raise ModelError(f"invalid probability {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # only reached for floats constructed in Python, not parsed JSON
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ModelError(f"invalid probability {value!r}") from None
    raise ModelError(f"invalid probability {value!r}")


def format_fraction(value: Number) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


@dataclass(frozen=True, eq=False)
class Mdp:
    """A finite MDP with exact rational transition probabilities.

    ``trans`` maps ``(state, action)`` to a successor distribution. A state is
    terminal iff it has no entry in ``trans``. Per-state action order follows
    insertion order, which fixes the vector layout of policies.
    """

    states: tuple
    init: str
    trans: Mapping
    labels: Mapping = field(default_factory=dict)

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        index = {s: i for i, s in enumerate(states)}
        if len(index) != len(states):
            raise ModelError("duplicate state identifiers")
        if self.init not in index:
            raise ModelError(f"initial state {self.init!r} is not a state")
        trans = {}
        enabled = {s: [] for s in states}
        actions = {}
        for (s, a), dist in self.trans.items():
            if s not in index:
                raise ModelError(f"unknown state {s!r} in transition")
            clean = {}
            for t, p in dist.items():
                if t not in index:
                    raise ModelError(f"unknown state {t!r} referenced from ({s}, {a})")
                p = parse_probability(p)
                if p < 0 or p > 1:
                    raise ModelError(f"probability {p} out of range in ({s}, {a})")
                if p:
                    clean[t] = clean.get(t, Fraction(0)) + p
            total = sum(clean.values(), Fraction(0))
            if total != 1:
                raise ModelError(f"distribution of ({s}, {a}) sums to {total}, not 1")
            trans[(s, a)] = clean
            enabled[s].append(a)
            actions.setdefault(a, None)
        labels = {s: frozenset(tags) for s, tags in dict(self.labels).items() if tags}
        for s in labels:
            if s not in index:
                raise ModelError(f"label attached to unknown state {s!r}")
        object.__setattr__(self, "trans", trans)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "actions", tuple(actions))
        object.__setattr__(self, "_enabled", {s: tuple(v) for s, v in enabled.items()})
        stact = tuple((s, a) for s in states for a in enabled[s])
        object.__setattr__(self, "stact", stact)
        object.__setattr__(self, "stact_index", {sa: k for k, sa in enumerate(stact)})

    def enabled(self, s) -> tuple:
        return self._enabled[s]

    def is_terminal(self, s) -> bool:
        return not self._enabled[s]

    @property
    def terminals(self) -> tuple:
        return tuple(s for s in self.states if not self._enabled[s])

    @property
    def nonterminals(self) -> tuple:
        return tuple(s for s in self.states if self._enabled[s])

    def successors(self, s) -> set:
        out = set()
        for a in self._enabled[s]:
            out.update(self.trans[(s, a)])
        return out

    def states_with_label(self, label) -> tuple:
        return tuple(s for s in self.states if label in self.labels.get(s, ()))

    def __eq__(self, other):
        if not isinstance(other, Mdp):
            return NotImplemented
        return (
            self.states == other.states
            and self.init == other.init
            and self.stact == other.stact
            and self.trans == other.trans
            and self.labels == other.labels
        )

    __hash__ = object.__hash__

    def __repr__(self):
        return f"Mdp({len(self.states)} states, {len(self.stact)} state-action pairs, init={self.init!r})"


@dataclass(frozen=True)
class Query:
    """Predictor set C and effect set E."""

    predictor: frozenset
    effect: frozenset

    def __post_init__(self):
        object.__setattr__(self, "predictor", frozenset(self.predictor))
        object.__setattr__(self, "effect", frozenset(self.effect))


def validate_query(m: Mdp, q: Query) -> list:
    """Return a list of human-readable violations; empty means valid."""
    problems = []
    if not q.predictor:
        problems.append("predictor set C is empty")
    if not q.effect:
        problems.append("effect set E is empty")
    for s in sorted(q.predictor | q.effect):
        if s not in m.index:
            problems.append(f"unknown state {s!r}")
    if q.predictor & q.effect:
        problems.append("C and E intersect: " + ", ".join(sorted(q.predictor & q.effect)))
    for e in sorted(q.effect):
        if e in m.index and not m.is_terminal(e):
            problems.append(f"effect state not terminal: {e!r}")
    return problems


@dataclass(frozen=True, eq=False)
class MrPolicy:
    """Memoryless randomized policy: state -> {action: probability}.

    ``exact`` tags the representation: Fractions when true, floats otherwise.
    Build instances through :func:`make_policy` to get validation.
    """

    choice: Mapping
    exact: bool = True

    def prob(self, s, a):
        return self.choice.get(s, {}).get(a, Fraction(0) if self.exact else 0.0)

    def support(self, s) -> tuple:
        return tuple(a for a, p in self.choice.get(s, {}).items() if p > 0)

    def vector(self, m: Mdp) -> list:
        """Probabilities laid out along ``m.stact``."""
        return [self.prob(s, a) for s, a in m.stact]

    def __eq__(self, other):
        if not isinstance(other, MrPolicy):
            return NotImplemented
        strip = lambda c: {s: {a: p for a, p in d.items() if p} for s, d in c.items()}
        return self.exact == other.exact and strip(self.choice) == strip(other.choice)

    def to_json(self) -> dict:
        return {
            s: {a: format_fraction(p) for a, p in dist.items()}
            for s, dist in self.choice.items()
        }


def make_policy(m: Mdp, mapping: Mapping, exact=None) -> MrPolicy:
    """Validate ``mapping`` against ``m`` and return an :class:`MrPolicy`.

    Non-terminal states missing from ``mapping`` are only allowed when they
    have a single enabled action. Missing actions get probability zero.
    """
    if exact is None:
        exact = all(
            not isinstance(p, float) for dist in mapping.values() for p in dist.values()
        )
    choice = {}
    for s in m.states:
        acts = m.enabled(s)
        if not acts:
            if mapping.get(s):
                raise ModelError(f"policy assigns actions to terminal state {s!r}")
            continue
        given = mapping.get(s)
        if not given:
            if len(acts) != 1:
                raise ModelError(f"policy has no distribution for state {s!r}")
            given = {acts[0]: 1}
        for a in given:
            if a not in acts:
                raise ModelError(f"action {a!r} not enabled in state {s!r}")
        if exact:
            dist = {a: parse_probability(given.get(a, 0)) for a in acts}
            if any(p < 0 for p in dist.values()):
                raise ModelError(f"negative probability in state {s!r}")
            if sum(dist.values()) != 1:
                raise ModelError(f"policy distribution at {s!r} does not sum to 1")
        else:
            dist = {a: float(given.get(a, 0.0)) for a in acts}
            if any(p < 0 for p in dist.values()):
                raise ModelError(f"negative probability in state {s!r}")
            total = sum(dist.values())
            if abs(total - 1.0) > FLOAT_SUM_TOL:
                raise ModelError(f"policy distribution at {s!r} sums to {total}")
            dist = {a: p / total for a, p in dist.items()}
        choice[s] = dist
    unknown = set(mapping) - set(m.index)
    if unknown:
        raise ModelError(f"policy mentions unknown states {sorted(unknown)}")
    return MrPolicy(choice, exact)


def policy_from_vector(m: Mdp, vec, exact=False) -> MrPolicy:
    choice = {}
    for (s, a), p in zip(m.stact, vec):
        choice.setdefault(s, {})[a] = p if exact else float(p)
    return MrPolicy(choice, exact)


def uniform_policy(m: Mdp) -> MrPolicy:
    return MrPolicy(
        {s: {a: Fraction(1, len(m.enabled(s))) for a in m.enabled(s)} for s in m.nonterminals},
        True,
    )


def md_policy(m: Mdp, choice: Mapping) -> MrPolicy:
    """Deterministic policy from ``state -> action``; single-action states may be omitted."""
    mapping = {}
    for s in m.nonterminals:
        a = choice.get(s, m.enabled(s)[0] if len(m.enabled(s)) == 1 else None)
        if a is None:
            raise ModelError(f"no action chosen for state {s!r}")
        mapping[s] = {a: 1}
    return make_policy(m, mapping, exact=True)


def rationalize(policy: MrPolicy, max_denominator=1 << 20) -> MrPolicy:
    """Round a float policy to nearby rationals that sum to exactly one per state."""
    if policy.exact:
        return policy
    choice = {}
    for s, dist in policy.choice.items():
        acts = list(dist)
        approx = {a: Fraction(dist[a]).limit_denominator(max_denominator) for a in acts}
        biggest = max(acts, key=lambda a: approx[a])
        approx[biggest] += 1 - sum(approx.values())
        if approx[biggest] < 0:
            approx = {a: Fraction(1, len(acts)) for a in acts}
        choice[s] = approx
    return MrPolicy(choice, True)


# -- JSON format ----------------------------------------------------------------

def _decode(text):
    try:
        return json.loads(text, parse_float=str, parse_int=str)
    except json.JSONDecodeError as exc:
        raise ModelError(f"JSON syntax error: {exc.msg}", exc.lineno, exc.colno) from None


def mdp_from_dict(doc) -> Mdp:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    for key in ("states", "init", "transitions"):
        if key not in doc:
            raise ModelError(f"missing field {key!r}")
    states = doc["states"]
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise ModelError("'states' must be a list of strings")
    known = set(states)
    trans = {}
    for i, tr in enumerate(doc["transitions"]):
        try:
            s, a, to = tr["from"], tr["action"], tr["to"]
        except (KeyError, TypeError):
            raise ModelError(f"transition #{i} needs 'from', 'action' and 'to'") from None
        if s not in known:
            raise ModelError(f"unknown state {s!r} in transition #{i}")
        if (s, a) in trans:
            raise ModelError(f"duplicate state-action pair ({s}, {a})")
        if not isinstance(to, dict) or not to:
            raise ModelError(f"transition #{i} has an empty or invalid 'to' map")
        for t in to:
            if t not in known:
                raise ModelError(f"unknown state {t!r} referenced in transition #{i}")
        trans[(s, a)] = {t: parse_probability(p) for t, p in to.items()}
    labels = {}
    for label, members in (doc.get("labels") or {}).items():
        for s in members:
            if s not in known:
                raise ModelError(f"label {label!r} references unknown state {s!r}")
            labels.setdefault(s, set()).add(label)
    return Mdp(tuple(states), doc["init"], trans, labels)


def parse_model(text: str) -> Mdp:
    """Parse a JSON model document; probabilities are read exactly."""
    return mdp_from_dict(_decode(text))


def mdp_to_dict(m: Mdp) -> dict:
    doc = {
        "states": list(m.states),
        "init": m.init,
        "transitions": [
            {"from": s, "action": a, "to": {t: str(p) for t, p in m.trans[(s, a)].items()}}
            for s, a in m.stact
        ],
    }
    if m.labels:
        by_label = {}
        for s in m.states:
            for tag in sorted(m.labels.get(s, ())):
                by_label.setdefault(tag, []).append(s)
        doc["labels"] = by_label
    return doc


def serialize_model(m: Mdp) -> str:
    return json.dumps(mdp_to_dict(m), indent=2)


def load_model(path) -> Mdp:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def builtin_model(name: str) -> Mdp:
    """Bundled example models: ``"network"`` and ``"suzy_billy"``."""
    text = resources.files("mdpq.data").joinpath(f"{name}.json").read_text("utf-8")
    return parse_model(text)


def parse_policy(m: Mdp, text: str) -> MrPolicy:
    doc = _decode(text)
    if not isinstance(doc, dict):
        raise ModelError("policy document must be a JSON object")
    return make_policy(m, doc, exact=True)


def resolve_states(m: Mdp, names: Iterable[str]) -> frozenset:
    """Resolve state names or model labels into a state set."""
    out = set()
    for name in names:
        name = name.strip()
        if not name:
            continue
        if name in m.index:
            out.add(name)
            continue
        tagged = m.states_with_label(name)
        if not tagged:
            raise ModelError(f"{name!r} is neither a state nor a label")
        out.update(tagged)
    return frozenset(out)


def check_reserved(m: Mdp):
    clash = [s for s in m.states if s in RESERVED_STATES]
    clash += [a for a in m.actions if a in RESERVED_ACTIONS]
    if clash:
        raise ModelError(f"model uses reserved identifiers: {sorted(set(clash))}")
