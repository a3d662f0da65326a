import time
from fractions import Fraction

import pytest

from mdpq.graph import has_end_component
from mdpq.model import Mdp, Query, md_policy, uniform_policy
from mdpq.prcheck import (
    GprConfig,
    _mix,
    _spr_sweep,
    back_map,
    check_gpr,
    check_spr,
    check_spr_singleton,
    optimize_measure,
    verify_memory_policy,
    verify_witness,
)
from mdpq.quality import PolicyEvaluator, measure
from mdpq.transform import canonical

from helpers import grid_policies, network_policy, pr_corpus


def grid_witness(m, q, mode):
    """First policy on the 1/8 grid satisfying (R) and (S) or (G), exactly."""
    ev = PolicyEvaluator(m, q)
    for x in grid_policies(m):
        h, g = ev.first_visit(x)
        if not sum(h.values()) > 0:
            continue
        cm = ev.confusion(x)
        if mode == "gpr":
            if cm.tp * cm.tn - cm.fp * cm.fn > 0:
                return x
        elif all(g[c] > cm.tp + cm.fn for c in h if h[c] > 0):
            return x
    return None


def overclaim_counterexample():
    """c1 always hits E but is rarely reached; c2 is likelier and weaker."""
    m = Mdp(
        ("init", "c1", "c2", "E", "N"),
        "init",
        {
            ("init", "a"): {"c1": "1/10", "c2": "1/2", "N": "2/5"},
            ("c1", "a"): {"E": 1},
            ("c2", "a"): {"E": "1/5", "N": "4/5"},
        },
    )
    return m, Query(frozenset({"c1", "c2"}), frozenset({"E"}))


# -- examples -----------------------------------------------------------------------

def test_check_spr_network(network, q_a, q_b):
    v = check_spr(network, q_b)
    assert v.exists and v.p_star == 1 and v.min_value == Fraction(1, 2)
    cm = v.canonical
    assert verify_witness(cm.mdp, cm.query, v.witness, "spr").holds
    v = check_spr(network, q_a)
    assert not v.exists and v.p_star == Fraction(1, 2) and v.min_value == Fraction(1, 2)
    assert v.witness is None


def test_check_spr_suzy(suzy, q_suzy):
    v = check_spr(suzy, q_suzy)
    assert v.exists
    both = md_policy(suzy, {"Suzy": "t", "Billy": "t"})
    cert = verify_witness(suzy, q_suzy, both, "spr")
    assert cert.holds
    assert cert.quantities["effect"] == "13/25" and cert.quantities["conditional"]["ST"] == "4/5"


def test_singleton_fast_path(network, q_a, q_b):
    assert check_spr_singleton(network, q_b).exists
    assert check_spr_singleton(network, q_b).min_value == Fraction(1, 2)
    assert not check_spr_singleton(network, q_a).exists
    m = Mdp(("i", "c", "e", "n"), "i", {("i", "a"): {"c": "1/2", "e": "1/2"}, ("c", "a"): {"n": 1}})
    q = Query(frozenset({"c"}), frozenset({"e"}))
    assert not check_spr_singleton(m, q).exists and not check_spr(m, q).exists
    with pytest.raises(ValueError):
        check_spr_singleton(*overclaim_counterexample())


def test_unreachable_causes():
    m = Mdp(("i", "c", "e", "n"), "i", {("i", "a"): {"e": "1/2", "n": "1/2"}, ("c", "a"): {"e": 1}})
    q = Query(frozenset({"c"}), frozenset({"e"}))
    assert check_spr(m, q).reason == "(R) unsatisfiable"
    g = check_gpr(m, q)
    assert not g.found and g.exactness == "oracle-complete"


def test_verify_witness_examples(network, q_b):
    cert = verify_witness(network, q_b, network_policy(network, 0, 1), "spr")
    assert cert.holds and cert.quantities["conditional"]["B"] == "1/2" and cert.quantities["effect"] == "1/3"
    cert = verify_witness(network, q_b, network_policy(network, 1, 1), "gpr")
    assert not cert.holds and cert.quantities["gpr_value"] == "0"
    m = Mdp(("i", "c", "e", "n"), "i", {("i", "a"): {"e": 1}, ("i", "b"): {"c": 1}, ("c", "a"): {"e": 1}})
    q = Query(frozenset({"c"}), frozenset({"e"}))
    for mode in ("spr", "gpr"):
        cert = verify_witness(m, q, md_policy(m, {"i": "a"}), mode)
        assert not cert.holds and cert.reason.startswith("(R)")
    with pytest.raises(ValueError):
        verify_witness(network, q_b, network_policy(network, 0, 1), "both")


def test_check_gpr_network(network, q_a, q_b):
    t0 = time.perf_counter()
    g = check_gpr(network, q_b)
    assert time.perf_counter() - t0 < 1.0
    assert g.found
    cm = canonical(network, q_b)
    assert verify_witness(cm.mdp, cm.query, g.witness, "gpr").holds
    g = check_gpr(network, q_a)
    assert not g.found and g.exactness == "oracle-complete"


def test_check_gpr_universal_case():
    # every policy raises: found at the very first evaluated point
    m = Mdp(
        ("i", "x", "c1", "c2", "e", "n"),
        "i",
        {
            ("i", "a"): {"c1": "1/2", "x": "1/2"},
            ("i", "b"): {"c2": "1/2", "x": "1/2"},
            ("x", "a"): {"n": 1},
            ("c1", "a"): {"e": 1},
            ("c2", "a"): {"e": "3/4", "n": "1/4"},
        },
    )
    g = check_gpr(m, Query(frozenset({"c1", "c2"}), frozenset({"e"})))
    assert g.found and g.trace["evaluations"] == 1


def test_check_gpr_uses_search_when_uniform_fails():
    # uniform play gives f = -1/160; pure b gives f = 1/8
    m = Mdp(
        ("i", "c1", "c2", "e", "n"),
        "i",
        {
            ("i", "a"): {"c2": 1},
            ("i", "b"): {"c1": "1/2", "e": "1/4", "n": "1/4"},
            ("c1", "a"): {"e": 1},
            ("c2", "a"): {"e": "1/5", "n": "4/5"},
        },
    )
    q = Query(frozenset({"c1", "c2"}), frozenset({"e"}))
    cert = verify_witness(m, q, uniform_policy(m), "gpr")
    assert not cert.holds and cert.quantities["gpr_value"] == "-1/160"
    g = check_gpr(m, q, GprConfig(starts=4, seed=1))
    assert g.found and g.reason != "uniform policy is a witness"
    assert verify_witness(canonical(m, q).mdp, canonical(m, q).query, g.witness, "gpr").holds
    assert verify_memory_policy(m, q, g.memory_policy, "gpr").holds
    again = check_gpr(m, q, GprConfig(starts=4, seed=1))
    assert again.to_json() == g.to_json()


def test_one_shot_test_overclaims():
    m, q = overclaim_counterexample()
    v = check_spr(m, q)
    assert v.one_shot_test is True and v.min_value == Fraction(3, 5) and v.p_star == 1
    assert not v.exists
    # the model has a single policy, and it is not SPR: Pr(E) = 1/5 = Pr(E | c2)
    cert = verify_witness(m, q, uniform_policy(m), "spr")
    assert not cert.holds and cert.quantities["effect"] == "1/5"
    assert cert.quantities["conditional"]["c2"] == "1/5"


def test_witness_mixing_needs_small_epsilon(suzy, q_suzy, network, q_b):
    for m, q in ((network, q_b), (suzy, q_suzy)) + tuple(pr_corpus(5, 30)):
        v = check_spr(m, q)
        if not v.exists:
            continue
        cm = v.canonical
        v_, low, probs, restricted, sigma = _spr_sweep(cm)
        gap = v_ - low
        assert v.epsilon <= min(Fraction(1, 2), gap / (1 + gap) / 2)
        assert verify_witness(cm.mdp, cm.query, _mix(cm, restricted, sigma, v.epsilon, probs), "spr").holds
        full = _mix(cm, restricted, sigma, Fraction(1), probs)
        if not verify_witness(cm.mdp, cm.query, full, "spr").holds:
            assert v.epsilon < 1


def test_back_mapping_on_example_models(network, q_b, suzy, q_suzy):
    for m, q in ((network, q_b), (suzy, q_suzy)):
        v = check_spr(m, q)
        assert v.memory_policy is not None
        assert verify_memory_policy(m, q, v.memory_policy, "spr").holds
        assert verify_memory_policy(m, q, v.memory_policy, "gpr").holds


def test_back_mapping_reproduces_canonical_values(network, q_b):
    cm = canonical(network, q_b)
    for p in (Fraction(0), Fraction(1, 3), Fraction(1)):
        for r in (Fraction(0), Fraction(1, 2), Fraction(1)):
            x = network_policy(network, p, 0)
            choice = dict(x.choice)
            del choice["B"]
            choice["B"] = {"__alpha_min": 1 - r, "__alpha_max": r}
            xc = type(x)(choice, True)
            mp = back_map(cm, xc)
            a = verify_memory_policy(network, q_b, mp, "gpr").quantities
            b = verify_witness(cm.mdp, cm.query, xc, "gpr").quantities
            assert a["confusion"] == b["confusion"]


def test_back_mapping_declines_mecs():
    m = Mdp(
        ("i", "s", "c", "e", "n"),
        "i",
        {
            ("i", "a"): {"s": 1},
            ("s", "stay"): {"i": 1},
            ("s", "go"): {"c": "1/2", "n": "1/2"},
            ("c", "a"): {"e": "3/4", "n": "1/4"},
            ("c", "b"): {"e": "1/4", "n": "3/4"},
        },
    )
    v = check_spr(m, Query(frozenset({"c"}), frozenset({"e"})))
    assert v.exists and v.memory_policy is None and v.notes


def test_optimize_measure_network(network, q_a):
    expect = {
        ("precision", "max"): Fraction(1, 2),
        ("precision", "min"): Fraction(1, 4),
        ("recall", "max"): Fraction(2, 3),
        ("recall", "min"): Fraction(1, 3),
    }
    for (kind, sense), val in expect.items():
        r = optimize_measure(network, q_a, kind, sense)
        assert r.value == val
        assert abs(r.lp_value - float(val)) < 1e-9


# -- corpus properties ----------------------------------------------------------------

CORPUS = pr_corpus(2024, 25)


@pytest.mark.parametrize("m, q", CORPUS)
def test_spr_matches_grid(m, q):
    v = check_spr(m, q)
    found = grid_witness(m, q, "spr")
    if found is not None:
        assert v.exists
    if not v.exists:
        assert found is None
    if v.exists:
        cm = v.canonical
        assert verify_witness(cm.mdp, cm.query, v.witness, "spr").holds
        # the classical test never misses an existing policy
        assert v.one_shot_test
        if v.memory_policy is not None:
            assert verify_memory_policy(m, q, v.memory_policy, "spr").holds


@pytest.mark.parametrize("m, q", CORPUS)
def test_gpr_sound_and_matches_grid(m, q):
    g = check_gpr(m, q, GprConfig(starts=4))
    if g.found:
        cm = canonical(m, q)
        assert verify_witness(cm.mdp, cm.query, g.witness, "gpr").holds
        if g.memory_policy is not None:
            assert verify_memory_policy(m, q, g.memory_policy, "gpr").holds
    else:
        assert g.exactness in ("heuristic", "oracle-complete")
    if grid_witness(m, q, "gpr") is not None:
        assert g.found


@pytest.mark.parametrize("m, q", [(m, Query(frozenset({c}), q.effect)) for m, q in CORPUS for c in sorted(q.predictor)[:1]])
def test_singleton_agreement(m, q):
    assert check_spr(m, q).exists == check_spr_singleton(m, q).exists
    assert check_gpr(m, q).found == check_spr(m, q).exists


@pytest.mark.parametrize("m, q", pr_corpus(77, 10, max_dim=2))
def test_optimize_measure_bounds_grid(m, q):
    ev = PolicyEvaluator(m, q)
    values = {k: [] for k in ("precision", "recall")}
    for x in grid_policies(m):
        cm = ev.confusion(x)
        for k in values:
            v = measure(cm, k)
            if v is not None:
                values[k].append(v)
    for kind, vals in values.items():
        if not vals:
            continue
        hi = optimize_measure(m, q, kind, "max")
        lo = optimize_measure(m, q, kind, "min")
        assert hi.lp_value >= float(max(vals)) - 1e-9
        assert lo.lp_value <= float(min(vals)) + 1e-9
