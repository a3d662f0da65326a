"""Share of memoryless randomized policies that are probability-raising."""

from mdpq import Query, builtin_model, causal_volume

m = builtin_model("network")
lost = frozenset(m.states_with_label("lost"))
for cause in ("A", "B"):
    q = Query(frozenset({cause}), lost)
    for mode in ("spr", "gpr"):
        rep = causal_volume(m, q, mode, samples=10_000)
        print(f"C={{{cause}}} {mode}: {rep.estimate:.3f}")
