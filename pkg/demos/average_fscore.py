"""Average f-score of the two predictors on the lossy network model."""

from mdpq import Query, average_measure, builtin_model

m = builtin_model("network")
lost = frozenset(m.states_with_label("lost"))
for cause in ("A", "B"):
    rep = average_measure(m, Query(frozenset({cause}), lost), "fscore", samples=200_000, seed=1)
    print(f"C={{{cause}}}: f-score {rep.estimate:.4f} +- {rep.stderr:.4f} ({rep.seconds:.2f}s)")
