"""Decide SPR existence and search for GPR witnesses."""

from mdpq import Query, builtin_model, check_gpr, check_spr

for name, cause, effect in (("network", "B", "lost"), ("network", "A", "lost"), ("suzy_billy", "ST", "Shatter")):
    m = builtin_model(name)
    q = Query(frozenset({cause}), frozenset(m.states_with_label(effect)) or frozenset({effect}))
    spr = check_spr(m, q)
    gpr = check_gpr(m, q)
    print(f"{name} C={{{cause}}}: spr={spr.exists} ({spr.reason}); gpr={gpr.outcome} [{gpr.exactness}]")
    if spr.witness is not None:
        print("  spr witness on the canonical model:", spr.witness.to_json())
