"""Print the canonical model of the network example and its star variant."""

import json

from mdpq import Query, builtin_model, canonical, star
from mdpq.model import mdp_to_dict

m = builtin_model("network")
q = Query(frozenset({"A", "B"}), frozenset(m.states_with_label("lost")))
cm = canonical(m, q)
print(json.dumps(mdp_to_dict(cm.mdp), indent=1))
print("p_min", cm.sidecar()["p_min"], "p_max", cm.sidecar()["p_max"], "p*", cm.p_star)
print(json.dumps(mdp_to_dict(star(cm, cm.p_star).mdp), indent=1))
