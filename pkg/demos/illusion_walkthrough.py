"""
Causal-chain support vs a bogus direct cause
============================================

Walks the path tooling over the bundled final-round vote fixture: how many
people drew "solar radiation -> warming" directly, and how strongly does the
crowd support the real multi-hop chain from fossil fuel burning?
"""

from fractions import Fraction
from pathlib import Path

from causalcrowd import io as ccio
from causalcrowd import metrics, pathlab

DATA = Path(__file__).resolve().parents[1] / "data"

catalog = ccio.load_catalog(DATA / "catalog_final.json")
nets = ccio.load_networks(DATA / "fixtures" / "networks.jsonl", catalog)
agg = metrics.aggregate(nets)

query = ccio.load_query(DATA / "fixtures" / "query.json", catalog)
print(f"bogus direct votes: {pathlab.bogus_votes(agg, query)}")

# every voted chain from the true cause to the warming outcomes
paths = pathlab.enumerate_paths(agg, [query.true_cause], query.outcomes, 4)
for p in paths:
    print(f"  {p.hops} hops  weakest={p.weakest:2d}  avg={float(p.average):6.2f}  "
          + " -> ".join(p.displays()))

# the ratio compares the bogus votes against the deepest best chain
for criterion in pathlab.SupportCriterion:
    report = pathlab.illusion_ratio(agg, query, criterion)
    print(
        f"{criterion.value:8s} ratio = {float(report.ratio):.4f}  "
        f"(best path: {' -> '.join(report.best_path.displays())})"
    )

# a complete 2x2 contingency table, for contrast, has a well-defined delta-p
m = pathlab.TrialMatrix.full(16, 4, 4, 16)
print(f"delta-p of a full 16/4/4/16 table: {float(pathlab.delta_p(m))}")
assert pathlab.delta_p(m) == Fraction(3, 5)
