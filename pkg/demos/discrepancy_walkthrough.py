"""
Crowd scores vs expert credibility
==================================

Bins the crowd's vote counts into 0..3, lines them up against the expert
credibility map, and prints the misinformed / correct / oblivious split
plus a DOT export of the significant links.
"""

from pathlib import Path

from causalcrowd import illusion, io as ccio, metrics

DATA = Path(__file__).resolve().parents[1] / "data"

catalog = ccio.load_catalog(DATA / "catalog_final.json")
nets = ccio.load_networks(DATA / "fixtures" / "networks.jsonl", catalog)
cred = ccio.load_credibility(DATA / "fixtures" / "credibility.csv", catalog)

agg = metrics.aggregate(nets)
d = illusion.build_discrepancy(agg, cred)

for link_class in illusion.LinkClass:
    entries = d.by_class(link_class)
    visible = sum(1 for e in entries if e.visible)
    print(f"{link_class.value:12s} {len(entries):4d} links ({visible} significant)")

print()
print("significant links (votes >= 4):")
for entry in d.visible_entries():
    print(
        f"  {entry.discrepancy:+d}  cr={entry.cr} cs={entry.cs} "
        f"votes={entry.votes:2d}  {entry.link}"
    )

# histogram rows, with the correct links split by credibility
print()
for row in illusion.discrepancy_histogram(d):
    if row.count_all:
        print(f"  score {row.score_label:10s} all={row.count_all:3d} "
              f"visible={row.count_visible}")

# the colored graph of everything significant
print()
print(illusion.export_discrepancy_dot(d))
