"""
One session through the collection protocol
===========================================

Drives the study service directly (no HTTP): gate test, demographics and
the attitude survey, five rounds of link creation under the tree rule, an
alteration pass, self-reported confidence, usability ratings, and the
verification code.
"""

import random
from pathlib import Path

from causalcrowd import io as ccio
from causalcrowd.collection.sassy import SassyTable
from causalcrowd.collection.service import ServiceConfig, StudyService, network_dot
from causalcrowd.core import generate_narrative

DATA = Path(__file__).resolve().parents[1] / "data"

catalog = ccio.load_catalog(DATA / "catalog_final.json")
service = StudyService(
    ServiceConfig(
        catalog=catalog,
        gate_cause="increasing emissions",
        gate_effect="increasing CO2",
        sassy_table=SassyTable.load(DATA / "sassy_table.json"),
        rng=random.Random(0),
    )
)

session = service.create_session()
print(f"session {session.id[:8]}... stage={session.stage.value}")

# the instructions end with a comprehension test; a wrong answer just loops
print("gate:", service.submit_test(session.id, "increasing CO2", "increasing emissions"))
print("gate:", service.submit_test(session.id, "increasing emissions", "increasing CO2"))

segment = service.submit_demographics(
    session.id, ["decline"] * 8, [3, 3, 3, 3]
)
print(f"attitude segment: {segment.value}")

# five links; after the first, one endpoint must already be in the network
chain = [
    ("more fossil fuel burning", "increasing emissions"),
    ("increasing emissions", "increasing CO2"),
    ("increasing CO2", "more trapped heat"),
    ("more trapped heat", "increasing temperature"),
    ("increasing temperature", "more intense heatwaves"),
]
for cause, effect in chain:
    out = service.submit_link(session.id, cause, effect)
    print(f"  linked, {out['remaining_rounds']} rounds left")

service.submit_alteration(session.id, [])
service.submit_confidence(session.id, 4)
service.submit_usability(session.id, [4, 2, 5, 1, 4, 4, 3])

print()
print(generate_narrative(session.network))
print()
print(network_dot(session.network))
print(f"verification code: {service.complete_session(session.id)}")
