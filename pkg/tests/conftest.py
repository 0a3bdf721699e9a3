from pathlib import Path

import pytest

from causalcrowd.core import (
    AttributeCatalog,
    CausalLink,
    Trend,
    TrendedAttribute,
)
from causalcrowd.groundtruth import CredibilityMap, Provenance
from causalcrowd import io as ccio

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


def make_catalog(n_bases=6, version="test"):
    """Synthetic catalog with bases A, B, C, ... each in up/down trends."""
    attributes = []
    for i in range(n_bases):
        base = chr(ord("A") + i) if n_bases <= 26 else f"attr{i:02d}"
        attributes.append(
            TrendedAttribute(base=base, trend=Trend.UP, display=f"more {base}")
        )
        attributes.append(
            TrendedAttribute(base=base, trend=Trend.DOWN, display=f"less {base}")
        )
    return AttributeCatalog(attributes=tuple(attributes), version=version)


def make_cred(catalog, default=0, overrides=None):
    """Total credibility map: `default` everywhere except `overrides`."""
    overrides = overrides or {}
    scores = {}
    provenance = {}
    for link in catalog.valid_ordered_pairs():
        scores[link] = overrides.get(link, default)
        provenance[link] = Provenance.DELIBERATED
    return CredibilityMap(scores, provenance)


@pytest.fixture
def catalog():
    return make_catalog()


@pytest.fixture
def final_catalog():
    return ccio.load_catalog(DATA_DIR / "catalog_final.json")


@pytest.fixture
def formative_catalog():
    return ccio.load_catalog(DATA_DIR / "catalog_formative.json")


def L(catalog, cause_display, effect_display):
    return CausalLink(
        catalog.by_display(cause_display), catalog.by_display(effect_display)
    )


def make_agg(catalog, vote_map):
    """AggregatedNetwork from {(cause_display, effect_display): votes}."""
    from causalcrowd.metrics import AggregatedNetwork

    agg = AggregatedNetwork(contributing_networks=1)
    for (c, e), count in vote_map.items():
        agg.votes[L(catalog, c, e)] = count
    return agg


def solar_query(catalog, max_hops=4):
    """Bogus solar radiation vs true fossil fuel burning toward warming."""
    from causalcrowd.pathlab import IllusionQuery

    return IllusionQuery(
        bogus_causes=frozenset({catalog.by_display("increasing solar radiation")}),
        true_cause=catalog.by_display("more fossil fuel burning"),
        outcomes=frozenset(
            {
                catalog.by_display("increasing temperature"),
                catalog.by_display("more intense heatwaves"),
            }
        ),
        max_hops=max_hops,
    )


# Vote totals reproducing the two study rounds' aggregate networks around
# the solar radiation comparison.
FORMATIVE_VOTES = {
    ("increasing solar radiation", "more intense heatwaves"): 49,
    ("increasing solar radiation", "increasing temperature"): 46,
    ("more fossil fuel burning", "increasing emissions"): 16,
    ("increasing emissions", "increasing CO2"): 17,
    ("increasing CO2", "more trapped heat"): 18,
    ("more trapped heat", "increasing temperature"): 44,
}

FINAL_VOTES = {
    ("increasing solar radiation", "more intense heatwaves"): 3,
    ("increasing solar radiation", "increasing temperature"): 2,
    ("more fossil fuel burning", "increasing emissions"): 4,
    ("increasing emissions", "increasing CO2"): 8,
    ("more fossil fuel burning", "increasing CO2"): 4,
    ("increasing CO2", "more trapped heat"): 21,
    ("more trapped heat", "increasing temperature"): 22,
    ("increasing CO2", "increasing temperature"): 5,
    ("more fossil fuel burning", "increasing temperature"): 2,
}
