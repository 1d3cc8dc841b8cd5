import os
import random

import pytest
from hypothesis import HealthCheck, settings

from quotorbits.catalog import SELFTEST_CATALOG, catalog_group
from quotorbits.constructor import BehaviorSpec, build_system, random_spec
from quotorbits.dynsys import make_system
from quotorbits.torus_oracle import layer_system

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CASES = 50
SEED = 0

# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record_criterion():
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)

    return record


@pytest.fixture(scope="session")
def random_specs():
    """50 seeded specs per catalog group, same seeding as the CLI selftest."""
    out = []
    for name in SELFTEST_CATALOG:
        G = catalog_group(name)
        for k in range(CASES):
            rng = random.Random(f"{SEED}:{name}:{k}")
            out.append((name, k, random_spec(G, rng, max_count=3, max_n=4)))
    return out


@pytest.fixture(scope="session")
def random_systems(random_specs):
    return [(f"{name}#{k}", spec, build_system(spec)) for name, k, spec in random_specs]


def c2xc2_counterexample():
    """Two points swapped by T; one involution acts trivially, the other swaps them."""
    G = catalog_group("C2xC2")
    return make_system(G, [1, 0], {G.element("u"): [0, 1], G.element("v"): [1, 0]})


def glue_only_c2():
    """Two fixed points swapped by the group, no anchor."""
    G = catalog_group("C2")
    return build_system(BehaviorSpec(G, {(0, 1, 2, 1): 1}, allow_no_anchor=True))


def survive_shorten_d8():
    """Anchor plus one free orbit each shortening by 2 and by 4, all landing at n=1."""
    G = catalog_group("D8")
    return build_system(BehaviorSpec(G, {(7, 1, 1, 1): 1, (0, 2, 4, 1): 1, (0, 4, 2, 1): 1}))


def hand_examples():
    return {
        "c2xc2-counterexample": c2xc2_counterexample(),
        "c2-glue-only": glue_only_c2(),
        "d8-survive-shorten": survive_shorten_d8(),
    }


@pytest.fixture(scope="session")
def torus_layers():
    return {f"torus-layer-{n}": layer_system(n) for n in range(1, 7)}


@pytest.fixture(scope="session")
def corpus(random_systems, torus_layers):
    """Criterion 3 outputs, torus layers n <= 6 and the hand examples."""
    systems = {label: sys_ for label, _, sys_ in random_systems}
    systems.update(torus_layers)
    systems.update(hand_examples())
    return systems
