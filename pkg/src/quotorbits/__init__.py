"""Periodic orbits of finite systems and of their quotients by finite group actions."""

from .catalog import ALL_NAMES, SELFTEST_CATALOG, catalog_group
from .constructor import BehaviorSpec, build_system, predicted_counts, random_spec, verify_construction
from .dynsys import FiniteDynSystem, make_system, period_counts, validate_system
from .group_core import (
    FiniteGroup,
    conjugacy_classes_of_subgroups,
    enumerate_subgroups,
    make_group_from_cayley,
    make_group_from_permutations,
    sigma_table,
)
from .quotient import (
    behavior_census,
    build_quotient,
    check_bounds,
    classify_orbit,
    growth_estimate,
    lemma_suite,
)
from .realizer import SequencePair, corollary12_instance, realize_and_verify, split_sequences

__all__ = [
    "ALL_NAMES",
    "SELFTEST_CATALOG",
    "catalog_group",
    "BehaviorSpec",
    "build_system",
    "predicted_counts",
    "random_spec",
    "verify_construction",
    "FiniteDynSystem",
    "make_system",
    "period_counts",
    "validate_system",
    "FiniteGroup",
    "conjugacy_classes_of_subgroups",
    "enumerate_subgroups",
    "make_group_from_cayley",
    "make_group_from_permutations",
    "sigma_table",
    "behavior_census",
    "build_quotient",
    "check_bounds",
    "classify_orbit",
    "growth_estimate",
    "lemma_suite",
    "SequencePair",
    "corollary12_instance",
    "realize_and_verify",
    "split_sequences",
]
