import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from quotorbits.catalog import ALL_NAMES, catalog_group
from quotorbits.formats import (
    group_from_json,
    group_to_json,
    load_group,
    read_pairs_csv,
    spec_from_json,
    spec_to_json,
    system_from_json,
    system_to_json,
    to_jsonable,
)
from quotorbits.group_core import GroupError

from .strategies import behavior_specs, equivariant_systems


@pytest.mark.parametrize("name", ALL_NAMES)
def test_group_json_round_trip(name):
    G = catalog_group(name)
    H = group_from_json(json.loads(json.dumps(group_to_json(G))))
    assert H.table == G.table and H.labels == G.labels


def test_group_json_errors(tmp_path):
    with pytest.raises(GroupError):
        group_from_json({"name": "x"})
    with pytest.raises(FileNotFoundError):
        load_group("NotAGroup", tmp_path)


@given(equivariant_systems())
def test_system_json_round_trip(sys_):
    doc = json.loads(json.dumps(system_to_json(sys_, sys_.group.name)))
    back = system_from_json(doc)
    assert np.array_equal(back.T, sys_.T)
    assert np.array_equal(back.full_action, sys_.full_action)


def test_system_json_length_checks():
    with pytest.raises(ValueError):
        system_from_json({"group": "C2", "points": 2, "T": [0]})
    with pytest.raises(ValueError):
        system_from_json({"group": "C2", "points": 1, "T": [0], "action": {"g": [0, 1]}})


@given(behavior_specs())
def test_spec_json_round_trip(spec):
    doc = json.loads(json.dumps(spec_to_json(spec, spec.group.name)))
    assert spec_from_json(doc).entries == spec.entries


def test_pairs_csv(tmp_path):
    p = tmp_path / "pairs.csv"
    p.write_text("n,a_n,b_n\n2,4,3\n1,1,1\n3,4,\n")
    assert read_pairs_csv(p) == ([1, 4, 4], [1, 3])
    p.write_text("1,1,1\n3,4,4\n")
    with pytest.raises(ValueError):
        read_pairs_csv(p)
    p.write_text("1,1,\n2,4,3\n")
    with pytest.raises(ValueError):
        read_pairs_csv(p)


def test_to_jsonable():
    obj = {1: (np.int64(3), Fraction(1, 2), Fraction(4)), "a": np.arange(2)}
    assert to_jsonable(obj) == {"1": [3, "1/2", 4], "a": [0, 1]}
