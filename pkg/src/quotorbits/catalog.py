"""Bundled small groups."""

from __future__ import annotations

import functools
import json
from importlib import resources

from .group_core import FiniteGroup

SELFTEST_CATALOG = ("C2", "C3", "C4", "C2xC2", "S3", "D8", "Q8")
ALL_NAMES = SELFTEST_CATALOG + ("A4",)


@functools.cache
def catalog_group(name: str) -> FiniteGroup:
    from .formats import group_from_json

    if name not in ALL_NAMES:
        raise KeyError(f"no bundled group {name!r}; choose from {', '.join(ALL_NAMES)}")
    text = resources.files("quotorbits.data").joinpath(f"{name}.json").read_text()
    return group_from_json(json.loads(text))
