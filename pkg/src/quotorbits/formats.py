"""JSON and CSV file formats for groups, systems, behavior specs and censuses."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .group_core import FiniteGroup, GroupError, make_group_from_cayley, make_group_from_permutations


def group_from_json(obj: dict) -> FiniteGroup:
    name = obj.get("name", "")
    if "cayley" in obj:
        return make_group_from_cayley(obj["cayley"], labels=obj.get("labels"), name=name)
    if "perm" in obj:
        p = obj["perm"]
        return make_group_from_permutations(p["degree"], p["generators"], labels=p.get("labels"), name=name)
    raise GroupError('group file needs a "cayley" or "perm" entry')


def group_to_json(G: FiniteGroup) -> dict:
    return {"name": G.name, "cayley": [list(r) for r in G.table], "labels": list(G.labels)}


def load_group(ref: Any, base: Optional[Path] = None) -> FiniteGroup:
    """Group from an inline JSON object, a file path, or a bundled catalog name."""
    from .catalog import ALL_NAMES, catalog_group

    if isinstance(ref, dict):
        return group_from_json(ref)
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    if path.exists():
        return group_from_json(json.loads(path.read_text()))
    if str(ref) in ALL_NAMES:
        return catalog_group(str(ref))
    raise FileNotFoundError(f"no group file or catalog group named {ref!r}")


# --- systems ---------------------------------------------------------------


def system_from_json(obj: dict, base: Optional[Path] = None):
    from .dynsys import make_system

    G = load_group(obj["group"], base)
    k = int(obj["points"])
    T = obj["T"]
    if len(T) != k:
        raise ValueError(f"T has {len(T)} entries, expected {k}")
    action = {}
    for label, row in obj.get("action", {}).items():
        if len(row) != k:
            raise ValueError(f"action of {label!r} has {len(row)} entries, expected {k}")
        action[G.element(label)] = row
    return make_system(G, T, action or None, obj.get("point_labels"))


def system_to_json(sys, group_ref: Any = None) -> dict:
    G = sys.group
    return {
        "group": group_ref if group_ref is not None else group_to_json(G),
        "points": sys.size,
        "T": sys.T.tolist(),
        "action": {G.labels[g]: row.tolist() for g, row in zip(sys.action_elements, sys.action_tables)},
    }


def load_system(path: Path):
    path = Path(path)
    return system_from_json(json.loads(path.read_text()), path.parent)


# --- behavior specs --------------------------------------------------------


def spec_from_json(obj: dict, base: Optional[Path] = None, group: Optional[FiniteGroup] = None):
    from .constructor import BehaviorSpec
    from .group_core import conjugacy_classes_of_subgroups

    G = group if group is not None else load_group(obj["group"], base)
    classes = conjugacy_classes_of_subgroups(G)
    entries = {}
    for e in obj.get("entries", []):
        cid = classes.class_of_elements(_elements(G, e["class"]))
        key = (cid, int(e["delta"]), int(e["theta"]), int(e["n"]))
        entries[key] = entries.get(key, 0) + int(e["count"])
    return BehaviorSpec(G, entries, allow_no_anchor=bool(obj.get("allow_no_anchor", False)))


def _elements(G: FiniteGroup, items: Sequence) -> list[int]:
    return [G.element(x) if isinstance(x, str) else int(x) for x in items]


def spec_to_json(spec, group_ref: Any = None) -> dict:
    from .group_core import conjugacy_classes_of_subgroups

    classes = conjugacy_classes_of_subgroups(spec.group)
    return {
        "group": group_ref if group_ref is not None else group_to_json(spec.group),
        "entries": [
            {"class": list(classes[c].representative.elements), "delta": d, "theta": t, "n": n, "count": b}
            for (c, d, t, n), b in sorted(spec.entries.items())
        ],
        "allow_no_anchor": spec.allow_no_anchor,
    }


def load_spec(path: Path, group: Optional[FiniteGroup] = None):
    path = Path(path)
    return spec_from_json(json.loads(path.read_text()), path.parent, group)


# --- CSV -------------------------------------------------------------------


def read_pairs_csv(path: Path) -> tuple[list[int], list[int]]:
    """Rows (n, a_n, b_n) with n = 1, 2, ...; a header row is optional.

    Trailing rows may leave b_n empty so that a_n extends past the last b_n.
    """
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            cells = [c.strip() for c in row]
            if not cells or not cells[0] or not cells[0].lstrip("-").isdigit():
                continue
            b = int(cells[2]) if len(cells) > 2 and cells[2] else None
            rows.append((int(cells[0]), int(cells[1]), b))
    rows.sort()
    if [r[0] for r in rows] != list(range(1, len(rows) + 1)):
        raise ValueError("pairs CSV must list n = 1, 2, ... without gaps")
    b = [r[2] for r in rows]
    M = b.index(None) if None in b else len(b)
    if any(v is not None for v in b[M:]):
        raise ValueError("b_n may only be left empty on trailing rows")
    return [r[1] for r in rows], b[:M]


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays, Fractions and tuples for json.dumps."""
    from fractions import Fraction

    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    return obj
