"""Named example maps with expected verdicts.

The expected tuples are frozen from the brute-force composition oracle; the
self-test re-derives every one of them rather than trusting this table.
"""

from __future__ import annotations

from dataclasses import dataclass

from .homog import MapPoint
from .points import INFINITY, PPoint, pp


def _mp(p, q):
    return MapPoint.from_coeff_lists(p, q)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    map: MapPoint
    semistable: bool
    stable: bool
    in_Id: bool
    # list of (n, expected U_n membership, case tag or None, bad hole or None)
    verdicts: tuple


CATALOG = {
    # [X^2 Y : Y^3], cubic with a depth-1 fixed hole at infinity
    "G3": CatalogEntry(
        "G3",
        _mp([0, 0, 1, 0], [1, 0, 0, 0]),
        semistable=True,
        stable=False,
        in_Id=False,
        verdicts=(
            (2, True, "Case4", "inf"),
        ),
    ),
    # [X^2 Y : 0], the strictly semistable I(3) normal form
    "F3": CatalogEntry(
        "F3",
        _mp([0, 0, 1, 0], [0, 0, 0, 0]),
        semistable=True,
        stable=False,
        in_Id=True,
        verdicts=(),
    ),
    # [Y^3 : X^2 Y], induced map z^-2 with a period-2 hole at infinity;
    # the hole is not fixed, so the map itself is stable even though its
    # fifth iterate degenerates
    "M3": CatalogEntry(
        "M3",
        _mp([1, 0, 0, 0], [0, 0, 1, 0]),
        semistable=True,
        stable=True,
        in_Id=False,
        verdicts=(
            (4, False, None, None),
            (5, True, "Case5", "inf"),
        ),
    ),
    # [X^2 Y : X^3], induced map 1/z with a depth-2 hole at 0
    "P3": CatalogEntry(
        "P3",
        _mp([0, 0, 1, 0], [0, 0, 0, 1]),
        semistable=True,
        stable=False,
        in_Id=False,
        verdicts=(
            (2, True, "Case0", "0"),
            (3, True, "Case3", "0"),
        ),
    ),
    # [X^3 (X^2 - XY + Y^2) : X^3 Y^2], strictly preperiodic depth-3 hole
    "C1": CatalogEntry(
        "C1",
        _mp([0, 0, 0, 1, -1, 1], [0, 0, 0, 1, 0, 0]),
        semistable=True,
        stable=False,
        in_Id=False,
        verdicts=(
            (3, True, "Case1", "0"),
        ),
    ),
    # [X^4 (X - Y) : X^2 (X - Y) Y^2], superattracting fixed hole at 0
    "C2": CatalogEntry(
        "C2",
        _mp([0, 0, 0, 0, -1, 1], [0, 0, -1, 1, 0, 0]),
        semistable=True,
        stable=False,
        in_Id=False,
        verdicts=(
            (2, True, "Case2", "0"),
        ),
    ),
    # X Y (X - Y)^2 (X - 2Y) * [0 : 1], a stable member of I(5)
    "S5": CatalogEntry(
        "S5",
        _mp([0, 0, 0, 0, 0, 0], [0, 2, -5, 4, -1, 0]),
        semistable=True,
        stable=True,
        in_Id=True,
        verdicts=(),
    ),
}


def catalog_map(name: str) -> MapPoint:
    return CATALOG[name].map
