"""Aggregation of building-level metrics onto the equal-area analysis grid.

Cells are half-open 100 m squares anchored at the projected origin, so cell
(i, j) covers [i*100, (i+1)*100) x [j*100, (j+1)*100) and every point
belongs to exactly one cell.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping

from .geometry import PlanePoint, point_in_polygon
from .levels import Surface

if TYPE_CHECKING:  # pragma: no cover
    from .ingest import Boundary, Building
    from .metrics import BuildingMetrics

DEFAULT_CELL_SIZE_M = 100.0


@dataclass(frozen=True, order=True)
class CellId:
    i: int
    j: int


@dataclass(frozen=True)
class CellAggregate:
    cell: CellId
    building_count: int
    mean_obstruction: float | None
    modal_surface: Surface | None


def cell_of(p: PlanePoint, cell_size: float = DEFAULT_CELL_SIZE_M) -> CellId:
    return CellId(math.floor(p.x / cell_size), math.floor(p.y / cell_size))


def aggregate(
    metrics: Iterable["BuildingMetrics"],
    buildings: Iterable["Building"],
    cell_size: float = DEFAULT_CELL_SIZE_M,
) -> dict[CellId, CellAggregate]:
    """Group metrics into cells by building centroid; mean counts, modal surface.

    Surfaces vote paved vs unpaved; unknowns abstain, and a tie (or a cell
    with only unknowns) resolves to unpaved so missing surface evidence never
    grants low deprivation.
    """
    centroids = {b.building_id: b.centroid for b in buildings}
    groups: dict[CellId, list["BuildingMetrics"]] = defaultdict(list)
    for m in sorted(metrics, key=lambda m: m.building_id):
        groups[cell_of(centroids[m.building_id], cell_size)].append(m)
    out: dict[CellId, CellAggregate] = {}
    for cell in sorted(groups):
        members = groups[cell]
        mean = sum(m.obstruction_count for m in members) / len(members)
        paved = sum(1 for m in members if m.nearest_surface is Surface.PAVED)
        unpaved = sum(1 for m in members if m.nearest_surface is Surface.UNPAVED)
        modal = Surface.PAVED if paved > unpaved else Surface.UNPAVED
        out[cell] = CellAggregate(cell, len(members), mean, modal)
    return out


def enumerate_empty_cells(
    boundary: "Boundary",
    occupied: Iterable[CellId] | Mapping[CellId, object],
    cell_size: float = DEFAULT_CELL_SIZE_M,
) -> list[CellId]:
    """Cells inside the boundary (by cell center) that contain no buildings."""
    occupied_set = set(occupied)
    min_x, min_y, max_x, max_y = boundary.polygon.bounds()
    i0 = math.floor(min_x / cell_size)
    i1 = math.floor(max_x / cell_size)
    j0 = math.floor(min_y / cell_size)
    j1 = math.floor(max_y / cell_size)
    empty: list[CellId] = []
    for i in range(i0, i1 + 1):
        cx = (i + 0.5) * cell_size
        for j in range(j0, j1 + 1):
            cell = CellId(i, j)
            if cell in occupied_set:
                continue
            if point_in_polygon(PlanePoint(cx, (j + 0.5) * cell_size), boundary.polygon):
                empty.append(cell)
    return empty
