"""Load tract geometries, provider points and demographics; build the
ten-variable analysis table.

Inputs are deliberately plain: a GeoJSON FeatureCollection for tracts, and
comma-delimited UTF-8 CSVs with mandatory headers for everything else.
Tracts with any missing or unreachable value are dropped with an audit
reason rather than imputed.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateGeometry,
    DomainError,
    EmptyTableError,
    RangeError,
    SchemaError,
    SnapError,
)
from .geometry import (
    BufferSpec,
    Polygon,
    ProjectedPoint,
    availability_count,
    parts_area_centroid,
    project_lonlat,
)
from .network import (
    RoadNetwork,
    multisource_shortest_distances,
    snap_point,
    tract_network_distance,
)

log = logging.getLogger(__name__)

# Column order of the variable table; everything downstream relies on it.
VARIABLE_COLUMNS = (
    "AV_INT",
    "AV_POP",
    "ACE_NET",
    "ACE_NV",
    "ACE_ELD",
    "ACE_DIS",
    "AFF_POV",
    "AFF_UNEMP",
    "ACO_ENG",
    "ACO_SNAP",
)

# Demographic CSV columns, in header order. AV_POP is a density; the rest
# are percentages in [0, 100].
DEMOGRAPHIC_COLUMNS = (
    "AV_POP",
    "ACE_NV",
    "ACE_ELD",
    "ACE_DIS",
    "AFF_POV",
    "AFF_UNEMP",
    "ACO_ENG",
    "ACO_SNAP",
)

PERCENT_COLUMNS = frozenset(DEMOGRAPHIC_COLUMNS) - {"AV_POP"}

# Default buffer radius per provider kind, meters.
KIND_RADII = {
    "supermarket": 3000.0,
    "grocery_large": 1600.0,
    "grocery_small": 800.0,
    "produce_cart": 500.0,
    "farmers_market": 1000.0,
}


@dataclass
class TractGeometry:
    """A census tract: id, projected polygon parts, and the raw GeoJSON
    geometry kept around so outputs can echo the input coordinates."""

    tract_id: str
    parts: list[Polygon]
    source_geometry: dict | None = None

    def centroid(self) -> ProjectedPoint:
        return parts_area_centroid(self.parts)[1]


@dataclass
class ProviderPoint:
    """A food provider with its service-buffer radius."""

    id: str
    kind: str
    location: ProjectedPoint
    radius_m: float

    @property
    def buffer(self) -> BufferSpec:
        return BufferSpec(self.radius_m)


@dataclass
class DemographicRecord:
    """One tract's demographic row; missing cells stay None, never zero."""

    tract_id: str
    values: dict[str, float | None]


@dataclass
class VariableTable:
    """tract x 10 analysis matrix plus the drop audit."""

    tract_ids: list[str]
    values: np.ndarray  # shape (n, 10), columns per VARIABLE_COLUMNS
    dropped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.tract_ids)

    def column(self, name: str) -> np.ndarray:
        return self.values[:, VARIABLE_COLUMNS.index(name)]


def _project_ring(ring, ref_lon: float, ref_lat: float) -> list[ProjectedPoint]:
    return [project_lonlat(lon, lat, ref_lon, ref_lat) for lon, lat in ring]


def _feature_polygons(
    geometry: dict, ref_lon: float, ref_lat: float, context: str
) -> list[Polygon]:
    gtype = geometry.get("type")
    if gtype == "Polygon":
        ring_sets = [geometry["coordinates"]]
    elif gtype == "MultiPolygon":
        ring_sets = geometry["coordinates"]
    else:
        raise SchemaError(f"{context}: unsupported geometry type {gtype!r}")
    parts = []
    for rings in ring_sets:
        try:
            parts.append(
                Polygon([_project_ring(ring, ref_lon, ref_lat) for ring in rings])
            )
        except DegenerateGeometry as exc:
            raise DegenerateGeometry(f"{context}: {exc}") from None
    return parts


def load_tracts(path: str, ref_lon: float, ref_lat: float) -> list[TractGeometry]:
    """Read a FeatureCollection of Polygon/MultiPolygon tracts.

    Every feature needs a unique `tract_id` property. Geometries are
    projected into local meters about (ref_lon, ref_lat); a degenerate ring
    fails with the tract id attached.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise SchemaError(f"{path}: expected a FeatureCollection")
    tracts: list[TractGeometry] = []
    seen: set[str] = set()
    for idx, feature in enumerate(doc.get("features", [])):
        props = feature.get("properties") or {}
        tract_id = props.get("tract_id")
        if tract_id is None:
            raise SchemaError(f"{path}: feature {idx} has no tract_id property")
        tract_id = str(tract_id)
        if tract_id in seen:
            raise SchemaError(f"{path}: duplicate tract_id {tract_id!r}")
        seen.add(tract_id)
        geometry = feature.get("geometry") or {}
        parts = _feature_polygons(geometry, ref_lon, ref_lat, f"tract {tract_id}")
        # validate areas up front so bad rings fail at load time with context
        for part in parts:
            try:
                parts_area_centroid([part])
            except DegenerateGeometry as exc:
                raise DegenerateGeometry(f"tract {tract_id}: {exc}") from None
        tracts.append(
            TractGeometry(tract_id=tract_id, parts=parts, source_geometry=geometry)
        )
    return tracts


def load_providers(path: str, ref_lon: float, ref_lat: float) -> list[ProviderPoint]:
    """Read the provider CSV: id,kind,lon,lat[,radius_m].

    An empty radius falls back to the kind default. A bare `grocery` kind
    (no size class) is treated as grocery_large with a logged warning.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty provider file")
        cols = [h.strip().lower() for h in header]
        if cols not in (["id", "kind", "lon", "lat"], ["id", "kind", "lon", "lat", "radius_m"]):
            raise SchemaError(
                f"{path}: header must be id,kind,lon,lat[,radius_m], got {header}"
            )
        has_radius = len(cols) == 5
        providers: list[ProviderPoint] = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(cols):
                raise SchemaError(
                    f"{path} row {row_no}: expected {len(cols)} fields, got {len(row)}"
                )
            pid, kind = row[0].strip(), row[1].strip()
            if kind == "grocery":
                log.warning(
                    "%s row %d: provider %s has no grocery size class; assuming grocery_large",
                    path,
                    row_no,
                    pid,
                )
                kind = "grocery_large"
            if kind not in KIND_RADII:
                raise SchemaError(f"{path} row {row_no}: unknown provider kind {kind!r}")
            try:
                lon, lat = float(row[2]), float(row[3])
            except ValueError:
                raise SchemaError(f"{path} row {row_no}: non-numeric coordinates") from None
            raw_radius = row[4].strip() if has_radius else ""
            if raw_radius:
                try:
                    radius = float(raw_radius)
                except ValueError:
                    raise SchemaError(f"{path} row {row_no}: non-numeric radius") from None
                if radius <= 0:
                    raise RangeError(f"{path} row {row_no}: radius must be > 0")
            else:
                radius = KIND_RADII[kind]
            providers.append(
                ProviderPoint(
                    id=pid,
                    kind=kind,
                    location=project_lonlat(lon, lat, ref_lon, ref_lat),
                    radius_m=radius,
                )
            )
    return providers


def load_demographics(path: str) -> list[DemographicRecord]:
    """Read the demographic CSV; empty cells become missing values.

    Percent columns must land in [0, 100] and AV_POP must be nonnegative,
    otherwise RangeError names the tract.
    """
    expected = ["tract_id", *DEMOGRAPHIC_COLUMNS]
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty demographics file")
        cols = [h.strip() for h in header]
        if cols != expected:
            raise SchemaError(f"{path}: header must be {','.join(expected)}, got {header}")
        records: list[DemographicRecord] = []
        seen: set[str] = set()
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected):
                raise SchemaError(
                    f"{path} row {row_no}: expected {len(expected)} fields, got {len(row)}"
                )
            tract_id = row[0].strip()
            if tract_id in seen:
                raise SchemaError(f"{path} row {row_no}: duplicate tract_id {tract_id!r}")
            seen.add(tract_id)
            values: dict[str, float | None] = {}
            for name, cell in zip(DEMOGRAPHIC_COLUMNS, row[1:]):
                cell = cell.strip()
                if cell == "":
                    values[name] = None
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise SchemaError(
                        f"{path} row {row_no}: non-numeric {name} for tract {tract_id}"
                    ) from None
                if name in PERCENT_COLUMNS and not (0.0 <= v <= 100.0):
                    raise RangeError(
                        f"tract {tract_id}: {name}={v} outside [0, 100]"
                    )
                if name == "AV_POP" and v < 0:
                    raise RangeError(f"tract {tract_id}: AV_POP={v} is negative")
                values[name] = v
            records.append(DemographicRecord(tract_id=tract_id, values=values))
    return records


def assemble_variable_table(
    tracts: list[TractGeometry],
    providers: list[ProviderPoint],
    net: RoadNetwork,
    demographics: list[DemographicRecord],
    *,
    ace_net_mode: str = "centroid",
    max_snap_m: float = 500.0,
) -> VariableTable:
    """Join geometry, network and demographics into the n x 10 matrix.

    AV_INT counts provider-buffer intersections, ACE_NET comes from one
    shared multi-source Dijkstra pass over the supermarket snap nodes, and
    the demographic columns join by tract_id. Tracts with any missing or
    unreachable value land in `dropped` with a reason; rows are ordered by
    tract_id so the output is independent of input file order.
    """
    supermarkets = [p for p in providers if p.kind == "supermarket"]
    if not supermarkets:
        raise DomainError("no supermarket providers; ACE_NET is undefined")
    sources = set()
    for p in supermarkets:
        try:
            sources.add(snap_point(p.location, net, max_snap_m))
        except SnapError as exc:
            raise SnapError(f"supermarket {p.id}: {exc}") from None
    distances = multisource_shortest_distances(net, sources)

    demo_by_id = {rec.tract_id: rec for rec in demographics}
    buffered = [(p.location, p.buffer) for p in providers]

    retained_ids: list[str] = []
    rows: list[list[float]] = []
    dropped: list[tuple[str, str]] = []
    for tract in sorted(tracts, key=lambda t: t.tract_id):
        rec = demo_by_id.get(tract.tract_id)
        if rec is None:
            dropped.append((tract.tract_id, "missing demographics"))
            continue
        missing = [name for name in DEMOGRAPHIC_COLUMNS if rec.values[name] is None]
        if missing:
            dropped.append((tract.tract_id, f"missing {missing[0]}"))
            continue
        result = tract_network_distance(
            tract.tract_id,
            tract.parts,
            net,
            sources,
            ace_net_mode,
            max_snap_m=max_snap_m,
            distances=distances,
        )
        if result.unreachable:
            dropped.append((tract.tract_id, "unreachable"))
            continue
        av_int = availability_count(tract.parts, buffered)
        row = [float(av_int)]
        row.append(rec.values["AV_POP"])
        row.append(result.distance_m)
        for name in ("ACE_NV", "ACE_ELD", "ACE_DIS", "AFF_POV", "AFF_UNEMP", "ACO_ENG", "ACO_SNAP"):
            row.append(rec.values[name])
        retained_ids.append(tract.tract_id)
        rows.append(row)
    for tract_id, reason in dropped:
        log.warning("dropping tract %s: %s", tract_id, reason)
    if not rows:
        raise EmptyTableError("all tracts were dropped; nothing to analyze")
    return VariableTable(
        tract_ids=retained_ids,
        values=np.array(rows, dtype=float),
        dropped=dropped,
    )
