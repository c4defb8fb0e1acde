"""Road-network graph and shortest-path distances to supermarkets.

The network is an undirected weighted graph built from node/edge CSVs,
filtered to the road classes people actually walk or drive locally
(motorways are excluded by default). Distances to the nearest supermarket
come from a single multi-source Dijkstra pass seeded with every
supermarket's snap node, which is then shared by all tracts.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, SchemaError, SnapError
from .geometry import Polygon, ProjectedPoint, parts_area_centroid, point_in_polygon, project_lonlat

DEFAULT_ROAD_CLASSES = frozenset(
    {"residential", "living_street", "unclassified", "tertiary", "secondary", "primary"}
)

DEFAULT_SNAP_MAX_M = 500.0


def _node_sort_key(node_id: str) -> tuple[int, int, str]:
    # Numeric ids order numerically, everything else lexicographically.
    if node_id.isdigit():
        return (0, int(node_id), node_id)
    return (1, 0, node_id)


@dataclass
class RoadNetwork:
    """Undirected road graph: node coordinates plus adjacency with lengths."""

    nodes: dict[str, ProjectedPoint]
    adjacency: dict[str, list[tuple[str, float]]]

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.adjacency.values()) // 2


@dataclass
class NetworkDistanceResult:
    """Distance from one tract to its nearest supermarket, or unreachable."""

    tract_id: str
    distance_m: float | None

    @property
    def unreachable(self) -> bool:
        return self.distance_m is None


def build_network(
    edge_records: Iterable[tuple[str, str, float | None, str]],
    node_records: Mapping[str, ProjectedPoint],
    allowed_classes: frozenset[str] | set[str] = DEFAULT_ROAD_CLASSES,
) -> RoadNetwork:
    """Assemble the graph from parsed records, keeping only allowed classes.

    Edge records are (from_node, to_node, length_m, road_class); a None
    length means "use the Euclidean distance between the endpoints".
    Isolated nodes (no surviving edge) are dropped.
    """
    adjacency: dict[str, list[tuple[str, float]]] = {}
    for idx, (a, b, length, road_class) in enumerate(edge_records):
        if road_class not in allowed_classes:
            continue
        if a not in node_records or b not in node_records:
            missing = a if a not in node_records else b
            raise SchemaError(f"edge {idx}: references missing node {missing!r}")
        if length is None:
            pa, pb = node_records[a], node_records[b]
            length = math.hypot(pa.x - pb.x, pa.y - pb.y)
        if not (length > 0) or not math.isfinite(length):
            raise SchemaError(f"edge {idx} ({a}-{b}): non-positive length {length}")
        adjacency.setdefault(a, []).append((b, float(length)))
        adjacency.setdefault(b, []).append((a, float(length)))
    nodes = {nid: pt for nid, pt in node_records.items() if nid in adjacency}
    for nid in adjacency:
        adjacency[nid].sort(key=lambda e: (_node_sort_key(e[0]), e[1]))
    return RoadNetwork(nodes=nodes, adjacency=adjacency)


def load_road_nodes(
    path: str,
    ref_lon: float | None = None,
    ref_lat: float | None = None,
) -> dict[str, ProjectedPoint]:
    """Read the node CSV; header decides the coordinate convention.

    `node_id,x,y` is taken as projected meters; `node_id,lon,lat` is
    projected with the supplied reference point at ingest.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty node file")
        cols = [h.strip().lower() for h in header]
        if cols == ["node_id", "x", "y"]:
            geographic = False
        elif cols == ["node_id", "lon", "lat"]:
            geographic = True
            if ref_lon is None or ref_lat is None:
                raise SchemaError(f"{path}: lon/lat nodes need a projection reference")
        else:
            raise SchemaError(
                f"{path}: header must be node_id,x,y or node_id,lon,lat, got {header}"
            )
        nodes: dict[str, ProjectedPoint] = {}
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise SchemaError(f"{path} row {row_no}: expected 3 fields, got {len(row)}")
            nid = row[0].strip()
            if not nid:
                raise SchemaError(f"{path} row {row_no}: empty node_id")
            if nid in nodes:
                raise SchemaError(f"{path} row {row_no}: duplicate node_id {nid!r}")
            try:
                u, v = float(row[1]), float(row[2])
            except ValueError:
                raise SchemaError(f"{path} row {row_no}: non-numeric coordinates") from None
            if geographic:
                nodes[nid] = project_lonlat(u, v, ref_lon, ref_lat)
            else:
                nodes[nid] = ProjectedPoint(u, v)
    return nodes


def load_road_edges(path: str) -> list[tuple[str, str, float | None, str]]:
    """Read the edge CSV: from_node,to_node,length_m,road_class."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty edge file")
        cols = [h.strip().lower() for h in header]
        if cols != ["from_node", "to_node", "length_m", "road_class"]:
            raise SchemaError(
                f"{path}: header must be from_node,to_node,length_m,road_class, got {header}"
            )
        edges: list[tuple[str, str, float | None, str]] = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise SchemaError(f"{path} row {row_no}: expected 4 fields, got {len(row)}")
            a, b, raw_len, road_class = (c.strip() for c in row)
            if not a or not b:
                raise SchemaError(f"{path} row {row_no}: empty endpoint id")
            if raw_len == "":
                length: float | None = None
            else:
                try:
                    length = float(raw_len)
                except ValueError:
                    raise SchemaError(f"{path} row {row_no}: non-numeric length") from None
            edges.append((a, b, length, road_class))
    return edges


def snap_point(
    pt: ProjectedPoint, net: RoadNetwork, max_snap_m: float = DEFAULT_SNAP_MAX_M
) -> str:
    """Nearest network node by Euclidean distance; ties go to the lowest id."""
    if not net.nodes:
        raise DomainError("cannot snap onto an empty network")
    best_id: str | None = None
    best_d = math.inf
    for nid in sorted(net.nodes, key=_node_sort_key):
        npt = net.nodes[nid]
        d = math.hypot(pt.x - npt.x, pt.y - npt.y)
        if d < best_d:
            best_d = d
            best_id = nid
    assert best_id is not None
    if best_d > max_snap_m:
        raise SnapError(
            f"nearest node {best_id!r} is {best_d:.1f} m away (max {max_snap_m:.0f} m)"
        )
    return best_id


def multisource_shortest_distances(
    net: RoadNetwork, sources: set[str] | frozenset[str]
) -> dict[str, float]:
    """Shortest distance from every node to its nearest source.

    One Dijkstra pass over a heap initialised with all sources. Nodes with
    no path to any source are absent from the returned mapping.
    """
    if not sources:
        raise DomainError("source set is empty")
    missing = [s for s in sources if s not in net.adjacency]
    if missing:
        raise DomainError(f"source nodes not in network: {sorted(missing)}")
    dist: dict[str, float] = {s: 0.0 for s in sources}
    heap = [(0.0, _node_sort_key(s), s) for s in sources]
    heapq.heapify(heap)
    while heap:
        d, _, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, w in net.adjacency[u]:
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, _node_sort_key(v), v))
    return dist


def _grid_sample_points(parts: Sequence[Polygon], k: int) -> list[ProjectedPoint]:
    """Cell centers of a k x k grid over the bbox, kept if inside a part."""
    xmin = min(p.bounds()[0] for p in parts)
    ymin = min(p.bounds()[1] for p in parts)
    xmax = max(p.bounds()[2] for p in parts)
    ymax = max(p.bounds()[3] for p in parts)
    pts = []
    for j in range(k):
        for i in range(k):
            pt = ProjectedPoint(
                xmin + (i + 0.5) * (xmax - xmin) / k,
                ymin + (j + 0.5) * (ymax - ymin) / k,
            )
            if any(point_in_polygon(pt, part) for part in parts):
                pts.append(pt)
    return pts


def tract_network_distance(
    tract_id: str,
    parts: Sequence[Polygon],
    net: RoadNetwork,
    supermarket_nodes: set[str] | frozenset[str],
    mode: str = "centroid",
    *,
    max_snap_m: float = DEFAULT_SNAP_MAX_M,
    distances: Mapping[str, float] | None = None,
) -> NetworkDistanceResult:
    """Network distance from a tract to its nearest supermarket node.

    mode "centroid" uses the snapped area centroid; mode "grid-K" averages
    the distances at the snapped nodes of a K x K interior sample grid
    (sample points outside the polygon are discarded; if none remain the
    centroid is used). Unreachable samples are excluded from the mean; a
    tract with no reachable sample is flagged unreachable.

    Pass a precomputed `distances` map (from multisource_shortest_distances)
    to share one Dijkstra pass across tracts.
    """
    if distances is None:
        distances = multisource_shortest_distances(net, supermarket_nodes)
    _, centroid = parts_area_centroid(parts)
    if mode == "centroid":
        sample_points = [centroid]
    elif mode.startswith("grid-"):
        try:
            k = int(mode.split("-", 1)[1])
        except ValueError:
            raise DomainError(f"bad sampling mode {mode!r}") from None
        if k < 1:
            raise DomainError(f"grid size must be >= 1, got {k}")
        sample_points = _grid_sample_points(parts, k) or [centroid]
    else:
        raise DomainError(f"unknown sampling mode {mode!r}")
    values = []
    for pt in sample_points:
        node = snap_point(pt, net, max_snap_m)
        d = distances.get(node)
        if d is not None:
            values.append(d)
    if not values:
        return NetworkDistanceResult(tract_id=tract_id, distance_m=None)
    return NetworkDistanceResult(tract_id=tract_id, distance_m=sum(values) / len(values))
