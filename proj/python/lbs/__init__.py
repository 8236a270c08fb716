"""Python bindings for the location service core.

Geodesy, the nearest-POI index, road routing, the POI store and the HTTP
request handler, all backed by the C++ library.
"""

from pathlib import Path

from ._lbs import (
    EARTH_RADIUS_M,
    PALEMBANG_BOX,
    SNAP_MAX_M,
    ApiService,
    BoundingBox,
    GeoPoint,
    LbsError,
    PoiStore,
    RoadGraph,
    SpatialIndex,
    add_admin_user,
    estimate_duration,
    haversine_distance,
    initial_bearing,
)

_DATA = Path(__file__).resolve().parent / "data"

#: The six shipped destinations, in the import format.
SEED_FIXTURE = _DATA / "seed_pois.json"
#: The shipped road network.
ROAD_GRAPH = _DATA / "roads.json"

__all__ = [
    "EARTH_RADIUS_M",
    "PALEMBANG_BOX",
    "SNAP_MAX_M",
    "ApiService",
    "BoundingBox",
    "GeoPoint",
    "LbsError",
    "PoiStore",
    "RoadGraph",
    "SpatialIndex",
    "add_admin_user",
    "estimate_duration",
    "haversine_distance",
    "initial_bearing",
    "SEED_FIXTURE",
    "ROAD_GRAPH",
]
