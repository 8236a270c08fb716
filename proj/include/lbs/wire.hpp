#pragma once

#include <nlohmann/json.hpp>

#include "lbs/poi_store.hpp"
#include "lbs/routing.hpp"

namespace lbs::wire {

using nlohmann::json;

/// {"id","name","description","category","lat","lon","created_at","updated_at"}
json to_json(const Poi& poi);

/// Strict inverse of to_json. Throws Error{Validation} describing the first
/// problem found; callers rewrap it for their own context.
Poi poi_from_json(const json& j);

/// {"polyline":[{"lat","lon"}...],"distance_m","duration_s","mode","kind"}
json to_json(const RouteResult& route);
RouteResult route_from_json(const json& j);

json to_json(geo::GeoPoint p);

/// Draft from a request or fixture object. Missing required keys or wrong
/// types throw Error{Validation} with the offending field.
PoiDraft draft_from_json(const json& j);
PoiPatch patch_from_json(const json& j);

}  // namespace lbs::wire
