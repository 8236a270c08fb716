#include "lbs/wire.hpp"

#include "lbs/error.hpp"

namespace lbs::wire {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::Validation, message, field);
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) invalid(key, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::string require_string(const json& j, const char* key, const std::string& field) {
  const json& v = require(j, key);
  if (!v.is_string()) invalid(field, std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

double require_number(const json& j, const char* key, const std::string& field) {
  const json& v = require(j, key);
  if (!v.is_number()) invalid(field, std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

Timestamp require_time(const json& j, const char* key) {
  const auto text = require_string(j, key, key);
  const auto t = parse_iso8601(text);
  if (!t) invalid(key, std::string("\"") + key + "\" is not an ISO 8601 UTC timestamp");
  return *t;
}

}  // namespace

json to_json(geo::GeoPoint p) { return json{{"lat", p.lat()}, {"lon", p.lon()}}; }

json to_json(const Poi& poi) {
  return json{{"id", poi.id},
              {"name", poi.name},
              {"description", poi.description},
              {"category", std::string(to_string(poi.category))},
              {"lat", poi.location.lat()},
              {"lon", poi.location.lon()},
              {"created_at", format_iso8601(poi.created_at)},
              {"updated_at", format_iso8601(poi.updated_at)}};
}

Poi poi_from_json(const json& j) {
  if (!j.is_object()) invalid("", "POI record must be a JSON object");
  const std::string id = require_string(j, "id", "id");
  const Timestamp created = require_time(j, "created_at");
  const Timestamp updated = require_time(j, "updated_at");
  PoiDraft draft = draft_from_json(j);
  Poi poi = validate_draft(draft, id, created);
  // validate_draft trims; a stored record must already be canonical
  if (poi.name != draft.name) invalid("name", "stored name has surrounding whitespace");
  poi.updated_at = updated;
  if (poi.updated_at < poi.created_at) invalid("updated_at", "updated_at precedes created_at");
  return poi;
}

json to_json(const RouteResult& route) {
  json polyline = json::array();
  for (const auto& p : route.polyline) polyline.push_back(to_json(p));
  return json{{"polyline", std::move(polyline)},
              {"distance_m", route.distance.value()},
              {"duration_s", route.duration_s},
              {"mode", std::string(to_string(route.mode))},
              {"kind", std::string(to_string(route.kind))}};
}

RouteResult route_from_json(const json& j) {
  if (!j.is_object()) invalid("", "route must be a JSON object");
  RouteResult r;
  const json& poly = require(j, "polyline");
  if (!poly.is_array()) invalid("polyline", "\"polyline\" must be an array");
  for (const auto& p : poly) {
    try {
      r.polyline.push_back(geo::make_point(require_number(p, "lat", "polyline"), require_number(p, "lon", "polyline")));
    } catch (const Error& e) {
      invalid("polyline", e.what());
    }
  }
  r.distance = geo::Meters(require_number(j, "distance_m", "distance_m"));
  r.duration_s = require_number(j, "duration_s", "duration_s");
  const auto mode = parse_travel_mode(require_string(j, "mode", "mode"));
  if (!mode) invalid("mode", "unknown mode");
  r.mode = *mode;
  const auto kind = parse_route_kind(require_string(j, "kind", "kind"));
  if (!kind) invalid("kind", "unknown kind");
  r.kind = *kind;
  return r;
}

PoiDraft draft_from_json(const json& j) {
  if (!j.is_object()) invalid("", "POI must be a JSON object");
  PoiDraft d;
  d.name = require_string(j, "name", "name");
  d.description = j.contains("description") ? require_string(j, "description", "description") : std::string{};
  d.category = j.contains("category") ? require_string(j, "category", "category") : std::string("nature");
  d.lat = require_number(j, "lat", "location");
  d.lon = require_number(j, "lon", "location");
  return d;
}

PoiPatch patch_from_json(const json& j) {
  if (!j.is_object()) invalid("", "update must be a JSON object");
  PoiPatch p;
  if (j.contains("name")) p.name = require_string(j, "name", "name");
  if (j.contains("description")) p.description = require_string(j, "description", "description");
  if (j.contains("category")) p.category = require_string(j, "category", "category");
  if (j.contains("lat")) p.lat = require_number(j, "lat", "location");
  if (j.contains("lon")) p.lon = require_number(j, "lon", "location");
  return p;
}

}  // namespace lbs::wire
