#include "lbs/api_server.hpp"

#include <httplib.h>

#include <cctype>
#include <charconv>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lbs/error.hpp"
#include "lbs/wire.hpp"

namespace lbs {

using nlohmann::json;

std::string_view to_string(ApiErrorCode code) noexcept {
  switch (code) {
    case ApiErrorCode::NotFound: return "NOT_FOUND";
    case ApiErrorCode::Validation: return "VALIDATION";
    case ApiErrorCode::Unauthorized: return "UNAUTHORIZED";
    case ApiErrorCode::NoRouteContext: return "NO_ROUTE_CONTEXT";
    case ApiErrorCode::Internal: return "INTERNAL";
  }
  return "INTERNAL";
}

int http_status(ApiErrorCode code) noexcept {
  switch (code) {
    case ApiErrorCode::NotFound: return 404;
    case ApiErrorCode::Validation: return 422;
    case ApiErrorCode::Unauthorized: return 401;
    case ApiErrorCode::NoRouteContext: return 400;
    case ApiErrorCode::Internal: return 500;
  }
  return 500;
}

namespace {

constexpr std::string_view kPrefix = "/api/v1";

/// Thrown inside handlers; converted to the error envelope in handle().
struct ApiFailure {
  ApiErrorCode code;
  std::string message;
  std::string field;
};

[[noreturn]] void fail(ApiErrorCode code, std::string message, std::string field = {}) {
  throw ApiFailure{code, std::move(message), std::move(field)};
}

HttpResponse json_response(int status, const json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump();
  r.headers["Content-Type"] = "application/json";
  return r;
}

HttpResponse error_response(const ApiFailure& f) {
  json err{{"code", std::string(to_string(f.code))}, {"message", f.message}};
  if (!f.field.empty()) err["field"] = f.field;
  return json_response(http_status(f.code), json{{"error", std::move(err)}});
}

ApiFailure from_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NotFound: return {ApiErrorCode::NotFound, e.what(), {}};
    case ErrorCode::Validation:
    case ErrorCode::OutOfRange:
    case ErrorCode::NotFinite: return {ApiErrorCode::Validation, e.what(), e.field()};
    case ErrorCode::Unauthorized: return {ApiErrorCode::Unauthorized, e.what(), {}};
    default: return {ApiErrorCode::Internal, "internal error", {}};
  }
}

bool valid_decimal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  const std::size_t int_start = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == int_start) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  const std::size_t frac_start = ++i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  const std::size_t frac = i - frac_start;
  return i == s.size() && frac >= 1 && frac <= 6;
}

std::optional<std::string> query_value(const HttpRequest& req, const std::string& key) {
  const auto it = req.query.find(key);
  if (it == req.query.end()) return std::nullopt;
  return it->second;
}

json parse_body(const HttpRequest& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) fail(ApiErrorCode::Validation, "request body must be a JSON object", "body");
  return body;
}

}  // namespace

geo::GeoPoint parse_lat_lon(std::string_view text, const std::string& field) {
  const auto comma = text.find(',');
  const auto bad = [&] {
    throw Error(ErrorCode::Validation, field + " must be \"lat,lon\" in decimal degrees with at most 6 decimals",
                field);
  };
  if (comma == std::string_view::npos) bad();
  const std::string_view lat_text = text.substr(0, comma);
  const std::string_view lon_text = text.substr(comma + 1);
  if (!valid_decimal(lat_text) || !valid_decimal(lon_text)) bad();
  double lat = 0.0;
  double lon = 0.0;
  std::from_chars(lat_text.data(), lat_text.data() + lat_text.size(), lat);
  std::from_chars(lon_text.data(), lon_text.data() + lon_text.size(), lon);
  try {
    return geo::make_point(lat, lon);
  } catch (const Error& e) {
    throw Error(ErrorCode::Validation, e.what(), field);
  }
}

ApiService::ApiService(std::shared_ptr<PoiStore> store, std::shared_ptr<const RoadGraph> graph,
                       CredentialStore credentials, ApiOptions options)
    : store_(std::move(store)),
      graph_(graph ? std::move(graph) : std::make_shared<const RoadGraph>()),
      credentials_(std::move(credentials)),
      options_(std::move(options)),
      sessions_(options_.clock, options_.token_ttl) {}

HttpResponse ApiService::handle(const HttpRequest& request) {
  HttpResponse response;
  try {
    response = dispatch(request);
  } catch (const ApiFailure& f) {
    response = error_response(f);
  } catch (const Error& e) {
    response = error_response(from_error(e));
  } catch (const std::exception&) {
    response = error_response({ApiErrorCode::Internal, "internal error", {}});
  }
  apply_cors(request, response);
  return response;
}

void ApiService::apply_cors(const HttpRequest& request, HttpResponse& response) const {
  if (options_.allowed_origin.empty()) return;
  const auto origin = request.headers.find("origin");
  if (options_.allowed_origin == "*") {
    response.headers["Access-Control-Allow-Origin"] = "*";
  } else if (origin != request.headers.end() && origin->second == options_.allowed_origin) {
    response.headers["Access-Control-Allow-Origin"] = origin->second;
    response.headers["Vary"] = "Origin";
  } else {
    return;
  }
  response.headers["Access-Control-Allow-Methods"] = "GET, POST, PUT, DELETE, OPTIONS";
  response.headers["Access-Control-Allow-Headers"] = "Authorization, Content-Type";
}

HttpResponse ApiService::dispatch(const HttpRequest& req) {
  const std::string_view path = req.path;
  if (path.substr(0, kPrefix.size()) != kPrefix) fail(ApiErrorCode::NotFound, "no such endpoint");
  const std::string_view rest = path.substr(kPrefix.size());
  const auto& m = req.method;

  if (m == "OPTIONS") return json_response(200, json::object());

  // "/pois/<id>" or "/admin/pois/<id>": a single non-empty segment after the prefix
  const auto tail_id = [&](std::string_view prefix) -> std::optional<std::string> {
    if (rest.size() <= prefix.size() || rest.substr(0, prefix.size()) != prefix) return std::nullopt;
    const std::string_view id = rest.substr(prefix.size());
    if (id.find('/') != std::string_view::npos) return std::nullopt;
    return std::string(id);
  };

  if (rest == "/health" && m == "GET") return get_health();
  if (rest == "/pois" && m == "GET") return get_pois(req);
  if (rest == "/route" && m == "GET") return get_route(req);
  if (rest == "/admin/login" && m == "POST") return login(req);
  if (rest == "/admin/pois" && m == "POST") return admin_create(req);
  if (auto id = tail_id("/pois/"); id && m == "GET") return get_poi(*id);
  if (auto id = tail_id("/admin/pois/")) {
    if (m == "PUT") return admin_update(*id, req);
    if (m == "DELETE") return admin_delete(*id, req);
  }
  fail(ApiErrorCode::NotFound, "no such endpoint");
}

HttpResponse ApiService::get_health() {
  const auto snap = store_->snapshot();
  return json_response(200, json{{"status", "ok"},
                                 {"pois", snap->catalog.pois.size()},
                                 {"revision", snap->catalog.revision}});
}

HttpResponse ApiService::get_pois(const HttpRequest& req) {
  std::optional<Category> category;
  if (const auto c = query_value(req, "category"); c && !c->empty()) {
    category = parse_category(*c);
    if (!category) fail(ApiErrorCode::Validation, "unknown category '" + *c + "'", "category");
  }
  const auto near_text = query_value(req, "near");
  const auto k_text = query_value(req, "k");

  const auto snap = store_->snapshot();
  json items = json::array();
  if (!near_text) {
    if (k_text) fail(ApiErrorCode::Validation, "k requires near", "k");
    for (const auto& poi : list_pois(snap->catalog, category)) items.push_back(wire::to_json(poi));
    return json_response(200, json{{"pois", std::move(items)}});
  }

  const geo::GeoPoint from = parse_lat_lon(*near_text, "near");
  std::size_t k = kDefaultNearK;
  if (k_text) {
    const auto& t = *k_text;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), k);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || k > kMaxNearK) {
      fail(ApiErrorCode::Validation, "k must be an integer between 0 and 10000", "k");
    }
  }
  // Rank everything, then filter, so a category filter still yields k results.
  const auto ranked = snap->index.k_nearest(from, category ? snap->index.size() : k);
  for (const auto& n : ranked) {
    if (items.size() == k) break;
    const Poi& poi = snap->catalog.pois.at(n.id);
    if (category && poi.category != *category) continue;
    json item = wire::to_json(poi);
    item["distance_m"] = n.distance.value();
    items.push_back(std::move(item));
  }
  return json_response(200, json{{"pois", std::move(items)}});
}

HttpResponse ApiService::get_poi(const std::string& id) {
  const auto snap = store_->snapshot();
  const auto it = snap->catalog.pois.find(id);
  if (it == snap->catalog.pois.end()) fail(ApiErrorCode::NotFound, "no POI with id '" + id + "'");
  return json_response(200, wire::to_json(it->second));
}

HttpResponse ApiService::get_route(const HttpRequest& req) {
  const auto from_text = query_value(req, "from");
  const auto to_poi = query_value(req, "to_poi");
  if (!from_text || !to_poi) {
    fail(ApiErrorCode::NoRouteContext, "route needs both from=<lat,lon> and to_poi=<id>");
  }
  const geo::GeoPoint from = parse_lat_lon(*from_text, "from");
  TravelMode mode = TravelMode::Walking;
  if (const auto m = query_value(req, "mode"); m && !m->empty()) {
    const auto parsed = parse_travel_mode(*m);
    if (!parsed) fail(ApiErrorCode::Validation, "mode must be walking or driving", "mode");
    mode = *parsed;
  }
  const auto snap = store_->snapshot();
  const auto it = snap->catalog.pois.find(*to_poi);
  if (it == snap->catalog.pois.end()) fail(ApiErrorCode::NotFound, "no POI with id '" + *to_poi + "'");
  return json_response(200, wire::to_json(route(*graph_, from, it->second.location, mode)));
}

HttpResponse ApiService::login(const HttpRequest& req) {
  const json body = parse_body(req);
  if (!body.contains("username") || !body["username"].is_string()) {
    fail(ApiErrorCode::Validation, "username must be a string", "username");
  }
  if (!body.contains("password") || !body["password"].is_string()) {
    fail(ApiErrorCode::Validation, "password must be a string", "password");
  }
  const auto username = body["username"].get<std::string>();
  if (!credentials_.verify(username, body["password"].get<std::string>())) {
    fail(ApiErrorCode::Unauthorized, "invalid username or password");
  }
  const Session s = sessions_.issue(username);
  return json_response(200, json{{"token", s.token}, {"expires_at", format_iso8601(s.expires_at)}});
}

void ApiService::require_admin(const HttpRequest& req) {
  constexpr std::string_view kScheme = "Bearer ";
  const auto h = req.headers.find("authorization");
  if (h == req.headers.end() || h->second.size() <= kScheme.size() ||
      std::string_view(h->second).substr(0, kScheme.size()) != kScheme ||
      !sessions_.authorize(h->second.substr(kScheme.size()))) {
    fail(ApiErrorCode::Unauthorized, "missing, invalid or expired bearer token");
  }
}

HttpResponse ApiService::admin_create(const HttpRequest& req) {
  require_admin(req);
  const json body = parse_body(req);
  return json_response(201, wire::to_json(store_->create(wire::draft_from_json(body))));
}

HttpResponse ApiService::admin_update(const std::string& id, const HttpRequest& req) {
  require_admin(req);
  const json body = parse_body(req);
  return json_response(200, wire::to_json(store_->update(id, wire::patch_from_json(body))));
}

HttpResponse ApiService::admin_delete(const std::string& id, const HttpRequest& req) {
  require_admin(req);
  store_->remove(id);
  return json_response(200, json{{"deleted", id}});
}

// ---------------------------------------------------------------------------
// HttpServer

HttpServer::HttpServer(std::shared_ptr<ApiService> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  const auto bridge = [svc = service_](const httplib::Request& in, httplib::Response& out) {
    HttpRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    for (const auto& [k, v] : in.headers) {
      std::string name = k;
      for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      req.headers.emplace(std::move(name), v);
    }
    req.body = in.body;
    HttpResponse res = svc->handle(req);
    out.status = res.status;
    std::string content_type = "application/json";
    for (const auto& [k, v] : res.headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        out.set_header(k, v);
      }
    }
    out.set_content(res.body, content_type);
  };
  server_->Get(".*", bridge);
  server_->Post(".*", bridge);
  server_->Put(".*", bridge);
  server_->Delete(".*", bridge);
  server_->Options(".*", bridge);
  server_->Patch(".*", bridge);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

int HttpServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  thread_ = std::thread([this] { listen(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace lbs
