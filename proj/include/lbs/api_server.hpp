#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include "lbs/auth.hpp"
#include "lbs/clock.hpp"
#include "lbs/poi_store.hpp"
#include "lbs/routing.hpp"

namespace httplib {
class Server;
}

namespace lbs {

/// Error codes carried in the `{"error": {...}}` envelope.
enum class ApiErrorCode { NotFound, Validation, Unauthorized, NoRouteContext, Internal };

std::string_view to_string(ApiErrorCode code) noexcept;
int http_status(ApiErrorCode code) noexcept;

/// Default `k` for nearest queries when only `near` is given.
inline constexpr std::size_t kDefaultNearK = 10;
inline constexpr std::size_t kMaxNearK = 10000;

/// Transport-neutral request; query values are already percent-decoded.
struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Parses "lat,lon" with at most six decimals per component.
/// Throws Error{Validation} with the given field name.
geo::GeoPoint parse_lat_lon(std::string_view text, const std::string& field);

struct ApiOptions {
  Clock clock = system_now;
  std::chrono::seconds token_ttl = kDefaultTokenTtl;
  /// Origin echoed in Access-Control-Allow-Origin; empty disables CORS, "*" allows any.
  std::string allowed_origin;
};

/// The /api/v1 endpoints over a POI store, road graph and admin credentials.
/// `handle` is safe to call from many threads at once.
class ApiService {
 public:
  ApiService(std::shared_ptr<PoiStore> store, std::shared_ptr<const RoadGraph> graph,
             CredentialStore credentials, ApiOptions options = {});

  HttpResponse handle(const HttpRequest& request);

  PoiStore& store() noexcept { return *store_; }

 private:
  HttpResponse dispatch(const HttpRequest& request);
  HttpResponse get_health();
  HttpResponse get_pois(const HttpRequest& request);
  HttpResponse get_poi(const std::string& id);
  HttpResponse get_route(const HttpRequest& request);
  HttpResponse login(const HttpRequest& request);
  HttpResponse admin_create(const HttpRequest& request);
  HttpResponse admin_update(const std::string& id, const HttpRequest& request);
  HttpResponse admin_delete(const std::string& id, const HttpRequest& request);
  void require_admin(const HttpRequest& request);
  void apply_cors(const HttpRequest& request, HttpResponse& response) const;

  std::shared_ptr<PoiStore> store_;
  std::shared_ptr<const RoadGraph> graph_;
  CredentialStore credentials_;
  ApiOptions options_;
  SessionManager sessions_;
};

/// Binds an ApiService to a socket via cpp-httplib.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<ApiService> service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free port) and returns the bound port.
  /// Throws std::runtime_error when binding fails.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop() is called.
  void listen();
  /// bind + listen on a background thread; returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  std::shared_ptr<ApiService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace lbs
