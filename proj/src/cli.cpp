#include "lbs/cli.hpp"

#include <fcntl.h>
#include <pthread.h>
#include <termios.h>
#include <unistd.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lbs/api_server.hpp"
#include "lbs/auth.hpp"
#include "lbs/error.hpp"
#include "lbs/poi_store.hpp"
#include "lbs/routing.hpp"
#include "lbs/wire.hpp"

#ifndef LBS_DEFAULT_FIXTURE
#define LBS_DEFAULT_FIXTURE "fixtures/seed_pois.json"
#endif
#ifndef LBS_DEFAULT_GRAPH
#define LBS_DEFAULT_GRAPH "fixtures/roads.json"
#endif

namespace lbs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kStoreFile = "pois.json";
constexpr const char* kUsersFile = "users.json";

struct Options {
  std::string data_dir = "data";
  std::string graph = LBS_DEFAULT_GRAPH;
  bool json_output = false;

  // serve
  std::string listen = "127.0.0.1:8080";
  std::string allowed_origin;
  long long token_ttl_s = kDefaultTokenTtl.count();
  bool no_seed = false;
  std::string fixture = LBS_DEFAULT_FIXTURE;

  // admin add-user
  std::string username;

  // nearest / route
  std::string at;
  long long k = static_cast<long long>(kDefaultNearK);
  std::string from;
  std::string to_poi;
  std::string mode = "walking";

  // import
  std::string import_file;
};

/// Fills options the user did not pass on the command line from LBS_* variables.
void apply_env(const CLI::App& app, const CLI::App& serve, Options& o, const Environment& env) {
  const auto from_env = [&](const CLI::App& scope, const char* flag, const char* var, auto& target) {
    if (scope.count(flag) > 0 || !env.getenv) return;
    if (const auto v = env.getenv(var); v && !v->empty()) {
      if constexpr (std::is_same_v<std::decay_t<decltype(target)>, std::string>) {
        target = *v;
      } else {
        try {
          target = std::stoll(*v);
        } catch (const std::exception&) {
          throw Error(ErrorCode::Validation, std::string(var) + " must be an integer");
        }
      }
    }
  };
  from_env(app, "--data-dir", "LBS_DATA_DIR", o.data_dir);
  from_env(app, "--graph", "LBS_GRAPH", o.graph);
  from_env(serve, "--listen", "LBS_LISTEN", o.listen);
  from_env(serve, "--allowed-origin", "LBS_ALLOWED_ORIGIN", o.allowed_origin);
  from_env(serve, "--token-ttl", "LBS_TOKEN_TTL", o.token_ttl_s);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create data directory " + dir + ": " + ec.message());
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::Validation, "--listen must be host:port");
  }
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(listen.substr(colon + 1), &used);
    if (used != listen.size() - colon - 1) port = -1;
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::Validation, "--listen port must be 0-65535");
  return {listen.substr(0, colon), port};
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err, const Environment& env) {
  ensure_dir(o.data_dir);
  auto store = std::make_shared<PoiStore>(fs::path(o.data_dir) / kStoreFile, PoiStore::Options{env.clock, random_uuid});
  {
    const auto snap = store->snapshot();
    if (!o.no_seed && snap->catalog.pois.empty() && snap->catalog.revision == 0) {
      store->seed(o.fixture);
      err << "seeded " << store->snapshot()->catalog.pois.size() << " POIs from " << o.fixture << "\n";
    }
  }
  auto graph = std::make_shared<const RoadGraph>(load_graph(o.graph));
  const auto [host, port] = split_listen(o.listen);
  if (o.token_ttl_s <= 0) throw Error(ErrorCode::Validation, "--token-ttl must be positive");

  ApiOptions api{env.clock, std::chrono::seconds(o.token_ttl_s), o.allowed_origin};
  auto service = std::make_shared<ApiService>(store, graph, CredentialStore(fs::path(o.data_dir) / kUsersFile), api);

  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &stop_signals, &previous);

  HttpServer server(service);
  int bound = 0;
  try {
    bound = server.bind(host, port);
  } catch (const std::exception& e) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    err << "error: " << e.what() << "\n";
    return 1;
  }
  out << "listening on http://" << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    server.stop();
  });
  server.listen();
  // listen() can also return on its own; wake the waiter if so.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  err << "server stopped\n";
  return 0;
}

int cmd_add_user(const Options& o, std::ostream& out, std::ostream& err, const Environment& env) {
  std::optional<std::string> password;
  if (env.getenv) password = env.getenv("LBS_ADMIN_PASSWORD");
  if (!password && env.read_password) {
    password = env.read_password("Password for " + o.username + ": ");
    if (password) {
      const auto again = env.read_password("Repeat password: ");
      if (!again || *again != *password) {
        err << "error: passwords do not match\n";
        return 1;
      }
    }
  }
  if (!password) {
    err << "error: no password given; set LBS_ADMIN_PASSWORD or run from a terminal\n";
    return 1;
  }
  ensure_dir(o.data_dir);
  CredentialStore(fs::path(o.data_dir) / kUsersFile).add_user(o.username, *password);
  out << "added admin user " << o.username << "\n";
  return 0;
}

int cmd_nearest(const Options& o, std::ostream& out, std::ostream&) {
  const geo::GeoPoint at = parse_lat_lon(o.at, "--at");
  if (o.k < 0) throw Error(ErrorCode::Validation, "-k must be non-negative");
  const Catalog catalog = load_catalog(fs::path(o.data_dir) / kStoreFile);
  const auto hits = build_index(catalog).k_nearest(at, static_cast<std::size_t>(o.k));

  if (o.json_output) {
    json items = json::array();
    for (const auto& h : hits) {
      json item = wire::to_json(catalog.pois.at(h.id));
      item["distance_m"] = h.distance.value();
      items.push_back(std::move(item));
    }
    out << json{{"pois", std::move(items)}}.dump() << "\n";
    return 0;
  }
  for (const auto& h : hits) {
    out << h.id << "  " << std::left << std::setw(24) << catalog.pois.at(h.id).name << "  " << std::right
        << std::fixed << std::setprecision(1) << h.distance.value() << "\n";
  }
  return 0;
}

int cmd_route(const Options& o, std::ostream& out, std::ostream&) {
  const geo::GeoPoint from = parse_lat_lon(o.from, "--from");
  const auto mode = parse_travel_mode(o.mode);
  if (!mode) throw Error(ErrorCode::Validation, "--mode must be walking or driving");
  const Catalog catalog = load_catalog(fs::path(o.data_dir) / kStoreFile);
  const auto it = catalog.pois.find(o.to_poi);
  if (it == catalog.pois.end()) throw Error(ErrorCode::NotFound, "no POI with id '" + o.to_poi + "'");
  const RoadGraph graph = load_graph(o.graph);
  const RouteResult r = route(graph, from, it->second.location, *mode);

  if (o.json_output) {
    out << wire::to_json(r).dump() << "\n";
    return 0;
  }
  out << "kind: " << to_string(r.kind) << "\n"
      << std::fixed << std::setprecision(1) << "distance_m: " << r.distance.value() << "\n"
      << "duration_s: " << r.duration_s << "\n"
      << "points: " << r.polyline.size() << "\n";
  return 0;
}

int cmd_import(const Options& o, std::ostream& out, std::ostream&, const Environment& env) {
  ensure_dir(o.data_dir);
  PoiStore store(fs::path(o.data_dir) / kStoreFile, PoiStore::Options{env.clock, random_uuid});
  const auto added = store.import(o.import_file);
  if (o.json_output) {
    json items = json::array();
    for (const auto& p : added) items.push_back(wire::to_json(p));
    out << json{{"pois", std::move(items)}}.dump() << "\n";
  } else {
    out << "imported " << added.size() << " POIs (revision " << store.snapshot()->catalog.revision << ")\n";
  }
  return 0;
}

std::optional<std::string> read_tty_password(const std::string& prompt) {
  const int fd = ::open("/dev/tty", O_RDWR | O_NOCTTY);
  if (fd < 0) return std::nullopt;
  termios old{};
  if (::tcgetattr(fd, &old) != 0) {
    ::close(fd);
    return std::nullopt;
  }
  termios quiet = old;
  quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
  (void)!::write(fd, prompt.data(), prompt.size());
  ::tcsetattr(fd, TCSAFLUSH, &quiet);
  std::string line;
  char c = 0;
  while (::read(fd, &c, 1) == 1 && c != '\n') line.push_back(c);
  ::tcsetattr(fd, TCSAFLUSH, &old);
  (void)!::write(fd, "\n", 1);
  ::close(fd);
  return line;
}

}  // namespace

Environment process_environment() {
  Environment env;
  env.getenv = [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
  env.read_password = read_tty_password;
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  Options o;
  CLI::App app{"Nature-tourism location service: POI catalog, nearest search and routing", "lbs"};
  app.require_subcommand(1);
  app.add_option("--data-dir", o.data_dir, "Directory holding pois.json and users.json (env LBS_DATA_DIR)");
  app.add_option("--graph", o.graph, "Road graph file (env LBS_GRAPH)");
  app.add_flag("--json", o.json_output, "Machine-readable output");

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON API");
  serve->add_option("--listen", o.listen, "host:port to bind (env LBS_LISTEN)");
  serve->add_option("--allowed-origin", o.allowed_origin, "Web client origin for CORS (env LBS_ALLOWED_ORIGIN)");
  serve->add_option("--token-ttl", o.token_ttl_s, "Admin session lifetime in seconds (env LBS_TOKEN_TTL)");
  serve->add_flag("--no-seed", o.no_seed, "Do not load the seed fixture into an empty store");
  serve->add_option("--fixture", o.fixture, "Seed fixture used for the first run");

  auto* admin = app.add_subcommand("admin", "Administrator accounts");
  admin->require_subcommand(1);
  auto* add_user = admin->add_subcommand("add-user", "Create an admin user (password from LBS_ADMIN_PASSWORD or prompt)");
  add_user->add_option("username", o.username, "Login name")->required();

  auto* nearest = app.add_subcommand("nearest", "List the POIs nearest to a position");
  nearest->add_option("--at", o.at, "Position as lat,lon")->required();
  nearest->add_option("-k", o.k, "Number of results")->capture_default_str();

  auto* route_cmd = app.add_subcommand("route", "Route from a position to a POI");
  route_cmd->add_option("--from", o.from, "Start as lat,lon")->required();
  route_cmd->add_option("--to-poi", o.to_poi, "Destination POI id")->required();
  route_cmd->add_option("--mode", o.mode, "walking or driving")->capture_default_str();

  auto* import = app.add_subcommand("import", "Bulk-load POIs from a fixture-format file");
  import->add_option("--file", o.import_file, "JSON file with a \"pois\" array")->required();

  std::vector<const char*> argv{"lbs"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    apply_env(app, *serve, o, env);
    if (serve->parsed()) return cmd_serve(o, out, err, env);
    if (add_user->parsed()) return cmd_add_user(o, out, err, env);
    if (nearest->parsed()) return cmd_nearest(o, out, err);
    if (route_cmd->parsed()) return cmd_route(o, out, err);
    if (import->parsed()) return cmd_import(o, out, err, env);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lbs::cli
