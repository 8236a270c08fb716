#include <doctest.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "../support/api_harness.hpp"
#include "../support/oracles.hpp"
#include "lbs/wire.hpp"

using namespace lbs;
using lbs::testing::ApiHarness;
using nlohmann::json;

namespace {

void check_error(const HttpResponse& r, int status, const std::string& code, const std::string& field = {}) {
  CHECK(r.status == status);
  const json b = json::parse(r.body);
  REQUIRE(b.is_object());
  CHECK(b.size() == 1);
  REQUIRE(b.contains("error"));
  CHECK(b["error"]["code"] == code);
  CHECK(b["error"]["message"].is_string());
  if (!field.empty()) CHECK(b["error"]["field"] == field);
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string near_of(const json& poi) { return fmt6(poi["lat"].get<double>()) + "," + fmt6(poi["lon"].get<double>()); }

}  // namespace

TEST_CASE("health") {
  ApiHarness seeded;
  const auto r = seeded.call("GET", "/api/v1/health");
  CHECK(r.status == 200);
  CHECK(ApiHarness::body(r) == json{{"status", "ok"}, {"pois", 6}, {"revision", 1}});

  ApiHarness empty(false);
  CHECK(ApiHarness::body(empty.call("GET", "/api/v1/health"))["pois"] == 0);
}

TEST_CASE("list POIs") {
  ApiHarness h;
  const auto r = h.call("GET", "/api/v1/pois");
  REQUIRE(r.status == 200);
  const json pois = ApiHarness::body(r)["pois"];
  REQUIRE(pois.size() == 6);
  std::set<std::string> names;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    names.insert(pois[i]["name"].get<std::string>());
    if (i > 0) CHECK(pois[i - 1]["name"].get<std::string>() < pois[i]["name"].get<std::string>());
    CHECK_FALSE(pois[i].contains("distance_m"));
  }
  CHECK(names == testing::seed_names());
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/pois", {{"category", "nature"}}))["pois"].size() == 6);
  check_error(h.call("GET", "/api/v1/pois", {{"category", "museum"}}), 422, "VALIDATION", "category");
}

TEST_CASE("nearest POIs") {
  ApiHarness h;
  const json all = ApiHarness::body(h.call("GET", "/api/v1/pois"))["pois"];
  for (const auto& poi : all) {
    const json hit = ApiHarness::body(h.call("GET", "/api/v1/pois", {{"near", near_of(poi)}, {"k", "1"}}))["pois"];
    REQUIRE(hit.size() == 1);
    CHECK(hit[0]["id"] == poi["id"]);
    CHECK(hit[0]["distance_m"] == 0.0);
  }

  const std::string from = "-2.976100,104.775400";
  const json six = ApiHarness::body(h.call("GET", "/api/v1/pois", {{"near", from}, {"k", "6"}}))["pois"];
  const json three = ApiHarness::body(h.call("GET", "/api/v1/pois", {{"near", from}, {"k", "3"}}))["pois"];
  REQUIRE(six.size() == 6);
  REQUIRE(three.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(three[i] == six[i]);

  // brute-force ranking with the independent haversine
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& p : all) {
    ranked.emplace_back(testing::oracle_haversine(-2.9761, 104.7754, p["lat"], p["lon"]), p["id"]);
  }
  std::sort(ranked.begin(), ranked.end());
  for (int i = 0; i < 6; ++i) {
    CHECK(six[i]["id"] == ranked[i].second);
    CHECK(six[i]["distance_m"].get<double>() == doctest::Approx(ranked[i].first).epsilon(1e-9));
  }

  // default k is 10, so all six come back
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/pois", {{"near", from}}))["pois"].size() == 6);
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/pois", {{"near", from}, {"k", "0"}}))["pois"].empty());

  for (const std::string bad : {"abc", "1,2,3", "-2.9761234,104.77", "95,0", "1e1,2", " 1,2", "1,", ",2", "1.,2"}) {
    CAPTURE(bad);
    check_error(h.call("GET", "/api/v1/pois", {{"near", bad}}), 422, "VALIDATION", "near");
  }
  for (const std::string bad : {"-1", "x", "", "10001", "2.5"}) {
    CAPTURE(bad);
    check_error(h.call("GET", "/api/v1/pois", {{"near", from}, {"k", bad}}), 422, "VALIDATION", "k");
  }
  check_error(h.call("GET", "/api/v1/pois", {{"k", "3"}}), 422, "VALIDATION", "k");
}

TEST_CASE("single POI") {
  ApiHarness h;
  const json first = ApiHarness::body(h.call("GET", "/api/v1/pois"))["pois"][0];
  const auto r = h.call("GET", "/api/v1/pois/" + first["id"].get<std::string>());
  CHECK(r.status == 200);
  CHECK(ApiHarness::body(r) == first);
  check_error(h.call("GET", "/api/v1/pois/00000000-0000-4000-8000-0000000000ff"), 404, "NOT_FOUND");

  const auto token = h.login();
  CHECK(h.call("DELETE", "/api/v1/admin/pois/" + first["id"].get<std::string>(), {}, {}, ApiHarness::bearer(token)).status ==
        200);
  check_error(h.call("GET", "/api/v1/pois/" + first["id"].get<std::string>()), 404, "NOT_FOUND");
}

TEST_CASE("route endpoint") {
  ApiHarness h;
  const json pois = ApiHarness::body(h.call("GET", "/api/v1/pois"))["pois"];
  const auto by_name = [&](const std::string& n) {
    for (const auto& p : pois) {
      if (p["name"] == n) return p;
    }
    FAIL("missing " << n);
    return json{};
  };
  const json bkb = by_name("Benteng Kuto Besak");
  const std::string bkb_id = bkb["id"];

  const json self = ApiHarness::body(h.call("GET", "/api/v1/route", {{"from", near_of(bkb)}, {"to_poi", bkb_id}}));
  CHECK(self["distance_m"] == 0.0);
  CHECK(self["duration_s"] == 0.0);
  CHECK(self["mode"] == "walking");

  // a road route from near Punti Kayu to the fort
  const json road = ApiHarness::body(
      h.call("GET", "/api/v1/route", {{"from", "-2.940000,104.727500"}, {"to_poi", bkb_id}, {"mode", "driving"}}));
  CHECK(road["kind"] == "graph");
  CHECK(road["mode"] == "driving");
  CHECK(road["polyline"].size() > 3);
  CHECK(road["polyline"].front() == json{{"lat", -2.94}, {"lon", 104.7275}});
  CHECK(road["polyline"].back() == json{{"lat", bkb["lat"]}, {"lon", bkb["lon"]}});
  CHECK(road["duration_s"].get<double>() == doctest::Approx(road["distance_m"].get<double>() / 8.33));
  CHECK(wire::route_from_json(road).kind == RouteKind::Graph);

  // far outside the snapping radius
  const json far = ApiHarness::body(h.call("GET", "/api/v1/route", {{"from", "0,0"}, {"to_poi", bkb_id}}));
  CHECK(far["kind"] == "straight_line");
  CHECK(far["polyline"].size() == 2);
  CHECK(far["distance_m"].get<double>() ==
        doctest::Approx(testing::oracle_haversine(0, 0, bkb["lat"], bkb["lon"])).epsilon(1e-9));

  check_error(h.call("GET", "/api/v1/route", {{"to_poi", bkb_id}}), 400, "NO_ROUTE_CONTEXT");
  check_error(h.call("GET", "/api/v1/route", {{"from", "0,0"}}), 400, "NO_ROUTE_CONTEXT");
  check_error(h.call("GET", "/api/v1/route", {{"from", "0;0"}, {"to_poi", bkb_id}}), 422, "VALIDATION", "from");
  check_error(h.call("GET", "/api/v1/route", {{"from", "0,0"}, {"to_poi", bkb_id}, {"mode", "flying"}}), 422,
              "VALIDATION", "mode");
  check_error(h.call("GET", "/api/v1/route", {{"from", "0,0"}, {"to_poi", "nope"}}), 404, "NOT_FOUND");
}

TEST_CASE("login") {
  ApiHarness h;
  const auto ok = h.call("POST", "/api/v1/admin/login", {}, R"({"username": "admin", "password": "correct horse battery"})");
  REQUIRE(ok.status == 200);
  const json session = ApiHarness::body(ok);
  CHECK(session["token"].get<std::string>().size() == 43);
  CHECK(session["expires_at"] == "2024-05-02T08:00:00Z");

  const auto wrong_pw = h.call("POST", "/api/v1/admin/login", {}, R"({"username": "admin", "password": "nope"})");
  const auto wrong_user = h.call("POST", "/api/v1/admin/login", {}, R"({"username": "root", "password": "nope"})");
  check_error(wrong_pw, 401, "UNAUTHORIZED");
  CHECK(wrong_pw.body == wrong_user.body);
  CHECK(wrong_pw.status == wrong_user.status);

  check_error(h.call("POST", "/api/v1/admin/login", {}, "{"), 422, "VALIDATION", "body");
  check_error(h.call("POST", "/api/v1/admin/login", {}, R"({"username": 3, "password": "x"})"), 422, "VALIDATION",
              "username");
}

TEST_CASE("admin CRUD lifecycle") {
  ApiHarness h;
  const auto auth = ApiHarness::bearer(h.login());

  const auto created = h.call("POST", "/api/v1/admin/pois", {},
                              R"({"name": "Bukit Siguntang", "description": "hill park", "category": "nature",
                                  "lat": -2.9720, "lon": 104.7310})",
                              auth);
  REQUIRE(created.status == 201);
  const json poi = ApiHarness::body(created);
  const std::string id = poi["id"];
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/pois"))["pois"].size() == 7);
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/pois/" + id)) == poi);
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/health"))["revision"] == 2);

  h.clock.advance(std::chrono::minutes(5));
  const auto updated = h.call("PUT", "/api/v1/admin/pois/" + id, {}, R"({"description": "sacred hill"})", auth);
  REQUIRE(updated.status == 200);
  CHECK(ApiHarness::body(updated)["description"] == "sacred hill");
  CHECK(ApiHarness::body(updated)["name"] == "Bukit Siguntang");
  CHECK(ApiHarness::body(updated)["updated_at"] == "2024-05-01T08:05:00Z");

  const json r = ApiHarness::body(h.call("GET", "/api/v1/route", {{"from", "-2.972000,104.731000"}, {"to_poi", id}}));
  CHECK(r["distance_m"] == 0.0);

  CHECK(h.call("DELETE", "/api/v1/admin/pois/" + id, {}, {}, auth).status == 200);
  check_error(h.call("GET", "/api/v1/pois/" + id), 404, "NOT_FOUND");
  check_error(h.call("DELETE", "/api/v1/admin/pois/" + id, {}, {}, auth), 404, "NOT_FOUND");
  check_error(h.call("PUT", "/api/v1/admin/pois/" + id, {}, R"({"name": "x"})", auth), 404, "NOT_FOUND");
}

TEST_CASE("admin validation errors") {
  ApiHarness h;
  const auto auth = ApiHarness::bearer(h.login());
  check_error(h.call("POST", "/api/v1/admin/pois", {}, R"({"name": "X", "lat": 95, "lon": 0})", auth), 422, "VALIDATION",
              "location");
  check_error(h.call("POST", "/api/v1/admin/pois", {}, R"({"name": " ", "lat": 1, "lon": 0})", auth), 422, "VALIDATION",
              "name");
  check_error(h.call("POST", "/api/v1/admin/pois", {}, R"({"lat": 1, "lon": 0})", auth), 422, "VALIDATION", "name");
  check_error(h.call("POST", "/api/v1/admin/pois", {}, R"({"name": "X", "lat": "1", "lon": 0})", auth), 422,
              "VALIDATION", "location");
  check_error(h.call("POST", "/api/v1/admin/pois", {}, "[1]", auth), 422, "VALIDATION", "body");
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/health"))["revision"] == 1);
}

TEST_CASE("every mutating endpoint rejects bad tokens before touching the store") {
  ApiHarness h;
  const std::string expired_token = h.login();
  h.clock.advance(std::chrono::hours(24));
  const std::string id = ApiHarness::body(h.call("GET", "/api/v1/pois"))["pois"][0]["id"];
  const std::string before = h.call("GET", "/api/v1/pois").body;

  const std::vector<std::map<std::string, std::string>> bad_auth{
      {}, ApiHarness::bearer("garbage"), ApiHarness::bearer(expired_token), {{"authorization", expired_token}},
      {{"authorization", "Basic YWRtaW46YWRtaW4="}}};
  const std::vector<std::tuple<std::string, std::string, std::string>> endpoints{
      {"POST", "/api/v1/admin/pois", R"({"name": "X", "lat": 1, "lon": 1})"},
      {"PUT", "/api/v1/admin/pois/" + id, R"({"name": "X"})"},
      {"DELETE", "/api/v1/admin/pois/" + id, ""},
      // invalid bodies still get 401, not 422
      {"POST", "/api/v1/admin/pois", "{"},
      {"PUT", "/api/v1/admin/pois/unknown", "{"}};
  for (const auto& [method, path, body] : endpoints) {
    for (const auto& headers : bad_auth) {
      CAPTURE(method);
      CAPTURE(path);
      check_error(h.call(method, path, {}, body, headers), 401, "UNAUTHORIZED");
    }
  }
  CHECK(h.call("GET", "/api/v1/pois").body == before);
  CHECK(ApiHarness::body(h.call("GET", "/api/v1/health"))["revision"] == 1);
}

TEST_CASE("unknown endpoints and methods") {
  ApiHarness h;
  check_error(h.call("GET", "/api/v2/health"), 404, "NOT_FOUND");
  check_error(h.call("GET", "/"), 404, "NOT_FOUND");
  check_error(h.call("POST", "/api/v1/health"), 404, "NOT_FOUND");
  check_error(h.call("GET", "/api/v1/pois/a/b"), 404, "NOT_FOUND");
  check_error(h.call("PATCH", "/api/v1/admin/pois/x"), 404, "NOT_FOUND");
}

TEST_CASE("CORS") {
  ApiHarness h(true, "http://localhost:5173");
  const auto r = h.call("GET", "/api/v1/health", {}, {}, {{"origin", "http://localhost:5173"}});
  CHECK(r.headers.at("Access-Control-Allow-Origin") == "http://localhost:5173");
  const auto other = h.call("GET", "/api/v1/health", {}, {}, {{"origin", "http://evil.example"}});
  CHECK_FALSE(other.headers.contains("Access-Control-Allow-Origin"));
  const auto pre = h.call("OPTIONS", "/api/v1/admin/pois", {}, {}, {{"origin", "http://localhost:5173"}});
  CHECK(pre.status == 200);
  CHECK(pre.headers.at("Access-Control-Allow-Headers").find("Authorization") != std::string::npos);

  ApiHarness closed;
  CHECK_FALSE(closed.call("GET", "/api/v1/health", {}, {}, {{"origin", "http://localhost:5173"}})
                  .headers.contains("Access-Control-Allow-Origin"));
}

TEST_CASE("POI wire round-trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  auto ids = testing::sequential_ids();
  for (int i = 0; i < 200; ++i) {
    Poi p = validate_draft(PoiDraft{"name " + std::to_string(i), "d\"\n\xc3\xa9", "nature", lat(rng), lon(rng)}, ids(),
                           Timestamp{std::chrono::seconds(rng() % 4'000'000'000ULL)});
    p.updated_at += std::chrono::seconds(i);
    const json j = json::parse(wire::to_json(p).dump());
    CHECK(wire::poi_from_json(j) == p);
  }
}

TEST_CASE("concurrent readers during a writer burst") {
  ApiHarness h;
  const auto auth = ApiHarness::bearer(h.login());
  const json first = ApiHarness::body(h.call("GET", "/api/v1/pois"))["pois"][0];
  const std::string id = first["id"];
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::atomic<int> reads{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      while (!done) {
        const json p = ApiHarness::body(h.call("GET", "/api/v1/pois/" + id));
        // writers always set name and description to the same token
        const std::string name = p["name"], desc = p["description"];
        if (name != first["name"] && name != desc) ++torn;
        ++reads;
      }
    });
  }
  for (int i = 0; i < 40; ++i) {
    const std::string v = "rev" + std::to_string(i);
    REQUIRE(h.call("PUT", "/api/v1/admin/pois/" + id, {}, json{{"name", v}, {"description", v}}.dump(), auth).status == 200);
  }
  done = true;
  for (auto& t : readers) t.join();
  CHECK(torn == 0);
  CHECK(reads > 0);
}
