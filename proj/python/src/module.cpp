#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lbs/api_server.hpp"
#include "lbs/auth.hpp"
#include "lbs/error.hpp"
#include "lbs/geo.hpp"
#include "lbs/poi_store.hpp"
#include "lbs/routing.hpp"
#include "lbs/spatial_index.hpp"
#include "lbs/wire.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Plain conversions between nlohmann values and Python builtins so POIs and
// routes cross the boundary in their wire shape.
py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      py::dict d;
      for (const auto& [k, v] : j.items()) d[py::str(k)] = to_py(v);
      return std::move(d);
    }
    case json::value_t::array: {
      py::list l;
      for (const auto& v : j) l.append(to_py(v));
      return std::move(l);
    }
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<long long>());
    case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    default: return py::none();
  }
}

json from_py(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<long long>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    json o = json::object();
    for (const auto& [k, v] : h.cast<py::dict>()) o[py::str(k).cast<std::string>()] = from_py(v);
    return o;
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    json a = json::array();
    for (const auto& v : h) a.push_back(from_py(v));
    return a;
  }
  throw py::type_error("cannot convert " + py::repr(h).cast<std::string>() + " to JSON");
}

lbs::TravelMode mode_of(const std::string& s) {
  const auto m = lbs::parse_travel_mode(s);
  if (!m) throw lbs::Error(lbs::ErrorCode::Validation, "mode must be walking or driving", "mode");
  return *m;
}

}  // namespace

PYBIND11_MODULE(_lbs, m) {
  m.doc() = "Geodesy, nearest-POI search, routing and the POI store";

  static PyObject* error_type = PyErr_NewException("lbs.LbsError", PyExc_ValueError, nullptr);
  m.attr("LbsError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const lbs::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(lbs::to_string(e.code()));
      exc.attr("field") = e.field();
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.attr("EARTH_RADIUS_M") = lbs::geo::kEarthRadiusM;
  m.attr("SNAP_MAX_M") = lbs::kSnapMaxM;

  py::class_<lbs::geo::GeoPoint>(m, "GeoPoint")
      .def(py::init(&lbs::geo::make_point), py::arg("lat"), py::arg("lon"))
      .def_property_readonly("lat", &lbs::geo::GeoPoint::lat)
      .def_property_readonly("lon", &lbs::geo::GeoPoint::lon)
      .def("__eq__", [](const lbs::geo::GeoPoint& a, const lbs::geo::GeoPoint& b) { return a == b; })
      .def("__hash__", [](const lbs::geo::GeoPoint& p) { return py::hash(py::make_tuple(p.lat(), p.lon())); })
      .def("__repr__", [](const lbs::geo::GeoPoint& p) {
        return "GeoPoint(" + py::repr(py::float_(p.lat())).cast<std::string>() + ", " +
               py::repr(py::float_(p.lon())).cast<std::string>() + ")";
      });

  py::class_<lbs::geo::BoundingBox>(m, "BoundingBox")
      .def(py::init(&lbs::geo::make_box), py::arg("min_lat"), py::arg("max_lat"), py::arg("min_lon"), py::arg("max_lon"))
      .def_readonly("min_lat", &lbs::geo::BoundingBox::min_lat)
      .def_readonly("max_lat", &lbs::geo::BoundingBox::max_lat)
      .def_readonly("min_lon", &lbs::geo::BoundingBox::min_lon)
      .def_readonly("max_lon", &lbs::geo::BoundingBox::max_lon)
      .def("contains", [](const lbs::geo::BoundingBox& b, const lbs::geo::GeoPoint& p) { return lbs::geo::contains(b, p); });
  m.attr("PALEMBANG_BOX") = lbs::geo::kPalembangBox;

  m.def("haversine_distance", [](const lbs::geo::GeoPoint& a, const lbs::geo::GeoPoint& b) {
    return lbs::geo::haversine_distance(a, b).value();
  }, "Great-circle distance in meters.");
  m.def("initial_bearing", &lbs::geo::initial_bearing, "Forward azimuth in degrees, [0, 360).");

  py::class_<lbs::SpatialIndex>(m, "SpatialIndex")
      .def(py::init([](const std::vector<std::pair<std::string, lbs::geo::GeoPoint>>& points) {
             std::vector<lbs::IndexEntry> entries;
             entries.reserve(points.size());
             for (const auto& [id, p] : points) entries.push_back({id, p});
             return lbs::SpatialIndex::build(std::move(entries));
           }),
           py::arg("points"), "Builds from (id, GeoPoint) pairs.")
      .def("__len__", &lbs::SpatialIndex::size)
      .def("k_nearest", [](const lbs::SpatialIndex& idx, const lbs::geo::GeoPoint& from, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& n : idx.k_nearest(from, k)) out.emplace_back(n.id, n.distance.value());
        return out;
      }, py::arg("origin"), py::arg("k"))
      .def("within_radius", [](const lbs::SpatialIndex& idx, const lbs::geo::GeoPoint& from, double radius_m) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& n : idx.within_radius(from, lbs::geo::Meters(radius_m))) out.emplace_back(n.id, n.distance.value());
        return out;
      }, py::arg("origin"), py::arg("radius_m"));

  py::class_<lbs::RoadGraph>(m, "RoadGraph")
      .def_static("load", &lbs::load_graph, py::arg("path"))
      .def_property_readonly("node_count", &lbs::RoadGraph::node_count)
      .def_property_readonly("arc_count", &lbs::RoadGraph::arc_count)
      .def("shortest_path", [](const lbs::RoadGraph& g, const std::string& src, const std::string& dst) {
        const auto r = lbs::shortest_path(g, src, dst);
        return py::make_tuple(r.nodes, r.weight.value());
      }, py::arg("src"), py::arg("dst"), "Returns (node ids, weight in meters).")
      .def("route", [](const lbs::RoadGraph& g, const lbs::geo::GeoPoint& from, const lbs::geo::GeoPoint& to,
                       const std::string& mode) { return to_py(lbs::wire::to_json(lbs::route(g, from, to, mode_of(mode)))); },
           py::arg("origin"), py::arg("destination"), py::arg("mode") = "walking",
           "Route in its wire shape: polyline, distance_m, duration_s, mode, kind.");

  m.def("estimate_duration", [](double meters, const std::string& mode) {
    return lbs::estimate_duration(lbs::geo::Meters(meters), mode_of(mode));
  }, py::arg("distance_m"), py::arg("mode") = "walking");

  py::class_<lbs::PoiStore, std::shared_ptr<lbs::PoiStore>>(m, "PoiStore")
      .def(py::init<std::filesystem::path>(), py::arg("path"))
      .def("__len__", [](const lbs::PoiStore& s) { return s.snapshot()->catalog.pois.size(); })
      .def_property_readonly("revision", [](const lbs::PoiStore& s) { return s.snapshot()->catalog.revision; })
      .def("list", [](const lbs::PoiStore& s) {
        py::list out;
        for (const auto& p : s.list()) out.append(to_py(lbs::wire::to_json(p)));
        return out;
      })
      .def("get", [](const lbs::PoiStore& s, const std::string& id) { return to_py(lbs::wire::to_json(s.get(id))); })
      .def("create", [](lbs::PoiStore& s, const py::dict& draft) {
        return to_py(lbs::wire::to_json(s.create(lbs::wire::draft_from_json(from_py(draft)))));
      }, py::arg("draft"))
      .def("update", [](lbs::PoiStore& s, const std::string& id, const py::dict& patch) {
        return to_py(lbs::wire::to_json(s.update(id, lbs::wire::patch_from_json(from_py(patch)))));
      }, py::arg("id"), py::arg("patch"))
      .def("remove", &lbs::PoiStore::remove, py::arg("id"))
      .def("seed", &lbs::PoiStore::seed, py::arg("fixture"))
      .def("import_file", [](lbs::PoiStore& s, const std::filesystem::path& p) { return s.import(p).size(); },
           py::arg("fixture"))
      .def("nearest", [](const lbs::PoiStore& s, const lbs::geo::GeoPoint& from, std::size_t k) {
        const auto snap = s.snapshot();
        py::list out;
        for (const auto& n : snap->index.k_nearest(from, k)) {
          json item = lbs::wire::to_json(snap->catalog.pois.at(n.id));
          item["distance_m"] = n.distance.value();
          out.append(to_py(item));
        }
        return out;
      }, py::arg("origin"), py::arg("k") = lbs::kDefaultNearK);

  m.def("add_admin_user", [](const std::filesystem::path& users_file, const std::string& username,
                             const std::string& password) { lbs::CredentialStore(users_file).add_user(username, password); },
        py::arg("users_file"), py::arg("username"), py::arg("password"));

  py::class_<lbs::ApiService, std::shared_ptr<lbs::ApiService>>(m, "ApiService")
      .def(py::init([](std::shared_ptr<lbs::PoiStore> store, const lbs::RoadGraph& graph,
                       const std::filesystem::path& users_file, const std::string& allowed_origin) {
             return std::make_shared<lbs::ApiService>(std::move(store), std::make_shared<const lbs::RoadGraph>(graph),
                                                      lbs::CredentialStore(users_file),
                                                      lbs::ApiOptions{lbs::system_now, lbs::kDefaultTokenTtl, allowed_origin});
           }),
           py::arg("store"), py::arg("graph"), py::arg("users_file"), py::arg("allowed_origin") = "")
      .def("handle", [](lbs::ApiService& api, const std::string& method, const std::string& path,
                        const std::map<std::string, std::string>& query, const std::string& body,
                        const std::map<std::string, std::string>& headers) {
        lbs::HttpResponse r;
        {
          py::gil_scoped_release release;
          r = api.handle(lbs::HttpRequest{method, path, query, headers, body});
        }
        return py::make_tuple(r.status, r.body);
      }, py::arg("method"), py::arg("path"), py::arg("query") = std::map<std::string, std::string>{},
         py::arg("body") = "", py::arg("headers") = std::map<std::string, std::string>{},
         "Dispatches one request; returns (status, JSON body text).");
}
