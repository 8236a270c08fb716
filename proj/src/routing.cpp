#include "lbs/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include <nlohmann/json.hpp>

#include "lbs/error.hpp"

namespace lbs {

std::string_view to_string(TravelMode m) noexcept {
  return m == TravelMode::Driving ? "driving" : "walking";
}

std::string_view to_string(RouteKind k) noexcept {
  return k == RouteKind::Graph ? "graph" : "straight_line";
}

std::optional<TravelMode> parse_travel_mode(std::string_view text) noexcept {
  if (text == "walking") return TravelMode::Walking;
  if (text == "driving") return TravelMode::Driving;
  return std::nullopt;
}

std::optional<RouteKind> parse_route_kind(std::string_view text) noexcept {
  if (text == "graph") return RouteKind::Graph;
  if (text == "straight_line") return RouteKind::StraightLine;
  return std::nullopt;
}

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptGraph, what); }

}  // namespace

RoadGraph RoadGraph::make(std::vector<GraphNode> nodes, const std::vector<GraphEdge>& edges) {
  RoadGraph g;
  std::sort(nodes.begin(), nodes.end(), [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) corrupt("node with empty id");
    if (!g.by_id_.emplace(nodes[i].id, i).second) corrupt("duplicate node id '" + nodes[i].id + "'");
  }
  g.nodes_ = std::move(nodes);
  g.adjacency_.resize(g.nodes_.size());

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const GraphEdge& edge = edges[e];
    const std::string where = "edge " + std::to_string(e) + " (" + edge.from + " -> " + edge.to + ")";
    const auto from = g.by_id_.find(edge.from);
    const auto to = g.by_id_.find(edge.to);
    if (from == g.by_id_.end()) corrupt(where + ": unknown node '" + edge.from + "'");
    if (to == g.by_id_.end()) corrupt(where + ": unknown node '" + edge.to + "'");
    const double great_circle =
        geo::haversine_distance(g.nodes_[from->second].location, g.nodes_[to->second].location).value();
    const double weight = edge.weight_m.value_or(great_circle);
    if (!std::isfinite(weight) || weight <= 0.0) corrupt(where + ": weight must be positive and finite");
    if (weight < great_circle) {
      corrupt(where + ": weight " + std::to_string(weight) + " m is shorter than the great-circle distance " +
              std::to_string(great_circle) + " m");
    }
    g.adjacency_[from->second].push_back(Arc{to->second, weight});
    if (edge.bidirectional) g.adjacency_[to->second].push_back(Arc{from->second, weight});
  }

  std::vector<IndexEntry> entries;
  entries.reserve(g.nodes_.size());
  for (const auto& n : g.nodes_) entries.push_back(IndexEntry{n.id, n.location});
  g.node_index_ = SpatialIndex::build(std::move(entries));
  return g;
}

std::size_t RoadGraph::arc_count() const noexcept {
  std::size_t n = 0;
  for (const auto& arcs : adjacency_) n += arcs.size();
  return n;
}

std::optional<std::size_t> RoadGraph::index_of(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

RoadGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) corrupt("cannot open graph file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    corrupt("graph file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges") || !doc["nodes"].is_array() ||
      !doc["edges"].is_array()) {
    corrupt("graph file must be an object with \"nodes\" and \"edges\" arrays");
  }

  std::vector<GraphNode> nodes;
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    const auto& n = doc["nodes"][i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (!n.is_object() || !n.contains("id") || !n["id"].is_string() || !n.contains("lat") ||
        !n["lat"].is_number() || !n.contains("lon") || !n["lon"].is_number()) {
      corrupt(where + ": expected {\"id\": string, \"lat\": number, \"lon\": number}");
    }
    try {
      nodes.push_back(GraphNode{n["id"].get<std::string>(),
                                geo::make_point(n["lat"].get<double>(), n["lon"].get<double>())});
    } catch (const Error& e) {
      corrupt(where + ": " + e.what());
    }
  }

  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& e = doc["edges"][i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("from") || !e["from"].is_string() || !e.contains("to") ||
        !e["to"].is_string()) {
      corrupt(where + ": expected {\"from\": string, \"to\": string}");
    }
    GraphEdge edge{e["from"].get<std::string>(), e["to"].get<std::string>(), true, std::nullopt};
    if (e.contains("bidirectional")) {
      if (!e["bidirectional"].is_boolean()) corrupt(where + ": \"bidirectional\" must be a boolean");
      edge.bidirectional = e["bidirectional"].get<bool>();
    }
    if (e.contains("weight_m") && !e["weight_m"].is_null()) {
      if (!e["weight_m"].is_number()) corrupt(where + ": \"weight_m\" must be a number");
      edge.weight_m = e["weight_m"].get<double>();
    }
    edges.push_back(std::move(edge));
  }
  return RoadGraph::make(std::move(nodes), edges);
}

PathResult shortest_path(const RoadGraph& graph, std::string_view src, std::string_view dst) {
  const auto s = graph.index_of(src);
  const auto t = graph.index_of(dst);
  if (!s) throw Error(ErrorCode::NotFound, "unknown node '" + std::string(src) + "'");
  if (!t) throw Error(ErrorCode::NotFound, "unknown node '" + std::string(dst) + "'");

  const std::size_t n = graph.node_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  dist[*s] = 0.0;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.emplace(0.0, *s);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& arc : graph.arcs_from(u)) {
      const double nd = d + arc.weight_m;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        queue.emplace(nd, arc.to);
      }
    }
  }
  if (dist[*t] == kInf) {
    throw Error(ErrorCode::NoPath, "no path from '" + std::string(src) + "' to '" + std::string(dst) + "'");
  }

  // Tight arcs (dist[u] + w == dist[v]) form the DAG of all shortest paths.
  // Mark nodes that can still reach dst inside it, then walk forward taking
  // the smallest-id viable successor at each step.
  std::vector<std::vector<std::size_t>> tight_in(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (dist[u] == kInf) continue;
    for (const auto& arc : graph.arcs_from(u)) {
      if (dist[u] + arc.weight_m == dist[arc.to]) tight_in[arc.to].push_back(u);
    }
  }
  std::vector<bool> reaches(n, false);
  std::vector<std::size_t> stack{*t};
  reaches[*t] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto u : tight_in[v]) {
      if (!reaches[u]) {
        reaches[u] = true;
        stack.push_back(u);
      }
    }
  }

  PathResult out{{graph.node(*s).id}, geo::Meters(dist[*t])};
  std::size_t at = *s;
  while (at != *t) {
    std::optional<std::size_t> next;
    for (const auto& arc : graph.arcs_from(at)) {
      if (reaches[arc.to] && dist[at] + arc.weight_m == dist[arc.to] && (!next || arc.to < *next)) {
        next = arc.to;
      }
    }
    at = next.value();
    out.nodes.push_back(graph.node(at).id);
  }
  return out;
}

double estimate_duration(geo::Meters distance, TravelMode mode) noexcept {
  return distance.value() / (mode == TravelMode::Driving ? kDrivingSpeedMps : kWalkingSpeedMps);
}

RouteResult route(const RoadGraph& graph, geo::GeoPoint from, geo::GeoPoint to, TravelMode mode) {
  RouteResult straight;
  straight.polyline = {from, to};
  straight.distance = geo::haversine_distance(from, to);
  straight.duration_s = estimate_duration(straight.distance, mode);
  straight.mode = mode;
  straight.kind = RouteKind::StraightLine;
  if (from == to || graph.node_count() == 0) return straight;

  const auto snap_from = graph.node_index().k_nearest(from, 1);
  const auto snap_to = graph.node_index().k_nearest(to, 1);
  if (snap_from.front().distance.value() > kSnapMaxM || snap_to.front().distance.value() > kSnapMaxM) {
    return straight;
  }

  PathResult path;
  try {
    path = shortest_path(graph, snap_from.front().id, snap_to.front().id);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPath) throw;
    return straight;
  }

  RouteResult out;
  out.polyline.reserve(path.nodes.size() + 2);
  out.polyline.push_back(from);
  for (const auto& id : path.nodes) out.polyline.push_back(graph.node(*graph.index_of(id)).location);
  out.polyline.push_back(to);
  out.distance = geo::Meters(snap_from.front().distance.value() + path.weight.value() +
                             snap_to.front().distance.value());
  out.duration_s = estimate_duration(out.distance, mode);
  out.mode = mode;
  out.kind = RouteKind::Graph;
  return out;
}

}  // namespace lbs
