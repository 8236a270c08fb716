#include "lbs/poi_store.hpp"

#include <algorithm>
#include <fstream>

#include "lbs/error.hpp"
#include "lbs/wire.hpp"
#include "fileio.hpp"
#include "text.hpp"

namespace lbs {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Nature: return "nature";
  }
  return "nature";
}

std::optional<Category> parse_category(std::string_view text) noexcept {
  if (text == "nature") return Category::Nature;
  return std::nullopt;
}

Poi validate_draft(const PoiDraft& draft, std::string id, Timestamp now) {
  const auto invalid = [](const char* field, const std::string& message) {
    throw Error(ErrorCode::Validation, message, field);
  };

  const std::string_view name = text::trim(draft.name);
  const auto name_len = text::utf8_length(name);
  if (!name_len) invalid("name", "name is not valid UTF-8");
  if (*name_len == 0) invalid("name", "name must not be empty");
  if (*name_len > kMaxNameChars) invalid("name", "name exceeds 200 characters");

  const auto desc_len = text::utf8_length(draft.description);
  if (!desc_len) invalid("description", "description is not valid UTF-8");
  if (*desc_len > kMaxDescriptionChars) invalid("description", "description exceeds 5000 characters");

  const auto category = parse_category(draft.category);
  if (!category) invalid("category", "unknown category '" + draft.category + "'");

  geo::GeoPoint location;
  try {
    location = geo::make_point(draft.lat, draft.lon);
  } catch (const Error& e) {
    invalid("location", e.what());
  }

  return Poi{std::move(id), std::string(name), draft.description, *category, location, now, now};
}

std::vector<Poi> list_pois(const Catalog& catalog, std::optional<Category> filter) {
  std::vector<Poi> out;
  out.reserve(catalog.pois.size());
  for (const auto& [id, poi] : catalog.pois) {
    if (!filter || poi.category == *filter) out.push_back(poi);
  }
  std::sort(out.begin(), out.end(), [](const Poi& a, const Poi& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.id < b.id;
  });
  return out;
}

SpatialIndex build_index(const Catalog& catalog) {
  std::vector<IndexEntry> entries;
  entries.reserve(catalog.pois.size());
  for (const auto& [id, poi] : catalog.pois) entries.push_back(IndexEntry{id, poi.location});
  return SpatialIndex::build(std::move(entries));
}

// ---------------------------------------------------------------------------
// persistence

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptStore, what); }

json catalog_to_json(const Catalog& catalog) {
  json pois = json::array();
  for (const auto& [id, poi] : catalog.pois) pois.push_back(wire::to_json(poi));
  return json{{"revision", catalog.revision}, {"pois", std::move(pois)}};
}

json parse_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) corrupt("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    corrupt(path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace

Catalog load_catalog(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    if (ec) corrupt("cannot stat " + path.string() + ": " + ec.message());
    return Catalog{};
  }
  const json doc = parse_file(path);
  if (!doc.is_object()) corrupt(path.string() + ": top level must be an object");
  if (!doc.contains("revision") || !doc["revision"].is_number_unsigned()) {
    corrupt(path.string() + ": \"revision\" must be a non-negative integer");
  }
  if (!doc.contains("pois") || !doc["pois"].is_array()) corrupt(path.string() + ": \"pois\" must be an array");

  Catalog catalog;
  catalog.revision = doc["revision"].get<std::uint64_t>();
  const json& pois = doc["pois"];
  for (std::size_t i = 0; i < pois.size(); ++i) {
    std::string where = "pois[" + std::to_string(i) + "]";
    if (pois[i].is_object() && pois[i].contains("id") && pois[i]["id"].is_string()) {
      where += " (id " + pois[i]["id"].get<std::string>() + ")";
    }
    Poi poi;
    try {
      poi = wire::poi_from_json(pois[i]);
    } catch (const Error& e) {
      const std::string field = e.field().empty() ? "" : " [" + e.field() + "]";
      corrupt(path.string() + ": " + where + field + ": " + e.what());
    }
    if (!is_uuid(poi.id)) corrupt(path.string() + ": " + where + ": id is not a UUID");
    const std::string id = poi.id;
    if (!catalog.pois.emplace(id, std::move(poi)).second) {
      corrupt(path.string() + ": " + where + ": duplicate id");
    }
  }
  return catalog;
}

namespace detail {

fs::path write_temp(const Catalog& catalog, const fs::path& path) {
  return fileio::write_temp(catalog_to_json(catalog).dump(2) + "\n", path);
}

void commit_temp(const fs::path& temp, const fs::path& path) { fileio::commit(temp, path); }

}  // namespace detail

void persist_catalog(const Catalog& catalog, const fs::path& path) {
  detail::commit_temp(detail::write_temp(catalog, path), path);
}

std::vector<PoiDraft> read_fixture(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) corrupt("fixture " + path.string() + " does not exist");
  const json doc = parse_file(path);
  if (!doc.is_object() || !doc.contains("pois") || !doc["pois"].is_array()) {
    corrupt(path.string() + ": fixture must be an object with a \"pois\" array");
  }
  std::vector<PoiDraft> drafts;
  const json& pois = doc["pois"];
  for (std::size_t i = 0; i < pois.size(); ++i) {
    try {
      PoiDraft d = wire::draft_from_json(pois[i]);
      validate_draft(d, "", Timestamp{});
      drafts.push_back(std::move(d));
    } catch (const Error& e) {
      corrupt(path.string() + ": pois[" + std::to_string(i) + "] [" + e.field() + "]: " + e.what());
    }
  }
  return drafts;
}

// ---------------------------------------------------------------------------
// PoiStore

PoiStore::PoiStore(fs::path path, Options options) : path_(std::move(path)), options_(std::move(options)) {
  Catalog catalog = load_catalog(path_);
  SpatialIndex index = build_index(catalog);
  current_ = std::make_shared<const StoreSnapshot>(StoreSnapshot{std::move(catalog), std::move(index)});
}

std::shared_ptr<const StoreSnapshot> PoiStore::snapshot() const {
  std::lock_guard lock(publish_);
  return current_;
}

Poi PoiStore::get(const std::string& id) const {
  const auto snap = snapshot();
  const auto it = snap->catalog.pois.find(id);
  if (it == snap->catalog.pois.end()) throw Error(ErrorCode::NotFound, "no POI with id '" + id + "'");
  return it->second;
}

std::vector<Poi> PoiStore::list(std::optional<Category> filter) const {
  return list_pois(snapshot()->catalog, filter);
}

std::string PoiStore::fresh_id(const Catalog& catalog) {
  for (;;) {
    std::string id = options_.ids();
    if (!catalog.pois.contains(id)) return id;
  }
}

void PoiStore::commit(Catalog next) {
  ++next.revision;
  SpatialIndex index = build_index(next);
  persist_catalog(next, path_);
  auto snap = std::make_shared<const StoreSnapshot>(StoreSnapshot{std::move(next), std::move(index)});
  std::lock_guard lock(publish_);
  current_ = std::move(snap);
}

Poi PoiStore::create(const PoiDraft& draft) {
  std::lock_guard lock(writer_);
  Catalog next = snapshot()->catalog;
  Poi poi = validate_draft(draft, fresh_id(next), options_.clock());
  next.pois.emplace(poi.id, poi);
  commit(std::move(next));
  return poi;
}

Poi PoiStore::update(const std::string& id, const PoiPatch& patch) {
  std::lock_guard lock(writer_);
  Catalog next = snapshot()->catalog;
  const auto it = next.pois.find(id);
  if (it == next.pois.end()) throw Error(ErrorCode::NotFound, "no POI with id '" + id + "'");
  const Poi& old = it->second;

  PoiDraft merged{patch.name.value_or(old.name), patch.description.value_or(old.description),
                  patch.category.value_or(std::string(to_string(old.category))),
                  patch.lat.value_or(old.location.lat()), patch.lon.value_or(old.location.lon())};
  Poi poi = validate_draft(merged, id, old.created_at);
  poi.updated_at = std::max(options_.clock(), old.created_at);
  it->second = poi;
  commit(std::move(next));
  return poi;
}

void PoiStore::remove(const std::string& id) {
  std::lock_guard lock(writer_);
  Catalog next = snapshot()->catalog;
  if (next.pois.erase(id) == 0) throw Error(ErrorCode::NotFound, "no POI with id '" + id + "'");
  commit(std::move(next));
}

void PoiStore::seed(const fs::path& fixture) {
  std::lock_guard lock(writer_);
  Catalog next = snapshot()->catalog;
  if (!next.pois.empty()) throw Error(ErrorCode::AlreadySeeded, "catalog already contains POIs");
  const auto drafts = read_fixture(fixture);
  const Timestamp now = options_.clock();
  for (const auto& d : drafts) {
    Poi poi = validate_draft(d, fresh_id(next), now);
    next.pois.emplace(poi.id, std::move(poi));
  }
  commit(std::move(next));
}

std::vector<Poi> PoiStore::import(const fs::path& fixture) {
  std::lock_guard lock(writer_);
  const auto drafts = read_fixture(fixture);
  Catalog next = snapshot()->catalog;
  const Timestamp now = options_.clock();
  std::vector<Poi> added;
  for (const auto& d : drafts) {
    Poi poi = validate_draft(d, fresh_id(next), now);
    next.pois.emplace(poi.id, poi);
    added.push_back(std::move(poi));
  }
  if (!added.empty()) commit(std::move(next));
  return added;
}

}  // namespace lbs
