#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <set>
#include <string>

#include "lbs/clock.hpp"
#include "lbs/poi_store.hpp"

#ifndef LBS_FIXTURE_DIR
#error "LBS_FIXTURE_DIR must point at the shipped fixtures"
#endif

namespace lbs::testing {

inline std::filesystem::path seed_fixture() { return std::filesystem::path(LBS_FIXTURE_DIR) / "seed_pois.json"; }
inline std::filesystem::path roads_fixture() { return std::filesystem::path(LBS_FIXTURE_DIR) / "roads.json"; }

inline const std::set<std::string>& seed_names() {
  static const std::set<std::string> names{"Benteng Kuto Besak", "Kambang Iwak", "Kerto Island",
                                           "Kemaro Island",      "Punti Kayu",   "Musi River"};
  return names;
}

/// Deterministic UUID-shaped ids: 00000000-0000-4000-8000-000000000001, ...
inline IdGenerator sequential_ids() {
  auto next = std::make_shared<unsigned long long>(0);
  return [next] {
    char buf[37];
    std::snprintf(buf, sizeof buf, "00000000-0000-4000-8000-%012llx", ++*next);
    return std::string(buf);
  };
}

inline Timestamp fixed_time() { return std::chrono::sys_days{std::chrono::year{2024} / 5 / 1} + std::chrono::hours{8}; }

}  // namespace lbs::testing
