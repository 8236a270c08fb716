#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace lbs {

using Timestamp = std::chrono::sys_seconds;

/// Injectable time source; tests substitute a manual clock.
using Clock = std::function<Timestamp()>;

Timestamp system_now();

/// "2024-05-01T08:30:00Z"
std::string format_iso8601(Timestamp t);

/// Accepts exactly the format produced by format_iso8601.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Clock whose value only moves when told to.
class ManualClock {
 public:
  explicit ManualClock(Timestamp start) : now_(std::make_shared<Timestamp>(start)) {}

  Timestamp now() const { return *now_; }
  void advance(std::chrono::seconds by) { *now_ += by; }
  void set(Timestamp t) { *now_ = t; }
  Clock as_clock() const {
    return [p = now_] { return *p; };
  }

 private:
  std::shared_ptr<Timestamp> now_;
};

}  // namespace lbs
