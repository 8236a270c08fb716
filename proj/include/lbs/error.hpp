#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace lbs {

enum class ErrorCode {
  // geo-core
  OutOfRange,
  NotFinite,
  DegenerateBearing,
  // spatial-index
  DuplicateId,
  // poi-store
  CorruptStore,
  IoFailure,
  Validation,
  NotFound,
  AlreadySeeded,
  // routing
  CorruptGraph,
  NoPath,
  // auth / cli
  DuplicateUser,
  WeakPassword,
  Unauthorized,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure the library reports. `field` is set for
/// validation failures that can be attributed to a single input field.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace lbs
