#include "lbs/error.hpp"

namespace lbs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotFinite: return "NotFinite";
    case ErrorCode::DegenerateBearing: return "DegenerateBearing";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::CorruptStore: return "CorruptStore";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::AlreadySeeded: return "AlreadySeeded";
    case ErrorCode::CorruptGraph: return "CorruptGraph";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::DuplicateUser: return "DuplicateUser";
    case ErrorCode::WeakPassword: return "WeakPassword";
    case ErrorCode::Unauthorized: return "Unauthorized";
  }
  return "Unknown";
}

}  // namespace lbs
