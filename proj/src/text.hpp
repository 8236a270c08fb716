#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace lbs::text {

/// Number of code points, or nullopt when `s` is not well-formed UTF-8.
std::optional<std::size_t> utf8_length(std::string_view s) noexcept;

std::string_view trim(std::string_view s) noexcept;

}  // namespace lbs::text
