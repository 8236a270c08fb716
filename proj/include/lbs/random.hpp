#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace lbs {

/// Source of fresh POI ids; tests inject a deterministic sequence.
using IdGenerator = std::function<std::string()>;

/// Random (version 4) UUID in canonical lowercase 8-4-4-4-12 form.
std::string random_uuid();

bool is_uuid(std::string_view text) noexcept;

/// 256 bits from the OS CSPRNG, base64url without padding (43 chars).
std::string random_token();

}  // namespace lbs
