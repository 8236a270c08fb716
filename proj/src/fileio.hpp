#pragma once

#include <filesystem>
#include <string>

namespace lbs::fileio {

/// Writes `content` to a fresh temp file beside `dest`, synced to disk.
/// Throws Error{IoFailure}; nothing is left behind on failure.
std::filesystem::path write_temp(const std::string& content, const std::filesystem::path& dest);

/// Renames `temp` over `dest` and syncs the directory. Throws Error{IoFailure}.
void commit(const std::filesystem::path& temp, const std::filesystem::path& dest);

inline void atomic_write(const std::filesystem::path& dest, const std::string& content) {
  commit(write_temp(content, dest), dest);
}

}  // namespace lbs::fileio
