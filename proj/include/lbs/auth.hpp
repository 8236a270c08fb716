#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "lbs/clock.hpp"

namespace lbs {

inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr std::chrono::seconds kDefaultTokenTtl = std::chrono::hours(24);

/// Stored admin identity. The hash is an Argon2id string carrying its own
/// salt and cost parameters.
struct Credentials {
  std::string username;
  std::string password_hash;
};

/// Argon2id (libsodium crypto_pwhash_str, interactive limits).
std::string hash_password(const std::string& password);
/// Constant-time verification against an encoded hash.
bool verify_password(const std::string& encoded_hash, const std::string& password);

/// Admin accounts persisted as `users.json` in the data directory:
/// `{"users": [{"username": "...", "password_hash": "$argon2id$..."}]}`
class CredentialStore {
 public:
  explicit CredentialStore(std::filesystem::path path) : path_(std::move(path)) {}

  /// Throws Error{DuplicateUser}, Error{WeakPassword}, Error{Validation}.
  void add_user(const std::string& username, const std::string& password);

  /// True iff the user exists and the password matches. Unknown users still
  /// pay for one hash verification so timing does not reveal which part failed.
  bool verify(const std::string& username, const std::string& password) const;

  /// Throws Error{CorruptStore} when the file is malformed.
  std::map<std::string, Credentials> load() const;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

struct Session {
  std::string token;
  std::string username;
  Timestamp expires_at;
};

/// In-memory bearer tokens with a fixed lifetime.
class SessionManager {
 public:
  explicit SessionManager(Clock clock = system_now, std::chrono::seconds ttl = kDefaultTokenTtl)
      : clock_(std::move(clock)), ttl_(ttl) {}

  Session issue(const std::string& username);

  /// The session for `token` if it exists and has not expired.
  std::optional<Session> authorize(const std::string& token);

  std::chrono::seconds ttl() const noexcept { return ttl_; }

 private:
  Clock clock_;
  std::chrono::seconds ttl_;
  std::mutex mutex_;
  std::map<std::string, Session> sessions_;
};

}  // namespace lbs
