#include "lbs/auth.hpp"

#include <sodium.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "fileio.hpp"
#include "lbs/error.hpp"
#include "lbs/random.hpp"
#include "text.hpp"

namespace lbs {

using nlohmann::json;

std::string hash_password(const std::string& password) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), crypto_pwhash_OPSLIMIT_INTERACTIVE,
                        crypto_pwhash_MEMLIMIT_INTERACTIVE) != 0) {
    throw std::runtime_error("password hashing ran out of memory");
  }
  return out;
}

bool verify_password(const std::string& encoded_hash, const std::string& password) {
  if (sodium_init() < 0) return false;
  return crypto_pwhash_str_verify(encoded_hash.c_str(), password.data(), password.size()) == 0;
}

std::map<std::string, Credentials> CredentialStore::load() const {
  std::map<std::string, Credentials> users;
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec)) return users;
  std::ifstream in(path_, std::ios::binary);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptStore, path_.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("users") || !doc["users"].is_array()) {
    throw Error(ErrorCode::CorruptStore, path_.string() + ": expected {\"users\": [...]}");
  }
  for (const auto& u : doc["users"]) {
    if (!u.is_object() || !u.contains("username") || !u["username"].is_string() || !u.contains("password_hash") ||
        !u["password_hash"].is_string()) {
      throw Error(ErrorCode::CorruptStore, path_.string() + ": malformed user record");
    }
    Credentials c{u["username"].get<std::string>(), u["password_hash"].get<std::string>()};
    users.emplace(c.username, std::move(c));
  }
  return users;
}

void CredentialStore::add_user(const std::string& username, const std::string& password) {
  const auto len = text::utf8_length(username);
  if (!len || *len == 0 || text::trim(username) != username) {
    throw Error(ErrorCode::Validation, "username must be non-empty UTF-8 without surrounding whitespace",
                "username");
  }
  if (password.size() < kMinPasswordLength) {
    throw Error(ErrorCode::WeakPassword, "password must be at least 8 characters");
  }
  auto users = load();
  if (users.contains(username)) throw Error(ErrorCode::DuplicateUser, "user '" + username + "' already exists");
  users.emplace(username, Credentials{username, hash_password(password)});

  json list = json::array();
  for (const auto& [name, c] : users) list.push_back({{"username", c.username}, {"password_hash", c.password_hash}});
  fileio::atomic_write(path_, json{{"users", std::move(list)}}.dump(2) + "\n");
}

bool CredentialStore::verify(const std::string& username, const std::string& password) const {
  // Fixed decoy so unknown usernames cost the same as wrong passwords.
  static const std::string decoy = hash_password(random_token());
  const auto users = load();
  const auto it = users.find(username);
  if (it == users.end()) {
    verify_password(decoy, password);
    return false;
  }
  return verify_password(it->second.password_hash, password);
}

Session SessionManager::issue(const std::string& username) {
  Session s{random_token(), username, clock_() + ttl_};
  std::lock_guard lock(mutex_);
  const auto now = clock_();
  std::erase_if(sessions_, [&](const auto& kv) { return kv.second.expires_at <= now; });
  sessions_.emplace(s.token, s);
  return s;
}

std::optional<Session> SessionManager::authorize(const std::string& token) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(token);
  if (it == sessions_.end()) return std::nullopt;
  if (clock_() >= it->second.expires_at) {
    sessions_.erase(it);
    return std::nullopt;
  }
  return it->second;
}

}  // namespace lbs
