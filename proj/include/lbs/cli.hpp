#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lbs/clock.hpp"

namespace lbs::cli {

/// Process-level inputs the commands read, injectable for tests.
struct Environment {
  std::function<std::optional<std::string>(const std::string&)> getenv;
  /// Reads a password without echo; nullopt when no terminal is available.
  std::function<std::optional<std::string>(const std::string& prompt)> read_password;
  Clock clock = system_now;
};

/// Environment backed by the real process (std::getenv, /dev/tty).
Environment process_environment();

/// Runs one `lbs` invocation. Returns the process exit code; data goes to
/// `out`, diagnostics to `err`. `serve` blocks until SIGINT/SIGTERM.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env);

}  // namespace lbs::cli
