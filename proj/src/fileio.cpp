#include "fileio.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "lbs/error.hpp"

namespace lbs::fileio {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_failure(const std::string& what, int err) {
  throw Error(ErrorCode::IoFailure, what + ": " + std::strerror(err));
}

fs::path dir_of(const fs::path& p) { return p.has_parent_path() ? p.parent_path() : fs::path("."); }

}  // namespace

fs::path write_temp(const std::string& content, const fs::path& dest) {
  std::string templ = (dir_of(dest) / (dest.filename().string() + ".tmp-XXXXXX")).string();
  const int fd = ::mkstemp(templ.data());
  if (fd < 0) io_failure("cannot create temporary file in " + dir_of(dest).string(), errno);
  const fs::path temp(templ);
  const auto fail = [&](const std::string& what) {
    const int err = errno;
    ::close(fd);
    ::unlink(temp.c_str());
    io_failure(what, err);
  };

  std::size_t off = 0;
  while (off < content.size()) {
    const ssize_t n = ::write(fd, content.data() + off, content.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("write failed for " + temp.string());
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fchmod(fd, 0644) != 0) fail("chmod failed for " + temp.string());
  if (::fsync(fd) != 0) fail("fsync failed for " + temp.string());
  if (::close(fd) != 0) {
    const int err = errno;
    ::unlink(temp.c_str());
    io_failure("close failed for " + temp.string(), err);
  }
  return temp;
}

void commit(const fs::path& temp, const fs::path& dest) {
  if (::rename(temp.c_str(), dest.c_str()) != 0) {
    const int err = errno;
    ::unlink(temp.c_str());
    io_failure("cannot rename " + temp.string() + " to " + dest.string(), err);
  }
  const int dfd = ::open(dir_of(dest).c_str(), O_RDONLY | O_DIRECTORY);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

}  // namespace lbs::fileio
