#include "cms/fileio.hpp"

#include <atomic>
#include <fstream>
#include <string>

#include <unistd.h>

#include "cms/errors.hpp"

namespace cms {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path,
                       const std::function<void(std::ostream&)>& writer) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1));
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw FormatError("cannot open " + tmp.string() + " for writing");
      }
      writer(out);
      out.flush();
      if (!out) {
        throw FormatError("write failed: " + tmp.string());
      }
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

}  // namespace cms
