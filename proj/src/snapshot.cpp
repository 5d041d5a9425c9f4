#include "cms/snapshot.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include "cms/errors.hpp"
#include "cms/fileio.hpp"

namespace cms {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'M', 'S', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (std::size_t i = 0; i < 8; ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  out.write(buf.data(), buf.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> buf{};
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    throw FormatError("snapshot: truncated file");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void write_snapshot(std::ostream& out, const Sketch& sketch) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, sketch.depth());
  put_u64(out, sketch.width());
  put_u64(out, sketch.config().master_seed);
  put_u64(out, sketch.items_ingested());
  for (Counter c : sketch.counters()) {
    put_u64(out, c);
  }
}

Sketch read_snapshot(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("snapshot: bad magic (expected \"CMS1\")");
  }
  SketchConfig cfg;
  cfg.depth = get_u64(in);
  cfg.width = get_u64(in);
  cfg.master_seed = get_u64(in);
  const std::uint64_t items = get_u64(in);
  if (cfg.depth == 0 || cfg.width == 0 ||
      cfg.depth > (std::uint64_t{1} << 32) / cfg.width) {
    throw FormatError("snapshot: implausible dimensions");
  }
  std::vector<Counter> counters(cfg.depth * cfg.width);
  for (Counter& c : counters) {
    c = get_u64(in);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("snapshot: trailing bytes after counter matrix");
  }
  try {
    return Sketch::from_state(cfg, items, std::move(counters));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& path, const Sketch& sketch) {
  write_file_atomic(path, [&](std::ostream& out) { write_snapshot(out, sketch); });
}

Sketch load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("snapshot: cannot open " + path.string());
  }
  return read_snapshot(in);
}

}  // namespace cms
