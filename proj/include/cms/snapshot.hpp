#pragma once

#include <filesystem>
#include <iosfwd>

#include "cms/sketch.hpp"

namespace cms {

// Binary snapshot: "CMS1", then depth, width, master_seed, items_ingested as
// little-endian u64, then depth*width counters row-major as little-endian u64.
void write_snapshot(std::ostream& out, const Sketch& sketch);
Sketch read_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const Sketch& sketch);
Sketch load_snapshot(const std::filesystem::path& path);

}  // namespace cms
