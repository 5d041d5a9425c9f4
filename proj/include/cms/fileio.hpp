#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

namespace cms {

// Writes through a sibling temp file and renames it over `path`, so readers
// never observe a partially written file. The temp file is removed if
// `writer` throws.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

}  // namespace cms
