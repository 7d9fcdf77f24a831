#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace tfec::io {

/// Writes `content` to a temporary sibling file and renames it over `path`,
/// so readers never observe a partially written file. Creates parent
/// directories as needed. Throws IoError on failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace tfec::io
