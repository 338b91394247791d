#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace benign::io {

/// Writes through a sibling temporary file and renames it over `path`, so
/// readers never observe a partial file. Throws IoError on any failure.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

std::string read_file(const std::filesystem::path& path);

}  // namespace benign::io
