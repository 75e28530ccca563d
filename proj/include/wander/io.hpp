#pragma once

#include <filesystem>
#include <string>

namespace wander {

/// Throws IoError.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`, so readers
/// never observe a partial file. Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

/// "%.9g" then parsed back, so written and re-read values agree exactly.
double round_sig9(double v);

}  // namespace wander
