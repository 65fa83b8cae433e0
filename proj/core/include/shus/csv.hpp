// Locale-independent CSV formatting and atomic file output.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace shus {

/// Shortest round-trip decimal representation, '.' decimal point, no locale.
std::string format_double(double v);

/// Writes content to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace shus
