#pragma once

#include <filesystem>
#include <string>

namespace idmc {

// Shortest decimal string that round-trips the double exactly. Infinities
// serialize as "inf"/"-inf".
std::string format_double(double value);

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace idmc
