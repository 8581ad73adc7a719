#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace robex::csv {

/// Locale-independent number formatting with 17 significant digits, enough to
/// round-trip any double bit-exactly. Repeated runs with identical inputs
/// therefore produce byte-identical files.
std::string format(double value);
std::string format(int value);
std::string format(std::uint64_t value);

/// Writes header + rows, comma-separated, one trailing newline per line.
/// Throws std::runtime_error when the file cannot be opened.
void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

}  // namespace robex::csv
