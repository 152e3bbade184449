#pragma once

#include <string>
#include <vector>

namespace hotspot {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// Writes content to a temp file next to path, then renames it into place.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// Comma split with trailing-\r tolerance; no quoting.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace hotspot
