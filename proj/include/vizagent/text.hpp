#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vizagent {

// Locale-independent number formatting used wherever output must be byte-stable.
std::string format_fixed(double value, int decimals);
std::string format_general(double value, int significant = 6);
// Shortest representation that round-trips exactly.
std::string format_shortest(double value);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string read_file(const std::string& path);
// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::string& path, std::string_view content);

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace vizagent
