#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace voidplace {

/// Data suitable for exit code 3: unreadable or malformed input files.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration: exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form of a double (to_chars), so re-reading a
/// CSV reproduces the value bit-exactly and repeated runs are byte-identical.
std::string dtos(double x);

/// Write a whole file atomically: temp file in the same directory + rename.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text);

/// Split one CSV line into fields. Handles double-quoted fields (embedded
/// commas and doubled quotes); no multi-line fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace voidplace
