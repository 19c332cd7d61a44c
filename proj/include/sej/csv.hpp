#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sej {

// Fixed 6-decimal rendering used by every CSV output.
std::string fixed6(double value);

// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

// Lines of a text blob with any trailing '\r' removed.
std::vector<std::string> split_lines(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace sej
