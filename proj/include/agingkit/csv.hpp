#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small CSV helpers shared by the series, trace, and report formats.
namespace agingkit::csv {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

std::optional<double> parse_number(std::string_view text);

/// Splits on ',' and trims ASCII spaces around each field. No quoting.
std::vector<std::string_view> split_fields(std::string_view line);

/// Reads one line, dropping a trailing '\r'. Returns false at end of input.
bool read_line(std::istream& in, std::string& line);

/// Writes via `write` to a temporary sibling file and renames it into place.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& write);

}  // namespace agingkit::csv
