#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rainval::detail {

/// Splits one CSV record. Handles double-quoted fields with `""` escapes and
/// trims surrounding whitespace of unquoted fields.
std::vector<std::string> split_csv(std::string_view line);

/// Splits text into lines, dropping a trailing '\r' from each and a leading
/// UTF-8 byte-order mark from the first.
std::vector<std::string_view> split_lines(std::string_view text);

std::string_view trim(std::string_view s);

/// Strict decimal parse of the whole field; false on trailing garbage.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, int& out);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);
void write_binary_file(const std::filesystem::path& path, const std::vector<std::byte>& content);

/// Fixed six-significant-digit rendering used by every report writer.
std::string format_number(double v);

/// Rounds to six significant digits so JSON numbers match the CSV text.
double round6(double v);

/// Reduces a label to characters safe for file names.
std::string file_token(std::string_view label);

}  // namespace rainval::detail
