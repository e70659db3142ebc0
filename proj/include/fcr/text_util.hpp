#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fcr {

std::string_view trim(std::string_view text);

/// Collapses runs of spaces and tabs to one space and trims both ends.
/// Newlines are kept; whitespace around them is dropped.
std::string normalize_whitespace(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace fcr
