#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dialectid::detail {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Lines without their terminators. A trailing CR is stripped; a final empty
// line after the last LF is not reported.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace dialectid::detail
