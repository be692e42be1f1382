#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsecirc::detail {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Whole-string conversions; std::nullopt on trailing junk or overflow.
std::optional<double> to_double(std::string_view s);
std::optional<std::uint64_t> to_u64(std::string_view s);

/// Shortest text that parses back to exactly v.
std::string shortest(double v);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace sparsecirc::detail
