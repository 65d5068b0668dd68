#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace revint::text {

std::string_view trim(std::string_view s) noexcept;
bool is_blank(std::string_view s) noexcept;
bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept;
std::string to_lower_ascii(std::string_view s);

/// Splits on '\n'; a trailing '\r' on each line is dropped.
std::vector<std::string_view> split_lines(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::size_t count_words(std::string_view s);

}  // namespace revint::text
