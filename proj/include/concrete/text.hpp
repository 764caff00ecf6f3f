#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace concrete {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string_view> split_fields(std::string_view line, char delimiter);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

/// Fixed-point with `digits` decimals; used for reports that must be
/// byte-stable.
std::string format_fixed(double value, int digits);

}  // namespace concrete
