#pragma once
// Small string helpers used across modules.

#include <string>
#include <string_view>
#include <vector>

namespace pdrr::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Runs of ASCII whitespace become a single space; leading/trailing removed.
std::string collapse_whitespace(std::string_view s);

// Lower-cased tokens split on anything that is not an ASCII letter/digit.
// Bytes >= 0x80 are kept inside tokens so UTF-8 labels survive intact.
std::vector<std::string> tokenize(std::string_view s);

std::vector<std::string> split(std::string_view s, std::string_view sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains_icase(std::string_view haystack, std::string_view needle);

}  // namespace pdrr::text
