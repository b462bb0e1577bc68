#pragma once

// Small UTF-8 helpers shared by the feature extractors.

#include <string>
#include <string_view>
#include <vector>

namespace tbw::text {

// Splits into code points; invalid bytes become single-byte units.
std::vector<std::string_view> code_points(std::string_view s);

// Lowercases ASCII and the Latin-1 / Latin Extended-A uppercase letters
// (Ë -> ë, Ñ -> ñ, ...). Everything else passes through.
std::string lower(std::string_view s);

std::string prefix(const std::vector<std::string_view>& cps, std::size_t k);
std::string suffix(const std::vector<std::string_view>& cps, std::size_t k);

bool has_digit(std::string_view s);
// ASCII punctuation except the apostrophe, which Panoan orthographies use
// as a letter (saltillo).
bool has_punct(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& items, std::string_view sep);

}  // namespace tbw::text
