#include "text.hpp"

#include <algorithm>

namespace tbw::text {

namespace {

std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

std::vector<std::string_view> code_points(std::string_view s) {
  std::vector<std::string_view> cps;
  std::size_t i = 0;
  while (i < s.size()) {
    auto len = sequence_length(static_cast<unsigned char>(s[i]));
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) {
        len = 1;
        break;
      }
    }
    cps.push_back(s.substr(i, len));
    i += len;
  }
  return cps;
}

std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto cp_text : code_points(s)) {
    const auto* b = reinterpret_cast<const unsigned char*>(cp_text.data());
    if (cp_text.size() == 1) {
      out += (b[0] >= 'A' && b[0] <= 'Z') ? static_cast<char>(b[0] + 32) : static_cast<char>(b[0]);
      continue;
    }
    if (cp_text.size() == 2) {
      char32_t cp = (static_cast<char32_t>(b[0] & 0x1F) << 6) | (b[1] & 0x3F);
      if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        cp += 0x20;
      } else if (cp >= 0x100 && cp <= 0x17F && cp % 2 == 0 && cp != 0x130 && cp != 0x138) {
        // Latin Extended-A pairs (mostly even = upper); good enough for
        // feature sharing.
        cp += 1;
      }
      append_utf8(out, cp);
      continue;
    }
    out += cp_text;
  }
  return out;
}

std::string prefix(const std::vector<std::string_view>& cps, std::size_t k) {
  std::string out;
  for (std::size_t i = 0; i < k && i < cps.size(); ++i) out += cps[i];
  return out;
}

std::string suffix(const std::vector<std::string_view>& cps, std::size_t k) {
  std::string out;
  const auto start = cps.size() > k ? cps.size() - k : 0;
  for (std::size_t i = start; i < cps.size(); ++i) out += cps[i];
  return out;
}

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool has_punct(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && u != '\'' && ((u >= '!' && u <= '/') || (u >= ':' && u <= '@') || (u >= '[' && u <= '`') ||
                                     (u >= '{' && u <= '~'));
  });
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace tbw::text
