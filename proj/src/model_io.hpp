#pragma once

// Flat model file helpers. A model file is one tab-separated header line
// `<magic>\tv<version>\tkey=value...` followed by `feature\ttarget\tweight`
// lines.

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "tbw/error.hpp"
#include "text.hpp"

namespace tbw::model_io {

inline constexpr int kFormatVersion = 1;

struct Header {
  std::map<std::string, std::string> fields;

  const std::string& get(const std::string& key) const {
    const auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorCode::BadModelFile, fmt::format("header lacks '{}'", key), 1);
    return it->second;
  }
};

inline Header read_header(std::istream& in, std::string_view magic) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::BadModelFile, "empty model file", 1);
  const auto cols = text::split(line, '\t');
  if (cols.size() < 2 || cols[0] != magic) {
    throw Error(ErrorCode::BadModelFile, fmt::format("expected a '{}' model", magic), 1);
  }
  if (cols[1] != fmt::format("v{}", kFormatVersion)) {
    throw Error(ErrorCode::BadModelFile, fmt::format("unsupported model version '{}'", cols[1]), 1);
  }
  Header h;
  for (std::size_t i = 2; i < cols.size(); ++i) {
    const auto eq = cols[i].find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadModelFile, fmt::format("bad header field '{}'", cols[i]), 1);
    h.fields[cols[i].substr(0, eq)] = cols[i].substr(eq + 1);
  }
  return h;
}

struct WeightLine {
  std::string feature;
  std::string target;
  double weight = 0.0;
};

// Returns false at end of input.
inline bool read_weight(std::istream& in, WeightLine& out, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto last = line.rfind('\t');
    const auto first = last == std::string::npos ? std::string::npos : line.rfind('\t', last - 1);
    if (first == std::string::npos || last == 0) {
      throw Error(ErrorCode::BadModelFile, "expected feature<TAB>target<TAB>weight", line_no);
    }
    out.feature = line.substr(0, first);
    out.target = line.substr(first + 1, last - first - 1);
    try {
      std::size_t used = 0;
      const auto value = line.substr(last + 1);
      out.weight = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadModelFile, "weight is not a number", line_no);
    }
    return true;
  }
  return false;
}

inline std::string format_weight(double w) { return fmt::format("{:.17g}", w); }

}  // namespace tbw::model_io
