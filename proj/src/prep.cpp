#include "tbw/prep.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "tbw/error.hpp"

namespace tbw {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SplitSpec SplitSpec::parse(std::string_view ratios, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  std::size_t part = 0;
  std::size_t start = 0;
  while (true) {
    const auto slash = ratios.find('/', start);
    const auto field = ratios.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (part >= 3 || field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw Error(ErrorCode::InvalidSplit, fmt::format("ratios '{}' are not three integers like 60/20/20", ratios));
    }
    spec.percent[part++] = value;
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (part != 3) throw Error(ErrorCode::InvalidSplit, fmt::format("ratios '{}' need three parts", ratios));
  spec.validate();
  return spec;
}

std::string SplitSpec::ratios_str() const { return fmt::format("{}/{}/{}", percent[0], percent[1], percent[2]); }

void SplitSpec::validate() const {
  if (percent[0] + percent[1] + percent[2] != 100) {
    throw Error(ErrorCode::InvalidSplit, fmt::format("ratios {} do not sum to 100", ratios_str()));
  }
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  SplitSizes sizes;
  sizes.dev = n * spec.percent[1] / 100;
  sizes.test = n * spec.percent[2] / 100;
  sizes.train = n - sizes.dev - sizes.test;
  return sizes;
}

SplitResult split(const Treebank& tb, const SplitSpec& spec) {
  const auto n = tb.sentences.size();
  if (n < 3) {
    throw Error(ErrorCode::TooFewSentences, fmt::format("'{}' has {} sentences, need at least 3", tb.source_name, n));
  }
  const auto sizes = split_sizes(n, spec);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  seeded_shuffle(order, spec.seed);

  std::vector<int> part(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    part[order[i]] = i < sizes.train ? 0 : (i < sizes.train + sizes.dev ? 1 : 2);
  }
  SplitResult out;
  out.train.source_name = tb.source_name + ".train";
  out.dev.source_name = tb.source_name + ".dev";
  out.test.source_name = tb.source_name + ".test";
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = part[i] == 0 ? out.train : (part[i] == 1 ? out.dev : out.test);
    dst.sentences.push_back(tb.sentences[i]);
  }
  return out;
}

Treebank delexicalize(const Treebank& tb) {
  Treebank out = tb;
  for (auto& s : out.sentences) {
    for (auto& t : s.tokens) {
      t.form = "_";
      t.lemma = "_";
    }
  }
  return out;
}

Treebank harmonize_labels(const Treebank& tb, LabelHarmonization mode) {
  Treebank out = tb;
  if (mode == LabelHarmonization::Identity) return out;
  for (auto& s : out.sentences) {
    for (auto& t : s.tokens) t.deprel.subtype.reset();
  }
  return out;
}

}  // namespace tbw
