#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "tbw/conllu.hpp"

namespace tbw {

// SplitMix64 generator. The exact sequence is part of the split contract so
// that a seed names the same split in every implementation:
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform integer in [0, bound) by modulo reduction; bound > 0.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }
  // Uniform double in [0, 1) from the top 53 bits.
  double uniform();

 private:
  std::uint64_t state_;
};

// Fisher-Yates from the back: for i = n-1 down to 1, swap(i, below(i + 1)).
template <typename Vec>
void seeded_shuffle(Vec& items, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Train/dev/test proportions as integer percentages summing to 100.
struct SplitSpec {
  std::array<unsigned, 3> percent{60, 20, 20};
  std::uint64_t seed = 1;

  // Parses "60/20/20". Throws InvalidSplit.
  static SplitSpec parse(std::string_view ratios, std::uint64_t seed);
  std::string ratios_str() const;
  void validate() const;

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct SplitSizes {
  std::size_t train = 0, dev = 0, test = 0;
};

// dev = floor(n * dev%), test = floor(n * test%), train takes the rest.
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

struct SplitResult {
  Treebank train, dev, test;
};

// Shuffles sentence indices with seeded_shuffle, assigns the first
// `train` shuffled positions to train, the next `dev` to dev and the rest to
// test, then restores corpus order inside each part. Throws TooFewSentences
// for fewer than 3 sentences.
SplitResult split(const Treebank& tb, const SplitSpec& spec);

// FORM and LEMMA become "_"; every other column is untouched.
Treebank delexicalize(const Treebank& tb);

enum class LabelHarmonization { Identity, StripSubtypes };

Treebank harmonize_labels(const Treebank& tb, LabelHarmonization mode);

}  // namespace tbw
