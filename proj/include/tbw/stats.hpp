#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tbw/conllu.hpp"

namespace tbw {

struct DistributionRow {
  std::string label;
  std::size_t count = 0;
  double freq = 0.0;  // count / corpus token total
};

enum class DistributionKey { Upos, Deprel };

// One row per distinct label, sorted bytewise by label. Throws EmptyCorpus.
std::vector<DistributionRow> upos_distribution(const Treebank& tb);
std::vector<DistributionRow> deprel_distribution(const Treebank& tb);
std::vector<DistributionRow> distribution(const Treebank& tb, DistributionKey key);

struct LengthStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1 denominator); 0 for one sentence
  std::size_t max = 0;
  std::size_t sentences = 0;
  std::map<std::size_t, std::size_t> histogram;  // length -> sentence count
};

LengthStats length_stats(const Treebank& tb, bool include_punct = true);
// Rebuilds summary statistics from a histogram; used to merge partial results.
LengthStats length_stats_from_histogram(const std::map<std::size_t, std::size_t>& histogram);

struct SplitTable {
  std::vector<std::string> part_names;
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;  // [label][part]
  std::vector<std::size_t> totals;               // [part]
};

SplitTable split_distribution(const std::vector<std::pair<std::string, Treebank>>& parts, DistributionKey key);

// Text renderers used by the CLI. TSV carries 4-decimal frequencies; tables
// round to 2 decimals.
std::string distribution_tsv(const std::vector<DistributionRow>& rows);
std::string distribution_table(const std::vector<DistributionRow>& rows, const std::string& title);
std::string length_tsv(const LengthStats& stats);
std::string length_table(const LengthStats& stats);
std::string split_tsv(const SplitTable& table);
std::string split_table_text(const SplitTable& table, const std::string& title);

}  // namespace tbw
