#pragma once

// Experiment matrices for POS tagging and dependency parsing transfer
// settings, seeded runs and result tables.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tbw/conllu.hpp"
#include "tbw/parser.hpp"
#include "tbw/prep.hpp"
#include "tbw/tagger.hpp"

namespace tbw {

enum class Task { Pos, Dep };

std::string_view task_name(Task task);
Task task_from_name(std::string_view name);

// Corpus identifiers used by the built-in matrices.
inline constexpr std::string_view kKakataibo = "cbr";
inline constexpr std::string_view kShipibo = "shp";
inline constexpr std::string_view kKazakh = "ktb";

struct ExperimentSpec {
  std::string id;
  Task task = Task::Pos;
  std::string setting;  // short label shown in tables ("mono", "delex to lex", ...)
  std::string train_source;
  std::optional<std::string> finetune_source;
  LexMode source_mode = LexMode::Lex;
  LexMode target_mode = LexMode::Lex;
  std::vector<std::string> eval_targets;
  std::map<std::string, std::string> split_ratios;  // corpus -> "60/20/20"
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int epochs = 10;
  std::optional<int> finetune_epochs;  // defaults to epochs
  LabelHarmonization harmonization = LabelHarmonization::Identity;

  // Throws InvalidArgument when the definition breaks its own invariants
  // (fine-tuning outside POS, delex modes for POS).
  void validate() const;
  std::vector<std::string> corpora() const;
  std::string ratios_for(const std::string& corpus) const;
};

// pos: 3 settings; dep: 7 settings.
std::vector<ExperimentSpec> builtin_matrix(Task task);

struct MetricKey {
  std::string target;
  std::string metric;

  friend auto operator<=>(const MetricKey&, const MetricKey&) = default;
};

struct MetricSummary {
  std::vector<double> per_seed;  // fractions in [0, 1], one per seed in spec order
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for one seed
};

struct ExperimentResult {
  ExperimentSpec spec;
  bool skipped = false;
  std::string skip_reason;
  std::vector<MetricKey> order;  // metric insertion order
  std::map<MetricKey, MetricSummary> metrics;

  const MetricSummary* find(const std::string& target, const std::string& metric) const;
};

using CorpusSet = std::map<std::string, Treebank>;

struct RunOptions {
  // Corpora a spec may reference without failing; specs that need a
  // missing optional corpus are skipped.
  std::set<std::string> optional_corpora{std::string(kKazakh)};
  unsigned threads = 0;  // 0 = one per seed, capped by hardware concurrency
};

// Throws MissingCorpus for an absent non-optional corpus.
ExperimentResult run_experiment(const ExperimentSpec& spec, const CorpusSet& corpora, const RunOptions& options = {});

// Trained models for one seed, exposed so callers can check that settings
// share models. The splits are those the run evaluates on.
struct SeedArtifacts {
  std::map<std::string, SplitResult> splits;
  std::optional<TaggerModel> tagger;
  std::optional<TaggerModel> source_tagger;  // before fine-tuning
  std::optional<ParserModel> parser;
};

SeedArtifacts train_seed(const ExperimentSpec& spec, const CorpusSet& corpora, std::uint64_t seed);

// TSV: experiment<TAB>target<TAB>metric<TAB>mean<TAB>sd<TAB>seeds, scores
// in percentage points with 4 decimals. Skipped experiments emit no rows.
std::string results_tsv(const std::vector<ExperimentResult>& results);
// Aligned table with "mean±sd" cells rounded to 1 decimal; blank cells for
// metrics an experiment does not report.
std::string render_results_table(const std::vector<ExperimentResult>& results);

// Table column headings, e.g. "cbr accuracy" for POS and "UAS cbr" for
// dependency results.
std::vector<std::string> result_columns(const std::vector<ExperimentResult>& results);

}  // namespace tbw
