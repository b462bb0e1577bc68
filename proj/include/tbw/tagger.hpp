#pragma once

// Averaged structured perceptron POS tagger with affix features and exact
// Viterbi decoding over the tag-history features.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tbw/conllu.hpp"
#include "tbw/perceptron.hpp"

namespace tbw {

enum class LexMode { Lex, Delex };

std::string_view lex_mode_name(LexMode mode);
LexMode lex_mode_from_name(std::string_view name);

inline constexpr std::string_view kBoundary = "<s>";
inline constexpr std::string_view kFormPlaceholder = "_";

// Feature templates in registry order. A model records the list it was
// trained with; warm starts require an identical list.
const std::vector<std::string>& tagger_templates();

// Tag-independent observation features for token `position` (1-based).
std::vector<std::string> observation_features(const Sentence& s, std::size_t position, LexMode mode);

// Tag-history features given the previous tag and the one before it
// (kBoundary before the sentence start).
std::vector<std::string> history_features(std::string_view prev_tag, std::string_view prev2_tag);

// Full feature list: observation features followed by history features.
std::vector<std::string> extract_features(const Sentence& s, std::size_t position,
                                          std::pair<std::string_view, std::string_view> prev_tags, LexMode mode);

struct TrainingMeta {
  std::vector<std::string> sources;
  int epochs = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

struct TaggerModel {
  std::vector<std::string> tagset;
  std::vector<std::string> templates;
  LexMode mode = LexMode::Lex;
  FeatureIndex features;
  std::vector<double> weights;  // averaged, features.size() * tagset.size()
  bool trained = false;
  TrainingMeta meta;

  double weight(std::string_view feature, std::size_t tag) const;

  void save(std::ostream& out) const;
  static TaggerModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static TaggerModel load_file(const std::string& path);

  friend bool operator==(const TaggerModel&, const TaggerModel&) = default;
};

enum class Averaging { Incremental, ReplayLog };

struct TaggerTrainOptions {
  int epochs = 10;
  std::uint64_t seed = 1;
  LexMode mode = LexMode::Lex;
  const TaggerModel* warm_start = nullptr;
  Averaging averaging = Averaging::Incremental;
};

// Throws EmptyTrainingSet, UnsupportedAnnotation, InvalidArgument (template
// or mode mismatch with the warm-start model).
TaggerModel train_tagger(const Treebank& train, const TaggerTrainOptions& options);

// Viterbi-optimal tags under the averaged weights; ties go to the lower tag
// index. Throws UntrainedModel.
std::vector<PosTag> tag(const TaggerModel& model, const Sentence& s);
Treebank tag_treebank(const TaggerModel& model, const Treebank& tb);

// Score of a complete tag sequence (indices into model.tagset).
double sequence_score(const TaggerModel& model, const Sentence& s, const std::vector<std::size_t>& tags);
// Decoded tag indices.
std::vector<std::size_t> viterbi(const TaggerModel& model, const Sentence& s);

struct TagScores {
  std::string tag;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t support = 0;    // gold count
  std::size_t predicted = 0;  // predicted count
};

struct AverageScores {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t total = 0;
};

struct PosEvalReport {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<TagScores> per_tag;  // gold support descending, then label
  AverageScores micro;
  AverageScores macro;  // over tags with gold support > 0

  std::string table() const;
  std::string tsv() const;
};

// Scores aligned gold/predicted label sequences. 0/0 ratios count as 0.
PosEvalReport score_pos(const std::vector<std::string>& gold, const std::vector<std::string>& predicted);

// Throws EmptyTestSet; exclude_punct drops gold-PUNCT tokens.
PosEvalReport evaluate_pos(const TaggerModel& model, const Treebank& test, bool exclude_punct = false);

}  // namespace tbw
