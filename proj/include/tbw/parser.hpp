#pragma once

// Arc-factored graph-based dependency parser: averaged perceptron arc
// scores, Chu-Liu/Edmonds decoding with a single-root constraint, and an
// averaged multiclass perceptron labeler.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tbw/conllu.hpp"
#include "tbw/perceptron.hpp"
#include "tbw/tagger.hpp"

namespace tbw {

// Dense (n+1) x (n+1) matrix of head -> dependent scores. Row 0 is the
// artificial root; column 0 and the diagonal are never used.
class ArcScores {
 public:
  explicit ArcScores(std::size_t n = 0) : n_(n), data_((n + 1) * (n + 1), 0.0) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t head, std::size_t dep) { return data_[head * (n_ + 1) + dep]; }
  double at(std::size_t head, std::size_t dep) const { return data_[head * (n_ + 1) + dep]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// heads[d - 1] is the head of token d.
using HeadAssignment = std::vector<int>;

double tree_score(const ArcScores& scores, const HeadAssignment& heads);

// Root penalty used to enforce a single root: any tree with k root
// attachments is charged k * penalty. It exceeds the largest possible
// score difference between two trees, n * (max - min) + 1, so every
// optimal penalized tree has exactly one root attachment.
double single_root_penalty(const ArcScores& scores);

// Maximum-score arborescence rooted at 0 with exactly one root attachment.
// Ties go to the smaller head index.
HeadAssignment decode_mst(const ArcScores& scores);

// Chu-Liu/Edmonds without the single-root constraint.
HeadAssignment chu_liu_edmonds(const ArcScores& scores);

struct ParserModel {
  std::vector<std::string> labels;
  LexMode mode = LexMode::Lex;
  FeatureIndex arc_features;
  std::vector<double> arc_weights;  // averaged
  FeatureIndex label_features;
  std::vector<double> label_weights;  // averaged, label_features.size() * labels.size()
  bool trained = false;
  TrainingMeta meta;

  void save(std::ostream& out) const;
  static ParserModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static ParserModel load_file(const std::string& path);

  friend bool operator==(const ParserModel&, const ParserModel&) = default;
};

// Arc features for head h (0 = root) and dependent d of sentence s. Forms
// are read from the sentence as given.
std::vector<std::string> arc_features(const Sentence& s, std::size_t head, std::size_t dep);
std::vector<std::string> label_features(const Sentence& s, std::size_t head, std::size_t dep);

// Throws UntrainedModel.
ArcScores score_arcs(const ParserModel& model, const Sentence& s);

struct ParserTrainOptions {
  int epochs = 10;
  std::uint64_t seed = 1;
  LexMode mode = LexMode::Lex;
};

// Throws EmptyTrainingSet, NonTreeInput, UnsupportedAnnotation. In delex
// mode the training corpus is delexicalized first.
ParserModel train_parser(const Treebank& train, const ParserTrainOptions& options);

struct ParseResult {
  HeadAssignment heads;
  std::vector<DepRel> labels;
};

ParseResult parse(const ParserModel& model, const Sentence& s);
// Copies tb with HEAD and DEPREL replaced by predictions.
Treebank parse_treebank(const ParserModel& model, const Treebank& tb);

struct LabelAttachment {
  std::size_t gold = 0;        // scored tokens with this gold label
  std::size_t head_correct = 0;
  std::size_t both_correct = 0;
};

struct DepEvalReport {
  double uas = 0.0;
  double las = 0.0;
  std::size_t token_count = 0;
  std::size_t head_correct = 0;
  std::size_t both_correct = 0;
  std::map<std::string, LabelAttachment> per_label;

  std::string tsv() const;
};

// LAS requires the head and the full deprel label to match. Throws
// AlignmentMismatch when sentence or token counts differ.
DepEvalReport evaluate_dep(const Treebank& pred, const Treebank& gold, bool exclude_punct = false);

// UAS of trees decoded from uniform [0, 1) random scores.
double random_tree_uas(const Treebank& gold, std::uint64_t seed);

}  // namespace tbw
