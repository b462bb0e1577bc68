#include "tbw/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "model_io.hpp"
#include "tbw/error.hpp"
#include "tbw/prep.hpp"
#include "text.hpp"

namespace tbw {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kEndBoundary = "</s>";
constexpr std::string_view kTaggerMagic = "tbw-tagger";

const std::string& form_for(const Token& t, LexMode mode) {
  static const std::string placeholder(kFormPlaceholder);
  return mode == LexMode::Delex ? placeholder : t.form;
}

std::string prev1_feature(std::string_view prev) { return fmt::format("prev_tag={}", prev); }
std::string prev2_feature(std::string_view prev2, std::string_view prev) {
  return fmt::format("prev2_tags={}|{}", prev2, prev);
}

// Decoding tables for one weight vector. Index T (== tagset size) stands
// for the sentence-start boundary in history positions.
class Scorer {
 public:
  Scorer(const FeatureIndex& index, std::size_t tags, std::vector<std::string> tag_names,
         const std::vector<std::optional<FeatureId>>& trans1, const std::vector<std::optional<FeatureId>>& trans2)
      : index_(index), tags_(tags), names_(std::move(tag_names)), trans1_ids_(trans1), trans2_ids_(trans2) {}

  // Reads weights through `row(feature)` and precomputes transition scores.
  template <typename Row>
  void load_transitions(Row row) {
    const auto h = tags_ + 1;
    t1_.assign(h * tags_, 0.0);
    t2_.assign(h * h * tags_, 0.0);
    for (std::size_t a = 0; a < h; ++a) {
      if (const auto id = trans1_ids_[a]) {
        const double* r = row(*id);
        for (std::size_t c = 0; c < tags_; ++c) t1_[a * tags_ + c] = r[c];
      }
    }
    for (std::size_t ba = 0; ba < h * h; ++ba) {
      if (const auto id = trans2_ids_[ba]) {
        const double* r = row(*id);
        for (std::size_t c = 0; c < tags_; ++c) t2_[ba * tags_ + c] = r[c];
      }
    }
  }

  double t1(std::size_t a, std::size_t c) const { return t1_[a * tags_ + c]; }
  double t2(std::size_t b, std::size_t a, std::size_t c) const { return t2_[(b * (tags_ + 1) + a) * tags_ + c]; }
  std::size_t tags() const { return tags_; }
  std::size_t start() const { return tags_; }

  // emission: n * T, row-major by position.
  std::vector<std::size_t> decode(const std::vector<double>& emission, std::size_t n) const {
    const std::size_t T = tags_;
    const std::size_t H = T + 1;
    const std::size_t S = start();
    // delta[a * T + c]: best score of a prefix ending in tags (a, c)
    std::vector<double> delta(H * T, kNegInf), next(H * T, kNegInf);
    std::vector<std::vector<std::size_t>> back(n, std::vector<std::size_t>(H * T, S));

    for (std::size_t c = 0; c < T; ++c) delta[S * T + c] = emission[c] + t1(S, c) + t2(S, S, c);
    for (std::size_t i = 1; i < n; ++i) {
      std::fill(next.begin(), next.end(), kNegInf);
      for (std::size_t a = 0; a < T; ++a) {
        for (std::size_t c = 0; c < T; ++c) {
          const double local = emission[i * T + c] + t1(a, c);
          double best = kNegInf;
          std::size_t arg = S;
          if (i == 1) {
            best = delta[S * T + a] + t2(S, a, c);
          } else {
            for (std::size_t b = 0; b < T; ++b) {
              const double v = delta[b * T + a] + t2(b, a, c);
              if (v > best) {
                best = v;
                arg = b;
              }
            }
          }
          next[a * T + c] = best + local;
          back[i][a * T + c] = arg;
        }
      }
      std::swap(delta, next);
    }

    std::size_t best_a = S, best_c = 0;
    double best = kNegInf;
    for (std::size_t c = 0; c < T; ++c) {
      for (std::size_t a = 0; a < H; ++a) {
        const double v = delta[a * T + c];
        if (v > best) {
          best = v;
          best_a = a;
          best_c = c;
        }
      }
    }
    std::vector<std::size_t> tags(n);
    tags[n - 1] = best_c;
    if (n >= 2) tags[n - 2] = best_a;
    for (std::size_t i = n - 1; i >= 2; --i) tags[i - 2] = back[i][tags[i - 1] * T + tags[i]];
    return tags;
  }

  double score(const std::vector<double>& emission, const std::vector<std::size_t>& tags) const {
    double total = 0.0;
    for (std::size_t i = 0; i < tags.size(); ++i) {
      const auto a = i >= 1 ? tags[i - 1] : start();
      const auto b = i >= 2 ? tags[i - 2] : start();
      total += emission[i * tags_ + tags[i]] + t1(a, tags[i]) + t2(b, a, tags[i]);
    }
    return total;
  }

  const FeatureIndex& index() const { return index_; }

 private:
  const FeatureIndex& index_;
  std::size_t tags_;
  std::vector<std::string> names_;
  std::vector<std::optional<FeatureId>> trans1_ids_;
  std::vector<std::optional<FeatureId>> trans2_ids_;
  std::vector<double> t1_, t2_;
};

std::vector<std::string> history_names(const std::vector<std::string>& tagset) {
  auto names = tagset;
  names.emplace_back(kBoundary);
  return names;
}

// Transition feature ids for every (prev2, prev) history pair.
template <typename Lookup>
void transition_ids(const std::vector<std::string>& tagset, Lookup lookup, std::vector<std::optional<FeatureId>>& t1,
                    std::vector<std::optional<FeatureId>>& t2) {
  const auto names = history_names(tagset);
  const auto h = names.size();
  t1.assign(h, std::nullopt);
  t2.assign(h * h, std::nullopt);
  for (std::size_t a = 0; a < h; ++a) t1[a] = lookup(prev1_feature(names[a]));
  for (std::size_t b = 0; b < h; ++b) {
    for (std::size_t a = 0; a < h; ++a) t2[b * h + a] = lookup(prev2_feature(names[b], names[a]));
  }
}

std::vector<double> model_emission(const TaggerModel& model, const Sentence& s) {
  const auto T = model.tagset.size();
  std::vector<double> emission(s.size() * T, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (const auto& f : observation_features(s, i + 1, model.mode)) {
      const auto id = model.features.find(f);
      if (!id) continue;
      const double* row = model.weights.data() + static_cast<std::size_t>(*id) * T;
      for (std::size_t c = 0; c < T; ++c) emission[i * T + c] += row[c];
    }
  }
  return emission;
}

Scorer model_scorer(const TaggerModel& model) {
  std::vector<std::optional<FeatureId>> t1, t2;
  transition_ids(model.tagset, [&](const std::string& f) { return model.features.find(f); }, t1, t2);
  Scorer scorer(model.features, model.tagset.size(), model.tagset, t1, t2);
  const auto T = model.tagset.size();
  scorer.load_transitions([&](FeatureId id) { return model.weights.data() + static_cast<std::size_t>(id) * T; });
  return scorer;
}

void require_trained(const TaggerModel& model) {
  if (!model.trained || model.tagset.empty()) throw Error(ErrorCode::UntrainedModel, "tagger model is not trained");
}

std::string safe_list(const std::vector<std::string>& items) {
  std::vector<std::string> cleaned;
  for (auto item : items) {
    std::replace(item.begin(), item.end(), '\t', ' ');
    std::replace(item.begin(), item.end(), ',', ';');
    cleaned.push_back(item);
  }
  return text::join(cleaned, ",");
}

}  // namespace

std::string_view lex_mode_name(LexMode mode) { return mode == LexMode::Lex ? "lex" : "delex"; }

LexMode lex_mode_from_name(std::string_view name) {
  if (name == "lex") return LexMode::Lex;
  if (name == "delex") return LexMode::Delex;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown lexicalization mode '{}'", name));
}

const std::vector<std::string>& tagger_templates() {
  static const std::vector<std::string> templates = {
      "bias", "form", "lower", "prefix1-4", "suffix1-4", "has_digit", "has_punct",
      "prev_form", "next_form", "prev_tag", "prev2_tags",
  };
  return templates;
}

std::vector<std::string> observation_features(const Sentence& s, std::size_t position, LexMode mode) {
  const auto& tok = s.tokens.at(position - 1);
  const auto& form = form_for(tok, mode);
  const auto lowered = text::lower(form);
  const auto cps = text::code_points(lowered);

  std::vector<std::string> f;
  f.reserve(16);
  f.emplace_back("bias");
  f.push_back("form=" + form);
  f.push_back("lower=" + lowered);
  for (std::size_t k = 1; k <= 4 && k <= cps.size(); ++k) f.push_back(fmt::format("pre{}={}", k, text::prefix(cps, k)));
  for (std::size_t k = 1; k <= 4 && k <= cps.size(); ++k) f.push_back(fmt::format("suf{}={}", k, text::suffix(cps, k)));
  if (text::has_digit(form)) f.emplace_back("has_digit");
  if (text::has_punct(form)) f.emplace_back("has_punct");
  f.push_back(position > 1 ? "prev_form=" + text::lower(form_for(s.tokens[position - 2], mode))
                           : fmt::format("prev_form={}", kBoundary));
  f.push_back(position < s.size() ? "next_form=" + text::lower(form_for(s.tokens[position], mode))
                                  : fmt::format("next_form={}", kEndBoundary));
  return f;
}

std::vector<std::string> history_features(std::string_view prev_tag, std::string_view prev2_tag) {
  return {prev1_feature(prev_tag), prev2_feature(prev2_tag, prev_tag)};
}

std::vector<std::string> extract_features(const Sentence& s, std::size_t position,
                                          std::pair<std::string_view, std::string_view> prev_tags, LexMode mode) {
  auto f = observation_features(s, position, mode);
  for (auto& h : history_features(prev_tags.first, prev_tags.second)) f.push_back(std::move(h));
  return f;
}

double TaggerModel::weight(std::string_view feature, std::size_t tag) const {
  const auto id = features.find(feature);
  if (!id || tag >= tagset.size()) return 0.0;
  return weights[static_cast<std::size_t>(*id) * tagset.size() + tag];
}

TaggerModel train_tagger(const Treebank& train, const TaggerTrainOptions& options) {
  if (train.sentences.empty() || train.token_count() == 0) {
    throw Error(ErrorCode::EmptyTrainingSet, fmt::format("'{}' has no sentences", train.source_name));
  }
  require_modeled(train);
  const auto* warm = options.warm_start;
  if (warm != nullptr) {
    require_trained(*warm);
    if (warm->templates != tagger_templates()) {
      throw Error(ErrorCode::InvalidArgument, "warm-start model uses a different feature template registry");
    }
    if (warm->mode != options.mode) throw Error(ErrorCode::InvalidArgument, "warm-start model has a different mode");
    if (options.epochs == 0) {
      // No updates: the source model comes back unchanged, tagset included.
      TaggerModel same = *warm;
      same.meta.sources.push_back(train.source_name);
      same.meta.epochs = 0;
      same.meta.seed = options.seed;
      return same;
    }
  }

  TaggerModel model;
  model.templates = tagger_templates();
  model.mode = options.mode;
  std::set<std::string> seen;
  for (const auto& s : train.sentences) {
    for (const auto& t : s.tokens) seen.insert(t.upos.str());
  }
  if (warm != nullptr) {
    model.tagset = warm->tagset;
    model.features = warm->features;
    for (const auto& tag : model.tagset) seen.erase(tag);
  }
  model.tagset.insert(model.tagset.end(), seen.begin(), seen.end());
  const auto T = model.tagset.size();
  std::map<std::string, std::size_t> tag_index;
  for (std::size_t i = 0; i < T; ++i) tag_index[model.tagset[i]] = i;

  std::vector<double> initial;
  if (warm != nullptr) {
    const auto oldT = warm->tagset.size();
    initial.assign(warm->features.size() * T, 0.0);
    for (std::size_t f = 0; f < warm->features.size(); ++f) {
      for (std::size_t c = 0; c < oldT; ++c) initial[f * T + c] = warm->weights[f * oldT + c];
    }
  }

  // Intern every feature the training pass can touch.
  std::vector<std::vector<std::vector<FeatureId>>> obs(train.sentences.size());
  std::vector<std::vector<std::size_t>> gold(train.sentences.size());
  for (std::size_t si = 0; si < train.sentences.size(); ++si) {
    const auto& s = train.sentences[si];
    obs[si].resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (const auto& f : observation_features(s, i + 1, options.mode)) obs[si][i].push_back(model.features.intern(f));
      gold[si].push_back(tag_index.at(s.tokens[i].upos.str()));
    }
  }
  std::vector<std::optional<FeatureId>> t1, t2;
  transition_ids(model.tagset, [&](const std::string& f) { return std::optional<FeatureId>(model.features.intern(f)); },
                 t1, t2);

  AveragedWeights weights(T, options.averaging == Averaging::ReplayLog);
  weights.initialize(std::move(initial));
  weights.ensure_features(model.features.size());
  Scorer scorer(model.features, T, model.tagset, t1, t2);
  const auto H = T + 1;

  std::vector<std::size_t> order(train.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(options.seed);
  std::vector<double> emission;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (const auto si : order) {
      weights.tick();
      const auto n = gold[si].size();
      emission.assign(n * T, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (const auto f : obs[si][i]) {
          const double* row = weights.row(f);
          for (std::size_t c = 0; c < T; ++c) emission[i * T + c] += row[c];
        }
      }
      scorer.load_transitions([&](FeatureId id) { return weights.row(id); });
      const auto predicted = scorer.decode(emission, n);
      const auto& g = gold[si];
      if (predicted == g) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const auto ga = i >= 1 ? g[i - 1] : T, gb = i >= 2 ? g[i - 2] : T;
        const auto pa = i >= 1 ? predicted[i - 1] : T, pb = i >= 2 ? predicted[i - 2] : T;
        if (g[i] == predicted[i] && ga == pa && gb == pb) continue;
        if (g[i] != predicted[i]) {
          for (const auto f : obs[si][i]) {
            weights.update(f, g[i], 1.0);
            weights.update(f, predicted[i], -1.0);
          }
        }
        weights.update(*t1[ga], g[i], 1.0);
        weights.update(*t2[gb * H + ga], g[i], 1.0);
        weights.update(*t1[pa], predicted[i], -1.0);
        weights.update(*t2[pb * H + pa], predicted[i], -1.0);
      }
    }
  }

  model.weights = options.averaging == Averaging::ReplayLog ? weights.averaged_from_log() : weights.averaged();
  model.trained = true;
  if (warm != nullptr) model.meta.sources = warm->meta.sources;
  model.meta.sources.push_back(train.source_name);
  model.meta.epochs = options.epochs;
  model.meta.seed = options.seed;
  return model;
}

std::vector<std::size_t> viterbi(const TaggerModel& model, const Sentence& s) {
  require_trained(model);
  const auto scorer = model_scorer(model);
  return scorer.decode(model_emission(model, s), s.size());
}

double sequence_score(const TaggerModel& model, const Sentence& s, const std::vector<std::size_t>& tags) {
  require_trained(model);
  if (tags.size() != s.size()) throw Error(ErrorCode::InvalidArgument, "tag sequence length differs from sentence");
  const auto scorer = model_scorer(model);
  return scorer.score(model_emission(model, s), tags);
}

std::vector<PosTag> tag(const TaggerModel& model, const Sentence& s) {
  std::vector<PosTag> out;
  for (const auto idx : viterbi(model, s)) out.push_back(PosTag::parse(model.tagset[idx]));
  return out;
}

Treebank tag_treebank(const TaggerModel& model, const Treebank& tb) {
  require_trained(model);
  const auto scorer = model_scorer(model);
  Treebank out = tb;
  for (auto& s : out.sentences) {
    const auto tags = scorer.decode(model_emission(model, s), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) s.tokens[i].upos = PosTag::parse(model.tagset[tags[i]]);
  }
  return out;
}

PosEvalReport score_pos(const std::vector<std::string>& gold, const std::vector<std::string>& predicted) {
  if (gold.size() != predicted.size()) throw Error(ErrorCode::AlignmentMismatch, "gold and predicted lengths differ");
  if (gold.empty()) throw Error(ErrorCode::EmptyTestSet, "no tokens to score");
  struct Counts {
    std::size_t tp = 0, support = 0, predicted = 0;
  };
  std::map<std::string, Counts> counts;
  PosEvalReport r;
  r.total = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++counts[gold[i]].support;
    ++counts[predicted[i]].predicted;
    if (gold[i] == predicted[i]) {
      ++counts[gold[i]].tp;
      ++r.correct;
    }
  }
  const auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  r.accuracy = ratio(r.correct, r.total);
  std::size_t supported = 0;
  for (const auto& [tag, c] : counts) {
    TagScores st;
    st.tag = tag;
    st.support = c.support;
    st.predicted = c.predicted;
    st.precision = ratio(c.tp, c.predicted);
    st.recall = ratio(c.tp, c.support);
    st.f1 = st.precision + st.recall > 0.0 ? 2.0 * st.precision * st.recall / (st.precision + st.recall) : 0.0;
    if (c.support > 0) {
      ++supported;
      r.macro.precision += st.precision;
      r.macro.recall += st.recall;
      r.macro.f1 += st.f1;
    }
    r.per_tag.push_back(st);
  }
  std::stable_sort(r.per_tag.begin(), r.per_tag.end(),
                   [](const TagScores& a, const TagScores& b) { return a.support > b.support; });
  r.macro.precision /= static_cast<double>(supported);
  r.macro.recall /= static_cast<double>(supported);
  r.macro.f1 /= static_cast<double>(supported);
  r.macro.total = r.total;
  // Every token is both a gold and a predicted instance, so micro
  // precision, recall and f1 all equal accuracy.
  r.micro = {r.accuracy, r.accuracy, r.accuracy, r.total};
  return r;
}

PosEvalReport evaluate_pos(const TaggerModel& model, const Treebank& test, bool exclude_punct) {
  if (test.token_count() == 0) throw Error(ErrorCode::EmptyTestSet, fmt::format("'{}' has no tokens", test.source_name));
  require_trained(model);
  require_modeled(test);
  const auto scorer = model_scorer(model);
  std::vector<std::string> gold, predicted;
  for (const auto& s : test.sentences) {
    const auto tags = scorer.decode(model_emission(model, s), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (exclude_punct && s.tokens[i].upos.standard() == UPos::PUNCT) continue;
      gold.push_back(s.tokens[i].upos.str());
      predicted.push_back(model.tagset[tags[i]]);
    }
  }
  if (gold.empty()) throw Error(ErrorCode::EmptyTestSet, "no tokens left after excluding punctuation");
  return score_pos(gold, predicted);
}

std::string PosEvalReport::table() const {
  std::size_t w = 9;
  for (const auto& t : per_tag) w = std::max(w, t.tag.size());
  std::string out = fmt::format("{:<{}} {:>9} {:>9} {:>9} {:>6}\n", "POS", w, "precision", "recall", "f1-score", "n");
  for (const auto& t : per_tag) {
    out += fmt::format("{:<{}} {:>9.4f} {:>9.4f} {:>9.4f} {:>6}\n", t.tag, w, t.precision, t.recall, t.f1, t.support);
  }
  out += fmt::format("{:<{}} {:>9.4f} {:>9.4f} {:>9.4f} {:>6}\n", "micro avg", w, micro.precision, micro.recall, micro.f1,
                     micro.total);
  out += fmt::format("{:<{}} {:>9.4f} {:>9.4f} {:>9.4f} {:>6}\n", "macro avg", w, macro.precision, macro.recall, macro.f1,
                     macro.total);
  out += fmt::format("accuracy {:.4f} ({}/{})\n", accuracy, correct, total);
  return out;
}

std::string PosEvalReport::tsv() const {
  std::string out = fmt::format("# accuracy={:.4f} correct={} total={}\n", accuracy, correct, total);
  out += "tag\tprecision\trecall\tf1\tn\n";
  for (const auto& t : per_tag) out += fmt::format("{}\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", t.tag, t.precision, t.recall, t.f1, t.support);
  out += fmt::format("micro avg\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", micro.precision, micro.recall, micro.f1, micro.total);
  out += fmt::format("macro avg\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", macro.precision, macro.recall, macro.f1, macro.total);
  return out;
}

void TaggerModel::save(std::ostream& out) const {
  require_trained(*this);
  out << kTaggerMagic << "\tv" << model_io::kFormatVersion << "\tmode=" << lex_mode_name(mode)
      << "\ttemplates=" << text::join(templates, ",") << "\ttagset=" << text::join(tagset, ",")
      << "\tepochs=" << meta.epochs << "\tseed=" << meta.seed << "\tsources=" << safe_list(meta.sources) << '\n';
  std::vector<FeatureId> ids(features.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<FeatureId>(i);
  std::sort(ids.begin(), ids.end(), [&](FeatureId a, FeatureId b) { return features.name(a) < features.name(b); });
  const auto T = tagset.size();
  for (const auto id : ids) {
    for (std::size_t c = 0; c < T; ++c) {
      const double w = weights[static_cast<std::size_t>(id) * T + c];
      if (w != 0.0) out << features.name(id) << '\t' << tagset[c] << '\t' << model_io::format_weight(w) << '\n';
    }
  }
}

TaggerModel TaggerModel::load(std::istream& in) {
  const auto header = model_io::read_header(in, kTaggerMagic);
  TaggerModel m;
  m.mode = lex_mode_from_name(header.get("mode"));
  m.templates = text::split(header.get("templates"), ',');
  m.tagset = text::split(header.get("tagset"), ',');
  m.meta.sources = text::split(header.get("sources"), ',');
  try {
    m.meta.epochs = std::stoi(header.get("epochs"));
    m.meta.seed = std::stoull(header.get("seed"));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadModelFile, "bad epochs or seed field", 1);
  }
  if (m.tagset.empty()) throw Error(ErrorCode::BadModelFile, "empty tagset", 1);
  std::map<std::string, std::size_t> tag_index;
  for (std::size_t i = 0; i < m.tagset.size(); ++i) tag_index[m.tagset[i]] = i;
  const auto T = m.tagset.size();
  model_io::WeightLine line;
  std::size_t line_no = 1;
  while (model_io::read_weight(in, line, line_no)) {
    const auto it = tag_index.find(line.target);
    if (it == tag_index.end()) throw Error(ErrorCode::BadModelFile, fmt::format("unknown tag '{}'", line.target), line_no);
    const auto id = m.features.intern(line.feature);
    if (m.weights.size() < m.features.size() * T) m.weights.resize(m.features.size() * T, 0.0);
    m.weights[static_cast<std::size_t>(id) * T + it->second] = line.weight;
  }
  m.trained = true;
  return m;
}

void TaggerModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, fmt::format("cannot write '{}'", path));
  save(out);
}

TaggerModel TaggerModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, fmt::format("cannot open '{}'", path));
  return load(in);
}

}  // namespace tbw
