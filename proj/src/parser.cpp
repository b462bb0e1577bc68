#include "tbw/parser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "model_io.hpp"
#include "tbw/error.hpp"
#include "tbw/prep.hpp"
#include "tbw/validate.hpp"
#include "text.hpp"

namespace tbw {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kParserMagic = "tbw-parser";
constexpr std::string_view kArcTarget = "@arc";
constexpr std::string_view kRootForm = "<root>";
constexpr std::string_view kOutside = "<b>";

// Heads for nodes 1..m-1 of a dense m x m score matrix (node 0 is the
// root). Recursive contraction of the greedy graph's cycles.
std::vector<int> cle(const std::vector<double>& S, std::size_t m) {
  std::vector<int> best(m, -1);
  for (std::size_t v = 1; v < m; ++v) {
    double bv = kNegInf;
    for (std::size_t u = 0; u < m; ++u) {
      if (u == v) continue;
      const double s = S[u * m + v];
      if (best[v] < 0 || s > bv) {
        bv = s;
        best[v] = static_cast<int>(u);
      }
    }
  }

  // Find one cycle in the greedy graph.
  std::vector<int> color(m, 0);
  std::vector<int> cycle;
  color[0] = 2;
  for (std::size_t start = 1; start < m && cycle.empty(); ++start) {
    if (color[start] != 0) continue;
    std::vector<int> path;
    int v = static_cast<int>(start);
    while (color[v] == 0) {
      color[v] = 1;
      path.push_back(v);
      v = best[v];
    }
    if (color[v] == 1) cycle.assign(std::find(path.begin(), path.end(), v), path.end());
    for (const int p : path) color[p] = 2;
  }
  if (cycle.empty()) return best;

  std::vector<bool> in_cycle(m, false);
  for (const int c : cycle) in_cycle[c] = true;
  std::vector<int> old_of;                   // new index -> old node
  std::vector<int> new_of(m, -1);            // old node -> new index
  for (std::size_t v = 0; v < m; ++v) {
    if (in_cycle[v]) continue;
    new_of[v] = static_cast<int>(old_of.size());
    old_of.push_back(static_cast<int>(v));
  }
  const std::size_t c = old_of.size();
  const std::size_t m2 = c + 1;
  std::vector<double> S2(m2 * m2, kNegInf);
  std::vector<int> enter(m, -1), exit_src(m, -1);
  std::vector<int> cycle_sorted = cycle;
  std::sort(cycle_sorted.begin(), cycle_sorted.end());

  for (std::size_t u = 0; u < m; ++u) {
    if (in_cycle[u]) continue;
    for (std::size_t v = 1; v < m; ++v) {
      if (in_cycle[v] || u == v) continue;
      S2[new_of[u] * m2 + new_of[v]] = S[u * m + v];
    }
    double bv = kNegInf;
    for (const int v : cycle_sorted) {
      const double s = S[u * m + v] - S[static_cast<std::size_t>(best[v]) * m + v];
      if (enter[u] < 0 || s > bv) {
        bv = s;
        enter[u] = v;
      }
    }
    S2[new_of[u] * m2 + c] = bv;
  }
  for (std::size_t v = 1; v < m; ++v) {
    if (in_cycle[v]) continue;
    double bv = kNegInf;
    for (const int u : cycle_sorted) {
      const double s = S[static_cast<std::size_t>(u) * m + v];
      if (exit_src[v] < 0 || s > bv) {
        bv = s;
        exit_src[v] = u;
      }
    }
    S2[c * m2 + new_of[v]] = bv;
  }

  const auto sub = cle(S2, m2);
  std::vector<int> head = best;
  for (std::size_t v = 1; v < m; ++v) {
    if (in_cycle[v]) continue;
    const auto h2 = static_cast<std::size_t>(sub[new_of[v]]);
    head[v] = h2 == c ? exit_src[v] : old_of[h2];
  }
  const int u = old_of[static_cast<std::size_t>(sub[c])];
  head[enter[u]] = u;
  return head;
}

std::vector<double> dense(const ArcScores& scores, double root_penalty) {
  const auto m = scores.size() + 1;
  std::vector<double> S(m * m, kNegInf);
  for (std::size_t h = 0; h < m; ++h) {
    for (std::size_t d = 1; d < m; ++d) {
      if (h == d) continue;
      S[h * m + d] = scores.at(h, d) - (h == 0 ? root_penalty : 0.0);
    }
  }
  return S;
}

std::string distance_bin(std::size_t head, std::size_t dep) {
  const auto dist = head > dep ? head - dep : dep - head;
  const char sign = dep > head ? '+' : '-';
  if (dist <= 5) return fmt::format("{}{}", sign, dist);
  if (dist <= 10) return fmt::format("{}6-10", sign);
  return fmt::format("{}11+", sign);
}

struct SentenceView {
  std::vector<std::string> forms;  // index 0 = root
  std::vector<std::string> upos;

  explicit SentenceView(const Sentence& s) {
    forms.emplace_back(kRootForm);
    upos.emplace_back(kRootForm);
    for (const auto& t : s.tokens) {
      forms.push_back(text::lower(t.form));
      upos.push_back(t.upos.str());
    }
  }

  const std::string& pos_at(std::ptrdiff_t i) const {
    static const std::string outside(kOutside);
    if (i < 1 || i >= static_cast<std::ptrdiff_t>(upos.size())) return outside;
    return upos[static_cast<std::size_t>(i)];
  }
};

std::vector<std::string> arc_features_view(const SentenceView& v, std::size_t h, std::size_t d) {
  const auto& hf = v.forms[h];
  const auto& df = v.forms[d];
  const auto& hp = v.upos[h];
  const auto& dp = v.upos[d];
  const auto dd = distance_bin(h, d);
  std::vector<std::string> f;
  f.reserve(48);
  const auto add = [&](std::string feature) {
    f.push_back(feature + "&" + dd);
    f.push_back(std::move(feature));
  };
  add("hf=" + hf);
  add("hp=" + hp);
  add("df=" + df);
  add("dp=" + dp);
  add("hfp=" + hf + " " + hp);
  add("dfp=" + df + " " + dp);
  add("hp.dp=" + hp + " " + dp);
  add("hf.df=" + hf + " " + df);
  add("hf.dp=" + hf + " " + dp);
  add("hp.df=" + hp + " " + df);
  add("hfp.dp=" + hf + " " + hp + " " + dp);
  add("hp.dfp=" + hp + " " + df + " " + dp);
  add("hfp.dfp=" + hf + " " + hp + " " + df + " " + dp);
  f.push_back("dist=" + dd);

  const auto lo = std::min(h, d), hi = std::max(h, d);
  std::set<std::string_view> between;
  for (auto i = lo + 1; i < hi; ++i) between.insert(v.upos[i]);
  for (const auto b : between) add(fmt::format("btw={} {} {}", hp, b, dp));

  const auto hi_ = static_cast<std::ptrdiff_t>(h), di = static_cast<std::ptrdiff_t>(d);
  const auto& hl = h == 0 ? v.pos_at(-1) : v.pos_at(hi_ - 1);
  const auto& hr = v.pos_at(hi_ + 1);
  const auto& dl = v.pos_at(di - 1);
  const auto& dr = v.pos_at(di + 1);
  add(fmt::format("s1={} {} {} {}", hp, hr, dl, dp));
  add(fmt::format("s2={} {} {} {}", hl, hp, dl, dp));
  add(fmt::format("s3={} {} {} {}", hp, hr, dp, dr));
  add(fmt::format("s4={} {} {} {}", hl, hp, dp, dr));
  return f;
}

std::vector<std::string> label_features_view(const SentenceView& v, std::size_t h, std::size_t d) {
  const auto& hp = v.upos[h];
  const auto& dp = v.upos[d];
  const auto dir = d > h ? "R" : "L";
  const auto dd = distance_bin(h, d);
  return {
      "bias",
      "hp=" + hp,
      "dp=" + dp,
      "hf=" + v.forms[h],
      "df=" + v.forms[d],
      fmt::format("dir={}", dir),
      "dist=" + dd,
      fmt::format("hp.dp={} {}", hp, dp),
      fmt::format("hp.dp.dir={} {} {}", hp, dp, dir),
      fmt::format("dp.dir={} {}", dp, dir),
      fmt::format("hp.dir={} {}", hp, dir),
      fmt::format("dp.dist={} {}", dp, dd),
      fmt::format("df.dp={} {}", v.forms[d], dp),
      fmt::format("hf.dp={} {}", v.forms[h], dp),
      fmt::format("dp.next={} {}", dp, v.pos_at(static_cast<std::ptrdiff_t>(d) + 1)),
      fmt::format("dp.prev={} {}", dp, v.pos_at(static_cast<std::ptrdiff_t>(d) - 1)),
  };
}

void require_trained(const ParserModel& model) {
  if (!model.trained || model.labels.empty()) throw Error(ErrorCode::UntrainedModel, "parser model is not trained");
}

std::size_t best_label(const double* scores_by_label, std::size_t labels) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < labels; ++l) {
    if (scores_by_label[l] > scores_by_label[best]) best = l;
  }
  return best;
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

double tree_score(const ArcScores& scores, const HeadAssignment& heads) {
  double total = 0.0;
  for (std::size_t d = 1; d <= heads.size(); ++d) total += scores.at(static_cast<std::size_t>(heads[d - 1]), d);
  return total;
}

double single_root_penalty(const ArcScores& scores) {
  const auto n = scores.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t h = 0; h <= n; ++h) {
    for (std::size_t d = 1; d <= n; ++d) {
      if (h == d) continue;
      lo = std::min(lo, scores.at(h, d));
      hi = std::max(hi, scores.at(h, d));
    }
  }
  if (n == 0) return 1.0;
  return static_cast<double>(n) * (hi - lo) + 1.0;
}

HeadAssignment chu_liu_edmonds(const ArcScores& scores) {
  const auto n = scores.size();
  if (n == 0) return {};
  const auto heads = cle(dense(scores, 0.0), n + 1);
  return HeadAssignment(heads.begin() + 1, heads.end());
}

HeadAssignment decode_mst(const ArcScores& scores) {
  const auto n = scores.size();
  if (n == 0) return {};
  const auto heads = cle(dense(scores, single_root_penalty(scores)), n + 1);
  return HeadAssignment(heads.begin() + 1, heads.end());
}

std::vector<std::string> arc_features(const Sentence& s, std::size_t head, std::size_t dep) {
  return arc_features_view(SentenceView(s), head, dep);
}

std::vector<std::string> label_features(const Sentence& s, std::size_t head, std::size_t dep) {
  return label_features_view(SentenceView(s), head, dep);
}

ArcScores score_arcs(const ParserModel& model, const Sentence& s) {
  require_trained(model);
  const SentenceView view(s);
  const auto n = s.size();
  ArcScores scores(n);
  for (std::size_t h = 0; h <= n; ++h) {
    for (std::size_t d = 1; d <= n; ++d) {
      if (h == d) continue;
      double total = 0.0;
      for (const auto& f : arc_features_view(view, h, d)) {
        if (const auto id = model.arc_features.find(f)) total += model.arc_weights[*id];
      }
      scores.at(h, d) = total;
    }
  }
  return scores;
}

ParserModel train_parser(const Treebank& input, const ParserTrainOptions& options) {
  if (input.sentences.empty() || input.token_count() == 0) {
    throw Error(ErrorCode::EmptyTrainingSet, fmt::format("'{}' has no sentences", input.source_name));
  }
  require_modeled(input);
  for (std::size_t i = 0; i < input.sentences.size(); ++i) {
    const auto diagnostics = validate_tree(input.sentences[i], static_cast<int>(i) + 1);
    if (!diagnostics.empty()) {
      throw Error(ErrorCode::NonTreeInput, fmt::format("sentence {} of '{}' is not a tree: {}", i + 1,
                                                       input.source_name, diagnostics.front().message));
    }
  }
  const Treebank train = options.mode == LexMode::Delex ? delexicalize(input) : input;

  ParserModel model;
  model.mode = options.mode;
  std::set<std::string> label_set;
  for (const auto& s : train.sentences) {
    for (const auto& t : s.tokens) label_set.insert(t.deprel.str());
  }
  model.labels.assign(label_set.begin(), label_set.end());
  const auto L = model.labels.size();
  std::map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < L; ++i) label_index[model.labels[i]] = i;

  struct Instance {
    std::size_t n = 0;
    std::vector<std::vector<FeatureId>> arcs;    // [h * (n + 1) + d]
    std::vector<std::vector<FeatureId>> labels;  // [d - 1], gold arc
    std::vector<int> gold_heads;
    std::vector<std::size_t> gold_labels;
  };
  std::vector<Instance> data(train.sentences.size());
  for (std::size_t si = 0; si < train.sentences.size(); ++si) {
    const auto& s = train.sentences[si];
    const SentenceView view(s);
    auto& inst = data[si];
    inst.n = s.size();
    inst.arcs.resize((inst.n + 1) * (inst.n + 1));
    for (std::size_t h = 0; h <= inst.n; ++h) {
      for (std::size_t d = 1; d <= inst.n; ++d) {
        if (h == d) continue;
        auto& ids = inst.arcs[h * (inst.n + 1) + d];
        for (const auto& f : arc_features_view(view, h, d)) ids.push_back(model.arc_features.intern(f));
      }
    }
    for (const auto& t : s.tokens) {
      std::vector<FeatureId> ids;
      for (const auto& f : label_features_view(view, static_cast<std::size_t>(t.head), static_cast<std::size_t>(t.id))) {
        ids.push_back(model.label_features.intern(f));
      }
      inst.labels.push_back(std::move(ids));
      inst.gold_heads.push_back(t.head);
      inst.gold_labels.push_back(label_index.at(t.deprel.str()));
    }
  }

  AveragedWeights arc_w(1);
  arc_w.ensure_features(model.arc_features.size());
  AveragedWeights label_w(L);
  label_w.ensure_features(model.label_features.size());

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(options.seed);
  std::vector<double> label_scores(L);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (const auto si : order) {
      const auto& inst = data[si];
      arc_w.tick();
      label_w.tick();
      ArcScores scores(inst.n);
      for (std::size_t h = 0; h <= inst.n; ++h) {
        for (std::size_t d = 1; d <= inst.n; ++d) {
          if (h == d) continue;
          double total = 0.0;
          for (const auto f : inst.arcs[h * (inst.n + 1) + d]) total += arc_w.weight(f, 0);
          scores.at(h, d) = total;
        }
      }
      const auto predicted = decode_mst(scores);
      for (std::size_t d = 1; d <= inst.n; ++d) {
        const auto g = static_cast<std::size_t>(inst.gold_heads[d - 1]);
        const auto p = static_cast<std::size_t>(predicted[d - 1]);
        if (g == p) continue;
        for (const auto f : inst.arcs[g * (inst.n + 1) + d]) arc_w.update(f, 0, 1.0);
        for (const auto f : inst.arcs[p * (inst.n + 1) + d]) arc_w.update(f, 0, -1.0);
      }
      for (std::size_t d = 1; d <= inst.n; ++d) {
        std::fill(label_scores.begin(), label_scores.end(), 0.0);
        const auto& ids = inst.labels[d - 1];
        for (const auto f : ids) {
          const double* row = label_w.row(f);
          for (std::size_t l = 0; l < L; ++l) label_scores[l] += row[l];
        }
        const auto guess = best_label(label_scores.data(), L);
        const auto gold = inst.gold_labels[d - 1];
        if (guess == gold) continue;
        for (const auto f : ids) {
          label_w.update(f, gold, 1.0);
          label_w.update(f, guess, -1.0);
        }
      }
    }
  }

  model.arc_weights = arc_w.averaged();
  model.label_weights = label_w.averaged();
  model.trained = true;
  model.meta.sources = {input.source_name};
  model.meta.epochs = options.epochs;
  model.meta.seed = options.seed;
  return model;
}

ParseResult parse(const ParserModel& model, const Sentence& s) {
  ParseResult out;
  out.heads = decode_mst(score_arcs(model, s));
  const SentenceView view(s);
  const auto L = model.labels.size();
  std::vector<double> scores(L);
  for (std::size_t d = 1; d <= s.size(); ++d) {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (const auto& f : label_features_view(view, static_cast<std::size_t>(out.heads[d - 1]), d)) {
      const auto id = model.label_features.find(f);
      if (!id) continue;
      const double* row = model.label_weights.data() + static_cast<std::size_t>(*id) * L;
      for (std::size_t l = 0; l < L; ++l) scores[l] += row[l];
    }
    out.labels.push_back(DepRel::parse(model.labels[best_label(scores.data(), L)]));
  }
  return out;
}

Treebank parse_treebank(const ParserModel& model, const Treebank& tb) {
  require_trained(model);
  Treebank out = tb;
  for (auto& s : out.sentences) {
    const auto result = parse(model, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s.tokens[i].head = result.heads[i];
      s.tokens[i].deprel = result.labels[i];
    }
  }
  return out;
}

DepEvalReport evaluate_dep(const Treebank& pred, const Treebank& gold, bool exclude_punct) {
  if (pred.sentences.size() != gold.sentences.size()) {
    throw Error(ErrorCode::AlignmentMismatch, fmt::format("{} predicted vs {} gold sentences", pred.sentences.size(),
                                                          gold.sentences.size()));
  }
  DepEvalReport r;
  for (std::size_t si = 0; si < gold.sentences.size(); ++si) {
    const auto& g = gold.sentences[si];
    const auto& p = pred.sentences[si];
    if (g.size() != p.size()) {
      throw Error(ErrorCode::AlignmentMismatch,
                  fmt::format("sentence {}: {} predicted vs {} gold tokens", si + 1, p.size(), g.size()));
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& gt = g.tokens[i];
      if (exclude_punct && gt.upos.standard() == UPos::PUNCT) continue;
      auto& row = r.per_label[gt.deprel.str()];
      ++row.gold;
      ++r.token_count;
      if (p.tokens[i].head == gt.head) {
        ++row.head_correct;
        ++r.head_correct;
        if (p.tokens[i].deprel == gt.deprel) {
          ++row.both_correct;
          ++r.both_correct;
        }
      }
    }
  }
  if (r.token_count > 0) {
    r.uas = static_cast<double>(r.head_correct) / static_cast<double>(r.token_count);
    r.las = static_cast<double>(r.both_correct) / static_cast<double>(r.token_count);
  }
  return r;
}

std::string DepEvalReport::tsv() const {
  std::string out = fmt::format("# uas={:.4f} las={:.4f} tokens={}\n", uas, las, token_count);
  out += "label\tn\thead_correct\tboth_correct\n";
  for (const auto& [label, row] : per_label) {
    out += fmt::format("{}\t{}\t{}\t{}\n", label, row.gold, row.head_correct, row.both_correct);
  }
  return out;
}

double random_tree_uas(const Treebank& gold, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::size_t correct = 0, total = 0;
  for (const auto& s : gold.sentences) {
    ArcScores scores(s.size());
    for (std::size_t h = 0; h <= s.size(); ++h) {
      for (std::size_t d = 1; d <= s.size(); ++d) {
        if (h != d) scores.at(h, d) = rng.uniform();
      }
    }
    const auto heads = decode_mst(scores);
    for (std::size_t i = 0; i < s.size(); ++i) {
      correct += heads[i] == s.tokens[i].head ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

void ParserModel::save(std::ostream& out) const {
  require_trained(*this);
  out << kParserMagic << "\tv" << model_io::kFormatVersion << "\tmode=" << lex_mode_name(mode)
      << "\tlabels=" << text::join(labels, ",") << "\tepochs=" << meta.epochs << "\tseed=" << meta.seed
      << "\tsources=" << safe_list(meta.sources) << '\n';
  const auto sorted_ids = [](const FeatureIndex& index) {
    std::vector<FeatureId> ids(index.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<FeatureId>(i);
    std::sort(ids.begin(), ids.end(), [&](FeatureId a, FeatureId b) { return index.name(a) < index.name(b); });
    return ids;
  };
  for (const auto id : sorted_ids(arc_features)) {
    if (arc_weights[id] != 0.0) {
      out << arc_features.name(id) << '\t' << kArcTarget << '\t' << model_io::format_weight(arc_weights[id]) << '\n';
    }
  }
  const auto L = labels.size();
  for (const auto id : sorted_ids(label_features)) {
    for (std::size_t l = 0; l < L; ++l) {
      const double w = label_weights[static_cast<std::size_t>(id) * L + l];
      if (w != 0.0) out << label_features.name(id) << '\t' << labels[l] << '\t' << model_io::format_weight(w) << '\n';
    }
  }
}

ParserModel ParserModel::load(std::istream& in) {
  const auto header = model_io::read_header(in, kParserMagic);
  ParserModel m;
  m.mode = lex_mode_from_name(header.get("mode"));
  m.labels = text::split(header.get("labels"), ',');
  m.meta.sources = text::split(header.get("sources"), ',');
  try {
    m.meta.epochs = std::stoi(header.get("epochs"));
    m.meta.seed = std::stoull(header.get("seed"));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadModelFile, "bad epochs or seed field", 1);
  }
  if (m.labels.empty()) throw Error(ErrorCode::BadModelFile, "empty label inventory", 1);
  std::map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < m.labels.size(); ++i) label_index[m.labels[i]] = i;
  const auto L = m.labels.size();
  model_io::WeightLine line;
  std::size_t line_no = 1;
  while (model_io::read_weight(in, line, line_no)) {
    if (line.target == kArcTarget) {
      const auto id = m.arc_features.intern(line.feature);
      if (m.arc_weights.size() < m.arc_features.size()) m.arc_weights.resize(m.arc_features.size(), 0.0);
      m.arc_weights[id] = line.weight;
      continue;
    }
    const auto it = label_index.find(line.target);
    if (it == label_index.end()) throw Error(ErrorCode::BadModelFile, fmt::format("unknown label '{}'", line.target), line_no);
    const auto id = m.label_features.intern(line.feature);
    if (m.label_weights.size() < m.label_features.size() * L) m.label_weights.resize(m.label_features.size() * L, 0.0);
    m.label_weights[static_cast<std::size_t>(id) * L + it->second] = line.weight;
  }
  m.trained = true;
  return m;
}

void ParserModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, fmt::format("cannot write '{}'", path));
  save(out);
}

ParserModel ParserModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, fmt::format("cannot open '{}'", path));
  return load(in);
}

}  // namespace tbw
