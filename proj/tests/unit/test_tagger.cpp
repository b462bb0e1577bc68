#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "synthetic_corpus.hpp"
#include "tbw/error.hpp"
#include "tbw/fixtures.hpp"
#include "tbw/prep.hpp"
#include "tbw/tagger.hpp"

using namespace tbw;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

Treebank single(const std::string& conllu) { return parse_conllu_text(conllu, "one"); }

std::vector<std::string> gold_tags(const Sentence& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens) out.push_back(t.upos.str());
  return out;
}

std::vector<std::string> strs(const std::vector<PosTag>& tags) {
  std::vector<std::string> out;
  for (const auto& t : tags) out.push_back(t.str());
  return out;
}

}  // namespace

TEST_CASE("feature extraction") {
  const auto tb = fixtures::bundled();
  const auto& s = tb.sentences[3];  // syn-2: uni kana ka atsa pikë .
  REQUIRE(s.tokens[1].form == "kana");
  const auto f = extract_features(s, 2, {"NOUN", "<s>"}, LexMode::Lex);
  for (const char* x : {"bias", "form=kana", "lower=kana", "suf1=a", "suf2=na", "pre2=ka", "pre4=kana",
                        "prev_form=uni", "next_form=ka", "prev_tag=NOUN", "prev2_tags=<s>|NOUN"}) {
    CHECK(contains(f, x));
  }
  CHECK_FALSE(contains(f, "has_digit"));

  const auto first = extract_features(s, 1, {"<s>", "<s>"}, LexMode::Lex);
  CHECK(contains(first, "prev_form=<s>"));
  const auto last = extract_features(s, s.size(), {"VERB", "NOUN"}, LexMode::Lex);
  CHECK(contains(last, "has_punct"));
  CHECK(contains(last, "next_form=</s>"));

  for (std::size_t i = 1; i <= s.size(); ++i) {
    const auto d = extract_features(s, i, {"<s>", "<s>"}, LexMode::Delex);
    CHECK(contains(d, "form=_"));
    CHECK_FALSE(contains(d, "form=kana"));
  }

  // Affixes count code points, not bytes; lowering covers Latin letters.
  Sentence u;
  Token t;
  t.form = "'Ënë7";
  u.tokens.push_back(t);
  const auto g = observation_features(u, 1, LexMode::Lex);
  CHECK(contains(g, "lower='ënë7"));
  CHECK(contains(g, "pre2='ë"));
  CHECK(contains(g, "suf3=në7"));
  CHECK(contains(g, "has_digit"));
  CHECK_FALSE(contains(g, "has_punct"));
}

TEST_CASE("a single sentence is memorized") {
  const auto tb = single(fixtures::enclitic_example_conllu());
  TaggerTrainOptions opts;
  opts.epochs = 5;
  const auto model = train_tagger(tb, opts);
  CHECK(model.trained);
  CHECK(strs(tag(model, tb.sentences[0])) == gold_tags(tb.sentences[0]));
  CHECK(std::is_sorted(model.tagset.begin(), model.tagset.end()));
}

TEST_CASE("training is deterministic") {
  const auto tb = testing::synthetic_cbr_like(40, 1);
  TaggerTrainOptions opts;
  opts.seed = 17;
  const auto a = train_tagger(tb, opts);
  const auto b = train_tagger(tb, opts);
  CHECK(a == b);
  std::ostringstream sa, sb;
  a.save(sa);
  b.save(sb);
  CHECK(sa.str() == sb.str());
  opts.seed = 18;
  CHECK_FALSE(train_tagger(tb, opts) == a);
}

TEST_CASE("unseen form is tagged from its suffix") {
  const auto tb = single(
      "1\txoka\t_\tVERB\t_\t_\t0\troot\t_\t_\n\n"
      "1\tmiuka\t_\tVERB\t_\t_\t0\troot\t_\t_\n\n"
      "1\tpeka\t_\tVERB\t_\t_\t0\troot\t_\t_\n\n"
      "1\trabo\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n"
      "1\tsiibo\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n"
      "1\tjembo\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
  const auto model = train_tagger(tb, {});
  const auto test = single("1\tzuwaka\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n1\tzuwabo\t_\tVERB\t_\t_\t0\troot\t_\t_\n\n");
  CHECK(tag(model, test.sentences[0])[0].str() == "VERB");
  CHECK(tag(model, test.sentences[1])[0].str() == "NOUN");
}

TEST_CASE("all-zero model picks tag index 0 and untrained models are rejected") {
  TaggerModel zero;
  zero.tagset = {"NOUN", "PART", "VERB"};
  zero.templates = tagger_templates();
  zero.trained = true;
  const auto tb = fixtures::bundled();
  for (const auto& s : tb.sentences) {
    for (const auto idx : viterbi(zero, s)) CHECK(idx == 0);
  }
  TaggerModel untrained;
  CHECK_THROWS_AS(tag(untrained, tb.sentences[0]), Error);
  CHECK_THROWS_AS(train_tagger(Treebank{}, {}), Error);
}

TEST_CASE("Viterbi matches exhaustive search") {
  SplitMix64 rng(2024);
  const std::vector<std::string> tags = {"NOUN", "PART", "VERB", "ADV"};
  int trials = 0;
  for (int round = 0; round < 60; ++round) {
    const std::size_t n = 1 + rng.below(5);
    Sentence s;
    for (std::size_t i = 0; i < n; ++i) {
      Token t;
      t.id = static_cast<int>(i) + 1;
      t.form = "w" + std::to_string(rng.below(4));
      s.tokens.push_back(t);
    }
    TaggerModel m;
    m.tagset = std::vector<std::string>(tags.begin(), tags.begin() + static_cast<long>(1 + rng.below(4)));
    m.templates = tagger_templates();
    m.trained = true;
    std::vector<std::string> history = m.tagset;
    history.emplace_back(kBoundary);
    for (std::size_t i = 1; i <= n; ++i) {
      for (const auto& f : observation_features(s, i, LexMode::Lex)) m.features.intern(f);
    }
    for (const auto& a : history) {
      for (const auto& f : history_features(a, std::string(kBoundary))) m.features.intern(f);
      for (const auto& b : history) {
        for (const auto& f : history_features(a, b)) m.features.intern(f);
      }
    }
    m.weights.resize(m.features.size() * m.tagset.size());
    for (auto& w : m.weights) w = rng.uniform() * 4.0 - 2.0;

    const auto decoded = viterbi(m, s);
    const double best = oracle::best_sequence_score(m, s);
    CHECK(oracle::sequence_score(m, s, decoded) == doctest::Approx(best).epsilon(1e-12));
    CHECK(sequence_score(m, s, decoded) == doctest::Approx(oracle::sequence_score(m, s, decoded)).epsilon(1e-12));
    ++trials;
  }
  CHECK(trials == 60);
}

TEST_CASE("incremental and replayed averaging agree") {
  const auto tb = testing::synthetic_shp_like(80, 4);
  TaggerTrainOptions a;
  a.epochs = 4;
  a.seed = 3;
  auto b = a;
  b.averaging = Averaging::ReplayLog;
  const auto ma = train_tagger(tb, a);
  const auto mb = train_tagger(tb, b);
  REQUIRE(ma.weights.size() == mb.weights.size());
  for (std::size_t i = 0; i < ma.weights.size(); ++i) CHECK(ma.weights[i] == doctest::Approx(mb.weights[i]));
  for (const auto& s : tb.sentences) CHECK(viterbi(ma, s) == viterbi(mb, s));
}

TEST_CASE("warm start") {
  const auto shp = testing::synthetic_shp_like(120, 8);
  const auto cbr = testing::synthetic_cbr_like(60, 8);
  const auto source = train_tagger(shp, {});

  TaggerTrainOptions none;
  none.epochs = 0;
  none.warm_start = &source;
  const auto same = train_tagger(cbr, none);
  for (const auto* tb : {&shp, &cbr}) {
    for (const auto& s : tb->sentences) CHECK(viterbi(same, s) == viterbi(source, s));
  }

  TaggerTrainOptions tune;
  tune.epochs = 3;
  tune.warm_start = &source;
  const auto tuned = train_tagger(cbr, tune);
  for (std::size_t i = 0; i < source.tagset.size(); ++i) CHECK(tuned.tagset[i] == source.tagset[i]);
  CHECK(tuned.tagset.size() >= source.tagset.size());
  CHECK(tuned.meta.sources.size() == 2);

  TaggerModel other = source;
  other.templates.pop_back();
  tune.warm_start = &other;
  CHECK_THROWS_AS(train_tagger(cbr, tune), Error);
  tune.warm_start = &source;
  tune.mode = LexMode::Delex;
  CHECK_THROWS_AS(train_tagger(cbr, tune), Error);
}

TEST_CASE("model file round trip") {
  const auto tb = testing::synthetic_cbr_like(50, 2);
  const auto model = train_tagger(tb, {});
  std::stringstream ss;
  model.save(ss);
  const auto text = ss.str();
  CHECK(text.rfind("tbw-tagger\tv1\t", 0) == 0);
  const auto loaded = TaggerModel::load(ss);
  for (const auto& s : tb.sentences) CHECK(viterbi(loaded, s) == viterbi(model, s));
  CHECK(loaded.tagset == model.tagset);
  CHECK(loaded.templates == model.templates);
  CHECK(loaded.meta == model.meta);
  std::stringstream again;
  loaded.save(again);
  CHECK(again.str() == text);

  std::istringstream bad("tbw-parser\tv1\n");
  CHECK_THROWS_AS(TaggerModel::load(bad), Error);
  std::istringstream future("tbw-tagger\tv9\n");
  CHECK_THROWS_AS(TaggerModel::load(future), Error);
}

TEST_CASE("POS scoring") {
  auto same = score_pos({"A", "B", "B"}, {"A", "B", "B"});
  CHECK(same.accuracy == 1.0);
  for (const auto& t : same.per_tag) CHECK(t.f1 == 1.0);

  const auto r = score_pos({"A", "A", "B", "C"}, {"A", "A", "B", "B"});
  CHECK(r.accuracy == 0.75);
  CHECK(r.micro.precision == 0.75);
  CHECK(r.micro.recall == 0.75);
  CHECK(r.micro.f1 == 0.75);

  // AUX-like row: support 3, predicted 3 times, 2 correct.
  const auto aux = score_pos({"AUX", "AUX", "AUX", "X", "X"}, {"AUX", "AUX", "X", "AUX", "X"});
  const auto it = std::find_if(aux.per_tag.begin(), aux.per_tag.end(), [](const TagScores& t) { return t.tag == "AUX"; });
  REQUIRE(it != aux.per_tag.end());
  CHECK(it->precision == doctest::Approx(2.0 / 3.0));
  CHECK(it->recall == doctest::Approx(2.0 / 3.0));
  CHECK(it->f1 == doctest::Approx(2.0 / 3.0));
  CHECK(it->support == 3);
}

TEST_CASE("POS scoring on a fixed per-tag confusion") {
  // Confusions consistent with a 226-token report: per-tag true positives,
  // gold and predicted counts; ADJ, ADV, NUM and CCONJ are never right.
  struct Row {
    const char* tag;
    int tp, gold, pred;
  };
  const std::vector<Row> rows = {
      {"PART", 91, 91, 94}, {"NOUN", 30, 37, 41}, {"VERB", 27, 31, 34}, {"PUNCT", 23, 25, 23},
      {"PRON", 16, 22, 18}, {"DET", 1, 4, 4},     {"ADJ", 0, 3, 7},     {"ADV", 0, 4, 0},
      {"AUX", 2, 3, 3},     {"PROPN", 2, 3, 2},   {"NUM", 0, 2, 0},     {"CCONJ", 0, 1, 0},
  };
  std::vector<std::string> gold, pred;
  std::vector<std::string> missed, extra;
  for (const auto& r : rows) {
    for (int i = 0; i < r.tp; ++i) {
      gold.emplace_back(r.tag);
      pred.emplace_back(r.tag);
    }
    for (int i = r.tp; i < r.gold; ++i) missed.emplace_back(r.tag);
    for (int i = r.tp; i < r.pred; ++i) extra.emplace_back(r.tag);
  }
  REQUIRE(missed.size() == extra.size());
  // Pair each missed gold token with a wrong prediction of another tag.
  std::vector<bool> used(extra.size(), false);
  for (const auto& g : missed) {
    std::size_t j = 0;
    while (used[j] || extra[j] == g) ++j;
    used[j] = true;
    gold.push_back(g);
    pred.push_back(extra[j]);
  }
  const auto r = score_pos(gold, pred);
  CHECK(r.total == 226);
  CHECK(r.correct == 192);
  CHECK(r.accuracy == doctest::Approx(0.8496).epsilon(5e-5));
  CHECK(r.micro.precision == r.accuracy);
  CHECK(r.micro.f1 == r.accuracy);
  CHECK(r.macro.precision == doctest::Approx(0.5250).epsilon(1e-4));
  CHECK(r.macro.recall == doctest::Approx(0.4927).epsilon(1e-4));
  CHECK(r.macro.f1 == doctest::Approx(0.5049).epsilon(1e-4));
  const auto aux = std::find_if(r.per_tag.begin(), r.per_tag.end(), [](const TagScores& t) { return t.tag == "AUX"; });
  CHECK(aux->f1 == doctest::Approx(0.6667).epsilon(1e-4));
  const auto adv = std::find_if(r.per_tag.begin(), r.per_tag.end(), [](const TagScores& t) { return t.tag == "ADV"; });
  CHECK(adv->precision == 0.0);
  CHECK(adv->f1 == 0.0);
  CHECK(r.per_tag.front().tag == "PART");
  CHECK(r.table().find("micro avg") != std::string::npos);
  CHECK(r.table().find("macro avg") != std::string::npos);
}

TEST_CASE("monolingual tagger beats the majority-class baseline") {
  const auto parts = split(testing::synthetic_cbr_like(), SplitSpec::parse("60/20/20", 1));
  const auto model = train_tagger(parts.train, {});
  const auto report = evaluate_pos(model, parts.test);
  std::size_t part = 0;
  for (const auto& s : parts.test.sentences) {
    for (const auto& t : s.tokens) part += t.upos.str() == "PART" ? 1 : 0;
  }
  const double baseline = static_cast<double>(part) / static_cast<double>(parts.test.token_count());
  CHECK(report.accuracy > baseline);
  CHECK(report.total == parts.test.token_count());

  const auto no_punct = evaluate_pos(model, parts.test, true);
  CHECK(no_punct.total < report.total);
  CHECK_THROWS_AS(evaluate_pos(model, Treebank{}), Error);
}

TEST_CASE("unknown gold tags count as errors") {
  const auto model = train_tagger(single("1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n"), {});
  const auto r = evaluate_pos(model, single("1\ta\t_\tINTJ\t_\t_\t0\troot\t_\t_\n\n"));
  CHECK(r.accuracy == 0.0);
}
