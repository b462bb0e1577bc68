#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "synthetic_corpus.hpp"
#include "tbw/error.hpp"
#include "tbw/fixtures.hpp"
#include "tbw/parser.hpp"
#include "tbw/prep.hpp"
#include "tbw/validate.hpp"

using namespace tbw;

namespace {

const std::vector<std::string> kLabels = {"nsubj", "obj", "advmod", "aux:sgen", "punct"};

// Score of the best assignment from every dependent reaching root, with
// any number of root attachments.
double best_arborescence_score(const ArcScores& scores) {
  double best = -1e300;
  for (const auto& heads : oracle::all_head_assignments(scores.size())) {
    bool ok = true;
    for (std::size_t d = 1; d <= heads.size() && ok; ++d) {
      int cur = static_cast<int>(d), steps = 0;
      while (cur != 0 && steps <= static_cast<int>(heads.size())) {
        cur = heads[static_cast<std::size_t>(cur - 1)];
        ++steps;
      }
      ok = cur == 0;
    }
    if (ok) best = std::max(best, tree_score(scores, heads));
  }
  return best;
}

}  // namespace

TEST_CASE("MST decoding matches exhaustive search") {
  SplitMix64 rng(77);
  for (std::size_t n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto scores = oracle::random_scores(n, rng);
      const auto heads = decode_mst(scores);
      REQUIRE(heads.size() == n);
      CHECK(oracle::is_single_root_tree(heads));
      CHECK(tree_score(scores, heads) == doctest::Approx(oracle::best_tree_score(scores)).epsilon(1e-12));

      const auto free = chu_liu_edmonds(scores);
      CHECK(tree_score(scores, free) == doctest::Approx(best_arborescence_score(scores)).epsilon(1e-12));
    }
  }
}

TEST_CASE("small decoding examples") {
  ArcScores one_token(1);
  one_token.at(0, 1) = -3.0;
  CHECK(decode_mst(one_token) == HeadAssignment{0});

  ArcScores two(2);
  two.at(0, 1) = 10;
  two.at(0, 2) = 9;
  two.at(1, 2) = 0;
  two.at(2, 1) = 1;
  // Both tokens prefer root; one must settle for the other as head.
  CHECK(chu_liu_edmonds(two) == HeadAssignment{0, 0});
  const auto heads = decode_mst(two);
  CHECK(heads == HeadAssignment{0, 1});
  CHECK(tree_score(two, heads) == 10.0);

  CHECK(decode_mst(ArcScores(0)).empty());
}

TEST_CASE("decoded trees are valid and invariant to positive scaling") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    auto scores = oracle::random_scores(n, rng);
    const auto heads = decode_mst(scores);
    CHECK(oracle::is_single_root_tree(heads));
    Sentence s;
    for (std::size_t i = 0; i < n; ++i) {
      Token t;
      t.id = static_cast<int>(i) + 1;
      t.form = "x";
      t.head = heads[i];
      t.deprel = DepRel::parse(heads[i] == 0 ? "root" : "dep");
      s.tokens.push_back(t);
    }
    CHECK(validate_tree(s, 1).empty());

    ArcScores scaled(n), shifted(n);
    for (std::size_t h = 0; h <= n; ++h) {
      for (std::size_t d = 1; d <= n; ++d) {
        scaled.at(h, d) = 3.5 * scores.at(h, d);
        shifted.at(h, d) = scores.at(h, d) + 2.0;
      }
    }
    CHECK(decode_mst(scaled) == heads);
    CHECK(decode_mst(shifted) == heads);
  }
}

TEST_CASE("root penalty") {
  ArcScores s(3);
  for (std::size_t h = 0; h <= 3; ++h) {
    for (std::size_t d = 1; d <= 3; ++d) s.at(h, d) = h == d ? 100.0 : static_cast<double>(h + d);
  }
  // Off-diagonal scores range over [1, 5].
  CHECK(single_root_penalty(s) == 3.0 * 4.0 + 1.0);
}

TEST_CASE("a single sentence is memorized") {
  const auto tb = parse_conllu_text(fixtures::enclitic_example_conllu(), "enclitics");
  ParserTrainOptions opts;
  opts.epochs = 5;
  const auto model = train_parser(tb, opts);
  const auto report = evaluate_dep(parse_treebank(model, tb), tb);
  CHECK(report.uas == 1.0);
  CHECK(report.las == 1.0);
  CHECK(report.token_count == 10);
}

TEST_CASE("parser training is deterministic") {
  const auto tb = testing::synthetic_cbr_like(30, 3);
  ParserTrainOptions opts;
  opts.epochs = 3;
  opts.seed = 9;
  const auto a = train_parser(tb, opts);
  CHECK(a == train_parser(tb, opts));
  std::ostringstream sa, sb;
  a.save(sa);
  train_parser(tb, opts).save(sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("all-zero model yields a fixed tree") {
  ParserModel zero;
  zero.labels = {"dep", "root"};
  zero.trained = true;
  const auto tb = parse_conllu_text(fixtures::subject_example_conllu(), "subjects");
  Sentence s = tb.sentences[0];
  s.tokens.resize(3);
  const auto a = parse(zero, s);
  const auto b = parse(zero, s);
  CHECK(a.heads == b.heads);
  CHECK(oracle::is_single_root_tree(a.heads));
  ParserModel fresh = zero;
  CHECK(parse(fresh, s).heads == a.heads);
  for (const auto& l : a.labels) CHECK(l.str() == "dep");
  CHECK_THROWS_AS(parse_treebank(ParserModel{}, tb), Error);
}

TEST_CASE("delexicalized parser with stripped labels") {
  const auto tb = harmonize_labels(testing::synthetic_cbr_like(40, 6), LabelHarmonization::StripSubtypes);
  ParserTrainOptions opts;
  opts.mode = LexMode::Delex;
  opts.epochs = 3;
  const auto model = train_parser(tb, opts);
  CHECK(model.mode == LexMode::Delex);
  for (const auto& l : model.labels) CHECK(l.find(':') == std::string::npos);
  for (FeatureId i = 0; i < model.arc_features.size(); ++i) {
    const auto& name = model.arc_features.name(i);
    CHECK(name.find("form=ñu") == std::string::npos);
  }
  const auto parsed = parse_treebank(model, delexicalize(tb));
  for (const auto& s : parsed.sentences) {
    for (const auto& t : s.tokens) CHECK_FALSE(t.deprel.has_subtype());
  }
}

TEST_CASE("training rejects bad input") {
  CHECK_THROWS_AS(train_parser(Treebank{}, {}), Error);
  auto tb = parse_conllu_text(fixtures::subject_example_conllu(), "subjects");
  tb.sentences[0].tokens[6].head = 1;  // root now inside a cycle
  try {
    train_parser(tb, {});
    FAIL("expected NonTreeInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonTreeInput);
  }
}

TEST_CASE("attachment scores match the counting oracle") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    Treebank gold, pred;
    const std::size_t sentences = 1 + rng.below(3);
    for (std::size_t k = 0; k < sentences; ++k) {
      const std::size_t n = 1 + rng.below(8);
      const auto g = oracle::random_tree_sentence(n, rng, kLabels);
      auto p = g;
      for (auto& t : p.tokens) {
        if (rng.below(3) == 0) t.head = static_cast<int>(rng.below(n + 1));
        if (rng.below(3) == 0) t.deprel = DepRel::parse(kLabels[rng.below(kLabels.size())]);
      }
      gold.sentences.push_back(g);
      pred.sentences.push_back(p);
    }
    const bool no_punct = rng.below(2) == 0;
    const auto c = oracle::count_attachments(pred, gold, no_punct);
    if (c.scored == 0) continue;
    const auto r = evaluate_dep(pred, gold, no_punct);
    CHECK(r.token_count == c.scored);
    CHECK(r.head_correct == c.heads);
    CHECK(r.both_correct == c.both);
    CHECK(r.uas == doctest::Approx(static_cast<double>(c.heads) / static_cast<double>(c.scored)));
    CHECK(r.las == doctest::Approx(static_cast<double>(c.both) / static_cast<double>(c.scored)));
    CHECK(r.las <= r.uas);
  }
}

TEST_CASE("LAS needs the full label") {
  const auto gold = parse_conllu_text(
      "1\ta\t_\tPART\t_\t_\t4\taux:sgen\t_\t_\n"
      "2\tb\t_\tNOUN\t_\t_\t4\tnsubj:free\t_\t_\n"
      "3\tc\t_\tNOUN\t_\t_\t4\tobj\t_\t_\n"
      "4\td\t_\tVERB\t_\t_\t0\troot\t_\t_\n\n",
      "g");
  auto pred = gold;
  pred.sentences[0].tokens[0].deprel = DepRel::parse("aux");
  pred.sentences[0].tokens[1].deprel = DepRel::parse("nsubj");
  const auto r = evaluate_dep(pred, gold);
  CHECK(r.uas == 1.0);
  CHECK(r.las == 0.5);
  CHECK(r.per_label.at("aux:sgen").both_correct == 0);
  CHECK(r.tsv().rfind("# uas=1.0000 las=0.5000 tokens=4\n", 0) == 0);

  auto short_pred = pred;
  short_pred.sentences[0].tokens.pop_back();
  CHECK_THROWS_AS(evaluate_dep(short_pred, gold), Error);
  CHECK_THROWS_AS(evaluate_dep(Treebank{}, gold), Error);
}

TEST_CASE("parser model file round trip") {
  const auto tb = testing::synthetic_shp_like(40, 2);
  ParserTrainOptions opts;
  opts.epochs = 2;
  opts.mode = LexMode::Delex;
  const auto model = train_parser(tb, opts);
  std::stringstream ss;
  model.save(ss);
  const auto text = ss.str();
  CHECK(text.rfind("tbw-parser\tv1\tmode=delex\t", 0) == 0);
  const auto loaded = ParserModel::load(ss);
  CHECK(loaded.labels == model.labels);
  CHECK(loaded.meta == model.meta);
  const auto input = delexicalize(tb);
  const auto a = parse_treebank(model, input), b = parse_treebank(loaded, input);
  CHECK(a == b);
  std::stringstream again;
  loaded.save(again);
  CHECK(again.str() == text);
  std::istringstream wrong("tbw-tagger\tv1\n");
  CHECK_THROWS_AS(ParserModel::load(wrong), Error);
}

TEST_CASE("random-tree baseline") {
  const auto tb = testing::synthetic_cbr_like(60, 4);
  const double a = random_tree_uas(tb, 1);
  CHECK(a == random_tree_uas(tb, 1));
  CHECK(a > 0.0);
  CHECK(a < 0.5);
  ParserTrainOptions opts;
  opts.epochs = 3;
  const auto model = train_parser(tb, opts);
  CHECK(evaluate_dep(parse_treebank(model, tb), tb).uas > a);
}

TEST_CASE("arc features") {
  const auto tb = parse_conllu_text(fixtures::subject_example_conllu(), "subjects");
  const auto& s = tb.sentences[0];
  const auto f = arc_features(s, 7, 2);
  CHECK_FALSE(f.empty());
  CHECK(f != arc_features(s, 2, 7));
  CHECK_FALSE(arc_features(s, 0, 7).empty());
}
