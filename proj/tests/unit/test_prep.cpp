#include <doctest.h>

#include <algorithm>
#include <map>

#include "synthetic_corpus.hpp"
#include "tbw/error.hpp"
#include "tbw/fixtures.hpp"
#include "tbw/prep.hpp"
#include "tbw/stats.hpp"
#include "tbw/validate.hpp"

using namespace tbw;

namespace {

Treebank numbered(std::size_t n) {
  Treebank tb;
  tb.source_name = "num";
  for (std::size_t i = 0; i < n; ++i) {
    Sentence s;
    s.comments.push_back("# sent_id = " + std::to_string(i));
    Token t;
    t.form = "w" + std::to_string(i);
    t.upos = UPos::VERB;
    t.deprel = DepRel::parse("root");
    s.tokens.push_back(t);
    tb.sentences.push_back(s);
  }
  return tb;
}

std::vector<std::string> ids(const Treebank& tb) {
  std::vector<std::string> out;
  for (const auto& s : tb.sentences) out.push_back(*s.sent_id());
  return out;
}

}  // namespace

TEST_CASE("splitmix64 reference outputs") {
  SplitMix64 zero(0);
  CHECK(zero.next() == 0xE220A8397B1DCDAFULL);
  SplitMix64 rng(1234567);
  CHECK(rng.next() == 6457827717110365317ULL);
  CHECK(rng.next() == 3203168211198807973ULL);
  CHECK(rng.next() == 9817491932198370423ULL);
  CHECK(rng.next() == 4593380528125082431ULL);
  CHECK(rng.next() == 16408922859458223821ULL);
  SplitMix64 u(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
  }
}

TEST_CASE("split sizes follow floor arithmetic with the remainder in train") {
  const auto a = split_sizes(130, SplitSpec::parse("60/20/20", 1));
  CHECK(a.train == 78);
  CHECK(a.dev == 26);
  CHECK(a.test == 26);
  const auto b = split_sizes(130, SplitSpec::parse("80/10/10", 1));
  CHECK(b.train == 104);
  CHECK(b.dev == 13);
  CHECK(b.test == 13);
  const auto c = split_sizes(7, SplitSpec::parse("60/20/20", 1));
  CHECK(c.train == 5);
  CHECK(c.dev == 1);
  CHECK(c.test == 1);
  const auto d = split_sizes(10, SplitSpec::parse("100/0/0", 1));
  CHECK(d.train == 10);
  CHECK(d.test == 0);
}

TEST_CASE("split spec parsing") {
  CHECK(SplitSpec::parse("60/20/20", 4).percent == std::array<unsigned, 3>{60, 20, 20});
  CHECK(SplitSpec::parse("60/20/20", 4).ratios_str() == "60/20/20");
  for (const char* bad : {"60/20", "60/20/30", "a/b/c", "", "60/-20/60", "60/20/20/0"}) {
    CHECK_THROWS_AS(SplitSpec::parse(bad, 1), Error);
  }
}

TEST_CASE("split partitions, is deterministic and keeps corpus order") {
  const auto tb = numbered(130);
  const auto spec = SplitSpec::parse("60/20/20", 42);
  const auto a = split(tb, spec);
  const auto b = split(tb, spec);
  CHECK(serialize_conllu(a.train) == serialize_conllu(b.train));
  CHECK(serialize_conllu(a.dev) == serialize_conllu(b.dev));
  CHECK(serialize_conllu(a.test) == serialize_conllu(b.test));
  CHECK(a.train.sentences.size() == 78);
  CHECK(a.dev.sentences.size() == 26);
  CHECK(a.test.sentences.size() == 26);

  std::vector<std::string> all;
  for (const auto* part : {&a.train, &a.dev, &a.test}) {
    const auto v = ids(*part);
    CHECK(std::is_sorted(v.begin(), v.end(), [](const std::string& x, const std::string& y) {
      return std::stoi(x) < std::stoi(y);
    }));
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end());
  auto expected = ids(tb);
  std::sort(expected.begin(), expected.end());
  CHECK(all == expected);

  const auto other = split(tb, SplitSpec::parse("60/20/20", 43));
  CHECK(ids(other.test) != ids(a.test));
  CHECK(a.train.source_name == "num.train");
  CHECK(a.test.source_name == "num.test");
  CHECK_THROWS_AS(split(numbered(2), spec), Error);
}

TEST_CASE("split membership follows the documented shuffle") {
  // Independent re-derivation: Fisher-Yates over indices with below(i).
  const std::size_t n = 20;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  SplitMix64 rng(9);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next() % (i + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::size_t> test(perm.begin() + 16, perm.end());
  std::sort(test.begin(), test.end());
  std::vector<std::string> expected;
  for (const auto i : test) expected.push_back(std::to_string(i));
  const auto parts = split(numbered(n), SplitSpec::parse("60/20/20", 9));
  CHECK(ids(parts.test) == expected);
}

TEST_CASE("delexicalize touches only form and lemma") {
  const auto tb = fixtures::bundled();
  const auto d = delexicalize(tb);
  REQUIRE(d.sentences.size() == tb.sentences.size());
  for (std::size_t si = 0; si < tb.sentences.size(); ++si) {
    for (std::size_t i = 0; i < tb.sentences[si].size(); ++i) {
      const auto& a = tb.sentences[si].tokens[i];
      const auto& b = d.sentences[si].tokens[i];
      CHECK(b.form == "_");
      CHECK(b.lemma == "_");
      CHECK(b.upos == a.upos);
      CHECK(b.head == a.head);
      CHECK(b.deprel == a.deprel);
      CHECK(b.feats == a.feats);
    }
  }
  CHECK(delexicalize(d) == d);
  const auto u1 = upos_distribution(tb), u2 = upos_distribution(d);
  REQUIRE(u1.size() == u2.size());
  for (std::size_t i = 0; i < u1.size(); ++i) CHECK(u1[i].count == u2[i].count);
}

TEST_CASE("label harmonization") {
  const auto tb = fixtures::bundled();
  CHECK(harmonize_labels(tb, LabelHarmonization::Identity) == tb);
  const auto stripped = harmonize_labels(tb, LabelHarmonization::StripSubtypes);
  std::map<std::string, std::size_t> before, after;
  for (const auto& r : deprel_distribution(tb)) before[r.label] = r.count;
  for (const auto& r : deprel_distribution(stripped)) {
    after[r.label] = r.count;
    CHECK(r.label.find(':') == std::string::npos);
  }
  CHECK(after["nsubj"] == before["nsubj:bound"] + before["nsubj:free"]);
  CHECK(after["aux"] == before["aux"] + before["aux:sgen"] + before["aux:ev"]);
  CHECK(after["root"] == before["root"]);
  CHECK(stripped.token_count() == tb.token_count());

  const auto shp = testing::synthetic_shp_like(50, 2);
  for (const auto& s : harmonize_labels(shp, LabelHarmonization::StripSubtypes).sentences) {
    for (const auto& t : s.tokens) CHECK(t.deprel.str() != "aux:val");
  }
}

TEST_CASE("tree diagnostics are invariant under delex and harmonization") {
  ValidationOptions opts;
  opts.lints = false;
  auto tb = testing::synthetic_cbr_like(30, 3);
  tb.sentences[4].tokens[0].head = static_cast<int>(tb.sentences[4].size()) + 3;
  const auto base = validate_treebank(tb, opts);
  CHECK(has_errors(base));
  const auto lines = [](const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(d.to_line());
    return out;
  };
  CHECK(lines(validate_treebank(delexicalize(tb), opts)) == lines(base));
  std::vector<Diagnostic> tree_only;
  for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
    for (auto& d : validate_tree(harmonize_labels(tb, LabelHarmonization::StripSubtypes).sentences[i],
                                 static_cast<int>(i) + 1)) {
      tree_only.push_back(d);
    }
  }
  std::vector<Diagnostic> tree_base;
  for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
    for (auto& d : validate_tree(tb.sentences[i], static_cast<int>(i) + 1)) tree_base.push_back(d);
  }
  CHECK(lines(tree_only) == lines(tree_base));
}
