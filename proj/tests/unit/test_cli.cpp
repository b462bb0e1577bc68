#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "synthetic_corpus.hpp"
#include "tbw/conllu.hpp"
#include "tbw/error.hpp"
#include "tbw/fixtures.hpp"

using namespace tbw;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("tbw-test-" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("usage errors") {
  auto r = run({});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("Usage") != std::string::npos);
  r = run({"frobnicate"});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("validate") != std::string::npos);
  r = run({"stats", "--key", "feats", "x.conllu"});
  CHECK(r.code == cli::kExitFailure);
  r = run({"--version"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "tbw 0.1.0 (model format v1)\n");
}

TEST_CASE("fixtures, validate and stats") {
  TempDir dir("basic");
  auto r = run({"fixtures", "--out", dir.file("fx")});
  REQUIRE(r.code == 0);
  const auto corpus = dir.file("fx/fixtures.conllu");
  CHECK(r.out.find(corpus) != std::string::npos);

  r = run({"validate", "--profile", "kakataibo", "--strict", corpus});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.empty());
  CHECK(r.err.find("8 sentences, 0 errors, 0 warnings") != std::string::npos);

  r = run({"stats", "--key", "upos", corpus});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("label\tn\tfreq\n", 0) == 0);
  CHECK(r.out.find("PART\t13\t0.2549\n") != std::string::npos);
  CHECK(r.out.find("NOUN\t11\t0.2157\n") != std::string::npos);
  CHECK(r.err.find("sentences=8") != std::string::npos);

  r = run({"stats", "--key", "length", corpus});
  CHECK(r.code == 0);
  CHECK(r.out.find("6.375") != std::string::npos);

  // A cycle makes validation fail with exit code 2.
  auto tb = read_conllu_file(corpus);
  tb.sentences[1].tokens[6].head = 1;
  write_conllu_file(dir.file("bad.conllu"), tb);
  r = run({"validate", dir.file("bad.conllu")});
  CHECK(r.code == cli::kExitInvalid);
  CHECK(r.out.find("ERROR\tcycle\t2\t") != std::string::npos);

  r = run({"validate", dir.file("missing.conllu")});
  CHECK(r.code == cli::kExitFailure);
}

TEST_CASE("split and delex") {
  TempDir dir("split");
  const auto input = dir.file("c.conllu");
  write_conllu_file(input, testing::synthetic_cbr_like(30, 1));
  auto r = run({"split", input, "--ratios", "60/20/20", "--seed", "4", "--out-prefix", dir.file("a")});
  REQUIRE(r.code == 0);
  CHECK(r.out == dir.file("a") + ".train.conllu\n" + dir.file("a") + ".dev.conllu\n" + dir.file("a") + ".test.conllu\n");
  REQUIRE(run({"split", input, "--ratios", "60/20/20", "--seed", "4", "--out-prefix", dir.file("b")}).code == 0);
  for (const char* part : {".train.conllu", ".dev.conllu", ".test.conllu"}) {
    CHECK(slurp(dir.file(std::string("a") + part)) == slurp(dir.file(std::string("b") + part)));
  }
  CHECK(read_conllu_file(dir.file("a.test.conllu")).sentences.size() == 6);
  CHECK(read_conllu_file(dir.file("a.dev.conllu")).sentences.size() == 6);
  CHECK(run({"split", input, "--ratios", "70/20/20"}).code == cli::kExitFailure);

  r = run({"delex", input});
  CHECK(r.code == 0);
  const auto delexed = parse_conllu_text(r.out);
  for (const auto& s : delexed.sentences) {
    for (const auto& t : s.tokens) CHECK(t.form == "_");
  }
}

TEST_CASE("train, tag, parse and evaluate") {
  TempDir dir("models");
  const auto train = dir.file("train.conllu");
  const auto test = dir.file("test.conllu");
  write_conllu_file(train, testing::synthetic_cbr_like(60, 2));
  write_conllu_file(test, testing::synthetic_cbr_like(15, 3));
  const auto shp = dir.file("shp.conllu");
  write_conllu_file(shp, testing::synthetic_shp_like(60, 2));

  REQUIRE(run({"pos", "train", "--train", shp, "--model", dir.file("shp.tagger"), "--epochs", "3"}).code == 0);
  REQUIRE(run({"pos", "train", "--train", train, "--model", dir.file("ft.tagger"), "--epochs", "2", "--warm-start",
               dir.file("shp.tagger")})
              .code == 0);
  const auto model_text = slurp(dir.file("ft.tagger"));
  const auto header = model_text.substr(0, model_text.find('\n'));
  CHECK(header.find("sources=" + shp + "," + train) != std::string::npos);

  auto r = run({"pos", "tag", "--model", dir.file("ft.tagger"), test});
  REQUIRE(r.code == 0);
  CHECK(parse_conllu_text(r.out).sentences.size() == 15);
  CHECK(run({"pos", "tag", "--model", dir.file("ft.tagger"), test}).out == r.out);

  r = run({"pos", "eval", "--model", dir.file("ft.tagger"), test, "--format", "tsv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# accuracy=", 0) == 0);
  CHECK(r.out.find("micro avg\t") != std::string::npos);

  REQUIRE(run({"dep", "train", "--train", train, "--model", dir.file("p.parser"), "--epochs", "3", "--mode", "delex"})
              .code == 0);
  r = run({"dep", "parse", "--model", dir.file("p.parser"), test, "--out", dir.file("parsed.conllu")});
  REQUIRE(r.code == 0);
  const auto parsed = read_conllu_file(dir.file("parsed.conllu"));
  CHECK(parsed.sentences[0].tokens[0].form == read_conllu_file(test).sentences[0].tokens[0].form);
  r = run({"dep", "eval", test, "--pred", dir.file("parsed.conllu")});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# uas=", 0) == 0);
  const auto via_model = run({"dep", "eval", test, "--model", dir.file("p.parser")});
  CHECK(via_model.code == 0);
  CHECK(via_model.out == r.out);

  CHECK(run({"dep", "eval", test}).code == cli::kExitFailure);
  CHECK(run({"pos", "tag", "--model", dir.file("p.parser"), test}).code == cli::kExitFailure);
}

TEST_CASE("config parsing") {
  const auto m = cli::parse_config("# comment\nseeds = 1,2\n\ncorpus=cbr=/x/cbr.conllu\ncorpus = shp=/y\n");
  CHECK(m.size() == 3);
  CHECK(m.find("seeds")->second == "1,2");
  CHECK(m.count("corpus") == 2);
  CHECK(m.find("corpus")->second == "cbr=/x/cbr.conllu");
  CHECK_THROWS_AS(cli::parse_config("seeds 1\n"), Error);
}

TEST_CASE("experiment subcommand") {
  TempDir dir("experiment");
  const auto cbr = dir.file("cbr.conllu");
  const auto shp = dir.file("shp.conllu");
  write_conllu_file(cbr, testing::synthetic_cbr_like(40, 5));
  write_conllu_file(shp, testing::synthetic_shp_like(60, 5));
  {
    std::ofstream cfg(dir.file("run.cfg"));
    cfg << "# two seeds\nseeds = 1,2\nepochs = 2\ncorpus = cbr=" << cbr << "\ncorpus = shp=" << shp << "\n";
  }
  auto r = run({"experiment", "pos", "--config", dir.file("run.cfg"), "--out", dir.file("a.tsv")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("pos-3") != std::string::npos);
  const auto tsv = slurp(dir.file("a.tsv"));
  CHECK(tsv.rfind("experiment\ttarget\tmetric\tmean\tsd\tseeds\n", 0) == 0);
  CHECK(tsv.find("\t1,2\n") != std::string::npos);

  r = run({"experiment", "pos", "--config", dir.file("run.cfg"), "--format", "tsv"});
  CHECK(r.out == tsv);

  r = run({"experiment", "dep", "--config", dir.file("run.cfg"), "--only", "dep-1,dep-6", "--format", "tsv"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("dep-1: skipped") != std::string::npos);
  CHECK(r.out.find("dep-6\tcbr\tUAS\t") != std::string::npos);
  CHECK(r.out.find("dep-2") == std::string::npos);

  CHECK(run({"experiment", "pos", "--corpus", "cbr=" + cbr, "--seeds", "1", "--epochs", "1"}).code == cli::kExitFailure);
  CHECK(run({"experiment", "pos", "--only", "pos-9", "--config", dir.file("run.cfg")}).code == cli::kExitFailure);
}
