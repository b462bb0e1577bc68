#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tbw/conllu.hpp"
#include "tbw/error.hpp"
#include "tbw/experiments.hpp"
#include "tbw/fixtures.hpp"
#include "tbw/parser.hpp"
#include "tbw/prep.hpp"
#include "tbw/stats.hpp"
#include "tbw/tagger.hpp"
#include "tbw/validate.hpp"

namespace tbw::cli {

namespace {

constexpr int kModelFormatVersion = 1;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(std::ostream& out, const std::string& data, const std::string& path) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IOError, fmt::format("cannot write '{}'", path));
  file << data;
}

Treebank read_all(const std::vector<std::string>& paths) {
  Treebank merged;
  for (const auto& p : paths) {
    auto tb = read_conllu_file(p);
    if (merged.source_name.empty()) merged.source_name = tb.source_name;
    for (auto& s : tb.sentences) merged.sentences.push_back(std::move(s));
  }
  return merged;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorCode::InvalidArgument, fmt::format("bad seed '{}'", item));
    seeds.push_back(v);
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "no seeds given");
  return seeds;
}

struct ValidateArgs {
  std::string input;
  std::string profile = "generic";
  bool strict = false;
  bool no_lints = false;
};

int run_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  const auto tb = read_conllu_file(a.input);
  ValidationOptions opts;
  opts.profile = SchemaProfile::by_name(a.profile);
  opts.profile.strict = opts.profile.strict || a.strict;
  opts.lints = !a.no_lints;
  const auto diags = validate_treebank(tb, opts);
  std::size_t errors = 0;
  for (const auto& d : diags) {
    out << d.to_line() << '\n';
    if (d.severity == Severity::Error) ++errors;
  }
  fmt::print(err, "{}: {} sentences, {} errors, {} warnings\n", a.input, tb.sentences.size(), errors,
             diags.size() - errors);
  return errors > 0 ? kExitInvalid : kExitOk;
}

struct StatsArgs {
  std::vector<std::string> inputs;
  std::string key = "upos";
  std::string format = "tsv";
  bool exclude_punct = false;
};

int run_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  const bool table = a.format == "table";
  std::vector<std::pair<std::string, Treebank>> parts;
  for (const auto& path : a.inputs) parts.emplace_back(stem(path), read_conllu_file(path));
  for (const auto& [name, tb] : parts) {
    fmt::print(err, "{}: sentences={} roots={} tokens={}\n", name, tb.sentences.size(), tb.root_count(),
               tb.token_count());
  }

  if (a.key == "length") {
    Treebank all = read_all(a.inputs);
    const auto ls = length_stats(all, !a.exclude_punct);
    out << (table ? length_table(ls) : length_tsv(ls));
    return kExitOk;
  }
  const auto key = a.key == "deprel" ? DistributionKey::Deprel : DistributionKey::Upos;
  if (parts.size() > 1) {
    const auto st = split_distribution(parts, key);
    out << (table ? split_table_text(st, a.key) : split_tsv(st));
    return kExitOk;
  }
  const auto rows = distribution(parts.front().second, key);
  out << (table ? distribution_table(rows, a.key) : distribution_tsv(rows));
  return kExitOk;
}

struct SplitArgs {
  std::string input;
  std::string ratios = "60/20/20";
  std::uint64_t seed = 1;
  std::string out_prefix;
};

int run_split(const SplitArgs& a, std::ostream& out, std::ostream& err) {
  const auto tb = read_conllu_file(a.input);
  const auto parts = split(tb, SplitSpec::parse(a.ratios, a.seed));
  const auto prefix = a.out_prefix.empty() ? stem(a.input) : a.out_prefix;
  const std::pair<const char*, const Treebank*> files[] = {
      {"train", &parts.train}, {"dev", &parts.dev}, {"test", &parts.test}};
  for (const auto& [name, part] : files) {
    const auto path = fmt::format("{}.{}.conllu", prefix, name);
    write_conllu_file(path, *part);
    out << path << '\n';
    fmt::print(err, "{}: {} sentences\n", path, part->sentences.size());
  }
  return kExitOk;
}

struct DelexArgs {
  std::string input;
  std::string out;
};

int run_delex(const DelexArgs& a, std::ostream& out) {
  emit(out, serialize_conllu(delexicalize(read_conllu_file(a.input))), a.out);
  return kExitOk;
}

struct PosArgs {
  std::vector<std::string> train;
  std::string model;
  std::string warm_start;
  int epochs = 10;
  std::uint64_t seed = 1;
  std::string mode = "lex";
  std::string input;
  std::string out;
  std::string format = "table";
  bool exclude_punct = false;
};

int run_pos_train(const PosArgs& a, std::ostream& err) {
  const auto train = read_all(a.train);
  TaggerTrainOptions opts;
  opts.epochs = a.epochs;
  opts.seed = a.seed;
  opts.mode = lex_mode_from_name(a.mode);
  std::optional<TaggerModel> warm;
  if (!a.warm_start.empty()) {
    warm = TaggerModel::load_file(a.warm_start);
    opts.warm_start = &*warm;
    opts.mode = warm->mode;
  }
  auto model = train_tagger(train, opts);
  model.meta.sources = warm ? warm->meta.sources : std::vector<std::string>{};
  model.meta.sources.insert(model.meta.sources.end(), a.train.begin(), a.train.end());
  model.save_file(a.model);
  fmt::print(err, "trained on {} sentences: {} tags, {} features -> {}\n", train.sentences.size(),
             model.tagset.size(), model.features.size(), a.model);
  return kExitOk;
}

int run_pos_tag(const PosArgs& a, std::ostream& out) {
  const auto model = TaggerModel::load_file(a.model);
  emit(out, serialize_conllu(tag_treebank(model, read_conllu_file(a.input))), a.out);
  return kExitOk;
}

int run_pos_eval(const PosArgs& a, std::ostream& out) {
  const auto model = TaggerModel::load_file(a.model);
  const auto report = evaluate_pos(model, read_conllu_file(a.input), a.exclude_punct);
  emit(out, a.format == "tsv" ? report.tsv() : report.table(), a.out);
  return kExitOk;
}

struct DepArgs {
  std::vector<std::string> train;
  std::string model;
  int epochs = 10;
  std::uint64_t seed = 1;
  std::string mode = "lex";
  std::string input;
  std::string gold;
  std::string pred;
  std::string out;
  bool exclude_punct = false;
};

int run_dep_train(const DepArgs& a, std::ostream& err) {
  const auto train = read_all(a.train);
  ParserTrainOptions opts;
  opts.epochs = a.epochs;
  opts.seed = a.seed;
  opts.mode = lex_mode_from_name(a.mode);
  auto model = train_parser(train, opts);
  model.meta.sources = a.train;
  model.save_file(a.model);
  fmt::print(err, "trained on {} sentences: {} labels, {} arc features -> {}\n", train.sentences.size(),
             model.labels.size(), model.arc_features.size(), a.model);
  return kExitOk;
}

int run_dep_parse(const DepArgs& a, std::ostream& out) {
  const auto model = ParserModel::load_file(a.model);
  auto input = read_conllu_file(a.input);
  if (model.mode == LexMode::Delex) {
    // Parse the delexicalized copy, keep the original forms in the output.
    const auto parsed = parse_treebank(model, delexicalize(input));
    for (std::size_t i = 0; i < input.sentences.size(); ++i) {
      for (std::size_t j = 0; j < input.sentences[i].size(); ++j) {
        input.sentences[i].tokens[j].head = parsed.sentences[i].tokens[j].head;
        input.sentences[i].tokens[j].deprel = parsed.sentences[i].tokens[j].deprel;
      }
    }
  } else {
    input = parse_treebank(model, input);
  }
  emit(out, serialize_conllu(input), a.out);
  return kExitOk;
}

int run_dep_eval(const DepArgs& a, std::ostream& out) {
  const auto gold = read_conllu_file(a.gold);
  Treebank pred;
  if (!a.pred.empty()) {
    pred = read_conllu_file(a.pred);
  } else if (!a.model.empty()) {
    const auto model = ParserModel::load_file(a.model);
    pred = parse_treebank(model, model.mode == LexMode::Delex ? delexicalize(gold) : gold);
  } else {
    throw Error(ErrorCode::InvalidArgument, "dep eval needs --model or --pred");
  }
  emit(out, evaluate_dep(pred, gold, a.exclude_punct).tsv(), a.out);
  return kExitOk;
}

struct ExperimentArgs {
  std::string task;
  std::vector<std::string> corpora;
  std::string seeds;
  std::string out;
  std::string config;
  std::string format = "table";
  std::vector<std::string> only;
  int epochs = 0;
  unsigned threads = 0;
  bool raw_labels = false;
};

void apply_config(ExperimentArgs& a) {
  if (a.config.empty()) return;
  const auto entries = parse_config(read_text(a.config));
  for (const auto& [key, value] : entries) {
    if (key == "corpus") {
      a.corpora.push_back(value);
    } else if (key == "seeds") {
      if (a.seeds.empty()) a.seeds = value;
    } else if (key == "out") {
      if (a.out.empty()) a.out = value;
    } else if (key == "epochs") {
      if (a.epochs == 0) a.epochs = std::stoi(value);
    } else if (key == "only") {
      a.only.push_back(value);
    } else if (key == "raw_labels") {
      a.raw_labels = a.raw_labels || value == "true" || value == "1";
    } else if (key == "threads") {
      if (a.threads == 0) a.threads = static_cast<unsigned>(std::stoul(value));
    } else {
      throw Error(ErrorCode::InvalidArgument, fmt::format("{}: unknown config key '{}'", a.config, key));
    }
  }
}

int run_experiment_cmd(ExperimentArgs a, std::ostream& out, std::ostream& err) {
  apply_config(a);
  const Task task = task_from_name(a.task);
  CorpusSet corpora;
  for (const auto& item : a.corpora) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("--corpus expects ID=PATH, got '{}'", item));
    }
    auto tb = read_conllu_file(item.substr(eq + 1));
    corpora[item.substr(0, eq)] = std::move(tb);
  }
  auto specs = builtin_matrix(task);
  if (const char* dir = std::getenv(kCorpusDirEnv); dir != nullptr && *dir != '\0') {
    for (const auto& spec : specs) {
      for (const auto& name : spec.corpora()) {
        if (corpora.count(name) > 0) continue;
        const auto path = std::filesystem::path(dir) / (name + ".conllu");
        if (std::filesystem::exists(path)) corpora[name] = read_conllu_file(path.string());
      }
    }
  }
  if (!a.only.empty()) {
    std::erase_if(specs, [&](const ExperimentSpec& s) {
      return std::find(a.only.begin(), a.only.end(), s.id) == a.only.end();
    });
    if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "--only matched no experiment");
  }
  const auto seeds = parse_seeds(a.seeds.empty() ? "1,2,3,4,5" : a.seeds);
  RunOptions opts;
  opts.threads = a.threads;
  std::vector<ExperimentResult> results;
  for (auto& spec : specs) {
    spec.seeds = seeds;
    if (a.epochs > 0) spec.epochs = a.epochs;
    if (a.raw_labels) spec.harmonization = LabelHarmonization::Identity;
    results.push_back(run_experiment(spec, corpora, opts));
    if (results.back().skipped) fmt::print(err, "{}: skipped, {}\n", spec.id, results.back().skip_reason);
  }
  const auto tsv = results_tsv(results);
  if (!a.out.empty()) emit(out, tsv, a.out);
  if (a.format == "tsv") {
    if (a.out.empty()) out << tsv;
  } else {
    out << render_results_table(results);
  }
  return kExitOk;
}

void add_train_common(CLI::App* cmd, std::vector<std::string>& train, std::string& model, int& epochs,
                      std::uint64_t& seed, std::string& mode) {
  cmd->add_option("--train", train, "Training CoNLL-U file(s)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--model", model, "Output model file")->required();
  cmd->add_option("--epochs", epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", seed, "Shuffle seed");
  cmd->add_option("--mode", mode, "Lexicalization mode")->check(CLI::IsMember({"lex", "delex"}));
}

}  // namespace

std::multimap<std::string, std::string> parse_config(const std::string& text) {
  std::multimap<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("config line {}: expected 'key = value'", lineno), lineno);
    }
    entries.emplace(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Treebank workbench: CoNLL-U validation, statistics, splits, POS tagging and dependency parsing"};
  app.name("tbw");
  app.require_subcommand(1);
  app.fallthrough(false);
  bool show_version = false;
  app.add_flag("--version", show_version, "Print version and exit");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check trees and label inventories");
  validate->add_option("input", va.input, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  validate->add_option("--profile", va.profile, "Schema profile")
      ->check(CLI::IsMember({"kakataibo", "shipibo", "generic"}));
  validate->add_flag("--strict", va.strict, "Treat schema violations as errors");
  validate->add_flag("--no-lints", va.no_lints, "Skip language-specific direction lints");

  StatsArgs sa;
  auto* stats = app.add_subcommand("stats", "Label distributions and sentence lengths");
  stats->add_option("inputs", sa.inputs, "CoNLL-U file(s); several files give a per-file table")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--key", sa.key, "Statistic")->check(CLI::IsMember({"upos", "deprel", "length"}));
  stats->add_option("--format", sa.format, "Output format")->check(CLI::IsMember({"tsv", "table"}));
  stats->add_flag("--exclude-punct", sa.exclude_punct, "Do not count PUNCT tokens in lengths");

  SplitArgs spa;
  auto* split_cmd = app.add_subcommand("split", "Seeded train/dev/test split");
  split_cmd->add_option("input", spa.input, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--ratios", spa.ratios, "Percentages train/dev/test");
  split_cmd->add_option("--seed", spa.seed, "Shuffle seed");
  split_cmd->add_option("--out-prefix", spa.out_prefix, "Output prefix (default: input stem)");

  DelexArgs da;
  auto* delex = app.add_subcommand("delex", "Replace FORM and LEMMA with '_'");
  delex->add_option("input", da.input, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  delex->add_option("--out", da.out, "Output file (default: stdout)");

  PosArgs pa;
  auto* pos = app.add_subcommand("pos", "Averaged perceptron POS tagger");
  pos->require_subcommand(1);
  auto* pos_train = pos->add_subcommand("train", "Train a tagger");
  add_train_common(pos_train, pa.train, pa.model, pa.epochs, pa.seed, pa.mode);
  pos_train->add_option("--warm-start", pa.warm_start, "Continue training from this model")
      ->check(CLI::ExistingFile);
  auto* pos_tag = pos->add_subcommand("tag", "Tag a CoNLL-U file");
  pos_tag->add_option("--model", pa.model, "Model file")->required()->check(CLI::ExistingFile);
  pos_tag->add_option("input", pa.input, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  pos_tag->add_option("--out", pa.out, "Output file (default: stdout)");
  auto* pos_eval = pos->add_subcommand("eval", "Score a tagger on gold data");
  pos_eval->add_option("--model", pa.model, "Model file")->required()->check(CLI::ExistingFile);
  pos_eval->add_option("input", pa.input, "Gold CoNLL-U file")->required()->check(CLI::ExistingFile);
  pos_eval->add_option("--format", pa.format, "Report format")->check(CLI::IsMember({"table", "tsv"}));
  pos_eval->add_option("--out", pa.out, "Output file (default: stdout)");
  pos_eval->add_flag("--exclude-punct", pa.exclude_punct, "Skip gold PUNCT tokens");

  DepArgs dpa;
  auto* dep = app.add_subcommand("dep", "Graph-based dependency parser");
  dep->require_subcommand(1);
  auto* dep_train = dep->add_subcommand("train", "Train a parser");
  add_train_common(dep_train, dpa.train, dpa.model, dpa.epochs, dpa.seed, dpa.mode);
  auto* dep_parse = dep->add_subcommand("parse", "Parse a CoNLL-U file");
  dep_parse->add_option("--model", dpa.model, "Model file")->required()->check(CLI::ExistingFile);
  dep_parse->add_option("input", dpa.input, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  dep_parse->add_option("--out", dpa.out, "Output file (default: stdout)");
  auto* dep_eval = dep->add_subcommand("eval", "UAS/LAS against gold trees");
  dep_eval->add_option("gold", dpa.gold, "Gold CoNLL-U file")->required()->check(CLI::ExistingFile);
  auto* model_opt = dep_eval->add_option("--model", dpa.model, "Parse the gold file with this model")
                        ->check(CLI::ExistingFile);
  dep_eval->add_option("--pred", dpa.pred, "Score an already parsed file")
      ->check(CLI::ExistingFile)
      ->excludes(model_opt);
  dep_eval->add_option("--out", dpa.out, "Output file (default: stdout)");
  dep_eval->add_flag("--exclude-punct", dpa.exclude_punct, "Skip gold PUNCT tokens");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Run a built-in experiment matrix");
  experiment->add_option("task", ea.task, "pos or dep")->required()->check(CLI::IsMember({"pos", "dep"}));
  experiment->add_option("--corpus", ea.corpora, "ID=PATH (repeatable)");
  experiment->add_option("--seeds", ea.seeds, "Comma-separated seeds (default 1,2,3,4,5)");
  experiment->add_option("--out", ea.out, "Write the results TSV here");
  experiment->add_option("--config", ea.config, "File of 'key = value' lines")->check(CLI::ExistingFile);
  experiment->add_option("--format", ea.format, "Standard output format")->check(CLI::IsMember({"table", "tsv"}));
  experiment->add_option("--only", ea.only, "Run only these experiment ids")->delimiter(',');
  experiment->add_option("--epochs", ea.epochs, "Override training epochs")->check(CLI::PositiveNumber);
  experiment->add_option("--threads", ea.threads, "Parallel seeds (0 = automatic)");
  experiment->add_flag("--raw-labels", ea.raw_labels, "Keep deprel subtypes in transfer settings");

  std::string fixtures_dir;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "Write the bundled fixture corpus");
  fixtures_cmd->add_option("--out", fixtures_dir, "Target directory")->required();

  // --version works without a subcommand.
  if (std::find(args.begin(), args.end(), "--version") != args.end()) {
    fmt::print(out, "tbw {} (model format v{})\n", TBW_VERSION, kModelFormatVersion);
    return kExitOk;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    if (e.get_exit_code() != 0) {
      err << app.help();
      return kExitFailure;
    }
    return kExitOk;
  }

  try {
    if (validate->parsed()) return run_validate(va, out, err);
    if (stats->parsed()) return run_stats(sa, out, err);
    if (split_cmd->parsed()) return run_split(spa, out, err);
    if (delex->parsed()) return run_delex(da, out);
    if (pos_train->parsed()) return run_pos_train(pa, err);
    if (pos_tag->parsed()) return run_pos_tag(pa, out);
    if (pos_eval->parsed()) return run_pos_eval(pa, out);
    if (dep_train->parsed()) return run_dep_train(dpa, err);
    if (dep_parse->parsed()) return run_dep_parse(dpa, out);
    if (dep_eval->parsed()) return run_dep_eval(dpa, out);
    if (experiment->parsed()) return run_experiment_cmd(ea, out, err);
    if (fixtures_cmd->parsed()) {
      for (const auto& path : fixtures::export_fixtures(fixtures_dir)) out << path << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    fmt::print(err, "tbw: {}\n", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    fmt::print(err, "tbw: {}\n", e.what());
    return kExitFailure;
  }
  err << app.help();
  return kExitFailure;
}

}  // namespace tbw::cli
