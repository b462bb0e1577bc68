#include "tbw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include <fmt/format.h>

#include "tbw/error.hpp"

namespace tbw {

namespace {

ExperimentSpec base_spec(std::string id, Task task, std::string setting, std::string train,
                         std::vector<std::string> targets) {
  ExperimentSpec spec;
  spec.id = std::move(id);
  spec.task = task;
  spec.setting = std::move(setting);
  spec.train_source = std::move(train);
  spec.eval_targets = std::move(targets);
  spec.split_ratios = {
      {std::string(kKakataibo), "60/20/20"},
      {std::string(kShipibo), "80/10/10"},
      // The Kazakh treebank is only ever a training source.
      {std::string(kKazakh), "100/0/0"},
  };
  return spec;
}

MetricSummary summarize(std::vector<double> values) {
  MetricSummary m;
  m.per_seed = std::move(values);
  const auto n = static_cast<double>(m.per_seed.size());
  for (const double v : m.per_seed) m.mean += v;
  m.mean /= n;
  if (m.per_seed.size() > 1) {
    double ss = 0.0;
    for (const double v : m.per_seed) ss += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(ss / (n - 1.0));
  }
  return m;
}

using SeedScores = std::vector<std::pair<MetricKey, double>>;

SeedScores evaluate_seed(const ExperimentSpec& spec, const SeedArtifacts& art) {
  SeedScores scores;
  for (const auto& target : spec.eval_targets) {
    const auto& test = art.splits.at(target).test;
    if (spec.task == Task::Pos) {
      const auto report = evaluate_pos(*art.tagger, test);
      scores.push_back({{target, "accuracy"}, report.accuracy});
      scores.push_back({{target, "f1"}, report.macro.f1});
    } else {
      const auto input = spec.target_mode == LexMode::Delex ? delexicalize(test) : test;
      const auto report = evaluate_dep(parse_treebank(*art.parser, input), test);
      scores.push_back({{target, "UAS"}, report.uas});
      scores.push_back({{target, "LAS"}, report.las});
    }
  }
  return scores;
}

}  // namespace

std::string_view task_name(Task task) { return task == Task::Pos ? "pos" : "dep"; }

Task task_from_name(std::string_view name) {
  if (name == "pos") return Task::Pos;
  if (name == "dep") return Task::Dep;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown task '{}'", name));
}

void ExperimentSpec::validate() const {
  if (finetune_source && task != Task::Pos) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("{}: fine-tuning is only defined for POS tagging", id));
  }
  if (task == Task::Pos && (source_mode == LexMode::Delex || target_mode == LexMode::Delex)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("{}: delexicalized modes apply to parsing only", id));
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, fmt::format("{}: no seeds", id));
  if (eval_targets.empty()) throw Error(ErrorCode::InvalidArgument, fmt::format("{}: no evaluation targets", id));
  for (const auto& corpus : corpora()) SplitSpec::parse(ratios_for(corpus), 0);
}

std::vector<std::string> ExperimentSpec::corpora() const {
  std::vector<std::string> out{train_source};
  if (finetune_source) out.push_back(*finetune_source);
  for (const auto& t : eval_targets) out.push_back(t);
  std::vector<std::string> unique;
  for (const auto& c : out) {
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
  }
  return unique;
}

std::string ExperimentSpec::ratios_for(const std::string& corpus) const {
  const auto it = split_ratios.find(corpus);
  return it == split_ratios.end() ? std::string("80/10/10") : it->second;
}

std::vector<ExperimentSpec> builtin_matrix(Task task) {
  const std::string cbr(kKakataibo), shp(kShipibo), ktb(kKazakh);
  std::vector<ExperimentSpec> specs;
  if (task == Task::Pos) {
    specs.push_back(base_spec("pos-1", Task::Pos, "mono", cbr, {cbr, shp}));
    specs.push_back(base_spec("pos-2", Task::Pos, "zero-shot", shp, {cbr, shp}));
    auto finetune = base_spec("pos-3", Task::Pos, "fine-tune", shp, {cbr, shp});
    finetune.finetune_source = cbr;
    specs.push_back(finetune);
    return specs;
  }
  const auto transfer = [&](std::string id, std::string setting, const std::string& source, LexMode target_mode,
                            std::vector<std::string> targets) {
    auto spec = base_spec(std::move(id), Task::Dep, std::move(setting), source, std::move(targets));
    spec.source_mode = LexMode::Delex;
    spec.target_mode = target_mode;
    spec.harmonization = LabelHarmonization::StripSubtypes;
    return spec;
  };
  specs.push_back(transfer("dep-1", "delex to lex", ktb, LexMode::Lex, {cbr, shp}));
  specs.push_back(transfer("dep-2", "delex to lex", shp, LexMode::Lex, {cbr}));
  specs.push_back(transfer("dep-3", "delex to delex", ktb, LexMode::Delex, {cbr, shp}));
  specs.push_back(transfer("dep-4", "delex to delex", shp, LexMode::Delex, {cbr}));
  auto zero_shot = base_spec("dep-5", Task::Dep, "mono", shp, {cbr, shp});
  zero_shot.harmonization = LabelHarmonization::StripSubtypes;
  specs.push_back(zero_shot);
  specs.push_back(base_spec("dep-6", Task::Dep, "mono", cbr, {cbr}));
  auto full = base_spec("dep-7", Task::Dep, "mono full", cbr, {cbr});
  full.split_ratios[cbr] = "80/10/10";
  specs.push_back(full);
  return specs;
}

const MetricSummary* ExperimentResult::find(const std::string& target, const std::string& metric) const {
  const auto it = metrics.find({target, metric});
  return it == metrics.end() ? nullptr : &it->second;
}

SeedArtifacts train_seed(const ExperimentSpec& spec, const CorpusSet& corpora, std::uint64_t seed) {
  spec.validate();
  SeedArtifacts art;
  for (const auto& name : spec.corpora()) {
    const auto it = corpora.find(name);
    if (it == corpora.end()) throw Error(ErrorCode::MissingCorpus, fmt::format("{}: corpus '{}' is not loaded", spec.id, name));
    auto tb = harmonize_labels(it->second, spec.harmonization);
    tb.source_name = name;
    art.splits.emplace(name, split(tb, SplitSpec::parse(spec.ratios_for(name), seed)));
  }
  const auto& train = art.splits.at(spec.train_source).train;
  if (spec.task == Task::Pos) {
    TaggerTrainOptions opts;
    opts.epochs = spec.epochs;
    opts.seed = seed;
    art.tagger = train_tagger(train, opts);
    if (spec.finetune_source) {
      art.source_tagger = art.tagger;
      opts.warm_start = &*art.source_tagger;
      opts.epochs = spec.finetune_epochs.value_or(spec.epochs);
      art.tagger = train_tagger(art.splits.at(*spec.finetune_source).train, opts);
    }
  } else {
    ParserTrainOptions opts;
    opts.epochs = spec.epochs;
    opts.seed = seed;
    opts.mode = spec.source_mode;
    art.parser = train_parser(train, opts);
  }
  return art;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const CorpusSet& corpora, const RunOptions& options) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;
  for (const auto& name : spec.corpora()) {
    if (corpora.count(name) > 0) continue;
    if (options.optional_corpora.count(name) > 0) {
      result.skipped = true;
      result.skip_reason = fmt::format("corpus '{}' not provided", name);
      return result;
    }
    throw Error(ErrorCode::MissingCorpus, fmt::format("{}: required corpus '{}' is not loaded", spec.id, name));
  }

  std::vector<SeedScores> per_seed(spec.seeds.size());
  const auto run_one = [&](std::size_t i) { per_seed[i] = evaluate_seed(spec, train_seed(spec, corpora, spec.seeds[i])); };
  unsigned workers = options.threads;
  if (workers == 0) workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                               static_cast<unsigned>(spec.seeds.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) run_one(i);
  } else {
    for (std::size_t start = 0; start < spec.seeds.size(); start += workers) {
      std::vector<std::future<void>> jobs;
      for (std::size_t i = start; i < std::min(spec.seeds.size(), start + workers); ++i) {
        jobs.push_back(std::async(std::launch::async, run_one, i));
      }
      for (auto& j : jobs) j.get();
    }
  }

  std::map<MetricKey, std::vector<double>> collected;
  for (const auto& scores : per_seed) {
    for (const auto& [key, value] : scores) {
      if (collected.count(key) == 0) result.order.push_back(key);
      collected[key].push_back(value);
    }
  }
  for (auto& [key, values] : collected) result.metrics[key] = summarize(std::move(values));
  return result;
}

std::vector<std::string> result_columns(const std::vector<ExperimentResult>& results) {
  std::vector<std::string> columns;
  for (const auto& r : results) {
    for (const auto& key : r.order) {
      const auto name = r.spec.task == Task::Pos ? key.target + " " + key.metric : key.metric + " " + key.target;
      if (std::find(columns.begin(), columns.end(), name) == columns.end()) columns.push_back(name);
    }
  }
  return columns;
}

std::string results_tsv(const std::vector<ExperimentResult>& results) {
  std::string out = "experiment\ttarget\tmetric\tmean\tsd\tseeds\n";
  for (const auto& r : results) {
    if (r.skipped) continue;
    std::vector<std::string> seeds;
    for (const auto s : r.spec.seeds) seeds.push_back(std::to_string(s));
    for (const auto& key : r.order) {
      const auto& m = r.metrics.at(key);
      out += fmt::format("{}\t{}\t{}\t{:.4f}\t{:.4f}\t{}\n", r.spec.id, key.target, key.metric, 100.0 * m.mean,
                         100.0 * m.sd, fmt::join(seeds, ","));
    }
  }
  return out;
}

std::string render_results_table(const std::vector<ExperimentResult>& results) {
  if (results.empty()) return {};
  const auto columns = result_columns(results);
  const bool pos = results.front().spec.task == Task::Pos;
  std::vector<std::string> header = {"#", pos ? "train" : "model", pos ? "fine-tune" : "train"};
  header.insert(header.end(), columns.begin(), columns.end());

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    std::vector<std::string> row;
    row.push_back(r.spec.id);
    if (pos) {
      row.push_back(r.spec.train_source);
      row.push_back(r.spec.finetune_source.value_or(""));
    } else {
      row.push_back(r.spec.setting);
      row.push_back(r.spec.train_source);
    }
    for (const auto& col : columns) {
      std::string cell;
      for (const auto& key : r.order) {
        const auto name = r.spec.task == Task::Pos ? key.target + " " + key.metric : key.metric + " " + key.target;
        if (name != col) continue;
        const auto& m = r.metrics.at(key);
        cell = m.per_seed.size() == 1 ? fmt::format("{:.1f}", 100.0 * m.mean)
                                      : fmt::format("{:.1f}±{:.1f}", 100.0 * m.mean, 100.0 * m.sd);
      }
      row.push_back(cell);
    }
    if (r.skipped) row.push_back("(skipped: " + r.skip_reason + ")");
    rows.push_back(std::move(row));
  }

  // Display width in code points ("±" is two bytes).
  const auto width = [](const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
  };
  std::vector<std::size_t> widths(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i) widths[i] = width(header[i]);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size() && i < row.size(); ++i) widths[i] = std::max(widths[i], width(row[i]));
  }
  const auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += "  ";
      line += row[i];
      if (i + 1 < row.size() && i < widths.size()) line += std::string(widths[i] - width(row[i]), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + "\n";
  };
  std::string out = emit(header);
  for (const auto& row : rows) out += emit(row);
  return out;
}

}  // namespace tbw
