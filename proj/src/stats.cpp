#include "tbw/stats.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "tbw/error.hpp"

namespace tbw {

namespace {

template <typename LabelOf>
std::vector<DistributionRow> count_labels(const Treebank& tb, LabelOf label_of) {
  const auto total = tb.token_count();
  if (total == 0) throw Error(ErrorCode::EmptyCorpus, fmt::format("'{}' has no tokens", tb.source_name));
  std::map<std::string, std::size_t> counts;
  for (const auto& s : tb.sentences) {
    for (const auto& t : s.tokens) ++counts[label_of(t)];
  }
  std::vector<DistributionRow> rows;
  rows.reserve(counts.size());
  for (const auto& [label, count] : counts) {
    rows.push_back({label, count, static_cast<double>(count) / static_cast<double>(total)});
  }
  return rows;
}

std::string label_of(const Token& t, DistributionKey key) {
  return key == DistributionKey::Upos ? t.upos.str() : t.deprel.str();
}

std::size_t label_width(const std::vector<std::string>& labels, std::size_t minimum) {
  std::size_t w = minimum;
  for (const auto& l : labels) w = std::max(w, l.size());
  return w;
}

}  // namespace

std::vector<DistributionRow> upos_distribution(const Treebank& tb) {
  return count_labels(tb, [](const Token& t) { return t.upos.str(); });
}

std::vector<DistributionRow> deprel_distribution(const Treebank& tb) {
  return count_labels(tb, [](const Token& t) { return t.deprel.str(); });
}

std::vector<DistributionRow> distribution(const Treebank& tb, DistributionKey key) {
  return key == DistributionKey::Upos ? upos_distribution(tb) : deprel_distribution(tb);
}

LengthStats length_stats_from_histogram(const std::map<std::size_t, std::size_t>& histogram) {
  LengthStats st;
  st.histogram = histogram;
  double sum = 0.0;
  for (const auto& [len, count] : histogram) {
    if (count == 0) continue;
    st.sentences += count;
    sum += static_cast<double>(len) * static_cast<double>(count);
    st.max = std::max(st.max, len);
  }
  if (st.sentences == 0) throw Error(ErrorCode::EmptyCorpus, "no sentences");
  st.mean = sum / static_cast<double>(st.sentences);
  if (st.sentences > 1) {
    double ss = 0.0;
    for (const auto& [len, count] : histogram) {
      const double d = static_cast<double>(len) - st.mean;
      ss += d * d * static_cast<double>(count);
    }
    st.sd = std::sqrt(ss / static_cast<double>(st.sentences - 1));
  }
  return st;
}

LengthStats length_stats(const Treebank& tb, bool include_punct) {
  if (tb.sentences.empty()) throw Error(ErrorCode::EmptyCorpus, fmt::format("'{}' has no sentences", tb.source_name));
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& s : tb.sentences) ++histogram[sentence_length(s, include_punct)];
  return length_stats_from_histogram(histogram);
}

SplitTable split_distribution(const std::vector<std::pair<std::string, Treebank>>& parts, DistributionKey key) {
  SplitTable table;
  std::map<std::string, std::vector<std::size_t>> counts;
  table.totals.assign(parts.size(), 0);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    table.part_names.push_back(parts[p].first);
    for (const auto& s : parts[p].second.sentences) {
      for (const auto& t : s.tokens) {
        auto& row = counts[label_of(t, key)];
        row.resize(parts.size(), 0);
        ++row[p];
        ++table.totals[p];
      }
    }
  }
  for (auto& [label, row] : counts) {
    row.resize(parts.size(), 0);
    table.labels.push_back(label);
    table.counts.push_back(row);
  }
  return table;
}

std::string distribution_tsv(const std::vector<DistributionRow>& rows) {
  std::string out = "label\tn\tfreq\n";
  for (const auto& r : rows) out += fmt::format("{}\t{}\t{:.4f}\n", r.label, r.count, r.freq);
  return out;
}

std::string distribution_table(const std::vector<DistributionRow>& rows, const std::string& title) {
  std::vector<std::string> labels;
  std::size_t total = 0;
  for (const auto& r : rows) {
    labels.push_back(r.label);
    total += r.count;
  }
  const auto w = label_width(labels, std::max<std::size_t>(title.size(), 5));
  std::string out = fmt::format("{:>3} {:<{}} {:>7} {:>6}\n", "", title, w, "n", "freq");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += fmt::format("{:>3} {:<{}} {:>7} {:>6.2f}\n", i + 1, rows[i].label, w, rows[i].count, rows[i].freq);
  }
  out += fmt::format("{:>3} {:<{}} {:>7} {:>6}\n", "", "total", w, total, 1);
  return out;
}

std::string length_tsv(const LengthStats& st) {
  std::string out = fmt::format("# sentences={} mean={:.4f} sd={:.4f} max={}\n", st.sentences, st.mean, st.sd, st.max);
  out += "label\tn\tfreq\n";
  for (const auto& [len, count] : st.histogram) {
    out += fmt::format("{}\t{}\t{:.4f}\n", len, count, static_cast<double>(count) / static_cast<double>(st.sentences));
  }
  return out;
}

std::string length_table(const LengthStats& st) {
  std::string out = fmt::format("sentences {}\nmean      {:.2f} (±{:.2f})\nmax       {}\n\nlength  n\n", st.sentences,
                                st.mean, st.sd, st.max);
  for (const auto& [len, count] : st.histogram) out += fmt::format("{:>6}  {}\n", len, count);
  return out;
}

std::string split_tsv(const SplitTable& table) {
  std::string out = "label";
  for (const auto& name : table.part_names) out += "\t" + name;
  out += '\n';
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    out += table.labels[i];
    for (const auto c : table.counts[i]) out += fmt::format("\t{}", c);
    out += '\n';
  }
  out += "total";
  for (const auto c : table.totals) out += fmt::format("\t{}", c);
  out += '\n';
  return out;
}

std::string split_table_text(const SplitTable& table, const std::string& title) {
  const auto w = label_width(table.labels, std::max<std::size_t>(title.size(), 5));
  std::size_t cw = 5;
  for (const auto& name : table.part_names) cw = std::max(cw, name.size());
  std::string out = fmt::format("{:>3} {:<{}}", "", title, w);
  for (const auto& name : table.part_names) out += fmt::format(" {:>{}}", name, cw);
  out += '\n';
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    out += fmt::format("{:>3} {:<{}}", i + 1, table.labels[i], w);
    for (const auto c : table.counts[i]) out += fmt::format(" {:>{}}", c, cw);
    out += '\n';
  }
  out += fmt::format("{:>3} {:<{}}", "", "total", w);
  for (const auto c : table.totals) out += fmt::format(" {:>{}}", c, cw);
  out += '\n';
  return out;
}

}  // namespace tbw
