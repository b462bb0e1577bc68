#include "tbw/conllu.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "tbw/error.hpp"

namespace tbw {

namespace {

constexpr std::array<std::string_view, kUPosCount> kUPosNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
};

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<int> to_int(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string from_placeholder(std::string_view column) {
  return column == "_" ? std::string() : std::string(column);
}

std::string_view to_placeholder(const std::string& value) {
  return value.empty() ? std::string_view("_") : std::string_view(value);
}

std::vector<Feature> parse_feats(std::string_view column) {
  std::vector<Feature> feats;
  if (column == "_" || column.empty()) return feats;
  for (const auto item : split_on(column, '|')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      feats.push_back({std::string(item), std::nullopt});
    } else {
      feats.push_back({std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))});
    }
  }
  return feats;
}

std::string format_feats(const std::vector<Feature>& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (i > 0) out += '|';
    out += feats[i].name;
    if (feats[i].value) {
      out += '=';
      out += *feats[i].value;
    }
  }
  return out;
}

bool is_range_id(std::string_view id, char sep) {
  const auto pos = id.find(sep);
  if (pos == std::string_view::npos) return false;
  return all_digits(id.substr(0, pos)) && all_digits(id.substr(pos + 1));
}

class Reader {
 public:
  explicit Reader(std::string source) { tb_.source_name = std::move(source); }

  void line(std::string_view text, std::size_t number) {
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (number == 1 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    if (text.empty()) {
      flush(number);
      return;
    }
    pending_ = true;
    if (text.front() == '#') {
      if (current_.tokens.empty() && current_.opaque.empty()) {
        current_.comments.emplace_back(text);
      } else {
        current_.opaque.push_back({current_.tokens.size(), std::string(text)});
      }
      return;
    }
    const auto cols = split_on(text, '\t');
    if (cols.size() != 10) {
      throw Error(ErrorCode::MalformedLine,
                  fmt::format("expected 10 tab-separated columns, found {}", cols.size()), number);
    }
    const auto id_text = cols[0];
    if (is_range_id(id_text, '-') || is_range_id(id_text, '.')) {
      current_.opaque.push_back({current_.tokens.size(), std::string(text)});
      return;
    }
    const auto id = to_int(id_text);
    const int expected = static_cast<int>(current_.tokens.size()) + 1;
    if (!id) throw Error(ErrorCode::BadId, fmt::format("non-numeric token id '{}'", id_text), number);
    if (*id != expected) {
      throw Error(ErrorCode::BadId, fmt::format("token id {} out of sequence, expected {}", *id, expected),
                  number);
    }
    const auto head = to_int(cols[6]);
    if (!head) {
      const bool negative = cols[6].size() > 1 && cols[6].front() == '-' && all_digits(cols[6].substr(1));
      throw Error(ErrorCode::BadHead,
                  fmt::format("{} head '{}'", negative ? "negative" : "non-integer", cols[6]), number);
    }
    if (*head == *id) throw Error(ErrorCode::BadHead, fmt::format("token {} is its own head", *id), number);

    Token tok;
    tok.id = *id;
    tok.form = std::string(cols[1]);
    tok.lemma = std::string(cols[2]);
    tok.upos = PosTag::parse(cols[3]);
    tok.xpos = from_placeholder(cols[4]);
    tok.feats = parse_feats(cols[5]);
    tok.head = *head;
    tok.deprel = DepRel::parse(cols[7]);
    tok.deps = from_placeholder(cols[8]);
    tok.misc = from_placeholder(cols[9]);
    current_.tokens.push_back(std::move(tok));
  }

  void flush(std::size_t number) {
    if (!pending_) return;
    if (current_.tokens.empty()) {
      throw Error(ErrorCode::MalformedLine, "sentence block has no token lines", number);
    }
    tb_.sentences.push_back(std::move(current_));
    current_ = Sentence{};
    pending_ = false;
  }

  Treebank finish(std::size_t number) {
    flush(number);
    return std::move(tb_);
  }

 private:
  Treebank tb_;
  Sentence current_;
  bool pending_ = false;
};

}  // namespace

std::string_view upos_name(UPos tag) { return kUPosNames[static_cast<std::size_t>(tag)]; }

std::optional<UPos> upos_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kUPosNames.size(); ++i) {
    if (kUPosNames[i] == name) return static_cast<UPos>(i);
  }
  return std::nullopt;
}

PosTag PosTag::parse(std::string_view text) {
  PosTag tag;
  if (const auto standard = upos_from_name(text)) {
    tag.value_ = *standard;
  } else {
    tag.value_ = std::string(text);
  }
  return tag;
}

std::optional<UPos> PosTag::standard() const {
  if (const auto* p = std::get_if<UPos>(&value_)) return *p;
  return std::nullopt;
}

std::string PosTag::str() const {
  if (const auto* p = std::get_if<UPos>(&value_)) return std::string(upos_name(*p));
  return std::get<std::string>(value_);
}

DepRel DepRel::parse(std::string_view label) {
  DepRel rel;
  const auto colon = label.find(':');
  if (colon == std::string_view::npos) {
    rel.base = std::string(label);
  } else {
    rel.base = std::string(label.substr(0, colon));
    rel.subtype = std::string(label.substr(colon + 1));
  }
  return rel;
}

std::string DepRel::str() const { return subtype ? base + ":" + *subtype : base; }

bool Sentence::has_unmodeled_annotations() const {
  return std::any_of(opaque.begin(), opaque.end(), [](const OpaqueLine& line) { return line.text.front() != '#'; });
}

std::optional<std::string> Sentence::sent_id() const {
  constexpr std::string_view key = "# sent_id";
  for (const auto& c : comments) {
    if (c.rfind(key, 0) != 0) continue;
    auto rest = std::string_view(c).substr(key.size());
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '=')) rest.remove_prefix(1);
    return std::string(rest);
  }
  return std::nullopt;
}

std::size_t Treebank::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::size_t Treebank::root_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) {
    n += static_cast<std::size_t>(std::count_if(s.tokens.begin(), s.tokens.end(),
                                                [](const Token& t) { return t.head == 0; }));
  }
  return n;
}

Treebank parse_conllu(std::istream& in, std::string source_name) {
  Reader reader(std::move(source_name));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) reader.line(line, ++number);
  return reader.finish(number + 1);
}

Treebank parse_conllu_text(std::string_view text, std::string source_name) {
  Reader reader(std::move(source_name));
  std::size_t number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    reader.line(text.substr(start, end - start), ++number);
    start = end + 1;
  }
  return reader.finish(number + 1);
}

Treebank read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, fmt::format("cannot open '{}'", path));
  return parse_conllu(in, path);
}

void write_conllu(std::ostream& out, const Treebank& tb) { out << serialize_conllu(tb); }

std::string serialize_conllu(const Treebank& tb) {
  std::string out;
  for (const auto& s : tb.sentences) {
    for (const auto& c : s.comments) {
      out += c;
      out += '\n';
    }
    auto opaque = s.opaque.begin();
    for (std::size_t i = 0; i <= s.tokens.size(); ++i) {
      while (opaque != s.opaque.end() && opaque->position == i) {
        out += opaque->text;
        out += '\n';
        ++opaque;
      }
      if (i == s.tokens.size()) break;
      const auto& t = s.tokens[i];
      out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", t.id, t.form, t.lemma, t.upos.str(),
                         to_placeholder(t.xpos), format_feats(t.feats), t.head, t.deprel.str(),
                         to_placeholder(t.deps), to_placeholder(t.misc));
    }
    out += '\n';
  }
  return out;
}

void write_conllu_file(const std::string& path, const Treebank& tb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, fmt::format("cannot write '{}'", path));
  write_conllu(out, tb);
  if (!out) throw Error(ErrorCode::IOError, fmt::format("write failed for '{}'", path));
}

std::size_t sentence_length(const Sentence& s, bool include_punct) {
  if (include_punct) return s.size();
  return static_cast<std::size_t>(std::count_if(s.tokens.begin(), s.tokens.end(), [](const Token& t) {
    return t.upos.standard() != UPos::PUNCT;
  }));
}

void require_modeled(const Treebank& tb) {
  for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
    if (tb.sentences[i].has_unmodeled_annotations()) {
      throw Error(ErrorCode::UnsupportedAnnotation,
                  fmt::format("sentence {} of '{}' has multiword-token or empty-node lines", i + 1,
                              tb.source_name));
    }
  }
}

}  // namespace tbw
