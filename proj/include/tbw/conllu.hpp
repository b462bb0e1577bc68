#pragma once

// CoNLL-U data model: tokens, sentences and treebanks, with a parser and a
// serializer that round-trip canonical files byte for byte.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tbw {

enum class UPos : std::uint8_t {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM,
  PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X,
};

inline constexpr std::size_t kUPosCount = 17;

std::string_view upos_name(UPos tag);
std::optional<UPos> upos_from_name(std::string_view name);

// A UPOS value. Treebanks such as Shipibo-Konibo use tags outside the
// universal inventory (PINT, SUFN, ...); those are kept as extensions.
class PosTag {
 public:
  PosTag() : value_(UPos::X) {}
  PosTag(UPos tag) : value_(tag) {}  // NOLINT(google-explicit-constructor)

  static PosTag parse(std::string_view text);

  bool is_standard() const { return std::holds_alternative<UPos>(value_); }
  std::optional<UPos> standard() const;
  std::string str() const;

  friend bool operator==(const PosTag&, const PosTag&) = default;
  friend auto operator<=>(const PosTag& a, const PosTag& b) { return a.str() <=> b.str(); }

 private:
  std::variant<UPos, std::string> value_;
};

// A dependency relation label split at the first colon: "aux:sgen" is
// base "aux" with subtype "sgen".
struct DepRel {
  std::string base;
  std::optional<std::string> subtype;

  static DepRel parse(std::string_view label);
  std::string str() const;
  bool has_subtype() const { return subtype.has_value(); }

  friend bool operator==(const DepRel&, const DepRel&) = default;
};

struct Feature {
  std::string name;
  std::optional<std::string> value;  // absent when the item had no '='

  friend bool operator==(const Feature&, const Feature&) = default;
};

struct Token {
  int id = 1;
  std::string form = "_";
  std::string lemma = "_";
  PosTag upos;
  std::string xpos;  // empty serializes as '_'
  std::vector<Feature> feats;
  int head = 0;
  DepRel deprel;
  std::string deps;
  std::string misc;

  friend bool operator==(const Token&, const Token&) = default;
};

// Lines kept verbatim but not modeled: multiword ranges ("3-4"), empty nodes
// ("3.1") and comments that follow the first token line. `position` is the
// number of tokens preceding the line.
struct OpaqueLine {
  std::size_t position = 0;
  std::string text;

  friend bool operator==(const OpaqueLine&, const OpaqueLine&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::string> comments;
  std::vector<OpaqueLine> opaque;

  std::size_t size() const { return tokens.size(); }
  const Token& token(int id) const { return tokens.at(static_cast<std::size_t>(id - 1)); }

  // True when the sentence carries multiword-token or empty-node lines.
  bool has_unmodeled_annotations() const;
  std::optional<std::string> sent_id() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Treebank {
  std::vector<Sentence> sentences;
  std::string source_name;

  std::size_t token_count() const;
  // Tokens attached to the artificial root. Not reconciled with the
  // sentence count; malformed inputs may differ.
  std::size_t root_count() const;

  // Equality ignores source_name.
  friend bool operator==(const Treebank& a, const Treebank& b) { return a.sentences == b.sentences; }
};

Treebank parse_conllu(std::istream& in, std::string source_name = "");
Treebank parse_conllu_text(std::string_view text, std::string source_name = "");
Treebank read_conllu_file(const std::string& path);

std::string serialize_conllu(const Treebank& tb);
void write_conllu(std::ostream& out, const Treebank& tb);
void write_conllu_file(const std::string& path, const Treebank& tb);

std::size_t sentence_length(const Sentence& s, bool include_punct = true);

// Throws UnsupportedAnnotation when a sentence of `tb` has multiword or
// empty-node lines; training and evaluation call this first.
void require_modeled(const Treebank& tb);

}  // namespace tbw
