#include "tbw/validate.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "tbw/error.hpp"

namespace tbw {

namespace {

Diagnostic make(Severity severity, std::string_view code, std::string message, int sentence,
                std::optional<int> token = std::nullopt) {
  return Diagnostic{severity, std::string(code), std::move(message), sentence, token};
}

const std::set<std::string>& universal_relations() {
  static const std::set<std::string> rels = {
      "acl",   "advcl",    "advmod",     "amod",   "appos",    "aux",       "case",  "cc",
      "ccomp", "clf",      "compound",   "conj",   "cop",      "csubj",     "dep",   "det",
      "discourse", "dislocated", "expl", "fixed",  "flat",     "goeswith",  "iobj",  "list",
      "mark",  "nmod",     "nsubj",      "nummod", "obj",      "obl",       "orphan", "parataxis",
      "punct", "reparandum", "root",     "vocative", "xcomp",
  };
  return rels;
}

}  // namespace

std::string_view severity_name(Severity s) { return s == Severity::Error ? "ERROR" : "WARNING"; }

std::string Diagnostic::to_line() const {
  return fmt::format("{}\t{}\t{}\t{}\t{}", severity_name(severity), code, sentence_index,
                     token_id ? std::to_string(*token_id) : std::string("_"), message);
}

SchemaProfile SchemaProfile::kakataibo() {
  SchemaProfile p;
  p.name = "kakataibo";
  p.allowed_upos = {"ADJ", "ADP", "ADV",  "AUX",  "CCONJ", "DET",   "INTJ", "NOUN",
                    "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "VERB"};
  p.allowed_deprels = {
      "advcl",  "advmod",   "amod",     "appos",     "aux",        "aux:dub",     "aux:ev",
      "aux:int", "aux:sgen", "case",    "cc",        "ccomp",      "compound",    "conj",
      "cop",    "csubj",    "det",      "discourse", "dislocated", "flat",        "iobj",
      "list",   "nmod",     "nsubj:bound", "nsubj:free", "nummod", "obj",        "obl",
      "parataxis", "punct", "root",     "vocative",
  };
  return p;
}

SchemaProfile SchemaProfile::shipibo() {
  SchemaProfile p;
  p.name = "shipibo";
  p.allowed_upos = {"ADJ",  "ADP",  "ADV",   "AUX",  "CCONJ", "DET",  "INTJ",
                    "NOUN", "NUM",  "PART",  "PINT", "PRON",  "PROPN", "PUNCT",
                    "SCONJ", "SUFN", "SUFV", "SYM",  "VERB",  "VERB_AUX", "X"};
  p.allowed_deprels = {
      "acl",  "advcl", "advmod", "amod",   "appos",  "aux",    "aux:val", "case",  "cc",   "ccomp",
      "compound", "conj", "cop", "det",    "discourse", "flat", "iobj",   "Lfcl",  "marker", "nmod",
      "nsubj", "nummod", "obj",  "obl",    "punct",  "root",   "vocative", "x",    "xcomp",
  };
  return p;
}

SchemaProfile SchemaProfile::generic() {
  SchemaProfile p;
  p.name = "generic";
  for (std::size_t i = 0; i < kUPosCount; ++i) p.allowed_upos.emplace(upos_name(static_cast<UPos>(i)));
  p.allowed_deprels = universal_relations();
  p.any_subtype = true;
  return p;
}

SchemaProfile SchemaProfile::by_name(std::string_view name) {
  if (name == "kakataibo") return kakataibo();
  if (name == "shipibo") return shipibo();
  if (name == "generic") return generic();
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown profile '{}'", name));
}

bool SchemaProfile::allows_upos(const PosTag& tag) const { return allowed_upos.count(tag.str()) > 0; }

bool SchemaProfile::allows_deprel(const DepRel& rel) const {
  if (any_subtype) return allowed_deprels.count(rel.base) > 0;
  return allowed_deprels.count(rel.str()) > 0;
}

std::vector<Diagnostic> validate_tree(const Sentence& s, int sentence_index) {
  std::vector<Diagnostic> out;
  const int n = static_cast<int>(s.size());
  const auto in_range = [n](int head) { return head >= 0 && head <= n; };

  std::vector<int> roots;
  for (const auto& t : s.tokens) {
    if (!in_range(t.head)) {
      out.push_back(make(Severity::Error, diag::kHeadRange,
                         fmt::format("head {} outside [0, {}]", t.head, n), sentence_index, t.id));
      continue;
    }
    if (t.head == 0) {
      roots.push_back(t.id);
      if (t.deprel.base != "root") {
        out.push_back(make(Severity::Error, diag::kRootDeprel,
                           fmt::format("token attached to root has deprel '{}'", t.deprel.str()),
                           sentence_index, t.id));
      }
    } else if (t.deprel.base == "root") {
      out.push_back(make(Severity::Error, diag::kMisplacedRoot,
                         fmt::format("deprel 'root' on token with head {}", t.head), sentence_index, t.id));
    }
  }
  if (roots.empty()) {
    out.push_back(make(Severity::Error, diag::kNoRoot, "no token is attached to the root", sentence_index));
  } else if (roots.size() > 1) {
    out.push_back(make(Severity::Error, diag::kMultipleRoots,
                       fmt::format("{} tokens attached to the root: {}", roots.size(), fmt::join(roots, ",")),
                       sentence_index, roots[1]));
  }

  // 0 = unvisited, 1 = on the current walk, 2 = finished
  std::vector<int> state(static_cast<std::size_t>(n) + 1, 0);
  for (int start = 1; start <= n; ++start) {
    if (state[start] != 0) continue;
    std::vector<int> path;
    int node = start;
    while (node >= 1 && node <= n && state[node] == 0) {
      state[node] = 1;
      path.push_back(node);
      const int head = s.tokens[static_cast<std::size_t>(node - 1)].head;
      node = in_range(head) ? head : -1;
    }
    if (node >= 1 && node <= n && state[node] == 1) {
      std::vector<int> cycle(std::find(path.begin(), path.end(), node), path.end());
      std::sort(cycle.begin(), cycle.end());
      out.push_back(make(Severity::Error, diag::kCycle, fmt::format("cycle through tokens {}", fmt::join(cycle, ",")),
                         sentence_index, cycle.front()));
    }
    for (const int p : path) state[p] = 2;
  }
  return out;
}

std::vector<Diagnostic> validate_schema(const Sentence& s, const SchemaProfile& profile, int sentence_index) {
  std::vector<Diagnostic> out;
  const auto severity = profile.strict ? Severity::Error : Severity::Warning;
  for (const auto& t : s.tokens) {
    if (!profile.allows_upos(t.upos)) {
      out.push_back(make(severity, diag::kUnknownUpos,
                         fmt::format("upos '{}' not in profile '{}'", t.upos.str(), profile.name), sentence_index,
                         t.id));
    }
    if (!profile.allows_deprel(t.deprel)) {
      out.push_back(make(severity, diag::kUnknownDeprel,
                         fmt::format("deprel '{}' not in profile '{}'", t.deprel.str(), profile.name),
                         sentence_index, t.id));
    }
  }
  return out;
}

std::vector<Diagnostic> lint_kakataibo(const Sentence& s, int sentence_index) {
  std::vector<Diagnostic> out;
  for (const auto& t : s.tokens) {
    if (t.deprel.base == "aux" && t.head > 0) {
      if (t.deprel.has_subtype() && t.id > t.head) {
        out.push_back(make(Severity::Warning, diag::kEncliticDirection,
                           fmt::format("'{}' follows its head {}; second-position enclitics precede the root",
                                       t.deprel.str(), t.head),
                           sentence_index, t.id));
      } else if (!t.deprel.has_subtype() && t.id < t.head) {
        out.push_back(make(Severity::Warning, diag::kAuxverbDirection,
                           fmt::format("auxiliary verb precedes its head {}; auxiliary verbs follow the root",
                                       t.head),
                           sentence_index, t.id));
      }
    }
    if (t.deprel.str() == "nsubj:bound" && t.upos.standard() != UPos::PART) {
      out.push_back(make(Severity::Warning, diag::kBoundSubjectPos,
                         fmt::format("nsubj:bound on upos '{}', expected PART", t.upos.str()), sentence_index,
                         t.id));
    }
  }
  return out;
}

std::vector<Diagnostic> validate_treebank(const Treebank& tb, const ValidationOptions& options) {
  std::vector<Diagnostic> out;
  const bool lint = options.lints && options.profile.name == "kakataibo";
  for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
    const auto& s = tb.sentences[i];
    const int index = static_cast<int>(i) + 1;
    auto tree = validate_tree(s, index);
    const bool tree_ok = tree.empty();
    out.insert(out.end(), tree.begin(), tree.end());
    auto schema = validate_schema(s, options.profile, index);
    out.insert(out.end(), schema.begin(), schema.end());
    if (lint && tree_ok) {
      auto lints = lint_kakataibo(s, index);
      out.insert(out.end(), lints.begin(), lints.end());
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace tbw
