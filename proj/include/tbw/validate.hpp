#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tbw/conllu.hpp"

namespace tbw {

enum class Severity { Error, Warning };

std::string_view severity_name(Severity s);

// Diagnostic codes. The set is closed; tests and the CLI rely on the exact
// spelling.
namespace diag {
inline constexpr std::string_view kHeadRange = "head-range";
inline constexpr std::string_view kNoRoot = "no-root";
inline constexpr std::string_view kMultipleRoots = "multiple-roots";
inline constexpr std::string_view kRootDeprel = "root-deprel";
inline constexpr std::string_view kMisplacedRoot = "misplaced-root";
inline constexpr std::string_view kCycle = "cycle";
inline constexpr std::string_view kUnknownUpos = "unknown-upos";
inline constexpr std::string_view kUnknownDeprel = "unknown-deprel";
inline constexpr std::string_view kEncliticDirection = "enclitic-direction";
inline constexpr std::string_view kAuxverbDirection = "auxverb-direction";
inline constexpr std::string_view kBoundSubjectPos = "bound-subject-pos";
}  // namespace diag

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  int sentence_index = 0;  // 1-based position in the treebank
  std::optional<int> token_id;

  // severity<TAB>code<TAB>sent<TAB>token<TAB>message; token is '_' when absent.
  std::string to_line() const;
};

struct SchemaProfile {
  std::string name;
  std::set<std::string> allowed_upos;
  std::set<std::string> allowed_deprels;
  // When set, a label is accepted if its base relation is in allowed_deprels,
  // whatever its subtype. Used by the generic UD profile.
  bool any_subtype = false;
  bool strict = false;

  static SchemaProfile kakataibo();
  static SchemaProfile shipibo();
  static SchemaProfile generic();
  // Throws InvalidArgument for an unknown name.
  static SchemaProfile by_name(std::string_view name);

  bool allows_upos(const PosTag& tag) const;
  bool allows_deprel(const DepRel& rel) const;
};

// Single-root tree discipline: every head in range, exactly one token on
// the artificial root labelled `root`, no cycles. Empty result means the
// heads form one arborescence rooted at node 0.
std::vector<Diagnostic> validate_tree(const Sentence& s, int sentence_index = 1);

std::vector<Diagnostic> validate_schema(const Sentence& s, const SchemaProfile& profile,
                                        int sentence_index = 1);

// Kakataibo direction and enclitic-subject lints. Always warnings.
std::vector<Diagnostic> lint_kakataibo(const Sentence& s, int sentence_index = 1);

struct ValidationOptions {
  SchemaProfile profile = SchemaProfile::generic();
  bool lints = true;  // lint_kakataibo runs only for the kakataibo profile
};

std::vector<Diagnostic> validate_treebank(const Treebank& tb, const ValidationOptions& options);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace tbw
