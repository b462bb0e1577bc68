#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tbw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;

// Directory searched for <id>.conllu when an experiment omits --corpus id=PATH.
inline constexpr const char* kCorpusDirEnv = "TBW_CORPUS_DIR";

// args excludes the program name. Data goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// `key = value` lines; '#' starts a comment. Keys may repeat.
std::multimap<std::string, std::string> parse_config(const std::string& text);

}  // namespace tbw::cli
