#include "tbw/fixtures.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "tbw/error.hpp"

namespace tbw::fixtures {

namespace {

// Heads and labels below are illustrative only. They are not the treebank's
// gold annotation and must never be used to measure parser accuracy.
constexpr const char* kEncliticExample =
    "# sent_id = enclitics\n"
    "# text = Bëxuñurá 'ikëbi kaisa xanun ain bënë 'akësa okin masoama 'ikën\n"
    "# annotation = synthetic (non-gold); relations illustrate aux:sgen, aux:ev and aux\n"
    "1\tBëxuñurá\t_\tADJ\t_\t_\t2\tadvmod\t_\t_\n"
    "2\t'ikëbi\t_\tVERB\t_\t_\t9\tadvcl\t_\t_\n"
    "3\tkaisa\t_\tPART\t_\t_\t9\taux:sgen\t_\t_\n"
    "4\txanun\t_\tNOUN\t_\t_\t9\tnsubj:free\t_\t_\n"
    "5\tain\t_\tPRON\t_\t_\t6\tnmod\t_\t_\n"
    "6\tbënë\t_\tNOUN\t_\t_\t9\tobj\t_\t_\n"
    "7\t'akësa\t_\tPART\t_\t_\t9\taux:ev\t_\t_\n"
    "8\tokin\t_\tADV\t_\t_\t9\tadvmod\t_\t_\n"
    "9\tmasoama\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "10\t'ikën\t_\tAUX\t_\t_\t9\taux\t_\t_\n"
    "\n";

constexpr const char* kSubjectExample =
    "# sent_id = subjects\n"
    "# text = 'Ën kana ënë an taë tëbiskati buan\n"
    "# annotation = synthetic (non-gold); relations illustrate nsubj:free and nsubj:bound\n"
    "1\t'Ën\t_\tPRON\t_\t_\t7\tnsubj:free\t_\t_\n"
    "2\tkana\t_\tPART\t_\t_\t7\tnsubj:bound\t_\t_\n"
    "3\tënë\t_\tDET\t_\t_\t6\tdet\t_\t_\n"
    "4\tan\t_\tNOUN\t_\t_\t6\tcompound\t_\t_\n"
    "5\ttaë\t_\tNOUN\t_\t_\t6\tcompound\t_\t_\n"
    "6\ttëbiskati\t_\tNOUN\t_\t_\t7\tobj\t_\t_\n"
    "7\tbuan\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n";

constexpr const char* kSynthetic =
    "# sent_id = syn-1\n"
    "# annotation = synthetic\n"
    "1\tkana\t_\tPART\t_\t_\t2\taux:sgen\t_\t_\n"
    "2\tkwan\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "3\t.\t_\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
    "\n"
    "# sent_id = syn-2\n"
    "# annotation = synthetic\n"
    "1\tuni\t_\tNOUN\t_\t_\t5\tnsubj:free\t_\t_\n"
    "2\tkana\t_\tPART\t_\t_\t5\taux:sgen\t_\t_\n"
    "3\tka\t_\tPART\t_\t_\t5\tnsubj:bound\t_\t_\n"
    "4\tatsa\t_\tNOUN\t_\t_\t5\tobj\t_\t_\n"
    "5\tpikë\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "6\t.\t_\tPUNCT\t_\t_\t5\tpunct\t_\t_\n"
    "\n"
    "# sent_id = syn-3\n"
    "# annotation = synthetic\n"
    "1\tbari\t_\tNOUN\t_\t_\t4\tobl\t_\t_\n"
    "2\tnu\t_\tADP\t_\t_\t1\tcase\t_\t_\n"
    "3\tkana\t_\tPART\t_\t_\t4\taux:sgen\t_\t_\n"
    "4\t'ië\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "5\t?\t_\tPUNCT\t_\t_\t4\tpunct\t_\t_\n"
    "\n"
    "# sent_id = syn-4\n"
    "# annotation = synthetic\n"
    "1\tëa\t_\tPRON\t_\t_\t4\tnsubj:free\t_\t_\n"
    "2\tkana\t_\tPART\t_\t_\t4\taux:sgen\t_\t_\n"
    "3\tka\t_\tPART\t_\t_\t4\tnsubj:bound\t_\t_\n"
    "4\tken\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "5\t'ikën\t_\tAUX\t_\t_\t4\taux\t_\t_\n"
    "6\t.\t_\tPUNCT\t_\t_\t4\tpunct\t_\t_\n"
    "\n"
    "# sent_id = syn-5\n"
    "# annotation = synthetic\n"
    "1\tbëchi\t_\tNOUN\t_\t_\t6\tobj\t_\t_\n"
    "2\tkana\t_\tPART\t_\t_\t6\taux:sgen\t_\t_\n"
    "3\tka\t_\tPART\t_\t_\t6\tnsubj:bound\t_\t_\n"
    "4\trabë\t_\tNUM\t_\t_\t5\tnummod\t_\t_\n"
    "5\t'unan\t_\tNOUN\t_\t_\t6\tobl\t_\t_\n"
    "6\tkwan\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "7\t.\t_\tPUNCT\t_\t_\t6\tpunct\t_\t_\n"
    "\n"
    "# sent_id = syn-6\n"
    "# annotation = synthetic\n"
    "1\tënë\t_\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tuni\t_\tNOUN\t_\t_\t6\tnsubj:free\t_\t_\n"
    "3\tkana\t_\tPART\t_\t_\t6\taux:sgen\t_\t_\n"
    "4\tisa\t_\tPART\t_\t_\t6\taux:ev\t_\t_\n"
    "5\tbëtsi\t_\tADV\t_\t_\t6\tadvmod\t_\t_\n"
    "6\tpikë\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "7\t.\t_\tPUNCT\t_\t_\t6\tpunct\t_\t_\n"
    "\n";

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(ErrorCode::IOError, fmt::format("write failed for '{}'", path.string()));
}

}  // namespace

std::string enclitic_example_conllu() { return kEncliticExample; }
std::string subject_example_conllu() { return kSubjectExample; }
std::string synthetic_conllu() { return kSynthetic; }

Treebank bundled() {
  return parse_conllu_text(enclitic_example_conllu() + subject_example_conllu() + synthetic_conllu(), "fixtures");
}

std::vector<std::string> export_fixtures(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IOError, fmt::format("cannot create '{}': {}", dir, ec.message()));
  const std::vector<std::pair<std::string, std::string>> files = {
      {"enclitics.conllu", enclitic_example_conllu()},
      {"subjects.conllu", subject_example_conllu()},
      {"synthetic.conllu", synthetic_conllu()},
      {"fixtures.conllu", enclitic_example_conllu() + subject_example_conllu() + synthetic_conllu()},
  };
  std::vector<std::string> written;
  for (const auto& [name, content] : files) {
    const auto path = fs::path(dir) / name;
    write_text(path, content);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace tbw::fixtures
