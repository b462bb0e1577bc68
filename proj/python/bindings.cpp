#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tbw/conllu.hpp"
#include "tbw/error.hpp"
#include "tbw/experiments.hpp"
#include "tbw/fixtures.hpp"
#include "tbw/parser.hpp"
#include "tbw/prep.hpp"
#include "tbw/stats.hpp"
#include "tbw/tagger.hpp"
#include "tbw/validate.hpp"

namespace py = pybind11;
using namespace tbw;

namespace {

// Every function takes and returns CoNLL-U text; the Python side never
// sees the C++ treebank types.
Treebank load(const std::string& text, const std::string& name = "input") { return parse_conllu_text(text, name); }

py::list rows_to_list(const std::vector<DistributionRow>& rows) {
  py::list out;
  for (const auto& r : rows) out.append(py::make_tuple(r.label, r.count, r.freq));
  return out;
}

py::dict length_dict(const LengthStats& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["sd"] = s.sd;
  d["max"] = s.max;
  d["sentences"] = s.sentences;
  d["histogram"] = s.histogram;
  return d;
}

template <typename Model>
std::string to_text(const Model& m) {
  std::ostringstream out;
  m.save(out);
  return out.str();
}

template <typename Model>
Model from_text(const std::string& text) {
  std::istringstream in(text);
  return Model::load(in);
}

py::dict pos_report(const PosEvalReport& r) {
  py::dict d;
  d["accuracy"] = r.accuracy;
  d["correct"] = r.correct;
  d["total"] = r.total;
  d["macro_f1"] = r.macro.f1;
  py::dict per_tag;
  for (const auto& t : r.per_tag) per_tag[py::str(t.tag)] = py::make_tuple(t.precision, t.recall, t.f1, t.support);
  d["per_tag"] = per_tag;
  d["table"] = r.table();
  return d;
}

}  // namespace

PYBIND11_MODULE(_tbw, m) {
  m.doc() = "CoNLL-U treebank tools: validation, statistics, splits, tagging and parsing";
  m.attr("__version__") = TBW_VERSION;

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() { return py::object(py::exception<Error>(m, "TbwError", PyExc_ValueError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const auto& cls = error_type.get_stored();
      py::object inst = cls(e.what());
      inst.attr("code") = std::string(error_code_name(e.code()));
      inst.attr("line") = e.line();
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  m.def("fixtures_conllu", [] { return serialize_conllu(fixtures::bundled()); },
        "The bundled fixture corpus as CoNLL-U text.");
  m.def("normalize", [](const std::string& text) { return serialize_conllu(load(text)); }, py::arg("text"));

  m.def(
      "validate",
      [](const std::string& text, const std::string& profile, bool strict, bool lints) {
        ValidationOptions opts;
        opts.profile = SchemaProfile::by_name(profile);
        opts.profile.strict = opts.profile.strict || strict;
        opts.lints = lints;
        py::list out;
        for (const auto& d : validate_treebank(load(text), opts)) {
          out.append(py::make_tuple(std::string(severity_name(d.severity)), d.code, d.sentence_index,
                                    d.token_id ? py::cast(*d.token_id) : py::none(), d.message));
        }
        return out;
      },
      py::arg("text"), py::arg("profile") = "generic", py::arg("strict") = false, py::arg("lints") = true,
      "Diagnostics as (severity, code, sentence, token, message) tuples.");

  m.def("upos_distribution", [](const std::string& t) { return rows_to_list(upos_distribution(load(t))); });
  m.def("deprel_distribution", [](const std::string& t) { return rows_to_list(deprel_distribution(load(t))); });
  m.def(
      "length_stats",
      [](const std::string& t, bool include_punct) { return length_dict(length_stats(load(t), include_punct)); },
      py::arg("text"), py::arg("include_punct") = true);

  m.def(
      "split",
      [](const std::string& text, const std::string& ratios, std::uint64_t seed) {
        const auto r = split(load(text), SplitSpec::parse(ratios, seed));
        return py::make_tuple(serialize_conllu(r.train), serialize_conllu(r.dev), serialize_conllu(r.test));
      },
      py::arg("text"), py::arg("ratios") = "60/20/20", py::arg("seed") = 1);
  m.def("delexicalize", [](const std::string& t) { return serialize_conllu(delexicalize(load(t))); });

  m.def(
      "train_tagger",
      [](const std::string& text, int epochs, std::uint64_t seed, const std::string& warm_start) {
        TaggerTrainOptions opts;
        opts.epochs = epochs;
        opts.seed = seed;
        TaggerModel warm;
        if (!warm_start.empty()) {
          warm = from_text<TaggerModel>(warm_start);
          opts.warm_start = &warm;
        }
        return to_text(train_tagger(load(text, "train"), opts));
      },
      py::arg("text"), py::arg("epochs") = 10, py::arg("seed") = 1, py::arg("warm_start") = "",
      "Returns the model file contents.");
  m.def(
      "tag",
      [](const std::string& model, const std::string& text) {
        return serialize_conllu(tag_treebank(from_text<TaggerModel>(model), load(text)));
      },
      py::arg("model"), py::arg("text"));
  m.def(
      "evaluate_pos",
      [](const std::string& model, const std::string& text, bool exclude_punct) {
        return pos_report(evaluate_pos(from_text<TaggerModel>(model), load(text), exclude_punct));
      },
      py::arg("model"), py::arg("text"), py::arg("exclude_punct") = false);

  m.def(
      "train_parser",
      [](const std::string& text, int epochs, std::uint64_t seed, const std::string& mode) {
        ParserTrainOptions opts;
        opts.epochs = epochs;
        opts.seed = seed;
        opts.mode = lex_mode_from_name(mode);
        return to_text(train_parser(load(text, "train"), opts));
      },
      py::arg("text"), py::arg("epochs") = 10, py::arg("seed") = 1, py::arg("mode") = "lex");
  m.def(
      "parse",
      [](const std::string& model, const std::string& text) {
        const auto pm = from_text<ParserModel>(model);
        const auto tb = load(text);
        return serialize_conllu(parse_treebank(pm, pm.mode == LexMode::Delex ? delexicalize(tb) : tb));
      },
      py::arg("model"), py::arg("text"));
  m.def(
      "evaluate_dep",
      [](const std::string& pred, const std::string& gold, bool exclude_punct) {
        const auto r = evaluate_dep(load(pred, "pred"), load(gold, "gold"), exclude_punct);
        py::dict d;
        d["uas"] = r.uas;
        d["las"] = r.las;
        d["tokens"] = r.token_count;
        return d;
      },
      py::arg("pred"), py::arg("gold"), py::arg("exclude_punct") = false);

  m.def(
      "decode_mst",
      [](const std::vector<std::vector<double>>& matrix) {
        const auto n = matrix.size() == 0 ? 0 : matrix.size() - 1;
        ArcScores scores(n);
        for (std::size_t h = 0; h <= n; ++h) {
          if (matrix[h].size() != n + 1) throw Error(ErrorCode::InvalidArgument, "score matrix must be (n+1) x (n+1)");
          for (std::size_t d = 1; d <= n; ++d) scores.at(h, d) = matrix[h][d];
        }
        return decode_mst(scores);
      },
      py::arg("scores"), "Heads of the best single-root tree; scores[h][d] is the arc h -> d.");

  m.def(
      "run_experiments",
      [](const std::string& task, const std::map<std::string, std::string>& corpora,
         const std::vector<std::uint64_t>& seeds, int epochs, const std::vector<std::string>& only) {
        CorpusSet set;
        for (const auto& [id, text] : corpora) set[id] = load(text, id);
        std::vector<ExperimentResult> results;
        for (auto spec : builtin_matrix(task_from_name(task))) {
          if (!only.empty() && std::find(only.begin(), only.end(), spec.id) == only.end()) continue;
          spec.seeds = seeds;
          if (epochs > 0) spec.epochs = epochs;
          py::gil_scoped_release release;
          results.push_back(run_experiment(spec, set));
        }
        return results_tsv(results);
      },
      py::arg("task"), py::arg("corpora"), py::arg("seeds") = std::vector<std::uint64_t>{1, 2, 3, 4, 5},
      py::arg("epochs") = 0, py::arg("only") = std::vector<std::string>{}, "Results TSV in percentage points.");
}
