#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "json.hpp"
#include "l2srl/pipeline.hpp"
#include "l2srl/report.hpp"

namespace py = pybind11;
using namespace l2srl;

namespace {

py::object to_python(const nlohmann::ordered_json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Corpus parse_corpus(const std::string& text, bool lenient) {
  std::istringstream in(text);
  ReadOptions opts;
  if (lenient) opts.mode = DecodeMode::Lenient;
  return read_corpus(in, opts);
}

py::list frames_of(const AnnotatedSentence& s) {
  py::list out;
  for (const auto& f : s.frames) {
    py::list spans;
    for (const auto& sp : f.spans) spans.append(py::make_tuple(sp.start, sp.end, sp.label.str()));
    out.append(py::make_tuple(f.predicate_index, spans));
  }
  return out;
}

AlignmentTable alignments_for(const Corpus& l2, const Corpus& l1, const std::optional<std::string>& text) {
  if (!text) return heuristic_align_corpora(l2, l1);
  std::istringstream in(*text);
  return read_alignments(in);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the l2srl toolkit";

  auto& base = py::register_exception<Error>(m, "L2SRLError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<MismatchedCorpora>(m, "MismatchedCorpora", base.ptr());
  py::register_exception<MissingMetadata>(m, "MissingMetadata", base.ptr());
  py::register_exception<PairingError>(m, "PairingError", base.ptr());
  py::register_exception<VersionMismatch>(m, "VersionMismatch", base.ptr());

  py::class_<Corpus>(m, "Corpus")
      .def("__len__", [](const Corpus& c) { return c.sentences.size(); })
      .def("ids", [](const Corpus& c) {
        std::vector<std::string> ids;
        for (const auto& s : c.sentences) ids.push_back(s.id);
        return ids;
      })
      .def("forms", [](const Corpus& c, std::size_t i) {
        std::vector<std::string> forms;
        for (const auto& t : c.sentences.at(i).tokens) forms.push_back(t.form);
        return forms;
      })
      .def("frames", [](const Corpus& c, std::size_t i) { return frames_of(c.sentences.at(i)); },
           "[(predicate, [(start, end, label), ...]), ...] for sentence i, 1-based token indices")
      .def("to_text", [](const Corpus& c) {
        std::ostringstream out;
        write_corpus(c, out);
        return out.str();
      });

  m.def("read_corpus", &parse_corpus, py::arg("text"), py::arg("lenient") = false);

  m.def("read_alignments", [](const std::string& text) {
    std::istringstream in(text);
    py::dict out;
    for (const auto& a : read_alignments(in).entries()) out[py::str(a.pair_id)] = py::cast(a.links);
    return out;
  });

  m.def(
      "score",
      [](const Corpus& pred, const Corpus& gold, bool am_coarse, const std::optional<std::string>& group_by) {
        ScoreOptions opts{am_coarse};
        if (!group_by) return to_python(to_json(score(pred, gold, opts)));
        if (*group_by != "lang" && *group_by != "side" && *group_by != "lang,side")
          throw py::value_error("group_by must be 'lang', 'side' or 'lang,side'");
        GroupBy g = *group_by == "lang" ? GroupBy::Lang : *group_by == "side" ? GroupBy::Side : GroupBy::LangSide;
        return to_python(to_json(score_grouped(pred, gold, g, opts)));
      },
      py::arg("pred"), py::arg("gold"), py::arg("am_coarse") = false, py::arg("group_by") = py::none());

  m.def(
      "oracle",
      [](const Corpus& pred, const Corpus& gold, bool am_coarse) {
        return to_python(to_json(oracle_sequence(pred, gold, ScoreOptions{am_coarse})));
      },
      py::arg("pred"), py::arg("gold"), py::arg("am_coarse") = false);

  m.def(
      "heuristic_align",
      [](const std::vector<std::string>& l2, const std::vector<std::string>& l1) {
        AnnotatedSentence a, b;
        for (std::size_t i = 0; i < l2.size(); ++i) a.tokens.push_back(Token{static_cast<int>(i) + 1, l2[i]});
        for (std::size_t i = 0; i < l1.size(); ++i) b.tokens.push_back(Token{static_cast<int>(i) + 1, l1[i]});
        return heuristic_align(a, b).links;
      },
      py::arg("l2_forms"), py::arg("l1_forms"));

  m.def(
      "select",
      [](const Corpus& l2, const Corpus& l1, double p, const std::optional<std::string>& alignments, bool am_coarse) {
        PairingResult paired = pair_corpora(l2, l1, alignments_for(l2, l1, alignments));
        paired.require_complete();
        std::vector<PairRecall> recalls;
        for (const auto& pair : paired.pairs) recalls.push_back(recall_pair(pair, AgreementOptions{am_coarse}));
        SelectionResult sel = select(recalls, SelectionConfig{p});
        py::list rows;
        std::vector<bool> chosen(recalls.size(), false);
        for (std::size_t i : sel.selected) chosen[i] = true;
        for (std::size_t i = 0; i < recalls.size(); ++i) {
          const auto& r = recalls[i];
          py::dict row;
          row["pair_id"] = r.pair_id;
          row["l2_recall"] = r.l2_recall;
          row["l1_recall"] = r.l1_recall;
          row["eligible"] = r.eligible;
          row["selected"] = static_cast<bool>(chosen[i]);
          rows.append(row);
        }
        return rows;
      },
      py::arg("l2"), py::arg("l1"), py::arg("p") = 0.9, py::arg("alignments") = py::none(), py::arg("am_coarse") = true);

  py::class_<TaggerModel>(m, "Model")
      .def_property_readonly("labels",
                             [](const TaggerModel& model) {
                               std::vector<std::string> out;
                               for (const auto& t : model.labels().tags()) out.push_back(t.str());
                               return out;
                             })
      .def("to_text", [](const TaggerModel& model) {
        std::ostringstream out;
        save_model(model, out);
        return out.str();
      });

  m.def(
      "train",
      [](const Corpus& corpus, int epochs, std::uint64_t seed, bool averaging) {
        py::gil_scoped_release release;
        return train(corpus, TrainConfig{epochs, seed, averaging});
      },
      py::arg("corpus"), py::arg("epochs") = 10, py::arg("seed") = 1, py::arg("averaging") = true);

  m.def("load_model", [](const std::string& text) {
    std::istringstream in(text);
    return load_model(in);
  });

  m.def("tag", &tag_corpus, py::arg("model"), py::arg("corpus"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
