#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "tokbias/bpe.hpp"
#include "tokbias/error.hpp"
#include "tokbias/metrics.hpp"
#include "tokbias/report.hpp"
#include "tokbias/sampler.hpp"
#include "tokbias/script.hpp"
#include "tokbias/segmenter.hpp"
#include "tokbias/vocab.hpp"

namespace py = pybind11;
using namespace tokbias;

namespace {

LengthRule rule_named(const std::string& name) {
  const auto rule = parse_length_rule(name);
  if (!rule) throw py::value_error("unknown length rule: " + name);
  return *rule;
}

ScriptClass class_named(const std::string& name) {
  const auto cls = parse_script_class(name);
  if (!cls) throw py::value_error("unknown script class: " + name);
  return *cls;
}

py::dict plan_dict(const SamplePlan& plan) {
  py::dict d;
  d["cap"] = plan.cap;
  d["total"] = plan.total;
  d["per_length"] = plan.per_length;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "tokbias C++ core";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<VocabularyProfile>(m, "Profile")
      .def_readonly("name", &VocabularyProfile::name)
      .def_readonly("rank_file_path", &VocabularyProfile::rank_file_path)
      .def_readonly("pattern", &VocabularyProfile::pretokenize_pattern)
      .def_readonly("special_tokens", &VocabularyProfile::special_tokens);

  py::class_<Vocabulary, std::shared_ptr<Vocabulary>>(m, "Vocabulary")
      .def_property_readonly("name", &Vocabulary::profile_name)
      .def("__len__", &Vocabulary::size)
      .def("token_bytes", [](const Vocabulary& v, Rank r) { return py::bytes(std::string(decode_token(v, r))); })
      .def("rank_of", [](const Vocabulary& v, const py::bytes& b) { return v.rank_of(std::string(b)); })
      .def("display", [](const Vocabulary& v, Rank r) { return token_display(v.at(r)); })
      .def("classes",
           [](const Vocabulary& v, const std::string& rule) {
             std::map<std::string, std::size_t> out;
             for (const auto& [cls, n] : count_classes(v, rule_named(rule))) out[std::string(to_string(cls))] = n;
             return out;
           },
           py::arg("rule") = "strict")
      .def("merge_unreachable", [](const Vocabulary& v) { return find_merge_unreachable(v); })
      .def("strict_divergent", [](const Vocabulary& v) { return find_strict_divergent(v); });

  m.def("load_rank_file",
        [](const std::filesystem::path& path, const std::string& name) {
          return std::make_shared<Vocabulary>(load_rank_file(path, name));
        },
        py::arg("path"), py::arg("name") = "vocab");
  m.def("load_profile", &load_profile, py::arg("path"), py::arg("rank_dir") = std::nullopt);

  py::class_<Encoder>(m, "Encoder")
      .def(py::init<const Vocabulary&, const VocabularyProfile&>(), py::keep_alive<1, 2>())
      .def("encode",
           [](const Encoder& e, const std::string& text, bool strict) {
             return e.encode(text, strict ? EncodeMode::StrictMerges : EncodeMode::Shortcut).ranks;
           },
           py::arg("text"), py::arg("strict") = false)
      .def("decode", [](const Encoder& e, const std::vector<Rank>& ranks) {
        return py::bytes(decode(ranks, e.vocab()));
      });

  py::class_<FrequencyDictionary>(m, "Dictionary")
      .def_static("load", &load_dictionary)
      .def_static("parse", [](const std::string& text) { return parse_dictionary(text); })
      .def("__len__", &FrequencyDictionary::size)
      .def("__contains__", [](const FrequencyDictionary& d, const std::string& w) { return d.contains(w); })
      .def("frequency", [](const FrequencyDictionary& d, const std::string& w) { return d.frequency(w); })
      .def_property_readonly("total", &FrequencyDictionary::total);

  m.def("segment", [](const std::string& text, const FrequencyDictionary& d) { return segment(text, d).segments; });
  m.def("classify_text", [](const std::string& text, const std::string& rule) {
    return std::string(to_string(classify_text(text, rule_named(rule))));
  }, py::arg("text"), py::arg("rule") = "strict");

  m.def("length_histogram",
        [](const Vocabulary& v, const std::string& script, std::size_t min_len, const std::string& rule) {
          return build_length_histogram(v, class_named(script), min_len, rule_named(rule)).counts;
        },
        py::arg("vocab"), py::arg("script") = "han", py::arg("min_len") = 2, py::arg("rule") = "strict");

  m.def("plan_sample",
        [](const std::map<std::size_t, std::size_t>& counts, std::size_t cap) {
          LengthHistogram h;
          h.counts = counts;
          return plan_dict(plan_sample(h, cap));
        },
        py::arg("histogram"), py::arg("cap"));

  m.def("draw_sample",
        [](const Vocabulary& v, const std::string& script, std::size_t min_len, std::size_t cap,
           std::uint64_t seed, const std::string& rule) {
          const auto r = rule_named(rule);
          const auto cls = class_named(script);
          const auto plan = plan_sample(build_length_histogram(v, cls, min_len, r), cap);
          auto s = draw_sample(collect_candidates(v, cls, min_len, r), plan, seed);
          attach_texts(s, v, r);
          return sample_to_json(s, plan);
        },
        py::arg("vocab"), py::arg("script") = "han", py::arg("min_len") = 2, py::arg("cap") = 20,
        py::arg("seed") = 1, py::arg("rule") = "strict");

  m.def("containment_check", &containment_check, py::arg("token"), py::arg("segments") = std::nullopt,
        py::arg("sentence"));

  m.def("metrics_from_fixtures", [](const std::filesystem::path& dir) {
    return report_to_json(compute_metrics(load_metrics_inputs(dir)));
  });
  m.def("render_report", [](const std::string& metrics_json, const std::string& format) {
    const auto f = parse_report_format(format);
    if (!f) throw py::value_error("unknown format: " + format);
    return render_report(report_from_json(metrics_json), *f);
  }, py::arg("metrics_json"), py::arg("format") = "markdown");
  m.def("format4", &format4);
}
