#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ontoreveal/pathfinder.hpp"
#include "ontoreveal/pipeline.hpp"
#include "ontoreveal/slicer.hpp"
#include "ontoreveal/sparql_check.hpp"
#include "ontoreveal/synthgen.hpp"
#include "ontoreveal/turtle.hpp"
#include "ontoreveal/verbalizer.hpp"

namespace py = pybind11;
using namespace ontoreveal;

namespace {

std::vector<std::string> strings(const std::set<Iri>& iris) {
  std::vector<std::string> out;
  for (const auto& i : iris) out.push_back(i.str());
  return out;
}

py::dict slice_dict(const Slice& s) {
  py::dict d;
  d["concepts"] = strings(s.concepts);
  d["relationships"] = strings(s.relationships);
  d["attributes"] = strings(s.attributes);
  return d;
}

template <typename Map>
std::vector<std::string> keys(const Map& map) {
  std::vector<std::string> out;
  for (const auto& [iri, _] : map) out.push_back(iri.str());
  return out;
}

std::set<Iri> elements(const Ontology& o, const std::vector<std::string>& iris) {
  std::set<Iri> out;
  std::vector<Iri> unknown;
  for (const auto& text : iris) {
    Iri iri(text);
    if (!o.contains(iri)) unknown.push_back(iri);
    out.insert(iri);
  }
  if (!unknown.empty()) throw UnknownIriError(unknown);
  return out;
}

CatalogStyle style_from(const std::string& text) {
  auto style = parse_catalog_style(text);
  if (!style) throw std::invalid_argument("unknown catalog style: " + text);
  return *style;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ontology slicing and question-to-SPARQL pipeline.";

  py::class_<Ontology>(m, "Ontology")
      .def_property_readonly("concepts", [](const Ontology& o) { return keys(o.concepts()); })
      .def_property_readonly("relationships", [](const Ontology& o) { return keys(o.relationships()); })
      .def_property_readonly("attributes", [](const Ontology& o) { return keys(o.attributes()); })
      .def("axiom_count", &axiom_count)
      .def("to_turtle", &serialize_turtle)
      .def("__eq__", [](const Ontology& a, const Ontology& b) { return a == b; })
      .def("__repr__", [](const Ontology& o) {
        return "<Ontology concepts=" + std::to_string(o.concepts().size()) +
               " relationships=" + std::to_string(o.relationships().size()) +
               " attributes=" + std::to_string(o.attributes().size()) + ">";
      });

  m.def(
      "parse_turtle",
      [](const std::string& text) {
        auto result = parse_turtle(text);
        if (!result.ok()) {
          std::string msg;
          for (const auto& d : result.diagnostics) {
            if (d.severity == Severity::error) msg += format_diagnostic(d) + "\n";
          }
          throw py::value_error(msg);
        }
        return std::move(*result.ontology);
      },
      py::arg("text"), "Parse Turtle; raises ValueError listing the error diagnostics.");

  m.def("toy_ontology", [] { return toy_ontology(); });

  m.def(
      "generate",
      [](std::uint64_t seed, std::size_t concepts, std::size_t relationships, std::size_t attributes,
         std::size_t depth, std::size_t components) {
        GenSpec spec{seed, concepts, relationships, attributes, depth, Connectivity::split(components)};
        return generate(spec);
      },
      py::arg("seed"), py::arg("concepts"), py::arg("relationships"), py::arg("attributes"), py::arg("depth") = 0,
      py::arg("components") = 1);

  m.def(
      "verbalize_catalog",
      [](const Ontology& o, const std::string& style) { return verbalize_catalog(o, style_from(style)); },
      py::arg("ontology"), py::arg("style") = "compact");

  m.def("estimate_tokens", [](const std::string& text) {
    auto e = estimate_tokens(text);
    return py::make_tuple(e.chars, e.estimated_tokens);
  });

  m.def(
      "seed_slice",
      [](const Ontology& o, const std::vector<std::string>& names) {
        auto index = build_index(o);
        std::set<Iri> grounded;
        for (const auto& n : names) {
          auto found = resolve_name(index, n);
          if (found.empty() && Iri::is_absolute(n) && o.contains(Iri(n))) found.insert(Iri(n));
          if (found.empty()) throw py::key_error("unresolved: " + n);
          grounded.insert(found.begin(), found.end());
        }
        return slice_dict(seed_slice(o, grounded));
      },
      py::arg("ontology"), py::arg("names"), "Closed slice seeded by names or IRIs.");

  m.def(
      "verbalize_slice",
      [](const Ontology& o, const std::vector<std::string>& iris) {
        return verbalize_slice(o, seed_slice(o, elements(o, iris)));
      },
      py::arg("ontology"), py::arg("elements"));

  m.def(
      "find_path",
      [](const Ontology& o, const std::string& source, const std::string& target, int max_hops) -> py::object {
        auto path = find_path(o, Iri(source), Iri(target), max_hops);
        if (!path) return py::none();
        py::list steps;
        for (const auto& s : path->steps) {
          steps.append(py::make_tuple(s.from.str(), s.edge.str(), std::string(to_string(s.direction)), s.to.str()));
        }
        py::dict d;
        d["length"] = path->length();
        d["description"] = describe_path(*path);
        d["steps"] = steps;
        return d;
      },
      py::arg("ontology"), py::arg("source"), py::arg("target"), py::arg("max_hops") = kDefaultMaxHops);

  m.def(
      "validate_query",
      [](const std::string& query, const Ontology& o, const std::vector<std::string>& slice_elements) {
        std::vector<std::string> out;
        for (const auto& v : validate_query(query, o, seed_slice(o, elements(o, slice_elements)))) {
          out.push_back(format_violation(v));
        }
        return out;
      },
      py::arg("query"), py::arg("ontology"), py::arg("slice_elements"),
      "Violation lines; an empty list means the query conforms.");

  m.def(
      "run_pipeline_json",
      [](const std::string& question, const Ontology& o, const std::string& transcript_json, int max_steps,
         std::size_t budget) {
        PipelineConfig config;
        config.max_refinement_steps = max_steps;
        config.context_budget_tokens = budget;
        auto provider = LlmProvider::scripted(Transcript::from_json(transcript_json));
        py::gil_scoped_release release;
        return run_pipeline(question, o, provider, config).to_json();
      },
      py::arg("question"), py::arg("ontology"), py::arg("transcript_json"),
      py::arg("max_steps") = kDefaultMaxRefinementSteps, py::arg("budget") = kDefaultContextBudgetTokens);

  py::register_exception<UnknownIriError>(m, "UnknownIriError", PyExc_KeyError);
}
