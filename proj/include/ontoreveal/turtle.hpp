#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ontoreveal/ontology.hpp"

namespace ontoreveal {

enum class Severity { error, warning };

struct ParseDiagnostic {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based
  std::string message;
  Severity severity = Severity::error;

  bool operator==(const ParseDiagnostic&) const = default;
};

/// "<line>:<column>: error|warning: <message>"
std::string format_diagnostic(const ParseDiagnostic& diagnostic);

struct TurtleParseResult {
  /// Present iff no error diagnostics were produced.
  std::optional<Ontology> ontology;
  std::vector<ParseDiagnostic> diagnostics;
  /// Number of RDF triples read from the document (including skipped ones).
  std::size_t triple_count = 0;

  bool ok() const noexcept { return ontology.has_value(); }
  std::size_t error_count() const;
};

/// Parses the OWL subset from Turtle. Never throws on malformed input; all
/// problems are reported as diagnostics and the result is all-or-nothing.
TurtleParseResult parse_turtle(std::string_view input);

/// Deterministic serialization: prefixes sorted, subject blocks sorted by IRI,
/// predicates in the order type, label, comment, subClassOf, domain, range.
std::string serialize_turtle(const Ontology& ontology);

}  // namespace ontoreveal
