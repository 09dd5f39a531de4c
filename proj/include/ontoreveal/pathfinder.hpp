#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontoreveal/ontology.hpp"
#include "ontoreveal/slicer.hpp"

namespace ontoreveal {

struct MissingReport;

inline constexpr int kDefaultMaxHops = 6;

struct PathStep {
  Iri from;
  Iri edge;  // relationship IRI, or rdfs:subClassOf for hierarchy hops
  EdgeDirection direction;
  Iri to;

  bool operator==(const PathStep&) const = default;
};

/// A simple chain of concept-graph edges starting at `origin`.
struct Path {
  Iri origin;
  std::vector<PathStep> steps;

  bool operator==(const Path&) const = default;

  std::size_t length() const noexcept { return steps.size(); }
  const Iri& destination() const { return steps.empty() ? origin : steps.back().to; }
};

/// Checks the chain property, edge existence and simplicity against `ontology`.
bool is_valid_path(const Ontology& ontology, const Path& path);

/// Shortest path over the undirected view of relationship and subclass edges.
/// Among shortest paths the one whose sequence of (edge, to, direction) is
/// lexicographically smallest is returned. Throws UnknownConceptError.
std::optional<Path> find_path(const Ontology& ontology, const Iri& source, const Iri& target,
                              int max_hops = kDefaultMaxHops);

struct Resolution {
  std::set<Iri> additions;
  std::vector<Path> paths;
  std::vector<std::string> unresolved;

  bool operator==(const Resolution&) const = default;
};

/// Turns a missing report into slice additions and connecting paths. Names
/// or links that cannot be resolved come back verbatim in `unresolved`
/// (links as "from -> to").
Resolution resolve_missing(const Ontology& ontology, const NameIndex& index, const Slice& slice,
                           const MissingReport& report, int max_hops = kDefaultMaxHops);

/// "<from> -<edge>-> <to>" chain using local names, or "(empty path at X)".
std::string describe_path(const Path& path);

}  // namespace ontoreveal
