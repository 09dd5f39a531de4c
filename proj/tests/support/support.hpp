#pragma once

// Test-only generators and brute-force oracles. Nothing here calls the
// library's slicing or path-finding code; the oracles work from the raw
// concept/relationship/attribute records.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ontoreveal/ontology.hpp"
#include "ontoreveal/pathfinder.hpp"
#include "ontoreveal/slicer.hpp"

namespace testsupport {

using ontoreveal::Iri;
using ontoreveal::Ontology;
using ontoreveal::Slice;

std::filesystem::path data_dir();
std::filesystem::path golden_dir();
std::string read_text(const std::filesystem::path& path);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned percent) { return below(100) < percent; }
  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

Iri ex(const std::string& local);

struct RandomOntologyOptions {
  std::size_t max_elements = 30;
  std::size_t max_concepts = 12;
  bool connected = false;         // relationships include a spanning tree
  unsigned superclass_percent = 25;
  unsigned multi_endpoint_percent = 20;
};

/// Small random ontology with ex: IRIs; always valid.
Ontology random_ontology(Rng& rng, const RandomOntologyOptions& options = {});

/// A random subset of the ontology's elements.
std::set<Iri> random_elements(Rng& rng, const Ontology& o, unsigned percent);

/// Closure rules applied by exhaustive rescans until nothing changes.
Slice closure_oracle(const Ontology& o, const std::set<Iri>& elements);

/// Undirected concept adjacency built from domain x range pairs and subclass axioms.
std::map<Iri, std::set<Iri>> undirected_edges(const Ontology& o);

/// BFS hop distance, nullopt when unreachable.
std::optional<int> bfs_distance(const Ontology& o, const Iri& from, const Iri& to);

/// Every shortest path from `from` to `to` as (edge, to, direction) sequences,
/// enumerated by depth-first search over raw records.
using StepKey = std::tuple<Iri, Iri, ontoreveal::EdgeDirection>;
std::vector<std::vector<StepKey>> all_shortest_paths(const Ontology& o, const Iri& from, const Iri& to);

std::vector<StepKey> keys_of(const ontoreveal::Path& path);

/// Number of connected components of the undirected concept graph.
std::size_t component_count(const Ontology& o);

}  // namespace testsupport
