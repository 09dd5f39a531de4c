#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ontoreveal/ontology.hpp"

namespace ontoreveal {

inline constexpr std::string_view kSynthNamespace = "http://example.org/synth#";
inline constexpr std::string_view kSynthPrefix = "syn";

/// connected, or split into `components` groups with no edges between them.
struct Connectivity {
  std::size_t components = 1;

  static Connectivity connected() { return {1}; }
  static Connectivity split(std::size_t k) { return {k}; }
  bool is_connected() const noexcept { return components == 1; }
  bool operator==(const Connectivity&) const = default;
};

struct GenSpec {
  std::uint64_t seed = 0;
  std::size_t n_concepts = 0;
  std::size_t n_relationships = 0;
  std::size_t n_attributes = 0;
  std::size_t hierarchy_depth = 0;  // longest subclass chain, in hops
  Connectivity connectivity;

  bool operator==(const GenSpec&) const = default;
};

class InvalidSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws InvalidSpecError describing the first problem.
void validate_spec(const GenSpec& spec);

/// Deterministic for a fixed spec on every platform: the only randomness is
/// std::mt19937_64 seeded with spec.seed, mapped to ranges by rejection.
///
/// Concepts are split into `components` groups (concept i joins group
/// i % k). Within each group a spanning tree of relationships is laid down
/// first, as far as n_relationships allows; the rest join random pairs inside
/// a group. The first group carries a subclass chain of exactly
/// hierarchy_depth hops; every other concept gets at most one superclass from
/// its own group.
Ontology generate(const GenSpec& spec);

/// The bundled telecom ontology (11 concepts) used by the golden scenarios.
const Ontology& toy_ontology();
/// Its Turtle source exactly as shipped in data/toy_telecom.ttl.
std::string_view toy_ontology_turtle();

}  // namespace ontoreveal
