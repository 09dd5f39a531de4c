#pragma once

#include <set>
#include <stdexcept>
#include <vector>

#include "ontoreveal/ontology.hpp"

namespace ontoreveal {

struct Path;

/// A sub-ontology identified by element IRIs. Slices produced by the
/// functions below are always closed (see close_slice).
struct Slice {
  std::set<Iri> concepts;
  std::set<Iri> relationships;
  std::set<Iri> attributes;

  bool operator==(const Slice&) const = default;

  bool empty() const noexcept { return concepts.empty() && relationships.empty() && attributes.empty(); }
  std::size_t size() const noexcept { return concepts.size() + relationships.size() + attributes.size(); }
  bool contains(const Iri& iri) const {
    return concepts.contains(iri) || relationships.contains(iri) || attributes.contains(iri);
  }
  /// Elementwise superset test.
  bool includes(const Slice& other) const;
  /// All element IRIs in sorted order.
  std::set<Iri> elements() const;
};

/// Raised for IRIs that are not elements of the ontology. Lists every one.
class UnknownIriError : public std::invalid_argument {
 public:
  explicit UnknownIriError(std::vector<Iri> unknown);
  const std::vector<Iri>& unknown() const noexcept { return unknown_; }

 private:
  std::vector<Iri> unknown_;
};

/// Raised when a slice is not a closed subset of its ontology.
class InvalidSliceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The closure rules, applied to a fixpoint:
///  - an included relationship pulls in all of its domains and ranges;
///  - an included attribute pulls in all of its domains;
///  - an included concept pulls in its direct superclasses (so the whole chain);
///  - an included concept pulls in every attribute whose domain contains it.
/// Subclasses and sibling classes are never pulled in.
Slice close_slice(const Ontology& ontology, Slice slice);

/// True when every element resolves with the matching kind and the slice is
/// already a fixpoint of close_slice.
bool is_valid_slice(const Ontology& ontology, const Slice& slice);

/// Throws InvalidSliceError with a description when !is_valid_slice.
void require_valid_slice(const Ontology& ontology, const Slice& slice);

Slice seed_slice(const Ontology& ontology, const std::set<Iri>& grounded);

/// closure(slice ∪ additions ∪ every concept and relationship on `paths`).
Slice expand_slice(const Ontology& ontology, const Slice& slice, const std::set<Iri>& additions,
                   const std::vector<Path>& paths);

Slice full_slice(const Ontology& ontology);

/// The sub-ontology made of the slice's elements; the slice must be valid.
Ontology induce_subontology(const Ontology& ontology, const Slice& slice);

}  // namespace ontoreveal
