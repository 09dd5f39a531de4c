#include "ontoreveal/slicer.hpp"

#include <deque>

#include "ontoreveal/pathfinder.hpp"

namespace ontoreveal {

namespace {

std::string join_iris(const std::vector<Iri>& iris) {
  std::string out;
  for (const auto& iri : iris) {
    if (!out.empty()) out += ", ";
    out += iri.str();
  }
  return out;
}

void add_by_kind(const Ontology& ontology, const Iri& iri, Slice& slice, std::vector<Iri>& unknown) {
  auto kind = ontology.kind_of(iri);
  if (!kind) {
    unknown.push_back(iri);
    return;
  }
  switch (*kind) {
    case ElementKind::concept_: slice.concepts.insert(iri); break;
    case ElementKind::relationship: slice.relationships.insert(iri); break;
    case ElementKind::attribute: slice.attributes.insert(iri); break;
  }
}

}  // namespace

bool Slice::includes(const Slice& other) const {
  auto covers = [](const std::set<Iri>& big, const std::set<Iri>& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  return covers(concepts, other.concepts) && covers(relationships, other.relationships) &&
         covers(attributes, other.attributes);
}

std::set<Iri> Slice::elements() const {
  std::set<Iri> out = concepts;
  out.insert(relationships.begin(), relationships.end());
  out.insert(attributes.begin(), attributes.end());
  return out;
}

UnknownIriError::UnknownIriError(std::vector<Iri> unknown)
    : std::invalid_argument("unknown IRI(s): " + join_iris(unknown)), unknown_(std::move(unknown)) {}

Slice close_slice(const Ontology& ontology, Slice slice) {
  // Worklist over newly added concepts; relationship and attribute
  // endpoints are enqueued as they are discovered.
  std::deque<Iri> pending;
  auto add_concept = [&](const Iri& iri) {
    if (slice.concepts.insert(iri).second) pending.push_back(iri);
  };
  auto add_attribute = [&](const Iri& iri) {
    slice.attributes.insert(iri);
    for (const auto& d : ontology.attributes().at(iri).domains) add_concept(d);
  };

  for (const auto& iri : slice.concepts) pending.push_back(iri);
  for (const auto& iri : slice.relationships) {
    const auto& r = ontology.relationships().at(iri);
    for (const auto& d : r.domains) add_concept(d);
    for (const auto& g : r.ranges) add_concept(g);
  }
  for (const auto& iri : std::set<Iri>(slice.attributes)) add_attribute(iri);

  while (!pending.empty()) {
    Iri current = std::move(pending.front());
    pending.pop_front();
    for (const auto& super : ontology.concepts().at(current).superclasses) add_concept(super);
    for (const auto& attr : ontology.attributes_of(current)) {
      if (!slice.attributes.contains(attr)) add_attribute(attr);
    }
  }
  return slice;
}

bool is_valid_slice(const Ontology& ontology, const Slice& slice) {
  for (const auto& c : slice.concepts) {
    if (!ontology.concepts().contains(c)) return false;
  }
  for (const auto& r : slice.relationships) {
    if (!ontology.relationships().contains(r)) return false;
  }
  for (const auto& a : slice.attributes) {
    if (!ontology.attributes().contains(a)) return false;
  }
  return close_slice(ontology, slice) == slice;
}

void require_valid_slice(const Ontology& ontology, const Slice& slice) {
  std::vector<Iri> foreign;
  for (const auto& c : slice.concepts) {
    if (!ontology.concepts().contains(c)) foreign.push_back(c);
  }
  for (const auto& r : slice.relationships) {
    if (!ontology.relationships().contains(r)) foreign.push_back(r);
  }
  for (const auto& a : slice.attributes) {
    if (!ontology.attributes().contains(a)) foreign.push_back(a);
  }
  if (!foreign.empty()) {
    throw InvalidSliceError("slice references elements absent from the ontology: " + join_iris(foreign));
  }
  if (close_slice(ontology, slice) != slice) throw InvalidSliceError("slice is not closed");
}

Slice seed_slice(const Ontology& ontology, const std::set<Iri>& grounded) {
  Slice slice;
  std::vector<Iri> unknown;
  for (const auto& iri : grounded) add_by_kind(ontology, iri, slice, unknown);
  if (!unknown.empty()) throw UnknownIriError(std::move(unknown));
  return close_slice(ontology, std::move(slice));
}

Slice expand_slice(const Ontology& ontology, const Slice& slice, const std::set<Iri>& additions,
                   const std::vector<Path>& paths) {
  Slice next = slice;
  std::vector<Iri> unknown;
  for (const auto& iri : slice.elements()) {
    if (!ontology.contains(iri)) unknown.push_back(iri);
  }
  for (const auto& iri : additions) add_by_kind(ontology, iri, next, unknown);
  for (const auto& path : paths) {
    add_by_kind(ontology, path.origin, next, unknown);
    for (const auto& step : path.steps) {
      add_by_kind(ontology, step.to, next, unknown);
      if (step.direction == EdgeDirection::outgoing || step.direction == EdgeDirection::incoming) {
        add_by_kind(ontology, step.edge, next, unknown);
      }
    }
  }
  if (!unknown.empty()) throw UnknownIriError(std::move(unknown));
  return close_slice(ontology, std::move(next));
}

Slice full_slice(const Ontology& ontology) {
  Slice slice;
  for (const auto& [iri, _] : ontology.concepts()) slice.concepts.insert(iri);
  for (const auto& [iri, _] : ontology.relationships()) slice.relationships.insert(iri);
  for (const auto& [iri, _] : ontology.attributes()) slice.attributes.insert(iri);
  return slice;
}

Ontology induce_subontology(const Ontology& ontology, const Slice& slice) {
  require_valid_slice(ontology, slice);
  std::vector<Concept> concepts;
  std::vector<Relationship> relationships;
  std::vector<Attribute> attributes;
  for (const auto& iri : slice.concepts) concepts.push_back(ontology.concepts().at(iri));
  for (const auto& iri : slice.relationships) relationships.push_back(ontology.relationships().at(iri));
  for (const auto& iri : slice.attributes) attributes.push_back(ontology.attributes().at(iri));
  return Ontology(std::move(concepts), std::move(relationships), std::move(attributes), ontology.prefixes());
}

}  // namespace ontoreveal
