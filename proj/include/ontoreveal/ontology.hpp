#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ontoreveal {

/// An absolute IRI (scheme ":" rest). Compared byte-for-byte.
class Iri {
 public:
  /// Throws std::invalid_argument when `value` is not an absolute IRI.
  explicit Iri(std::string value);

  static bool is_absolute(std::string_view value);

  const std::string& str() const noexcept { return value_; }

  /// Text after the last '#', else after the last '/', else after the scheme.
  std::string_view local_name() const noexcept;

  auto operator<=>(const Iri&) const = default;

 private:
  std::string value_;
};

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";

/// True for IRIs in the rdf, rdfs, owl or xsd namespaces.
bool is_builtin(std::string_view iri);
}  // namespace vocab

struct Concept {
  Iri iri;
  std::optional<std::string> label;
  std::optional<std::string> comment;
  std::set<Iri> superclasses;

  bool operator==(const Concept&) const = default;
};

/// Object property. Multiple domains or ranges are read as alternatives.
struct Relationship {
  Iri iri;
  std::optional<std::string> label;
  std::optional<std::string> comment;
  std::set<Iri> domains;
  std::set<Iri> ranges;

  bool operator==(const Relationship&) const = default;
};

/// Datatype property.
struct Attribute {
  Iri iri;
  std::optional<std::string> label;
  std::optional<std::string> comment;
  std::set<Iri> domains;
  Iri datatype;

  bool operator==(const Attribute&) const = default;
};

enum class ElementKind { concept_, relationship, attribute };

/// Raised when an ontology would violate one of its structural invariants.
class OntologyError : public std::runtime_error {
 public:
  explicit OntologyError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class UnknownConceptError : public std::invalid_argument {
 public:
  explicit UnknownConceptError(const Iri& iri);
};

enum class EdgeDirection { outgoing, incoming, super, sub };

std::string_view to_string(EdgeDirection direction);

/// One edge incident to a concept in the concept graph. Subclass edges use
/// rdfs:subClassOf as `edge`.
struct Neighbor {
  Iri edge;
  EdgeDirection direction;
  Iri other;

  auto operator<=>(const Neighbor&) const = default;
};

/// Immutable concept/relationship/attribute graph. Construction validates
/// referential closure, kind disjointness, superclass acyclicity and the
/// per-element invariants, throwing OntologyError with every problem found.
class Ontology {
 public:
  using ConceptMap = std::map<Iri, Concept>;
  using RelationshipMap = std::map<Iri, Relationship>;
  using AttributeMap = std::map<Iri, Attribute>;
  using PrefixMap = std::map<std::string, Iri>;

  Ontology() = default;
  Ontology(std::vector<Concept> concepts, std::vector<Relationship> relationships,
           std::vector<Attribute> attributes, PrefixMap prefixes = {});

  const ConceptMap& concepts() const noexcept { return concepts_; }
  const RelationshipMap& relationships() const noexcept { return relationships_; }
  const AttributeMap& attributes() const noexcept { return attributes_; }
  const PrefixMap& prefixes() const noexcept { return prefixes_; }

  std::optional<ElementKind> kind_of(const Iri& iri) const;
  bool contains(const Iri& iri) const { return kind_of(iri).has_value(); }
  bool is_concept(const Iri& iri) const { return concepts_.contains(iri); }
  std::size_t element_count() const noexcept {
    return concepts_.size() + relationships_.size() + attributes_.size();
  }
  bool empty() const noexcept { return element_count() == 0 && prefixes_.empty(); }

  /// Direct subclasses of `concept_iri` (empty for unknown IRIs).
  const std::set<Iri>& subclasses(const Iri& concept_iri) const;

  /// Sorted incident edges of a concept. Throws UnknownConceptError.
  const std::vector<Neighbor>& neighbors(const Iri& concept_iri) const;

  /// Attributes whose domain contains `concept_iri`.
  const std::set<Iri>& attributes_of(const Iri& concept_iri) const;

  /// Equality over the four element/prefix maps.
  bool operator==(const Ontology& other) const;

 private:
  void validate() const;
  void build_graph();

  ConceptMap concepts_;
  RelationshipMap relationships_;
  AttributeMap attributes_;
  PrefixMap prefixes_;

  std::map<Iri, std::set<Iri>> subclasses_;
  std::map<Iri, std::vector<Neighbor>> neighbors_;
  std::map<Iri, std::set<Iri>> attributes_by_concept_;
};

/// One statement per declaration, label, comment, superclass, domain, range
/// and attribute datatype. Matches the triple count of serialize_turtle.
std::size_t axiom_count(const Ontology& ontology);

/// Lowercase, trim, collapse internal whitespace runs to one space.
std::string canonicalize_name(std::string_view name);

/// "hasAccountManager" -> "has account manager"; '_' and '-' act as spaces.
std::string split_identifier(std::string_view identifier);

/// Display name: the label when present, else the split local name.
std::string display_name(const Iri& iri, const std::optional<std::string>& label);

/// Exact-match lookup table from surface names back to element IRIs.
class NameIndex {
 public:
  using Entries = std::map<std::string, std::set<Iri>>;

  explicit NameIndex(Entries entries) : entries_(std::move(entries)) {}

  const Entries& entries() const noexcept { return entries_; }

  /// Canonicalizes `name` and returns every IRI registered under it.
  std::set<Iri> resolve(std::string_view name) const;

  bool operator==(const NameIndex&) const = default;

 private:
  Entries entries_;
};

NameIndex build_index(const Ontology& ontology);

inline std::set<Iri> resolve_name(const NameIndex& index, std::string_view name) {
  return index.resolve(name);
}

}  // namespace ontoreveal
