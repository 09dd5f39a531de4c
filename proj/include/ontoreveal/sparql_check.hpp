#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ontoreveal/ontology.hpp"
#include "ontoreveal/slicer.hpp"

namespace ontoreveal {

enum class QueryFeature {
  union_,
  optional,
  filter,
  group_by,
  having,
  order_by,
  subquery,
  property_path,
  aggregate_count,
  aggregate_sum,
  aggregate_avg,
  aggregate_min,
  aggregate_max,
};

std::string_view to_string(QueryFeature feature);

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;

  auto operator<=>(const SourceLocation&) const = default;
};

/// Where a class or predicate IRI first appears, as written in the query.
struct IriOccurrence {
  std::string text;
  SourceLocation location;

  bool operator==(const IriOccurrence&) const = default;
};

/// Vocabulary and feature summary of a SELECT query. Built-in IRIs
/// (rdf, rdfs, owl, xsd) never appear in class_iris or predicate_iris.
struct SparqlSkeleton {
  std::set<Iri> class_iris;      // objects of rdf:type patterns
  std::set<Iri> predicate_iris;  // every IRI used in a predicate path
  std::set<std::string> variables;
  std::set<QueryFeature> features;
  std::map<std::string, Iri> prefix_decls;
  std::map<Iri, IriOccurrence> occurrences;

  bool operator==(const SparqlSkeleton&) const = default;
};

enum class ViolationKind { unknown_class, unknown_predicate, unprefixed_name, parse_error };

std::string_view to_string(ViolationKind kind);

struct ConformanceViolation {
  ViolationKind kind;
  std::string offending;
  SourceLocation location;
  std::string detail;

  bool operator==(const ConformanceViolation&) const = default;
};

/// "<kind>\t<offending>\t<line>:<column>\t<detail>"
std::string format_violation(const ConformanceViolation& violation);

using SkeletonResult = std::variant<SparqlSkeleton, std::vector<ConformanceViolation>>;

/// Parses a SELECT subset: PREFIX/BASE; projections with expressions and
/// aliases; basic graph patterns, UNION, OPTIONAL, FILTER, BIND; property
/// paths built from '/' and '^'; GROUP BY, HAVING, ORDER BY, LIMIT, OFFSET;
/// COUNT, SUM, AVG, MIN, MAX; subqueries one level deep. The rdf, rdfs, owl
/// and xsd prefixes are implicitly available when not declared.
/// Never throws; anything outside the subset becomes a violation.
SkeletonResult extract_skeleton(std::string_view query);

/// Every class IRI must be a slice concept and every predicate IRI a slice
/// relationship or attribute. The detail says "not in slice" or
/// "not in ontology" (hallucinated vocabulary).
std::vector<ConformanceViolation> check_conformance(const SparqlSkeleton& skeleton, const Ontology& ontology,
                                                    const Slice& slice);

/// extract_skeleton followed by check_conformance.
std::vector<ConformanceViolation> validate_query(std::string_view query, const Ontology& ontology,
                                                 const Slice& slice);

}  // namespace ontoreveal
