#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "ontoreveal/ontology.hpp"
#include "ontoreveal/slicer.hpp"

namespace ontoreveal {

/// How much of each element the informal catalog shows.
enum class CatalogStyle {
  names_only,   // "Concept: <name>"
  compact,      // names, relationship endpoints, attribute datatypes
  descriptive,  // compact plus "— <comment>" on concepts and relationships
};

struct TokenEstimate {
  std::size_t chars = 0;
  std::size_t estimated_tokens = 0;

  bool operator==(const TokenEstimate&) const = default;
};

/// chars = Unicode scalar values; tokens = ceil(chars / 4).
TokenEstimate estimate_tokens(std::string_view text);

/// One line per element: concepts, then relationships, then attributes, each
/// group ordered by display name.
std::string verbalize_catalog(const Ontology& ontology, CatalogStyle style = CatalogStyle::compact);

/// Turtle of the sub-ontology induced by `slice`. Throws InvalidSliceError.
std::string verbalize_slice(const Ontology& ontology, const Slice& slice);

std::string_view to_string(CatalogStyle style);
std::optional<CatalogStyle> parse_catalog_style(std::string_view text);

}  // namespace ontoreveal
