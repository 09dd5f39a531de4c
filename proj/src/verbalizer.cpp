#include "ontoreveal/verbalizer.hpp"

#include <algorithm>
#include <vector>

#include "ontoreveal/turtle.hpp"
#include "text_util.hpp"

namespace ontoreveal {

namespace {

constexpr std::string_view kDash = " — ";

std::string names_of(const Ontology& ontology, const std::set<Iri>& concepts) {
  std::vector<std::string> names;
  for (const auto& iri : concepts) names.push_back(display_name(iri, ontology.concepts().at(iri).label));
  std::sort(names.begin(), names.end());
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += " or ";
    out += n;
  }
  return out;
}

// Comments are flattened to a single line.
std::string one_line(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text_util::trim(text)) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      space = true;
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

template <typename Map, typename Render>
void append_group(std::string& out, const Map& elements, Render render) {
  std::vector<std::pair<std::string, std::string>> lines;
  for (const auto& [iri, element] : elements) {
    std::string name = display_name(iri, element.label);
    lines.emplace_back(name, render(name, element));
  }
  std::stable_sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [_, line] : lines) out += line + "\n";
}

}  // namespace

TokenEstimate estimate_tokens(std::string_view text) {
  std::size_t chars = text_util::count_scalars(text);
  return {chars, (chars + 3) / 4};
}

std::string verbalize_catalog(const Ontology& ontology, CatalogStyle style) {
  const bool endpoints = style != CatalogStyle::names_only;
  const bool comments = style == CatalogStyle::descriptive;
  auto comment_suffix = [&](const std::optional<std::string>& comment) {
    if (!comments || !comment || text_util::trim(*comment).empty()) return std::string();
    return std::string(kDash) + one_line(*comment);
  };

  std::string out;
  append_group(out, ontology.concepts(), [&](const std::string& name, const Concept& c) {
    return "Concept: " + name + comment_suffix(c.comment);
  });
  append_group(out, ontology.relationships(), [&](const std::string& name, const Relationship& r) {
    std::string line = "Relationship: " + name;
    if (endpoints) {
      line += " (connects " + names_of(ontology, r.domains) + " to " + names_of(ontology, r.ranges) + ")";
    }
    return line + comment_suffix(r.comment);
  });
  append_group(out, ontology.attributes(), [&](const std::string& name, const Attribute& a) {
    std::string line = "Attribute: " + name;
    if (endpoints) line += " of " + names_of(ontology, a.domains) + ", a " + std::string(a.datatype.local_name());
    return line;
  });
  return out;
}

std::string verbalize_slice(const Ontology& ontology, const Slice& slice) {
  return serialize_turtle(induce_subontology(ontology, slice));
}

std::string_view to_string(CatalogStyle style) {
  switch (style) {
    case CatalogStyle::names_only: return "names-only";
    case CatalogStyle::compact: return "compact";
    case CatalogStyle::descriptive: return "descriptive";
  }
  return "compact";
}

std::optional<CatalogStyle> parse_catalog_style(std::string_view text) {
  for (auto style : {CatalogStyle::names_only, CatalogStyle::compact, CatalogStyle::descriptive}) {
    if (to_string(style) == text) return style;
  }
  return std::nullopt;
}

}  // namespace ontoreveal
