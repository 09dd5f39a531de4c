#include "ontoreveal/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace ontoreveal {

namespace {

bool is_scheme_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '+' || c == '-' || c == '.';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim_copy(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n\f\v");
  return std::string(text.substr(begin, end - begin + 1));
}

// Turtle PN_PREFIX restricted to ASCII, or empty.
bool is_prefix_name(std::string_view prefix) {
  if (prefix.empty()) return true;
  if (!is_scheme_start(prefix.front()) || prefix.back() == '.') return false;
  return std::all_of(prefix.begin(), prefix.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-' || c == '.';
  });
}

const std::set<Iri> kNoIris;

}  // namespace

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_absolute(value_)) {
    throw std::invalid_argument("not an absolute IRI: '" + value_ + "'");
  }
}

bool Iri::is_absolute(std::string_view value) {
  auto colon = value.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!is_scheme_start(value[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    if (!is_scheme_char(value[i])) return false;
  }
  for (char c : value) {
    auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '\\' || c == '^' || c == '`') {
      return false;
    }
  }
  return true;
}

std::string_view Iri::local_name() const noexcept {
  std::string_view v = value_;
  auto hash = v.rfind('#');
  if (hash != std::string_view::npos) return v.substr(hash + 1);
  auto slash = v.rfind('/');
  if (slash != std::string_view::npos) return v.substr(slash + 1);
  return v.substr(v.find(':') + 1);
}

bool vocab::is_builtin(std::string_view iri) {
  for (auto ns : {kRdf, kRdfs, kOwl, kXsd}) {
    if (iri.starts_with(ns)) return true;
  }
  return false;
}

OntologyError::OntologyError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid ontology";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

UnknownConceptError::UnknownConceptError(const Iri& iri)
    : std::invalid_argument("unknown concept: " + iri.str()) {}

std::string_view to_string(EdgeDirection direction) {
  switch (direction) {
    case EdgeDirection::outgoing: return "outgoing";
    case EdgeDirection::incoming: return "incoming";
    case EdgeDirection::super: return "super";
    case EdgeDirection::sub: return "sub";
  }
  return "?";
}

Ontology::Ontology(std::vector<Concept> concepts, std::vector<Relationship> relationships,
                   std::vector<Attribute> attributes, PrefixMap prefixes)
    : prefixes_(std::move(prefixes)) {
  std::vector<std::string> problems;
  for (auto& c : concepts) {
    Iri key = c.iri;
    if (!concepts_.emplace(key, std::move(c)).second) {
      problems.push_back("duplicate concept " + key.str());
    }
  }
  for (auto& r : relationships) {
    Iri key = r.iri;
    if (!relationships_.emplace(key, std::move(r)).second) {
      problems.push_back("duplicate relationship " + key.str());
    }
  }
  for (auto& a : attributes) {
    Iri key = a.iri;
    if (!attributes_.emplace(key, std::move(a)).second) {
      problems.push_back("duplicate attribute " + key.str());
    }
  }
  if (!problems.empty()) throw OntologyError(std::move(problems));
  validate();
  build_graph();
}

void Ontology::validate() const {
  std::vector<std::string> problems;
  auto check_label = [&](const Iri& iri, const std::optional<std::string>& label) {
    if (label && trim_copy(*label).empty()) problems.push_back("empty label on " + iri.str());
  };
  auto check_refs = [&](const Iri& owner, const std::set<Iri>& refs, std::string_view role) {
    for (const auto& ref : refs) {
      if (!concepts_.contains(ref)) {
        problems.push_back(std::string(role) + " of " + owner.str() + " is not a concept: " +
                           ref.str());
      }
    }
  };
  auto check_not_builtin = [&](const Iri& iri) {
    if (vocab::is_builtin(iri.str())) problems.push_back("built-in IRI used as element: " + iri.str());
  };

  for (const auto& [prefix, _] : prefixes_) {
    if (!is_prefix_name(prefix)) problems.push_back("invalid prefix name '" + prefix + "'");
  }
  for (const auto& [iri, c] : concepts_) {
    check_not_builtin(iri);
    check_label(iri, c.label);
    if (c.superclasses.contains(iri)) problems.push_back("concept is its own superclass: " + iri.str());
    check_refs(iri, c.superclasses, "superclass");
  }
  for (const auto& [iri, r] : relationships_) {
    check_not_builtin(iri);
    check_label(iri, r.label);
    if (concepts_.contains(iri)) problems.push_back("IRI is both concept and relationship: " + iri.str());
    if (r.domains.empty()) problems.push_back("relationship without domain: " + iri.str());
    if (r.ranges.empty()) problems.push_back("relationship without range: " + iri.str());
    check_refs(iri, r.domains, "domain");
    check_refs(iri, r.ranges, "range");
  }
  for (const auto& [iri, a] : attributes_) {
    check_not_builtin(iri);
    check_label(iri, a.label);
    if (concepts_.contains(iri)) problems.push_back("IRI is both concept and attribute: " + iri.str());
    if (relationships_.contains(iri)) {
      problems.push_back("IRI is both relationship and attribute: " + iri.str());
    }
    if (a.domains.empty()) problems.push_back("attribute without domain: " + iri.str());
    check_refs(iri, a.domains, "domain");
    if (!a.datatype.str().starts_with(vocab::kXsd)) {
      problems.push_back("attribute datatype outside xsd: " + a.datatype.str());
    }
  }

  // Superclass cycles: iterative colouring DFS.
  enum class Mark { unvisited, active, done };
  std::map<Iri, Mark> marks;
  for (const auto& [root, _] : concepts_) {
    if (marks[root] != Mark::unvisited) continue;
    using Frame = std::pair<const Iri*, std::set<Iri>::const_iterator>;
    std::vector<Frame> stack;
    marks[root] = Mark::active;
    stack.emplace_back(&root, concepts_.at(root).superclasses.begin());
    while (!stack.empty()) {
      auto& [node, it] = stack.back();
      const auto& supers = concepts_.at(*node).superclasses;
      if (it == supers.end()) {
        marks[*node] = Mark::done;
        stack.pop_back();
        continue;
      }
      const Iri& next = *it++;
      if (!concepts_.contains(next)) continue;
      auto& mark = marks[next];
      if (mark == Mark::active) {
        if (next != *node) problems.push_back("superclass cycle through " + next.str());
      } else if (mark == Mark::unvisited) {
        mark = Mark::active;
        stack.emplace_back(&concepts_.find(next)->first, concepts_.at(next).superclasses.begin());
      }
    }
  }

  if (!problems.empty()) throw OntologyError(std::move(problems));
}

void Ontology::build_graph() {
  for (const auto& [iri, _] : concepts_) neighbors_[iri];
  const Iri subclass_edge{std::string(vocab::kSubClassOf)};
  for (const auto& [iri, c] : concepts_) {
    for (const auto& super : c.superclasses) {
      subclasses_[super].insert(iri);
      neighbors_[iri].push_back({subclass_edge, EdgeDirection::super, super});
      neighbors_[super].push_back({subclass_edge, EdgeDirection::sub, iri});
    }
  }
  for (const auto& [iri, r] : relationships_) {
    for (const auto& d : r.domains) {
      for (const auto& g : r.ranges) {
        neighbors_[d].push_back({iri, EdgeDirection::outgoing, g});
        neighbors_[g].push_back({iri, EdgeDirection::incoming, d});
      }
    }
  }
  for (auto& [_, list] : neighbors_) {
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
      return std::tie(a.edge, a.other, a.direction) < std::tie(b.edge, b.other, b.direction);
    });
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (const auto& [iri, a] : attributes_) {
    for (const auto& d : a.domains) attributes_by_concept_[d].insert(iri);
  }
}

std::optional<ElementKind> Ontology::kind_of(const Iri& iri) const {
  if (concepts_.contains(iri)) return ElementKind::concept_;
  if (relationships_.contains(iri)) return ElementKind::relationship;
  if (attributes_.contains(iri)) return ElementKind::attribute;
  return std::nullopt;
}

const std::set<Iri>& Ontology::subclasses(const Iri& concept_iri) const {
  auto it = subclasses_.find(concept_iri);
  return it == subclasses_.end() ? kNoIris : it->second;
}

const std::vector<Neighbor>& Ontology::neighbors(const Iri& concept_iri) const {
  auto it = neighbors_.find(concept_iri);
  if (it == neighbors_.end()) throw UnknownConceptError(concept_iri);
  return it->second;
}

const std::set<Iri>& Ontology::attributes_of(const Iri& concept_iri) const {
  auto it = attributes_by_concept_.find(concept_iri);
  return it == attributes_by_concept_.end() ? kNoIris : it->second;
}

bool Ontology::operator==(const Ontology& other) const {
  return concepts_ == other.concepts_ && relationships_ == other.relationships_ &&
         attributes_ == other.attributes_ && prefixes_ == other.prefixes_;
}

std::size_t axiom_count(const Ontology& ontology) {
  std::size_t count = 0;
  auto annotations = [](const auto& element) {
    return std::size_t{1} + (element.label ? 1 : 0) + (element.comment ? 1 : 0);
  };
  for (const auto& [_, c] : ontology.concepts()) count += annotations(c) + c.superclasses.size();
  for (const auto& [_, r] : ontology.relationships()) {
    count += annotations(r) + r.domains.size() + r.ranges.size();
  }
  for (const auto& [_, a] : ontology.attributes()) count += annotations(a) + a.domains.size() + 1;
  return count;
}

std::string canonicalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (char c : name) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string split_identifier(std::string_view identifier) {
  auto is_upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  auto is_lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  std::string spaced;
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    char c = identifier[i];
    if (c == '_' || c == '-') {
      spaced.push_back(' ');
      continue;
    }
    if (i > 0 && is_upper(c)) {
      char prev = identifier[i - 1];
      bool next_lower = i + 1 < identifier.size() && is_lower(identifier[i + 1]);
      // "hasPlan" -> "has Plan"; "HTTPServer" -> "HTTP Server"
      if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower)) spaced.push_back(' ');
    }
    spaced.push_back(c);
  }
  return canonicalize_name(spaced);
}

std::string display_name(const Iri& iri, const std::optional<std::string>& label) {
  if (label) return trim_copy(*label);
  return split_identifier(iri.local_name());
}

std::set<Iri> NameIndex::resolve(std::string_view name) const {
  auto it = entries_.find(canonicalize_name(name));
  return it == entries_.end() ? std::set<Iri>{} : it->second;
}

NameIndex build_index(const Ontology& ontology) {
  NameIndex::Entries entries;
  auto add = [&](const Iri& iri, const std::optional<std::string>& label) {
    auto insert = [&](std::string key) {
      if (!key.empty()) entries[std::move(key)].insert(iri);
    };
    if (label) insert(canonicalize_name(*label));
    insert(canonicalize_name(iri.local_name()));
    insert(split_identifier(iri.local_name()));
  };
  for (const auto& [iri, c] : ontology.concepts()) add(iri, c.label);
  for (const auto& [iri, r] : ontology.relationships()) add(iri, r.label);
  for (const auto& [iri, a] : ontology.attributes()) add(iri, a.label);
  return NameIndex(std::move(entries));
}

}  // namespace ontoreveal
