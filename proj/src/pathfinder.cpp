#include "ontoreveal/pathfinder.hpp"

#include <deque>
#include <map>
#include <tuple>

#include "ontoreveal/llm.hpp"

namespace ontoreveal {

namespace {

// Hop distance to `target` for every concept within `limit` hops.
std::map<Iri, int> distances_to(const Ontology& ontology, const Iri& target, int limit) {
  std::map<Iri, int> dist{{target, 0}};
  std::deque<Iri> queue{target};
  while (!queue.empty()) {
    Iri current = queue.front();
    queue.pop_front();
    int d = dist.at(current);
    if (d >= limit) continue;
    for (const auto& n : ontology.neighbors(current)) {
      if (dist.emplace(n.other, d + 1).second) queue.push_back(n.other);
    }
  }
  return dist;
}

bool is_lexicographically_smaller(const Path& a, const Path& b) {
  for (std::size_t i = 0; i < std::min(a.steps.size(), b.steps.size()); ++i) {
    const auto& x = a.steps[i];
    const auto& y = b.steps[i];
    if (std::tie(x.edge, x.to, x.direction) != std::tie(y.edge, y.to, y.direction)) {
      return std::tie(x.edge, x.to, x.direction) < std::tie(y.edge, y.to, y.direction);
    }
  }
  return a.steps.size() < b.steps.size();
}

std::size_t new_elements(const Path& path, const Slice& slice) {
  std::size_t count = slice.concepts.contains(path.origin) ? 0 : 1;
  for (const auto& step : path.steps) {
    if (!slice.concepts.contains(step.to)) ++count;
    if (step.edge.str() != vocab::kSubClassOf && !slice.relationships.contains(step.edge)) ++count;
  }
  return count;
}

std::set<Iri> concept_candidates(const Ontology& ontology, const NameIndex& index, const std::string& name) {
  std::set<Iri> out;
  for (const auto& iri : index.resolve(name)) {
    if (ontology.is_concept(iri)) out.insert(iri);
  }
  return out;
}

}  // namespace

bool is_valid_path(const Ontology& ontology, const Path& path) {
  if (!ontology.is_concept(path.origin)) return false;
  std::set<Iri> visited{path.origin};
  const Iri* at = &path.origin;
  for (const auto& step : path.steps) {
    if (step.from != *at || !ontology.is_concept(step.to)) return false;
    const auto& edges = ontology.neighbors(step.from);
    Neighbor wanted{step.edge, step.direction, step.to};
    if (std::find(edges.begin(), edges.end(), wanted) == edges.end()) return false;
    if (!visited.insert(step.to).second) return false;
    at = &step.to;
  }
  return true;
}

std::optional<Path> find_path(const Ontology& ontology, const Iri& source, const Iri& target, int max_hops) {
  if (!ontology.is_concept(source)) throw UnknownConceptError(source);
  if (!ontology.is_concept(target)) throw UnknownConceptError(target);
  if (max_hops < 0) return std::nullopt;

  auto dist = distances_to(ontology, target, max_hops);
  auto start = dist.find(source);
  if (start == dist.end()) return std::nullopt;

  // Every neighbour one hop closer to the target extends some shortest path,
  // so taking the smallest (edge, to, direction) at each hop yields the
  // lexicographically smallest shortest path.
  Path path{source, {}};
  Iri current = source;
  for (int remaining = start->second; remaining > 0; --remaining) {
    for (const auto& n : ontology.neighbors(current)) {
      auto it = dist.find(n.other);
      if (it != dist.end() && it->second == remaining - 1) {
        path.steps.push_back({current, n.edge, n.direction, n.other});
        current = n.other;
        break;
      }
    }
  }
  return path;
}

Resolution resolve_missing(const Ontology& ontology, const NameIndex& index, const Slice& slice,
                           const MissingReport& report, int max_hops) {
  Resolution out;
  for (const auto& name : report.missing_concepts) {
    auto found = index.resolve(name);
    if (found.empty()) {
      out.unresolved.push_back(name);
    } else {
      out.additions.insert(found.begin(), found.end());
    }
  }
  for (const auto& link : report.missing_links) {
    auto from = concept_candidates(ontology, index, link.from);
    auto to = concept_candidates(ontology, index, link.to);
    std::optional<Path> best;
    for (const auto& a : from) {
      for (const auto& b : to) {
        auto candidate = find_path(ontology, a, b, max_hops);
        if (!candidate) continue;
        // Shortest first, then the one adding the fewest new elements, then
        // the lexicographic order used by find_path.
        if (!best || candidate->length() < best->length() ||
            (candidate->length() == best->length() &&
             (new_elements(*candidate, slice) < new_elements(*best, slice) ||
              (new_elements(*candidate, slice) == new_elements(*best, slice) &&
               is_lexicographically_smaller(*candidate, *best))))) {
          best = std::move(candidate);
        }
      }
    }
    if (best) {
      if (std::find(out.paths.begin(), out.paths.end(), *best) == out.paths.end()) {
        out.paths.push_back(std::move(*best));
      }
    } else {
      out.unresolved.push_back(link.from + " -> " + link.to);
    }
  }
  return out;
}

std::string describe_path(const Path& path) {
  std::string out(path.origin.local_name());
  if (path.steps.empty()) return "(empty path at " + out + ")";
  for (const auto& step : path.steps) {
    std::string edge = step.edge.str() == vocab::kSubClassOf ? "subClassOf" : std::string(step.edge.local_name());
    switch (step.direction) {
      case EdgeDirection::outgoing:
      case EdgeDirection::super: out += " -" + edge + "-> "; break;
      case EdgeDirection::incoming:
      case EdgeDirection::sub: out += " <-" + edge + "- "; break;
    }
    out += step.to.local_name();
  }
  return out;
}

}  // namespace ontoreveal
