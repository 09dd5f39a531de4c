#include "support.hpp"

#include <deque>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

namespace testsupport {

using namespace ontoreveal;

std::filesystem::path data_dir() { return ONTOREVEAL_DATA_DIR; }
std::filesystem::path golden_dir() { return ONTOREVEAL_TEST_GOLDEN_DIR; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Iri ex(const std::string& local) { return Iri("http://example.org/t#" + local); }

Ontology random_ontology(Rng& rng, const RandomOntologyOptions& opt) {
  const std::size_t n_concepts = rng.between(1, std::min(opt.max_concepts, opt.max_elements));
  std::size_t budget = opt.max_elements - n_concepts;
  std::size_t min_rel = opt.connected ? n_concepts - 1 : 0;
  if (min_rel > budget) min_rel = budget;
  const std::size_t n_rel = rng.between(min_rel, budget);
  budget -= n_rel;
  const std::size_t n_attr = rng.between(0, std::min<std::size_t>(budget, 6));

  auto concept_iri = [](std::size_t i) { return ex("C" + std::to_string(i)); };
  auto pick_concepts = [&](std::size_t count) {
    std::set<Iri> out;
    while (out.size() < count) out.insert(concept_iri(rng.below(n_concepts)));
    return out;
  };
  auto endpoint_count = [&] {
    return rng.chance(opt.multi_endpoint_percent) ? std::min<std::size_t>(n_concepts, 2) : 1;
  };

  std::vector<Concept> concepts;
  for (std::size_t i = 0; i < n_concepts; ++i) {
    Concept c{concept_iri(i), std::nullopt, std::nullopt, {}};
    if (rng.chance(70)) c.label = "Concept " + std::to_string(i);
    // Superclasses always point at lower indices, which keeps the hierarchy acyclic.
    if (i > 0 && rng.chance(opt.superclass_percent)) {
      c.superclasses.insert(concept_iri(rng.below(i)));
      if (i > 1 && rng.chance(20)) c.superclasses.insert(concept_iri(rng.below(i)));
    }
    concepts.push_back(std::move(c));
  }

  std::vector<Relationship> relationships;
  std::vector<std::size_t> order(n_concepts);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  for (std::size_t r = 0; r < n_rel; ++r) {
    Relationship rel{ex("r" + std::to_string(r)), std::nullopt, std::nullopt, {}, {}};
    if (opt.connected && r + 1 < n_concepts) {
      std::size_t a = order[r + 1];
      std::size_t b = order[rng.below(r + 1)];
      if (rng.chance(50)) std::swap(a, b);
      rel.domains.insert(concept_iri(a));
      rel.ranges.insert(concept_iri(b));
    } else {
      rel.domains = pick_concepts(endpoint_count());
      rel.ranges = pick_concepts(endpoint_count());
    }
    if (rng.chance(50)) rel.label = "rel " + std::to_string(r);
    relationships.push_back(std::move(rel));
  }

  std::vector<Attribute> attributes;
  for (std::size_t a = 0; a < n_attr; ++a) {
    attributes.push_back(Attribute{ex("a" + std::to_string(a)), std::nullopt, std::nullopt, pick_concepts(endpoint_count()),
                                   Iri("http://www.w3.org/2001/XMLSchema#string")});
  }
  return Ontology(std::move(concepts), std::move(relationships), std::move(attributes),
                  {{"ex", Iri("http://example.org/t#")}});
}

std::set<Iri> random_elements(Rng& rng, const Ontology& o, unsigned percent) {
  std::set<Iri> out;
  for (const auto& [iri, _] : o.concepts()) {
    if (rng.chance(percent)) out.insert(iri);
  }
  for (const auto& [iri, _] : o.relationships()) {
    if (rng.chance(percent)) out.insert(iri);
  }
  for (const auto& [iri, _] : o.attributes()) {
    if (rng.chance(percent)) out.insert(iri);
  }
  return out;
}

Slice closure_oracle(const Ontology& o, const std::set<Iri>& elements) {
  Slice s;
  for (const auto& iri : elements) {
    if (o.concepts().contains(iri)) s.concepts.insert(iri);
    if (o.relationships().contains(iri)) s.relationships.insert(iri);
    if (o.attributes().contains(iri)) s.attributes.insert(iri);
  }
  bool changed = true;
  while (changed) {
    Slice before = s;
    for (const auto& [iri, rel] : o.relationships()) {
      if (!s.relationships.contains(iri)) continue;
      s.concepts.insert(rel.domains.begin(), rel.domains.end());
      s.concepts.insert(rel.ranges.begin(), rel.ranges.end());
    }
    for (const auto& [iri, attr] : o.attributes()) {
      if (s.attributes.contains(iri)) s.concepts.insert(attr.domains.begin(), attr.domains.end());
      for (const auto& d : attr.domains) {
        if (s.concepts.contains(d)) s.attributes.insert(iri);
      }
    }
    for (const auto& [iri, c] : o.concepts()) {
      if (s.concepts.contains(iri)) s.concepts.insert(c.superclasses.begin(), c.superclasses.end());
    }
    changed = !(s == before);
  }
  return s;
}

std::map<Iri, std::set<Iri>> undirected_edges(const Ontology& o) {
  std::map<Iri, std::set<Iri>> adj;
  for (const auto& [iri, _] : o.concepts()) adj[iri];
  for (const auto& [_, rel] : o.relationships()) {
    for (const auto& d : rel.domains) {
      for (const auto& r : rel.ranges) {
        adj[d].insert(r);
        adj[r].insert(d);
      }
    }
  }
  for (const auto& [iri, c] : o.concepts()) {
    for (const auto& s : c.superclasses) {
      adj[iri].insert(s);
      adj[s].insert(iri);
    }
  }
  return adj;
}

std::optional<int> bfs_distance(const Ontology& o, const Iri& from, const Iri& to) {
  auto adj = undirected_edges(o);
  std::map<Iri, int> dist{{from, 0}};
  std::deque<Iri> queue{from};
  while (!queue.empty()) {
    Iri at = queue.front();
    queue.pop_front();
    if (at == to) return dist.at(at);
    for (const auto& next : adj[at]) {
      if (dist.emplace(next, dist.at(at) + 1).second) queue.push_back(next);
    }
  }
  return std::nullopt;
}

namespace {

std::vector<StepKey> raw_steps(const Ontology& o, const Iri& at) {
  std::vector<StepKey> out;
  const Iri sub_class_of{std::string(vocab::kSubClassOf)};
  for (const auto& [iri, rel] : o.relationships()) {
    if (rel.domains.contains(at)) {
      for (const auto& r : rel.ranges) out.emplace_back(iri, r, EdgeDirection::outgoing);
    }
    if (rel.ranges.contains(at)) {
      for (const auto& d : rel.domains) out.emplace_back(iri, d, EdgeDirection::incoming);
    }
  }
  for (const auto& s : o.concepts().at(at).superclasses) out.emplace_back(sub_class_of, s, EdgeDirection::super);
  for (const auto& [iri, c] : o.concepts()) {
    if (c.superclasses.contains(at)) out.emplace_back(sub_class_of, iri, EdgeDirection::sub);
  }
  return out;
}

}  // namespace

std::vector<std::vector<StepKey>> all_shortest_paths(const Ontology& o, const Iri& from, const Iri& to) {
  auto distance = bfs_distance(o, from, to);
  std::vector<std::vector<StepKey>> out;
  if (!distance) return out;
  std::vector<StepKey> current;
  std::set<Iri> visited{from};
  std::function<void(const Iri&)> walk = [&](const Iri& at) {
    if (static_cast<int>(current.size()) == *distance) {
      if (at == to) out.push_back(current);
      return;
    }
    for (const auto& step : raw_steps(o, at)) {
      const Iri& next = std::get<1>(step);
      if (visited.contains(next)) continue;
      visited.insert(next);
      current.push_back(step);
      walk(next);
      current.pop_back();
      visited.erase(next);
    }
  };
  walk(from);
  return out;
}

std::vector<StepKey> keys_of(const Path& path) {
  std::vector<StepKey> out;
  for (const auto& s : path.steps) out.emplace_back(s.edge, s.to, s.direction);
  return out;
}

std::size_t component_count(const Ontology& o) {
  std::map<Iri, Iri> parent;
  for (const auto& [iri, _] : o.concepts()) parent.emplace(iri, iri);
  std::function<Iri(const Iri&)> find = [&](const Iri& x) -> Iri {
    Iri p = parent.at(x);
    if (p == x) return x;
    Iri root = find(p);
    parent.insert_or_assign(x, root);
    return root;
  };
  auto unite = [&](const Iri& a, const Iri& b) {
    Iri ra = find(a), rb = find(b);
    if (ra != rb) parent.insert_or_assign(ra, rb);
  };
  for (const auto& [_, rel] : o.relationships()) {
    for (const auto& d : rel.domains) {
      for (const auto& r : rel.ranges) unite(d, r);
    }
  }
  for (const auto& [iri, c] : o.concepts()) {
    for (const auto& s : c.superclasses) unite(iri, s);
  }
  std::set<Iri> roots;
  for (const auto& [iri, _] : o.concepts()) roots.insert(find(iri));
  return roots.size();
}

}  // namespace testsupport
