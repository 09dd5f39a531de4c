#include "ontoreveal/synthgen.hpp"

#include <array>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "ontoreveal/turtle.hpp"

namespace ontoreveal {

std::string_view toy_ontology_turtle_source();  // generated from data/toy_telecom.ttl

namespace {

constexpr std::size_t kMaxElements = 100000;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = 0;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T, std::size_t N>
  const T& pick(const std::array<T, N>& items) {
    return items[below(N)];
  }

 private:
  std::mt19937_64 engine_;
};

constexpr std::array<std::string_view, 18> kOnsets = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                                      "r", "s", "t", "v", "z", "br", "tr", "st", "gr"};
constexpr std::array<std::string_view, 6> kNuclei = {"a", "e", "i", "o", "u", "ai"};
constexpr std::array<std::string_view, 8> kCodas = {"", "", "", "n", "r", "l", "s", "x"};

constexpr std::array<std::string_view, 16> kVerbs = {
    "has",    "owns",   "uses",     "manages",  "serves", "contains", "references", "supplies",
    "tracks", "covers", "requires", "produces", "governs", "feeds",   "hosts",      "bills"};

struct Measure {
  std::string_view noun;
  std::string_view datatype;
};

constexpr std::array<Measure, 10> kMeasures = {{
    {"code", "string"},
    {"name", "string"},
    {"status", "string"},
    {"date", "date"},
    {"timestamp", "dateTime"},
    {"amount", "decimal"},
    {"rate", "decimal"},
    {"count", "integer"},
    {"score", "integer"},
    {"flag", "boolean"},
}};

constexpr std::array<std::string_view, 8> kAreas = {"billing",   "network", "sales",    "support",
                                                    "logistics", "finance", "planning", "operations"};

std::string capitalize(std::string word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 'a' + 'A');
  return word;
}

class Namer {
 public:
  explicit Namer(Rng& rng) : rng_(rng) {}

  /// A fresh lowercase pseudo-word; grows longer if short ones keep colliding.
  std::string word() {
    for (std::size_t attempt = 0;; ++attempt) {
      std::size_t syllables = 2 + attempt / 16;
      std::string w;
      for (std::size_t i = 0; i < syllables; ++i) {
        w += rng_.pick(kOnsets);
        w += rng_.pick(kNuclei);
        if (i + 1 == syllables) w += rng_.pick(kCodas);
      }
      if (words_.insert(w).second) return w;
    }
  }

  /// Claims a local name; false when taken.
  bool claim(const std::string& local) { return locals_.insert(local).second; }

 private:
  Rng& rng_;
  std::set<std::string> words_;
  std::set<std::string> locals_;
};

Iri synth_iri(const std::string& local) { return Iri(std::string(kSynthNamespace) + local); }

std::string article(std::string_view word) {
  return std::string_view("aeiouAEIOU").find(word.front()) != std::string_view::npos ? "an" : "a";
}

}  // namespace

void validate_spec(const GenSpec& s) {
  const std::size_t k = s.connectivity.components;
  if (k == 0) throw InvalidSpecError("connectivity needs at least one component");
  if (s.n_concepts > kMaxElements || s.n_relationships > kMaxElements || s.n_attributes > kMaxElements) {
    throw InvalidSpecError("element counts are limited to " + std::to_string(kMaxElements));
  }
  if (s.n_concepts == 0) {
    if (s.n_relationships > 0 || s.n_attributes > 0) {
      throw InvalidSpecError("relationships and attributes need at least one concept");
    }
    if (s.hierarchy_depth > 0) throw InvalidSpecError("a hierarchy needs concepts");
    if (k > 1) throw InvalidSpecError("cannot split zero concepts into components");
    return;
  }
  if (k > s.n_concepts) throw InvalidSpecError("more components than concepts");
  if (s.n_relationships + k < s.n_concepts) {
    throw InvalidSpecError(k == 1 ? "connected spec needs n_relationships >= n_concepts - 1"
                                  : "split spec needs n_relationships >= n_concepts - components");
  }
  const std::size_t first_group = (s.n_concepts + k - 1) / k;
  if (s.hierarchy_depth + 1 > first_group) {
    throw InvalidSpecError("hierarchy depth " + std::to_string(s.hierarchy_depth) + " needs at least " +
                           std::to_string(s.hierarchy_depth + 1) + " concepts in one component");
  }
}

Ontology generate(const GenSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);
  Namer namer(rng);
  const std::size_t n = spec.n_concepts;
  const std::size_t k = spec.connectivity.components;

  std::vector<std::vector<std::size_t>> groups(k);
  for (std::size_t i = 0; i < n; ++i) groups[i % k].push_back(i);

  // Concepts and the superclass forest.
  std::vector<std::string> concept_words(n);
  std::vector<Concept> concepts;
  concepts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string local;
    do {
      concept_words[i] = namer.word();
      local = capitalize(concept_words[i]);
    } while (!namer.claim(local));
    std::string comment =
        capitalize(article(local)) + " " + local + " record kept by the " + std::string(rng.pick(kAreas)) + " area.";
    concepts.push_back(Concept{synth_iri(local), local, std::move(comment), {}});
  }
  for (std::size_t g = 0; g < k; ++g) {
    const auto& members = groups[g];
    std::vector<std::size_t> level(members.size(), 0);
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (g == 0 && j <= spec.hierarchy_depth) {
        level[j] = j;
        if (j > 0) concepts[members[j]].superclasses.insert(concepts[members[j - 1]].iri);
        continue;
      }
      if (spec.hierarchy_depth == 0) continue;
      std::size_t wanted = rng.below(spec.hierarchy_depth + 1);
      if (wanted == 0) continue;
      std::vector<std::size_t> parents;
      for (std::size_t p = 0; p < j; ++p) {
        if (level[p] == wanted - 1) parents.push_back(p);
      }
      if (parents.empty()) continue;
      std::size_t parent = parents[rng.below(parents.size())];
      level[j] = wanted;
      concepts[members[j]].superclasses.insert(concepts[members[parent]].iri);
    }
  }

  // Relationships: spanning trees first, then random pairs within a group.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& members : groups) {
    std::vector<std::size_t> order = members;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t i = 1; i < order.size(); ++i) {
      std::size_t other = order[rng.below(i)];
      if (rng.below(2) == 0) {
        pairs.emplace_back(order[i], other);
      } else {
        pairs.emplace_back(other, order[i]);
      }
    }
  }
  while (pairs.size() < spec.n_relationships) {
    const auto& members = groups[rng.below(k)];
    std::size_t a = members[rng.below(members.size())];
    std::size_t b = members[rng.below(members.size())];
    if (a == b && members.size() > 1) continue;
    pairs.emplace_back(a, b);
  }

  std::vector<Relationship> relationships;
  relationships.reserve(spec.n_relationships);
  for (std::size_t r = 0; r < spec.n_relationships; ++r) {
    auto [from, to] = pairs[r];
    std::string verb;
    std::string object;
    std::string local;
    do {
      verb = std::string(rng.pick(kVerbs));
      object = namer.word();
      local = verb + capitalize(object);
    } while (!namer.claim(local));
    const std::string& d = *concepts[from].label;
    const std::string& g = *concepts[to].label;
    relationships.push_back(Relationship{synth_iri(local),
                                         verb + " " + object,
                                         "Relates " + article(d) + " " + d + " to the " + g + " it " + verb + ".",
                                         {concepts[from].iri},
                                         {concepts[to].iri}});
  }

  std::vector<Attribute> attributes;
  attributes.reserve(spec.n_attributes);
  for (std::size_t a = 0; a < spec.n_attributes; ++a) {
    std::size_t owner = rng.below(n);
    const Measure& m = rng.pick(kMeasures);
    std::string word;
    std::string local;
    do {
      word = namer.word();
      local = word + capitalize(std::string(m.noun));
    } while (!namer.claim(local));
    std::string label = word + " " + std::string(m.noun);
    attributes.push_back(Attribute{synth_iri(local),
                                   label,
                                   "The " + label + " recorded for each " + *concepts[owner].label + ".",
                                   {concepts[owner].iri},
                                   Iri("http://www.w3.org/2001/XMLSchema#" + std::string(m.datatype))});
  }

  Ontology::PrefixMap prefixes = {
      {std::string(kSynthPrefix), Iri(std::string(kSynthNamespace))},
      {"owl", Iri("http://www.w3.org/2002/07/owl#")},
      {"rdf", Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#")},
      {"rdfs", Iri("http://www.w3.org/2000/01/rdf-schema#")},
      {"xsd", Iri("http://www.w3.org/2001/XMLSchema#")},
  };
  return Ontology(std::move(concepts), std::move(relationships), std::move(attributes), std::move(prefixes));
}

std::string_view toy_ontology_turtle() { return toy_ontology_turtle_source(); }

const Ontology& toy_ontology() {
  static const Ontology toy = [] {
    auto parsed = parse_turtle(toy_ontology_turtle_source());
    if (!parsed.ok()) throw std::logic_error("bundled toy ontology does not parse");
    return std::move(*parsed.ontology);
  }();
  return toy;
}

}  // namespace ontoreveal
