#include <gtest/gtest.h>

#include "ontoreveal/pathfinder.hpp"
#include "ontoreveal/slicer.hpp"
#include "ontoreveal/synthgen.hpp"
#include "support.hpp"

using namespace ontoreveal;
using testsupport::ex;

namespace {

const Iri kDecimal{"http://www.w3.org/2001/XMLSchema#decimal"};

// Product <- Plan (subclass), Customer -hasPlan-> Plan, Plan.fee, Product.sku, Customer.name
Ontology shop() {
  return Ontology({{ex("Product"), std::nullopt, std::nullopt, {}},
                   {ex("Plan"), std::nullopt, std::nullopt, {ex("Product")}},
                   {ex("Bundle"), std::nullopt, std::nullopt, {ex("Product")}},
                   {ex("Customer"), std::nullopt, std::nullopt, {}}},
                  {{ex("hasPlan"), std::nullopt, std::nullopt, {ex("Customer")}, {ex("Plan")}}},
                  {{ex("fee"), std::nullopt, std::nullopt, {ex("Plan")}, kDecimal},
                   {ex("sku"), std::nullopt, std::nullopt, {ex("Product")}, kDecimal},
                   {ex("name"), std::nullopt, std::nullopt, {ex("Customer")}, kDecimal}});
}

}  // namespace

TEST(SeedSlice, ConceptPullsSuperclassesAndAttributesOnly) {
  auto s = seed_slice(shop(), {ex("Plan")});
  EXPECT_EQ(s.concepts, (std::set<Iri>{ex("Plan"), ex("Product")}));
  EXPECT_EQ(s.attributes, (std::set<Iri>{ex("fee"), ex("sku")}));
  EXPECT_TRUE(s.relationships.empty());
  EXPECT_FALSE(s.contains(ex("Bundle")));
}

TEST(SeedSlice, RelationshipPullsEndpoints) {
  auto s = seed_slice(shop(), {ex("hasPlan")});
  EXPECT_EQ(s.concepts, (std::set<Iri>{ex("Customer"), ex("Plan"), ex("Product")}));
  EXPECT_EQ(s.relationships, std::set<Iri>{ex("hasPlan")});
  EXPECT_EQ(s.attributes, (std::set<Iri>{ex("fee"), ex("name"), ex("sku")}));
}

TEST(SeedSlice, AttributePullsDomain) {
  auto s = seed_slice(shop(), {ex("name")});
  EXPECT_EQ(s.concepts, std::set<Iri>{ex("Customer")});
  EXPECT_EQ(s.attributes, std::set<Iri>{ex("name")});
}

TEST(SeedSlice, EmptyAndUnknown) {
  EXPECT_TRUE(seed_slice(shop(), {}).empty());
  try {
    seed_slice(shop(), {ex("Plan"), ex("Nope"), ex("Zilch")});
    FAIL();
  } catch (const UnknownIriError& e) {
    EXPECT_EQ(e.unknown(), (std::vector<Iri>{ex("Nope"), ex("Zilch")}));
  }
}

TEST(SliceValidity, DetectsOpenAndForeignSlices) {
  auto o = shop();
  EXPECT_TRUE(is_valid_slice(o, seed_slice(o, {ex("Plan")})));
  Slice open;
  open.concepts.insert(ex("Plan"));
  EXPECT_FALSE(is_valid_slice(o, open));
  EXPECT_THROW(require_valid_slice(o, open), InvalidSliceError);
  Slice wrong_kind;
  wrong_kind.concepts.insert(ex("fee"));
  EXPECT_FALSE(is_valid_slice(o, wrong_kind));
  EXPECT_TRUE(is_valid_slice(o, full_slice(o)));
  EXPECT_TRUE(is_valid_slice(o, Slice{}));
}

TEST(ExpandSlice, AddsPathEdgesAndConcepts) {
  auto o = shop();
  auto s = seed_slice(o, {ex("Customer")});
  auto path = find_path(o, ex("Customer"), ex("Bundle"));
  ASSERT_TRUE(path);
  auto bigger = expand_slice(o, s, {}, {*path});
  EXPECT_TRUE(bigger.includes(s));
  EXPECT_TRUE(bigger.contains(ex("hasPlan")));
  EXPECT_TRUE(bigger.contains(ex("Bundle")));
  EXPECT_TRUE(is_valid_slice(o, bigger));
}

TEST(ExpandSlice, RejectsUnknownAdditions) {
  auto o = shop();
  EXPECT_THROW(expand_slice(o, Slice{}, {ex("Ghost")}, {}), UnknownIriError);
}

TEST(InduceSubontology, KeepsOnlySliceElements) {
  auto o = shop();
  auto s = seed_slice(o, {ex("hasPlan")});
  auto sub = induce_subontology(o, s);
  EXPECT_EQ(sub.element_count(), s.size());
  EXPECT_FALSE(sub.contains(ex("Bundle")));
  EXPECT_EQ(sub.prefixes(), o.prefixes());
  EXPECT_THROW(induce_subontology(o, Slice{{ex("Plan")}, {}, {}}), InvalidSliceError);
}

TEST(SliceProperty, SeedMatchesRescanOracle) {
  testsupport::Rng rng(2024);
  for (int round = 0; round < 300; ++round) {
    auto o = testsupport::random_ontology(rng);
    auto grounded = testsupport::random_elements(rng, o, 20);
    auto expected = testsupport::closure_oracle(o, grounded);
    auto actual = seed_slice(o, grounded);
    ASSERT_EQ(actual, expected) << "round " << round;
    ASSERT_TRUE(is_valid_slice(o, actual));
    // Closure is idempotent and the induced sub-ontology is self-contained.
    ASSERT_EQ(close_slice(o, actual), actual);
    ASSERT_NO_THROW(induce_subontology(o, actual));
  }
}

TEST(SliceProperty, ExpansionIsMonotoneAndMatchesOracle) {
  testsupport::Rng rng(77);
  for (int round = 0; round < 100; ++round) {
    auto o = testsupport::random_ontology(rng);
    auto elements = testsupport::random_elements(rng, o, 10);
    Slice s = seed_slice(o, elements);
    for (int step = 0; step < 6; ++step) {
      auto additions = testsupport::random_elements(rng, o, 10);
      std::vector<Path> paths;
      auto concepts = std::vector<Iri>();
      for (const auto& [iri, _] : o.concepts()) concepts.push_back(iri);
      auto from = concepts[rng.below(concepts.size())];
      auto to = concepts[rng.below(concepts.size())];
      if (auto p = find_path(o, from, to)) paths.push_back(*p);

      auto next = expand_slice(o, s, additions, paths);
      ASSERT_TRUE(next.includes(s));
      std::set<Iri> all = s.elements();
      all.insert(additions.begin(), additions.end());
      for (const auto& p : paths) {
        all.insert(p.origin);
        for (const auto& st : p.steps) {
          all.insert(st.to);
          if (st.edge.str() != vocab::kSubClassOf) all.insert(st.edge);
        }
      }
      ASSERT_EQ(next, testsupport::closure_oracle(o, all));
      elements = std::move(all);
      s = std::move(next);
    }
  }
}
