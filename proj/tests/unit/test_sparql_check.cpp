#include <gtest/gtest.h>

#include "conformance_corpus.hpp"
#include "ontoreveal/slicer.hpp"
#include "ontoreveal/sparql_check.hpp"
#include "ontoreveal/synthgen.hpp"
#include "support.hpp"

using namespace ontoreveal;

namespace {

const std::string kTel = "http://example.org/telecom#";
Iri tel(const std::string& local) { return Iri(kTel + local); }

SparqlSkeleton skeleton_of(std::string_view query) {
  auto r = extract_skeleton(query);
  if (auto* v = std::get_if<std::vector<ConformanceViolation>>(&r)) {
    ADD_FAILURE() << "unexpected violation: " << format_violation(v->front());
    return {};
  }
  return std::get<SparqlSkeleton>(r);
}

std::vector<ConformanceViolation> violations_of(std::string_view query) {
  auto r = extract_skeleton(query);
  if (auto* v = std::get_if<std::vector<ConformanceViolation>>(&r)) return *v;
  return {};
}

Slice slice_for(const std::vector<std::string>& seeds) {
  std::set<Iri> iris;
  for (const auto& s : seeds) iris.insert(tel(s));
  return seed_slice(toy_ontology(), iris);
}

}  // namespace

TEST(Skeleton, ClassesPredicatesVariables) {
  auto s = skeleton_of(
      "PREFIX tel: <http://example.org/telecom#>\n"
      "SELECT ?name WHERE { ?c a tel:Customer ; tel:customerName ?name ; tel:hasPlan ?p . }");
  EXPECT_EQ(s.class_iris, std::set<Iri>{tel("Customer")});
  EXPECT_EQ(s.predicate_iris, (std::set<Iri>{tel("customerName"), tel("hasPlan")}));
  EXPECT_EQ(s.variables, (std::set<std::string>{"c", "name", "p"}));
  EXPECT_TRUE(s.features.empty());
  EXPECT_EQ(s.prefix_decls.at("tel"), Iri(kTel));
  EXPECT_EQ(s.occurrences.at(tel("Customer")).location, (SourceLocation{2, 27}));
  EXPECT_EQ(s.occurrences.at(tel("Customer")).text, "tel:Customer");
}

TEST(Skeleton, BuiltinsAreExcluded) {
  auto s = skeleton_of(
      "PREFIX tel: <http://example.org/telecom#>\n"
      "SELECT ?x WHERE { ?x rdf:type tel:Region ; rdfs:label ?l ; owl:sameAs ?y }");
  EXPECT_EQ(s.class_iris, std::set<Iri>{tel("Region")});
  EXPECT_TRUE(s.predicate_iris.empty());
}

TEST(Skeleton, TypeWithVariableObjectIsNoClass) {
  auto s = skeleton_of("SELECT ?x ?t WHERE { ?x a ?t }");
  EXPECT_TRUE(s.class_iris.empty());
  EXPECT_TRUE(s.predicate_iris.empty());
}

TEST(Skeleton, Features) {
  auto s = skeleton_of(
      "PREFIX tel: <http://example.org/telecom#>\n"
      "SELECT ?r (SUM(?a) AS ?total) (COUNT(*) AS ?n) WHERE {\n"
      "  { ?i tel:invoiceAmount ?a } UNION { ?i tel:paymentAmount ?a }\n"
      "  OPTIONAL { ?i ^tel:billedBy/tel:planName ?pn }\n"
      "  FILTER(?a > 0)\n"
      "  { SELECT ?i ?r WHERE { ?i tel:issueDate ?r } }\n"
      "} GROUP BY ?r HAVING(SUM(?a) > 10) ORDER BY ?r");
  std::set<QueryFeature> want = {QueryFeature::union_,        QueryFeature::optional,        QueryFeature::filter,
                                 QueryFeature::group_by,      QueryFeature::having,          QueryFeature::order_by,
                                 QueryFeature::subquery,      QueryFeature::property_path,   QueryFeature::aggregate_sum,
                                 QueryFeature::aggregate_count};
  EXPECT_EQ(s.features, want);
  EXPECT_TRUE(s.predicate_iris.contains(tel("billedBy")));
  EXPECT_TRUE(s.predicate_iris.contains(tel("issueDate")));
}

TEST(Skeleton, FeatureNames) {
  EXPECT_EQ(to_string(QueryFeature::union_), "union");
  EXPECT_EQ(to_string(QueryFeature::group_by), "group-by");
  EXPECT_EQ(to_string(QueryFeature::aggregate_avg), "aggregate-avg");
  EXPECT_EQ(to_string(QueryFeature::property_path), "property-path");
}

TEST(Skeleton, BaseResolvesRelativeIris) {
  auto s = skeleton_of("BASE <http://example.org/telecom>\nSELECT ?x WHERE { ?x a <#Customer> }");
  EXPECT_EQ(s.class_iris, std::set<Iri>{tel("Customer")});
  // Relative references replace the fragment-bearing last segment.
  s = skeleton_of("BASE <http://example.org/telecom#>\nSELECT ?x WHERE { ?x a <Customer> }");
  EXPECT_EQ(s.class_iris, std::set<Iri>{Iri("http://example.org/Customer")});
  s = skeleton_of("BASE <http://example.org/telecom#>\nSELECT ?x WHERE { ?x a <#Customer> }");
  EXPECT_EQ(s.class_iris, std::set<Iri>{tel("Customer")});
}

TEST(Skeleton, SelectStarAndLiterals) {
  auto s = skeleton_of(
      "PREFIX tel: <http://example.org/telecom#>\n"
      "SELECT * WHERE { ?x tel:planName \"Unlimited\"@en ; tel:monthlyFee 12.5 ; tel:issueDate '''x''' . }");
  EXPECT_EQ(s.predicate_iris.size(), 3u);
}

TEST(Skeleton, CommentsAndKeywordCase) {
  auto v = violations_of(
      "# leading comment\nprefix tel: <http://example.org/telecom#>\n"
      "select distinct ?x where { ?x a tel:Customer } limit 3 # trailing\n");
  EXPECT_TRUE(v.empty());
  // Only lowercase 'a' is the rdf:type keyword.
  auto upper = violations_of("PREFIX tel: <http://example.org/telecom#>\nSELECT ?x WHERE { ?x A tel:Customer }");
  ASSERT_EQ(upper.size(), 1u);
  EXPECT_EQ(upper[0].offending, "A");
}

TEST(ParseErrors, ReportedWithLocation) {
  auto v = violations_of("SELECT ?x WHERE { ?x a }");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::parse_error);
  EXPECT_EQ(v[0].location.line, 1u);
}

TEST(ParseErrors, UnsupportedForms) {
  for (const char* q : {
           "ASK { ?s ?p ?o }",
           "CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }",
           "SELECT ?s WHERE { ?s <http://e.org/p>* ?o }",
           "SELECT ?s WHERE { ?s <http://e.org/p>|<http://e.org/q> ?o }",
           "SELECT ?s WHERE { ?s ?p ?o MINUS { ?s ?p 1 } }",
           "SELECT ?s WHERE { GRAPH ?g { ?s ?p ?o } }",
           "SELECT (GROUP_CONCAT(?o) AS ?all) WHERE { ?s ?p ?o }",
           "SELECT ?s WHERE { ?s ?p ?o . FILTER EXISTS { ?s ?p 1 } }",
           "SELECT WHERE { ?s ?p ?o }",
           "SELECT ?s WHERE { ?s ?p ?o ",
           "",
       }) {
    auto v = violations_of(q);
    ASSERT_FALSE(v.empty()) << q;
    bool has_parse_error = false;
    for (const auto& x : v) has_parse_error |= x.kind == ViolationKind::parse_error;
    EXPECT_TRUE(has_parse_error) << q;
  }
}

TEST(ParseErrors, NestedSubqueriesBeyondOneLevel) {
  auto v = violations_of(
      "SELECT ?s WHERE { { SELECT ?s WHERE { { SELECT ?s WHERE { ?s ?p ?o } } } } }");
  EXPECT_FALSE(v.empty());
}

TEST(ParseErrors, UnprefixedNamesCollectedTogether) {
  auto v = violations_of("SELECT ?s WHERE { ?s foo:bar ?o ; baz:qux <rel> }");
  ASSERT_EQ(v.size(), 3u);
  for (const auto& x : v) EXPECT_EQ(x.kind, ViolationKind::unprefixed_name);
  EXPECT_EQ(v[0].offending, "foo:bar");
  EXPECT_EQ(v[1].offending, "baz:qux");
  EXPECT_EQ(v[2].offending, "<rel>");
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end(), [](auto& a, auto& b) { return a.location < b.location; }));
}

TEST(Conformance, DetailDistinguishesSliceFromOntology) {
  auto slice = slice_for({"Customer"});
  auto v = validate_query(
      "PREFIX tel: <http://example.org/telecom#>\n"
      "SELECT * WHERE { ?x a tel:Region , tel:Nowhere ; tel:residesIn ?y ; tel:zip ?z }",
      toy_ontology(), slice);
  ASSERT_EQ(v.size(), 4u);
  std::map<std::string, std::string> detail;
  for (const auto& x : v) detail[x.offending] = x.detail;
  EXPECT_EQ(detail["tel:Region"], "not in slice");
  EXPECT_EQ(detail["tel:Nowhere"], "not in ontology");
  EXPECT_EQ(detail["tel:residesIn"], "not in slice");
  EXPECT_EQ(detail["tel:zip"], "not in ontology");
}

TEST(Conformance, FormatViolation) {
  ConformanceViolation v{ViolationKind::unknown_class, "tel:X", {3, 7}, "not in ontology"};
  EXPECT_EQ(format_violation(v), "unknown-class\ttel:X\t3:7\tnot in ontology");
}

TEST(Conformance, CorpusHasNoFalsePositivesOrNegatives) {
  const auto& corpus = testsupport::conformance_corpus();
  std::size_t good = 0, bad = 0;
  for (const auto& c : corpus) {
    SCOPED_TRACE(c.name);
    auto v = validate_query(c.query, toy_ontology(), slice_for(c.seeds));
    std::vector<std::pair<ViolationKind, std::string>> got;
    for (const auto& x : v) got.emplace_back(x.kind, x.offending);
    EXPECT_EQ(got, c.expected);
    (c.expected.empty() ? good : bad) += 1;
  }
  EXPECT_GE(good, 10u);
  EXPECT_GE(bad, 10u);
}

TEST(Conformance, FullSliceAcceptsEveryGoldenQuery) {
  for (const auto& entry : std::filesystem::directory_iterator(testsupport::data_dir() / "golden")) {
    if (entry.path().extension() != ".rq") continue;
    auto q = testsupport::read_text(entry.path());
    EXPECT_TRUE(validate_query(q, toy_ontology(), full_slice(toy_ontology())).empty()) << entry.path();
  }
}

TEST(Skeleton, NeverThrowsOnMutatedQueries) {
  std::vector<std::string> seeds;
  for (const auto& c : testsupport::conformance_corpus()) seeds.push_back(c.query);
  testsupport::Rng rng(31);
  const std::string alphabet = " \n{}()<>?$:;,.'\"#^/|*+!=&a0_@-";
  for (int i = 0; i < 20000; ++i) {
    std::string s = seeds[rng.below(seeds.size())];
    for (std::size_t e = rng.between(1, 6); e > 0 && !s.empty(); --e) {
      std::size_t pos = rng.below(s.size());
      switch (rng.below(3)) {
        case 0: s[pos] = alphabet[rng.below(alphabet.size())]; break;
        case 1: s.erase(pos, rng.between(1, 12)); break;
        default: s.insert(pos, std::string(rng.between(1, 3), static_cast<char>(rng.below(256)))); break;
      }
    }
    ASSERT_NO_THROW(extract_skeleton(s));
  }
}

TEST(Skeleton, DeepNestingIsRejectedNotOverflowed) {
  std::string q = "SELECT ?x WHERE { FILTER(" + std::string(100000, '(') + "1" + std::string(100000, ')') + ") }";
  auto v = violations_of(q);
  EXPECT_FALSE(v.empty());
  std::string groups = "SELECT ?x WHERE " + std::string(100000, '{') + std::string(100000, '}');
  EXPECT_FALSE(violations_of(groups).empty());
}
