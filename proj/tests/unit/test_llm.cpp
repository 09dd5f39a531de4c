#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <thread>

#include "ontoreveal/llm.hpp"
#include "ontoreveal/synthgen.hpp"
#include "ontoreveal/verbalizer.hpp"
#include "support.hpp"

using namespace ontoreveal;

TEST(ParseResponse, GroundedNames) {
  auto r = parse_response(Phase::approximation,
                          "Sure.\n```json\n{\"concepts\": [\"Customer\", \"Plan\"], \"relationships\": [\"has plan\"]}\n```\n");
  ASSERT_TRUE(std::holds_alternative<GroundedNames>(r));
  const auto& g = std::get<GroundedNames>(r);
  EXPECT_EQ(g.concepts, (std::vector<std::string>{"customer", "plan"}));
  EXPECT_EQ(g.relationships, std::vector<std::string>{"has plan"});
}

TEST(ParseResponse, GroundedNamesNeedsBothLists) {
  auto r = parse_response(Phase::approximation, "```json\n{\"concepts\": [\"Customer\"]}\n```");
  EXPECT_TRUE(std::holds_alternative<Unparseable>(r));
  auto wrong_type = parse_response(Phase::approximation, "```json\n{\"concepts\": 3, \"relationships\": []}\n```");
  EXPECT_TRUE(std::holds_alternative<Unparseable>(wrong_type));
}

TEST(ParseResponse, RefinementPrefersSparql) {
  auto r = parse_response(Phase::refinement,
                          "```json\n{\"missing_concepts\": [\"Region\"], \"missing_links\": []}\n```\n"
                          "```sparql\nSELECT ?x WHERE { ?x a <http://e.org/A> }\n```\n");
  ASSERT_TRUE(std::holds_alternative<SparqlProposed>(r));
  EXPECT_EQ(std::get<SparqlProposed>(r).query_text, "SELECT ?x WHERE { ?x a <http://e.org/A> }");
}

TEST(ParseResponse, MissingReportIsCanonical) {
  auto r = parse_response(Phase::refinement,
                          "```json\n{\"missing_concepts\": [\" Region \", \"region\", \"\", \"Account  Manager\"],"
                          " \"missing_links\": [{\"from\": \"Invoice\", \"to\": \"Region\"},"
                          " {\"from\": \"invoice\", \"to\": \"REGION\"}]}\n```");
  ASSERT_TRUE(std::holds_alternative<Missing>(r));
  const auto& m = std::get<Missing>(r).report;
  EXPECT_EQ(m.missing_concepts, (std::vector<std::string>{"account manager", "region"}));
  EXPECT_EQ(m.missing_links, (std::vector<MissingLink>{{"invoice", "region"}}));
}

TEST(ParseResponse, EmptyMissingReport) {
  auto r = parse_response(Phase::refinement, "```json\n{\"missing_concepts\": [], \"missing_links\": []}\n```");
  ASSERT_TRUE(std::holds_alternative<Missing>(r));
  EXPECT_TRUE(std::get<Missing>(r).report.empty());
}

TEST(ParseResponse, UntaggedFenceIsSparqlUnlessJson) {
  auto s = parse_response(Phase::translation, "```\nSELECT * WHERE { ?s ?p ?o }\n```");
  EXPECT_TRUE(std::holds_alternative<SparqlProposed>(s));
  auto j = parse_response(Phase::refinement, "```\n{\"missing_concepts\": [\"x\"], \"missing_links\": []}\n```");
  EXPECT_TRUE(std::holds_alternative<Missing>(j));
}

TEST(ParseResponse, TranslationIgnoresJson) {
  auto r = parse_response(Phase::translation, "```json\n{\"missing_concepts\": [], \"missing_links\": []}\n```");
  EXPECT_TRUE(std::holds_alternative<Unparseable>(r));
}

TEST(ParseResponse, UnparseableCases) {
  for (auto phase : {Phase::approximation, Phase::refinement, Phase::translation}) {
    EXPECT_TRUE(std::holds_alternative<Unparseable>(parse_response(phase, "")));
    EXPECT_TRUE(std::holds_alternative<Unparseable>(parse_response(phase, "no fences at all")));
    EXPECT_TRUE(std::holds_alternative<Unparseable>(parse_response(phase, "```sparql\nSELECT")));
  }
  EXPECT_TRUE(std::holds_alternative<Unparseable>(parse_response(Phase::translation, "```sparql\n   \n```")));
  EXPECT_TRUE(std::holds_alternative<Unparseable>(parse_response(Phase::approximation, "```json\n{nope\n```")));
}

TEST(ParseResponse, MissingReportRoundTripsThroughFormatter) {
  testsupport::Rng rng(8);
  const std::vector<std::string> words = {"Customer", "plan", " Region", "Account Manager", "x", "", "Ünïcode"};
  for (int i = 0; i < 300; ++i) {
    MissingReport report;
    for (std::size_t k = rng.below(4); k > 0; --k) report.missing_concepts.push_back(words[rng.below(words.size())]);
    for (std::size_t k = rng.below(4); k > 0; --k) {
      report.missing_links.push_back({words[rng.below(words.size())], words[rng.below(words.size())]});
    }
    auto canonical = canonicalize(report);
    EXPECT_EQ(canonicalize(canonical), canonical);
    auto parsed = parse_response(Phase::refinement, format_missing_response(report));
    ASSERT_TRUE(std::holds_alternative<Missing>(parsed));
    EXPECT_EQ(std::get<Missing>(parsed).report, canonical);
  }
}

TEST(ParseResponse, TotalOnRandomText) {
  testsupport::Rng rng(1);
  const std::string alphabet = "`{}[]\":,sparqljon \n\tab";
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    for (std::size_t n = rng.below(80); n > 0; --n) s.push_back(alphabet[rng.below(alphabet.size())]);
    for (auto phase : {Phase::approximation, Phase::refinement, Phase::translation}) {
      ASSERT_NO_THROW(parse_response(phase, s));
    }
  }
}

TEST(Prompts, ApproximationMatchesGoldenText) {
  auto prompt = build_approximation_prompt("How many tickets are assigned to each employee?",
                                           verbalize_catalog(toy_ontology()));
  EXPECT_EQ(prompt, testsupport::read_text(testsupport::golden_dir() / "approximation_prompt.txt"));
}

TEST(Prompts, TranslationDiffersFromRefinementOnlyInTheOutputBranch) {
  auto refinement = build_refinement_prompt("Q?", "ex:A a owl:Class .");
  auto translation = build_translation_prompt("Q?", "ex:A a owl:Class .");
  EXPECT_NE(refinement.find("missing_concepts"), std::string::npos);
  EXPECT_EQ(translation.find("missing_concepts"), std::string::npos);
  auto head = translation.substr(0, translation.find("## Output format"));
  EXPECT_EQ(refinement.rfind(head, 0), 0u);
}

TEST(Prompts, RepairListsViolations) {
  auto p = build_translation_prompt("Q?", "slice", RepairRequest{"SELECT bad", {"unknown-class\tex:X\t1:1\tnot in slice"}});
  EXPECT_NE(p.find("SELECT bad"), std::string::npos);
  EXPECT_NE(p.find("- unknown-class\tex:X"), std::string::npos);
}

TEST(Prompts, EmptySliceStillProducesPrompt) {
  auto p = build_refinement_prompt("Q?", "");
  EXPECT_NE(p.find("## Ontology slice (Turtle)\nnone\n"), std::string::npos);
}

TEST(Prompts, BudgetIsEnforced) {
  std::string catalog(4000, 'x');
  EXPECT_NO_THROW(build_approximation_prompt("Q?", catalog, 2000));
  try {
    build_approximation_prompt("Q?", catalog, 500);
    FAIL();
  } catch (const BudgetExceededError& e) {
    EXPECT_EQ(e.budget, 500u);
    EXPECT_GT(e.estimate.estimated_tokens, 1000u);
  }
  EXPECT_THROW(build_refinement_prompt("Q?", catalog, 100), BudgetExceededError);
  EXPECT_THROW(build_translation_prompt("Q?", catalog, std::nullopt, 100), BudgetExceededError);
}

TEST(PromptHash, KnownSha256Vectors) {
  EXPECT_EQ(prompt_hash(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(prompt_hash("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Transcript, JsonRoundTripAndErrors) {
  Transcript t{{{Phase::approximation, std::nullopt, "a"}, {Phase::translation, std::string(64, 'f'), "b"}}};
  auto back = Transcript::from_json(t.to_json());
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[1].hash, std::string(64, 'f'));
  EXPECT_EQ(back.entries[0].hash, std::nullopt);
  EXPECT_EQ(back.to_json(), t.to_json());
  EXPECT_THROW(Transcript::from_json("[]"), std::invalid_argument);
  EXPECT_THROW(Transcript::from_json("{\"entries\": [{\"phase\": \"nope\", \"response\": \"\"}]}"), std::invalid_argument);
  EXPECT_THROW(Transcript::from_json("{\"entries\": [{\"phase\": \"refinement\", \"match\": \"maybe\", \"response\": \"\"}]}"),
               std::invalid_argument);
  EXPECT_THROW(Transcript::from_json("not json"), std::invalid_argument);
}

TEST(ScriptedProvider, FirstMatchWinsAndIsConsumed) {
  Transcript t{{{Phase::refinement, prompt_hash("other"), "skip"},
                {Phase::refinement, std::nullopt, "first"},
                {Phase::refinement, prompt_hash("p"), "hashed"},
                {Phase::translation, std::nullopt, "t"}}};
  auto conn = open_connection(LlmProvider::scripted(t));
  EXPECT_EQ(conn->call(Phase::refinement, "p"), "first");
  EXPECT_EQ(conn->call(Phase::refinement, "p"), "hashed");
  EXPECT_THROW(conn->call(Phase::refinement, "p"), ProviderError);
  EXPECT_EQ(conn->call(Phase::translation, "anything"), "t");
  EXPECT_EQ(conn->settings(), "scripted transcript, 4 entries");
  // A fresh connection starts from the full transcript again.
  EXPECT_EQ(open_connection(LlmProvider::scripted(t))->call(Phase::refinement, "p"), "first");
}

TEST(Provider, ValidateRejectsIncompleteSettings) {
  LlmProvider empty_scripted;
  EXPECT_THROW(empty_scripted.validate(), std::invalid_argument);
  EXPECT_THROW(LlmProvider::live("", "m").validate(), std::invalid_argument);
  EXPECT_THROW(LlmProvider::live("http://localhost/x", "").validate(), std::invalid_argument);
  auto p = LlmProvider::live("http://localhost/x", "m");
  p.max_retries = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(open_connection(LlmProvider::live("ftp://host/x", "m")), std::invalid_argument);
}

namespace {

class StubServer {
 public:
  StubServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string chat_reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST(LiveProvider, SendsChatRequestWithKeyAndRetriesTransientFailures) {
  StubServer stub;
  std::atomic<int> calls{0};
  std::string seen_auth, seen_body;
  stub.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls < 3) {
      res.status = 503;
      return;
    }
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content(chat_reply("```sparql\nSELECT * WHERE { ?s ?p ?o }\n```"), "application/json");
  });

  auto provider = LlmProvider::live(stub.url("/v1/chat/completions"), "test-model");
  provider.api_key = "sk-test";
  provider.timeout_seconds = 5;
  provider.max_retries = 2;
  auto conn = open_connection(provider);
  EXPECT_EQ(conn->call(Phase::translation, "the prompt"), "```sparql\nSELECT * WHERE { ?s ?p ?o }\n```");
  EXPECT_EQ(calls.load(), 3);
  EXPECT_EQ(seen_auth, "Bearer sk-test");
  auto body = nlohmann::json::parse(seen_body);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["temperature"], 0);
  EXPECT_EQ(body["messages"][1]["content"], "the prompt");
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(conn->settings(), "model=test-model, temperature=0, top_p=1");
}

TEST(LiveProvider, GivesUpAfterRetries) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server().Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  auto provider = LlmProvider::live(stub.url("/chat"), "m");
  provider.max_retries = 1;
  provider.timeout_seconds = 5;
  EXPECT_THROW(open_connection(provider)->call(Phase::approximation, "p"), ProviderError);
  EXPECT_EQ(calls.load(), 2);
}

TEST(LiveProvider, ClientErrorsAreNotRetried) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server().Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
  });
  auto provider = LlmProvider::live(stub.url("/chat"), "m");
  provider.timeout_seconds = 5;
  EXPECT_THROW(open_connection(provider)->call(Phase::approximation, "p"), ProviderError);
  EXPECT_EQ(calls.load(), 1);
}

TEST(LiveProvider, MalformedBodyIsProviderError) {
  StubServer stub;
  stub.server().Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  auto provider = LlmProvider::live(stub.url("/chat"), "m");
  provider.timeout_seconds = 5;
  EXPECT_THROW(open_connection(provider)->call(Phase::approximation, "p"), ProviderError);
}

TEST(LiveProvider, UnreachableEndpoint) {
  auto provider = LlmProvider::live("http://127.0.0.1:1/chat", "m");
  provider.timeout_seconds = 1;
  provider.max_retries = 0;
  EXPECT_THROW(open_connection(provider)->call(Phase::approximation, "p"), ProviderError);
}
