#include "ontoreveal/llm.hpp"

#include <algorithm>
#include <json.hpp>

#include "text_util.hpp"

namespace ontoreveal {

using nlohmann::json;

std::unique_ptr<LlmConnection> open_live_connection(const LlmProvider& provider);  // http_client.cpp

namespace {

struct Fence {
  std::string tag;  // lowercased first word of the info string
  std::string content;
};

struct FenceScan {
  std::vector<Fence> fences;
  bool unterminated = false;
};

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Returns the backtick run length when `line` opens or closes a fence.
std::size_t fence_marker(std::string_view line, std::string_view& info) {
  std::size_t indent = 0;
  while (indent < line.size() && indent < 3 && line[indent] == ' ') ++indent;
  std::size_t ticks = 0;
  while (indent + ticks < line.size() && line[indent + ticks] == '`') ++ticks;
  if (ticks < 3) return 0;
  info = line.substr(indent + ticks);
  return ticks;
}

FenceScan scan_fences(std::string_view raw) {
  FenceScan scan;
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    auto line = raw.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view info;
    std::size_t ticks = fence_marker(lines[i], info);
    if (ticks == 0 || info.find('`') != std::string_view::npos) continue;
    Fence fence;
    std::string trimmed = text_util::trim(info);
    fence.tag = lower(trimmed.substr(0, trimmed.find_first_of(" \t")));
    bool closed = false;
    std::size_t j = i + 1;
    for (; j < lines.size(); ++j) {
      std::string_view close_info;
      std::size_t close_ticks = fence_marker(lines[j], close_info);
      if (close_ticks >= ticks && text_util::trim(close_info).empty()) {
        closed = true;
        break;
      }
      if (j > i + 1) fence.content += '\n';
      fence.content += lines[j];
    }
    if (!closed) {
      scan.unterminated = true;
      break;
    }
    scan.fences.push_back(std::move(fence));
    i = j;
  }
  return scan;
}

bool is_sparql_fence(const Fence& fence) {
  if (fence.tag == "sparql" || fence.tag == "rq") return true;
  if (!fence.tag.empty()) return false;
  auto body = text_util::trim(fence.content);
  return !body.empty() && body.front() != '{';
}

bool is_json_fence(const Fence& fence) {
  if (fence.tag == "json") return true;
  auto body = text_util::trim(fence.content);
  return fence.tag.empty() && !body.empty() && body.front() == '{';
}

std::optional<std::vector<std::string>> string_list(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_array()) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& item : *it) {
    if (!item.is_string()) return std::nullopt;
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<std::string> canonical_list(std::vector<std::string> names) {
  std::vector<std::string> out;
  for (auto& n : names) {
    auto c = canonicalize_name(n);
    if (!c.empty()) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ParsedResponse parse_grounded(const Fence& fence) {
  json doc = json::parse(fence.content, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return Unparseable{"fenced block is not a JSON object"};
  auto concepts = string_list(doc, "concepts");
  auto relationships = string_list(doc, "relationships");
  if (!concepts || !relationships) {
    return Unparseable{"expected string lists \"concepts\" and \"relationships\""};
  }
  return GroundedNames{canonical_list(std::move(*concepts)), canonical_list(std::move(*relationships))};
}

ParsedResponse parse_missing(const Fence& fence) {
  json doc = json::parse(fence.content, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return Unparseable{"fenced block is not a JSON object"};
  auto concepts = string_list(doc, "missing_concepts");
  auto links = doc.find("missing_links");
  if (!concepts || links == doc.end() || !links->is_array()) {
    return Unparseable{"expected \"missing_concepts\" and \"missing_links\" lists"};
  }
  MissingReport report;
  report.missing_concepts = std::move(*concepts);
  for (const auto& link : *links) {
    if (!link.is_object()) return Unparseable{"missing link is not an object"};
    auto from = link.find("from");
    auto to = link.find("to");
    if (from == link.end() || to == link.end() || !from->is_string() || !to->is_string()) {
      return Unparseable{"missing link needs string \"from\" and \"to\""};
    }
    report.missing_links.push_back({from->get<std::string>(), to->get<std::string>()});
  }
  return Missing{canonicalize(std::move(report))};
}

ParsedResponse sparql_from(const Fence& fence) {
  if (text_util::trim(fence.content).empty()) return Unparseable{"empty sparql block"};
  return SparqlProposed{fence.content};
}

void check_budget(const std::string& prompt, std::size_t budget) {
  auto estimate = estimate_tokens(prompt);
  if (estimate.estimated_tokens > budget) throw BudgetExceededError(estimate, budget);
}

std::string section(std::string_view title, std::string_view body) {
  std::string out = "## " + std::string(title) + "\n";
  auto trimmed = text_util::trim(body);
  out += trimmed.empty() ? std::string("none") : trimmed;
  out += "\n\n";
  return out;
}

constexpr std::string_view kPreamble =
    "You are an expert in enterprise knowledge graphs, OWL ontologies and SPARQL.\n\n";

std::string slice_prompt_head(std::string_view question, std::string_view slice_turtle) {
  std::string prompt(kPreamble);
  prompt += section("Ontology slice (Turtle)", slice_turtle);
  prompt += section("Question", question);
  prompt +=
      "## Task\n"
      "Translate the question into a SPARQL SELECT query that uses only the classes and "
      "properties declared in the ontology slice above.\n\n";
  return prompt;
}

constexpr std::string_view kSparqlBranch =
    "a single fenced code block tagged sparql containing the complete query, including its "
    "PREFIX declarations:\n"
    "```sparql\n"
    "PREFIX ...\n"
    "SELECT ...\n"
    "```\n";

class ScriptedConnection final : public LlmConnection {
 public:
  explicit ScriptedConnection(std::shared_ptr<const Transcript> transcript)
      : transcript_(std::move(transcript)), used_(transcript_->entries.size(), false) {}

  std::string call(Phase phase, const std::string& prompt) override {
    std::string hash = prompt_hash(prompt);
    for (std::size_t i = 0; i < transcript_->entries.size(); ++i) {
      const auto& entry = transcript_->entries[i];
      if (used_[i] || entry.phase != phase) continue;
      if (entry.hash && *entry.hash != hash) continue;
      used_[i] = true;
      return entry.response;
    }
    throw ProviderError("no transcript entry matches phase " + std::string(to_string(phase)) +
                        " with prompt hash:" + hash);
  }

  std::string settings() const override {
    return "scripted transcript, " + std::to_string(transcript_->entries.size()) + " entries";
  }

 private:
  std::shared_ptr<const Transcript> transcript_;
  std::vector<bool> used_;
};

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::approximation: return "approximation";
    case Phase::refinement: return "refinement";
    case Phase::translation: return "translation";
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view text) {
  for (auto p : {Phase::approximation, Phase::refinement, Phase::translation}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

MissingReport canonicalize(MissingReport report) {
  report.missing_concepts = canonical_list(std::move(report.missing_concepts));
  std::vector<MissingLink> links;
  for (auto& link : report.missing_links) {
    MissingLink c{canonicalize_name(link.from), canonicalize_name(link.to)};
    if (!c.from.empty() && !c.to.empty()) links.push_back(std::move(c));
  }
  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
  report.missing_links = std::move(links);
  return report;
}

ParsedResponse parse_response(Phase phase, std::string_view raw) {
  FenceScan scan = scan_fences(raw);
  if (scan.fences.empty()) {
    return Unparseable{scan.unterminated ? "unterminated fenced block" : "no fenced block"};
  }
  switch (phase) {
    case Phase::approximation: return parse_grounded(scan.fences.front());
    case Phase::refinement: {
      for (const auto& f : scan.fences) {
        if (is_sparql_fence(f)) return sparql_from(f);
      }
      for (const auto& f : scan.fences) {
        if (is_json_fence(f)) return parse_missing(f);
      }
      return Unparseable{"no sparql or json fenced block"};
    }
    case Phase::translation: {
      for (const auto& f : scan.fences) {
        if (is_sparql_fence(f)) return sparql_from(f);
      }
      return Unparseable{"no sparql fenced block"};
    }
  }
  return Unparseable{"unknown phase"};
}

std::string format_missing_response(const MissingReport& report) {
  json links = json::array();
  for (const auto& l : report.missing_links) links.push_back({{"from", l.from}, {"to", l.to}});
  json doc = {{"missing_concepts", report.missing_concepts}, {"missing_links", links}};
  return "```json\n" + doc.dump(2) + "\n```\n";
}

BudgetExceededError::BudgetExceededError(TokenEstimate estimate, std::size_t budget)
    : std::runtime_error("prompt needs ~" + std::to_string(estimate.estimated_tokens) +
                         " tokens, budget is " + std::to_string(budget)),
      estimate(estimate),
      budget(budget) {}

std::string build_approximation_prompt(std::string_view question, std::string_view catalog,
                                       std::size_t budget_tokens) {
  std::string prompt(kPreamble);
  prompt += section("Ontology catalog", catalog);
  prompt += section("Question", question);
  prompt +=
      "## Task\n"
      "Identify the concepts and relationships from the catalog that are needed to answer the "
      "question. Use the names exactly as they are written in the catalog.\n\n"
      "## Output format\n"
      "Reply with a single fenced code block tagged json containing an object with exactly two "
      "keys:\n"
      "```json\n"
      "{\"concepts\": [\"<concept name>\"], \"relationships\": [\"<relationship name>\"]}\n"
      "```\n";
  check_budget(prompt, budget_tokens);
  return prompt;
}

std::string build_refinement_prompt(std::string_view question, std::string_view slice_turtle,
                                    std::size_t budget_tokens) {
  std::string prompt = slice_prompt_head(question, slice_turtle);
  prompt +=
      "Only write the query if the slice is detailed enough to answer the question.\n\n"
      "## Output format\n"
      "Reply with exactly one of the following.\n\n"
      "1. If the slice is detailed enough, ";
  prompt += kSparqlBranch;
  prompt +=
      "\n2. Otherwise, a single fenced code block tagged json listing what is missing: concepts "
      "that are absent from the slice, and links between concepts that you cannot connect "
      "using the slice. Use an empty list when nothing of that kind is missing.\n"
      "```json\n"
      "{\"missing_concepts\": [\"<concept name>\"], \"missing_links\": [{\"from\": \"<concept "
      "name>\", \"to\": \"<concept name>\"}]}\n"
      "```\n";
  check_budget(prompt, budget_tokens);
  return prompt;
}

std::string build_translation_prompt(std::string_view question, std::string_view slice_turtle,
                                     const std::optional<RepairRequest>& repair, std::size_t budget_tokens) {
  std::string prompt = slice_prompt_head(question, slice_turtle);
  if (repair) {
    prompt += section("Previous attempt", repair->previous_query);
    std::string listed;
    for (const auto& v : repair->violations) listed += "- " + v + "\n";
    prompt += section("Problems with the previous attempt", listed);
    prompt += "Correct these problems in your new query.\n\n";
  }
  prompt += "## Output format\nReply with ";
  prompt += kSparqlBranch;
  check_budget(prompt, budget_tokens);
  return prompt;
}

std::string prompt_hash(std::string_view prompt) { return text_util::sha256_hex(prompt); }

Transcript Transcript::from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("transcript is not valid JSON");
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw std::invalid_argument("transcript needs an \"entries\" list");
  }
  Transcript transcript;
  std::size_t index = 0;
  for (const auto& e : doc["entries"]) {
    auto where = "transcript entry " + std::to_string(index++) + ": ";
    if (!e.is_object()) throw std::invalid_argument(where + "not an object");
    auto phase = e.contains("phase") && e["phase"].is_string() ? parse_phase(e["phase"].get<std::string>())
                                                              : std::nullopt;
    if (!phase) throw std::invalid_argument(where + "unknown or missing phase");
    if (!e.contains("response") || !e["response"].is_string()) {
      throw std::invalid_argument(where + "missing response text");
    }
    std::string match = e.value("match", std::string("any"));
    TranscriptEntry entry{*phase, std::nullopt, e["response"].get<std::string>()};
    if (match.starts_with("hash:")) {
      std::string hex = lower(match.substr(5));
      if (hex.size() != 64 || hex.find_first_not_of("0123456789abcdef") != std::string::npos) {
        throw std::invalid_argument(where + "hash must be 64 hex digits");
      }
      entry.hash = hex;
    } else if (match != "any") {
      throw std::invalid_argument(where + "match must be \"any\" or \"hash:<hex>\"");
    }
    transcript.entries.push_back(std::move(entry));
  }
  return transcript;
}

std::string Transcript::to_json() const {
  json entries = json::array();
  for (const auto& e : this->entries) {
    entries.push_back({{"phase", std::string(ontoreveal::to_string(e.phase))},
                       {"match", e.hash ? "hash:" + *e.hash : std::string("any")},
                       {"response", e.response}});
  }
  return json{{"entries", entries}}.dump(2) + "\n";
}

LlmProvider LlmProvider::scripted(Transcript transcript) {
  LlmProvider p;
  p.kind = ProviderKind::scripted;
  p.transcript = std::make_shared<const Transcript>(std::move(transcript));
  return p;
}

LlmProvider LlmProvider::live(std::string endpoint, std::string model) {
  LlmProvider p;
  p.kind = ProviderKind::live_endpoint;
  p.endpoint = std::move(endpoint);
  p.model = std::move(model);
  return p;
}

void LlmProvider::validate() const {
  if (kind == ProviderKind::scripted && !transcript) {
    throw std::invalid_argument("scripted provider requires a transcript");
  }
  if (kind == ProviderKind::live_endpoint && (!endpoint || endpoint->empty() || !model || model->empty())) {
    throw std::invalid_argument("live provider requires an endpoint and a model");
  }
  if (timeout_seconds <= 0) throw std::invalid_argument("provider timeout must be positive");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
}

std::unique_ptr<LlmConnection> open_connection(const LlmProvider& provider) {
  provider.validate();
  if (provider.kind == ProviderKind::scripted) return std::make_unique<ScriptedConnection>(provider.transcript);
  return open_live_connection(provider);
}

}  // namespace ontoreveal
