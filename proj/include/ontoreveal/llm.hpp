#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ontoreveal/verbalizer.hpp"

namespace ontoreveal {

enum class Phase { approximation, refinement, translation };

std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

inline constexpr std::size_t kDefaultContextBudgetTokens = 32768;

// ---------------------------------------------------------------------------
// Parsed responses
// ---------------------------------------------------------------------------

struct MissingLink {
  std::string from;
  std::string to;

  auto operator<=>(const MissingLink&) const = default;
};

/// Concepts and concept-to-concept links the model says are absent from the
/// slice. Always held in canonical form: names canonicalized, empty names
/// dropped, lists sorted and deduplicated, so == is set equality.
struct MissingReport {
  std::vector<std::string> missing_concepts;
  std::vector<MissingLink> missing_links;

  bool operator==(const MissingReport&) const = default;
  bool empty() const noexcept { return missing_concepts.empty() && missing_links.empty(); }
};

MissingReport canonicalize(MissingReport report);

struct GroundedNames {
  std::vector<std::string> concepts;
  std::vector<std::string> relationships;

  bool operator==(const GroundedNames&) const = default;
};

struct SparqlProposed {
  std::string query_text;

  bool operator==(const SparqlProposed&) const = default;
};

struct Missing {
  MissingReport report;

  bool operator==(const Missing&) const = default;
};

struct Unparseable {
  std::string reason;

  bool operator==(const Unparseable&) const = default;
};

using ParsedResponse = std::variant<GroundedNames, SparqlProposed, Missing, Unparseable>;

/// Total: any text yields one of the variants.
///  - approximation: a JSON block {"concepts": [...], "relationships": [...]}
///  - refinement: a sparql block (preferred when both are present) or a JSON
///    block {"missing_concepts": [...], "missing_links": [{"from","to"}]}
///  - translation: a sparql block only
/// A fence tagged "sparql" is SPARQL; an untagged fence counts as SPARQL
/// unless its content starts with '{'.
ParsedResponse parse_response(Phase phase, std::string_view raw);

/// Renders a report in the documented response format (one fenced json block).
std::string format_missing_response(const MissingReport& report);

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(TokenEstimate estimate, std::size_t budget);
  TokenEstimate estimate;
  std::size_t budget;
};

/// System message sent alongside every prompt on the live wire.
inline constexpr std::string_view kSystemMessage =
    "You are a careful assistant. Follow the requested output format exactly.";

std::string build_approximation_prompt(std::string_view question, std::string_view catalog,
                                       std::size_t budget_tokens = kDefaultContextBudgetTokens);

std::string build_refinement_prompt(std::string_view question, std::string_view slice_turtle,
                                    std::size_t budget_tokens = kDefaultContextBudgetTokens);

/// A query that failed the conformance check, fed back once for repair.
struct RepairRequest {
  std::string previous_query;
  std::vector<std::string> violations;
};

/// The refinement prompt with the "report what is missing" branch removed.
std::string build_translation_prompt(std::string_view question, std::string_view slice_turtle,
                                     const std::optional<RepairRequest>& repair = std::nullopt,
                                     std::size_t budget_tokens = kDefaultContextBudgetTokens);

/// Lowercase hex SHA-256 of the prompt text, used for transcript matching.
std::string prompt_hash(std::string_view prompt);

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

struct TranscriptEntry {
  Phase phase;
  std::optional<std::string> hash;  // nullopt matches any prompt of `phase`
  std::string response;
};

/// Ordered canned responses. JSON: {"entries": [{"phase", "match", "response"}]}
/// with match "hash:<hex>" or "any".
struct Transcript {
  std::vector<TranscriptEntry> entries;

  /// Throws std::invalid_argument on malformed documents.
  static Transcript from_json(std::string_view text);
  std::string to_json() const;
};

enum class ProviderKind { live_endpoint, scripted };

/// Immutable description of where responses come from.
struct LlmProvider {
  ProviderKind kind = ProviderKind::scripted;
  std::optional<std::string> endpoint;  // full chat-completions URL
  std::optional<std::string> model;
  std::optional<std::string> api_key;   // environment only
  double timeout_seconds = 60.0;
  int max_retries = 2;
  std::shared_ptr<const Transcript> transcript;

  static LlmProvider scripted(Transcript transcript);
  static LlmProvider live(std::string endpoint, std::string model);

  /// Throws std::invalid_argument when the kind's required fields are absent.
  void validate() const;
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-session connection. Scripted connections consume transcript entries.
class LlmConnection {
 public:
  virtual ~LlmConnection() = default;
  /// Returns the raw response text or throws ProviderError.
  virtual std::string call(Phase phase, const std::string& prompt) = 0;
  /// Decoding settings recorded in session logs.
  virtual std::string settings() const = 0;
};

std::unique_ptr<LlmConnection> open_connection(const LlmProvider& provider);

struct LlmExchange {
  Phase phase;
  std::string prompt;
  std::string prompt_hash;
  std::string raw_response;
  ParsedResponse parsed;
  TokenEstimate prompt_tokens;
};

}  // namespace ontoreveal
