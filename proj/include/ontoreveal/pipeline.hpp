#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ontoreveal/llm.hpp"
#include "ontoreveal/ontology.hpp"
#include "ontoreveal/pathfinder.hpp"
#include "ontoreveal/slicer.hpp"
#include "ontoreveal/sparql_check.hpp"
#include "ontoreveal/verbalizer.hpp"

namespace ontoreveal {

/// How many consecutive identical missing reports end the loop. Two means the
/// report at step i equals the one at step i-1.
inline constexpr int kIdenticalReportsForNoProgress = 2;

inline constexpr int kDefaultMaxRefinementSteps = 5;

enum class FailureKind {
  no_progress,
  step_limit,
  nonconforming_query,
  provider_error,
  budget_exceeded,
  unparseable_response,
};

std::string_view to_string(FailureKind kind);

namespace state {

struct Approximation {
  bool operator==(const Approximation&) const = default;
};

struct Refinement {
  int step = 1;
  Slice slice;
  std::optional<MissingReport> previous_report;
  int identical_run = 0;  // consecutive steps that produced previous_report

  bool operator==(const Refinement&) const = default;
};

struct Translation {
  Slice slice;

  bool operator==(const Translation&) const = default;
};

/// A proposed query waiting for the conformance gate.
struct Conformance {
  std::string query;
  Slice slice;

  bool operator==(const Conformance&) const = default;
};

struct Done {
  std::string query;
  Slice final_slice;

  bool operator==(const Done&) const = default;
};

struct Failed {
  FailureKind reason;
  std::string detail;

  bool operator==(const Failed&) const = default;
};

}  // namespace state

using PhaseState = std::variant<state::Approximation, state::Refinement, state::Translation, state::Conformance,
                                state::Done, state::Failed>;

bool is_terminal(const PhaseState& state);

/// What the ontology service produced for a non-empty missing report.
struct ResolutionOutcome {
  Resolution resolution;
  Slice expanded;
};

/// The refinement-step transition. Total: every response variant maps to a
/// state. A non-empty report with no resolution counts as nothing resolved.
PhaseState decide_transition(const state::Refinement& current, const ParsedResponse& parsed,
                             const std::optional<ResolutionOutcome>& resolution,
                             int max_refinement_steps = kDefaultMaxRefinementSteps);

struct PipelineConfig {
  std::size_t context_budget_tokens = kDefaultContextBudgetTokens;
  int max_refinement_steps = kDefaultMaxRefinementSteps;
  int max_hops = kDefaultMaxHops;
  CatalogStyle catalog_style = CatalogStyle::compact;

  /// Throws std::invalid_argument when a limit is not positive.
  void validate() const;
};

/// One refinement step's hand-off to the ontology service.
struct ResolutionRecord {
  int step = 0;
  Resolution resolution;
};

struct SessionLog {
  std::string question;
  std::string provider_settings;
  PipelineConfig config;
  std::vector<LlmExchange> exchanges;
  std::vector<Slice> slices;
  std::vector<ResolutionRecord> resolutions;
  PhaseState outcome = state::Failed{FailureKind::provider_error, "not run"};

  /// Stable JSON rendering; contains no timestamps.
  std::string to_json() const;
};

/// Runs approximation, the refinement loop, translation and the conformance
/// gate (with one repair attempt). Never throws for provider, budget or
/// response problems; those end in a Failed outcome.
SessionLog run_pipeline(std::string_view question, const Ontology& ontology, const LlmProvider& provider,
                        const PipelineConfig& config = {});

}  // namespace ontoreveal
