#include "ontoreveal/pipeline.hpp"

#include <json.hpp>

#include "text_util.hpp"

namespace ontoreveal {

using nlohmann::ordered_json;

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::no_progress: return "no-progress";
    case FailureKind::step_limit: return "step-limit";
    case FailureKind::nonconforming_query: return "nonconforming-query";
    case FailureKind::provider_error: return "provider-error";
    case FailureKind::budget_exceeded: return "budget-exceeded";
    case FailureKind::unparseable_response: return "unparseable-response";
  }
  return "?";
}

bool is_terminal(const PhaseState& s) {
  return std::holds_alternative<state::Done>(s) || std::holds_alternative<state::Failed>(s);
}

void PipelineConfig::validate() const {
  if (context_budget_tokens == 0) throw std::invalid_argument("context budget must be positive");
  if (max_refinement_steps <= 0) throw std::invalid_argument("max refinement steps must be positive");
  if (max_hops <= 0) throw std::invalid_argument("max hops must be positive");
}

namespace {

std::string report_summary(const MissingReport& r) {
  std::string out;
  for (const auto& c : r.missing_concepts) out += (out.empty() ? "" : ", ") + c;
  for (const auto& l : r.missing_links) out += (out.empty() ? "" : ", ") + l.from + " -> " + l.to;
  return out;
}

}  // namespace

PhaseState decide_transition(const state::Refinement& current, const ParsedResponse& parsed,
                             const std::optional<ResolutionOutcome>& resolution, int max_refinement_steps) {
  if (const auto* proposed = std::get_if<SparqlProposed>(&parsed)) {
    return state::Conformance{proposed->query_text, current.slice};
  }
  if (const auto* u = std::get_if<Unparseable>(&parsed)) {
    return state::Failed{FailureKind::unparseable_response, "refinement step " + std::to_string(current.step) +
                                                                ": " + u->reason};
  }
  if (std::holds_alternative<GroundedNames>(parsed)) {
    return state::Failed{FailureKind::unparseable_response,
                         "refinement step " + std::to_string(current.step) + ": expected sparql or missing report"};
  }

  const MissingReport report = canonicalize(std::get<Missing>(parsed).report);
  if (report.empty()) return state::Translation{current.slice};

  int run = current.previous_report && *current.previous_report == report ? current.identical_run + 1 : 1;
  if (run >= kIdenticalReportsForNoProgress) {
    return state::Failed{FailureKind::no_progress, "missing report unchanged for " + std::to_string(run) +
                                                       " consecutive steps: " + report_summary(report)};
  }

  Slice next = resolution ? resolution->expanded : current.slice;
  bool nothing_resolved = !resolution || (resolution->resolution.additions.empty() &&
                                          resolution->resolution.paths.empty());
  if (nothing_resolved && next == current.slice) {
    return state::Failed{FailureKind::no_progress,
                         "nothing in the missing report could be resolved: " + report_summary(report)};
  }
  if (current.step + 1 > max_refinement_steps) {
    return state::Failed{FailureKind::step_limit,
                         "refinement did not converge within " + std::to_string(max_refinement_steps) + " steps"};
  }
  return state::Refinement{current.step + 1, std::move(next), report, run};
}

namespace {

class Session {
 public:
  Session(std::string_view question, const Ontology& ontology, const LlmProvider& provider,
          const PipelineConfig& config)
      : ontology_(ontology), config_(config), index_(build_index(ontology)) {
    log_.question = std::string(question);
    log_.config = config;
    connection_ = open_connection(provider);
    log_.provider_settings = connection_->settings();
  }

  SessionLog run() {
    PhaseState s = state::Approximation{};
    bool repaired = false;
    try {
      while (!is_terminal(s)) {
        if (std::holds_alternative<state::Approximation>(s)) {
          s = approximate();
        } else if (auto* r = std::get_if<state::Refinement>(&s)) {
          s = refine(*r);
        } else if (auto* t = std::get_if<state::Translation>(&s)) {
          s = translate(t->slice, std::nullopt);
        } else if (auto* c = std::get_if<state::Conformance>(&s)) {
          s = gate(*c, repaired);
        }
      }
    } catch (const BudgetExceededError& e) {
      s = state::Failed{FailureKind::budget_exceeded, e.what()};
    } catch (const ProviderError& e) {
      s = state::Failed{FailureKind::provider_error, e.what()};
    }
    log_.outcome = std::move(s);
    return std::move(log_);
  }

 private:
  const ParsedResponse& exchange(Phase phase, std::string prompt) {
    LlmExchange ex{phase, std::move(prompt), "", "", Unparseable{""}, {}};
    ex.prompt_hash = prompt_hash(ex.prompt);
    ex.prompt_tokens = estimate_tokens(ex.prompt);
    ex.raw_response = connection_->call(phase, ex.prompt);
    ex.parsed = parse_response(phase, ex.raw_response);
    log_.exchanges.push_back(std::move(ex));
    return log_.exchanges.back().parsed;
  }

  PhaseState approximate() {
    auto prompt = build_approximation_prompt(log_.question, verbalize_catalog(ontology_, config_.catalog_style),
                                             config_.context_budget_tokens);
    const auto& parsed = exchange(Phase::approximation, std::move(prompt));
    const auto* names = std::get_if<GroundedNames>(&parsed);
    if (names == nullptr) {
      const auto* u = std::get_if<Unparseable>(&parsed);
      return state::Failed{FailureKind::unparseable_response,
                           "approximation: " + (u != nullptr ? u->reason : std::string("unexpected response"))};
    }
    ResolutionRecord grounding;
    for (const auto* list : {&names->concepts, &names->relationships}) {
      for (const auto& name : *list) {
        auto iris = resolve_name(index_, name);
        if (iris.empty()) grounding.resolution.unresolved.push_back(name);
        grounding.resolution.additions.insert(iris.begin(), iris.end());
      }
    }
    Slice seeded = seed_slice(ontology_, grounding.resolution.additions);
    log_.resolutions.push_back(std::move(grounding));
    log_.slices.push_back(seeded);
    return state::Refinement{1, std::move(seeded), std::nullopt, 0};
  }

  PhaseState refine(const state::Refinement& current) {
    auto prompt = build_refinement_prompt(log_.question, verbalize_slice(ontology_, current.slice),
                                          config_.context_budget_tokens);
    const auto& parsed = exchange(Phase::refinement, std::move(prompt));
    std::optional<ResolutionOutcome> outcome;
    if (const auto* missing = std::get_if<Missing>(&parsed); missing != nullptr && !missing->report.empty()) {
      auto resolution = resolve_missing(ontology_, index_, current.slice, missing->report, config_.max_hops);
      Slice expanded = expand_slice(ontology_, current.slice, resolution.additions, resolution.paths);
      log_.resolutions.push_back({current.step, resolution});
      outcome = ResolutionOutcome{std::move(resolution), std::move(expanded)};
    }
    PhaseState next = decide_transition(current, parsed, outcome, config_.max_refinement_steps);
    if (const auto* r = std::get_if<state::Refinement>(&next)) log_.slices.push_back(r->slice);
    return next;
  }

  PhaseState translate(const Slice& slice, const std::optional<RepairRequest>& repair) {
    auto prompt = build_translation_prompt(log_.question, verbalize_slice(ontology_, slice), repair,
                                           config_.context_budget_tokens);
    const auto& parsed = exchange(Phase::translation, std::move(prompt));
    if (const auto* q = std::get_if<SparqlProposed>(&parsed)) return state::Conformance{q->query_text, slice};
    const auto* u = std::get_if<Unparseable>(&parsed);
    return state::Failed{FailureKind::unparseable_response,
                         "translation: " + (u != nullptr ? u->reason : std::string("unexpected response"))};
  }

  PhaseState gate(const state::Conformance& candidate, bool& repaired) {
    auto violations = validate_query(candidate.query, ontology_, candidate.slice);
    if (violations.empty()) return state::Done{candidate.query, candidate.slice};
    std::vector<std::string> lines;
    for (const auto& v : violations) lines.push_back(format_violation(v));
    if (repaired) {
      std::string detail = std::to_string(violations.size()) + " violation(s) after repair";
      for (const auto& l : lines) detail += "\n" + l;
      return state::Failed{FailureKind::nonconforming_query, detail};
    }
    repaired = true;
    return translate(candidate.slice, RepairRequest{candidate.query, lines});
  }

  const Ontology& ontology_;
  PipelineConfig config_;
  NameIndex index_;
  std::unique_ptr<LlmConnection> connection_;
  SessionLog log_;
};

ordered_json iri_list(const std::set<Iri>& iris) {
  ordered_json out = ordered_json::array();
  for (const auto& i : iris) out.push_back(i.str());
  return out;
}

ordered_json slice_json(const Slice& s) {
  return {{"concepts", iri_list(s.concepts)},
          {"relationships", iri_list(s.relationships)},
          {"attributes", iri_list(s.attributes)}};
}

ordered_json string_list(const std::vector<std::string>& items) {
  ordered_json out = ordered_json::array();
  for (const auto& i : items) out.push_back(i);
  return out;
}

ordered_json parsed_json(const ParsedResponse& parsed) {
  return std::visit(
      [](const auto& p) -> ordered_json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GroundedNames>) {
          return {{"kind", "grounded-names"},
                  {"concepts", string_list(p.concepts)},
                  {"relationships", string_list(p.relationships)}};
        } else if constexpr (std::is_same_v<P, SparqlProposed>) {
          return {{"kind", "sparql"}, {"query", p.query_text}};
        } else if constexpr (std::is_same_v<P, Missing>) {
          ordered_json links = ordered_json::array();
          for (const auto& l : p.report.missing_links) links.push_back({{"from", l.from}, {"to", l.to}});
          return {{"kind", "missing"},
                  {"missing_concepts", string_list(p.report.missing_concepts)},
                  {"missing_links", links}};
        } else {
          return {{"kind", "unparseable"}, {"reason", p.reason}};
        }
      },
      parsed);
}

ordered_json outcome_json(const PhaseState& s) {
  if (const auto* d = std::get_if<state::Done>(&s)) {
    return {{"state", "done"}, {"query", d->query}, {"final_slice", slice_json(d->final_slice)}};
  }
  if (const auto* f = std::get_if<state::Failed>(&s)) {
    return {{"state", "failed"}, {"reason", std::string(to_string(f->reason))}, {"detail", f->detail}};
  }
  return {{"state", "incomplete"}};
}

}  // namespace

std::string SessionLog::to_json() const {
  ordered_json exchanges_json = ordered_json::array();
  for (const auto& ex : exchanges) {
    exchanges_json.push_back({{"phase", std::string(to_string(ex.phase))},
                              {"prompt_hash", ex.prompt_hash},
                              {"prompt_chars", ex.prompt_tokens.chars},
                              {"prompt_tokens", ex.prompt_tokens.estimated_tokens},
                              {"prompt", ex.prompt},
                              {"raw_response", ex.raw_response},
                              {"parsed", parsed_json(ex.parsed)}});
  }
  ordered_json slices_json = ordered_json::array();
  for (const auto& s : slices) slices_json.push_back(slice_json(s));
  ordered_json resolutions_json = ordered_json::array();
  for (const auto& r : resolutions) {
    ordered_json paths = ordered_json::array();
    for (const auto& p : r.resolution.paths) paths.push_back(describe_path(p));
    resolutions_json.push_back({{"step", r.step},
                                {"additions", iri_list(r.resolution.additions)},
                                {"paths", paths},
                                {"unresolved", string_list(r.resolution.unresolved)}});
  }
  ordered_json doc = {
      {"question", question},
      {"provider", provider_settings},
      {"config",
       {{"context_budget_tokens", config.context_budget_tokens},
        {"max_refinement_steps", config.max_refinement_steps},
        {"max_hops", config.max_hops},
        {"catalog_style", std::string(ontoreveal::to_string(config.catalog_style))}}},
      {"exchanges", exchanges_json},
      {"slices", slices_json},
      {"resolutions", resolutions_json},
      {"outcome", outcome_json(outcome)},
  };
  return doc.dump(2) + "\n";
}

SessionLog run_pipeline(std::string_view question, const Ontology& ontology, const LlmProvider& provider,
                        const PipelineConfig& config) {
  config.validate();
  if (text_util::trim(question).empty()) throw std::invalid_argument("question must not be empty");
  return Session(question, ontology, provider, config).run();
}

}  // namespace ontoreveal
