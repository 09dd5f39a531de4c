#include "ontoreveal/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "ontoreveal/ontology.hpp"
#include "ontoreveal/pathfinder.hpp"
#include "ontoreveal/pipeline.hpp"
#include "ontoreveal/slicer.hpp"
#include "ontoreveal/sparql_check.hpp"
#include "ontoreveal/synthgen.hpp"
#include "ontoreveal/turtle.hpp"
#include "ontoreveal/verbalizer.hpp"
#include "text_util.hpp"

namespace ontoreveal::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised for problems that map straight to an exit code.
struct Exit {
  int code;
  std::string message;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kInputError, "cannot read " + path.string()};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Config {
  std::optional<fs::path> ontology_path;
  std::optional<fs::path> transcript;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> api_key;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  std::size_t context_budget_tokens = kDefaultContextBudgetTokens;
  int max_refinement_steps = kDefaultMaxRefinementSteps;
  int max_hops = kDefaultMaxHops;
  fs::path log_dir = "ontoreveal-logs";
  CatalogStyle catalog_style = CatalogStyle::compact;
};

/// Values given on the command line; unset ones fall through to the file.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> ontology;
  std::optional<std::string> transcript;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<double> timeout_seconds;
  std::optional<int> max_retries;
  std::optional<std::size_t> budget;
  std::optional<int> max_steps;
  std::optional<int> max_hops;
  std::optional<std::string> log_dir;
  std::optional<std::string> catalog_style;
};

template <typename T>
T config_value(const json& doc, const char* key, const std::string& file) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Exit{kUsageError, file + ": \"" + key + "\" has the wrong type"};
  }
}

void apply_file(Config& cfg, const fs::path& file) {
  json doc = json::parse(read_file(file), nullptr, false);
  const std::string name = file.string();
  if (doc.is_discarded() || !doc.is_object()) throw Exit{kUsageError, name + ": not a JSON object"};
  const fs::path base = file.parent_path();
  auto relative = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  for (const auto& [key, value] : doc.items()) {
    if (key == "ontology_path") {
      cfg.ontology_path = relative(config_value<std::string>(doc, "ontology_path", name));
    } else if (key == "log_dir") {
      cfg.log_dir = relative(config_value<std::string>(doc, "log_dir", name));
    } else if (key == "context_budget_tokens") {
      cfg.context_budget_tokens = config_value<std::size_t>(doc, "context_budget_tokens", name);
    } else if (key == "max_refinement_steps") {
      cfg.max_refinement_steps = config_value<int>(doc, "max_refinement_steps", name);
    } else if (key == "max_hops") {
      cfg.max_hops = config_value<int>(doc, "max_hops", name);
    } else if (key == "catalog_style") {
      auto style = parse_catalog_style(config_value<std::string>(doc, "catalog_style", name));
      if (!style) throw Exit{kUsageError, name + ": unknown catalog_style"};
      cfg.catalog_style = *style;
    } else if (key == "provider") {
      if (!value.is_object()) throw Exit{kUsageError, name + ": \"provider\" must be an object"};
      for (const auto& [pkey, pvalue] : value.items()) {
        if (pkey == "endpoint") {
          cfg.endpoint = config_value<std::string>(value, "endpoint", name);
        } else if (pkey == "model") {
          cfg.model = config_value<std::string>(value, "model", name);
        } else if (pkey == "timeout_seconds") {
          cfg.timeout_seconds = config_value<double>(value, "timeout_seconds", name);
        } else if (pkey == "max_retries") {
          cfg.max_retries = config_value<int>(value, "max_retries", name);
        } else if (pkey == "transcript") {
          cfg.transcript = relative(config_value<std::string>(value, "transcript", name));
        } else if (pkey == "api_key") {
          throw Exit{kUsageError, name + ": credentials are read only from " + std::string(kApiKeyVariable)};
        } else {
          throw Exit{kUsageError, name + ": unknown provider key \"" + pkey + "\""};
        }
      }
    } else {
      throw Exit{kUsageError, name + ": unknown key \"" + key + "\""};
    }
  }
}

Config resolve_config(const Flags& flags, const std::map<std::string, std::string>& env) {
  Config cfg;
  std::optional<fs::path> file;
  bool explicit_file = true;
  if (flags.config) {
    file = *flags.config;
  } else if (auto it = env.find(kConfigVariable); it != env.end() && !it->second.empty()) {
    file = it->second;
  } else {
    file = kDefaultConfigFile;
    explicit_file = false;
  }
  if (fs::exists(*file)) {
    apply_file(cfg, *file);
  } else if (explicit_file) {
    throw Exit{kUsageError, "config file not found: " + file->string()};
  }

  if (auto it = env.find(kApiKeyVariable); it != env.end() && !it->second.empty()) cfg.api_key = it->second;

  if (flags.ontology) cfg.ontology_path = *flags.ontology;
  if (flags.transcript) cfg.transcript = *flags.transcript;
  if (flags.endpoint) cfg.endpoint = *flags.endpoint;
  if (flags.model) cfg.model = *flags.model;
  if (flags.timeout_seconds) cfg.timeout_seconds = *flags.timeout_seconds;
  if (flags.max_retries) cfg.max_retries = *flags.max_retries;
  if (flags.budget) cfg.context_budget_tokens = *flags.budget;
  if (flags.max_steps) cfg.max_refinement_steps = *flags.max_steps;
  if (flags.max_hops) cfg.max_hops = *flags.max_hops;
  if (flags.log_dir) cfg.log_dir = *flags.log_dir;
  if (flags.catalog_style) {
    auto style = parse_catalog_style(*flags.catalog_style);
    if (!style) throw Exit{kUsageError, "unknown catalog style: " + *flags.catalog_style};
    cfg.catalog_style = *style;
  }

  if (cfg.context_budget_tokens == 0) throw Exit{kUsageError, "context budget must be positive"};
  if (cfg.max_refinement_steps <= 0) throw Exit{kUsageError, "max refinement steps must be positive"};
  if (cfg.max_hops <= 0) throw Exit{kUsageError, "max hops must be positive"};
  if (cfg.timeout_seconds <= 0) throw Exit{kUsageError, "timeout must be positive"};
  if (cfg.max_retries < 0) throw Exit{kUsageError, "max retries must not be negative"};
  return cfg;
}

Ontology load_ontology(const Config& cfg, std::ostream& err) {
  if (!cfg.ontology_path) throw Exit{kUsageError, "no ontology given (use --ontology or ontology_path in the config)"};
  const auto& path = *cfg.ontology_path;
  auto parsed = parse_turtle(read_file(path));
  for (const auto& d : parsed.diagnostics) err << path.string() << ":" << format_diagnostic(d) << "\n";
  if (!parsed.ok()) {
    throw Exit{kInputError, path.string() + ": " + std::to_string(parsed.error_count()) + " error(s)"};
  }
  return std::move(*parsed.ontology);
}

/// An absolute IRI or prefixed name naming an ontology element.
std::optional<Iri> literal_element(const Ontology& ontology, const std::string& text) {
  // "tel:Customer" is both a valid absolute IRI and a prefixed name; try both.
  if (Iri::is_absolute(text) && ontology.contains(Iri(text))) return Iri(text);
  if (auto colon = text.find(':'); colon != std::string::npos) {
    auto it = ontology.prefixes().find(text.substr(0, colon));
    if (it != ontology.prefixes().end()) {
      std::string expanded = it->second.str() + text.substr(colon + 1);
      if (Iri::is_absolute(expanded) && ontology.contains(Iri(expanded))) return Iri(expanded);
    }
  }
  return std::nullopt;
}

/// Literal IRIs first, then the name index.
std::set<Iri> lookup(const Ontology& ontology, const NameIndex& index, const std::string& name) {
  if (auto iri = literal_element(ontology, name)) return {*iri};
  return resolve_name(index, name);
}

std::set<Iri> read_slice_file(const Ontology& ontology, const fs::path& path) {
  std::istringstream in(read_file(path));
  std::set<Iri> elements;
  std::vector<std::string> unknown;
  std::string line;
  while (std::getline(in, line)) {
    std::string entry = text_util::trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    if (auto iri = literal_element(ontology, entry)) {
      elements.insert(*iri);
    } else {
      unknown.push_back(entry);
    }
  }
  if (!unknown.empty()) {
    std::string msg = path.string() + ": not in the ontology:";
    for (const auto& u : unknown) msg += " " + u;
    throw Exit{kInputError, msg};
  }
  return elements;
}

void print_slice(std::ostream& out, const Slice& slice) {
  auto group = [&](const char* title, const std::set<Iri>& iris) {
    out << "# " << title << "\n";
    for (const auto& i : iris) out << i.str() << "\n";
  };
  group("concepts", slice.concepts);
  group("relationships", slice.relationships);
  group("attributes", slice.attributes);
}

int exit_code_for(FailureKind kind) {
  switch (kind) {
    case FailureKind::no_progress: return kNoProgress;
    case FailureKind::step_limit: return kStepLimit;
    case FailureKind::nonconforming_query: return kNonconformingQuery;
    case FailureKind::provider_error: return kProviderError;
    case FailureKind::budget_exceeded: return kBudgetExceeded;
    case FailureKind::unparseable_response: return kUnparseableResponse;
  }
  return kInputError;
}

std::string utc_stamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path write_log(const fs::path& dir, const SessionLog& log) {
  fs::create_directories(dir);
  std::string stem = utc_stamp() + "-" + prompt_hash(log.question).substr(0, 12);
  fs::path path = dir / (stem + ".json");
  for (int n = 2; fs::exists(path); ++n) path = dir / (stem + "-" + std::to_string(n) + ".json");
  std::ofstream f(path, std::ios::binary);
  f << log.to_json();
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return path;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Config& cfg, std::ostream& out, std::ostream& err) {
  Ontology o = load_ontology(cfg, err);
  out << "concepts: " << o.concepts().size() << "\n"
      << "relationships: " << o.relationships().size() << "\n"
      << "attributes: " << o.attributes().size() << "\n"
      << "axioms: " << axiom_count(o) << "\n";
  return kOk;
}

int cmd_ask(const std::string& question, const Config& cfg, std::ostream& out, std::ostream& err) {
  if (text_util::trim(question).empty()) throw Exit{kUsageError, "the question must not be empty"};
  Ontology o = load_ontology(cfg, err);

  LlmProvider provider;
  if (cfg.transcript) {
    try {
      provider = LlmProvider::scripted(Transcript::from_json(read_file(*cfg.transcript)));
    } catch (const std::invalid_argument& e) {
      throw Exit{kInputError, cfg.transcript->string() + ": " + e.what()};
    }
  } else if (cfg.endpoint && cfg.model) {
    provider = LlmProvider::live(*cfg.endpoint, *cfg.model);
    provider.api_key = cfg.api_key;
  } else {
    throw Exit{kUsageError, "no provider configured (give --transcript, or an endpoint and model)"};
  }
  provider.timeout_seconds = cfg.timeout_seconds;
  provider.max_retries = cfg.max_retries;

  PipelineConfig pc;
  pc.context_budget_tokens = cfg.context_budget_tokens;
  pc.max_refinement_steps = cfg.max_refinement_steps;
  pc.max_hops = cfg.max_hops;
  pc.catalog_style = cfg.catalog_style;

  SessionLog log = run_pipeline(question, o, provider, pc);
  try {
    auto path = write_log(cfg.log_dir, log);
    err << "session log: " << path.string() << "\n";
  } catch (const std::exception& e) {
    err << "warning: session log not written: " << e.what() << "\n";
  }

  if (const auto* done = std::get_if<state::Done>(&log.outcome)) {
    out << done->query;
    if (!done->query.empty() && done->query.back() != '\n') out << "\n";
    return kOk;
  }
  const auto& failed = std::get<state::Failed>(log.outcome);
  err << "failed: " << to_string(failed.reason) << ": " << failed.detail << "\n";
  return exit_code_for(failed.reason);
}

int cmd_slice(const std::vector<std::string>& names, bool turtle, const Config& cfg, std::ostream& out,
              std::ostream& err) {
  Ontology o = load_ontology(cfg, err);
  NameIndex index = build_index(o);
  std::set<Iri> grounded;
  bool missing = false;
  for (const auto& name : names) {
    auto found = lookup(o, index, name);
    if (found.empty()) {
      err << "unresolved: " << name << "\n";
      missing = true;
    }
    grounded.insert(found.begin(), found.end());
  }
  if (missing) return kInputError;
  Slice slice = seed_slice(o, grounded);
  if (turtle) {
    out << verbalize_slice(o, slice);
  } else {
    print_slice(out, slice);
  }
  return kOk;
}

int cmd_path(const std::string& from, const std::string& to, const Config& cfg, std::ostream& out,
             std::ostream& err) {
  Ontology o = load_ontology(cfg, err);
  NameIndex index = build_index(o);
  auto concepts_named = [&](const std::string& name) {
    std::set<Iri> out_set;
    for (const auto& iri : lookup(o, index, name)) {
      if (o.is_concept(iri)) out_set.insert(iri);
    }
    if (out_set.empty()) throw Exit{kInputError, "unresolved: " + name};
    return out_set;
  };
  auto sources = concepts_named(from);
  auto targets = concepts_named(to);
  std::optional<Path> best;
  for (const auto& s : sources) {
    for (const auto& t : targets) {
      auto p = find_path(o, s, t, cfg.max_hops);
      if (p && (!best || p->length() < best->length())) best = std::move(p);
    }
  }
  if (!best) {
    err << "no path from " << from << " to " << to << " within " << cfg.max_hops << " hops\n";
    return kInputError;
  }
  out << describe_path(*best) << "\n";
  return kOk;
}

int cmd_validate(const fs::path& query_file, const fs::path& slice_file, const Config& cfg, std::ostream& out,
                 std::ostream& err) {
  Ontology o = load_ontology(cfg, err);
  std::string query = read_file(query_file);
  Slice slice = seed_slice(o, read_slice_file(o, slice_file));
  auto violations = validate_query(query, o, slice);
  for (const auto& v : violations) out << format_violation(v) << "\n";
  return violations.empty() ? kOk : kNonconformingQuery;
}

int cmd_verbalize(bool catalog, const std::optional<std::string>& slice_file, bool estimate, const Config& cfg,
                  std::ostream& out, std::ostream& err) {
  Ontology o = load_ontology(cfg, err);
  std::string text;
  if (catalog) {
    text = verbalize_catalog(o, cfg.catalog_style);
  } else {
    Slice slice = slice_file ? seed_slice(o, read_slice_file(o, *slice_file)) : full_slice(o);
    text = verbalize_slice(o, slice);
  }
  out << text;
  if (estimate) {
    auto e = estimate_tokens(text);
    err << "chars: " << e.chars << ", estimated tokens: " << e.estimated_tokens << "\n";
  }
  return kOk;
}

int cmd_gen(const GenSpec& spec, const std::optional<std::string>& output, std::ostream& out) {
  Ontology o;
  try {
    o = generate(spec);
  } catch (const InvalidSpecError& e) {
    throw Exit{kUsageError, std::string("invalid spec: ") + e.what()};
  }
  std::string ttl = serialize_turtle(o);
  if (!output) {
    out << ttl;
    return kOk;
  }
  std::ofstream f(*output, std::ios::binary);
  f << ttl;
  if (!f) throw Exit{kInputError, "cannot write " + *output};
  return kOk;
}

void add_config_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Config file (JSON)");
  cmd->add_option("--ontology", f.ontology, "Ontology file (Turtle)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env) {
  CLI::App app{"Natural-language questions to SPARQL over large ontologies", "ontoreveal"};
  app.require_subcommand(1);
  Flags flags;

  auto* ingest = app.add_subcommand("ingest", "Parse an ontology and print its size");
  std::string ingest_path;
  ingest->add_option("file", ingest_path, "Ontology file (Turtle)")->required();

  auto* ask = app.add_subcommand("ask", "Translate a question into SPARQL");
  std::string question;
  ask->add_option("question", question, "Natural-language question")->required();
  add_config_flags(ask, flags);
  ask->add_option("--transcript", flags.transcript, "Replay responses from a transcript file");
  ask->add_option("--endpoint", flags.endpoint, "Chat-completions endpoint URL");
  ask->add_option("--model", flags.model, "Model name");
  ask->add_option("--timeout", flags.timeout_seconds, "Per-request timeout in seconds");
  ask->add_option("--max-retries", flags.max_retries, "Retries on transport failure");
  ask->add_option("--budget", flags.budget, "Context budget in estimated tokens");
  ask->add_option("--max-steps", flags.max_steps, "Refinement step limit");
  ask->add_option("--max-hops", flags.max_hops, "Longest path used to connect a missing link");
  ask->add_option("--log-dir", flags.log_dir, "Directory for session logs");
  ask->add_option("--catalog-style", flags.catalog_style, "names-only, compact or descriptive");

  auto* slice = app.add_subcommand("slice", "Print the closed slice seeded by names");
  std::vector<std::string> slice_names;
  bool slice_turtle = false;
  slice->add_option("names", slice_names, "Element names, prefixed names or IRIs")->required();
  slice->add_flag("--turtle", slice_turtle, "Print the slice as Turtle");
  add_config_flags(slice, flags);

  auto* path = app.add_subcommand("path", "Print the shortest path between two concepts");
  std::string path_from, path_to;
  path->add_option("from", path_from, "Concept name, prefixed name or IRI")->required();
  path->add_option("to", path_to, "Concept name, prefixed name or IRI")->required();
  path->add_option("--max-hops", flags.max_hops, "Longest path considered");
  add_config_flags(path, flags);

  auto* validate = app.add_subcommand("validate", "Check a SPARQL query against a slice");
  std::string query_file, slice_file;
  validate->add_option("query", query_file, "SPARQL query file")->required();
  validate->add_option("slice", slice_file, "Slice file: one IRI or prefixed name per line")->required();
  add_config_flags(validate, flags);

  auto* gen = app.add_subcommand("gen", "Generate a synthetic ontology");
  GenSpec spec;
  std::optional<std::string> gen_output;
  gen->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  gen->add_option("--concepts", spec.n_concepts, "Number of classes")->capture_default_str();
  gen->add_option("--relationships", spec.n_relationships, "Number of object properties")->capture_default_str();
  gen->add_option("--attributes", spec.n_attributes, "Number of datatype properties")->capture_default_str();
  gen->add_option("--depth", spec.hierarchy_depth, "Subclass chain length")->capture_default_str();
  gen->add_option("--components", spec.connectivity.components, "1 means connected")->capture_default_str();
  gen->add_option("-o,--output", gen_output, "Output file (default: standard output)");

  auto* verbalize = app.add_subcommand("verbalize", "Print the catalog or the Turtle verbalization");
  bool want_catalog = false, want_formal = false, want_estimate = false;
  std::optional<std::string> verbalize_slice_file;
  auto* catalog_flag = verbalize->add_flag("--catalog", want_catalog, "Informal name catalog");
  auto* formal_flag = verbalize->add_flag("--formal", want_formal, "Turtle of the ontology or a slice");
  catalog_flag->excludes(formal_flag);
  verbalize->add_option("--style", flags.catalog_style, "Catalog style: names-only, compact, descriptive");
  verbalize->add_option("--slice", verbalize_slice_file, "Slice file for --formal");
  verbalize->add_flag("--estimate", want_estimate, "Print the token estimate to standard error");
  add_config_flags(verbalize, flags);

  std::vector<const char*> argv = {"ontoreveal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*ingest) {
      Config cfg;
      cfg.ontology_path = ingest_path;
      return cmd_ingest(cfg, out, err);
    }
    if (*gen) return cmd_gen(spec, gen_output, out);

    Config cfg = resolve_config(flags, env);
    if (*ask) return cmd_ask(question, cfg, out, err);
    if (*slice) return cmd_slice(slice_names, slice_turtle, cfg, out, err);
    if (*path) return cmd_path(path_from, path_to, cfg, out, err);
    if (*validate) return cmd_validate(query_file, slice_file, cfg, out, err);
    if (*verbalize) {
      if (!want_catalog && !want_formal) throw Exit{kUsageError, "verbalize needs --catalog or --formal"};
      return cmd_verbalize(want_catalog, verbalize_slice_file, want_estimate, cfg, out, err);
    }
  } catch (const Exit& e) {
    if (!e.message.empty()) err << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsageError;
}

}  // namespace ontoreveal::cli
