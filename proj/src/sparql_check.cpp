#include "ontoreveal/sparql_check.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace ontoreveal {

namespace {

enum class T {
  end,
  iri,       // <...>; text is the content
  pname,     // prefix:local
  var,       // ?x; text is "x"
  string,
  lang_tag,
  number,
  word,      // bare identifier / keyword
  punct,     // text holds the operator
  error,
};

struct Token {
  T kind = T::end;
  std::string text;
  std::string source;  // as written
  SourceLocation loc;
};

bool is_name_start(unsigned char c) { return std::isalpha(c) != 0 || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) != 0 || c == '_' || c == '-' || c >= 0x80; }

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view in) : in_(in) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      Token t = next();
      out.push_back(t);
      if (t.kind == T::end || t.kind == T::error) break;
    }
    return out;
  }

 private:
  unsigned char peek(std::size_t k = 0) const {
    return pos_ + k < in_.size() ? static_cast<unsigned char>(in_[pos_ + k]) : 0;
  }
  void advance() {
    unsigned char c = peek();
    ++pos_;
    if (c == '\n') {
      ++loc_.line;
      loc_.column = 1;
    } else if ((c & 0xC0) != 0x80) {
      ++loc_.column;
    }
  }
  Token make(T kind, std::size_t start, SourceLocation loc, std::string text) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.source = std::string(in_.substr(start, pos_ - start));
    t.loc = loc;
    return t;
  }

  Token next() {
    while (pos_ < in_.size()) {
      unsigned char c = peek();
      if (c == '#') {
        while (pos_ < in_.size() && peek() != '\n') advance();
      } else if (std::isspace(c) != 0) {
        advance();
      } else {
        break;
      }
    }
    std::size_t start = pos_;
    SourceLocation loc = loc_;
    if (pos_ >= in_.size()) return make(T::end, start, loc, "");
    unsigned char c = peek();

    if ((c == '?' || c == '$') && is_name_char(peek(1))) {
      advance();
      std::string name;
      while (is_name_char(peek())) {
        name.push_back(static_cast<char>(peek()));
        advance();
      }
      return make(T::var, start, loc, name);
    }
    if (c == '<') {
      std::size_t k = 1;
      while (pos_ + k < in_.size()) {
        unsigned char d = peek(k);
        if (d == '>' || d <= 0x20 || d == '<' || d == '"' || d == '{' || d == '}' || d == '|' || d == '^' ||
            d == '`' || d == '\\') {
          break;
        }
        ++k;
      }
      if (peek(k) == '>') {
        advance();
        std::string value;
        while (peek() != '>') {
          value.push_back(static_cast<char>(peek()));
          advance();
        }
        advance();
        return make(T::iri, start, loc, value);
      }
    }
    if (c == '"' || c == '\'') return string_literal(start, loc);
    if (c == '@' && std::isalpha(peek(1)) != 0) {
      advance();
      std::string tag;
      while (std::isalnum(peek()) != 0 || peek() == '-') {
        tag.push_back(static_cast<char>(peek()));
        advance();
      }
      return make(T::lang_tag, start, loc, tag);
    }
    if (std::isdigit(c) != 0 || (c == '.' && std::isdigit(peek(1)) != 0)) {
      std::string num;
      while (std::isdigit(peek()) != 0) {
        num.push_back(static_cast<char>(peek()));
        advance();
      }
      if (peek() == '.' && std::isdigit(peek(1)) != 0) {
        num.push_back('.');
        advance();
        while (std::isdigit(peek()) != 0) {
          num.push_back(static_cast<char>(peek()));
          advance();
        }
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (std::isdigit(peek(1)) != 0 || ((peek(1) == '+' || peek(1) == '-') && std::isdigit(peek(2)) != 0))) {
        num.push_back(static_cast<char>(peek()));
        advance();
        if (peek() == '+' || peek() == '-') {
          num.push_back(static_cast<char>(peek()));
          advance();
        }
        while (std::isdigit(peek()) != 0) {
          num.push_back(static_cast<char>(peek()));
          advance();
        }
      }
      return make(T::number, start, loc, num);
    }
    if (is_name_start(c) || c == ':') {
      std::string word;
      while (is_name_char(peek()) || (peek() == '.' && is_name_char(peek(1)))) {
        word.push_back(static_cast<char>(peek()));
        advance();
      }
      if (peek() == ':') {
        advance();
        std::string local;
        while (is_name_char(peek()) || peek() == ':' ||
               (peek() == '.' && (is_name_char(peek(1)) || peek(1) == ':')) ||
               (peek() == '%' && std::isxdigit(peek(1)) != 0 && std::isxdigit(peek(2)) != 0)) {
          local.push_back(static_cast<char>(peek()));
          advance();
        }
        return make(T::pname, start, loc, word + ":" + local);
      }
      return make(T::word, start, loc, word);
    }
    static constexpr std::string_view kTwo[] = {"&&", "||", "!=", "<=", ">=", "^^"};
    for (auto op : kTwo) {
      if (in_.substr(pos_, 2) == op) {
        advance();
        advance();
        return make(T::punct, start, loc, std::string(op));
      }
    }
    if (std::string_view("{}()[].;,*/^|+-!=<>?").find(static_cast<char>(c)) != std::string_view::npos) {
      advance();
      return make(T::punct, start, loc, std::string(1, static_cast<char>(c)));
    }
    advance();
    return make(T::error, start, loc, "unexpected character");
  }

  Token string_literal(std::size_t start, SourceLocation loc) {
    unsigned char q = peek();
    bool long_form = peek(1) == q && peek(2) == q;
    for (int i = 0; i < (long_form ? 3 : 1); ++i) advance();
    std::string value;
    while (true) {
      if (pos_ >= in_.size()) return make(T::error, start, loc, "unterminated string");
      unsigned char c = peek();
      if (long_form ? (c == q && peek(1) == q && peek(2) == q) : c == q) {
        for (int i = 0; i < (long_form ? 3 : 1); ++i) advance();
        break;
      }
      if (!long_form && (c == '\n' || c == '\r')) return make(T::error, start, loc, "newline in string");
      if (c == '\\') {
        advance();
        if (pos_ >= in_.size()) return make(T::error, start, loc, "unterminated string");
      }
      value.push_back(static_cast<char>(peek()));
      advance();
    }
    return make(T::string, start, loc, value);
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  SourceLocation loc_;
};

struct Failure {
  ConformanceViolation violation;
};

constexpr std::size_t kMaxDepth = 64;

const std::set<std::string> kBuiltins = {
    "STR",       "LANG",      "LANGMATCHES", "DATATYPE",  "BOUND",    "IRI",       "URI",     "BNODE",
    "RAND",      "ABS",       "CEIL",        "FLOOR",     "ROUND",    "CONCAT",    "STRLEN",  "UCASE",
    "LCASE",     "ENCODE_FOR_URI", "CONTAINS", "STRSTARTS", "STRENDS", "STRBEFORE", "STRAFTER", "YEAR",
    "MONTH",     "DAY",       "HOURS",       "MINUTES",   "SECONDS",  "TIMEZONE",  "TZ",      "NOW",
    "UUID",      "STRUUID",   "MD5",         "SHA1",      "SHA256",   "SHA384",    "SHA512",  "COALESCE",
    "IF",        "STRLANG",   "STRDT",       "SAMETERM",  "ISIRI",    "ISURI",     "ISBLANK", "ISLITERAL",
    "ISNUMERIC", "REGEX",     "SUBSTR",      "REPLACE",
};

const std::map<std::string, QueryFeature> kAggregates = {
    {"COUNT", QueryFeature::aggregate_count}, {"SUM", QueryFeature::aggregate_sum},
    {"AVG", QueryFeature::aggregate_avg},     {"MIN", QueryFeature::aggregate_min},
    {"MAX", QueryFeature::aggregate_max},
};

const std::map<std::string, std::string> kImplicitPrefixes = {
    {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
    {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
    {"owl", "http://www.w3.org/2002/07/owl#"},
    {"xsd", "http://www.w3.org/2001/XMLSchema#"},
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  SkeletonResult run() {
    try {
      prologue();
      select_query(0);
      if (at_word("VALUES")) fail_here("VALUES is outside the supported subset");
      if (cur().kind != T::end) fail_here("unexpected trailing input");
    } catch (const Failure& f) {
      violations_.push_back(f.violation);
    }
    if (!violations_.empty()) {
      std::stable_sort(violations_.begin(), violations_.end(),
                       [](const auto& a, const auto& b) { return a.location < b.location; });
      return violations_;
    }
    return std::move(skeleton_);
  }

 private:
  // -- token helpers --------------------------------------------------------
  const Token& cur() const { return tokens_[pos_]; }
  const Token& ahead(std::size_t k) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
  void shift() {
    if (tokens_[pos_].kind != T::end && tokens_[pos_].kind != T::error) ++pos_;
  }
  bool at_punct(std::string_view p) const { return cur().kind == T::punct && cur().text == p; }
  bool at_word(std::string_view w) const { return cur().kind == T::word && upper(cur().text) == w; }
  bool accept_punct(std::string_view p) {
    if (!at_punct(p)) return false;
    shift();
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    shift();
    return true;
  }

  [[noreturn]] void fail_here(std::string message) {
    const Token& t = cur();
    std::string offending = t.source;
    if (t.kind == T::end) message += " (unexpected end of query)";
    if (t.kind == T::error) message = t.text;
    throw Failure{{ViolationKind::parse_error, offending, t.loc, std::move(message)}};
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail_here("expected '" + std::string(p) + "'");
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail_here("expected " + std::string(w));
  }
  void enter() {
    if (++depth_ > kMaxDepth) fail_here("query nested too deeply");
  }
  void leave() { --depth_; }

  // -- IRIs -----------------------------------------------------------------
  std::optional<std::string> resolve(const Token& t) {
    if (t.kind == T::iri) {
      if (Iri::is_absolute(t.text)) return t.text;
      if (base_) {
        auto slash = base_->rfind('/');
        auto joined = (t.text.starts_with('#') ? base_->substr(0, base_->find('#')) : base_->substr(0, slash + 1)) + t.text;
        if (Iri::is_absolute(joined)) return joined;
      }
      violations_.push_back({ViolationKind::unprefixed_name, t.source, t.loc, "relative IRI without BASE"});
      return std::nullopt;
    }
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    std::string local = t.text.substr(colon + 1);
    auto it = skeleton_.prefix_decls.find(prefix);
    if (it != skeleton_.prefix_decls.end()) return it->second.str() + local;
    auto implicit = kImplicitPrefixes.find(prefix);
    if (implicit != kImplicitPrefixes.end()) return implicit->second + local;
    violations_.push_back({ViolationKind::unprefixed_name, t.source, t.loc, "undeclared prefix '" + prefix + ":'"});
    return std::nullopt;
  }

  bool at_iri() const { return cur().kind == T::iri || cur().kind == T::pname; }

  // Consumes an IRI token; returns the resolved IRI when valid.
  std::optional<std::string> iri() {
    Token t = cur();
    shift();
    auto resolved = resolve(t);
    if (resolved && !Iri::is_absolute(*resolved)) return std::nullopt;
    return resolved;
  }

  void record(std::set<Iri>& into, const std::string& value, const Token& t) {
    if (vocab::is_builtin(value)) return;
    Iri iri(value);
    into.insert(iri);
    skeleton_.occurrences.try_emplace(iri, IriOccurrence{t.source, t.loc});
  }

  void bare_word(const Token& t) {
    violations_.push_back({ViolationKind::unprefixed_name, t.source, t.loc, "name without prefix"});
  }

  // -- grammar --------------------------------------------------------------
  void prologue() {
    while (true) {
      if (accept_word("PREFIX")) {
        if (cur().kind != T::pname || cur().text.back() != ':') fail_here("expected prefix name ending in ':'");
        std::string prefix = cur().text.substr(0, cur().text.size() - 1);
        shift();
        if (cur().kind != T::iri) fail_here("expected IRI in PREFIX declaration");
        const Token t = cur();
        shift();
        auto resolved = resolve(t);
        if (resolved) skeleton_.prefix_decls.insert_or_assign(prefix, Iri(*resolved));
      } else if (accept_word("BASE")) {
        if (cur().kind != T::iri || !Iri::is_absolute(cur().text)) fail_here("expected absolute IRI after BASE");
        base_ = cur().text;
        shift();
      } else {
        return;
      }
    }
  }

  void select_query(int level) {
    if (!at_word("SELECT")) {
      if (at_word("CONSTRUCT") || at_word("ASK") || at_word("DESCRIBE")) {
        fail_here("only SELECT queries are supported");
      }
      fail_here("expected SELECT");
    }
    shift();
    if (!accept_word("DISTINCT")) accept_word("REDUCED");
    projection();
    if (!accept_word("WHERE") && !at_punct("{")) fail_here("expected WHERE clause");
    group_graph_pattern(level);
    solution_modifiers();
  }

  void projection() {
    if (accept_punct("*")) return;
    std::size_t items = 0;
    while (true) {
      if (cur().kind == T::var) {
        skeleton_.variables.insert(cur().text);
        shift();
      } else if (at_punct("(")) {
        shift();
        expression();
        expect_word("AS");
        if (cur().kind != T::var) fail_here("expected variable after AS");
        skeleton_.variables.insert(cur().text);
        shift();
        expect_punct(")");
      } else {
        break;
      }
      ++items;
    }
    if (items == 0) {
      // Recover so later problems (such as truncation) are reported as well.
      const Token& t = cur();
      violations_.push_back({ViolationKind::parse_error, t.source, t.loc, "expected projection after SELECT"});
    }
  }

  void group_graph_pattern(int level) {
    enter();
    expect_punct("{");
    if (at_word("SELECT")) {
      if (level >= 1) fail_here("subqueries may only be nested one level deep");
      skeleton_.features.insert(QueryFeature::subquery);
      select_query(level + 1);
      expect_punct("}");
      leave();
      return;
    }
    while (!accept_punct("}")) {
      if (cur().kind == T::end) fail_here("expected '}'");
      if (at_punct("{")) {
        group_graph_pattern(level);
        while (accept_word("UNION")) {
          skeleton_.features.insert(QueryFeature::union_);
          group_graph_pattern(level);
        }
      } else if (accept_word("OPTIONAL")) {
        skeleton_.features.insert(QueryFeature::optional);
        group_graph_pattern(level);
      } else if (accept_word("FILTER")) {
        skeleton_.features.insert(QueryFeature::filter);
        constraint();
      } else if (accept_word("BIND")) {
        expect_punct("(");
        expression();
        expect_word("AS");
        if (cur().kind != T::var) fail_here("expected variable after AS");
        skeleton_.variables.insert(cur().text);
        shift();
        expect_punct(")");
      } else if (at_word("MINUS") || at_word("GRAPH") || at_word("SERVICE") || at_word("VALUES")) {
        fail_here(upper(cur().text) + " is outside the supported subset");
      } else if (accept_punct(".")) {
        continue;
      } else {
        triples_same_subject();
      }
    }
    leave();
  }

  void triples_same_subject() {
    term("subject");
    property_list();
  }

  void property_list() {
    verb_object_list();
    while (accept_punct(";")) {
      if (at_punct(";")) continue;
      if (at_punct(".") || at_punct("}") || at_punct("]")) return;
      verb_object_list();
    }
  }

  void verb_object_list() {
    // A verb that is exactly 'a' or rdf:type makes the objects classes.
    bool type_pattern = false;
    if (cur().kind == T::var) {
      skeleton_.variables.insert(cur().text);
      shift();
    } else {
      type_pattern = path();
    }
    do {
      object(type_pattern);
    } while (accept_punct(","));
  }

  // Returns true when the path is the single step rdf:type.
  bool path() {
    enter();
    std::size_t elements = 0;
    bool single_type = false;
    bool structured = false;
    do {
      bool inverse = accept_punct("^");
      structured = structured || inverse;
      single_type = path_primary(structured);
      ++elements;
      if (at_punct("*") || at_punct("+") || at_punct("?")) {
        fail_here("property path modifiers are outside the supported subset");
      }
      if (inverse) single_type = false;
    } while (accept_punct("/"));
    if (at_punct("|")) fail_here("alternative property paths are outside the supported subset");
    if (elements > 1 || structured) skeleton_.features.insert(QueryFeature::property_path);
    leave();
    return elements == 1 && !structured && single_type;
  }

  bool path_primary(bool& structured) {
    if (cur().kind == T::word && cur().text == "a") {
      shift();
      return true;
    }
    if (at_iri()) {
      Token t = cur();
      auto value = iri();
      if (!value) return false;
      if (*value == vocab::kRdfType) return true;
      record(skeleton_.predicate_iris, *value, t);
      return false;
    }
    if (accept_punct("(")) {
      structured = true;
      path();
      expect_punct(")");
      return false;
    }
    if (at_punct("!")) fail_here("negated property sets are outside the supported subset");
    if (cur().kind == T::word && !kBuiltins.contains(upper(cur().text))) {
      Token t = cur();
      shift();
      bare_word(t);
      return false;
    }
    fail_here("expected predicate");
  }

  void object(bool type_pattern) {
    if (type_pattern && at_iri()) {
      Token t = cur();
      auto value = iri();
      if (value) record(skeleton_.class_iris, *value, t);
      return;
    }
    if (type_pattern && cur().kind == T::word && !is_keyword_term(cur().text)) {
      Token t = cur();
      shift();
      bare_word(t);
      return;
    }
    term("object");
  }

  static bool is_keyword_term(const std::string& word) { return word == "true" || word == "false"; }

  void term(std::string_view role) {
    switch (cur().kind) {
      case T::var:
        skeleton_.variables.insert(cur().text);
        shift();
        return;
      case T::iri:
      case T::pname: iri(); return;
      case T::string:
      case T::number: literal(); return;
      case T::word:
        if (is_keyword_term(cur().text)) {
          shift();
          return;
        }
        if (isupper_keyword(cur().text)) fail_here("expected " + std::string(role));
        bare_word(cur());
        shift();
        return;
      case T::punct:
        if (at_punct("[") || at_punct("(")) fail_here("blank nodes and collections are outside the supported subset");
        if ((at_punct("-") || at_punct("+")) && ahead(1).kind == T::number) {
          shift();
          shift();
          return;
        }
        [[fallthrough]];
      default: fail_here("expected " + std::string(role));
    }
  }

  static bool isupper_keyword(const std::string& word) {
    static const std::set<std::string> kKeywords = {"SELECT", "WHERE",  "FILTER", "OPTIONAL", "UNION", "GROUP",
                                                    "ORDER",  "HAVING", "LIMIT",  "OFFSET",   "BIND",  "AS",
                                                    "BY",     "PREFIX", "BASE",   "VALUES",   "MINUS", "DISTINCT"};
    return kKeywords.contains(upper(word));
  }

  void literal() {
    if (cur().kind == T::number) {
      shift();
      return;
    }
    shift();  // string
    if (cur().kind == T::lang_tag) {
      shift();
    } else if (accept_punct("^^")) {
      if (!at_iri()) fail_here("expected datatype IRI after '^^'");
      iri();
    }
  }

  void constraint() {
    if (at_punct("(")) {
      shift();
      expression();
      expect_punct(")");
      return;
    }
    if (cur().kind == T::word || at_iri()) {
      primary();
      return;
    }
    fail_here("expected constraint");
  }

  void expression() {
    enter();
    and_expression();
    while (accept_punct("||")) and_expression();
    leave();
  }

  void and_expression() {
    relational();
    while (accept_punct("&&")) relational();
  }

  void relational() {
    additive();
    for (auto op : {"=", "!=", "<", ">", "<=", ">="}) {
      if (accept_punct(op)) {
        additive();
        return;
      }
    }
    bool negated = at_word("NOT") && upper(ahead(1).text) == "IN";
    if (negated) shift();
    if (accept_word("IN")) {
      expect_punct("(");
      if (!accept_punct(")")) {
        do {
          expression();
        } while (accept_punct(","));
        expect_punct(")");
      }
    }
  }

  void additive() {
    multiplicative();
    while (at_punct("+") || at_punct("-")) {
      shift();
      multiplicative();
    }
  }

  void multiplicative() {
    unary();
    while (at_punct("*") || at_punct("/")) {
      shift();
      unary();
    }
  }

  void unary() {
    if (at_punct("!") || at_punct("+") || at_punct("-")) {
      enter();
      shift();
      unary();
      leave();
      return;
    }
    primary();
  }

  void argument_list() {
    expect_punct("(");
    if (accept_punct(")")) return;
    do {
      expression();
    } while (accept_punct(","));
    expect_punct(")");
  }

  void primary() {
    const Token& t = cur();
    switch (t.kind) {
      case T::var:
        skeleton_.variables.insert(t.text);
        shift();
        return;
      case T::string:
      case T::number: literal(); return;
      case T::iri:
      case T::pname: {
        iri();
        if (at_punct("(")) argument_list();
        return;
      }
      case T::punct:
        if (accept_punct("(")) {
          expression();
          expect_punct(")");
          return;
        }
        fail_here("expected expression");
      case T::word: {
        std::string name = upper(t.text);
        if (t.text == "true" || t.text == "false") {
          shift();
          return;
        }
        if (auto agg = kAggregates.find(name); agg != kAggregates.end()) {
          skeleton_.features.insert(agg->second);
          shift();
          expect_punct("(");
          accept_word("DISTINCT");
          if (name == "COUNT" && accept_punct("*")) {
            expect_punct(")");
            return;
          }
          expression();
          expect_punct(")");
          return;
        }
        if (name == "GROUP_CONCAT" || name == "SAMPLE") fail_here(name + " is outside the supported subset");
        if (name == "EXISTS" || name == "NOT") fail_here("EXISTS is outside the supported subset");
        if (kBuiltins.contains(name)) {
          shift();
          argument_list();
          return;
        }
        if (isupper_keyword(t.text)) fail_here("expected expression");
        Token copy = t;
        shift();
        bare_word(copy);
        if (at_punct("(")) argument_list();
        return;
      }
      default: fail_here("expected expression");
    }
  }

  void solution_modifiers() {
    if (at_word("GROUP")) {
      shift();
      expect_word("BY");
      skeleton_.features.insert(QueryFeature::group_by);
      std::size_t n = 0;
      while (true) {
        if (cur().kind == T::var) {
          skeleton_.variables.insert(cur().text);
          shift();
        } else if (accept_punct("(")) {
          expression();
          if (accept_word("AS")) {
            if (cur().kind != T::var) fail_here("expected variable after AS");
            skeleton_.variables.insert(cur().text);
            shift();
          }
          expect_punct(")");
        } else if ((cur().kind == T::word && kBuiltins.contains(upper(cur().text))) || at_iri()) {
          primary();
        } else {
          break;
        }
        ++n;
      }
      if (n == 0) fail_here("expected GROUP BY condition");
    }
    if (accept_word("HAVING")) {
      skeleton_.features.insert(QueryFeature::having);
      constraint();
      while (at_punct("(") || (cur().kind == T::word && kBuiltins.contains(upper(cur().text)))) constraint();
    }
    if (at_word("ORDER")) {
      shift();
      expect_word("BY");
      skeleton_.features.insert(QueryFeature::order_by);
      std::size_t n = 0;
      while (true) {
        if (at_word("ASC") || at_word("DESC")) {
          shift();
          expect_punct("(");
          expression();
          expect_punct(")");
        } else if (cur().kind == T::var) {
          skeleton_.variables.insert(cur().text);
          shift();
        } else if (at_punct("(") || (cur().kind == T::word && (kBuiltins.contains(upper(cur().text)) ||
                                                                kAggregates.contains(upper(cur().text))))) {
          if (at_punct("(")) {
            constraint();
          } else {
            primary();
          }
        } else {
          break;
        }
        ++n;
      }
      if (n == 0) fail_here("expected ORDER BY condition");
    }
    bool limit = false, offset = false;
    while (true) {
      if (!limit && accept_word("LIMIT")) {
        limit = true;
      } else if (!offset && accept_word("OFFSET")) {
        offset = true;
      } else {
        break;
      }
      if (cur().kind != T::number || cur().text.find_first_not_of("0123456789") != std::string::npos) {
        fail_here("expected integer");
      }
      shift();
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
  std::optional<std::string> base_;
  SparqlSkeleton skeleton_;
  std::vector<ConformanceViolation> violations_;
};

}  // namespace

std::string_view to_string(QueryFeature feature) {
  switch (feature) {
    case QueryFeature::union_: return "union";
    case QueryFeature::optional: return "optional";
    case QueryFeature::filter: return "filter";
    case QueryFeature::group_by: return "group-by";
    case QueryFeature::having: return "having";
    case QueryFeature::order_by: return "order-by";
    case QueryFeature::subquery: return "subquery";
    case QueryFeature::property_path: return "property-path";
    case QueryFeature::aggregate_count: return "aggregate-count";
    case QueryFeature::aggregate_sum: return "aggregate-sum";
    case QueryFeature::aggregate_avg: return "aggregate-avg";
    case QueryFeature::aggregate_min: return "aggregate-min";
    case QueryFeature::aggregate_max: return "aggregate-max";
  }
  return "?";
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::unknown_class: return "unknown-class";
    case ViolationKind::unknown_predicate: return "unknown-predicate";
    case ViolationKind::unprefixed_name: return "unprefixed-name";
    case ViolationKind::parse_error: return "parse-error";
  }
  return "?";
}

std::string format_violation(const ConformanceViolation& v) {
  return std::string(to_string(v.kind)) + "\t" + v.offending + "\t" + std::to_string(v.location.line) + ":" +
         std::to_string(v.location.column) + "\t" + v.detail;
}

SkeletonResult extract_skeleton(std::string_view query) {
  Parser parser(Lexer(query).run());
  return parser.run();
}

std::vector<ConformanceViolation> check_conformance(const SparqlSkeleton& skeleton, const Ontology& ontology,
                                                    const Slice& slice) {
  std::vector<ConformanceViolation> out;
  auto where = [&](const Iri& iri) {
    auto it = skeleton.occurrences.find(iri);
    return it != skeleton.occurrences.end() ? it->second : IriOccurrence{iri.str(), {}};
  };
  for (const auto& iri : skeleton.class_iris) {
    if (slice.concepts.contains(iri)) continue;
    auto kind = ontology.kind_of(iri);
    std::string detail = !kind ? "not in ontology" : kind == ElementKind::concept_ ? "not in slice" : "not a class";
    auto occ = where(iri);
    out.push_back({ViolationKind::unknown_class, occ.text, occ.location, detail});
  }
  for (const auto& iri : skeleton.predicate_iris) {
    if (slice.relationships.contains(iri) || slice.attributes.contains(iri)) continue;
    auto kind = ontology.kind_of(iri);
    std::string detail = !kind ? "not in ontology" : kind == ElementKind::concept_ ? "not a property" : "not in slice";
    auto occ = where(iri);
    out.push_back({ViolationKind::unknown_predicate, occ.text, occ.location, detail});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.location < b.location; });
  return out;
}

std::vector<ConformanceViolation> validate_query(std::string_view query, const Ontology& ontology,
                                                 const Slice& slice) {
  auto result = extract_skeleton(query);
  if (auto* violations = std::get_if<std::vector<ConformanceViolation>>(&result)) return *violations;
  return check_conformance(std::get<SparqlSkeleton>(result), ontology, slice);
}

}  // namespace ontoreveal
