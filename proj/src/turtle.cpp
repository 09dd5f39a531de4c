#include "ontoreveal/turtle.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace ontoreveal {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  end,
  iri,           // <...>, text is the raw IRI
  pname,         // prefix:local, text is the whole name
  blank_label,   // _:x, text is "x"
  string,        // text is the decoded value
  lang_tag,      // @en, text is "en"
  number,
  boolean,
  kw_a,
  kw_prefix,     // @prefix or PREFIX
  kw_base,       // @base or BASE
  dot,
  semicolon,
  comma,
  lbracket,
  rbracket,
  lparen,
  rparen,
  datatype_mark,  // ^^
  error,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  bool sparql_style = false;  // PREFIX/BASE without '@'
};

bool is_pn_chars_base(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }
bool is_pn_chars(unsigned char c) {
  return is_pn_chars_base(c) || std::isdigit(c) != 0 || c == '_' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(std::string_view input) : in_(input) {}

  Token next() {
    skip_space_and_comments();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= in_.size()) return tok;
    unsigned char c = peek();
    switch (c) {
      case '.': return single(tok, Tok::dot);
      case ';': return single(tok, Tok::semicolon);
      case ',': return single(tok, Tok::comma);
      case '[': return single(tok, Tok::lbracket);
      case ']': return single(tok, Tok::rbracket);
      case '(': return single(tok, Tok::lparen);
      case ')': return single(tok, Tok::rparen);
      case '<': return lex_iri(tok);
      case '"':
      case '\'': return lex_string(tok);
      case '@': return lex_at(tok);
      case '^':
        if (peek(1) == '^') {
          advance();
          advance();
          tok.kind = Tok::datatype_mark;
          return tok;
        }
        return fail(tok, "unexpected '^'");
      case '_':
        if (peek(1) == ':') return lex_blank(tok);
        break;
      default: break;
    }
    if (std::isdigit(c) != 0 || ((c == '+' || c == '-') && std::isdigit(peek(1)) != 0) ||
        (c == '.' && std::isdigit(peek(1)) != 0)) {
      return lex_number(tok);
    }
    if (c == ':' || is_pn_chars_base(c)) return lex_name(tok);
    return fail(tok, std::string("unexpected character '") + text_util::printable(c) + "'");
  }

 private:
  unsigned char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < in_.size() ? static_cast<unsigned char>(in_[pos_ + ahead]) : 0;
  }

  void advance() {
    unsigned char c = peek();
    ++pos_;
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if ((c & 0xC0) != 0x80) {
      ++column_;
    }
  }

  Token single(Token& tok, Tok kind) {
    advance();
    tok.kind = kind;
    return tok;
  }

  Token fail(Token& tok, std::string message) {
    tok.kind = Tok::error;
    tok.text = std::move(message);
    return tok;
  }

  void skip_space_and_comments() {
    while (pos_ < in_.size()) {
      unsigned char c = peek();
      if (c == '#') {
        while (pos_ < in_.size() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  Token lex_iri(Token& tok) {
    advance();
    std::string value;
    while (true) {
      if (pos_ >= in_.size()) return fail(tok, "unterminated IRI");
      unsigned char c = peek();
      if (c == '>') {
        advance();
        break;
      }
      if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`') {
        return fail(tok, "invalid character in IRI");
      }
      if (c == '\\') {
        advance();
        auto decoded = read_unicode_escape();
        if (!decoded) return fail(tok, "invalid escape in IRI");
        value += *decoded;
        continue;
      }
      value.push_back(static_cast<char>(c));
      advance();
    }
    tok.kind = Tok::iri;
    tok.text = std::move(value);
    return tok;
  }

  // After a backslash: uXXXX or UXXXXXXXX.
  std::optional<std::string> read_unicode_escape() {
    unsigned char kind = peek();
    std::size_t digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (digits == 0) return std::nullopt;
    advance();
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      unsigned char h = peek();
      if (std::isxdigit(h) == 0) return std::nullopt;
      cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(h) != 0 ? h - '0' : std::tolower(h) - 'a' + 10);
      advance();
    }
    auto encoded = text_util::encode_utf8(cp);
    if (!encoded) return std::nullopt;
    return encoded;
  }

  Token lex_string(Token& tok) {
    unsigned char quote = peek();
    bool long_form = peek(1) == quote && peek(2) == quote;
    if (long_form) {
      advance();
      advance();
    }
    advance();
    std::string value;
    while (true) {
      if (pos_ >= in_.size()) return fail(tok, "unterminated string literal");
      unsigned char c = peek();
      if (long_form) {
        if (c == quote && peek(1) == quote && peek(2) == quote) {
          advance();
          advance();
          advance();
          break;
        }
      } else {
        if (c == quote) {
          advance();
          break;
        }
        if (c == '\n' || c == '\r') return fail(tok, "newline in string literal");
      }
      if (c == '\\') {
        advance();
        unsigned char e = peek();
        switch (e) {
          case 't': value.push_back('\t'); advance(); break;
          case 'b': value.push_back('\b'); advance(); break;
          case 'n': value.push_back('\n'); advance(); break;
          case 'r': value.push_back('\r'); advance(); break;
          case 'f': value.push_back('\f'); advance(); break;
          case '"': value.push_back('"'); advance(); break;
          case '\'': value.push_back('\''); advance(); break;
          case '\\': value.push_back('\\'); advance(); break;
          case 'u':
          case 'U': {
            auto decoded = read_unicode_escape();
            if (!decoded) return fail(tok, "invalid unicode escape in string");
            value += *decoded;
            break;
          }
          default: return fail(tok, "invalid escape in string");
        }
        continue;
      }
      value.push_back(static_cast<char>(c));
      advance();
    }
    tok.kind = Tok::string;
    tok.text = std::move(value);
    return tok;
  }

  Token lex_at(Token& tok) {
    advance();
    std::string word;
    while (std::isalnum(peek()) != 0 || (peek() == '-' && !word.empty())) {
      word.push_back(static_cast<char>(peek()));
      advance();
    }
    if (word.empty()) return fail(tok, "expected directive or language tag after '@'");
    if (word == "prefix") {
      tok.kind = Tok::kw_prefix;
    } else if (word == "base") {
      tok.kind = Tok::kw_base;
    } else {
      tok.kind = Tok::lang_tag;
      tok.text = std::move(word);
    }
    return tok;
  }

  Token lex_blank(Token& tok) {
    advance();
    advance();
    std::string label;
    while (is_pn_chars(peek()) || peek() == '.') {
      if (peek() == '.' && !is_pn_chars(peek(1))) break;
      label.push_back(static_cast<char>(peek()));
      advance();
    }
    if (label.empty()) return fail(tok, "empty blank node label");
    tok.kind = Tok::blank_label;
    tok.text = std::move(label);
    return tok;
  }

  Token lex_number(Token& tok) {
    std::string value;
    if (peek() == '+' || peek() == '-') {
      value.push_back(static_cast<char>(peek()));
      advance();
    }
    while (std::isdigit(peek()) != 0) {
      value.push_back(static_cast<char>(peek()));
      advance();
    }
    if (peek() == '.' && std::isdigit(peek(1)) != 0) {
      value.push_back('.');
      advance();
      while (std::isdigit(peek()) != 0) {
        value.push_back(static_cast<char>(peek()));
        advance();
      }
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save_pos = pos_, save_line = line_, save_col = column_;
      std::string exp(1, static_cast<char>(peek()));
      advance();
      if (peek() == '+' || peek() == '-') {
        exp.push_back(static_cast<char>(peek()));
        advance();
      }
      if (std::isdigit(peek()) != 0) {
        while (std::isdigit(peek()) != 0) {
          exp.push_back(static_cast<char>(peek()));
          advance();
        }
        value += exp;
      } else {
        pos_ = save_pos;
        line_ = save_line;
        column_ = save_col;
      }
    }
    tok.kind = Tok::number;
    tok.text = std::move(value);
    return tok;
  }

  Token lex_name(Token& tok) {
    std::string prefix;
    while (is_pn_chars(peek()) || peek() == '.') {
      if (peek() == '.' && !(is_pn_chars(peek(1)) || peek(1) == '.')) break;
      prefix.push_back(static_cast<char>(peek()));
      advance();
    }
    if (peek() != ':') {
      if (prefix == "a") {
        tok.kind = Tok::kw_a;
        return tok;
      }
      if (prefix == "true" || prefix == "false") {
        tok.kind = Tok::boolean;
        tok.text = prefix;
        return tok;
      }
      std::string upper = prefix;
      std::transform(upper.begin(), upper.end(), upper.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
      if (upper == "PREFIX") {
        tok.kind = Tok::kw_prefix;
        tok.sparql_style = true;
        return tok;
      }
      if (upper == "BASE") {
        tok.kind = Tok::kw_base;
        tok.sparql_style = true;
        return tok;
      }
      return fail(tok, "unexpected bare word '" + prefix + "'");
    }
    if (!prefix.empty() && prefix.back() == '.') return fail(tok, "prefix may not end with '.'");
    advance();  // ':'
    std::string local;
    while (true) {
      unsigned char c = peek();
      if (is_pn_chars(c) || c == ':' || std::isdigit(c) != 0) {
        local.push_back(static_cast<char>(c));
        advance();
      } else if (c == '.' && (is_pn_chars(peek(1)) || peek(1) == ':' || peek(1) == '%')) {
        local.push_back('.');
        advance();
      } else if (c == '%' && std::isxdigit(peek(1)) != 0 && std::isxdigit(peek(2)) != 0) {
        for (int i = 0; i < 3; ++i) {
          local.push_back(static_cast<char>(peek()));
          advance();
        }
      } else if (c == '\\' && peek(1) != 0 && std::string_view("_~.-!$&'()*+,;=/?#@%").find(
                                                   static_cast<char>(peek(1))) != std::string_view::npos) {
        advance();
        local.push_back(static_cast<char>(peek()));
        advance();
      } else {
        break;
      }
    }
    tok.kind = Tok::pname;
    tok.text = prefix + ":" + local;
    return tok;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Triple reader
// ---------------------------------------------------------------------------

struct Term {
  enum class Kind { iri, blank, literal, invalid } kind = Kind::invalid;
  std::string value;
  std::string datatype;  // literals only; empty for plain/lang strings
  bool is_string = false;
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;
};

constexpr std::size_t kMaxNesting = 128;

class SyntaxError {
 public:
  SyntaxError(std::size_t line, std::size_t column, std::string message)
      : line(line), column(column), message(std::move(message)) {}
  std::size_t line;
  std::size_t column;
  std::string message;
};

class TripleReader {
 public:
  TripleReader(std::string_view input, std::vector<ParseDiagnostic>& diagnostics)
      : lexer_(input), diagnostics_(diagnostics) {}

  std::vector<Triple> read_all() {
    try {
      shift();
      while (current_.kind != Tok::end) statement();
    } catch (const SyntaxError& e) {
      diagnostics_.push_back({e.line, e.column, e.message, Severity::error});
    }
    return std::move(triples_);
  }

  const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

 private:
  void shift() {
    current_ = lexer_.next();
    if (current_.kind == Tok::error) throw_at(current_, current_.text);
  }

  [[noreturn]] void throw_at(const Token& tok, std::string message) {
    throw SyntaxError(tok.line, tok.column, std::move(message));
  }

  void expect(Tok kind, std::string_view what) {
    if (current_.kind != kind) throw_at(current_, "expected " + std::string(what));
    shift();
  }

  void statement() {
    if (current_.kind == Tok::kw_prefix) {
      bool sparql = current_.sparql_style;
      shift();
      if (current_.kind != Tok::pname || current_.text.back() != ':') {
        throw_at(current_, "expected prefix name ending in ':'");
      }
      std::string prefix = current_.text.substr(0, current_.text.size() - 1);
      shift();
      if (current_.kind != Tok::iri) throw_at(current_, "expected IRI in prefix declaration");
      auto resolved = resolve_relative(current_.text);
      if (!resolved) throw_at(current_, "relative namespace IRI without base: <" + current_.text + ">");
      prefixes_[prefix] = *resolved;
      shift();
      if (!sparql) expect(Tok::dot, "'.' after prefix declaration");
      return;
    }
    if (current_.kind == Tok::kw_base) {
      bool sparql = current_.sparql_style;
      shift();
      if (current_.kind != Tok::iri) throw_at(current_, "expected IRI in base declaration");
      auto resolved = resolve_relative(current_.text);
      if (!resolved) throw_at(current_, "relative base IRI");
      base_ = *resolved;
      shift();
      if (!sparql) expect(Tok::dot, "'.' after base declaration");
      return;
    }
    if (current_.kind == Tok::lbracket) {
      Term subject = blank_property_list(0);
      if (current_.kind != Tok::dot) predicate_object_list(subject, 0);
    } else {
      Term subject = subject_term();
      predicate_object_list(subject, 0);
    }
    expect(Tok::dot, "'.' at end of statement");
  }

  Term subject_term() {
    switch (current_.kind) {
      case Tok::iri:
      case Tok::pname:
      case Tok::blank_label: return simple_term();
      case Tok::lparen: return collection(0);
      default: throw_at(current_, "expected subject");
    }
  }

  Term simple_term() {
    Term term;
    term.line = current_.line;
    term.column = current_.column;
    if (current_.kind == Tok::iri) {
      auto resolved = resolve_relative(current_.text);
      if (resolved) {
        term.kind = Term::Kind::iri;
        term.value = *resolved;
      } else {
        error_at(current_, "relative IRI without base: <" + current_.text + ">");
      }
    } else if (current_.kind == Tok::pname) {
      auto colon = current_.text.find(':');
      std::string prefix = current_.text.substr(0, colon);
      auto it = prefixes_.find(prefix);
      if (it == prefixes_.end()) {
        error_at(current_, "undeclared prefix '" + prefix + ":'");
      } else {
        term.kind = Term::Kind::iri;
        term.value = it->second + current_.text.substr(colon + 1);
      }
    } else if (current_.kind == Tok::blank_label) {
      term.kind = Term::Kind::blank;
      term.value = "b:" + current_.text;
    } else {
      throw_at(current_, "expected IRI or blank node");
    }
    shift();
    return term;
  }

  void predicate_object_list(const Term& subject, std::size_t depth) {
    verb_object_list(subject, depth);
    while (current_.kind == Tok::semicolon) {
      shift();
      if (current_.kind == Tok::semicolon) continue;
      if (current_.kind == Tok::dot || current_.kind == Tok::rbracket || current_.kind == Tok::end) break;
      verb_object_list(subject, depth);
    }
  }

  void verb_object_list(const Term& subject, std::size_t depth) {
    Term predicate;
    if (current_.kind == Tok::kw_a) {
      predicate.kind = Term::Kind::iri;
      predicate.value = std::string(vocab::kRdfType);
      predicate.line = current_.line;
      predicate.column = current_.column;
      shift();
    } else if (current_.kind == Tok::iri || current_.kind == Tok::pname) {
      predicate = simple_term();
    } else {
      throw_at(current_, "expected predicate");
    }
    while (true) {
      Term object = object_term(depth);
      emit(subject, predicate, std::move(object));
      if (current_.kind != Tok::comma) break;
      shift();
    }
  }

  Term object_term(std::size_t depth) {
    switch (current_.kind) {
      case Tok::iri:
      case Tok::pname:
      case Tok::blank_label: return simple_term();
      case Tok::lbracket: return blank_property_list(depth + 1);
      case Tok::lparen: return collection(depth + 1);
      case Tok::string: return literal();
      case Tok::number:
      case Tok::boolean: {
        Term term;
        term.kind = Term::Kind::literal;
        term.value = current_.text;
        term.datatype = current_.kind == Tok::boolean ? "boolean" : "number";
        term.line = current_.line;
        term.column = current_.column;
        shift();
        return term;
      }
      default: throw_at(current_, "expected object");
    }
  }

  Term literal() {
    Term term;
    term.kind = Term::Kind::literal;
    term.is_string = true;
    term.value = current_.text;
    term.line = current_.line;
    term.column = current_.column;
    shift();
    if (current_.kind == Tok::lang_tag) {
      shift();
    } else if (current_.kind == Tok::datatype_mark) {
      shift();
      if (current_.kind != Tok::iri && current_.kind != Tok::pname) {
        throw_at(current_, "expected datatype IRI after '^^'");
      }
      Term dt = simple_term();
      if (dt.kind == Term::Kind::invalid) {
        term.kind = Term::Kind::invalid;
      } else {
        term.datatype = dt.value;
        term.is_string = dt.value == std::string(vocab::kXsd) + "string";
      }
    }
    return term;
  }

  Term fresh_blank(const Token& at) {
    Term term;
    term.kind = Term::Kind::blank;
    term.value = "anon:" + std::to_string(++blank_counter_);
    term.line = at.line;
    term.column = at.column;
    return term;
  }

  Term blank_property_list(std::size_t depth) {
    if (depth > kMaxNesting) throw_at(current_, "nesting too deep");
    Term node = fresh_blank(current_);
    shift();  // '['
    if (current_.kind != Tok::rbracket) predicate_object_list(node, depth);
    expect(Tok::rbracket, "']'");
    return node;
  }

  Term collection(std::size_t depth) {
    if (depth > kMaxNesting) throw_at(current_, "nesting too deep");
    Token open = current_;
    shift();  // '('
    std::vector<Term> items;
    while (current_.kind != Tok::rparen) {
      if (current_.kind == Tok::end) throw_at(current_, "unterminated collection");
      items.push_back(object_term(depth));
    }
    shift();
    Term nil;
    nil.kind = Term::Kind::iri;
    nil.value = std::string(vocab::kRdf) + "nil";
    nil.line = open.line;
    nil.column = open.column;
    if (items.empty()) return nil;
    Term first_pred, rest_pred;
    first_pred.kind = rest_pred.kind = Term::Kind::iri;
    first_pred.value = std::string(vocab::kRdf) + "first";
    rest_pred.value = std::string(vocab::kRdf) + "rest";
    std::vector<Term> cells;
    for (std::size_t i = 0; i < items.size(); ++i) cells.push_back(fresh_blank(open));
    for (std::size_t i = 0; i < items.size(); ++i) {
      emit(cells[i], first_pred, items[i]);
      emit(cells[i], rest_pred, i + 1 < items.size() ? cells[i + 1] : nil);
    }
    return cells.front();
  }

  void emit(const Term& s, const Term& p, Term o) {
    triples_.push_back({s, p, std::move(o)});
  }

  void error_at(const Token& tok, std::string message) {
    diagnostics_.push_back({tok.line, tok.column, std::move(message), Severity::error});
  }

  std::optional<std::string> resolve_relative(const std::string& iri) const {
    if (Iri::is_absolute(iri)) return iri;
    if (!base_) return std::nullopt;
    if (iri.empty()) return *base_;
    if (iri.front() == '#') return base_->substr(0, base_->find('#')) + iri;
    auto slash = base_->rfind('/');
    auto candidate = slash == std::string::npos ? *base_ + iri : base_->substr(0, slash + 1) + iri;
    if (!Iri::is_absolute(candidate)) return std::nullopt;
    return candidate;
  }

  Lexer lexer_;
  Token current_;
  std::vector<ParseDiagnostic>& diagnostics_;
  std::vector<Triple> triples_;
  std::map<std::string, std::string> prefixes_;
  std::optional<std::string> base_;
  std::size_t blank_counter_ = 0;
};

// ---------------------------------------------------------------------------
// Interpretation of triples as the OWL subset
// ---------------------------------------------------------------------------

std::string iri_of(std::string_view ns, std::string_view local) {
  return std::string(ns) + std::string(local);
}

struct Draft {
  ElementKind kind;
  std::size_t line;
  std::size_t column;
  std::optional<std::string> label;
  std::optional<std::string> comment;
  std::vector<std::pair<std::string, const Term*>> superclasses;
  std::vector<std::pair<std::string, const Term*>> domains;
  std::vector<std::pair<std::string, const Term*>> ranges;
};

class Interpreter {
 public:
  Interpreter(const std::vector<Triple>& triples, std::vector<ParseDiagnostic>& diagnostics)
      : triples_(triples), diagnostics_(diagnostics) {
    for (const auto& t : triples_) {
      if (t.subject.kind == Term::Kind::blank) blank_triples_[t.subject.value].push_back(&t);
    }
  }

  std::optional<Ontology> run(const std::map<std::string, std::string>& raw_prefixes) {
    declare();
    for (const auto& t : triples_) describe(t);
    for (const auto& t : triples_) {
      if (t.subject.kind == Term::Kind::blank && !consumed_blanks_.contains(t.subject.value)) {
        warn(t.subject, "statement about a blank node outside the supported subset skipped");
      }
    }
    check_structure();
    if (has_errors()) return std::nullopt;

    std::vector<Concept> concepts;
    std::vector<Relationship> relationships;
    std::vector<Attribute> attributes;
    auto to_set = [](const auto& refs) {
      std::set<Iri> out;
      for (const auto& [iri, _] : refs) out.insert(Iri(iri));
      return out;
    };
    for (const auto& [iri, d] : drafts_) {
      switch (d.kind) {
        case ElementKind::concept_:
          concepts.push_back({Iri(iri), d.label, d.comment, to_set(d.superclasses)});
          break;
        case ElementKind::relationship:
          relationships.push_back({Iri(iri), d.label, d.comment, to_set(d.domains), to_set(d.ranges)});
          break;
        case ElementKind::attribute:
          attributes.push_back(
              {Iri(iri), d.label, d.comment, to_set(d.domains), Iri(d.ranges.front().first)});
          break;
      }
    }
    Ontology::PrefixMap prefixes;
    for (const auto& [p, ns] : raw_prefixes) prefixes.emplace(p, Iri(ns));
    try {
      return Ontology(std::move(concepts), std::move(relationships), std::move(attributes),
                      std::move(prefixes));
    } catch (const OntologyError& e) {
      for (const auto& problem : e.problems()) diagnostics_.push_back({1, 1, problem, Severity::error});
    } catch (const std::invalid_argument& e) {
      diagnostics_.push_back({1, 1, e.what(), Severity::error});
    }
    return std::nullopt;
  }

 private:
  bool has_errors() const {
    return std::any_of(diagnostics_.begin(), diagnostics_.end(),
                       [](const ParseDiagnostic& d) { return d.severity == Severity::error; });
  }

  void warn(const Term& at, std::string message) {
    diagnostics_.push_back({at.line, at.column, std::move(message), Severity::warning});
  }
  void error(const Term& at, std::string message) {
    diagnostics_.push_back({at.line, at.column, std::move(message), Severity::error});
  }

  static bool is_pred(const Triple& t, std::string_view ns, std::string_view local) {
    return t.predicate.kind == Term::Kind::iri && t.predicate.value == iri_of(ns, local);
  }

  void declare() {
    const std::string type = std::string(vocab::kRdfType);
    for (const auto& t : triples_) {
      if (t.predicate.value != type || t.subject.kind != Term::Kind::iri) continue;
      if (t.object.kind != Term::Kind::iri) continue;
      std::optional<ElementKind> kind;
      if (t.object.value == iri_of(vocab::kOwl, "Class")) kind = ElementKind::concept_;
      if (t.object.value == iri_of(vocab::kOwl, "ObjectProperty")) kind = ElementKind::relationship;
      if (t.object.value == iri_of(vocab::kOwl, "DatatypeProperty")) kind = ElementKind::attribute;
      if (!kind) continue;
      if (vocab::is_builtin(t.subject.value)) {
        warn(t.subject, "declaration of built-in IRI <" + t.subject.value + "> skipped");
        continue;
      }
      auto [it, inserted] = drafts_.try_emplace(
          t.subject.value, Draft{*kind, t.subject.line, t.subject.column, {}, {}, {}, {}, {}});
      if (!inserted && it->second.kind != *kind) {
        error(t.subject, "<" + t.subject.value + "> is declared with two different kinds");
      }
      declaration_triples_.insert(&t);
    }
  }

  // Collects the named members of `[ owl:unionOf ( ... ) ]`; nullopt when the
  // blank node is anything else.
  std::optional<std::vector<const Term*>> union_members(const std::string& blank) {
    auto it = blank_triples_.find(blank);
    if (it == blank_triples_.end()) return std::nullopt;
    const Term* list_head = nullptr;
    for (const Triple* t : it->second) {
      if (is_pred(*t, vocab::kOwl, "unionOf")) {
        if (list_head) return std::nullopt;
        list_head = &t->object;
      } else if (!(is_pred(*t, vocab::kRdf, "type") && t->object.value == iri_of(vocab::kOwl, "Class"))) {
        return std::nullopt;
      }
    }
    if (!list_head) return std::nullopt;
    std::vector<const Term*> members;
    std::vector<std::string> cells;
    const Term* cell = list_head;
    std::set<std::string> seen;
    while (!(cell->kind == Term::Kind::iri && cell->value == iri_of(vocab::kRdf, "nil"))) {
      if (cell->kind != Term::Kind::blank || !seen.insert(cell->value).second) return std::nullopt;
      auto cit = blank_triples_.find(cell->value);
      if (cit == blank_triples_.end()) return std::nullopt;
      const Term* first = nullptr;
      const Term* rest = nullptr;
      for (const Triple* t : cit->second) {
        if (is_pred(*t, vocab::kRdf, "first") && !first) {
          first = &t->object;
        } else if (is_pred(*t, vocab::kRdf, "rest") && !rest) {
          rest = &t->object;
        } else {
          return std::nullopt;
        }
      }
      if (!first || !rest || first->kind != Term::Kind::iri) return std::nullopt;
      members.push_back(first);
      cells.push_back(cell->value);
      cell = rest;
    }
    consumed_blanks_.insert(blank);
    for (auto& c : cells) consumed_blanks_.insert(c);
    return members;
  }

  void add_class_refs(const Term& object, std::vector<std::pair<std::string, const Term*>>& into,
                      std::string_view role) {
    if (object.kind == Term::Kind::iri) {
      into.emplace_back(object.value, &object);
      return;
    }
    if (object.kind == Term::Kind::blank) {
      if (auto members = union_members(object.value)) {
        for (const Term* m : *members) into.emplace_back(m->value, m);
        return;
      }
    }
    if (object.kind != Term::Kind::invalid) {
      warn(object, "unsupported " + std::string(role) + " expression skipped");
    }
  }

  void describe(const Triple& t) {
    if (t.subject.kind != Term::Kind::iri || t.predicate.kind != Term::Kind::iri ||
        t.object.kind == Term::Kind::invalid) {
      return;
    }
    if (declaration_triples_.contains(&t)) return;
    auto it = drafts_.find(t.subject.value);
    if (it == drafts_.end()) {
      warn(t.subject, "statement about undeclared subject <" + t.subject.value + "> skipped");
      return;
    }
    Draft& d = it->second;
    if (is_pred(t, vocab::kRdfs, "label") || is_pred(t, vocab::kRdfs, "comment")) {
      bool is_label = is_pred(t, vocab::kRdfs, "label");
      auto& slot = is_label ? d.label : d.comment;
      if (t.object.kind != Term::Kind::literal || !t.object.is_string) {
        warn(t.object, std::string(is_label ? "label" : "comment") + " is not a string literal; skipped");
        return;
      }
      if (slot) return;  // first listed value wins
      if (is_label && text_util::trim(t.object.value).empty()) {
        error(t.object, "empty label on <" + t.subject.value + ">");
        return;
      }
      slot = t.object.value;
      return;
    }
    if (is_pred(t, vocab::kRdfs, "subClassOf")) {
      if (d.kind != ElementKind::concept_) {
        warn(t.predicate, "rdfs:subClassOf on a non-class subject skipped");
        return;
      }
      if (t.object.kind == Term::Kind::blank) {
        warn(t.object, "class expression in rdfs:subClassOf skipped");
        return;
      }
      add_class_refs(t.object, d.superclasses, "superclass");
      return;
    }
    if (is_pred(t, vocab::kRdfs, "domain")) {
      if (d.kind == ElementKind::concept_) {
        warn(t.predicate, "rdfs:domain on a class skipped");
        return;
      }
      add_class_refs(t.object, d.domains, "domain");
      return;
    }
    if (is_pred(t, vocab::kRdfs, "range")) {
      if (d.kind == ElementKind::concept_) {
        warn(t.predicate, "rdfs:range on a class skipped");
        return;
      }
      if (d.kind == ElementKind::attribute) {
        if (t.object.kind != Term::Kind::iri || !t.object.value.starts_with(vocab::kXsd)) {
          error(t.object, "datatype property range must be an xsd datatype");
          return;
        }
        if (!d.ranges.empty() && d.ranges.front().first != t.object.value) {
          error(t.object, "datatype property <" + t.subject.value + "> has more than one range");
          return;
        }
        if (d.ranges.empty()) d.ranges.emplace_back(t.object.value, &t.object);
        return;
      }
      add_class_refs(t.object, d.ranges, "range");
      return;
    }
    if (t.predicate.value == vocab::kRdfType) {
      warn(t.object, "unsupported type <" + t.object.value + "> on <" + t.subject.value + "> skipped");
      return;
    }
    warn(t.predicate, "unsupported predicate <" + t.predicate.value + "> skipped");
  }

  void check_structure() {
    for (const auto& [iri, d] : drafts_) {
      Term at;
      at.line = d.line;
      at.column = d.column;
      auto check_refs = [&](const auto& refs, std::string_view role) {
        for (const auto& [ref, term] : refs) {
          auto target = drafts_.find(ref);
          if (target == drafts_.end() || target->second.kind != ElementKind::concept_) {
            error(*term, std::string(role) + " <" + ref + "> of <" + iri + "> is not a declared class");
          }
        }
      };
      check_refs(d.superclasses, "superclass");
      if (d.kind == ElementKind::concept_) continue;
      if (d.domains.empty()) error(at, "<" + iri + "> has no rdfs:domain");
      if (d.ranges.empty()) error(at, "<" + iri + "> has no rdfs:range");
      check_refs(d.domains, "domain");
      if (d.kind == ElementKind::relationship) check_refs(d.ranges, "range");
    }
  }

  const std::vector<Triple>& triples_;
  std::vector<ParseDiagnostic>& diagnostics_;
  std::map<std::string, Draft> drafts_;
  std::map<std::string, std::vector<const Triple*>> blank_triples_;
  std::set<const Triple*> declaration_triples_;
  std::set<std::string> consumed_blanks_;
};

// ---------------------------------------------------------------------------
// Serializer helpers
// ---------------------------------------------------------------------------

bool is_safe_local(std::string_view local) {
  if (local.empty()) return true;
  auto first = static_cast<unsigned char>(local.front());
  if (!(std::isalnum(first) != 0 || first == '_')) return false;
  return std::all_of(local.begin(), local.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || c == '_' || c == '-';
  });
}

class TermWriter {
 public:
  explicit TermWriter(const Ontology::PrefixMap& prefixes) {
    for (const auto& [prefix, ns] : prefixes) namespaces_.emplace_back(prefix, ns.str());
    // Longest namespace first, then prefix text.
    std::sort(namespaces_.begin(), namespaces_.end(), [](const auto& a, const auto& b) {
      if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
      return a.first < b.first;
    });
  }

  std::string iri(std::string_view value) const {
    for (const auto& [prefix, ns] : namespaces_) {
      if (value.starts_with(ns) && is_safe_local(value.substr(ns.size()))) {
        return prefix + ":" + std::string(value.substr(ns.size()));
      }
    }
    return "<" + std::string(value) + ">";
  }

 private:
  std::vector<std::pair<std::string, std::string>> namespaces_;
};

std::string quote(std::string_view value) {
  std::string out = "\"";
  for (char c : value) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static constexpr char kHex[] = "0123456789ABCDEF";
          out += "\\u00";
          out.push_back(kHex[(c >> 4) & 0xF]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_diagnostic(const ParseDiagnostic& d) {
  std::ostringstream out;
  out << d.line << ':' << d.column << ": " << (d.severity == Severity::error ? "error" : "warning")
      << ": " << d.message;
  return out.str();
}

std::size_t TurtleParseResult::error_count() const {
  return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(), [](const auto& d) {
    return d.severity == Severity::error;
  }));
}

TurtleParseResult parse_turtle(std::string_view input) {
  TurtleParseResult result;
  TripleReader reader(input, result.diagnostics);
  std::vector<Triple> triples = reader.read_all();
  result.triple_count = triples.size();
  if (result.error_count() > 0) return result;
  Interpreter interpreter(triples, result.diagnostics);
  result.ontology = interpreter.run(reader.prefixes());
  return result;
}

std::string serialize_turtle(const Ontology& ontology) {
  TermWriter w(ontology.prefixes());
  std::string out;
  for (const auto& [prefix, ns] : ontology.prefixes()) {
    out += "@prefix " + prefix + ": <" + ns.str() + "> .\n";
  }

  struct Block {
    const Iri* subject;
    std::string text;
  };
  std::vector<Block> blocks;

  auto object_list = [&](const std::set<Iri>& values) {
    std::string joined;
    for (const auto& v : values) {
      if (!joined.empty()) joined += ", ";
      joined += w.iri(v.str());
    }
    return joined;
  };
  auto block = [&](const Iri& subject, std::string_view type, const std::optional<std::string>& label,
                   const std::optional<std::string>& comment,
                   std::vector<std::pair<std::string_view, std::string>> rest) {
    std::string text = w.iri(subject.str()) + " a " + w.iri(type);
    auto add = [&](std::string_view pred, const std::string& obj) {
      text += " ;\n    " + w.iri(pred) + " " + obj;
    };
    if (label) add(iri_of(vocab::kRdfs, "label"), quote(*label));
    if (comment) add(iri_of(vocab::kRdfs, "comment"), quote(*comment));
    for (const auto& [pred, obj] : rest) {
      if (!obj.empty()) add(pred, obj);
    }
    text += " .\n";
    blocks.push_back({&subject, std::move(text)});
  };

  const std::string sub = iri_of(vocab::kRdfs, "subClassOf");
  const std::string domain = iri_of(vocab::kRdfs, "domain");
  const std::string range = iri_of(vocab::kRdfs, "range");
  for (const auto& [iri, c] : ontology.concepts()) {
    block(iri, iri_of(vocab::kOwl, "Class"), c.label, c.comment, {{sub, object_list(c.superclasses)}});
  }
  for (const auto& [iri, r] : ontology.relationships()) {
    block(iri, iri_of(vocab::kOwl, "ObjectProperty"), r.label, r.comment,
          {{domain, object_list(r.domains)}, {range, object_list(r.ranges)}});
  }
  for (const auto& [iri, a] : ontology.attributes()) {
    block(iri, iri_of(vocab::kOwl, "DatatypeProperty"), a.label, a.comment,
          {{domain, object_list(a.domains)}, {range, w.iri(a.datatype.str())}});
  }
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return *a.subject < *b.subject; });
  for (const auto& b : blocks) {
    if (!out.empty()) out += "\n";
    out += b.text;
  }
  return out;
}

}  // namespace ontoreveal
