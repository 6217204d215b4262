#include "kgcr/turtle.hpp"

#include <cctype>
#include <sstream>

#include "kgcr/error.hpp"

namespace kgcr {

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  char advance() {
    char c = text[pos++];
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    return c;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  bool match(char c) {
    skip_ws();
    if (!eof() && peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }
};

bool pn_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         static_cast<unsigned char>(c) >= 0x80;
}

struct Parser {
  Lexer lx;
  Graph g;

  explicit Parser(const std::string& text) : lx(text) {}

  std::string read_iri_ref() {
    lx.expect('<');
    std::string iri;
    while (!lx.eof() && lx.peek() != '>') {
      char c = lx.advance();
      if (std::isspace(static_cast<unsigned char>(c)))
        lx.fail("whitespace inside IRI");
      iri += c;
    }
    if (lx.eof()) lx.fail("unterminated IRI");
    lx.advance();  // '>'
    if (iri.empty()) lx.fail("empty IRI");
    return iri;
  }

  std::string read_pname_word() {
    std::string w;
    while (!lx.eof() && (pn_char(lx.peek()) || lx.peek() == ':'))
      w += lx.advance();
    return w;
  }

  std::string read_string() {
    lx.expect('"');
    std::string s;
    while (!lx.eof() && lx.peek() != '"') {
      char c = lx.advance();
      if (c == '\\') {
        if (lx.eof()) lx.fail("unterminated escape");
        char e = lx.advance();
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case 'r': s += '\r'; break;
          case '"': s += '"'; break;
          case '\\': s += '\\'; break;
          default: lx.fail(std::string("bad escape '\\") + e + "'");
        }
      } else if (c == '\n') {
        lx.fail("newline inside string literal");
      } else {
        s += c;
      }
    }
    if (lx.eof()) lx.fail("unterminated string literal");
    lx.advance();  // '"'
    return s;
  }

  Term read_term(bool predicate_position) {
    lx.skip_ws();
    if (lx.eof()) lx.fail("unexpected end of input");
    char c = lx.peek();
    if (c == '<') return Term::iri(read_iri_ref());
    if (c == '"') {
      std::string lex = read_string();
      if (predicate_position) lx.fail("literal in predicate position");
      if (!lx.eof() && lx.peek() == '@') {
        lx.advance();
        std::string lang;
        while (!lx.eof() && (std::isalnum(static_cast<unsigned char>(lx.peek())) ||
                             lx.peek() == '-'))
          lang += lx.advance();
        if (lang.empty()) lx.fail("empty language tag");
        return Term::literal(lex, lang);
      }
      if (lx.pos + 1 < lx.text.size() && lx.peek() == '^' &&
          lx.text[lx.pos + 1] == '^') {
        lx.advance();
        lx.advance();
        lx.skip_ws();
        std::string dt;
        if (!lx.eof() && lx.peek() == '<') {
          dt = read_iri_ref();
        } else {
          std::string pname = read_pname_word();
          if (pname.empty()) lx.fail("expected datatype IRI");
          dt = g.expand(pname);
        }
        return Term::literal(lex, "", dt);
      }
      return Term::literal(lex);
    }
    if (c == '_') {
      lx.advance();
      if (lx.eof() || lx.peek() != ':') lx.fail("expected ':' after '_'");
      lx.advance();
      std::string label;
      while (!lx.eof() && pn_char(lx.peek())) label += lx.advance();
      if (label.empty()) lx.fail("empty blank node label");
      if (predicate_position) lx.fail("blank node in predicate position");
      return Term::blank(label);
    }
    std::string word = read_pname_word();
    if (word.empty()) lx.fail("expected a term");
    if (word == "a") {
      if (!predicate_position) lx.fail("'a' only allowed as predicate");
      return rdf("type");
    }
    if (word.find(':') == std::string::npos)
      lx.fail("bare word '" + word + "' is not a term");
    try {
      return Term::iri(g.expand(word));
    } catch (const Error& e) {
      lx.fail(e.what());
    }
  }

  void parse_prefix_decl() {
    lx.skip_ws();
    std::string prefix;
    while (!lx.eof() && lx.peek() != ':') {
      char c = lx.advance();
      if (std::isspace(static_cast<unsigned char>(c)))
        lx.fail("whitespace before ':' in prefix declaration");
      prefix += c;
    }
    lx.expect(':');
    lx.skip_ws();
    std::string base = read_iri_ref();
    lx.expect('.');
    g.set_prefix(prefix, base);
  }

  void parse_statement() {
    Term subject = read_term(false);
    if (subject.is_literal()) lx.fail("literal in subject position");
    while (true) {
      Term predicate = read_term(true);
      while (true) {
        Term object = read_term(false);
        g.insert({subject, predicate, object});
        if (!lx.match(',')) break;
      }
      if (!lx.match(';')) break;
      lx.skip_ws();
      // Trailing ';' before '.' is tolerated.
      if (!lx.eof() && lx.peek() == '.') break;
    }
    lx.expect('.');
  }

  Graph run() {
    while (true) {
      lx.skip_ws();
      if (lx.eof()) break;
      if (lx.peek() == '@') {
        lx.advance();
        std::string kw = read_pname_word();
        if (kw != "prefix") lx.fail("unknown directive '@" + kw + "'");
        parse_prefix_decl();
      } else {
        parse_statement();
      }
    }
    return std::move(g);
  }
};

std::string escape_literal(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render(const Graph& g, const Term& t) {
  switch (t.kind) {
    case TermKind::Iri:
      if (t.value == kRdfNs + "type") return "a";
      return g.shorten(t.value);
    case TermKind::Blank:
      return "_:" + t.value;
    case TermKind::Literal: {
      std::string out = "\"" + escape_literal(t.value) + "\"";
      if (!t.lang.empty()) out += "@" + t.lang;
      if (!t.datatype.empty()) out += "^^" + g.shorten(t.datatype);
      return out;
    }
  }
  return "";
}

}  // namespace

Graph parse_turtle(const std::string& text) { return Parser(text).run(); }

std::string serialize_turtle(const Graph& g) {
  std::ostringstream out;
  for (const auto& [prefix, base] : g.prefixes())
    out << "@prefix " << prefix << ": <" << base << "> .\n";
  if (!g.prefixes().empty() && !g.triples().empty()) out << "\n";

  const Term* cur_s = nullptr;
  const Term* cur_p = nullptr;
  for (const Triple& t : g.triples()) {
    if (cur_s && t.s == *cur_s) {
      if (t.p == *cur_p) {
        out << " ,\n        " << render(g, t.o);
      } else {
        out << " ;\n    " << render(g, t.p) << " " << render(g, t.o);
      }
    } else {
      if (cur_s) out << " .\n";
      out << render(g, t.s) << "\n    " << render(g, t.p) << " "
          << render(g, t.o);
    }
    cur_s = &t.s;
    cur_p = &t.p;
  }
  if (cur_s) out << " .\n";
  return out.str();
}

}  // namespace kgcr
