#include <algorithm>
#include <cctype>

#include "kgcr/error.hpp"
#include "kgcr/solver.hpp"

namespace kgcr {

FormulaPtr Formula::mk_atom(std::string name) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Atom;
  f->atom = std::move(name);
  return f;
}
FormulaPtr Formula::mk_not(FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Not;
  f->args = {std::move(a)};
  return f;
}
FormulaPtr Formula::mk_and(std::vector<FormulaPtr> fs) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::And;
  f->args = std::move(fs);
  return f;
}
FormulaPtr Formula::mk_or(std::vector<FormulaPtr> fs) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Or;
  f->args = std::move(fs);
  return f;
}
FormulaPtr Formula::mk_implies(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Implies;
  f->args = {std::move(a), std::move(b)};
  return f;
}
FormulaPtr Formula::mk_iff(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Iff;
  f->args = {std::move(a), std::move(b)};
  return f;
}

void collect_atoms(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == Formula::Kind::Atom) {
    out.insert(f->atom);
    return;
  }
  for (const FormulaPtr& a : f->args) collect_atoms(a, out);
}

bool eval_formula(const FormulaPtr& f,
                  const std::map<std::string, bool>& assignment) {
  switch (f->kind) {
    case Formula::Kind::Atom: return assignment.at(f->atom);
    case Formula::Kind::Not: return !eval_formula(f->args[0], assignment);
    case Formula::Kind::And:
      for (const FormulaPtr& a : f->args)
        if (!eval_formula(a, assignment)) return false;
      return true;
    case Formula::Kind::Or:
      for (const FormulaPtr& a : f->args)
        if (eval_formula(a, assignment)) return true;
      return false;
    case Formula::Kind::Implies:
      return !eval_formula(f->args[0], assignment) ||
             eval_formula(f->args[1], assignment);
    case Formula::Kind::Iff:
      return eval_formula(f->args[0], assignment) ==
             eval_formula(f->args[1], assignment);
  }
  return false;
}

namespace {

// ---- atom string helpers: "name(a,b)" ----

struct AtomParts {
  std::string name;
  std::vector<std::string> args;
};

std::string join_atom(const AtomParts& a) {
  if (a.args.empty()) return a.name;
  std::string s = a.name + "(";
  for (std::size_t i = 0; i < a.args.size(); i++) {
    if (i) s += ",";
    s += a.args[i];
  }
  return s + ")";
}

AtomParts split_atom(const std::string& atom) {
  AtomParts p;
  auto paren = atom.find('(');
  if (paren == std::string::npos) {
    p.name = atom;
    return p;
  }
  p.name = atom.substr(0, paren);
  std::string inner = atom.substr(paren + 1, atom.size() - paren - 2);
  std::string cur;
  for (char c : inner) {
    if (c == ',') {
      p.args.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) p.args.push_back(cur);
  return p;
}

// ---- scenario text parsing ----

struct SpecCursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;
  explicit SpecCursor(const std::string& t) : text(t) {}

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
      if (peek() == '#') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(peek()))) {
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
  bool match_str(const std::string& s) {
    skip_ws();
    if (text.compare(pos, s.size(), s) == 0) {
      for (std::size_t i = 0; i < s.size(); i++) advance();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!match(c)) fail(std::string("expected '") + c + "'");
  }
  void expect_str(const std::string& s) {
    if (!match_str(s)) fail("expected '" + s + "'");
  }
  std::string ident() {
    skip_ws();
    std::string w;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_'))
      w += advance();
    if (w.empty()) fail("expected an identifier");
    return w;
  }
};

// Formula grammar: iff := imp ('<->' imp)* ; imp := or ('->' imp)? ;
// or := and ('|' and)* ; and := unary ('&' unary)* ;
// unary := '!' unary | '(' iff ')' | atom .
FormulaPtr parse_formula(SpecCursor& cur);

FormulaPtr parse_atom_formula(SpecCursor& cur) {
  AtomParts a;
  a.name = cur.ident();
  if (cur.match('(')) {
    if (!cur.match(')')) {
      do {
        a.args.push_back(cur.ident());
      } while (cur.match(','));
      cur.expect(')');
    }
  }
  return Formula::mk_atom(join_atom(a));
}

FormulaPtr parse_unary(SpecCursor& cur) {
  cur.skip_ws();
  if (cur.match('!')) return Formula::mk_not(parse_unary(cur));
  if (cur.match('(')) {
    FormulaPtr f = parse_formula(cur);
    cur.expect(')');
    return f;
  }
  return parse_atom_formula(cur);
}

FormulaPtr parse_and(SpecCursor& cur) {
  FormulaPtr f = parse_unary(cur);
  std::vector<FormulaPtr> parts{f};
  while (cur.match('&')) parts.push_back(parse_unary(cur));
  return parts.size() == 1 ? parts[0] : Formula::mk_and(std::move(parts));
}

FormulaPtr parse_or(SpecCursor& cur) {
  FormulaPtr f = parse_and(cur);
  std::vector<FormulaPtr> parts{f};
  while (true) {
    cur.skip_ws();
    // '|' but not part of another operator
    if (cur.eof() || cur.peek() != '|') break;
    cur.advance();
    parts.push_back(parse_and(cur));
  }
  return parts.size() == 1 ? parts[0] : Formula::mk_or(std::move(parts));
}

FormulaPtr parse_implies(SpecCursor& cur) {
  FormulaPtr lhs = parse_or(cur);
  cur.skip_ws();
  if (cur.text.compare(cur.pos, 2, "->") == 0) {
    cur.advance();
    cur.advance();
    return Formula::mk_implies(lhs, parse_implies(cur));
  }
  return lhs;
}

FormulaPtr parse_formula(SpecCursor& cur) {
  FormulaPtr lhs = parse_implies(cur);
  while (true) {
    cur.skip_ws();
    if (cur.text.compare(cur.pos, 3, "<->") != 0) break;
    cur.advance();
    cur.advance();
    cur.advance();
    lhs = Formula::mk_iff(lhs, parse_implies(cur));
  }
  return lhs;
}

std::vector<std::pair<std::string, std::string>> parse_quantifiers(
    SpecCursor& cur) {
  // "forall v in DOM[, w in DOM2 ...]" with optional chained
  // "forall v in DOM:" prefixes handled by the caller.
  std::vector<std::pair<std::string, std::string>> qs;
  do {
    std::string var = cur.ident();
    cur.expect_str("in");
    std::string dom = cur.ident();
    qs.emplace_back(var, dom);
  } while (cur.match(','));
  return qs;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
  ScenarioSpec spec;
  SpecCursor cur(text);
  while (true) {
    cur.skip_ws();
    if (cur.eof()) break;
    if (cur.match_str("domain")) {
      std::string name = cur.ident();
      cur.expect('=');
      cur.expect('{');
      std::vector<std::string> values;
      if (!cur.match('}')) {
        do {
          values.push_back(cur.ident());
        } while (cur.match(','));
        cur.expect('}');
      }
      spec.domains[name] = std::move(values);
    } else if (cur.match_str("slots")) {
      cur.expect('=');
      cur.expect('[');
      if (!cur.match(']')) {
        do {
          spec.slots.push_back(cur.ident());
        } while (cur.match(','));
        cur.expect(']');
      }
    } else if (cur.match_str("fact")) {
      FormulaPtr f = parse_atom_formula(cur);
      cur.expect('.');
      spec.facts.push_back(f->atom);
    } else if (cur.match_str("axiom")) {
      Quantified q;
      while (cur.match_str("forall")) {
        std::string var = cur.ident();
        cur.expect_str("in");
        std::string dom = cur.ident();
        q.quantifiers.emplace_back(var, dom);
        cur.expect(':');
      }
      q.body = parse_formula(cur);
      cur.expect('.');
      spec.axioms.push_back(std::move(q));
    } else if (cur.match_str("exactlyone")) {
      CardinalityConstraint cc;
      cc.predicate = cur.ident();
      cur.expect('(');
      bool starred = false;
      do {
        cur.skip_ws();
        if (cur.match('*')) {
          if (starred) cur.fail("only one starred position allowed");
          starred = true;
          cur.expect_str("in");
          cc.args.push_back({true, cur.ident()});
        } else {
          cc.args.push_back({false, cur.ident()});
        }
      } while (cur.match(','));
      cur.expect(')');
      if (!starred) cur.fail("exactlyone needs a '* in DOMAIN' position");
      if (cur.match_str("forall")) cc.quantifiers = parse_quantifiers(cur);
      cur.expect('.');
      spec.exactly_one.push_back(std::move(cc));
    } else if (cur.match_str("soft")) {
      cur.skip_ws();
      std::string digits;
      while (!cur.eof() && std::isdigit(static_cast<unsigned char>(cur.peek())))
        digits += cur.advance();
      if (digits.empty()) cur.fail("soft needs a positive integer weight");
      int weight = std::stoi(digits);
      if (weight < 1) cur.fail("soft weight must be >= 1");
      cur.expect(':');
      Quantified q;
      while (cur.match_str("forall")) {
        std::string var = cur.ident();
        cur.expect_str("in");
        std::string dom = cur.ident();
        q.quantifiers.emplace_back(var, dom);
        cur.expect(':');
      }
      q.body = parse_formula(cur);
      cur.expect('.');
      spec.soft.emplace_back(std::move(q), weight);
    } else {
      cur.fail("expected domain/slots/fact/axiom/exactlyone/soft");
    }
  }
  return spec;
}

namespace {

const std::vector<std::string>& domain_values(const ScenarioSpec& spec,
                                              const std::string& name) {
  if (name == "slots") return spec.slots;
  auto it = spec.domains.find(name);
  if (it == spec.domains.end())
    throw Error("UNDECLARED_SYMBOL", "unknown domain '" + name + "'");
  return it->second;
}

bool constant_declared(const ScenarioSpec& spec, const std::string& c) {
  for (const auto& [name, values] : spec.domains)
    if (std::find(values.begin(), values.end(), c) != values.end())
      return true;
  return std::find(spec.slots.begin(), spec.slots.end(), c) !=
         spec.slots.end();
}

std::string substitute_atom(const ScenarioSpec& spec, const std::string& atom,
                            const std::map<std::string, std::string>& env) {
  AtomParts p = split_atom(atom);
  for (std::string& arg : p.args) {
    auto it = env.find(arg);
    if (it != env.end()) {
      arg = it->second;
    } else if (!constant_declared(spec, arg)) {
      throw Error("UNDECLARED_SYMBOL",
                  "'" + arg + "' in atom " + atom +
                      " is neither a bound variable nor a declared constant");
    }
  }
  return join_atom(p);
}

FormulaPtr substitute(const ScenarioSpec& spec, const FormulaPtr& f,
                      const std::map<std::string, std::string>& env) {
  if (f->kind == Formula::Kind::Atom)
    return Formula::mk_atom(substitute_atom(spec, f->atom, env));
  auto copy = std::make_shared<Formula>();
  copy->kind = f->kind;
  for (const FormulaPtr& a : f->args)
    copy->args.push_back(substitute(spec, a, env));
  return copy;
}

template <typename Emit>
void expand_quantifiers(
    const ScenarioSpec& spec,
    const std::vector<std::pair<std::string, std::string>>& qs,
    std::size_t idx, std::map<std::string, std::string>& env, Emit&& emit) {
  if (idx == qs.size()) {
    emit(env);
    return;
  }
  const auto& [var, dom] = qs[idx];
  const std::vector<std::string>& values = domain_values(spec, dom);
  if (values.empty())
    throw Error("EMPTY_DOMAIN", "quantifier over empty domain '" + dom + "'");
  for (const std::string& v : values) {
    env[var] = v;
    expand_quantifiers(spec, qs, idx + 1, env, emit);
  }
  env.erase(var);
}

}  // namespace

Grounding ground(const ScenarioSpec& spec) {
  Grounding gr;
  std::set<std::string> atoms;

  for (const std::string& fact : spec.facts) {
    std::string ground_fact = substitute_atom(spec, fact, {});
    gr.hard.push_back(Formula::mk_atom(ground_fact));
  }
  for (const Quantified& q : spec.axioms) {
    std::map<std::string, std::string> env;
    expand_quantifiers(spec, q.quantifiers, 0, env,
                       [&](const std::map<std::string, std::string>& e) {
                         gr.hard.push_back(substitute(spec, q.body, e));
                       });
  }
  for (const CardinalityConstraint& cc : spec.exactly_one) {
    std::map<std::string, std::string> env;
    expand_quantifiers(
        spec, cc.quantifiers, 0, env,
        [&](const std::map<std::string, std::string>& e) {
          std::string starred_domain;
          for (const auto& arg : cc.args)
            if (arg.starred) starred_domain = arg.value;
          const std::vector<std::string>& choices =
              domain_values(spec, starred_domain);
          if (choices.empty())
            throw Error("EMPTY_DOMAIN", "exactlyone over empty domain '" +
                                            starred_domain + "'");
          std::vector<FormulaPtr> family;
          for (const std::string& choice : choices) {
            AtomParts p;
            p.name = cc.predicate;
            for (const auto& arg : cc.args) {
              if (arg.starred) {
                p.args.push_back(choice);
              } else {
                auto it = e.find(arg.value);
                if (it != e.end()) {
                  p.args.push_back(it->second);
                } else if (constant_declared(spec, arg.value)) {
                  p.args.push_back(arg.value);
                } else {
                  throw Error("UNDECLARED_SYMBOL",
                              "'" + arg.value + "' in exactlyone " +
                                  cc.predicate);
                }
              }
            }
            family.push_back(Formula::mk_atom(join_atom(p)));
          }
          gr.hard.push_back(Formula::mk_or(family));  // at least one
          for (std::size_t i = 0; i < family.size(); i++)
            for (std::size_t j = i + 1; j < family.size(); j++)
              gr.hard.push_back(Formula::mk_or(
                  {Formula::mk_not(family[i]), Formula::mk_not(family[j])}));
        });
  }
  for (const auto& [q, weight] : spec.soft) {
    std::map<std::string, std::string> env;
    int w = weight;
    expand_quantifiers(spec, q.quantifiers, 0, env,
                       [&](const std::map<std::string, std::string>& e) {
                         gr.soft.emplace_back(substitute(spec, q.body, e), w);
                       });
  }

  for (const FormulaPtr& f : gr.hard) collect_atoms(f, atoms);
  for (const auto& [f, w] : gr.soft) collect_atoms(f, atoms);
  gr.atoms.assign(atoms.begin(), atoms.end());
  for (std::size_t i = 0; i < gr.atoms.size(); i++)
    gr.atom_index[gr.atoms[i]] = static_cast<int>(i) + 1;
  return gr;
}

}  // namespace kgcr
