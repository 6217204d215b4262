#include "kgcr/rules.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "kgcr/error.hpp"

namespace kgcr {

namespace {

// ---- DSL parsing ----

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Cursor(const std::string& t) : text(t) {}

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
  std::string word() {
    skip_ws();
    std::string w;
    while (!eof()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
          c == ')' || c == ',' || c == '.')
        break;
      w += advance();
    }
    return w;
  }
};

HeadTerm parse_head_term(Cursor& cur, const Graph& g);

PatternTerm parse_body_term(Cursor& cur, const Graph& g) {
  HeadTerm ht = parse_head_term(cur, g);
  if (std::holds_alternative<Skolem>(ht))
    cur.fail("skolem terms are only allowed in rule heads");
  if (const Term* t = std::get_if<Term>(&ht)) return *t;
  return std::get<Variable>(ht);
}

HeadTerm parse_head_term(Cursor& cur, const Graph& g) {
  cur.skip_ws();
  if (cur.eof()) cur.fail("unexpected end of input");
  if (cur.peek() == '?') {
    cur.advance();
    std::string name = cur.word();
    if (name.empty()) cur.fail("empty variable name");
    return Variable{name};
  }
  if (cur.peek() == '<') {
    cur.advance();
    std::string iri;
    while (!cur.eof() && cur.peek() != '>') iri += cur.advance();
    if (cur.eof()) cur.fail("unterminated IRI");
    cur.advance();
    return Term::iri(iri);
  }
  if (cur.peek() == '"') {
    cur.advance();
    std::string lit;
    while (!cur.eof() && cur.peek() != '"') lit += cur.advance();
    if (cur.eof()) cur.fail("unterminated literal");
    cur.advance();
    return Term::literal(lit);
  }
  if (cur.text.compare(cur.pos, 2, "_:") == 0) {
    cur.advance();
    cur.advance();
    std::string label;
    while (!cur.eof() && cur.peek() != '(' && cur.peek() != ')' &&
           cur.peek() != ',' &&
           !std::isspace(static_cast<unsigned char>(cur.peek())))
      label += cur.advance();
    if (label.empty()) cur.fail("empty blank node label");
    if (!cur.eof() && cur.peek() == '(') {
      cur.advance();
      Skolem sk{label, {}};
      while (true) {
        cur.skip_ws();
        if (cur.eof() || cur.peek() != '?')
          cur.fail("skolem arguments must be variables");
        cur.advance();
        std::string name = cur.word();
        if (name.empty()) cur.fail("empty variable name");
        sk.vars.push_back(name);
        cur.skip_ws();
        if (cur.match(',')) continue;
        cur.expect(')');
        break;
      }
      return sk;
    }
    return Term::blank(label);
  }
  std::string w = cur.word();
  if (w.empty()) cur.fail("expected a term");
  if (w == "a") return rdf("type");
  try {
    return Term::iri(g.expand(w));
  } catch (const Error& e) {
    cur.fail(e.what());
  }
}

template <typename T, typename ParseTerm>
T parse_atom(Cursor& cur, const Graph& g, ParseTerm&& pt) {
  cur.expect('(');
  T atom;
  atom.s = pt(cur, g);
  atom.p = pt(cur, g);
  atom.o = pt(cur, g);
  cur.expect(')');
  return atom;
}

void collect_vars(const PatternTerm& t, std::set<std::string>& out) {
  if (const Variable* v = std::get_if<Variable>(&t)) out.insert(v->name);
}

void collect_head_vars(const HeadTerm& t, std::set<std::string>& out) {
  if (const Variable* v = std::get_if<Variable>(&t)) {
    out.insert(v->name);
  } else if (const Skolem* sk = std::get_if<Skolem>(&t)) {
    for (const std::string& name : sk->vars) out.insert(name);
  }
}

void check_safety(const Rule& r) {
  std::set<std::string> body_vars, needed;
  for (const TriplePattern& p : r.body) {
    collect_vars(p.s, body_vars);
    collect_vars(p.p, body_vars);
    collect_vars(p.o, body_vars);
  }
  for (const HeadPattern& h : r.heads) {
    collect_head_vars(h.s, needed);
    collect_head_vars(h.p, needed);
    collect_head_vars(h.o, needed);
  }
  for (const TriplePattern& p : r.negbody) {
    collect_vars(p.s, needed);
    collect_vars(p.p, needed);
    collect_vars(p.o, needed);
  }
  for (const std::string& v : needed)
    if (!body_vars.count(v))
      throw Error("UNSAFE_RULE", "rule '" + r.name + "': variable ?" + v +
                                     " does not occur in a positive body "
                                     "pattern");
}

// ---- stratification ----

// Predicate constant of a pattern position, or nullopt meaning "any".
std::optional<Term> pattern_pred(const PatternTerm& p) {
  if (const Term* t = std::get_if<Term>(&p)) return *t;
  return std::nullopt;
}

std::optional<Term> head_pred(const HeadTerm& p) {
  if (const Term* t = std::get_if<Term>(&p)) return *t;
  return std::nullopt;
}

bool preds_overlap(const std::optional<Term>& a, const std::optional<Term>& b) {
  return !a || !b || *a == *b;
}

struct DepGraph {
  // adjacency: rule index -> rules it depends on, with negation flag
  std::vector<std::vector<std::pair<std::size_t, bool>>> deps;
};

DepGraph build_deps(const std::vector<Rule>& rules) {
  DepGraph dg;
  dg.deps.resize(rules.size());
  for (std::size_t r = 0; r < rules.size(); r++) {
    auto scan = [&](const std::vector<TriplePattern>& pats, bool negated) {
      for (const TriplePattern& pat : pats) {
        auto bp = pattern_pred(pat.p);
        for (std::size_t s = 0; s < rules.size(); s++)
          for (const HeadPattern& h : rules[s].heads)
            if (preds_overlap(bp, head_pred(h.p))) {
              dg.deps[r].push_back({s, negated});
              break;
            }
      }
    };
    scan(rules[r].body, false);
    scan(rules[r].negbody, true);
  }
  return dg;
}

// Tarjan SCC; returns component id per rule, components numbered in
// reverse topological order of the condensation.
std::vector<std::size_t> sccs(const DepGraph& dg, std::size_t n,
                              std::size_t& count) {
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack, comp(n, 0);
  int next = 0;
  count = 0;
  std::function<void(std::size_t)> strongconnect = [&](std::size_t v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto [w, neg] : dg.deps[v]) {
      if (index[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
        if (w == v) break;
      }
      count++;
    }
  };
  for (std::size_t v = 0; v < n; v++)
    if (index[v] < 0) strongconnect(v);
  return comp;
}

// Groups rules into evaluation units, dependencies first. Throws
// UNSTRATIFIABLE when a negative dependency closes a cycle.
std::vector<std::vector<std::size_t>> stratify(const std::vector<Rule>& rules) {
  DepGraph dg = build_deps(rules);
  std::size_t ncomp = 0;
  std::vector<std::size_t> comp = sccs(dg, rules.size(), ncomp);
  for (std::size_t r = 0; r < rules.size(); r++)
    for (auto [s, neg] : dg.deps[r])
      if (neg && comp[r] == comp[s]) {
        std::string names = rules[r].name;
        if (s != r) names += " <-> " + rules[s].name;
        throw Error("UNSTRATIFIABLE",
                    "negation inside a recursive cycle: " + names);
      }
  // Tarjan numbers components in reverse topological order, so component 0
  // has no dependencies outside itself.
  std::vector<std::vector<std::size_t>> strata(ncomp);
  for (std::size_t r = 0; r < rules.size(); r++) strata[comp[r]].push_back(r);
  return strata;
}

// ---- evaluation ----

std::string local_name(const std::string& iri) {
  auto pos = iri.find_last_of("#/");
  return pos == std::string::npos ? iri : iri.substr(pos + 1);
}

std::string skolem_component(const Term& t) {
  std::string raw = t.is_iri() ? local_name(t.value) : t.value;
  std::string out;
  for (char c : raw)
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

Term resolve_head_term(const HeadTerm& ht, const Binding& b) {
  if (const Term* t = std::get_if<Term>(&ht)) return *t;
  if (const Variable* v = std::get_if<Variable>(&ht)) return b.at(v->name);
  const Skolem& sk = std::get<Skolem>(ht);
  std::string label = sk.base;
  for (const std::string& var : sk.vars)
    label += "_" + skolem_component(b.at(var));
  return Term::blank(label);
}

// Enumerates bindings of the positive body where pattern `delta_pos` is
// matched against `delta` and the rest against `db`.
void join(const Graph& db, const std::vector<Triple>& delta, const Rule& rule,
          std::size_t delta_pos, std::size_t idx, Binding& binding,
          std::vector<Triple>& premises,
          const std::function<void(const Binding&, const std::vector<Triple>&)>&
              emit) {
  if (idx == rule.body.size()) {
    for (const TriplePattern& np : rule.negbody) {
      for (const Triple& t : pattern_candidates(db, np, binding))
        if (pattern_admits(np, t, binding)) return;  // NAF blocked
    }
    emit(binding, premises);
    return;
  }
  const TriplePattern& pat = rule.body[idx];
  auto try_triple = [&](const Triple& t) {
    if (!pattern_admits(pat, t, binding)) return;
    Binding saved = binding;
    bind_pattern(pat, t, binding);
    premises.push_back(t);
    join(db, delta, rule, delta_pos, idx + 1, binding, premises, emit);
    premises.pop_back();
    binding = std::move(saved);
  };
  if (idx == delta_pos) {
    for (const Triple& t : delta) try_triple(t);
  } else {
    for (const Triple& t : pattern_candidates(db, pat, binding))
      try_triple(t);
  }
}

}  // namespace

std::vector<Rule> parse_rules(const std::string& text, const Graph& g) {
  Cursor cur(text);
  std::vector<Rule> rules;
  auto head_parser = [](Cursor& c, const Graph& gg) {
    return parse_head_term(c, gg);
  };
  auto body_parser = [](Cursor& c, const Graph& gg) {
    return parse_body_term(c, gg);
  };
  while (true) {
    cur.skip_ws();
    if (cur.eof()) break;
    if (!cur.match_str("rule")) cur.fail("expected 'rule'");
    cur.skip_ws();
    std::string name;
    while (!cur.eof() && cur.peek() != ':' &&
           !std::isspace(static_cast<unsigned char>(cur.peek())))
      name += cur.advance();
    if (name.empty()) cur.fail("rule needs a name");
    cur.expect(':');
    Rule r;
    r.name = name;
    do {
      r.heads.push_back(parse_atom<HeadPattern>(cur, g, head_parser));
    } while (cur.match(','));
    if (!cur.match_str(":-")) cur.fail("expected ':-'");
    cur.skip_ws();
    if (!cur.match('.')) {
      do {
        if (cur.match_str("not")) {
          r.negbody.push_back(parse_atom<TriplePattern>(cur, g, body_parser));
        } else {
          r.body.push_back(parse_atom<TriplePattern>(cur, g, body_parser));
        }
      } while (cur.match(','));
      cur.expect('.');
    }
    for (const HeadPattern& h : r.heads)
      if (std::holds_alternative<Skolem>(h.p) ||
          (std::holds_alternative<Term>(h.p) &&
           !std::get<Term>(h.p).is_iri()))
        cur.fail("rule '" + name + "': head predicate must be an IRI");
    rules.push_back(std::move(r));
  }
  return rules;
}

ChainResult forward_chain(const Graph& g, const std::vector<Rule>& rules) {
  for (const Rule& r : rules) check_safety(r);
  ChainResult result;
  Graph db = g;
  for (const std::vector<std::size_t>& stratum : stratify(rules)) {
    std::vector<Triple> delta(db.triples().begin(), db.triples().end());
    bool first_round = true;
    while (first_round || !delta.empty()) {
      std::set<Triple> fresh;
      for (std::size_t ri : stratum) {
        const Rule& rule = rules[ri];
        if (rule.body.empty()) {
          if (!first_round) continue;
          Binding empty;
          std::vector<Triple> none;
          for (const HeadPattern& h : rule.heads) {
            Triple t{resolve_head_term(h.s, empty),
                     resolve_head_term(h.p, empty),
                     resolve_head_term(h.o, empty)};
            if (!db.contains(t) && !fresh.count(t)) {
              fresh.insert(t);
              result.proofs.emplace(t, Derivation{t, rule.name, {}});
            }
          }
          continue;
        }
        // Semi-naive: require one body position to match the delta. The
        // first round runs with delta == db, i.e. a full naive pass over
        // position 0 only.
        std::size_t positions = first_round ? 1 : rule.body.size();
        for (std::size_t dp = 0; dp < positions; dp++) {
          Binding binding;
          std::vector<Triple> premises;
          join(db, delta, rule, dp, 0, binding, premises,
               [&](const Binding& b, const std::vector<Triple>& prem) {
                 for (const HeadPattern& h : rule.heads) {
                   Term s = resolve_head_term(h.s, b);
                   Term p = resolve_head_term(h.p, b);
                   Term o = resolve_head_term(h.o, b);
                   if (!p.is_iri() || s.is_literal()) continue;
                   Triple t{std::move(s), std::move(p), std::move(o)};
                   if (db.contains(t) || fresh.count(t)) continue;
                   fresh.insert(t);
                   result.proofs.emplace(t, Derivation{t, rule.name, prem});
                 }
               });
        }
      }
      delta.assign(fresh.begin(), fresh.end());
      for (const Triple& t : fresh) {
        db.insert(t);
        result.derived.insert(t);
      }
      first_round = false;
    }
  }
  return result;
}

std::set<std::string> scenes_used(const Graph& g, const ProofMap& proofs,
                                  const Triple& atom) {
  std::set<std::string> scenes;
  std::set<Triple> visited;
  std::vector<Triple> stack{atom};
  while (!stack.empty()) {
    Triple t = stack.back();
    stack.pop_back();
    if (!visited.insert(t).second) continue;
    if (t.s.is_iri() && is_scene(g, t.s)) scenes.insert(t.s.value);
    auto it = proofs.find(t);
    if (it != proofs.end())
      for (const Triple& prem : it->second.premises) stack.push_back(prem);
  }
  return scenes;
}

}  // namespace kgcr
