#include "kgcr/query.hpp"

#include <algorithm>
#include <sstream>

#include "kgcr/error.hpp"

namespace kgcr {

namespace {

bool position_matches(const PatternTerm& pt, const Term& t,
                      const Binding& binding) {
  if (const Term* c = std::get_if<Term>(&pt)) return *c == t;
  const Variable& v = std::get<Variable>(pt);
  auto it = binding.find(v.name);
  return it == binding.end() || it->second == t;
}

void bind_position(const PatternTerm& pt, const Term& t, Binding& binding) {
  if (const Variable* v = std::get_if<Variable>(&pt))
    binding.emplace(v->name, t);
}

}  // namespace

bool pattern_admits(const TriplePattern& tp, const Triple& t,
                    const Binding& binding) {
  Binding scratch = binding;
  if (!position_matches(tp.s, t.s, scratch)) return false;
  bind_position(tp.s, t.s, scratch);
  if (!position_matches(tp.p, t.p, scratch)) return false;
  bind_position(tp.p, t.p, scratch);
  return position_matches(tp.o, t.o, scratch);
}

void bind_pattern(const TriplePattern& tp, const Triple& t, Binding& binding) {
  bind_position(tp.s, t.s, binding);
  bind_position(tp.p, t.p, binding);
  bind_position(tp.o, t.o, binding);
}

std::vector<Triple> pattern_candidates(const Graph& g, const TriplePattern& tp,
                                       const Binding& binding) {
  auto resolved = [&](const PatternTerm& pt) -> std::optional<Term> {
    if (const Term* c = std::get_if<Term>(&pt)) return *c;
    auto it = binding.find(std::get<Variable>(pt).name);
    if (it != binding.end()) return it->second;
    return std::nullopt;
  };
  auto s = resolved(tp.s), p = resolved(tp.p), o = resolved(tp.o);
  std::vector<Triple> pool;
  if (s && p && o) {
    if (g.has(*s, *p, *o)) pool.push_back({*s, *p, *o});
    return pool;
  }
  if (p && o) return g.with_predicate_object(*p, *o);
  if (s) {
    pool = g.with_subject(*s);
  } else if (o) {
    pool = g.with_object(*o);
  } else {
    pool.assign(g.triples().begin(), g.triples().end());
  }
  std::erase_if(pool, [&](const Triple& t) {
    return (p && t.p != *p) || (o && t.o != *o) || (s && t.s != *s);
  });
  return pool;
}

namespace {

void match_rec(const Graph& g, std::vector<TriplePattern> remaining,
               const Binding& binding, std::vector<Binding>& out) {
  if (remaining.empty()) {
    out.push_back(binding);
    return;
  }
  // Most-selective-first: pick the pattern with the fewest candidates now.
  std::size_t best = 0;
  std::vector<Triple> best_pool;
  for (std::size_t i = 0; i < remaining.size(); i++) {
    auto pool = pattern_candidates(g, remaining[i], binding);
    if (i == 0 || pool.size() < best_pool.size()) {
      best = i;
      best_pool = std::move(pool);
    }
  }
  TriplePattern tp = remaining[best];
  remaining.erase(remaining.begin() + best);
  for (const Triple& t : best_pool) {
    if (!pattern_admits(tp, t, binding)) continue;
    Binding next = binding;
    bind_pattern(tp, t, next);
    match_rec(g, remaining, next, out);
  }
}

}  // namespace

std::vector<Binding> match(const Graph& g, const Pattern& p) {
  std::vector<Binding> out;
  match_rec(g, p.patterns, {}, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Pattern parse_pattern(const std::string& text, const Graph& g) {
  Pattern result;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<std::string> words;
    std::string w;
    while (ls >> w) words.push_back(w);
    if (words.empty()) continue;
    if (words.size() != 3)
      throw ParseError("pattern line needs exactly 3 terms", lineno, 1);
    TriplePattern tp;
    PatternTerm* slots[3] = {&tp.s, &tp.p, &tp.o};
    for (int i = 0; i < 3; i++) {
      const std::string& word = words[i];
      if (word[0] == '?') {
        if (word.size() == 1)
          throw ParseError("empty variable name", lineno, 1);
        *slots[i] = Variable{word.substr(1)};
      } else if (word[0] == '<' && word.back() == '>') {
        *slots[i] = Term::iri(word.substr(1, word.size() - 2));
      } else if (word.rfind("_:", 0) == 0) {
        *slots[i] = Term::blank(word.substr(2));
      } else if (word[0] == '"' && word.back() == '"') {
        *slots[i] = Term::literal(word.substr(1, word.size() - 2));
      } else if (word == "a") {
        *slots[i] = rdf("type");
      } else {
        *slots[i] = Term::iri(g.expand(word));
      }
    }
    result.patterns.push_back(std::move(tp));
  }
  return result;
}

bool TemporalOrder::precedes(const Term& a, const Term& b) const {
  auto it = successors_.find(a);
  return it != successors_.end() && it->second.count(b) > 0;
}

TemporalOrder temporal_order(const Graph& g) {
  std::map<Term, std::set<Term>> direct;
  for (const Triple& t : g.triples()) {
    if (t.p == kgc("then")) direct[t.s].insert(t.o);
    if (t.p == kgc("after")) direct[t.o].insert(t.s);
  }
  // DFS cycle check with an explicit path for the error message.
  std::map<Term, int> color;  // 0 white, 1 on path, 2 done
  std::vector<Term> path;
  auto dfs = [&](auto&& self, const Term& node) -> void {
    color[node] = 1;
    path.push_back(node);
    auto it = direct.find(node);
    if (it != direct.end()) {
      for (const Term& next : it->second) {
        int c = color.count(next) ? color[next] : 0;
        if (c == 1) {
          std::string cycle;
          auto start = std::find(path.begin(), path.end(), next);
          for (auto p = start; p != path.end(); ++p)
            cycle += p->value + " -> ";
          cycle += next.value;
          throw Error("TEMPORAL_CYCLE", cycle);
        }
        if (c == 0) self(self, next);
      }
    }
    path.pop_back();
    color[node] = 2;
  };
  for (const auto& [node, _] : direct)
    if (!color.count(node) || color[node] == 0) dfs(dfs, node);

  // Transitive closure by memoized DFS.
  TemporalOrder order;
  auto close = [&](auto&& self, const Term& node) -> const std::set<Term>& {
    auto found = order.successors_.find(node);
    if (found != order.successors_.end()) return found->second;
    std::set<Term> acc;
    auto it = direct.find(node);
    if (it != direct.end()) {
      for (const Term& next : it->second) {
        acc.insert(next);
        const std::set<Term>& rest = self(self, next);
        acc.insert(rest.begin(), rest.end());
      }
    }
    return order.successors_.emplace(node, std::move(acc)).first->second;
  };
  for (const auto& [node, _] : direct) close(close, node);
  return order;
}

std::vector<Scene> scenes_at_time(const Graph& g, const std::string& t,
                                  const Term& incident) {
  TemporalOrder order = temporal_order(g);
  std::vector<Scene> out;
  for (const Term& id : scene_ids(g)) {
    Scene sc = scene_view(g, id);
    if (!sc.time || *sc.time != t) continue;
    if (order.precedes(incident, id)) continue;
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace kgcr
