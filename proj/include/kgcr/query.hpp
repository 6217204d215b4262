#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "kgcr/graph.hpp"
#include "kgcr/scene.hpp"

namespace kgcr {

struct Variable {
  std::string name;
  auto operator<=>(const Variable&) const = default;
};

using PatternTerm = std::variant<Term, Variable>;

struct TriplePattern {
  PatternTerm s, p, o;
};

struct Pattern {
  std::vector<TriplePattern> patterns;
};

using Binding = std::map<std::string, Term>;

// True when the triple is compatible with the pattern under the binding.
bool pattern_admits(const TriplePattern& tp, const Triple& t,
                    const Binding& binding);

// Extends the binding with the pattern's variables bound from t.
// pattern_admits must hold first.
void bind_pattern(const TriplePattern& tp, const Triple& t, Binding& binding);

// Candidate triples for one pattern under the current binding, served from
// the most selective available index.
std::vector<Triple> pattern_candidates(const Graph& g, const TriplePattern& tp,
                                       const Binding& binding);

// Conjunctive match: every binding under which all patterns hold in g.
// Deterministic result order (lexicographic by variable name, then term),
// no duplicates. The empty pattern yields the single empty binding.
std::vector<Binding> match(const Graph& g, const Pattern& p);

// Parses the CLI pattern syntax: one "(term|?var){3}" group per line.
// Terms use <iri>, prefixed names (resolved against g), _:label or "lit".
Pattern parse_pattern(const std::string& text, const Graph& g);

// Strict partial order induced by then/after scene links. (a then b) makes
// a precede b; (a after b) makes b precede a.
class TemporalOrder {
 public:
  bool precedes(const Term& a, const Term& b) const;

 private:
  friend TemporalOrder temporal_order(const Graph& g);
  std::map<Term, std::set<Term>> successors_;  // transitive closure
};

// Builds the closure; throws TEMPORAL_CYCLE (listing one cycle) when the
// edge relation is cyclic.
TemporalOrder temporal_order(const Graph& g);

// Scenes whose time literal equals t, excluding scenes ordered after the
// incident. Scenes without a time are never returned.
std::vector<Scene> scenes_at_time(const Graph& g, const std::string& t,
                                  const Term& incident);

}  // namespace kgcr
