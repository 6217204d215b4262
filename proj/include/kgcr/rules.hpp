#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "kgcr/query.hpp"

namespace kgcr {

// Skolem head term: a blank node whose label is built from the rule-local
// base plus the bound values of its argument variables. Lets a rule family
// reify n-ary findings onto a deterministic auxiliary node.
struct Skolem {
  std::string base;
  std::vector<std::string> vars;
};

using HeadTerm = std::variant<Term, Variable, Skolem>;

struct HeadPattern {
  HeadTerm s, p, o;
};

// Datalog rule with negation-as-failure. Multiple head atoms are allowed
// and behave like one rule per head sharing the body.
struct Rule {
  std::string name;
  std::vector<HeadPattern> heads;
  std::vector<TriplePattern> body;
  std::vector<TriplePattern> negbody;
};

// Parses the rule DSL. One rule per block:
//   rule NAME: (h_s h_p h_o) [, (…)]* :- (p1 p2 p3), …, not (n1 n2 n3) .
// Terms: ?var, <iri>, pref:local (resolved against g's prefix map),
// "literal", _:label, and skolem heads _:base(?x,?y). '#' starts a comment.
std::vector<Rule> parse_rules(const std::string& text, const Graph& g);

// Proof tree node. A base fact has an empty rule name and no premises.
struct Derivation {
  Triple atom;
  std::string rule;
  std::vector<Triple> premises;  // matched positive body instances
};

using ProofMap = std::map<Triple, Derivation>;

struct ChainResult {
  std::set<Triple> derived;
  ProofMap proofs;  // one proof per derived atom
};

// Stratified semi-naive forward chaining to the least fixpoint.
// Throws UNSAFE_RULE / UNSTRATIFIABLE.
ChainResult forward_chain(const Graph& g, const std::vector<Rule>& rules);

// Scene IRIs supporting `atom`: walks the proof tree down to base triples
// and collects every premise subject typed as a scene in g, plus the
// atom's own scene when the atom itself is scene-structured.
std::set<std::string> scenes_used(const Graph& g, const ProofMap& proofs,
                                  const Triple& atom);

// ---- Motive / opportunity / means pipeline ----

struct MotiveFinding {
  Term suspect, victim, motive;
  std::vector<Triple> evidence;
  std::set<std::string> scenes;
};

struct OpportunityFinding {
  Term suspect;
  Term location;            // whereabouts at incident time
  std::vector<Term> path;   // rooms from location to the crime scene
  std::vector<Triple> evidence;
  std::set<std::string> scenes;
};

struct MeansFinding {
  Term suspect, method;
  std::vector<Triple> evidence;
  std::set<std::string> scenes;
};

struct MomVerdictEntry {
  Term suspect;
  int components = 0;  // of motive, opportunity, means
  std::vector<std::string> notes;
  std::set<std::string> scenes;
};

struct MomReport {
  std::vector<MotiveFinding> motives;
  std::vector<OpportunityFinding> opportunities;
  std::vector<MeansFinding> means;
  std::vector<MomVerdictEntry> verdict;  // by components desc, then IRI
};

// Motive rules derive reified findings: an auxiliary node with outgoing
// kgc:suspect / kgc:victim / kgc:motive triples.
std::vector<MotiveFinding> infer_motives(const Graph& g,
                                         const std::vector<Rule>& motive_rules);

// Persons (other than the incident's victim) located, at the incident
// time, in a room from which the crime scene is reachable over
// human-passable connections (kgc:connectedTo, undirected).
std::vector<OpportunityFinding> infer_opportunity(const Graph& g,
                                                  const Term& incident);

// Narrows kgc:Method nodes to those whose declared symptoms cover every
// observed victim symptom, then keeps suspects meeting each method's
// requirement nodes (kgc:requires -> kgc:reqPredicate / kgc:reqWhat).
std::vector<MeansFinding> infer_means(const Graph& g,
                                      const std::vector<Rule>& means_rules,
                                      const Term& incident);

// Component-count ranking. Motives against other victims do not count
// toward the verdict for `victim`, and the victim is never a suspect.
MomReport combine_mom(std::vector<MotiveFinding> motives,
                      std::vector<OpportunityFinding> opportunities,
                      std::vector<MeansFinding> means, const Term& victim);

// Case metadata convention: a node typed kgc:Case pointing at its incident
// scene via kgc:incident. Victim and crime scene come off that scene.
struct CaseInfo {
  Term case_id;
  Term incident;
  Term victim;
  Term crime_scene;
};

std::vector<CaseInfo> find_cases(const Graph& g);

}  // namespace kgcr
