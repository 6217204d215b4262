#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kgcr {

// ---- propositional formulas over named ground atoms ----

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies, Iff };
  Kind kind = Kind::Atom;
  std::string atom;              // Kind::Atom only
  std::vector<FormulaPtr> args;  // 1 for Not, 2 for Implies/Iff, >=1 And/Or

  static FormulaPtr mk_atom(std::string name);
  static FormulaPtr mk_not(FormulaPtr f);
  static FormulaPtr mk_and(std::vector<FormulaPtr> fs);
  static FormulaPtr mk_or(std::vector<FormulaPtr> fs);
  static FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b);
};

// Collects atom names in the formula into out.
void collect_atoms(const FormulaPtr& f, std::set<std::string>& out);

// Evaluates under a total assignment of its atoms.
bool eval_formula(const FormulaPtr& f,
                  const std::map<std::string, bool>& assignment);

// ---- scenario specs ----

struct CardinalityConstraint {
  std::string predicate;
  // One entry per argument position: either a fixed quantified variable
  // name, or the starred position's domain (exactly one position).
  struct Arg {
    bool starred = false;
    std::string value;  // variable name, or domain name when starred
  };
  std::vector<Arg> args;
  std::vector<std::pair<std::string, std::string>> quantifiers;  // var, domain
};

struct Quantified {
  std::vector<std::pair<std::string, std::string>> quantifiers;  // var, domain
  FormulaPtr body;  // atoms may reference quantified variables by name
};

struct ScenarioSpec {
  std::map<std::string, std::vector<std::string>> domains;
  std::vector<std::string> slots;  // ordered; also usable as domain "slots"
  std::vector<std::string> facts;  // ground atoms "name(a,b)"
  std::vector<Quantified> axioms;
  std::vector<CardinalityConstraint> exactly_one;
  std::vector<std::pair<Quantified, int>> soft;  // formula, weight >= 1
};

// Text format:
//   domain persons = {helen, julia}
//   slots = [night, midnight]
//   fact at(helen, helenroom, day1, night).
//   axiom forall p in persons: forall d in days: guilty(p,d) -> keeps(p).
//   exactlyone at(p, * in places, d, s) forall p in persons, d in days,
//     s in slots.
//   soft 2: animalat(safe, day1, night).
// Formula connectives: & | ! -> <-> and parentheses.
ScenarioSpec parse_scenario(const std::string& text);

struct Grounding {
  std::vector<std::string> atoms;          // index -> atom, sorted
  std::map<std::string, int> atom_index;   // atom -> 1-based variable
  std::vector<FormulaPtr> hard;
  std::vector<std::pair<FormulaPtr, int>> soft;
};

// Expands quantifiers and cardinality constraints over the declared
// domains. Throws UNDECLARED_SYMBOL / EMPTY_DOMAIN.
Grounding ground(const ScenarioSpec& spec);

// ---- CNF and solving ----

using Clause = std::vector<int>;  // nonzero signed variable indices

struct CNF {
  int num_vars = 0;
  int num_original = 0;  // leading variables that name real atoms
  std::vector<Clause> clauses;
};

// Tseitin transformation; original atom variables keep their indices,
// auxiliary variables are appended. Equisatisfiable, and projections of
// models onto the original atoms coincide with the models of f.
CNF to_cnf(const std::vector<FormulaPtr>& formulas, int num_atoms,
           const std::map<std::string, int>& atom_index);

using Model = std::vector<bool>;  // 1-based semantics: model[v-1]

// Direct evaluation: every clause has a satisfied literal.
bool model_satisfies(const Model& m, const std::vector<Clause>& clauses);

// DPLL with unit propagation. Branching is deterministic: lowest-index
// unassigned variable, true first; unconstrained variables end up false.
std::optional<Model> solve(const CNF& c);

struct Enumeration {
  std::vector<Model> models;
  bool truncated = false;
};

// Distinct models via blocking clauses, in branching order, up to limit.
Enumeration enumerate_models(const CNF& c, std::size_t limit);

// Literals true in every model. Throws UNSAT_INPUT on unsatisfiable input.
std::set<int> backbone(const CNF& c);

// Exact weighted MaxSAT by branch and bound: satisfies all hard clauses,
// maximizes total satisfied soft weight, deterministic tie-breaking by
// branching order. nullopt when the hard clauses are unsatisfiable.
struct WeightedResult {
  Model model;
  long long satisfied_weight = 0;
};
std::optional<WeightedResult> solve_weighted(
    const CNF& hard, const std::vector<std::pair<Clause, int>>& soft);

// ---- reporting ----

enum class SuspectVerdict { GuiltyInAll, GuiltyInSome, NeverGuilty };

struct ScenarioReport {
  bool unsat = false;
  std::size_t model_count = 0;  // enumerated (possibly truncated)
  bool truncated = false;
  // Suspects come from the "persons" domain; a suspect is judged over the
  // guilty(...) atoms whose first argument names them.
  std::vector<std::pair<std::string, SuspectVerdict>> suspects;
  std::vector<std::string> backbone_atoms;      // signed, e.g. "-at(x,y)"
  std::vector<std::string> indeterminate_atoms; // vary across models
};

ScenarioReport scenario_report(const ScenarioSpec& spec, const Grounding& gr,
                               const std::vector<Model>& models,
                               bool truncated, const std::set<int>& backbone);

}  // namespace kgcr
