#include <algorithm>
#include <cstdlib>

#include "kgcr/error.hpp"
#include "kgcr/solver.hpp"

namespace kgcr {

namespace {

// Tseitin encoder. Original atom variables come first; gates are appended.
struct Tseitin {
  CNF cnf;
  const std::map<std::string, int>& atom_index;

  explicit Tseitin(int num_atoms, const std::map<std::string, int>& idx)
      : atom_index(idx) {
    cnf.num_vars = num_atoms;
    cnf.num_original = num_atoms;
  }

  int fresh() { return ++cnf.num_vars; }
  void clause(Clause c) { cnf.clauses.push_back(std::move(c)); }

  int encode(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::Atom:
        return atom_index.at(f->atom);
      case Formula::Kind::Not:
        return -encode(f->args[0]);
      case Formula::Kind::And: {
        std::vector<int> lits;
        for (const FormulaPtr& a : f->args) lits.push_back(encode(a));
        int x = fresh();
        Clause back{x};
        for (int l : lits) {
          clause({-x, l});
          back.push_back(-l);
        }
        clause(std::move(back));
        return x;
      }
      case Formula::Kind::Or: {
        std::vector<int> lits;
        for (const FormulaPtr& a : f->args) lits.push_back(encode(a));
        int x = fresh();
        Clause fwd{-x};
        for (int l : lits) {
          clause({x, -l});
          fwd.push_back(l);
        }
        clause(std::move(fwd));
        return x;
      }
      case Formula::Kind::Implies: {
        int a = encode(f->args[0]), b = encode(f->args[1]);
        int x = fresh();
        clause({-x, -a, b});
        clause({x, a});
        clause({x, -b});
        return x;
      }
      case Formula::Kind::Iff: {
        int a = encode(f->args[0]), b = encode(f->args[1]);
        int x = fresh();
        clause({-x, -a, b});
        clause({-x, a, -b});
        clause({x, a, b});
        clause({x, -a, -b});
        return x;
      }
    }
    std::abort();
  }
};

// Assignment values: 0 unknown, 1 true, -1 false.
struct Dpll {
  const CNF& cnf;
  std::vector<int> assign;

  explicit Dpll(const CNF& c) : cnf(c), assign(c.num_vars + 1, 0) {}

  int value(int lit) const {
    int v = assign[std::abs(lit)];
    return lit > 0 ? v : -v;
  }

  // Unit propagation by clause scanning; false on conflict.
  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Clause& cl : cnf.clauses) {
        int unassigned = 0, last_free = 0;
        bool satisfied = false;
        for (int lit : cl) {
          int v = value(lit);
          if (v > 0) {
            satisfied = true;
            break;
          }
          if (v == 0) {
            unassigned++;
            last_free = lit;
          }
        }
        if (satisfied) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          assign[std::abs(last_free)] = last_free > 0 ? 1 : -1;
          changed = true;
        }
      }
    }
    return true;
  }

  // Lowest-index unassigned variable occurring in an unsatisfied clause;
  // 0 when every clause is satisfied.
  int pick_branch() const {
    int best = 0;
    for (const Clause& cl : cnf.clauses) {
      bool satisfied = false;
      int lowest = 0;
      for (int lit : cl) {
        int v = value(lit);
        if (v > 0) {
          satisfied = true;
          break;
        }
        if (v == 0) {
          int var = std::abs(lit);
          if (lowest == 0 || var < lowest) lowest = var;
        }
      }
      if (!satisfied && lowest != 0 && (best == 0 || lowest < best))
        best = lowest;
    }
    return best;
  }

  bool search() {
    std::vector<int> saved = assign;
    if (!propagate()) {
      assign = std::move(saved);
      return false;
    }
    int var = pick_branch();
    if (var == 0) return true;  // all clauses satisfied
    for (int phase : {1, -1}) {
      std::vector<int> snapshot = assign;
      assign[var] = phase;
      if (search()) return true;
      assign = std::move(snapshot);
    }
    assign = std::move(saved);
    return false;
  }

  Model model() const {
    Model m(cnf.num_vars, false);
    for (int v = 1; v <= cnf.num_vars; v++) m[v - 1] = assign[v] == 1;
    return m;
  }
};

Clause blocking_clause(const Model& m) {
  Clause cl;
  for (std::size_t v = 1; v <= m.size(); v++)
    cl.push_back(m[v - 1] ? -static_cast<int>(v) : static_cast<int>(v));
  return cl;
}

}  // namespace

bool model_satisfies(const Model& m, const std::vector<Clause>& clauses) {
  for (const Clause& cl : clauses) {
    bool sat = false;
    for (int lit : cl)
      if ((lit > 0) == m[std::abs(lit) - 1]) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

CNF to_cnf(const std::vector<FormulaPtr>& formulas, int num_atoms,
           const std::map<std::string, int>& atom_index) {
  Tseitin enc(num_atoms, atom_index);
  for (const FormulaPtr& f : formulas) {
    int root = enc.encode(f);
    enc.clause({root});
  }
  return std::move(enc.cnf);
}

std::optional<Model> solve(const CNF& c) {
  Dpll dpll(c);
  if (!dpll.search()) return std::nullopt;
  return dpll.model();
}

Enumeration enumerate_models(const CNF& c, std::size_t limit) {
  Enumeration result;
  CNF work = c;
  while (true) {
    auto m = solve(work);
    if (!m) return result;
    if (result.models.size() == limit) {
      result.truncated = true;
      return result;
    }
    work.clauses.push_back(blocking_clause(*m));
    result.models.push_back(std::move(*m));
  }
}

std::set<int> backbone(const CNF& c) {
  auto first = solve(c);
  if (!first) throw Error("UNSAT_INPUT", "backbone of an unsatisfiable CNF");
  std::set<int> bb;
  for (int v = 1; v <= c.num_vars; v++) {
    int lit = (*first)[v - 1] ? v : -v;
    CNF probe = c;
    probe.clauses.push_back({-lit});
    if (!solve(probe)) bb.insert(lit);
  }
  return bb;
}

std::optional<WeightedResult> solve_weighted(
    const CNF& hard, const std::vector<std::pair<Clause, int>>& soft) {
  if (!solve(hard)) return std::nullopt;
  long long total = 0;
  for (const auto& [cl, w] : soft) total += w;

  // Branch and bound over total assignments in branching order. The first
  // assignment attaining the optimum wins ties.
  std::optional<Model> best;
  long long best_loss = total + 1;
  std::vector<int> assign(hard.num_vars + 1, 0);

  auto lit_value = [&](int lit) {
    int v = assign[std::abs(lit)];
    return lit > 0 ? v : -v;
  };
  auto clause_state = [&](const Clause& cl) {
    // 1 satisfied, -1 falsified, 0 open
    bool open = false;
    for (int lit : cl) {
      int v = lit_value(lit);
      if (v > 0) return 1;
      if (v == 0) open = true;
    }
    return open ? 0 : -1;
  };

  auto rec = [&](auto&& self, int var, long long loss) -> void {
    if (loss >= best_loss) return;
    for (const Clause& cl : hard.clauses)
      if (clause_state(cl) == -1) return;
    if (var > hard.num_vars) {
      best_loss = loss;
      Model m(hard.num_vars, false);
      for (int v = 1; v <= hard.num_vars; v++) m[v - 1] = assign[v] == 1;
      best = std::move(m);
      return;
    }
    for (int phase : {1, -1}) {
      assign[var] = phase;
      long long new_loss = 0;
      for (const auto& [cl, w] : soft)
        if (clause_state(cl) == -1) new_loss += w;
      self(self, var + 1, new_loss);
      assign[var] = 0;
      if (best_loss == 0) return;  // cannot improve further
    }
  };
  rec(rec, 1, 0);

  if (!best) return std::nullopt;
  WeightedResult result;
  result.model = *best;
  result.satisfied_weight = total - best_loss;
  return result;
}

ScenarioReport scenario_report(const ScenarioSpec& spec, const Grounding& gr,
                               const std::vector<Model>& models,
                               bool truncated, const std::set<int>& bb) {
  ScenarioReport report;
  report.truncated = truncated;
  if (models.empty()) {
    report.unsat = true;
    return report;
  }

  // Project models onto the original atoms and deduplicate.
  std::set<std::vector<bool>> projections;
  for (const Model& m : models)
    projections.insert(std::vector<bool>(
        m.begin(), m.begin() + static_cast<long>(gr.atoms.size())));
  report.model_count = projections.size();

  for (std::size_t i = 0; i < gr.atoms.size(); i++) {
    bool first = (*projections.begin())[i];
    bool varies = false;
    for (const auto& p : projections) varies |= p[i] != first;
    if (varies) report.indeterminate_atoms.push_back(gr.atoms[i]);
  }
  for (int lit : bb) {
    int var = std::abs(lit);
    if (var > static_cast<int>(gr.atoms.size())) continue;
    report.backbone_atoms.push_back(
        (lit > 0 ? "" : "!") + gr.atoms[var - 1]);
  }
  std::sort(report.backbone_atoms.begin(), report.backbone_atoms.end());

  auto persons_it = spec.domains.find("persons");
  if (persons_it != spec.domains.end()) {
    for (const std::string& person : persons_it->second) {
      std::string prefix = "guilty(" + person;
      bool any_atom = false, all_models_all_atoms = true, some = false;
      for (std::size_t i = 0; i < gr.atoms.size(); i++) {
        const std::string& atom = gr.atoms[i];
        if (atom.compare(0, prefix.size(), prefix) != 0) continue;
        if (atom.size() > prefix.size() && atom[prefix.size()] != ',' &&
            atom[prefix.size()] != ')')
          continue;
        any_atom = true;
        for (const auto& p : projections) {
          if (p[i]) some = true;
          if (!p[i]) all_models_all_atoms = false;
        }
      }
      SuspectVerdict verdict = SuspectVerdict::NeverGuilty;
      if (any_atom && all_models_all_atoms)
        verdict = SuspectVerdict::GuiltyInAll;
      else if (some)
        verdict = SuspectVerdict::GuiltyInSome;
      report.suspects.emplace_back(person, verdict);
    }
  }
  return report;
}

}  // namespace kgcr
