// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when
// any criterion fails (wrong result or exceeded runtime budget).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kgcr/error.hpp"
#include "kgcr/eval.hpp"
#include "kgcr/ibis.hpp"
#include "kgcr/rules.hpp"
#include "kgcr/solver.hpp"
#include "kgcr/tensor.hpp"
#include "kgcr/turtle.hpp"

using namespace kgcr;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& title, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
  std::string why;
  bool ok = false;
  auto start = std::chrono::steady_clock::now();
  try {
    ok = body(why);
  } catch (const std::exception& e) {
    ok = false;
    why = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (ok && elapsed > budget_seconds) {
    ok = false;
    why = "runtime budget exceeded";
  }
  char line[256];
  std::snprintf(line, sizeof line, "%s criterion %d: %s (%.2fs, budget %gs)",
                ok ? "PASS" : "FAIL", number, title.c_str(), elapsed,
                budget_seconds);
  std::cout << line;
  if (!ok && !why.empty()) std::cout << " -- " << why;
  std::cout << "\n";
  if (!ok) g_failures++;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string data_path(const std::string& name) {
  return std::string(KGCR_DATA_DIR) + "/" + name;
}

// Runs the CLI and captures its standard output.
std::string run_cli(const std::string& args) {
  std::string tmp = std::string(KGCR_DATA_DIR) + "/../build/acceptance.out";
  std::string cmd =
      std::string("\"") + KGCR_CLI_PATH + "\" " + args + " > " + tmp + " 2>&1";
  if (std::system(cmd.c_str()) == -1) return "";
  return slurp(tmp);
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    n++;
    pos += needle.size();
  }
  return n;
}

// ---- truth-table oracle over small CNFs ----

bool clause_sat(const Clause& c, unsigned bits) {
  for (int lit : c) {
    bool val = (bits >> (std::abs(lit) - 1)) & 1u;
    if ((lit > 0) == val) return true;
  }
  return false;
}

std::vector<unsigned> oracle_models(const CNF& c) {
  std::vector<unsigned> out;
  for (unsigned bits = 0; bits < (1u << c.num_vars); bits++) {
    bool ok = true;
    for (const Clause& cl : c.clauses)
      if (!clause_sat(cl, bits)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(bits);
  }
  return out;
}

unsigned model_bits(const Model& m) {
  unsigned bits = 0;
  for (std::size_t i = 0; i < m.size(); i++)
    if (m[i]) bits |= 1u << i;
  return bits;
}

// ---- independent naive datalog fixpoint ----

struct NaiveRule {
  HeadPattern head;
  std::vector<TriplePattern> body;
  std::vector<TriplePattern> negbody;
};

bool naive_admits(const TriplePattern& tp, const Triple& t, Binding& b) {
  const PatternTerm* pats[3] = {&tp.s, &tp.p, &tp.o};
  const Term* vals[3] = {&t.s, &t.p, &t.o};
  Binding local = b;
  for (int i = 0; i < 3; i++) {
    if (const Term* c = std::get_if<Term>(pats[i])) {
      if (*c != *vals[i]) return false;
    } else {
      const std::string& name = std::get<Variable>(*pats[i]).name;
      auto it = local.find(name);
      if (it == local.end()) {
        local[name] = *vals[i];
      } else if (it->second != *vals[i]) {
        return false;
      }
    }
  }
  b = std::move(local);
  return true;
}

void naive_join(const std::set<Triple>& db,
                const std::vector<TriplePattern>& body, std::size_t idx,
                Binding b, std::vector<Binding>& out) {
  if (idx == body.size()) {
    out.push_back(b);
    return;
  }
  for (const Triple& t : db) {
    Binding next = b;
    if (naive_admits(body[idx], t, next))
      naive_join(db, body, idx + 1, next, out);
  }
}

Term naive_resolve(const HeadTerm& ht, const Binding& b) {
  if (const Term* t = std::get_if<Term>(&ht)) return *t;
  if (const Variable* v = std::get_if<Variable>(&ht)) return b.at(v->name);
  const Skolem& sk = std::get<Skolem>(ht);
  std::string label = sk.base;
  for (const std::string& var : sk.vars) {
    const Term& val = b.at(var);
    std::string raw = val.value;
    auto pos = raw.find_last_of("#/");
    if (val.is_iri() && pos != std::string::npos) raw = raw.substr(pos + 1);
    std::string clean;
    for (char c : raw)
      clean += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    label += "_" + clean;
  }
  return Term::blank(label);
}

std::set<Triple> naive_fixpoint(const Graph& g,
                                const std::vector<NaiveRule>& rules) {
  std::set<Triple> db(g.triples().begin(), g.triples().end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const NaiveRule& r : rules) {
      std::vector<Binding> rows;
      naive_join(db, r.body, 0, {}, rows);
      for (const Binding& b : rows) {
        bool blocked = false;
        for (const TriplePattern& np : r.negbody) {
          for (const Triple& t : db) {
            Binding scratch = b;
            if (naive_admits(np, t, scratch)) {
              blocked = true;
              break;
            }
          }
          if (blocked) break;
        }
        if (blocked) continue;
        Term s = naive_resolve(r.head.s, b);
        Term p = naive_resolve(r.head.p, b);
        Term o = naive_resolve(r.head.o, b);
        if (!p.is_iri() || s.is_literal()) continue;
        if (db.insert({s, p, o}).second) changed = true;
      }
    }
  }
  for (const Triple& t : g.triples()) db.erase(t);
  return db;
}

Term ex(const std::string& n) { return Term::iri("http://e/" + n); }

double orthonormality_defect(const Mat& f) {
  Mat g = matmul(transpose(f), f);
  double m = 0.0;
  for (std::size_t i = 0; i < g.rows; i++)
    for (std::size_t j = 0; j < g.cols; j++)
      m = std::max(m, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return m;
}

}  // namespace

int main() {
  criterion(1, "score-table aggregation reproduces the printed averages", 1.0,
            [](std::string& why) {
              ScoreTable t = parse_score_table(slurp(data_path("table2.csv")));
              std::vector<ColumnStats> stats = aggregate(t);
              if (stats.size() != 3) {
                why = "expected 3 submissions";
                return false;
              }
              double a = round_half_up(stats[0].metric_average, 2);
              double b = round_half_up(stats[1].metric_average, 2);
              double c = round_half_up(stats[2].metric_average, 1);
              if (a != 3.31 || b != 3.45 || c != 4.1) {
                why = "averages " + std::to_string(a) + ", " +
                      std::to_string(b) + ", " + std::to_string(c);
                return false;
              }
              return true;
            });

  criterion(2, "MOM pipeline names Roylott via money and venom", 1.0,
            [](std::string& why) {
              std::string out = run_cli("mom " + data_path("fixture.ttl") +
                                        " --rules " + data_path("mom.rules"));
              bool ok =
                  contains(out, "top suspect: sb:Roylott") &&
                  contains(out,
                           "top suspect: sb:Roylott motive: money") &&
                  contains(out, "means: venomKilling") &&
                  count_of(out, "components=3") == 1 &&  // sole top suspect
                  count_of(out, "\nmotive: ") + (out.rfind("motive: ", 0) == 0)
                      == 3;
              if (!ok) why = "unexpected output:\n" + out;
              return ok;
            });

  criterion(3, "SAT backbone convicts Roylott on both days", 5.0,
            [](std::string& why) {
              std::string out =
                  run_cli("sat " + data_path("scenario.spec") + " --backbone");
              bool ok = contains(out, "backbone: guilty(roylott,day1)") &&
                        contains(out, "backbone: guilty(roylott,day2)") &&
                        contains(out, "suspect roylott: guilty-in-all") &&
                        contains(out,
                                 "indeterminate: animalat(safe,day1,night)") &&
                        contains(out,
                                 "indeterminate: "
                                 "animalat(roylottroom,day1,night)");
              if (!ok) why = "unexpected output:\n" + out;
              return ok;
            });

  criterion(4, "IBIS discussion selects Roylott and round-trips", 5.0,
            [](std::string& why) {
              std::string out = run_cli("ibis " + data_path("fixture.ttl") +
                                        " --rules " + data_path("mom.rules"));
              if (!contains(out, "selected: sb:Roylott")) {
                why = "unexpected output:\n" + out;
                return false;
              }
              Graph g = parse_turtle(slurp(data_path("fixture.ttl")));
              std::vector<Rule> rules =
                  parse_rules(slurp(data_path("mom.rules")), g);
              const std::string sb =
                  "http://kgc.knowledge-graph.jp/data/SpeckledBand#";
              DiscussionResult res =
                  run_discussion(g, rules, Term::iri(sb + "Julia"),
                                 Term::iri(sb + "scene01"));
              if (!res.selected || res.selected->value != sb + "Roylott") {
                why = "argmax did not pick Roylott";
                return false;
              }
              std::string doc = export_ibis(res.ibis);
              if (!(import_ibis(doc) == res.ibis) ||
                  export_ibis(import_ibis(doc)) != doc) {
                why = "IBIS export does not round-trip";
                return false;
              }
              return true;
            });

  criterion(5, "solver matches the truth-table oracle on 500 CNFs", 60.0,
            [](std::string& why) {
              std::mt19937 rng(505);
              for (int round = 0; round < 500; round++) {
                CNF c;
                c.num_vars = 1 + static_cast<int>(rng() % 16);
                c.num_original = c.num_vars;
                // Enough clauses to keep the model count manageable.
                int clauses = std::min(60, c.num_vars * 2 +
                                               static_cast<int>(rng() % 20));
                for (int i = 0; i < clauses; i++) {
                  Clause cl;
                  int len = 1 + static_cast<int>(rng() % 3);
                  for (int j = 0; j < len; j++) {
                    int v = 1 + static_cast<int>(rng() % c.num_vars);
                    int lit = rng() % 2 ? v : -v;
                    if (std::find(cl.begin(), cl.end(), -lit) != cl.end())
                      continue;
                    if (std::find(cl.begin(), cl.end(), lit) == cl.end())
                      cl.push_back(lit);
                  }
                  if (!cl.empty()) c.clauses.push_back(cl);
                }

                std::vector<unsigned> want = oracle_models(c);

                auto m = solve(c);
                if (m.has_value() != !want.empty()) {
                  why = "solve() SAT/UNSAT mismatch";
                  return false;
                }
                if (m && !model_satisfies(*m, c.clauses)) {
                  why = "solve() returned a non-model";
                  return false;
                }

                Enumeration en = enumerate_models(c, 1u << c.num_vars);
                std::set<unsigned> got;
                for (const Model& mm : en.models) got.insert(model_bits(mm));
                if (got != std::set<unsigned>(want.begin(), want.end())) {
                  why = "enumerate_models() model set mismatch";
                  return false;
                }

                if (!want.empty()) {
                  std::set<int> bb = backbone(c);
                  for (int v = 1; v <= c.num_vars; v++) {
                    bool at = true, af = true;
                    for (unsigned bits : want) {
                      bool val = (bits >> (v - 1)) & 1u;
                      at &= val;
                      af &= !val;
                    }
                    if (at != (bb.count(v) > 0) || af != (bb.count(-v) > 0)) {
                      why = "backbone mismatch";
                      return false;
                    }
                  }
                }

                std::vector<std::pair<Clause, int>> soft;
                for (int i = 0; i < 3; i++) {
                  int v = 1 + static_cast<int>(rng() % c.num_vars);
                  soft.push_back({{rng() % 2 ? v : -v},
                                  1 + static_cast<int>(rng() % 4)});
                }
                auto wres = solve_weighted(c, soft);
                if (wres.has_value() != !want.empty()) {
                  why = "solve_weighted() SAT/UNSAT mismatch";
                  return false;
                }
                if (wres) {
                  long long best = -1;
                  for (unsigned bits : want) {
                    long long w = 0;
                    for (const auto& [cl, wt] : soft)
                      if (clause_sat(cl, bits)) w += wt;
                    best = std::max(best, w);
                  }
                  if (wres->satisfied_weight != best ||
                      !model_satisfies(wres->model, c.clauses)) {
                    why = "solve_weighted() optimum mismatch";
                    return false;
                  }
                }
              }
              return true;
            });

  criterion(6, "semi-naive chaining equals the naive fixpoint", 30.0,
            [](std::string& why) {
              std::mt19937 rng(606);
              for (int round = 0; round < 100; round++) {
                Graph g;
                g.set_prefix("ex", "http://e/");
                int n = 1 + static_cast<int>(rng() % 300);
                for (int i = 0; i < n; i++)
                  g.insert({ex("n" + std::to_string(rng() % 8)),
                            ex("p" + std::to_string(rng() % 3)),
                            ex("n" + std::to_string(rng() % 8))});

                std::vector<const char*> shapes = {
                    "rule r%d: (?x ex:q%d ?y) :- (?x ex:p%d ?y) .",
                    "rule r%d: (?x ex:q%d ?z) :- (?x ex:p%d ?y), "
                    "(?y ex:p%d ?z) .",
                    "rule r%d: (?y ex:q%d ?x) :- (?x ex:p%d ?y) .",
                    "rule r%d: (_:w%d(?x) ex:q%d ?x) :- (?x ex:p%d ?y) .",
                    "rule r%d: (?x ex:q%d ?y) :- (?x ex:p%d ?y), "
                    "not (?y ex:p%d ?x) .",
                };
                int nrules = 1 + static_cast<int>(rng() % 3);
                std::string text;
                for (int i = 0; i < nrules; i++) {
                  char buf[160];
                  std::snprintf(buf, sizeof buf,
                                shapes[rng() % shapes.size()], i, i,
                                static_cast<int>(rng() % 3),
                                static_cast<int>(rng() % 3));
                  text += buf;
                  text += "\n";
                }
                std::vector<Rule> rules = parse_rules(text, g);
                std::vector<NaiveRule> naive;
                for (const Rule& r : rules)
                  for (const HeadPattern& h : r.heads)
                    naive.push_back({h, r.body, r.negbody});

                if (forward_chain(g, rules).derived !=
                    naive_fixpoint(g, naive)) {
                  why = "instance " + std::to_string(round) + " diverged";
                  return false;
                }
              }
              return true;
            });

  criterion(7, "Tucker/HOOI property suite", 30.0, [](std::string& why) {
    std::mt19937 rng(707);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto random_tensor = [&](std::size_t n1, std::size_t n2, std::size_t n3) {
      Tensor3 t(n1, n2, n3);
      for (double& x : t.data) x = dist(rng);
      return t;
    };

    // Full-rank exactness on tensors up to 6x6x6.
    for (int round = 0; round < 6; round++) {
      std::size_t n1 = 1 + rng() % 6, n2 = 1 + rng() % 6, n3 = 1 + rng() % 6;
      Tensor3 t = random_tensor(n1, n2, n3);
      Tensor3 back = reconstruct(hooi(t, {n1, n2, n3}, 10, 0));
      for (std::size_t i = 0; i < t.data.size(); i++)
        if (std::abs(back.data[i] - t.data[i]) >= 1e-9) {
          why = "full-rank reconstruction error >= 1e-9";
          return false;
        }
    }

    // Monotone fit and orthonormal factors over >= 20 seeds.
    for (unsigned seed = 0; seed < 22; seed++) {
      std::size_t n1 = 2 + rng() % 4, n2 = 2 + rng() % 4, n3 = 2 + rng() % 4;
      Tensor3 t = random_tensor(n1, n2, n3);
      std::array<std::size_t, 3> ranks = {1 + rng() % n1, 1 + rng() % n2,
                                          1 + rng() % n3};
      TuckerFactors f = hooi(t, ranks, 25, seed);
      for (std::size_t i = 0; i + 1 < f.fit_history.size(); i++)
        if (f.fit_history[i + 1] > f.fit_history[i] + 1e-9) {
          why = "fit history increased";
          return false;
        }
      if (orthonormality_defect(f.a) >= 1e-8 ||
          orthonormality_defect(f.b) >= 1e-8 ||
          orthonormality_defect(f.c) >= 1e-8) {
        why = "factor columns not orthonormal to 1e-8";
        return false;
      }
    }

    // Rank-1 recovery.
    std::uniform_real_distribution<double> pos(0.1, 1.0);
    std::vector<double> a(4), b(3), c(5);
    for (double& x : a) x = pos(rng);
    for (double& x : b) x = pos(rng);
    for (double& x : c) x = pos(rng);
    Tensor3 t(4, 3, 5);
    for (std::size_t i = 0; i < 4; i++)
      for (std::size_t j = 0; j < 3; j++)
        for (std::size_t k = 0; k < 5; k++) t.at(i, j, k) = a[i] * b[j] * c[k];
    Tensor3 approx = reconstruct(hooi(t, {1, 1, 1}, 50, 0));
    double err = 0.0;
    for (std::size_t i = 0; i < t.data.size(); i++)
      err += (approx.data[i] - t.data[i]) * (approx.data[i] - t.data[i]);
    if (std::sqrt(err) / t.frobenius() >= 1e-6) {
      why = "rank-1 relative error >= 1e-6";
      return false;
    }
    return true;
  });

  criterion(8, "Turtle round-trip and seeded schema violations", 10.0,
            [](std::string& why) {
              Graph fixture = parse_turtle(slurp(data_path("fixture.ttl")));
              Graph back = parse_turtle(serialize_turtle(fixture));
              if (!(back == fixture) ||
                  serialize_turtle(back) != serialize_turtle(fixture)) {
                why = "fixture round-trip differs";
                return false;
              }
              if (!validate_schema(fixture).empty()) {
                why = "fixture is not schema-valid";
                return false;
              }

              std::mt19937 rng(808);
              std::uniform_int_distribution<int> nd(0, 40), kind(0, 3);
              for (int doc = 0; doc < 100; doc++) {
                Graph g;
                g.set_prefix("ex", "http://e/");
                int n = nd(rng);
                for (int i = 0; i < n; i++) {
                  Term s = rng() % 4 == 0
                               ? Term::blank("b" + std::to_string(rng() % 5))
                               : Term::iri("http://e/s" +
                                           std::to_string(rng() % 9));
                  Term p = Term::iri("http://e/p" + std::to_string(rng() % 5));
                  Term o;
                  switch (kind(rng)) {
                    case 0:
                      o = Term::iri("http://e/o" + std::to_string(rng() % 9));
                      break;
                    case 1:
                      o = Term::blank("b" + std::to_string(rng() % 5));
                      break;
                    case 2:
                      o = Term::literal("lit \"x\"\n" +
                                        std::to_string(rng() % 9));
                      break;
                    default:
                      o = Term::literal(std::to_string(rng() % 9), "",
                                        kXsdNs + "integer");
                  }
                  g.insert({s, p, o});
                }
                std::string text = serialize_turtle(g);
                Graph again = parse_turtle(text);
                if (!(again == g) || serialize_turtle(again) != text) {
                  why = "generated document round-trip differs";
                  return false;
                }
              }

              // Each violation class, seeded in isolation, is flagged once.
              const std::string sb =
                  "http://kgc.knowledge-graph.jp/data/SpeckledBand#";
              auto seeded_once = [&](ViolationCode code,
                                     const std::function<void(Graph&)>& seed) {
                Graph g = parse_turtle(slurp(data_path("fixture.ttl")));
                seed(g);
                std::vector<Violation> vs = validate_schema(g);
                return vs.size() == 1 && vs[0].code == code;
              };
              bool ok =
                  seeded_once(ViolationCode::BOTH_PRED_PROP,
                              [&](Graph& g) {
                                g.insert({Term::iri(sb + "scene10"),
                                          kgc("hasProperty"),
                                          Term::iri(sb + "poor")});
                              }) &&
                  seeded_once(ViolationCode::NO_PRED_PROP,
                              [&](Graph& g) {
                                Term s = Term::iri(sb + "sceneX");
                                g.insert({s, rdf("type"), kgc("Situation")});
                                g.insert({s, kgc("subject"),
                                          Term::iri(sb + "Helen")});
                              }) &&
                  seeded_once(ViolationCode::MISSING_INFOSOURCE,
                              [&](Graph& g) {
                                Term s = Term::iri(sb + "sceneX");
                                g.insert({s, rdf("type"), kgc("Statement")});
                                g.insert({s, kgc("hasPredicate"),
                                          Term::iri(sb + "say")});
                              }) &&
                  seeded_once(ViolationCode::DANGLING_SCENE_LINK,
                              [&](Graph& g) {
                                g.insert({Term::iri(sb + "scene10"),
                                          kgc("then"),
                                          Term::iri(sb + "nowhere")});
                              }) &&
                  seeded_once(ViolationCode::BAD_TIME_LITERAL,
                              [&](Graph& g) {
                                g.insert({Term::iri(sb + "scene10"),
                                          kgc("time"),
                                          Term::literal("yesterday night")});
                              }) &&
                  seeded_once(ViolationCode::NEGATION_WITHOUT_POSITIVE,
                              [&](Graph& g) {
                                Term s = Term::iri(sb + "sceneX");
                                g.insert({s, rdf("type"), kgc("Situation")});
                                g.insert({s, kgc("subject"),
                                          Term::iri(sb + "Helen")});
                                g.insert({s, kgc("hasPredicate"),
                                          Term::iri(sb + "notHear")});
                              });
              if (!ok) why = "a seeded violation class was not flagged once";
              return ok;
            });

  criterion(9, "paired t-test hand examples and antisymmetry", 1.0,
            [](std::string& why) {
              TTestResult zero = paired_t_test({1, 2, 3}, {2, 2, 2}, 0.05);
              if (zero.t != 0.0 || zero.significant) {
                why = "zero-mean example";
                return false;
              }
              TTestResult sig = paired_t_test({3, 4, 5, 6}, {1, 2, 2, 4}, 0.05);
              if (std::abs(sig.t - 9.0) > 1e-12 || sig.df != 3 ||
                  sig.critical != 3.182 || !sig.significant) {
                why = "t=9 example";
                return false;
              }
              std::mt19937 rng(909);
              std::uniform_real_distribution<double> dist(-3.0, 3.0);
              for (int round = 0; round < 50; round++) {
                std::size_t n = 2 + rng() % 30;
                std::vector<double> a(n), b(n);
                for (std::size_t i = 0; i < n; i++) {
                  a[i] = dist(rng);
                  b[i] = dist(rng);
                }
                TTestResult ab = paired_t_test(a, b, 0.05);
                TTestResult ba = paired_t_test(b, a, 0.05);
                bool anti = std::isinf(ab.t)
                                ? ab.t == -ba.t
                                : std::abs(ab.t + ba.t) < 1e-9;
                if (!anti || ab.significant != ba.significant) {
                  why = "antisymmetry failed";
                  return false;
                }
              }
              return true;
            });

  return g_failures == 0 ? 0 : 1;
}
