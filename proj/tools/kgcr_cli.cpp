// kgcr: load knowledge graphs, rulebooks and scenario specs, run the
// reasoning pipelines, and print deterministic reports.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgcr/error.hpp"
#include "kgcr/eval.hpp"
#include "kgcr/ibis.hpp"
#include "kgcr/query.hpp"
#include "kgcr/rules.hpp"
#include "kgcr/scene.hpp"
#include "kgcr/solver.hpp"
#include "kgcr/tensor.hpp"
#include "kgcr/turtle.hpp"

namespace {

using json = nlohmann::json;  // plain json keeps keys sorted

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kgcr::Error("IO_ERROR", "cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Output {
  std::string format = "text";
  std::string out_path;
  std::string pipeline;
  std::vector<std::string> conclusion;
  std::vector<std::string> scenes_used;
  std::vector<std::string> steps;
  std::vector<std::string> diagnostics;
  std::ostringstream text;

  int emit(int code) {
    std::string body;
    if (format == "structured") {
      json doc;
      doc["pipeline"] = pipeline;
      doc["conclusion"] = conclusion;
      doc["scenes_used"] = scenes_used;
      doc["steps"] = steps;
      doc["diagnostics"] = diagnostics;
      body = doc.dump(2) + "\n";
    } else {
      body = text.str();
    }
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw kgcr::Error("IO_ERROR", "cannot write " + out_path);
      out << body;
    } else {
      std::cout << body;
    }
    return code;
  }
};

std::string show(const kgcr::Graph& g, const kgcr::Term& t) {
  switch (t.kind) {
    case kgcr::TermKind::Iri: return g.shorten(t.value);
    case kgcr::TermKind::Blank: return "_:" + t.value;
    case kgcr::TermKind::Literal: return "\"" + t.value + "\"";
  }
  return t.value;
}

std::string fixed6(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << x;
  return s.str();
}

kgcr::CaseInfo first_case(const kgcr::Graph& g) {
  auto cases = kgcr::find_cases(g);
  if (cases.empty())
    throw kgcr::Error("NO_CASE", "graph declares no kgc:Case node");
  return cases.front();
}

int run_validate(const std::string& file, Output& out) {
  kgcr::Graph g = kgcr::parse_turtle(slurp(file));
  auto violations = kgcr::validate_schema(g);
  for (const auto& v : violations) {
    std::string line = kgcr::to_string(v.code) + " " + show(g, v.scene) +
                       " " + v.detail;
    out.text << line << "\n";
    out.diagnostics.push_back(line);
  }
  std::string summary = std::to_string(violations.size()) + " violations";
  out.text << summary << "\n";
  out.conclusion.push_back(summary);
  out.steps.push_back("parsed " + std::to_string(g.size()) + " triples");
  out.steps.push_back("checked " +
                      std::to_string(kgcr::scene_ids(g).size()) + " scenes");
  return out.emit(violations.empty() ? 0 : 1);
}

int run_query(const std::string& file, const std::string& pattern_path,
              Output& out) {
  kgcr::Graph g = kgcr::parse_turtle(slurp(file));
  kgcr::Pattern p = kgcr::parse_pattern(slurp(pattern_path), g);
  auto bindings = kgcr::match(g, p);
  for (const auto& b : bindings) {
    std::ostringstream line;
    bool first = true;
    for (const auto& [var, term] : b) {
      if (!first) line << " ";
      line << "?" << var << "=" << show(g, term);
      first = false;
    }
    out.text << line.str() << "\n";
    out.conclusion.push_back(line.str());
  }
  std::string summary = std::to_string(bindings.size()) + " bindings";
  out.text << summary << "\n";
  out.steps.push_back(summary);
  return out.emit(0);
}

int run_mom(const std::string& file, const std::string& rules_path,
            Output& out) {
  kgcr::Graph g = kgcr::parse_turtle(slurp(file));
  auto rules = kgcr::parse_rules(slurp(rules_path), g);
  kgcr::CaseInfo c = first_case(g);
  out.steps.push_back("case " + show(g, c.case_id) + " victim " +
                      show(g, c.victim));

  auto motives = kgcr::infer_motives(g, rules);
  auto opportunities = kgcr::infer_opportunity(g, c.incident);
  auto means = kgcr::infer_means(g, rules, c.incident);
  auto report = kgcr::combine_mom(motives, opportunities, means, c.victim);

  std::set<std::string> scenes;
  for (const auto& m : report.motives) {
    out.text << "motive: " << show(g, m.suspect) << " against "
             << show(g, m.victim) << " for " << show(g, m.motive) << "\n";
    scenes.insert(m.scenes.begin(), m.scenes.end());
  }
  for (const auto& o : report.opportunities) {
    out.text << "opportunity: " << show(g, o.suspect) << " from "
             << show(g, o.location);
    for (std::size_t i = 1; i < o.path.size(); i++)
      out.text << " -> " << show(g, o.path[i]);
    out.text << "\n";
    scenes.insert(o.scenes.begin(), o.scenes.end());
  }
  for (const auto& m : report.means) {
    out.text << "means: " << show(g, m.suspect) << " via "
             << show(g, m.method) << "\n";
    scenes.insert(m.scenes.begin(), m.scenes.end());
  }
  for (const auto& v : report.verdict) {
    std::ostringstream line;
    line << "verdict: " << show(g, v.suspect) << " components="
         << v.components;
    for (const auto& note : v.notes) line << " " << note;
    out.text << line.str() << "\n";
    out.conclusion.push_back(line.str());
  }
  if (!report.verdict.empty()) {
    const auto& top = report.verdict.front();
    bool sole = report.verdict.size() == 1 ||
                report.verdict[1].components < top.components;
    std::ostringstream line;
    line << "top suspect: " << show(g, top.suspect)
         << (sole ? "" : " (tied)");
    for (const auto& note : top.notes) line << " " << note;
    out.text << line.str() << "\n";
    out.conclusion.push_back(line.str());
  }
  out.scenes_used.assign(scenes.begin(), scenes.end());
  out.steps.push_back(std::to_string(report.motives.size()) + " motives, " +
                      std::to_string(report.opportunities.size()) +
                      " opportunities, " +
                      std::to_string(report.means.size()) + " means");
  return out.emit(report.verdict.empty() ? 1 : 0);
}

int run_sat(const std::string& file, bool do_enumerate, std::size_t max_models,
            bool do_backbone, bool do_weighted, Output& out) {
  kgcr::ScenarioSpec spec = kgcr::parse_scenario(slurp(file));
  kgcr::Grounding gr = kgcr::ground(spec);
  kgcr::CNF cnf = kgcr::to_cnf(gr.hard, static_cast<int>(gr.atoms.size()),
                               gr.atom_index);
  out.steps.push_back(std::to_string(gr.atoms.size()) + " atoms, " +
                      std::to_string(cnf.clauses.size()) + " clauses");

  auto true_atoms = [&](const kgcr::Model& m) {
    std::ostringstream line;
    bool first = true;
    for (std::size_t i = 0; i < gr.atoms.size(); i++)
      if (m[i]) {
        if (!first) line << " ";
        line << gr.atoms[i];
        first = false;
      }
    return line.str();
  };

  if (do_weighted) {
    std::vector<std::pair<kgcr::Clause, int>> soft;
    for (const auto& [formula, weight] : gr.soft) {
      // Weighted mode takes literal soft goals; a general-formula soft
      // constraint would need per-formula selector variables.
      if (formula->kind == kgcr::Formula::Kind::Atom) {
        soft.push_back({{gr.atom_index.at(formula->atom)}, weight});
      } else if (formula->kind == kgcr::Formula::Kind::Not &&
                 formula->args[0]->kind == kgcr::Formula::Kind::Atom) {
        soft.push_back({{-gr.atom_index.at(formula->args[0]->atom)}, weight});
      } else {
        throw kgcr::Error("SOFT_NOT_LITERAL",
                          "weighted mode accepts literal soft goals only");
      }
    }
    auto res = kgcr::solve_weighted(cnf, soft);
    if (!res) {
      out.text << "unsat\n";
      out.conclusion.push_back("unsat");
      return out.emit(1);
    }
    out.text << "weight: " << res->satisfied_weight << "\n";
    out.text << "model: " << true_atoms(res->model) << "\n";
    out.conclusion.push_back("weight " +
                             std::to_string(res->satisfied_weight));
    out.conclusion.push_back(true_atoms(res->model));
    return out.emit(0);
  }

  if (do_enumerate || do_backbone) {
    auto en = kgcr::enumerate_models(cnf, max_models);
    if (en.models.empty()) {
      out.text << "unsat\n";
      out.conclusion.push_back("unsat");
      return out.emit(1);
    }
    std::set<int> bb = do_backbone ? kgcr::backbone(cnf) : std::set<int>{};
    auto report =
        kgcr::scenario_report(spec, gr, en.models, en.truncated, bb);
    out.text << "models: " << report.model_count
             << (report.truncated ? "+" : "") << "\n";
    if (do_enumerate)
      for (const auto& m : en.models)
        out.text << "model: " << true_atoms(m) << "\n";
    for (const auto& [person, verdict] : report.suspects) {
      std::string v = verdict == kgcr::SuspectVerdict::GuiltyInAll
                          ? "guilty-in-all"
                          : verdict == kgcr::SuspectVerdict::GuiltyInSome
                                ? "guilty-in-some"
                                : "never-guilty";
      out.text << "suspect " << person << ": " << v << "\n";
      out.conclusion.push_back("suspect " + person + ": " + v);
    }
    if (do_backbone)
      for (const auto& atom : report.backbone_atoms) {
        out.text << "backbone: " << atom << "\n";
        out.conclusion.push_back("backbone: " + atom);
      }
    for (const auto& atom : report.indeterminate_atoms) {
      out.text << "indeterminate: " << atom << "\n";
      out.diagnostics.push_back("indeterminate: " + atom);
    }
    out.steps.push_back(std::to_string(report.model_count) +
                        " models enumerated");
    return out.emit(0);
  }

  auto model = kgcr::solve(cnf);
  if (!model) {
    out.text << "unsat\n";
    out.conclusion.push_back("unsat");
    return out.emit(1);
  }
  out.text << "sat\n";
  out.text << "model: " << true_atoms(*model) << "\n";
  out.conclusion.push_back("sat");
  out.conclusion.push_back(true_atoms(*model));
  return out.emit(0);
}

int run_tucker(const std::string& file, const std::string& ranks_arg,
               int iters, std::size_t top_k, unsigned seed, Output& out) {
  kgcr::Graph g = kgcr::parse_turtle(slurp(file));
  kgcr::Tensor3 t = kgcr::build_tensor(g);
  std::array<std::size_t, 3> ranks{};
  {
    std::istringstream s(ranks_arg);
    std::string part;
    std::size_t i = 0;
    while (std::getline(s, part, ',') && i < 3)
      ranks[i++] = static_cast<std::size_t>(std::stoul(part));
    if (i != 3)
      throw kgcr::Error("BAD_RANKS", "--ranks expects r1,r2,r3");
  }
  auto factors = kgcr::hooi(t, ranks, iters, seed);
  out.steps.push_back("tensor " + std::to_string(t.dims[0]) + "x" +
                      std::to_string(t.dims[1]) + "x" +
                      std::to_string(t.dims[2]));
  out.steps.push_back(std::to_string(factors.fit_history.size()) +
                      " iterations, final fit " +
                      fixed6(factors.fit_history.empty()
                                 ? 0.0
                                 : factors.fit_history.back()));
  auto candidates = kgcr::complete(t, factors, top_k);
  for (const auto& c : candidates) {
    std::string line = fixed6(c.score) + "\t" + c.subject + "\t" +
                       c.predicate + "\t" + c.object;
    out.text << line << "\n";
    out.conclusion.push_back(line);
  }
  return out.emit(0);
}

int run_ibis(const std::string& file, const std::string& rules_path,
             Output& out) {
  kgcr::Graph g = kgcr::parse_turtle(slurp(file));
  auto rules = kgcr::parse_rules(slurp(rules_path), g);
  kgcr::CaseInfo c = first_case(g);
  auto result = kgcr::run_discussion(g, rules, c.victim, c.incident);

  for (const auto& agent : result.agents) {
    std::ostringstream line;
    line << "agent " << show(g, agent.hypothesis.suspect)
         << ": consistency=" << fixed6(agent.score.value);
    out.text << line.str() << "\n";
    out.steps.push_back(line.str());
  }
  if (result.selected) {
    std::string line = "selected: " + show(g, *result.selected);
    out.text << line << "\n";
    out.conclusion.push_back(line);
    out.text << "explanation: " << result.explanation << "\n";
    out.conclusion.push_back(result.explanation);
  }
  std::string doc = kgcr::export_ibis(result.ibis);
  out.diagnostics.push_back(doc);
  if (out.format == "text") out.text << doc;
  return out.emit(result.selected ? 0 : 1);
}

int run_eval(const std::string& file, const std::vector<std::string>& paired,
             double alpha, Output& out) {
  kgcr::ScoreTable t = kgcr::parse_score_table(slurp(file));
  if (!paired.empty()) {
    auto col_of = [&](const std::string& name) -> std::size_t {
      for (std::size_t i = 0; i < t.submissions.size(); i++)
        if (t.submissions[i] == name) return i;
      throw kgcr::Error("UNKNOWN_COLUMN", "no submission named " + name);
    };
    std::size_t ca = col_of(paired[0]), cb = col_of(paired[1]);
    std::vector<double> a, b;
    for (std::size_t row = 0; row < t.metrics.size(); row++) {
      auto va = t.cell(row, ca), vb = t.cell(row, cb);
      if (va && vb) {
        a.push_back(*va);
        b.push_back(*vb);
      }
    }
    auto r = kgcr::paired_t_test(a, b, alpha);
    std::ostringstream line;
    line << "t=" << fixed6(r.t) << " df=" << r.df << " critical="
         << fixed6(r.critical) << " significant="
         << (r.significant ? "yes" : "no");
    out.text << line.str() << "\n";
    out.conclusion.push_back(line.str());
    return out.emit(0);
  }
  for (const auto& s : kgcr::aggregate(t)) {
    std::ostringstream line;
    line << s.submission << ": mean=" << fixed6(s.mean) << " median="
         << fixed6(s.median) << " sd=" << fixed6(s.stddev) << " n="
         << s.count;
    out.text << line.str() << "\n";
    out.conclusion.push_back(line.str());
  }
  return out.emit(0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-graph mystery reasoning pipelines"};
  app.require_subcommand(1);

  Output out;
  std::string file, rules_path, pattern_path;
  std::string ranks = "2,2,2";
  int iters = 50;
  std::size_t top_k = 10, max_models = 4096;
  unsigned seed = 0;
  bool do_enumerate = false, do_backbone = false, do_weighted = false;
  std::vector<std::string> paired;
  double alpha = 0.05;

  app.add_option("--format", out.format, "text|structured")
      ->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--out", out.out_path, "write the report to a file");
  app.add_option("--seed", seed, "deterministic seed");

  auto* validate = app.add_subcommand("validate", "schema-check a graph");
  validate->add_option("file", file)->required();

  auto* query = app.add_subcommand("query", "conjunctive pattern match");
  query->add_option("file", file)->required();
  query->add_option("--pattern", pattern_path)->required();

  auto* mom = app.add_subcommand("mom", "motive/opportunity/means verdict");
  mom->add_option("file", file)->required();
  mom->add_option("--rules", rules_path)->required();

  auto* sat = app.add_subcommand("sat", "scenario grounding and solving");
  sat->add_option("file", file)->required();
  sat->add_flag("--enumerate", do_enumerate);
  sat->add_option("--max-models", max_models);
  sat->add_flag("--backbone", do_backbone);
  sat->add_flag("--weighted", do_weighted);

  auto* tucker = app.add_subcommand("tucker", "tensor completion candidates");
  tucker->add_option("file", file)->required();
  tucker->add_option("--ranks", ranks, "r1,r2,r3");
  tucker->add_option("--iters", iters);
  tucker->add_option("--top-k", top_k);

  auto* ibis = app.add_subcommand("ibis", "multi-agent discussion");
  ibis->add_option("file", file)->required();
  ibis->add_option("--rules", rules_path)->required();

  auto* eval = app.add_subcommand("eval", "score aggregation and t-tests");
  eval->add_option("file", file)->required();
  eval->add_option("--paired-t", paired, "two submission columns")
      ->expected(2);
  eval->add_option("--alpha", alpha)->check(CLI::IsMember({0.05, 0.01}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      out.pipeline = "validate";
      return run_validate(file, out);
    }
    if (*query) {
      out.pipeline = "query";
      return run_query(file, pattern_path, out);
    }
    if (*mom) {
      out.pipeline = "mom";
      return run_mom(file, rules_path, out);
    }
    if (*sat) {
      out.pipeline = "sat";
      return run_sat(file, do_enumerate, max_models, do_backbone, do_weighted,
                     out);
    }
    if (*tucker) {
      out.pipeline = "tucker";
      return run_tucker(file, ranks, iters, top_k, seed, out);
    }
    if (*ibis) {
      out.pipeline = "ibis";
      return run_ibis(file, rules_path, out);
    }
    if (*eval) {
      out.pipeline = "eval";
      return run_eval(file, paired, alpha, out);
    }
  } catch (const kgcr::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const kgcr::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
