#include "kgcr/ibis.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "kgcr/error.hpp"

namespace kgcr {

using ordered_json = nlohmann::ordered_json;

std::string to_string(IbisKind k) {
  switch (k) {
    case IbisKind::Issue: return "Issue";
    case IbisKind::Idea: return "Idea";
    case IbisKind::ArgumentPro: return "ArgumentPro";
    case IbisKind::ArgumentCon: return "ArgumentCon";
  }
  return "";
}

IbisKind ibis_kind_from_string(const std::string& s) {
  if (s == "Issue") return IbisKind::Issue;
  if (s == "Idea") return IbisKind::Idea;
  if (s == "ArgumentPro") return IbisKind::ArgumentPro;
  if (s == "ArgumentCon") return IbisKind::ArgumentCon;
  throw Error("BAD_IBIS_KIND", "unknown node kind '" + s + "'");
}

namespace {

std::string local_name(const Term& t) {
  if (!t.is_iri()) return t.value;
  auto pos = t.value.find_last_of("#/");
  return pos == std::string::npos ? t.value : t.value.substr(pos + 1);
}

void check_attachment(const std::vector<IbisNode>& nodes, const IbisNode& n) {
  if (!n.parent) {
    if (n.kind != IbisKind::Issue)
      throw Error("BAD_ATTACHMENT",
                  to_string(n.kind) + " node must have a parent");
    return;
  }
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const IbisNode& m) {
    return m.id == *n.parent;
  });
  if (it == nodes.end())
    throw Error("BAD_ATTACHMENT", "parent " + *n.parent + " does not exist");
  switch (n.kind) {
    case IbisKind::Issue:
      // Facilitator sub-issues hang off Ideas.
      if (it->kind != IbisKind::Idea)
        throw Error("BAD_ATTACHMENT", "Issue may only attach to an Idea");
      break;
    case IbisKind::Idea:
      if (it->kind != IbisKind::Issue)
        throw Error("BAD_ATTACHMENT", "Idea must attach to an Issue");
      break;
    case IbisKind::ArgumentPro:
    case IbisKind::ArgumentCon:
      if (it->kind != IbisKind::Idea)
        throw Error("BAD_ATTACHMENT", "Argument must attach to an Idea");
      break;
  }
}

}  // namespace

const IbisNode& IbisGraph::add(IbisKind kind, std::string text,
                               std::optional<std::string> parent,
                               std::optional<IbisPayload> payload) {
  IbisNode n;
  n.id = "n" + std::to_string(nodes_.size() + 1);
  n.kind = kind;
  n.text = std::move(text);
  n.parent = std::move(parent);
  n.payload = std::move(payload);
  check_attachment(nodes_, n);
  nodes_.push_back(std::move(n));
  return nodes_.back();
}

const IbisNode& IbisGraph::node(const std::string& id) const {
  for (const IbisNode& n : nodes_)
    if (n.id == id) return n;
  throw Error("UNKNOWN_NODE", "no IBIS node " + id);
}

std::vector<std::string> IbisGraph::children(const std::string& id) const {
  std::vector<std::string> out;
  for (const IbisNode& n : nodes_)
    if (n.parent && *n.parent == id) out.push_back(n.id);
  return out;
}

IbisGraph IbisGraph::from_nodes(std::vector<IbisNode> nodes) {
  IbisGraph g;
  for (IbisNode& n : nodes) {
    check_attachment(g.nodes_, n);
    g.nodes_.push_back(std::move(n));
  }
  return g;
}

namespace {

ordered_json node_to_json(const IbisGraph& g, const IbisNode& n) {
  ordered_json j;
  j["id"] = n.id;
  j["kind"] = to_string(n.kind);
  j["text"] = n.text;
  if (n.payload) {
    ordered_json p;
    p["name"] = n.payload->name;
    p["args"] = n.payload->args;
    j["payload"] = p;
  } else {
    j["payload"] = nullptr;
  }
  ordered_json children = ordered_json::array();
  for (const std::string& child : g.children(n.id))
    children.push_back(node_to_json(g, g.node(child)));
  j["children"] = children;
  return j;
}

void collect_nodes(const ordered_json& j,
                   const std::optional<std::string>& parent,
                   std::vector<IbisNode>& out) {
  IbisNode n;
  n.id = j.at("id").get<std::string>();
  n.kind = ibis_kind_from_string(j.at("kind").get<std::string>());
  n.text = j.at("text").get<std::string>();
  n.parent = parent;
  if (!j.at("payload").is_null()) {
    IbisPayload p;
    p.name = j.at("payload").at("name").get<std::string>();
    p.args = j.at("payload").at("args").get<std::vector<std::string>>();
    n.payload = std::move(p);
  }
  out.push_back(n);
  for (const ordered_json& child : j.at("children"))
    collect_nodes(child, n.id, out);
}

}  // namespace

std::string export_ibis(const IbisGraph& g) {
  ordered_json roots = ordered_json::array();
  for (const IbisNode& n : g.nodes())
    if (!n.parent) roots.push_back(node_to_json(g, n));
  ordered_json doc;
  doc["nodes"] = roots;
  return doc.dump(2) + "\n";
}

IbisGraph import_ibis(const std::string& text) {
  ordered_json doc = ordered_json::parse(text);
  std::vector<IbisNode> nodes;
  for (const ordered_json& root : doc.at("nodes"))
    collect_nodes(root, std::nullopt, nodes);
  // Restore creation order from the numeric id suffix.
  std::sort(nodes.begin(), nodes.end(), [](const IbisNode& a,
                                           const IbisNode& b) {
    return std::stol(a.id.substr(1)) < std::stol(b.id.substr(1));
  });
  return IbisGraph::from_nodes(std::move(nodes));
}

std::string export_ibis_dot(const IbisGraph& g) {
  std::string out = "digraph ibis {\n";
  for (const IbisNode& n : g.nodes()) {
    std::string label = to_string(n.kind) + ": " + n.text;
    std::string escaped;
    for (char c : label) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    out += "  " + n.id + " [label=\"" + escaped + "\"];\n";
  }
  for (const IbisNode& n : g.nodes())
    if (n.parent) out += "  " + *n.parent + " -> " + n.id + ";\n";
  out += "}\n";
  return out;
}

double consistency_value(bool how, bool why, bool opp, int unrebutted_cons) {
  double support = (static_cast<double>(how) + static_cast<double>(why) +
                    static_cast<double>(opp)) /
                   3.0;
  double value = support - unrebutted_cons / 3.0;
  return std::clamp(value, -1.0, 1.0);
}

IbisGraph seed_issues(const Graph& g, const std::vector<Term>& victims) {
  if (victims.empty())
    throw Error("UNKNOWN_PERSON", "empty victim list");
  IbisGraph ibis;
  for (const Term& v : victims) {
    if (!g.has(v, rdf("type"), kgc("Person")))
      throw Error("UNKNOWN_PERSON", v.value + " is not typed as a person");
    ibis.add(IbisKind::Issue, "who is the murderer of " + local_name(v),
             std::nullopt, IbisPayload{"murdererOf", {v.value}});
  }
  return ibis;
}

std::vector<Hypothesis> generate_hypotheses(
    const Graph& g, const Term& victim, IbisGraph& ibis,
    const std::string& issue_node, std::vector<std::string>* idea_nodes) {
  if (!g.has(victim, rdf("type"), kgc("Person")))
    throw Error("UNKNOWN_PERSON", victim.value + " is not typed as a person");
  std::vector<Term> suspects = g.subjects_of(rdf("type"), kgc("Person"));
  std::erase(suspects, victim);
  std::vector<Hypothesis> out;
  for (const Term& x : suspects) {
    const IbisNode& idea = ibis.add(
        IbisKind::Idea,
        "isKilledBy(" + local_name(victim) + ", " + local_name(x) + ")",
        issue_node, IbisPayload{"isKilledBy", {victim.value, x.value}});
    if (idea_nodes) idea_nodes->push_back(idea.id);
    out.push_back(Hypothesis{victim, x, std::nullopt, std::nullopt});
  }
  return out;
}

Term select_suspect(const std::map<Term, ConsistencyScore>& scores) {
  if (scores.empty()) throw Error("EMPTY_SCORES", "no scored hypotheses");
  const Term* best = nullptr;
  double best_value = 0.0;
  for (const auto& [suspect, score] : scores) {
    // std::map iterates suspects in ascending IRI order, so strict
    // improvement keeps the lexicographically smaller IRI on ties.
    if (!best || score.value > best_value) {
      best = &suspect;
      best_value = score.value;
    }
  }
  return *best;
}

namespace {

// Scenes with subject `who`, predicate `neg`, what `what` where neg is
// Not/canNot-linked to `pos` contradict a claimed (who, pos, what) fact.
bool contradicted(const Graph& g, const Term& who, const Term& pos,
                  const Term& what) {
  for (const Term& id : scene_ids(g)) {
    Scene sc = scene_view(g, id);
    if (!sc.predicate) continue;
    const Term& neg = *sc.predicate;
    if (!g.has(neg, kgc("Not"), pos) && !g.has(neg, kgc("canNot"), pos))
      continue;
    if (std::find(sc.subjects.begin(), sc.subjects.end(), who) ==
        sc.subjects.end())
      continue;
    if (std::find(sc.what.begin(), sc.what.end(), what) == sc.what.end())
      continue;
    return true;
  }
  return false;
}

}  // namespace

DiscussionResult run_discussion(const Graph& g, const std::vector<Rule>& rules,
                                const Term& victim, const Term& incident) {
  DiscussionResult result;
  result.victim = victim;
  result.ibis = seed_issues(g, {victim});
  std::string issue_id = result.ibis.nodes().front().id;

  std::vector<std::string> idea_nodes;
  std::vector<Hypothesis> hypotheses =
      generate_hypotheses(g, victim, result.ibis, issue_id, &idea_nodes);

  // Step 3: one agent per hypothesis, private graph G_vx = G + hypothesis.
  for (std::size_t i = 0; i < hypotheses.size(); i++) {
    DiscussionAgent agent;
    agent.hypothesis = hypotheses[i];
    agent.graph = g;
    agent.graph.insert({victim, kgc("isKilledBy"), hypotheses[i].suspect});
    agent.idea_node = idea_nodes[i];
    result.agents.push_back(std::move(agent));
  }

  // Steps 4-5: facilitator questions, answered through the rule pipeline.
  std::vector<MotiveFinding> motives = infer_motives(g, rules);
  for (DiscussionAgent& agent : result.agents) {
    const Term& x = agent.hypothesis.suspect;
    // Copy the ids: add() may reallocate the node storage.
    std::string how_issue = result.ibis
                                .add(IbisKind::Issue,
                                     "How does " + local_name(x) + " killed " +
                                         local_name(victim) + " ?",
                                     agent.idea_node)
                                .id;
    std::string why_issue = result.ibis
                                .add(IbisKind::Issue,
                                     "Why does " + local_name(x) + " killed " +
                                         local_name(victim) + " ?",
                                     agent.idea_node)
                                .id;

    for (const MeansFinding& f : infer_means(agent.graph, rules, incident)) {
      if (f.suspect != x) continue;
      agent.hypothesis.how = {f.method, f};
      agent.graph.insert({x, kgc("usedMethod"), f.method});
      result.ibis.add(IbisKind::Idea,
                      "how: " + local_name(f.method), how_issue,
                      IbisPayload{"how", {victim.value, x.value,
                                          f.method.value}});
      break;
    }
    for (const MotiveFinding& f : motives) {
      if (f.suspect != x || f.victim != victim) continue;
      agent.hypothesis.why = {f.motive, f};
      agent.graph.insert({x, kgc("hasMotive"), f.motive});
      result.ibis.add(IbisKind::Idea,
                      "why: " + local_name(f.motive), why_issue,
                      IbisPayload{"why", {victim.value, x.value,
                                          f.motive.value}});
      break;
    }
  }

  // Step 6: one counterargument round in lexicographic agent order.
  for (DiscussionAgent& attacker : result.agents) {
    std::vector<OpportunityFinding> opps =
        infer_opportunity(attacker.graph, incident);
    for (DiscussionAgent& target : result.agents) {
      if (target.hypothesis.suspect == attacker.hypothesis.suspect) continue;
      const Term& tx = target.hypothesis.suspect;
      std::vector<std::string> cons;
      bool has_opportunity = std::any_of(
          opps.begin(), opps.end(),
          [&](const OpportunityFinding& f) { return f.suspect == tx; });
      if (!has_opportunity)
        cons.push_back("no opportunity: " + local_name(tx) +
                       " could not reach the crime scene");
      if (target.hypothesis.how) {
        for (const Triple& ev : target.hypothesis.how->second.evidence) {
          if (ev.p != kgc("hasPredicate")) continue;
          Scene sc = scene_view(g, ev.s);
          for (const Term& what : sc.what)
            if (contradicted(attacker.graph, tx, ev.o, what))
              cons.push_back("how contradicted: " + local_name(tx) +
                             " negated " + local_name(ev.o) + " of " +
                             local_name(what));
        }
      }
      for (const std::string& con : cons) {
        attacker.graph.insert(
            {tx, kgc("disputedBy"), attacker.hypothesis.suspect});
        result.ibis.add(IbisKind::ArgumentCon, con, target.idea_node);
        target.received_cons.push_back(con);
      }
    }
  }

  // Step 7: consistency scores and argmax selection.
  std::map<Term, ConsistencyScore> scores;
  for (DiscussionAgent& agent : result.agents) {
    std::vector<OpportunityFinding> opps =
        infer_opportunity(agent.graph, incident);
    ConsistencyScore s;
    s.how_supported = agent.hypothesis.how.has_value();
    s.why_supported = agent.hypothesis.why.has_value();
    s.opportunity_supported = std::any_of(
        opps.begin(), opps.end(), [&](const OpportunityFinding& f) {
          return f.suspect == agent.hypothesis.suspect;
        });
    s.unrebutted_cons = static_cast<int>(agent.received_cons.size());
    s.value = consistency_value(s.how_supported, s.why_supported,
                                s.opportunity_supported, s.unrebutted_cons);
    agent.score = s;
    scores[agent.hypothesis.suspect] = s;
  }
  if (!scores.empty()) {
    Term winner = select_suspect(scores);
    result.selected = winner;
    for (const DiscussionAgent& agent : result.agents) {
      if (agent.hypothesis.suspect != winner) continue;
      std::string expl = "isKilledBy(" + local_name(victim) + ", " +
                         local_name(winner) + ")";
      if (agent.hypothesis.how)
        expl += "; how: " + local_name(agent.hypothesis.how->first);
      if (agent.hypothesis.why)
        expl += "; why: " + local_name(agent.hypothesis.why->first);
      result.explanation = expl;
    }
  }
  return result;
}

}  // namespace kgcr
