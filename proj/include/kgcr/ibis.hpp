#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgcr/rules.hpp"

namespace kgcr {

enum class IbisKind { Issue, Idea, ArgumentPro, ArgumentCon };

std::string to_string(IbisKind k);
IbisKind ibis_kind_from_string(const std::string& s);

// Structured atom attached to a node, e.g. isKilledBy(julia, roylott).
struct IbisPayload {
  std::string name;
  std::vector<std::string> args;
  bool operator==(const IbisPayload&) const = default;
};

struct IbisNode {
  std::string id;
  IbisKind kind = IbisKind::Issue;
  std::string text;
  std::optional<std::string> parent;
  std::optional<IbisPayload> payload;
  bool operator==(const IbisNode&) const = default;
};

// Forest of Issues; Ideas attach to Issues, Arguments attach to Ideas.
// Node ids are assigned n1, n2, ... in creation order.
class IbisGraph {
 public:
  // Throws BAD_ATTACHMENT when the kind-attachment invariant would break.
  // The returned reference is invalidated by the next add().
  const IbisNode& add(IbisKind kind, std::string text,
                      std::optional<std::string> parent = std::nullopt,
                      std::optional<IbisPayload> payload = std::nullopt);

  const std::vector<IbisNode>& nodes() const { return nodes_; }
  const IbisNode& node(const std::string& id) const;
  std::vector<std::string> children(const std::string& id) const;

  bool operator==(const IbisGraph&) const = default;

  // Rebuilds a graph from nodes in creation order, revalidating the
  // attachment invariant. Used by import_ibis.
  static IbisGraph from_nodes(std::vector<IbisNode> nodes);

 private:
  std::vector<IbisNode> nodes_;
};

// Nested JSON document {id, kind, text, payload, children} per root, with
// stable key order; round-trippable through import_ibis.
std::string export_ibis(const IbisGraph& g);
IbisGraph import_ibis(const std::string& text);

// Plain nodes-and-edges text for graph drawing tools.
std::string export_ibis_dot(const IbisGraph& g);

struct Hypothesis {
  Term victim, suspect;
  std::optional<std::pair<Term, MeansFinding>> how;    // method
  std::optional<std::pair<Term, MotiveFinding>> why;   // motive
};

struct ConsistencyScore {
  double value = 0.0;  // in [-1, 1]
  bool how_supported = false;
  bool why_supported = false;
  bool opportunity_supported = false;
  int unrebutted_cons = 0;
};

// value = clamp((s_how + s_why + s_opp)/3 - cons/3, -1, 1)
double consistency_value(bool how, bool why, bool opp, int unrebutted_cons);

struct DiscussionAgent {
  Hypothesis hypothesis;
  Graph graph;  // private duplicate of G, append-only
  std::string idea_node;            // IBIS node carrying the hypothesis
  std::vector<std::string> received_cons;
  ConsistencyScore score;
};

struct DiscussionResult {
  IbisGraph ibis;
  std::vector<DiscussionAgent> agents;           // lexicographic by suspect
  Term victim;
  std::optional<Term> selected;                  // argmax suspect
  std::string explanation;                       // winning how/why summary
};

// Runs the whole procedure for one victim: seed the Issue, spawn one agent
// per other person, elaborate how/why through the rule pipeline, run one
// counterargument round, score, and select by argmax (ties to the
// lexicographically smaller suspect IRI).
DiscussionResult run_discussion(const Graph& g, const std::vector<Rule>& rules,
                                const Term& victim, const Term& incident);

// ---- individual procedure steps, exposed for finer-grained use ----

// One Issue per victim: "who is the murderer of <victim>".
IbisGraph seed_issues(const Graph& g, const std::vector<Term>& victims);

// One hypothesis per person other than the victim, attached as Idea nodes
// under the victim's Issue in lexicographic suspect order.
std::vector<Hypothesis> generate_hypotheses(const Graph& g, const Term& victim,
                                            IbisGraph& ibis,
                                            const std::string& issue_node,
                                            std::vector<std::string>* idea_nodes
                                            = nullptr);

// Argmax by score value, ties to the lexicographically smaller suspect
// IRI. Throws EMPTY_SCORES on an empty map.
Term select_suspect(const std::map<Term, ConsistencyScore>& scores);

}  // namespace kgcr
