#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgcr/graph.hpp"

namespace kgcr {

enum class SceneKind { Situation, Statement, Thought };

std::string to_string(SceneKind k);

// 5W view over one scene ID. Multi-valued properties keep every value
// (AND semantics); disjunction only ever appears through ORobj nodes.
struct Scene {
  Term id;
  SceneKind kind = SceneKind::Situation;
  std::vector<Term> subjects;
  std::optional<Term> predicate;
  std::optional<Term> property;
  std::vector<Term> whom, what, where, how, why;
  std::vector<std::pair<std::string, Term>> links;  // when/then/after/if/because
  std::optional<std::string> time;                  // xsd:dateTime lexical form
  std::vector<Term> sources;
  std::optional<Term> info_source;
};

// True iff `id` carries an rdf:type of Situation, Statement or Thought.
bool is_scene(const Graph& g, const Term& id);

// All scene-typed IRIs, sorted.
std::vector<Term> scene_ids(const Graph& g);

// Aggregates the schema properties of `id`. Throws UNKNOWN_SCENE when the
// IRI is not typed as one of the scene kinds.
Scene scene_view(const Graph& g, const Term& id);

// Expands every ORobj value into its orTarget alternatives, one Scene per
// element of the Cartesian product. A scene without ORobj values yields a
// singleton. Throws OR_EMPTY on an ORobj with no targets.
std::vector<Scene> expand_or(const Graph& g, const Scene& s);

enum class ViolationCode {
  BOTH_PRED_PROP,
  NO_PRED_PROP,
  MISSING_INFOSOURCE,
  DANGLING_SCENE_LINK,
  BAD_TIME_LITERAL,
  NEGATION_WITHOUT_POSITIVE,
};

std::string to_string(ViolationCode c);

struct Violation {
  ViolationCode code;
  Term scene;
  std::string detail;
};

// Checks every scene against the schema rules; violations come back sorted
// by (scene IRI, code). An empty list means the graph is schema-valid.
std::vector<Violation> validate_schema(const Graph& g);

}  // namespace kgcr
