#include "kgcr/scene.hpp"

#include <algorithm>
#include <cstdio>

#include "kgcr/error.hpp"

namespace kgcr {

std::string to_string(SceneKind k) {
  switch (k) {
    case SceneKind::Situation: return "Situation";
    case SceneKind::Statement: return "Statement";
    case SceneKind::Thought: return "Thought";
  }
  return "";
}

std::string to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::BOTH_PRED_PROP: return "BOTH_PRED_PROP";
    case ViolationCode::NO_PRED_PROP: return "NO_PRED_PROP";
    case ViolationCode::MISSING_INFOSOURCE: return "MISSING_INFOSOURCE";
    case ViolationCode::DANGLING_SCENE_LINK: return "DANGLING_SCENE_LINK";
    case ViolationCode::BAD_TIME_LITERAL: return "BAD_TIME_LITERAL";
    case ViolationCode::NEGATION_WITHOUT_POSITIVE:
      return "NEGATION_WITHOUT_POSITIVE";
  }
  return "";
}

namespace {

std::optional<SceneKind> scene_kind(const Graph& g, const Term& id) {
  for (const Term& ty : g.objects(id, rdf("type"))) {
    if (ty == kgc("Situation")) return SceneKind::Situation;
    if (ty == kgc("Statement")) return SceneKind::Statement;
    if (ty == kgc("Thought")) return SceneKind::Thought;
  }
  return std::nullopt;
}

const char* kLinkRelations[] = {"when", "then", "after", "if", "because"};

// xsd:dateTime lexical check: YYYY-MM-DDThh:mm:ss with optional
// fractional seconds and optional zone (Z or +hh:mm / -hh:mm).
bool valid_datetime(const std::string& s) {
  auto digits = [&](std::size_t at, int n) {
    if (at + n > s.size()) return false;
    for (int i = 0; i < n; i++)
      if (!std::isdigit(static_cast<unsigned char>(s[at + i]))) return false;
    return true;
  };
  if (!digits(0, 4) || s.size() < 19) return false;
  if (s[4] != '-' || !digits(5, 2) || s[7] != '-' || !digits(8, 2)) return false;
  if (s[10] != 'T' || !digits(11, 2) || s[13] != ':' || !digits(14, 2) ||
      s[16] != ':' || !digits(17, 2))
    return false;
  int month = std::stoi(s.substr(5, 2)), day = std::stoi(s.substr(8, 2));
  int hh = std::stoi(s.substr(11, 2)), mm = std::stoi(s.substr(14, 2)),
      ss = std::stoi(s.substr(17, 2));
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  if (hh > 23 || mm > 59 || ss > 59) return false;
  std::size_t i = 19;
  if (i < s.size() && s[i] == '.') {
    std::size_t j = i + 1;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) j++;
    if (j == i + 1) return false;
    i = j;
  }
  if (i == s.size()) return true;
  if (s[i] == 'Z') return i + 1 == s.size();
  if (s[i] == '+' || s[i] == '-')
    return digits(i + 1, 2) && i + 3 < s.size() && s[i + 3] == ':' &&
           digits(i + 4, 2) && i + 6 == s.size();
  return false;
}

std::string local_name(const std::string& iri) {
  auto pos = iri.find_last_of("#/");
  return pos == std::string::npos ? iri : iri.substr(pos + 1);
}

}  // namespace

bool is_scene(const Graph& g, const Term& id) {
  return scene_kind(g, id).has_value();
}

std::vector<Term> scene_ids(const Graph& g) {
  std::vector<Term> out;
  for (const char* k : {"Situation", "Statement", "Thought"})
    for (const Term& s : g.subjects_of(rdf("type"), kgc(k))) out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Scene scene_view(const Graph& g, const Term& id) {
  auto kind = scene_kind(g, id);
  if (!kind)
    throw Error("UNKNOWN_SCENE", id.value + " is not typed as a scene");
  Scene sc;
  sc.id = id;
  sc.kind = *kind;
  sc.subjects = g.objects(id, kgc("subject"));
  auto preds = g.objects(id, kgc("hasPredicate"));
  auto props = g.objects(id, kgc("hasProperty"));
  if (!preds.empty()) sc.predicate = preds.front();
  if (!props.empty()) sc.property = props.front();
  sc.whom = g.objects(id, kgc("whom"));
  sc.what = g.objects(id, kgc("what"));
  sc.where = g.objects(id, kgc("where"));
  sc.how = g.objects(id, kgc("how"));
  sc.why = g.objects(id, kgc("why"));
  for (const char* rel : kLinkRelations)
    for (const Term& target : g.objects(id, kgc(rel)))
      sc.links.emplace_back(rel, target);
  auto times = g.objects(id, kgc("time"));
  if (!times.empty()) sc.time = times.front().value;
  sc.sources = g.objects(id, kgc("source"));
  auto infos = g.objects(id, kgc("infoSource"));
  if (!infos.empty()) sc.info_source = infos.front();
  return sc;
}

std::vector<Scene> expand_or(const Graph& g, const Scene& s) {
  // Each slot value that is an ORobj contributes one choice axis.
  struct Axis {
    std::vector<Term>* slot;
    std::size_t index;
    std::vector<Term> alternatives;
  };
  std::vector<Scene> result{s};
  std::vector<Term> Scene::* slots[] = {&Scene::subjects, &Scene::whom,
                                        &Scene::what, &Scene::where,
                                        &Scene::how, &Scene::why};
  for (auto slot : slots) {
    const std::vector<Term>& values = s.*slot;
    for (std::size_t i = 0; i < values.size(); i++) {
      if (!g.has(values[i], rdf("type"), kgc("ORobj"))) continue;
      std::vector<Term> alts = g.objects(values[i], kgc("orTarget"));
      if (alts.empty())
        throw Error("OR_EMPTY",
                    "ORobj " + values[i].value + " has no orTarget values");
      std::vector<Scene> next;
      next.reserve(result.size() * alts.size());
      for (const Scene& base : result)
        for (const Term& alt : alts) {
          Scene variant = base;
          (variant.*slot)[i] = alt;
          next.push_back(std::move(variant));
        }
      result = std::move(next);
    }
  }
  return result;
}

std::vector<Violation> validate_schema(const Graph& g) {
  std::vector<Violation> out;
  auto add = [&](ViolationCode code, const Term& scene, std::string detail) {
    out.push_back({code, scene, std::move(detail)});
  };
  for (const Term& id : scene_ids(g)) {
    bool has_pred = !g.objects(id, kgc("hasPredicate")).empty();
    bool has_prop = !g.objects(id, kgc("hasProperty")).empty();
    if (has_pred && has_prop)
      add(ViolationCode::BOTH_PRED_PROP, id,
          "scene carries both hasPredicate and hasProperty");
    if (!has_pred && !has_prop)
      add(ViolationCode::NO_PRED_PROP, id,
          "scene carries neither hasPredicate nor hasProperty");
    auto kind = scene_kind(g, id);
    if ((kind == SceneKind::Statement || kind == SceneKind::Thought) &&
        g.objects(id, kgc("infoSource")).empty())
      add(ViolationCode::MISSING_INFOSOURCE, id,
          to_string(*kind) + " scene lacks infoSource");
    for (const char* rel : kLinkRelations)
      for (const Term& target : g.objects(id, kgc(rel)))
        if (!is_scene(g, target))
          add(ViolationCode::DANGLING_SCENE_LINK, id,
              std::string(rel) + " target " + target.value +
                  " is not a scene");
    for (const Term& t : g.objects(id, kgc("time")))
      if (!t.is_literal() || !valid_datetime(t.value))
        add(ViolationCode::BAD_TIME_LITERAL, id,
            "time value does not parse as xsd:dateTime");
    // Negated verbs (local name starting with "not"/"cannot") must link to
    // their positive counterpart through kgc:Not or kgc:canNot.
    auto check_verb = [&](const Term& verb) {
      if (!verb.is_iri()) return;
      std::string local = local_name(verb.value);
      std::transform(local.begin(), local.end(), local.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (local.rfind("not", 0) != 0 && local.rfind("cannot", 0) != 0) return;
      if (g.objects(verb, kgc("Not")).empty() &&
          g.objects(verb, kgc("canNot")).empty())
        add(ViolationCode::NEGATION_WITHOUT_POSITIVE, id,
            "negated verb " + verb.value +
                " has no Not/canNot link to a positive verb");
    };
    for (const Term& v : g.objects(id, kgc("hasPredicate"))) check_verb(v);
    for (const Term& v : g.objects(id, kgc("hasProperty"))) check_verb(v);
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.scene != b.scene) return a.scene < b.scene;
    return a.code < b.code;
  });
  return out;
}

}  // namespace kgcr
