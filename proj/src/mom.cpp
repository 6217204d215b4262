#include <algorithm>
#include <deque>

#include "kgcr/error.hpp"
#include "kgcr/rules.hpp"

namespace kgcr {

namespace {

std::vector<Term> persons(const Graph& g) {
  return g.subjects_of(rdf("type"), kgc("Person"));
}

// Undirected neighbours over human-passable connections.
std::vector<Term> passable_neighbours(const Graph& g, const Term& place) {
  std::vector<Term> out = g.objects(place, kgc("connectedTo"));
  for (const Term& s : g.subjects_of(kgc("connectedTo"), place))
    out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Shortest passable path from -> to (inclusive), empty when unreachable.
std::vector<Term> find_path(const Graph& g, const Term& from, const Term& to) {
  if (from == to) return {from};
  std::map<Term, Term> parent;
  std::deque<Term> queue{from};
  parent.emplace(from, from);
  while (!queue.empty()) {
    Term cur = queue.front();
    queue.pop_front();
    for (const Term& next : passable_neighbours(g, cur)) {
      if (parent.count(next)) continue;
      parent.emplace(next, cur);
      if (next == to) {
        std::vector<Term> path{to};
        Term walk = cur;
        while (true) {
          path.push_back(walk);
          if (walk == from) break;
          walk = parent.at(walk);
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(next);
    }
  }
  return {};
}

void merge_scenes(std::set<std::string>& into, const std::set<std::string>& s) {
  into.insert(s.begin(), s.end());
}

std::string short_name(const Term& t) {
  if (!t.is_iri()) return t.value;
  auto pos = t.value.find_last_of("#/");
  return pos == std::string::npos ? t.value : t.value.substr(pos + 1);
}

}  // namespace

std::vector<CaseInfo> find_cases(const Graph& g) {
  std::vector<CaseInfo> out;
  for (const Term& c : g.subjects_of(rdf("type"), kgc("Case"))) {
    auto incidents = g.objects(c, kgc("incident"));
    if (incidents.empty())
      throw Error("BAD_CASE", c.value + " has no kgc:incident scene");
    Scene incident = scene_view(g, incidents.front());
    if (incident.subjects.empty() || incident.where.empty())
      throw Error("BAD_CASE",
                  "incident scene " + incident.id.value +
                      " needs a subject (victim) and a where (crime scene)");
    out.push_back({c, incident.id, incident.subjects.front(),
                   incident.where.front()});
  }
  return out;
}

std::vector<MotiveFinding> infer_motives(
    const Graph& g, const std::vector<Rule>& motive_rules) {
  ChainResult chain = forward_chain(g, motive_rules);
  Graph db = g;
  for (const Triple& t : chain.derived) db.insert(t);

  std::vector<MotiveFinding> out;
  for (const Term& aux : db.subjects_of(rdf("type"), kgc("MotiveFinding"))) {
    auto suspects = db.objects(aux, kgc("suspect"));
    auto victims = db.objects(aux, kgc("victim"));
    auto motives = db.objects(aux, kgc("motive"));
    if (suspects.empty() || victims.empty() || motives.empty()) continue;
    MotiveFinding f;
    f.suspect = suspects.front();
    f.victim = victims.front();
    f.motive = motives.front();
    for (const Term& prop :
         {kgc("suspect"), kgc("victim"), kgc("motive"), rdf("type")}) {
      for (const Triple& t : db.with_subject(aux)) {
        if (t.p != prop) continue;
        auto it = chain.proofs.find(t);
        if (it == chain.proofs.end()) continue;
        for (const Triple& prem : it->second.premises)
          f.evidence.push_back(prem);
        merge_scenes(f.scenes, scenes_used(g, chain.proofs, t));
      }
    }
    std::sort(f.evidence.begin(), f.evidence.end());
    f.evidence.erase(std::unique(f.evidence.begin(), f.evidence.end()),
                     f.evidence.end());
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(),
            [](const MotiveFinding& a, const MotiveFinding& b) {
              return std::tie(a.suspect, a.victim, a.motive) <
                     std::tie(b.suspect, b.victim, b.motive);
            });
  return out;
}

std::vector<OpportunityFinding> infer_opportunity(const Graph& g,
                                                  const Term& incident) {
  Scene inc = scene_view(g, incident);
  if (!inc.time)
    throw Error("BAD_CASE", "incident scene has no time literal");
  if (inc.where.empty())
    throw Error("BAD_CASE", "incident scene has no where (crime scene)");
  Term crime_scene = inc.where.front();
  std::set<Term> victims(inc.subjects.begin(), inc.subjects.end());
  std::set<Term> people;
  for (const Term& p : persons(g)) people.insert(p);

  std::vector<OpportunityFinding> out;
  std::set<Term> seen;
  for (const Scene& sc : scenes_at_time(g, *inc.time, incident)) {
    if (sc.id == incident || sc.where.empty()) continue;
    for (const Term& subj : sc.subjects) {
      if (!people.count(subj) || victims.count(subj) || seen.count(subj))
        continue;
      Term location = sc.where.front();
      std::vector<Term> path = find_path(g, location, crime_scene);
      if (path.empty()) continue;
      seen.insert(subj);
      OpportunityFinding f;
      f.suspect = subj;
      f.location = location;
      f.path = path;
      f.evidence.push_back({sc.id, kgc("subject"), subj});
      f.evidence.push_back({sc.id, kgc("where"), location});
      for (std::size_t i = 0; i + 1 < path.size(); i++) {
        Triple fwd{path[i], kgc("connectedTo"), path[i + 1]};
        f.evidence.push_back(g.contains(fwd)
                                 ? fwd
                                 : Triple{path[i + 1], kgc("connectedTo"),
                                          path[i]});
      }
      f.scenes.insert(sc.id.value);
      f.scenes.insert(incident.value);
      out.push_back(std::move(f));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const OpportunityFinding& a, const OpportunityFinding& b) {
              return a.suspect < b.suspect;
            });
  return out;
}

std::vector<MeansFinding> infer_means(const Graph& g,
                                      const std::vector<Rule>& means_rules,
                                      const Term& incident) {
  ChainResult chain = forward_chain(g, means_rules);
  Graph db = g;
  for (const Triple& t : chain.derived) db.insert(t);

  Scene inc = scene_view(db, incident);
  std::set<Term> victims(inc.subjects.begin(), inc.subjects.end());

  // Observed symptoms: victim-scene properties that any method declares.
  std::set<Term> symptom_vocab;
  for (const Triple& t : db.triples())
    if (t.p == kgc("symptom")) symptom_vocab.insert(t.o);
  std::vector<std::pair<Term, Term>> observed;  // (symptom, scene)
  for (const Term& id : scene_ids(db)) {
    Scene sc = scene_view(db, id);
    bool about_victim = false;
    for (const Term& s : sc.subjects) about_victim |= victims.count(s) > 0;
    if (!about_victim || !sc.property) continue;
    if (symptom_vocab.count(*sc.property))
      observed.emplace_back(*sc.property, id);
  }

  std::vector<MeansFinding> out;
  for (const Term& method : db.subjects_of(rdf("type"), kgc("Method"))) {
    std::vector<Term> declared = db.objects(method, kgc("symptom"));
    std::set<Term> declared_set(declared.begin(), declared.end());
    bool compatible = true;
    for (const auto& [sym, scene] : observed)
      compatible &= declared_set.count(sym) > 0;
    if (!compatible) continue;

    for (const Term& suspect : persons(db)) {
      if (victims.count(suspect)) continue;
      MeansFinding f;
      f.suspect = suspect;
      f.method = method;
      bool feasible = true;
      for (const Term& req : db.objects(method, kgc("requires"))) {
        auto preds = db.objects(req, kgc("reqPredicate"));
        auto whats = db.objects(req, kgc("reqWhat"));
        if (preds.empty() || whats.empty()) {
          feasible = false;
          break;
        }
        bool met = false;
        for (const Term& id : scene_ids(db)) {
          Scene sc = scene_view(db, id);
          if (!sc.predicate || *sc.predicate != preds.front()) continue;
          if (std::find(sc.subjects.begin(), sc.subjects.end(), suspect) ==
              sc.subjects.end())
            continue;
          if (std::find(sc.what.begin(), sc.what.end(), whats.front()) ==
              sc.what.end())
            continue;
          met = true;
          f.evidence.push_back({id, kgc("hasPredicate"), preds.front()});
          f.evidence.push_back({id, kgc("what"), whats.front()});
          f.scenes.insert(id.value);
          break;
        }
        if (!met) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      for (const auto& [sym, scene] : observed) {
        f.evidence.push_back({scene, kgc("hasProperty"), sym});
        f.scenes.insert(scene.value);
      }
      f.evidence.push_back({method, kgc("feasibleFor"), suspect});
      out.push_back(std::move(f));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const MeansFinding& a, const MeansFinding& b) {
              return std::tie(a.suspect, a.method) <
                     std::tie(b.suspect, b.method);
            });
  return out;
}

MomReport combine_mom(std::vector<MotiveFinding> motives,
                      std::vector<OpportunityFinding> opportunities,
                      std::vector<MeansFinding> means, const Term& victim) {
  MomReport report;
  report.motives = std::move(motives);
  report.opportunities = std::move(opportunities);
  report.means = std::move(means);

  std::map<Term, MomVerdictEntry> entries;
  auto entry = [&](const Term& suspect) -> MomVerdictEntry& {
    auto [it, fresh] = entries.try_emplace(suspect);
    if (fresh) it->second.suspect = suspect;
    return it->second;
  };
  std::set<Term> with_motive, with_opp, with_means;
  for (const MotiveFinding& f : report.motives) {
    if (f.victim != victim || f.suspect == victim) continue;
    MomVerdictEntry& e = entry(f.suspect);
    if (with_motive.insert(f.suspect).second) e.components++;
    e.notes.push_back("motive: " + short_name(f.motive));
    merge_scenes(e.scenes, f.scenes);
  }
  for (const OpportunityFinding& f : report.opportunities) {
    if (f.suspect == victim) continue;
    MomVerdictEntry& e = entry(f.suspect);
    if (with_opp.insert(f.suspect).second) e.components++;
    e.notes.push_back("opportunity: at " + short_name(f.location));
    merge_scenes(e.scenes, f.scenes);
  }
  for (const MeansFinding& f : report.means) {
    if (f.suspect == victim) continue;
    MomVerdictEntry& e = entry(f.suspect);
    if (with_means.insert(f.suspect).second) e.components++;
    e.notes.push_back("means: " + short_name(f.method));
    merge_scenes(e.scenes, f.scenes);
  }
  for (auto& [suspect, e] : entries) report.verdict.push_back(std::move(e));
  std::sort(report.verdict.begin(), report.verdict.end(),
            [](const MomVerdictEntry& a, const MomVerdictEntry& b) {
              if (a.components != b.components)
                return a.components > b.components;
              return a.suspect < b.suspect;
            });
  return report;
}

}  // namespace kgcr
