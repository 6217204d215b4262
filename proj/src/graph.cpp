#include "kgcr/graph.hpp"

#include <algorithm>

#include "kgcr/error.hpp"

namespace kgcr {

void Graph::insert(Triple t) {
  auto [it, fresh] = triples_.insert(std::move(t));
  if (!fresh) return;
  const Triple& tr = *it;
  auto place = [&](std::vector<Triple>& v) {
    v.insert(std::upper_bound(v.begin(), v.end(), tr), tr);
  };
  place(by_s_[tr.s]);
  place(by_po_[{tr.p, tr.o}]);
  place(by_o_[tr.o]);
}

std::vector<Triple> Graph::with_subject(const Term& s) const {
  auto it = by_s_.find(s);
  return it == by_s_.end() ? std::vector<Triple>{} : it->second;
}

std::vector<Triple> Graph::with_predicate_object(const Term& p,
                                                 const Term& o) const {
  auto it = by_po_.find({p, o});
  return it == by_po_.end() ? std::vector<Triple>{} : it->second;
}

std::vector<Triple> Graph::with_object(const Term& o) const {
  auto it = by_o_.find(o);
  return it == by_o_.end() ? std::vector<Triple>{} : it->second;
}

std::vector<Term> Graph::objects(const Term& s, const Term& p) const {
  std::vector<Term> out;
  for (const Triple& t : with_subject(s))
    if (t.p == p) out.push_back(t.o);
  return out;
}

std::vector<Term> Graph::subjects_of(const Term& p, const Term& o) const {
  std::vector<Term> out;
  for (const Triple& t : with_predicate_object(p, o)) out.push_back(t.s);
  return out;
}

std::string Graph::expand(const std::string& pname) const {
  auto colon = pname.find(':');
  if (colon == std::string::npos)
    throw Error("UNKNOWN_PREFIX", "not a prefixed name: " + pname);
  std::string prefix = pname.substr(0, colon);
  auto it = prefixes_.find(prefix);
  if (it == prefixes_.end())
    throw Error("UNKNOWN_PREFIX", "undeclared prefix '" + prefix + ":'");
  return it->second + pname.substr(colon + 1);
}

std::string Graph::shorten(const std::string& iri) const {
  // Longest declared base wins; the local part must be a safe PN local.
  const std::string* best_prefix = nullptr;
  const std::string* best_base = nullptr;
  for (const auto& [prefix, base] : prefixes_) {
    if (iri.size() <= base.size() || iri.compare(0, base.size(), base) != 0)
      continue;
    if (best_base && base.size() <= best_base->size()) continue;
    std::string local = iri.substr(base.size());
    bool safe = !local.empty();
    for (char c : local)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
            c == '-'))
        safe = false;
    if (std::isdigit(static_cast<unsigned char>(local[0]))) safe = false;
    if (!safe) continue;
    best_prefix = &prefix;
    best_base = &base;
  }
  if (best_prefix) return *best_prefix + ":" + iri.substr(best_base->size());
  return "<" + iri + ">";
}

}  // namespace kgcr
