#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgcr/term.hpp"

namespace kgcr {

// Well-known vocabulary.
inline const std::string kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline const std::string kKgcNs = "http://kgc.knowledge-graph.jp/ontology/kgc.owl#";
inline const std::string kXsdNs = "http://www.w3.org/2001/XMLSchema#";

inline Term rdf(const std::string& local) { return Term::iri(kRdfNs + local); }
inline Term kgc(const std::string& local) { return Term::iri(kKgcNs + local); }

// Indexed triple store with set semantics. Triples are kept sorted by
// (S,P,O); three secondary indexes serve lookups by S, by (P,O) and by O.
class Graph {
 public:
  void insert(Triple t);
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const std::set<Triple>& triples() const { return triples_; }

  // Index lookups. Returned vectors are in (S,P,O) order.
  std::vector<Triple> with_subject(const Term& s) const;
  std::vector<Triple> with_predicate_object(const Term& p, const Term& o) const;
  std::vector<Triple> with_object(const Term& o) const;

  // Objects of (s, p, ?o), sorted.
  std::vector<Term> objects(const Term& s, const Term& p) const;
  // Subjects of (?s, p, o), sorted.
  std::vector<Term> subjects_of(const Term& p, const Term& o) const;

  bool has(const Term& s, const Term& p, const Term& o) const {
    return contains({s, p, o});
  }

  void set_prefix(const std::string& prefix, const std::string& base) {
    prefixes_[prefix] = base;
  }
  const std::map<std::string, std::string>& prefixes() const {
    return prefixes_;
  }
  // Resolves "pref:local" against the prefix map; throws on unknown prefix.
  std::string expand(const std::string& pname) const;
  // Renders an IRI as a prefixed name when a declared base matches, else <iri>.
  std::string shorten(const std::string& iri) const;

  bool operator==(const Graph& other) const {
    return triples_ == other.triples_;
  }

 private:
  std::set<Triple> triples_;
  std::map<std::string, std::string> prefixes_;
  std::map<Term, std::vector<Triple>> by_s_;
  std::map<std::pair<Term, Term>, std::vector<Triple>> by_po_;
  std::map<Term, std::vector<Triple>> by_o_;
};

}  // namespace kgcr
