#pragma once

#include <compare>
#include <string>

namespace kgcr {

enum class TermKind { Iri, Literal, Blank };

// An RDF term. `value` holds the IRI string, the literal lexical form, or
// the blank node label depending on `kind`. A literal carries at most one
// of a language tag or a datatype IRI.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;
  std::string lang;      // literals only
  std::string datatype;  // literals only

  static Term iri(std::string v) { return {TermKind::Iri, std::move(v), "", ""}; }
  static Term literal(std::string v, std::string lang = "",
                      std::string datatype = "") {
    return {TermKind::Literal, std::move(v), std::move(lang),
            std::move(datatype)};
  }
  static Term blank(std::string label) {
    return {TermKind::Blank, std::move(label), "", ""};
  }

  bool is_iri() const { return kind == TermKind::Iri; }
  bool is_literal() const { return kind == TermKind::Literal; }
  bool is_blank() const { return kind == TermKind::Blank; }

  auto operator<=>(const Term&) const = default;
};

struct Triple {
  Term s, p, o;
  auto operator<=>(const Triple&) const = default;
};

}  // namespace kgcr
