#pragma once

#include <string>

#include "kgcr/graph.hpp"

namespace kgcr {

// Parses the Turtle subset: @prefix declarations, s-p-o statements with
// ';' and ',' continuations, 'a' for rdf:type, <iri>, prefixed names,
// labeled blank nodes, literals with optional @lang or ^^datatype, and
// '#' comments. Throws ParseError with line/column on bad input.
Graph parse_turtle(const std::string& text);

// Deterministic serialization: prefix declarations sorted by prefix name,
// triples sorted by (S,P,O) and grouped with ';' / ',' continuations.
// Re-parsing the output yields a graph equal to the input.
std::string serialize_turtle(const Graph& g);

}  // namespace kgcr
