#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "kgcr/error.hpp"
#include "kgcr/scene.hpp"
#include "kgcr/turtle.hpp"

using namespace kgcr;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const std::string kFixturePath = std::string(KGCR_DATA_DIR) + "/fixture.ttl";

Graph fixture() { return parse_turtle(slurp(kFixturePath)); }

}  // namespace

TEST_CASE("turtle parsing basics") {
  CHECK(parse_turtle("").size() == 0);
  Graph g = parse_turtle("<s> <p> <o> .");
  CHECK(g.size() == 1);
  CHECK(g.has(Term::iri("s"), Term::iri("p"), Term::iri("o")));

  Graph g2 = parse_turtle(
      "@prefix ex: <http://e/> .\n"
      "ex:a ex:p ex:b ; ex:q ex:c , ex:d .\n"
      "ex:a a ex:Thing . # trailing comment\n");
  CHECK(g2.size() == 4);
  CHECK(g2.has(Term::iri("http://e/a"),
               Term::iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
               Term::iri("http://e/Thing")));

  Graph g3 = parse_turtle(
      "@prefix ex: <http://e/> .\n"
      "ex:a ex:label \"hi\"@en .\n"
      "ex:a ex:count \"3\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
      "_:b ex:p ex:a .\n");
  CHECK(g3.size() == 3);
  CHECK(g3.has(Term::iri("http://e/a"), Term::iri("http://e/label"),
               Term::literal("hi", "en")));
}

TEST_CASE("turtle parse errors carry positions") {
  CHECK_THROWS_AS(parse_turtle("<s> <p> ."), ParseError);
  CHECK_THROWS_AS(parse_turtle("ex:a ex:p ex:b ."), ParseError);  // no prefix
  try {
    parse_turtle("<s> <p>\n<o>");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 1);
    CHECK(std::string(e.what()).find("PARSE_ERROR") == 0);
  }
}

TEST_CASE("fixture loads with the recorded triple total") {
  Graph g = fixture();
  CHECK(g.size() == 146);
  CHECK(scene_ids(g).size() == 25);
}

TEST_CASE("serialization round-trips and is deterministic") {
  Graph g = fixture();
  std::string once = serialize_turtle(g);
  Graph again = parse_turtle(once);
  CHECK(again == g);
  CHECK(serialize_turtle(again) == once);

  Graph empty;
  empty.set_prefix("ex", "http://e/");
  std::string doc = serialize_turtle(empty);
  CHECK(doc.find("@prefix ex:") != std::string::npos);
  CHECK(parse_turtle(doc).size() == 0);
}

TEST_CASE("insertion order never affects the graph") {
  Graph g = fixture();
  std::vector<Triple> triples(g.triples().begin(), g.triples().end());
  std::mt19937 rng(7);
  for (int round = 0; round < 5; round++) {
    std::shuffle(triples.begin(), triples.end(), rng);
    Graph h;
    for (const auto& [p, base] : g.prefixes()) h.set_prefix(p, base);
    for (const Triple& t : triples) h.insert(t);
    CHECK(h == g);
    CHECK(serialize_turtle(h) == serialize_turtle(g));
  }
}

TEST_CASE("round-trip on generated documents") {
  std::mt19937 rng(42);
  for (int doc = 0; doc < 120; doc++) {
    Graph g;
    g.set_prefix("ex", "http://e/");
    g.set_prefix("kgc", kKgcNs);
    std::uniform_int_distribution<int> nd(0, 40), kind(0, 3);
    int n = nd(rng);
    for (int i = 0; i < n; i++) {
      Term s = rng() % 4 == 0 ? Term::blank("b" + std::to_string(rng() % 5))
                              : Term::iri("http://e/s" +
                                          std::to_string(rng() % 9));
      Term p = Term::iri("http://e/p" + std::to_string(rng() % 5));
      Term o;
      switch (kind(rng)) {
        case 0: o = Term::iri("http://e/o" + std::to_string(rng() % 9)); break;
        case 1: o = Term::blank("b" + std::to_string(rng() % 5)); break;
        case 2:
          o = Term::literal("lit \"x\"\n" + std::to_string(rng() % 9));
          break;
        default:
          o = Term::literal(std::to_string(rng() % 9), "",
                            kXsdNs + "integer");
      }
      g.insert({s, p, o});
    }
    std::string text = serialize_turtle(g);
    Graph back = parse_turtle(text);
    CHECK(back == g);
    CHECK(serialize_turtle(back) == text);
  }
}

TEST_CASE("scene_view aggregates schema properties") {
  Graph g = fixture();
  Scene sc = scene_view(
      g, Term::iri("http://kgc.knowledge-graph.jp/data/SpeckledBand#scene10"));
  REQUIRE(sc.subjects.size() == 1);
  CHECK(sc.subjects[0].value ==
        "http://kgc.knowledge-graph.jp/data/SpeckledBand#Roylott");
  REQUIRE(sc.predicate.has_value());
  CHECK(sc.predicate->value ==
        "http://kgc.knowledge-graph.jp/data/SpeckledBand#own");
  CHECK_FALSE(sc.property.has_value());

  Scene st = scene_view(
      g, Term::iri("http://kgc.knowledge-graph.jp/data/SpeckledBand#scene15"));
  CHECK(st.kind == SceneKind::Statement);
  REQUIRE(st.info_source.has_value());
  CHECK(st.info_source->value ==
        "http://kgc.knowledge-graph.jp/data/SpeckledBand#Helen");

  CHECK_THROWS_WITH_AS(scene_view(g, Term::iri("http://e/nothing")),
                       doctest::Contains("UNKNOWN_SCENE"), Error);
}

TEST_CASE("expand_or enumerates the cartesian product") {
  Graph g;
  auto s = Term::iri("http://e/s");
  g.insert({s, rdf("type"), kgc("Situation")});
  g.insert({s, kgc("subject"), Term::iri("http://e/A")});
  g.insert({s, kgc("hasPredicate"), Term::iri("http://e/use")});

  Scene plain = scene_view(g, s);
  CHECK(expand_or(g, plain).size() == 1);

  auto or1 = Term::iri("http://e/or1");
  g.insert({or1, rdf("type"), kgc("ORobj")});
  g.insert({or1, kgc("orTarget"), Term::iri("http://e/snake")});
  g.insert({or1, kgc("orTarget"), Term::iri("http://e/rope")});
  g.insert({s, kgc("what"), or1});
  CHECK(expand_or(g, scene_view(g, s)).size() == 2);

  auto or2 = Term::iri("http://e/or2");
  g.insert({or2, rdf("type"), kgc("ORobj")});
  for (const char* w : {"x", "y", "z"})
    g.insert({or2, kgc("orTarget"), Term::iri(std::string("http://e/") + w)});
  g.insert({s, kgc("where"), or2});
  auto expanded = expand_or(g, scene_view(g, s));
  CHECK(expanded.size() == 6);
  for (const Scene& v : expanded) {
    CHECK(v.what[0].value != "http://e/or1");
    CHECK(v.where[0].value != "http://e/or2");
  }

  auto empty_or = Term::iri("http://e/or3");
  g.insert({empty_or, rdf("type"), kgc("ORobj")});
  g.insert({s, kgc("how"), empty_or});
  CHECK_THROWS_WITH_AS(expand_or(g, scene_view(g, s)),
                       doctest::Contains("OR_EMPTY"), Error);
}

TEST_CASE("fixture ORobj scene expands into two readings") {
  Graph g = fixture();
  Scene sc = scene_view(
      g, Term::iri("http://kgc.knowledge-graph.jp/data/SpeckledBand#scene16"));
  auto expanded = expand_or(g, sc);
  CHECK(expanded.size() == 2);
}

TEST_CASE("validator accepts the fixture and flags each seeded violation") {
  Graph g = fixture();
  CHECK(validate_schema(g).empty());

  const std::string sb = "http://kgc.knowledge-graph.jp/data/SpeckledBand#";
  auto count_code = [](const std::vector<Violation>& vs, ViolationCode c) {
    int n = 0;
    for (const Violation& v : vs) n += v.code == c;
    return n;
  };

  SUBCASE("BOTH_PRED_PROP") {
    g.insert({Term::iri(sb + "scene10"), kgc("hasProperty"),
              Term::iri(sb + "poor")});
    auto vs = validate_schema(g);
    CHECK(vs.size() == 1);
    CHECK(count_code(vs, ViolationCode::BOTH_PRED_PROP) == 1);
  }
  SUBCASE("NO_PRED_PROP") {
    auto s = Term::iri(sb + "sceneX");
    g.insert({s, rdf("type"), kgc("Situation")});
    g.insert({s, kgc("subject"), Term::iri(sb + "Helen")});
    auto vs = validate_schema(g);
    CHECK(vs.size() == 1);
    CHECK(count_code(vs, ViolationCode::NO_PRED_PROP) == 1);
  }
  SUBCASE("MISSING_INFOSOURCE") {
    auto s = Term::iri(sb + "sceneX");
    g.insert({s, rdf("type"), kgc("Statement")});
    g.insert({s, kgc("hasPredicate"), Term::iri(sb + "say")});
    auto vs = validate_schema(g);
    CHECK(vs.size() == 1);
    CHECK(count_code(vs, ViolationCode::MISSING_INFOSOURCE) == 1);
  }
  SUBCASE("DANGLING_SCENE_LINK") {
    g.insert({Term::iri(sb + "scene10"), kgc("then"),
              Term::iri(sb + "nowhere")});
    auto vs = validate_schema(g);
    CHECK(vs.size() == 1);
    CHECK(count_code(vs, ViolationCode::DANGLING_SCENE_LINK) == 1);
  }
  SUBCASE("BAD_TIME_LITERAL") {
    g.insert({Term::iri(sb + "scene10"), kgc("time"),
              Term::literal("yesterday night")});
    auto vs = validate_schema(g);
    CHECK(vs.size() == 1);
    CHECK(count_code(vs, ViolationCode::BAD_TIME_LITERAL) == 1);
  }
  SUBCASE("NEGATION_WITHOUT_POSITIVE") {
    auto s = Term::iri(sb + "sceneX");
    g.insert({s, rdf("type"), kgc("Situation")});
    g.insert({s, kgc("subject"), Term::iri(sb + "Helen")});
    g.insert({s, kgc("hasPredicate"), Term::iri(sb + "notHear")});
    auto vs = validate_schema(g);
    CHECK(vs.size() == 1);
    CHECK(count_code(vs, ViolationCode::NEGATION_WITHOUT_POSITIVE) == 1);
  }
}

TEST_CASE("expand_or outputs of a valid scene stay valid") {
  Graph g = fixture();
  Scene sc = scene_view(
      g, Term::iri("http://kgc.knowledge-graph.jp/data/SpeckledBand#scene16"));
  for (const Scene& v : expand_or(g, sc)) {
    // Rebuild a graph carrying the expanded reading and revalidate.
    Graph h = g;
    auto s2 = Term::iri(v.id.value + "_alt");
    h.insert({s2, rdf("type"), kgc("Thought")});
    for (const Term& subj : v.subjects) h.insert({s2, kgc("subject"), subj});
    if (v.predicate) h.insert({s2, kgc("hasPredicate"), *v.predicate});
    for (const Term& w : v.what) h.insert({s2, kgc("what"), w});
    h.insert({s2, kgc("infoSource"), *v.info_source});
    CHECK(validate_schema(h).empty());
  }
}

TEST_CASE("graph helpers") {
  Graph g;
  g.set_prefix("ex", "http://e/");
  CHECK(g.expand("ex:a") == "http://e/a");
  CHECK_THROWS_WITH_AS(g.expand("nope:a"), doctest::Contains("UNKNOWN_PREFIX"),
                       Error);
  CHECK(g.shorten("http://e/a") == "ex:a");
  CHECK(g.shorten("http://other/x") == "<http://other/x>");

  g.insert({Term::iri("http://e/a"), Term::iri("http://e/p"),
            Term::iri("http://e/b")});
  g.insert({Term::iri("http://e/a"), Term::iri("http://e/p"),
            Term::iri("http://e/c")});
  CHECK(g.with_subject(Term::iri("http://e/a")).size() == 2);
  CHECK(g.objects(Term::iri("http://e/a"), Term::iri("http://e/p")).size() ==
        2);
  CHECK(g.subjects_of(Term::iri("http://e/p"), Term::iri("http://e/b"))
            .size() == 1);
  g.insert({Term::iri("http://e/a"), Term::iri("http://e/p"),
            Term::iri("http://e/b")});
  CHECK(g.size() == 2);  // set semantics
}
