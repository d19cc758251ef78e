#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mlnec/error.hpp"
#include "mlnec/kb.hpp"
#include "mlnec/narrative.hpp"
#include "mlnec/results.hpp"
#include "support.hpp"

using namespace mlnec;

namespace {

const char* kDecls =
    "sort person = {id1, id2}\n"
    "sort distance = {24, 25, 34}\n"
    "event walking(person)\n"
    "event active(person)\n"
    "event running(person)\n"
    "fluent meeting(person, person)\n"
    "fluent moving(person, person)\n"
    "evidence close(person, person, distance, time)\n";

Signature bundled_signature() { return parse_kb(read_file(support::source_path("data/meeting_moving.mlnec"))).signature; }

}  // namespace

TEST_CASE("termination rule with two happens atoms") {
  auto kb = parse_kb(std::string(kDecls) +
                     "terminatedAt(moving(ID1,ID2),T) :- happens(active(ID1),T) ^ happens(active(ID2),T)\n");
  REQUIRE(kb.rules.size() == 1);
  const Rule& r = kb.rules[0];
  CHECK(r.kind == RuleKind::Termination);
  CHECK(r.rule_syntax);
  CHECK(r.weight.kind == WeightSpec::Kind::Unspecified);
  CHECK(r.head().str() == "terminatedAt(moving(ID1,ID2),T)");
  REQUIRE(r.body().op == Formula::Op::And);
  CHECK(r.body().kids.size() == 2);
  CHECK(r.body().kids[0].str() == "happens(active(ID1),T)");
}

TEST_CASE("weight prefix attaches a soft weight") {
  auto kb = parse_kb(std::string(kDecls) +
                     "1.386 initiatedAt(meeting(ID1,ID2),T) :- happens(active(ID1),T) ^ close(ID1,ID2,25,T)\n"
                     "hard terminatedAt(meeting(ID1,ID2),T) :- happens(running(ID1),T)\n");
  REQUIRE(kb.rules.size() == 2);
  CHECK(kb.rules[0].kind == RuleKind::Initiation);
  CHECK(kb.rules[0].weight == WeightSpec::soft(1.386));
  CHECK(kb.rules[1].weight == WeightSpec::hard());
}

TEST_CASE("arity mismatch names the line and column") {
  std::string text = std::string(kDecls) + "\ninitiatedAt(meeting(ID1,ID2),T) :- happens(walking(ID1,ID2),T)\n";
  try {
    parse_kb(text);
    FAIL("expected an error");
  } catch (const SortError& e) {
    CHECK(std::string(e.what()).rfind("10:", 0) == 0);
  }
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_kb("sort person = {id1, id2}\nevent walking(person))\n");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 0);
  }
  CHECK_THROWS_AS(parse_kb("sort person = {id1}\nevent walking(person)\nhappens(jumping(id1), 3)\n"), SortError);
  CHECK_THROWS_AS(parse_kb("sort time = {a}\n"), ParseError);
}

TEST_CASE("kb serialisation round-trips the bundled KB") {
  auto kb = parse_kb(read_file(support::source_path("data/meeting_moving.mlnec")));
  CHECK(kb.rules.size() == 11);
  std::string text = serialize_kb(kb);
  auto again = parse_kb(text);
  CHECK(kb.same_ast(again));
  CHECK(serialize_kb(again) == text);
}

TEST_CASE("kb serialisation round-trips weights, constraints and compiled roles") {
  std::string text = std::string(kDecls) +
                     "-0.5 initiatedAt(meeting(ID1,ID2),T) :- happens(active(ID1),T) ^ !close(ID1,ID2,24,T)\n"
                     "hard !(happens(walking(X),T) ^ happens(running(X),T))\n"
                     "@persists/inertia 2 holdsAt(moving(A,B),T+1) :- holdsAt(moving(A,B),T)\n";
  auto kb = parse_kb(text);
  auto again = parse_kb(serialize_kb(kb));
  CHECK(kb.same_ast(again));
  REQUIRE(again.rules.size() == 3);
  CHECK(again.rules[1].kind == RuleKind::Constraint);
  CHECK(again.rules[2].group == "inertia");
  CHECK(again.compiled());
}

TEST_CASE("narrative: horizon from the latest time-point") {
  Signature sig = bundled_signature();
  auto n = parse_narrative("happens(walking(id1),99)\nhappens(walking(id2),99)\n", sig);
  CHECK(n.horizon() == 99);
  CHECK(n.evidence().size() == 2);
  CHECK(n.evidence_true("happens(walking(id1),99)"));
  CHECK_FALSE(n.evidence_true("happens(walking(id1),98)"));
}

TEST_CASE("narrative: explicit negation equals absence") {
  Signature sig = bundled_signature();
  auto n = parse_narrative("!close(id1,id2,24,101)\n", sig);
  CHECK(n.horizon() == 101);
  CHECK_FALSE(n.evidence_true("close(id1,id2,24,101)"));
  auto m = parse_narrative("horizon 101\n", sig);
  CHECK(n.evidence_true("close(id1,id2,24,101)") == m.evidence_true("close(id1,id2,24,101)"));
}

TEST_CASE("narrative: empty input") {
  Signature sig = bundled_signature();
  auto n = parse_narrative("", sig);
  CHECK(n.horizon() == 0);
  CHECK(n.evidence().empty());
  CHECK_FALSE(n.has_annotation());
}

TEST_CASE("narrative: annotation, fixed atoms and errors") {
  Signature sig = bundled_signature();
  auto n = parse_narrative("horizon 5\nfix !holdsAt(meeting(id1,id2),0)\nholdsAt(meeting(id1,id2),3)\n", sig);
  CHECK(n.fixed().size() == 1);
  CHECK(n.annotated("holdsAt(meeting(id1,id2),3)"));
  CHECK_FALSE(n.annotated("holdsAt(meeting(id1,id2),2)"));
  CHECK_THROWS_AS(parse_narrative("horizon 5\nhappens(walking(id1),7)\n", sig), Error);
  CHECK_THROWS_AS(parse_narrative("happens(walking(id9),1)\n", sig), Error);
  CHECK_THROWS_AS(parse_narrative("happens(walking(id1),1)\n!happens(walking(id1),1)\n", sig), Error);
  CHECK_THROWS_AS(parse_narrative("happens(walking(id1),T)\n", sig), Error);
}

TEST_CASE("narrative serialisation round-trips") {
  Signature sig = bundled_signature();
  std::string text =
      "horizon 12\n"
      "fix holdsAt(meeting(id1,id2),0)\n"
      "happens(active(id1),3)\n"
      "close(id1,id2,25,3)\n"
      "holdsAt(meeting(id1,id2),4)\n";
  auto n = parse_narrative(text, sig);
  auto again = parse_narrative(serialize_narrative(n), sig);
  CHECK(serialize_narrative(again) == serialize_narrative(n));
  CHECK(again.horizon() == 12);
}

TEST_CASE("annotation files in both forms") {
  Signature sig = bundled_signature();
  Narrative a = parse_narrative("horizon 5\n", sig);
  parse_annotation("time,fluent,truth\n3,meeting(id1,id2),true\n4,meeting(id1,id2),false\n", sig, a);
  CHECK(a.annotated("holdsAt(meeting(id1,id2),3)"));
  CHECK_FALSE(a.annotated("holdsAt(meeting(id1,id2),4)"));
  Narrative b = parse_narrative("horizon 5\n", sig);
  parse_annotation("holdsAt(meeting(id1,id2),3)\n", sig, b);
  CHECK(b.annotated("holdsAt(meeting(id1,id2),3)"));
}

TEST_CASE("results csv") {
  MarginalTable t;
  t.atoms.push_back({"meeting(id1,id2)", 4});
  t.probability.push_back(0.75);
  std::string csv = serialize_results(t);
  CHECK(csv == "time,fluent,probability\n4,meeting(id1,id2),0.7500\n");
  MapAssignment m;
  m.atoms.push_back({"meeting(id1,id2)", 4});
  m.truth.push_back(true);
  CHECK(serialize_results(m) == "time,fluent,truth\n4,meeting(id1,id2),true\n");
  CHECK(serialize_results(MarginalTable{}) == "time,fluent,probability\n");

  auto rows = parse_results(csv);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].time == 4);
  CHECK(rows[0].fluent == "meeting(id1,id2)");
  CHECK(rows[0].value == doctest::Approx(0.75));
  CHECK(parse_results(serialize_results(m))[0].value == 1.0);

  auto rec = parse_results("time,fluent,probability,recognised\n4,meeting(id1,id2),0.4000,false\n");
  REQUIRE(rec.size() == 1);
  CHECK(rec[0].fluent == "meeting(id1,id2)");
  CHECK(rec[0].value == doctest::Approx(0.4));
}

TEST_CASE("results are ordered by fluent then time") {
  MarginalTable t;
  t.atoms = {{"moving(id1,id2)", 0}, {"meeting(id1,id2)", 1}, {"meeting(id1,id2)", 0}};
  t.probability = {0.1, 0.2, 0.3};
  CHECK(serialize_results(t) ==
        "time,fluent,probability\n0,meeting(id1,id2),0.3000\n1,meeting(id1,id2),0.2000\n0,moving(id1,id2),0.1000\n");
}

TEST_CASE("disjunction keyword parses and round-trips") {
  auto kb = parse_kb(std::string(kDecls) + "hard !(happens(walking(X),T) v happens(running(X),T)) v happens(active(X),T)\n");
  REQUIRE(kb.rules.size() == 1);
  CHECK(kb.rules[0].formula.op == Formula::Op::Or);
  CHECK(parse_kb(serialize_kb(kb)).same_ast(kb));
}

TEST_CASE("load errors name the file") {
  const std::string path = (std::filesystem::temp_directory_path() / "mlnec_bad_kb.mlnec").string();
  {
    std::ofstream f(path);
    f << "sort p = {a}\nevent w(p))\n";
  }
  try {
    load_kb(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind(path + ":2:", 0) == 0);
    CHECK(e.line() == 2);
  }
  std::filesystem::remove(path);
}
