#include <doctest.h>

#include "mlnec/error.hpp"
#include "mlnec/inference.hpp"
#include "mlnec/network.hpp"
#include "mlnec/recognition.hpp"
#include "support.hpp"

using namespace mlnec;

namespace {

KnowledgeBaseSource bundled() { return parse_kb(read_file(support::source_path("data/meeting_moving.mlnec"))); }

Narrative walkers(const KnowledgeBaseSource& kb, int horizon, std::uint64_t seed) {
  return simulate(R"({"horizon": )" + std::to_string(horizon) + R"(, "fix_initial": true, "walkers": {}})", kb, seed);
}

}  // namespace

TEST_CASE("query atoms are exactly the fluent instances times the time-points") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::SI_h, {}});
  for (int h : {0, 7, 50}) {
    GroundNetwork gn = ground(ckb, walkers(kb, h, 3));
    CHECK(gn.fluents().size() == 8);
    CHECK(gn.atom_count() == 8 * static_cast<std::size_t>(h + 1));
    CHECK(gn.query_count() == gn.atom_count());
  }
}

TEST_CASE("pre-simplification clause count is affine in the horizon") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::SI, {}});
  std::vector<std::size_t> c;
  for (int h : {10, 20, 40}) c.push_back(network_stats(ground(ckb, parse_narrative("horizon " + std::to_string(h), kb.signature))).pre_clause_count);
  CHECK(c[1] > c[0]);
  CHECK((c[1] - c[0]) * 2 == c[2] - c[1]);
}

TEST_CASE("parallel grounding equals the serial reference") {
  auto kb = bundled();
  for (auto v : {InertiaVariant::HI, InertiaVariant::SI, InertiaVariant::SI_eq}) {
    auto ckb = compile(kb, {v, {}});
    Narrative n = walkers(kb, 120, 9);
    CHECK(dump_network(ground(ckb, n)) == dump_network(ground_serial(ckb, n)));
    GroundOptions raw;
    raw.simplify = false;
    CHECK(dump_network(ground(ckb, n, raw)) == dump_network(ground_serial(ckb, n, raw)));
  }
}

TEST_CASE("evidence falsifying a hard clause is reported with its formula") {
  auto kb = parse_kb(read_file(support::source_path("data/meeting_moving.mlnec")) +
                     "hard !(happens(walking(X),T) ^ happens(running(X),T))\n");
  auto ckb = compile(kb);
  Narrative n = parse_narrative("happens(walking(id1),5)\nhappens(running(id1),5)\n", kb.signature);
  try {
    ground(ckb, n);
    FAIL("expected an inconsistency");
  } catch (const InconsistencyError& e) {
    std::string msg = e.what();
    CHECK(msg.find("constraint") != std::string::npos);
    CHECK(msg.find("id1") != std::string::npos);
    CHECK(msg.find(",5)") != std::string::npos);
  }
}

TEST_CASE("instances beyond the horizon are dropped") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::SI, {}});
  GroundNetwork gn = ground(ckb, parse_narrative("horizon 4", kb.signature));
  CHECK(gn.boundary_dropped > 0);
  for (const auto& c : gn.clauses())
    for (int l : c.lits) CHECK(lit_var(l) < static_cast<int>(gn.atom_count()));
  // horizon 0: every formula is an effect or inertia rule over T+1.
  GroundNetwork single = ground(ckb, parse_narrative("", kb.signature));
  CHECK(single.clauses().empty());
  CHECK(single.atom_count() == 8);
}

TEST_CASE("without evidence only inertia clauses survive") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::SI, {}});
  GroundNetwork gn = ground(ckb, parse_narrative("horizon 6", kb.signature));
  CHECK_FALSE(gn.clauses().empty());
  for (const auto& c : gn.clauses()) {
    REQUIRE_FALSE(c.origins.empty());
    for (int o : c.origins) CHECK(is_inertia(ckb.formulas[o].role));
    CHECK(c.lits.size() == 2);
  }
  CHECK(gn.satisfied_removed > 0);
}

TEST_CASE("fixed values become hard unit clauses") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::SI, {}});
  GroundNetwork gn = ground(ckb, parse_narrative("horizon 3\nfix holdsAt(meeting(id1,id2),0)\n", kb.signature));
  int a = gn.find_atom("holdsAt(meeting(id1,id2),0)");
  REQUIRE(a >= 0);
  bool found = false;
  for (const auto& c : gn.clauses())
    if (c.hard && c.lits == std::vector<int>{make_lit(a, true)}) found = true;
  CHECK(found);
}

TEST_CASE("evidence simplification preserves the query marginals") {
  SUBCASE("one-fluent domain, exhaustive") {
    auto kb = parse_kb(support::kGoStopKb);
    std::mt19937_64 rng(5);
    for (auto v : {InertiaVariant::HI, InertiaVariant::SI, InertiaVariant::SI_h}) {
      auto ckb = compile(kb, {v, {}});
      for (int k = 0; k < 5; ++k) {
        Narrative n = support::go_stop_events(rng, kb.signature, 6, 0.3);
        GroundNetwork simple = ground(ckb, n);
        GroundOptions raw;
        raw.simplify = false;
        GroundNetwork full = ground(ckb, n, raw);
        CHECK(full.atom_count() > simple.atom_count());
        auto a = exact_summary(simple, {22});
        auto b = exact_summary(full, {22});
        for (std::size_t i = 0; i < simple.query_count(); ++i) CHECK(a.marginals[i] == doctest::Approx(b.marginals[i]).epsilon(1e-9));
      }
    }
  }
  SUBCASE("meeting/moving, variable elimination") {
    auto kb = bundled();
    auto ckb = compile(kb, {InertiaVariant::SI, {}});
    Narrative n = walkers(kb, 3, 4);
    GroundNetwork simple = ground(ckb, n);
    GroundOptions raw;
    raw.simplify = false;
    GroundNetwork full = ground(ckb, n, raw);
    EliminationOptions o;
    o.max_clique = 26;
    auto a = ve_summary(simple, o);
    auto b = ve_summary(full, o);
    for (std::size_t i = 0; i < simple.query_count(); ++i) CHECK(a.marginals[i] == doctest::Approx(b.marginals[i]).epsilon(1e-9));
  }
}

TEST_CASE("synthetic networks") {
  GroundClause c;
  c.lits = {make_lit(2, true), make_lit(0, false), make_lit(2, true)};
  c.contrib = {{0, 1.0}};
  GroundNetwork gn = make_network(3, {c}, {1.5});
  REQUIRE(gn.clauses().size() == 1);
  CHECK(gn.clauses()[0].lits == std::vector<int>{make_lit(0, false), make_lit(2, true)});
  CHECK(gn.clauses()[0].weight == 1.5);
  World w{1, 0, 1};
  CHECK(gn.score(w) == 1.5);
  CHECK(gn.counts(w) == std::vector<double>{1.0});
  GroundClause taut;
  taut.lits = {make_lit(1, true), make_lit(1, false)};
  taut.hard = true;
  CHECK_THROWS_AS(make_network(3, {taut}, {}), Error);
  GroundClause out_of_range;
  out_of_range.lits = {make_lit(5, true)};
  out_of_range.hard = true;
  CHECK_THROWS_AS(make_network(3, {out_of_range}, {}), Error);
}
