#pragma once

// Shared generators and brute-force oracles for the test suites.

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mlnec/compiler.hpp"
#include "mlnec/inference.hpp"
#include "mlnec/kb.hpp"
#include "mlnec/learning.hpp"
#include "mlnec/narrative.hpp"
#include "mlnec/network.hpp"
#include "mlnec/recognition.hpp"

namespace support {

using namespace mlnec;

inline std::string source_path(const std::string& rel) { return std::string(MLNEC_SOURCE_DIR) + "/" + rel; }

// ---------------------------------------------------------------------------
// Random ground networks

struct NetSpec {
  std::size_t atoms = 8;
  std::size_t clauses = 12;
  double hard_fraction = 0.15;
  std::size_t slots = 4;
  std::size_t max_len = 3;
  double weight_scale = 1.0;
};

/// Random clauses over a planted world; HARD clauses are satisfied by it, so
/// the network is always feasible. Returns the planted world through `plant`.
inline GroundNetwork random_network(std::mt19937_64& rng, const NetSpec& s, World* plant = nullptr) {
  std::uniform_int_distribution<std::size_t> pick_atom(0, s.atoms - 1);
  std::uniform_int_distribution<std::size_t> pick_len(1, std::min(s.max_len, s.atoms));
  std::uniform_int_distribution<int> pick_slot(0, static_cast<int>(s.slots) - 1);
  std::bernoulli_distribution coin(0.5), hard(s.hard_fraction);
  std::normal_distribution<double> weight(0.0, s.weight_scale);
  World planted(s.atoms);
  for (auto& x : planted) x = coin(rng);
  std::vector<GroundClause> cl;
  for (std::size_t k = 0; k < s.clauses; ++k) {
    std::set<std::size_t> vars;
    std::size_t len = pick_len(rng);
    while (vars.size() < len) vars.insert(pick_atom(rng));
    GroundClause c;
    for (auto v : vars) c.lits.push_back(make_lit(static_cast<int>(v), coin(rng)));
    c.hard = hard(rng);
    if (c.hard && !c.satisfied(planted)) c.lits[0] = -c.lits[0];
    if (!c.hard) c.contrib.push_back({pick_slot(rng), 1.0});
    cl.push_back(std::move(c));
  }
  // Every atom takes part in at least one clause.
  for (std::size_t v = 0; v < s.atoms; ++v) {
    GroundClause c;
    c.lits.push_back(make_lit(static_cast<int>(v), coin(rng)));
    c.contrib.push_back({pick_slot(rng), 0.5});
    cl.push_back(std::move(c));
  }
  std::vector<double> w(s.slots);
  for (auto& x : w) x = weight(rng);
  if (plant) *plant = planted;
  return make_network(s.atoms, std::move(cl), std::move(w));
}

struct Brute {
  bool feasible = false;
  double log_z = -std::numeric_limits<double>::infinity();
  std::vector<double> marginals;
  std::vector<double> expected_counts;
  double best_score = -std::numeric_limits<double>::infinity();
  double second_score = -std::numeric_limits<double>::infinity();
  World best;
};

inline bool clause_sat(const GroundClause& c, std::uint64_t x) {
  for (int l : c.lits)
    if ((((x >> lit_var(l)) & 1U) != 0) == (l > 0)) return true;
  return false;
}

/// Exhaustive enumeration straight from the clause list.
inline Brute brute_force(const GroundNetwork& gn) {
  const std::size_t n = gn.atom_count();
  Brute b;
  b.marginals.assign(n, 0.0);
  b.expected_counts.assign(gn.slot_count(), 0.0);
  std::vector<double> scores;
  std::vector<std::uint64_t> feasible;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    bool ok = true;
    double s = 0.0;
    for (const auto& c : gn.clauses()) {
      bool sat = clause_sat(c, x);
      if (c.hard && !sat) {
        ok = false;
        break;
      }
      if (!c.hard && sat)
        for (const auto& k : c.contrib) s += k.coeff * gn.weights()[k.slot];
    }
    if (!ok) continue;
    scores.push_back(s);
    feasible.push_back(x);
  }
  if (feasible.empty()) return b;
  b.feasible = true;
  double m = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    double p = std::exp(scores[i] - m);
    z += p;
    for (std::size_t v = 0; v < n; ++v)
      if ((feasible[i] >> v) & 1U) b.marginals[v] += p;
    for (const auto& c : gn.clauses())
      if (!c.hard && clause_sat(c, feasible[i]))
        for (const auto& k : c.contrib) b.expected_counts[k.slot] += p * k.coeff;
  }
  for (auto& v : b.marginals) v /= z;
  for (auto& v : b.expected_counts) v /= z;
  b.log_z = m + std::log(z);
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    if (scores[i] > b.best_score) {
      b.second_score = b.best_score;
      b.best_score = scores[i];
      b.best.assign(n, 0);
      for (std::size_t v = 0; v < n; ++v) b.best[v] = (feasible[i] >> v) & 1U;
    } else if (scores[i] > b.second_score) {
      b.second_score = scores[i];
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Random single-fluent KBs for the completion equivalence property

struct RandomKb {
  std::string text;
  KnowledgeBaseSource kb;
};

inline RandomKb random_ec_kb(std::mt19937_64& rng) {
  const char* events[] = {"e1", "e2", "e3"};
  std::uniform_int_distribution<int> n_rules(0, 3), pick_event(0, 2), body_len(1, 2), pick_kind(0, 3);
  std::bernoulli_distribution coin(0.5);
  std::string t =
      "sort obj = {o}\n"
      "event e1(obj)\nevent e2(obj)\nevent e3(obj)\n"
      "fluent f(obj)\n";
  auto body = [&]() {
    std::string b;
    int len = body_len(rng);
    for (int i = 0; i < len; ++i) {
      if (!b.empty()) b += " ^ ";
      if (pick_kind(rng) == 0)
        b += std::string(coin(rng) ? "" : "!") + "holdsAt(f(X),T)";
      else
        b += std::string(coin(rng) ? "" : "!") + "happens(" + events[pick_event(rng)] + "(X),T)";
    }
    return b;
  };
  int ni = n_rules(rng), nt = n_rules(rng);
  for (int i = 0; i < ni; ++i) t += "initiatedAt(f(X),T) :- " + body() + "\n";
  for (int i = 0; i < nt; ++i) t += "terminatedAt(f(X),T) :- " + body() + "\n";
  return {t, parse_kb(t)};
}

inline Narrative random_events(std::mt19937_64& rng, const Signature& sig, int horizon) {
  std::bernoulli_distribution coin(0.5);
  std::string text = "horizon " + std::to_string(horizon) + "\n";
  for (int t = 0; t <= horizon; ++t)
    for (const char* e : {"e1", "e2", "e3"})
      if (coin(rng)) text += std::string("happens(") + e + "(o)," + std::to_string(t) + ")\n";
  return parse_narrative(text, sig);
}

/// Holds-at valuations (bit t = holdsAt(f(o),t)) admitted by the four axioms,
/// the rules and the completion equivalences, evaluated directly on the
/// source rules.
inline std::set<std::uint64_t> axiom_models(const KnowledgeBaseSource& kb, const Narrative& n) {
  const int h = n.horizon();
  Signature sig = kb.signature;
  sig.set_horizon(h);
  std::vector<Formula> init, term;
  for (const auto& r : kb.rules) (r.kind == RuleKind::Initiation ? init : term).push_back(r.body());
  std::set<std::uint64_t> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << (h + 1)); ++x) {
    auto holds = [&](int t) { return ((x >> t) & 1U) != 0; };
    auto truth = [&](const Atom& a) {
      if (a.predicate == kHoldsAt) return holds(a.args[1].value);
      return n.evidence_true(a.str());
    };
    auto any = [&](const std::vector<Formula>& bodies, int t) {
      Binding b{{"X", Term::constant("o")}, {"T", Term::time(t)}};
      for (const auto& body : bodies)
        if (evaluate(*substitute(body, b, sig), truth)) return true;
      return false;
    };
    bool ok = true;
    for (int t = 0; t < h && ok; ++t) {
      bool ini = any(init, t), ter = any(term, t);
      bool now = holds(t), next = holds(t + 1);
      if (ini && !next) ok = false;                    // (1)
      if (now && !ter && !next) ok = false;            // (2)
      if (ter && next) ok = false;                     // (3)
      if (!now && !ini && next) ok = false;            // (4)
    }
    if (ok) out.insert(x);
  }
  return out;
}

/// Valuations admitted by the all-HARD compiled network.
inline std::set<std::uint64_t> compiled_models(const KnowledgeBaseSource& kb, const Narrative& n) {
  CompiledKB ckb = compile(kb, InertiaPolicy{InertiaVariant::HI, {}}, false);
  GroundNetwork gn = ground(ckb, n);
  std::set<std::uint64_t> out;
  const int h = n.horizon();
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << (h + 1)); ++x) {
    World w(gn.atom_count(), 0);
    for (int t = 0; t <= h; ++t) w[gn.atom_index(0, t)] = (x >> t) & 1U;
    if (gn.hard_ok(w)) out.insert(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// A one-fluent go/stop domain for learning tests

inline const char* kGoStopKb =
    "sort obj = {o}\n"
    "event go(obj)\n"
    "event stop(obj)\n"
    "fluent f(obj)\n"
    "initiatedAt(f(X),T) :- happens(go(X),T)\n"
    "terminatedAt(f(X),T) :- happens(stop(X),T)\n";

inline Narrative go_stop_events(std::mt19937_64& rng, const Signature& sig, int horizon, double p) {
  std::bernoulli_distribution ev(p);
  std::string text = "horizon " + std::to_string(horizon) + "\n";
  for (int t = 0; t <= horizon; ++t) {
    if (ev(rng)) text += "happens(go(o)," + std::to_string(t) + ")\n";
    if (ev(rng)) text += "happens(stop(o)," + std::to_string(t) + ")\n";
  }
  return parse_narrative(text, sig);
}

/// Draw the query atoms of a small network exactly from its distribution and
/// store them as the narrative's annotation.
inline void sample_annotation(std::mt19937_64& rng, const GroundNetwork& gn, const Signature& sig, Narrative& n) {
  const std::size_t m = gn.atom_count();
  std::vector<double> p;
  std::vector<std::uint64_t> xs;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << m); ++x) {
    bool ok = true;
    double s = 0.0;
    for (const auto& c : gn.clauses()) {
      bool sat = clause_sat(c, x);
      if (c.hard && !sat) ok = false;
      if (!c.hard && sat) s += c.weight;
    }
    if (!ok) continue;
    p.push_back(std::exp(s));
    xs.push_back(x);
  }
  std::discrete_distribution<std::size_t> d(p.begin(), p.end());
  std::uint64_t x = xs[d(rng)];
  n.clear_annotation();
  std::string text;
  for (std::size_t i = 0; i < gn.query_count(); ++i)
    text += std::string((x >> i) & 1U ? "" : "!") + gn.atom_name(i) + "\n";
  parse_annotation(text, sig, n);
}

}  // namespace support
