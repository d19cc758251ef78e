// Acceptance gate: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "mlnec/error.hpp"
#include "mlnec/inference.hpp"
#include "mlnec/learning.hpp"
#include "mlnec/recognition.hpp"
#include "support.hpp"

using namespace mlnec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

KnowledgeBaseSource bundled() { return parse_kb(bundled_kb_text()); }

// ---------------------------------------------------------------------------
// 1

Outcome metric_regression() {
  auto moving = metrics_from_counts(4008, 400, 2264);
  auto meeting = metrics_from_counts(3099, 1413, 523);
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-4; };
  bool ok = near(moving.precision, 0.9093) && near(moving.recall, 0.6390) && near(moving.f1, 0.7506) &&
            near(meeting.precision, 0.6868) && near(meeting.recall, 0.8556) && near(meeting.f1, 0.7620);
  std::ostringstream d;
  d << "moving " << fmt("%.4f", moving.precision) << "/" << fmt("%.4f", moving.recall) << "/" << fmt("%.4f", moving.f1)
    << ", meeting " << fmt("%.4f", meeting.precision) << "/" << fmt("%.4f", meeting.recall) << "/"
    << fmt("%.4f", meeting.f1) << " (tol 1e-4)";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 2

Outcome completion_equivalence() {
  std::mt19937_64 rng(20240501);
  int kbs = 0, cases = 0, mismatches = 0;
  for (; kbs < 60; ++kbs) {
    auto rk = support::random_ec_kb(rng);
    for (int h = 1; h <= 3; ++h) {
      Narrative n = support::random_events(rng, rk.kb.signature, h);
      ++cases;
      if (support::axiom_models(rk.kb, n) != support::compiled_models(rk.kb, n)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(kbs) + " KBs, " + std::to_string(cases) + " narratives (|T| 2..4), " +
                               std::to_string(mismatches) + " model-set mismatches"};
}

// ---------------------------------------------------------------------------
// 3

Outcome sampler_fidelity() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    support::NetSpec s;
    s.atoms = std::uniform_int_distribution<std::size_t>(4, 12)(rng);
    s.clauses = s.atoms + std::uniform_int_distribution<std::size_t>(0, s.atoms)(rng);
    GroundNetwork gn = support::random_network(rng, s);
    auto exact = exact_marginals(gn);
    McSatOptions o;
    o.samples = 10000;
    o.seed = derive_seed(303, k);
    auto m = mcsat_marginals(gn, o);
    for (std::size_t i = 0; i < exact.probability.size(); ++i)
      worst = std::max(worst, std::abs(m.probability[i] - exact.probability[i]));
  }
  return {worst <= 0.05, "20 networks, 10000 samples, max |error| " + fmt("%.4f", worst) + " (tol 0.05)"};
}

// ---------------------------------------------------------------------------
// 4

Outcome map_correctness() {
  std::mt19937_64 rng(404);
  int exact_ok = 0, ls_ok = 0;
  for (int k = 0; k < 100; ++k) {
    support::NetSpec s;
    s.atoms = std::uniform_int_distribution<std::size_t>(2, 16)(rng);
    s.clauses = s.atoms + std::uniform_int_distribution<std::size_t>(0, s.atoms)(rng);
    GroundNetwork gn = support::random_network(rng, s);
    auto b = support::brute_force(gn);
    auto m = map_exact(gn);
    World w(m.truth.begin(), m.truth.end());
    double tol = 1e-9 * std::max(1.0, std::abs(b.best_score));
    bool unique = b.best_score - b.second_score > 1e-7;
    if (m.hard_ok && std::abs(m.score - b.best_score) <= tol && (!unique || w == b.best)) ++exact_ok;
    LocalSearchOptions lo;
    lo.seed = derive_seed(404, k);
    auto l = map_localsearch(gn, lo);
    if (l.hard_ok && std::abs(l.score - b.best_score) <= tol) ++ls_ok;
  }
  return {exact_ok == 100 && ls_ok >= 95,
          "map_exact optimal on " + std::to_string(exact_ok) + "/100, local search on " + std::to_string(ls_ok) +
              "/100 (need 100 and 95)"};
}

// ---------------------------------------------------------------------------
// 5

std::vector<double> series(InertiaVariant v, double w, bool initially, int horizon) {
  auto kb = bundled();
  CompiledKB ckb = compile(kb, {v, {}});
  set_inertia_weight(ckb, w);
  std::string scenario = R"({"horizon": )" + std::to_string(horizon) + R"(, "fix_initial": true, "initially": )" +
                         (initially ? R"json(["meeting(id1,id2)"])json" : "[]") + "}";
  Narrative n = simulate(scenario, kb);
  RecognizeOptions o;
  o.engine = Engine::Exact;
  o.exact_cap = 24;
  std::vector<double> out;
  for (const auto& p : fluent_series(ckb, n, "meeting(id1,id2)", o)) out.push_back(p.probability);
  return out;
}

Outcome inertia_dynamics() {
  const int h = 19;  // |T| = 20
  const std::vector<double> weights{0.5, 1.0, 2.0};
  std::ostringstream d;
  bool ok = true;

  for (bool start : {true, false}) {
    std::vector<std::vector<double>> s;
    for (double w : weights) s.push_back(series(InertiaVariant::SI_eq, w, start, h));
    bool monotone = true, band = true, order = true;
    for (std::size_t k = 0; k < s.size(); ++k) {
      // Largest move against the expected direction, from the running extreme.
      double extreme = s[k][0], worst = 0.0;
      int at = 0;
      for (int t = 1; t <= h; ++t) {
        extreme = start ? std::min(extreme, s[k][t]) : std::max(extreme, s[k][t]);
        double back = start ? s[k][t] - extreme : extreme - s[k][t];
        if (back > worst) worst = back, at = t;
      }
      if (worst > 1e-9) {
        d << " [" << (start ? "a" : "b") << "] w=" << weights[k] << " moves back by " << fmt("%.4f", worst)
          << " by t=" << at << ";";
        monotone = false;
      }
      band = band && std::abs(s[k][h] - 0.5) <= 0.05;
    }
    bool strict = false;
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
      for (int t = 1; t <= h; ++t) {
        double weak = std::abs(s[k][t] - 0.5), strong = std::abs(s[k + 1][t] - 0.5);
        if (weak > strong + 1e-12) order = false;
        if (weak < strong - 1e-12) strict = true;
      }
    order = order && strict;
    d << " (" << (start ? "a" : "b") << ") " << (start ? "non-increasing " : "non-decreasing ") << (monotone ? "yes" : "NO")
      << ", P(" << h << ")=";
    for (std::size_t k = 0; k < s.size(); ++k) d << (k ? "/" : "") << fmt("%.4f", s[k][h]);
    d << (band ? " within 0.05" : " OUTSIDE 0.05") << ", weaker faster " << (order ? "yes" : "NO") << ";";
    ok = ok && monotone && band && order;
  }

  auto sih = series(InertiaVariant::SI_h, 1.0, true, h);
  int below = -1;
  for (int t = 0; t < h && below < 0; ++t)
    if (sih[t] < 0.5) below = t;
  d << " (c) SI_h below 0.5 from t=" << below << ";";
  ok = ok && below >= 0;

  auto kb = bundled();
  CompiledKB hi = compile(kb, {InertiaVariant::HI, {}});
  RecognizeOptions o;
  auto fig = fluent_series(hi, simulate(preset_scenario("fig1"), kb), "meeting(id1,id2)", o);
  auto range = [&](int a, int b) {
    double lo = 1.0, hi_ = 0.0;
    for (int t = a; t <= b; ++t) {
      lo = std::min(lo, fig[t].probability);
      hi_ = std::max(hi_, fig[t].probability);
    }
    return std::make_pair(lo, hi_);
  };
  auto [c_lo, c_hi] = range(4, 10);
  auto [m_lo, m_hi] = range(11, 20);
  auto [t_lo, t_hi] = range(21, 30);
  bool d_ok = c_hi - c_lo <= 1e-9 && m_lo > c_hi && t_hi < m_lo && t_hi < c_lo && t_lo > 0.0;
  d << " (d) HI fig1 " << fmt("%.4f", c_lo) << " on [4,10], " << fmt("%.4f", m_lo) << " on [11,20], "
    << fmt("%.4f", t_lo) << " on [21,30] " << (d_ok ? "ok" : "NOT OK");
  ok = ok && d_ok;
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 6

Outcome gradient_check() {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  LearnOptions o;
  o.engine = GradientEngine::Exact;
  for (int k = 0; k < 10; ++k) {
    support::NetSpec s;
    s.atoms = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    s.clauses = s.atoms + 4;
    World planted;
    GroundNetwork gn = support::random_network(rng, s, &planted);
    TrainingInstance t{gn, planted, gn.counts(planted), "net"};
    std::vector<double> w = gn.weights();
    auto g = cll_gradient(t, w, o);
    const double h = 1e-5;
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto up = w, down = w;
      up[j] += h;
      down[j] -= h;
      double fd = (negative_cll(t, up, o) - negative_cll(t, down, o)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g.gradient[j]));
    }
  }
  return {worst <= 1e-4, "10 networks, max |analytic - central difference| " + fmt("%.2e", worst) + " (tol 1e-4)"};
}

// ---------------------------------------------------------------------------
// 7

Outcome learning_recovery() {
  std::ostringstream d;
  // Diagonal Newton on narratives sampled from a known model.
  auto kb = parse_kb(support::kGoStopKb);
  CompiledKB ckb = compile(kb, {InertiaVariant::SI, {}});
  const std::vector<double> truth{1.5, 2.0, 1.0, 2.5};
  if (ckb.slot_count() != truth.size()) return {false, "unexpected slot count"};
  ckb.set_weights(truth);
  ckb.weights = truth;
  std::mt19937_64 rng(707);
  std::vector<TrainingInstance> data;
  for (int k = 0; k < 200; ++k) {
    Narrative n = support::go_stop_events(rng, kb.signature, 7, 0.2);
    GroundNetwork gn = ground(ckb, n);
    gn.set_weights(truth);
    support::sample_annotation(rng, gn, kb.signature, n);
    data.push_back(make_instance(std::move(gn), n));
  }
  LearnOptions lo;
  lo.engine = GradientEngine::Exact;
  const double nll_true = negative_cll(data, truth, lo);
  std::vector<double> w(truth.size(), 0.0);
  double nll = negative_cll(data, w, lo);
  int epochs = 0;
  for (; epochs < 100; ++epochs) {
    auto r = diagonal_newton_epoch(data, w, lo);
    w = r.weights;
    double next = *r.neg_cll_after;
    bool done = nll - next <= 1e-10 * std::max(1.0, nll);
    nll = next;
    if (done) break;
  }
  double rel = std::abs(nll - nll_true) / nll_true;
  bool dn_ok = rel <= 0.02;
  d << "DN: 200 narratives, NLL " << fmt("%.3f", nll) << " vs generator " << fmt("%.3f", nll_true) << " (rel "
    << fmt("%.4f", rel) << ", tol 0.02) after " << epochs + 1 << " epochs, w=";
  for (std::size_t j = 0; j < w.size(); ++j) d << (j ? "/" : "") << fmt("%.2f", w[j]);
  d << ";";

  // Perceptron on crisp walker narratives.
  auto mm = bundled();
  CompiledKB hi = compile(mm, {InertiaVariant::HI, {}}, true, 0.0);
  std::vector<TrainingInstance> suite;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Narrative n = simulate(R"({"horizon": 60, "fix_initial": true, "annotation": true, "walkers": {}})", mm, seed);
    suite.push_back(make_instance(ground(hi, n), n));
  }
  PerceptronState state(std::vector<double>(hi.slot_count(), 0.0));
  double f1 = 0.0;
  int pe = 0;
  for (; pe < 20 && f1 < 1.0; ++pe) {
    auto avg = perceptron_epoch(suite, state);
    MetricsReport total;
    for (auto& inst : suite) {
      inst.network.set_weights(avg);
      auto m = map_auto(inst.network);
      std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (std::size_t i = 0; i < m.truth.size(); ++i) {
        bool obs = inst.observed[i] != 0;
        tp += m.truth[i] && obs;
        fp += m.truth[i] && !obs;
        fn += !m.truth[i] && obs;
        tn += !m.truth[i] && !obs;
      }
      total += metrics_from_counts(tp, fp, fn, tn);
    }
    f1 = total.f1;
  }
  bool p_ok = f1 >= 0.95;
  d << " perceptron: 10 walker narratives, training F1 " << fmt("%.4f", f1) << " after " << pe << " epochs (need 0.95)";
  return {dn_ok && p_ok, d.str()};
}

// ---------------------------------------------------------------------------
// 8

CompiledKB sigma_only(const KnowledgeBaseSource& kb) {
  CompiledKB c = compile(kb, {InertiaVariant::HI, {}});
  std::vector<CompiledFormula> keep;
  for (auto& f : c.formulas)
    if (!is_inertia(f.role)) keep.push_back(std::move(f));
  c.formulas = std::move(keep);
  c.assign_slots();
  return c;
}

std::vector<double> learn_dn(const CompiledKB& ckb, const std::vector<Narrative>& suite, int epochs) {
  std::vector<TrainingInstance> data;
  for (const auto& n : suite) data.push_back(make_instance(ground(ckb, n), n));
  std::vector<double> w = ckb.weights;
  for (int e = 0; e < epochs; ++e) w = diagonal_newton_epoch(data, w).weights;
  return w;
}

MetricsReport suite_f1(const CompiledKB& ckb, const std::vector<Narrative>& narratives, const std::vector<Narrative>& truth) {
  MetricsReport total;
  RecognizeOptions o;
  for (std::size_t i = 0; i < narratives.size(); ++i) total += metrics(recognize(ckb, narratives[i], o), truth[i]);
  return total;
}

struct Drops {
  double original = 0.0;
  std::vector<double> drop;  // per length, mean over repetitions
};

Drops ablation_drops(const CompiledKB& ckb, const std::vector<Narrative>& suite, const AblationSpec& base) {
  Drops d;
  d.original = suite_f1(ckb, suite, suite).f1;
  // Ablated copies per narrative, indexed [narrative][rep * lengths + length].
  std::vector<std::vector<AblatedNarrative>> abl;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    AblationSpec s = base;
    s.seed = derive_seed(base.seed, i);
    abl.push_back(ablate(suite[i], s));
  }
  for (std::size_t li = 0; li < base.lengths.size(); ++li) {
    double sum = 0.0;
    for (int rep = 0; rep < base.repetitions; ++rep) {
      std::vector<Narrative> degraded;
      for (auto& per : abl) degraded.push_back(per[rep * base.lengths.size() + li].narrative);
      sum += suite_f1(ckb, degraded, suite).f1;
    }
    d.drop.push_back(d.original - sum / base.repetitions);
  }
  return d;
}

Outcome ablation_robustness() {
  auto kb = bundled();
  std::vector<Narrative> suite;
  for (std::uint64_t seed = 1; seed <= 8; ++seed)
    suite.push_back(simulate(R"({"horizon": 150, "fix_initial": true, "annotation": true, "walkers": {}})", kb, seed));
  AblationSpec spec;  // p = 0.01, L in {10, 20}, 5 repetitions
  spec.seed = 808;

  CompiledKB sih = compile(kb, {InertiaVariant::SI_h, {}});
  sih.set_weights(learn_dn(sih, suite, 10));
  CompiledKB hi = compile(kb, {InertiaVariant::HI, {}});
  hi.set_weights(learn_dn(hi, suite, 10));
  CompiledKB ctl = sigma_only(kb);
  ctl.set_weights(learn_dn(ctl, suite, 10));

  Drops a = ablation_drops(sih, suite, spec);
  Drops b = ablation_drops(hi, suite, spec);
  Drops c = ablation_drops(ctl, suite, spec);
  std::ostringstream d;
  bool ok = true;
  auto show = [&](const char* name, const Drops& x) {
    d << " " << name << " F1 " << fmt("%.4f", x.original) << " drop";
    for (std::size_t i = 0; i < x.drop.size(); ++i) d << " L" << spec.lengths[i] << "=" << fmt("%.4f", x.drop[i]);
    d << ";";
  };
  show("SI_h", a);
  show("HI", b);
  show("Sigma-only", c);
  for (std::size_t i = 0; i < spec.lengths.size(); ++i) {
    ok = ok && a.drop[i] <= 0.15;
    ok = ok && b.drop[i] <= c.drop[i];
  }
  d << " (need SI_h drop <= 0.15 and HI drop <= control drop per length)";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 9

Outcome grounding_economics() {
  auto kb = bundled();
  CompiledKB ckb = compile(kb, {InertiaVariant::SI, {}});
  std::vector<std::size_t> pre, atoms;
  const std::vector<int> sizes{10, 20, 40};
  for (int n : sizes) {
    GroundNetwork gn = ground(ckb, simulate(R"({"horizon": )" + std::to_string(n - 1) + R"(, "walkers": {}})", kb, 9));
    pre.push_back(network_stats(gn).pre_clause_count);
    atoms.push_back(gn.atom_count());
  }
  const std::size_t fluents = kb.signature.domain_size(kFluentSort);
  bool affine = (pre[1] - pre[0]) * 2 == pre[2] - pre[1];
  bool reduced = true;
  for (std::size_t i = 0; i < sizes.size(); ++i) reduced = reduced && atoms[i] == fluents * sizes[i];
  std::ostringstream d;
  d << "pre-simplification clauses " << pre[0] << "/" << pre[1] << "/" << pre[2] << " at |T|=10/20/40 (slope "
    << (pre[1] - pre[0]) / 10.0 << " and " << (pre[2] - pre[1]) / 20.0 << "), unknown atoms " << atoms[0] << "/"
    << atoms[1] << "/" << atoms[2] << " = " << fluents << "*|T|";
  return {affine && reduced, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric regression", metric_regression},
      {"completion equivalence", completion_equivalence},
      {"sampler fidelity", sampler_fidelity},
      {"MAP correctness", map_correctness},
      {"inertia dynamics", inertia_dynamics},
      {"gradient check", gradient_check},
      {"learning recovery", learning_recovery},
      {"robustness under ablation", ablation_robustness},
      {"grounding economics", grounding_economics},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    o.detail.erase(0, o.detail.find_first_not_of(' '));
    std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
