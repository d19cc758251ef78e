// CLL gradients, diagonal Newton and averaged MAP perceptron.

#include "mlnec/learning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlnec/error.hpp"

namespace mlnec {

namespace {

std::size_t largest_component(const GroundNetwork& gn) {
  std::size_t m = 0;
  for (const auto& c : components(gn)) m = std::max(m, c.vars.size());
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string clause_text(const GroundNetwork& gn, const GroundClause& c) {
  std::string s;
  for (int l : c.lits) {
    if (!s.empty()) s += " v ";
    if (!lit_positive(l)) s += "!";
    s += gn.atom_name(lit_var(l));
  }
  return s;
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw NumericError(std::string(what) + " is not finite at slot " + std::to_string(i));
}

GradientEngine resolve(const GroundNetwork& gn, const LearnOptions& o) {
  if (o.engine != GradientEngine::Auto) return o.engine;
  if (largest_component(gn) <= o.exact_cap) return GradientEngine::Exact;
  if (elimination_width(gn) <= o.max_clique) return GradientEngine::Elimination;
  return GradientEngine::McSat;
}

ExactSummary exact_or_ve(const GroundNetwork& gn, GradientEngine e, const LearnOptions& o, bool variances) {
  if (e == GradientEngine::Exact) return exact_summary(gn, {o.exact_cap});
  EliminationOptions eo;
  eo.max_clique = o.max_clique;
  eo.variances = variances;
  return ve_summary(gn, eo);
}

}  // namespace

TrainingInstance make_instance(GroundNetwork network, const Narrative& narrative, std::string name) {
  TrainingInstance inst;
  inst.name = std::move(name);
  World obs(network.atom_count(), 0);
  for (std::size_t i = 0; i < network.atom_count(); ++i) {
    const std::string& key = network.atom_name(i);
    obs[i] = i < network.query_count() ? narrative.annotated(key) : narrative.evidence_true(key);
  }
  if (!network.hard_ok(obs)) {
    std::ostringstream msg;
    msg << "annotation of " << (inst.name.empty() ? "narrative" : inst.name) << " violates HARD clauses:";
    int shown = 0;
    for (const auto& c : network.clauses()) {
      if (!c.hard || c.satisfied(obs)) continue;
      if (shown++ == 5) {
        msg << " ...";
        break;
      }
      msg << " [" << clause_text(network, c) << " from "
          << (c.origins.empty() ? std::string("?") : network.formula_names()[c.origins.front()]) << "]";
    }
    throw InconsistencyError(msg.str());
  }
  inst.counts_observed = network.counts(obs);
  inst.observed = std::move(obs);
  inst.network = std::move(network);
  return inst;
}

GradientResult cll_gradient(TrainingInstance& inst, const std::vector<double>& w, const LearnOptions& options) {
  GroundNetwork& gn = inst.network;
  gn.set_weights(w);
  GradientResult r;
  GradientEngine e = resolve(gn, options);
  if (e == GradientEngine::McSat) {
    McSatOptions mo = options.mcsat;
    mo.keep_counts = true;
    McSatResult s = mcsat(gn, mo);
    r.expected = std::move(s.mean_counts);
    r.variance = std::move(s.count_variance);
    r.sample_counts = std::move(s.sample_counts);
    r.engine = "mcsat";
  } else {
    ExactSummary s = exact_or_ve(gn, e, options, true);
    r.expected = std::move(s.expected_counts);
    r.variance = std::move(s.count_variance);
    r.neg_cll = s.log_z - dot(w, inst.counts_observed);
    r.engine = e == GradientEngine::Exact ? "exact" : "elimination";
  }
  r.gradient.resize(r.expected.size());
  for (std::size_t j = 0; j < r.expected.size(); ++j) r.gradient[j] = r.expected[j] - inst.counts_observed[j];
  return r;
}

double negative_cll(TrainingInstance& inst, const std::vector<double>& w, const LearnOptions& options) {
  GroundNetwork& gn = inst.network;
  gn.set_weights(w);
  GradientEngine e = resolve(gn, options);
  if (e == GradientEngine::McSat)
    throw CapacityError("network of " + (inst.name.empty() ? std::string("instance") : inst.name) +
                        " is too large for an exact negative CLL");
  return exact_or_ve(gn, e, options, false).log_z - dot(w, inst.counts_observed);
}

double negative_cll(std::vector<TrainingInstance>& instances, const std::vector<double>& w,
                    const LearnOptions& options) {
  std::vector<double> parts(instances.size(), 0.0);
  const long n = static_cast<long>(instances.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (long i = 0; i < n; ++i) parts[i] = negative_cll(instances[i], w, options);
  double s = 0.0;
  for (double p : parts) s += p;
  return s;
}

EpochReport diagonal_newton_epoch(std::vector<TrainingInstance>& instances, const std::vector<double>& w,
                                  const LearnOptions& options) {
  if (instances.empty()) throw Error("diagonal Newton needs at least one training instance");
  const std::size_t k = w.size();
  std::vector<GradientResult> parts(instances.size());
  std::vector<std::string> errors(instances.size());
  const long n = static_cast<long>(instances.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (long i = 0; i < n; ++i) {
    try {
      parts[i] = cll_gradient(instances[i], w, options);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw Error("instance " + std::to_string(i) + ": " + errors[i]);

  EpochReport rep;
  rep.gradient.assign(k, 0.0);
  std::vector<double> hess(k, 0.0);
  bool all_exact = true;
  double before = 0.0;
  for (const auto& p : parts) {
    for (std::size_t j = 0; j < k; ++j) {
      rep.gradient[j] += p.gradient[j];
      hess[j] += p.variance[j];
    }
    if (p.neg_cll)
      before += *p.neg_cll;
    else
      all_exact = false;
  }
  check_finite(rep.gradient, "gradient");
  check_finite(hess, "count variance");
  std::vector<double> delta(k);
  for (std::size_t j = 0; j < k; ++j) delta[j] = -rep.gradient[j] / (hess[j] + options.lambda);
  check_finite(delta, "Newton step");
  if (all_exact) rep.neg_cll_before = before;

  auto candidate = [&](double a) {
    std::vector<double> c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = w[j] + a * delta[j];
    return c;
  };
  // Change in negative CLL at step a: exact where available, otherwise the
  // importance estimate log mean exp(a*delta.n_s) - a*delta.n(observed).
  std::vector<double> before_i(instances.size(), 0.0);
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i].neg_cll) before_i[i] = *parts[i].neg_cll;
  auto change = [&](double a) {
    std::vector<double> c = candidate(a);
    std::vector<double> d(instances.size(), 0.0);
#pragma omp parallel for schedule(dynamic) if (options.parallel)
    for (long i = 0; i < n; ++i) {
      if (parts[i].neg_cll) {
        d[i] = negative_cll(instances[i], c, options) - before_i[i];
        continue;
      }
      const auto& samples = parts[i].sample_counts;
      if (samples.empty()) continue;
      double m = -std::numeric_limits<double>::infinity();
      std::vector<double> e(samples.size());
      for (std::size_t s = 0; s < samples.size(); ++s) {
        e[s] = a * dot(delta, samples[s]);
        m = std::max(m, e[s]);
      }
      double acc = 0.0;
      for (double x : e) acc += std::exp(x - m);
      d[i] = m + std::log(acc / static_cast<double>(samples.size())) - a * dot(delta, instances[i].counts_observed);
    }
    double s = 0.0;
    for (double x : d) s += x;
    return s;
  };

  bool zero = std::all_of(delta.begin(), delta.end(), [](double x) { return x == 0.0; });
  double a = 1.0;
  if (!zero) {
    std::size_t tries = 0;
    double d = change(a);
    while (!(d <= 1e-12 * std::max(1.0, std::abs(before))) && tries < options.max_backtracks) {
      a *= 0.5;
      d = change(a);
      ++tries;
    }
    if (!std::isfinite(d)) throw NumericError("negative CLL is not finite after the Newton step");
    if (!(d <= 1e-12 * std::max(1.0, std::abs(before)))) a = 0.0;
    if (all_exact) rep.neg_cll_after = a == 0.0 ? before : before + d;
  } else if (all_exact) {
    rep.neg_cll_after = before;
  }
  rep.step = a;
  rep.weights = candidate(a);
  check_finite(rep.weights, "updated weights");
  // Leave the networks at the returned weights.
  for (auto& inst : instances) inst.network.set_weights(rep.weights);
  return rep;
}

PerceptronState::PerceptronState(std::vector<double> w) : weights(std::move(w)), sum(weights.size(), 0.0) {}

std::vector<double> PerceptronState::averaged() const {
  if (steps == 0) return weights;
  std::vector<double> a(sum.size());
  for (std::size_t j = 0; j < sum.size(); ++j) a[j] = sum[j] / static_cast<double>(steps);
  return a;
}

MapAssignment map_auto(const GroundNetwork& gn, const LearnOptions& options) {
  if (largest_component(gn) <= options.map_cap) return map_exact(gn, options.map_cap);
  if (elimination_width(gn) <= options.max_clique) {
    EliminationOptions eo;
    eo.max_clique = options.max_clique;
    return ve_map(gn, eo);
  }
  return map_localsearch(gn, options.localsearch);
}

std::vector<double> perceptron_epoch(std::vector<TrainingInstance>& instances, PerceptronState& state,
                                     const LearnOptions& options) {
  if (instances.empty()) throw Error("the perceptron needs at least one training instance");
  const double eta = options.learning_rate;
  for (auto& inst : instances) {
    GroundNetwork& gn = inst.network;
    gn.set_weights(state.weights);
    MapAssignment map = map_auto(gn, options);
    // Rebuild the full world: MAP records cover query atoms only.
    World world = inst.observed;
    for (std::size_t i = 0; i < map.truth.size(); ++i) world[i] = map.truth[i] ? 1 : 0;
    std::vector<double> n_map = gn.counts(world);
    for (std::size_t j = 0; j < state.weights.size(); ++j)
      state.weights[j] += eta * (inst.counts_observed[j] - n_map[j]);
    check_finite(state.weights, "perceptron weights");
    for (std::size_t j = 0; j < state.weights.size(); ++j) state.sum[j] += state.weights[j];
    ++state.steps;
  }
  return state.averaged();
}

}  // namespace mlnec
