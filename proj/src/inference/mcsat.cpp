// MC-SAT: slice sampling over clause subsets with SampleSAT as the
// near-uniform sampler of satisfying assignments.

#include <cmath>
#include <random>

#include "mlnec/error.hpp"
#include "mlnec/inference.hpp"

namespace mlnec {

namespace {

class SampleSat {
 public:
  SampleSat(std::size_t n, const McSatOptions& opt, std::mt19937_64& rng) : n_(n), opt_(opt), rng_(rng), occ_(n) {}

  void clear() {
    starts_.assign(1, 0);
    lits_.clear();
    for (auto& o : occ_) o.clear();
  }

  void add(const std::vector<int>& clause) {
    int c = static_cast<int>(starts_.size()) - 1;
    for (int l : clause) {
      lits_.push_back(l);
      occ_[lit_var(l)].emplace_back(c, l);
    }
    starts_.push_back(lits_.size());
  }

  void add_unit(int lit) { add(std::vector<int>{lit}); }

  // Draw a satisfying state starting from one that already satisfies the set.
  void sample(World& state) {
    const std::size_t m = starts_.size() - 1;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> constrained;
    for (std::size_t v = 0; v < n_; ++v) {
      if (occ_[v].empty())
        state[v] = unit(rng_) < 0.5 ? 1 : 0;
      else
        constrained.push_back(static_cast<int>(v));
    }
    if (constrained.empty()) return;

    true_count_.assign(m, 0);
    unsat_.clear();
    unsat_pos_.assign(m, -1);
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t k = starts_[c]; k < starts_[c + 1]; ++k)
        if (lit_true(lits_[k], state)) ++true_count_[c];
      if (true_count_[c] == 0) push_unsat(static_cast<int>(c));
    }
    World best = state;
    bool best_valid = unsat_.empty();
    const std::size_t flips = opt_.flips_per_atom * constrained.size();
    std::uniform_int_distribution<std::size_t> pick_var(0, constrained.size() - 1);
    for (std::size_t f = 0; f < flips; ++f) {
      if (!unsat_.empty() && unit(rng_) < opt_.walk_probability) {
        std::uniform_int_distribution<std::size_t> pick(0, unsat_.size() - 1);
        int c = unsat_[pick(rng_)];
        std::size_t len = starts_[c + 1] - starts_[c];
        int var;
        if (unit(rng_) < opt_.walk_noise) {
          std::uniform_int_distribution<std::size_t> pl(0, len - 1);
          var = lit_var(lits_[starts_[c] + pl(rng_)]);
        } else {
          int best_break = -1;
          std::size_t ties = 0;
          var = lit_var(lits_[starts_[c]]);
          for (std::size_t k = starts_[c]; k < starts_[c + 1]; ++k) {
            int v = lit_var(lits_[k]);
            int b = break_count(v, state);
            if (best_break < 0 || b < best_break) {
              best_break = b;
              var = v;
              ties = 1;
            } else if (b == best_break && std::uniform_int_distribution<std::size_t>(0, ties++)(rng_) == 0) {
              var = v;
            }
          }
        }
        flip(var, state);
      } else {
        int v = constrained[pick_var(rng_)];
        int delta = break_count(v, state) - make_count(v, state);
        if (delta <= 0 || unit(rng_) < std::exp(-delta / opt_.temperature)) flip(v, state);
      }
      if (unsat_.empty()) {
        best = state;
        best_valid = true;
      }
    }
    if (!best_valid) throw Error("SampleSAT lost the satisfying start state");
    state = std::move(best);
  }

 private:
  void push_unsat(int c) {
    unsat_pos_[c] = static_cast<int>(unsat_.size());
    unsat_.push_back(c);
  }
  void drop_unsat(int c) {
    int p = unsat_pos_[c];
    int last = unsat_.back();
    unsat_[p] = last;
    unsat_pos_[last] = p;
    unsat_.pop_back();
    unsat_pos_[c] = -1;
  }
  int break_count(int v, const World& s) const {
    int b = 0;
    for (const auto& [c, l] : occ_[v])
      if (lit_true(l, s) && true_count_[c] == 1) ++b;
    return b;
  }
  int make_count(int v, const World& s) const {
    int mk = 0;
    for (const auto& [c, l] : occ_[v])
      if (!lit_true(l, s) && true_count_[c] == 0) ++mk;
    return mk;
  }
  void flip(int v, World& s) {
    s[v] ^= 1;
    for (const auto& [c, l] : occ_[v]) {
      if (lit_true(l, s)) {
        if (++true_count_[c] == 1) drop_unsat(c);
      } else {
        if (--true_count_[c] == 0) push_unsat(c);
      }
    }
  }

  std::size_t n_;
  const McSatOptions& opt_;
  std::mt19937_64& rng_;
  std::vector<std::vector<std::pair<int, int>>> occ_;
  std::vector<std::size_t> starts_{0};
  std::vector<int> lits_;
  std::vector<int> true_count_;
  std::vector<int> unsat_;
  std::vector<int> unsat_pos_;
};

struct ChainResult {
  std::vector<double> atom_sum;
  std::vector<double> n1, n2;
  std::vector<std::vector<double>> counts;
  std::size_t samples = 0;
};

ChainResult run_chain(const GroundNetwork& gn, const World& init, const McSatOptions& opt, std::uint64_t seed,
                      std::size_t samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = gn.atom_count();
  ChainResult r;
  r.atom_sum.assign(n, 0.0);
  r.n1.assign(gn.slot_count(), 0.0);
  r.n2.assign(gn.slot_count(), 0.0);
  SampleSat sampler(n, opt, rng);
  World state = init;
  const auto& clauses = gn.clauses();
  for (std::size_t round = 0; round < opt.burn_in + samples; ++round) {
    sampler.clear();
    for (const auto& c : clauses) {
      if (c.hard) {
        sampler.add(c.lits);
      } else if (c.weight > 0) {
        if (c.satisfied(state) && unit(rng) < -std::expm1(-c.weight)) sampler.add(c.lits);
      } else if (c.weight < 0) {
        // Negative weight: the conjunction of negated literals carries |w|.
        if (!c.satisfied(state) && unit(rng) < -std::expm1(c.weight))
          for (int l : c.lits) sampler.add_unit(-l);
      }
    }
    sampler.sample(state);
    if (round < opt.burn_in) continue;
    ++r.samples;
    for (std::size_t v = 0; v < n; ++v) r.atom_sum[v] += state[v];
    auto cnt = gn.counts(state);
    for (std::size_t j = 0; j < cnt.size(); ++j) {
      r.n1[j] += cnt[j];
      r.n2[j] += cnt[j] * cnt[j];
    }
    if (opt.keep_counts) r.counts.push_back(std::move(cnt));
  }
  return r;
}

}  // namespace

McSatResult mcsat(const GroundNetwork& gn, const McSatOptions& options) {
  auto init = solve_hard(gn);
  if (!init) throw InconsistencyError("hard clauses are unsatisfiable; MC-SAT has no initial state");
  const int chains = std::max(1, options.chains);
  std::vector<ChainResult> results(chains);
#pragma omp parallel for schedule(dynamic) if (options.parallel && chains > 1)
  for (int c = 0; c < chains; ++c) {
    std::size_t share = options.samples / chains + (static_cast<std::size_t>(c) < options.samples % chains ? 1 : 0);
    results[c] = run_chain(gn, *init, options, derive_seed(options.seed, static_cast<std::uint64_t>(c)), share);
  }
  McSatResult out;
  out.seed = options.seed;
  out.marginals.assign(gn.atom_count(), 0.0);
  out.mean_counts.assign(gn.slot_count(), 0.0);
  out.count_variance.assign(gn.slot_count(), 0.0);
  std::vector<double> n2(gn.slot_count(), 0.0);
  for (auto& r : results) {
    out.samples += r.samples;
    for (std::size_t v = 0; v < r.atom_sum.size(); ++v) out.marginals[v] += r.atom_sum[v];
    for (std::size_t j = 0; j < r.n1.size(); ++j) {
      out.mean_counts[j] += r.n1[j];
      n2[j] += r.n2[j];
    }
    for (auto& c : r.counts) out.sample_counts.push_back(std::move(c));
  }
  if (out.samples == 0) return out;
  const double s = static_cast<double>(out.samples);
  for (auto& p : out.marginals) p /= s;
  for (std::size_t j = 0; j < n2.size(); ++j) {
    out.mean_counts[j] /= s;
    out.count_variance[j] = std::max(0.0, n2[j] / s - out.mean_counts[j] * out.mean_counts[j]);
  }
  return out;
}

MarginalTable mcsat_marginals(const GroundNetwork& gn, const McSatOptions& options) {
  McSatResult r = mcsat(gn, options);
  MarginalTable t = make_table(gn, r.marginals, "mcsat");
  t.samples = r.samples;
  t.seed = r.seed;
  return t;
}

MarginalTable mcsat_marginals(const GroundNetwork& gn, std::size_t samples, std::uint64_t seed) {
  McSatOptions o;
  o.samples = samples;
  o.seed = seed;
  return mcsat_marginals(gn, o);
}

}  // namespace mlnec
