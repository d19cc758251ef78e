// MAP inference: exact branch and bound per component, and MaxWalkSAT.

#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "mlnec/error.hpp"
#include "mlnec/inference.hpp"

namespace mlnec {

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const GroundNetwork& gn, const Component& comp) : k_(comp.vars.size()), occ_(k_) {
    std::unordered_map<int, int> local;
    for (std::size_t i = 0; i < comp.vars.size(); ++i) local[comp.vars[i]] = static_cast<int>(i);
    for (int ci : comp.clauses) {
      const GroundClause& c = gn.clauses()[ci];
      int id = static_cast<int>(len_.size());
      len_.push_back(static_cast<int>(c.lits.size()));
      hard_.push_back(c.hard);
      w_.push_back(c.hard ? 0.0 : c.weight);
      for (int l : c.lits) occ_[local.at(lit_var(l))].emplace_back(id, lit_positive(l));
      if (!c.hard) optimistic_ += std::max(0.0, c.weight);
    }
    true_.assign(len_.size(), 0);
    false_.assign(len_.size(), 0);
    value_.assign(k_, 0);
  }

  // Returns false when no assignment satisfies the hard clauses.
  bool solve(std::vector<std::uint8_t>& out) {
    search(0);
    if (!found_) return false;
    out = best_value_;
    return true;
  }

 private:
  void set(std::size_t v, std::uint8_t val, int dir) {
    for (const auto& [c, positive] : occ_[v]) {
      bool lit_is_true = (val == 1) == positive;
      if (lit_is_true) {
        if (dir > 0) {
          if (++true_[c] == 1) on_satisfied(c, +1);
        } else {
          if (--true_[c] == 0) on_satisfied(c, -1);
        }
      } else {
        if (dir > 0) {
          if (++false_[c] == len_[c]) on_falsified(c, +1);
        } else {
          if (false_[c]-- == len_[c]) on_falsified(c, -1);
        }
      }
    }
  }
  void on_satisfied(int c, int dir) {
    if (hard_[c]) return;
    fixed_ += dir * w_[c];
    optimistic_ -= dir * std::max(0.0, w_[c]);
  }
  void on_falsified(int c, int dir) {
    if (hard_[c]) {
      hard_false_ += dir;
      return;
    }
    optimistic_ -= dir * std::max(0.0, w_[c]);
  }

  bool improves(double score) const {
    return !found_ || score > best_ + 1e-9 * std::max(1.0, std::abs(best_));
  }

  void search(std::size_t depth) {
    if (hard_false_ > 0) return;
    if (!improves(fixed_ + optimistic_)) return;
    if (depth == k_) {
      found_ = true;
      best_ = fixed_;
      best_value_ = value_;
      return;
    }
    for (std::uint8_t val : {std::uint8_t{0}, std::uint8_t{1}}) {
      value_[depth] = val;
      set(depth, val, +1);
      search(depth + 1);
      set(depth, val, -1);
    }
    value_[depth] = 0;
  }

  std::size_t k_;
  std::vector<std::vector<std::pair<int, bool>>> occ_;
  std::vector<int> len_;
  std::vector<bool> hard_;
  std::vector<double> w_;
  std::vector<int> true_, false_;
  std::vector<std::uint8_t> value_, best_value_;
  double fixed_ = 0.0;
  double optimistic_ = 0.0;
  int hard_false_ = 0;
  bool found_ = false;
  double best_ = 0.0;
};

MapAssignment map_exact_impl(const GroundNetwork& gn, std::size_t cap, bool parallel) {
  auto comps = components(gn);
  for (const auto& c : comps)
    if (c.vars.size() > cap)
      throw CapacityError("connected component with " + std::to_string(c.vars.size()) +
                          " atoms exceeds the exact MAP cap of " + std::to_string(cap));
  World world(gn.atom_count(), 0);
  std::vector<char> feasible(comps.size(), 1);
  const long nc = static_cast<long>(comps.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < nc; ++i) {
    BranchAndBound bb(gn, comps[i]);
    std::vector<std::uint8_t> vals;
    if (!bb.solve(vals)) {
      feasible[i] = 0;
      continue;
    }
    for (std::size_t j = 0; j < vals.size(); ++j) world[comps[i].vars[j]] = vals[j];
  }
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (!feasible[i])
      throw InconsistencyError("no assignment satisfies the hard clauses of the component containing " +
                               gn.atom_name(comps[i].vars[0]));
  return make_assignment(gn, world);
}

// ---------------------------------------------------------------------------

struct TryResult {
  World world;
  long hard_violations = std::numeric_limits<long>::max();
  double cost = std::numeric_limits<double>::infinity();
};

class WalkSat {
 public:
  WalkSat(const GroundNetwork& gn) : gn_(gn), occ_(gn.atom_count()) {
    double total = 0.0;
    for (const auto& c : gn.clauses())
      if (!c.hard) total += std::abs(c.weight);
    const auto& cl = gn.clauses();
    for (std::size_t i = 0; i < cl.size(); ++i) {
      for (int l : cl[i].lits) occ_[lit_var(l)].emplace_back(static_cast<int>(i), l);
      negative_.push_back(!cl[i].hard && cl[i].weight < 0);
      cost_.push_back(cl[i].hard ? 1.0 + total : std::abs(cl[i].weight));
    }
  }

  TryResult run(World state, std::size_t flips, double noise, std::mt19937_64& rng) {
    const auto& cl = gn_.clauses();
    const std::size_t m = cl.size();
    true_.assign(m, 0);
    viol_.clear();
    viol_pos_.assign(m, -1);
    hard_viol_ = 0;
    soft_cost_ = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      for (int l : cl[c].lits)
        if (lit_true(l, state)) ++true_[c];
      if (violated(static_cast<int>(c))) add_viol(static_cast<int>(c));
    }
    TryResult best;
    record(best, state);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t f = 0; f < flips && !viol_.empty(); ++f) {
      int c = viol_[std::uniform_int_distribution<std::size_t>(0, viol_.size() - 1)(rng)];
      candidates_.clear();
      for (int l : cl[c].lits)
        if (!negative_[c] || lit_true(l, state)) candidates_.push_back(lit_var(l));
      int var;
      if (unit(rng) < noise) {
        var = candidates_[std::uniform_int_distribution<std::size_t>(0, candidates_.size() - 1)(rng)];
      } else {
        double best_delta = std::numeric_limits<double>::infinity();
        std::size_t ties = 0;
        var = candidates_[0];
        for (int v : candidates_) {
          double d = delta(v, state);
          if (d < best_delta - 1e-12) {
            best_delta = d;
            var = v;
            ties = 1;
          } else if (std::abs(d - best_delta) <= 1e-12 &&
                     std::uniform_int_distribution<std::size_t>(0, ties++)(rng) == 0) {
            var = v;
          }
        }
      }
      flip(var, state);
      if (hard_viol_ < best.hard_violations ||
          (hard_viol_ == best.hard_violations && soft_cost_ < best.cost - 1e-9))
        record(best, state);
    }
    return best;
  }

 private:
  bool violated(int c) const {
    const auto& cl = gn_.clauses()[c];
    if (cl.hard || !negative_[c]) return true_[c] == 0 && (cl.hard || cl.weight > 0);
    return true_[c] > 0;
  }
  void add_viol(int c) {
    viol_pos_[c] = static_cast<int>(viol_.size());
    viol_.push_back(c);
    if (gn_.clauses()[c].hard)
      ++hard_viol_;
    else
      soft_cost_ += cost_[c];
  }
  void drop_viol(int c) {
    int p = viol_pos_[c];
    int last = viol_.back();
    viol_[p] = last;
    viol_pos_[last] = p;
    viol_.pop_back();
    viol_pos_[c] = -1;
    if (gn_.clauses()[c].hard)
      --hard_viol_;
    else
      soft_cost_ -= cost_[c];
  }
  double delta(int v, const World& s) const {
    double d = 0.0;
    for (const auto& [c, l] : occ_[v]) {
      bool was = violated_with(c, true_[c]);
      int t = true_[c] + (lit_true(l, s) ? -1 : 1);
      bool now = violated_with(c, t);
      if (was != now) d += now ? cost_[c] : -cost_[c];
    }
    return d;
  }
  bool violated_with(int c, int true_count) const {
    const auto& cl = gn_.clauses()[c];
    if (negative_[c]) return true_count > 0;
    return true_count == 0 && (cl.hard || cl.weight > 0);
  }
  void flip(int v, World& s) {
    s[v] ^= 1;
    for (const auto& [c, l] : occ_[v]) {
      bool was = violated(c);
      true_[c] += lit_true(l, s) ? 1 : -1;
      bool now = violated(c);
      if (was && !now) drop_viol(c);
      if (!was && now) add_viol(c);
    }
  }
  void record(TryResult& r, const World& s) const {
    r.world = s;
    r.hard_violations = hard_viol_;
    r.cost = soft_cost_;
  }

  const GroundNetwork& gn_;
  std::vector<std::vector<std::pair<int, int>>> occ_;
  std::vector<bool> negative_;
  std::vector<double> cost_;
  std::vector<int> true_;
  std::vector<int> viol_, viol_pos_;
  std::vector<int> candidates_;
  long hard_viol_ = 0;
  double soft_cost_ = 0.0;
};

}  // namespace

MapAssignment map_exact(const GroundNetwork& gn, std::size_t cap) { return map_exact_impl(gn, cap, true); }

MapAssignment map_exact_serial(const GroundNetwork& gn, std::size_t cap) { return map_exact_impl(gn, cap, false); }

MapAssignment map_localsearch(const GroundNetwork& gn, const LocalSearchOptions& options) {
  const std::size_t n = gn.atom_count();
  const long tries = static_cast<long>(std::max<std::size_t>(1, options.restarts));
  std::optional<World> feasible = solve_hard(gn);
  std::vector<TryResult> results(tries);
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (long r = 0; r < tries; ++r) {
    std::mt19937_64 rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    World start(n, 0);
    if (r == 0 && feasible) {
      start = *feasible;
    } else {
      for (auto& x : start) x = static_cast<std::uint8_t>(rng() & 1U);
    }
    WalkSat ws(gn);
    results[r] = ws.run(std::move(start), options.flips, options.noise, rng);
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    const auto& a = results[r];
    const auto& b = results[best];
    if (a.hard_violations < b.hard_violations || (a.hard_violations == b.hard_violations && a.cost < b.cost - 1e-9))
      best = r;
  }
  MapAssignment out = make_assignment(gn, results[best].world);
  out.best_effort = results[best].hard_violations > 0;
  return out;
}

MapAssignment map_localsearch(const GroundNetwork& gn, std::size_t flips, std::uint64_t seed, double noise) {
  LocalSearchOptions o;
  o.flips = flips;
  o.seed = seed;
  o.noise = noise;
  return map_localsearch(gn, o);
}

}  // namespace mlnec
