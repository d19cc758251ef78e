// Exhaustive enumeration per connected component, accumulated in log space
// with a running max shift.

#include <cmath>
#include <limits>
#include <unordered_map>

#include "mlnec/error.hpp"
#include "mlnec/inference.hpp"

namespace mlnec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LocalProblem {
  std::size_t k = 0;
  std::vector<std::uint64_t> hard_pos, hard_neg;
  std::vector<std::uint64_t> soft_pos, soft_neg;
  std::vector<double> soft_w;
  // Per soft clause, (local slot, coeff) pairs.
  std::vector<std::vector<std::pair<int, double>>> soft_slots;
  std::vector<int> slots;  // local slot -> global slot
};

LocalProblem localize(const GroundNetwork& gn, const Component& comp) {
  LocalProblem p;
  p.k = comp.vars.size();
  std::unordered_map<int, int> local;
  for (std::size_t i = 0; i < comp.vars.size(); ++i) local[comp.vars[i]] = static_cast<int>(i);
  std::unordered_map<int, int> slot_local;
  for (int ci : comp.clauses) {
    const GroundClause& c = gn.clauses()[ci];
    std::uint64_t pos = 0, neg = 0;
    for (int l : c.lits) {
      std::uint64_t bit = std::uint64_t{1} << local.at(lit_var(l));
      (lit_positive(l) ? pos : neg) |= bit;
    }
    if (c.hard) {
      p.hard_pos.push_back(pos);
      p.hard_neg.push_back(neg);
      continue;
    }
    p.soft_pos.push_back(pos);
    p.soft_neg.push_back(neg);
    p.soft_w.push_back(c.weight);
    std::vector<std::pair<int, double>> sc;
    for (const auto& k : c.contrib) {
      auto [it, inserted] = slot_local.emplace(k.slot, static_cast<int>(p.slots.size()));
      if (inserted) p.slots.push_back(k.slot);
      sc.emplace_back(it->second, k.coeff);
    }
    p.soft_slots.push_back(std::move(sc));
  }
  return p;
}

struct Acc {
  double m = kNegInf;  // max log weight seen
  double s = 0.0;      // sum of exp(score - m)
  std::vector<double> atom;  // sum of exp(score - m) * x_v
  std::vector<double> n1, n2;

  Acc(std::size_t k, std::size_t slots) : atom(k, 0.0), n1(slots, 0.0), n2(slots, 0.0) {}

  void rescale(double new_m) {
    double f = m == kNegInf ? 0.0 : std::exp(m - new_m);
    s *= f;
    for (auto& a : atom) a *= f;
    for (auto& a : n1) a *= f;
    for (auto& a : n2) a *= f;
    m = new_m;
  }

  void merge(const Acc& o) {
    if (o.m == kNegInf) return;
    if (o.m > m) rescale(o.m);
    double f = std::exp(o.m - m);
    s += f * o.s;
    for (std::size_t i = 0; i < atom.size(); ++i) atom[i] += f * o.atom[i];
    for (std::size_t i = 0; i < n1.size(); ++i) {
      n1[i] += f * o.n1[i];
      n2[i] += f * o.n2[i];
    }
  }
};

Acc enumerate_range(const LocalProblem& p, std::uint64_t begin, std::uint64_t end) {
  Acc acc(p.k, p.slots.size());
  std::vector<double> n(p.slots.size());
  const std::size_t nh = p.hard_pos.size(), ns = p.soft_pos.size();
  for (std::uint64_t x = begin; x < end; ++x) {
    bool ok = true;
    for (std::size_t i = 0; i < nh && ok; ++i) ok = ((x & p.hard_pos[i]) | (~x & p.hard_neg[i])) != 0;
    if (!ok) continue;
    double score = 0.0;
    std::fill(n.begin(), n.end(), 0.0);
    for (std::size_t i = 0; i < ns; ++i) {
      if (((x & p.soft_pos[i]) | (~x & p.soft_neg[i])) == 0) continue;
      score += p.soft_w[i];
      for (const auto& [slot, coeff] : p.soft_slots[i]) n[slot] += coeff;
    }
    if (score > acc.m) acc.rescale(score);
    double e = std::exp(score - acc.m);
    acc.s += e;
    for (std::size_t v = 0; v < p.k; ++v)
      if ((x >> v) & 1U) acc.atom[v] += e;
    for (std::size_t j = 0; j < n.size(); ++j) {
      acc.n1[j] += e * n[j];
      acc.n2[j] += e * n[j] * n[j];
    }
  }
  return acc;
}

constexpr std::size_t kParallelWorldsFrom = 12;  // components this large split their worlds across threads
constexpr std::uint64_t kChunks = 64;

Acc enumerate_component(const LocalProblem& p, bool parallel) {
  const std::uint64_t total = std::uint64_t{1} << p.k;
  if (!parallel || p.k < kParallelWorldsFrom) return enumerate_range(p, 0, total);
  std::vector<Acc> parts(kChunks, Acc(p.k, p.slots.size()));
  const std::uint64_t step = total / kChunks;
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < static_cast<long>(kChunks); ++c)
    parts[c] = enumerate_range(p, static_cast<std::uint64_t>(c) * step, static_cast<std::uint64_t>(c + 1) * step);
  Acc acc(p.k, p.slots.size());
  for (const auto& part : parts) acc.merge(part);
  return acc;
}

ExactSummary summarize(const GroundNetwork& gn, const ExactOptions& options, bool parallel) {
  auto comps = components(gn);
  for (const auto& c : comps)
    if (c.vars.size() > options.cap || c.vars.size() > 62)
      throw CapacityError("connected component with " + std::to_string(c.vars.size()) +
                          " atoms exceeds the exact enumeration cap of " + std::to_string(options.cap));

  std::vector<LocalProblem> problems(comps.size());
  std::vector<Acc> accs(comps.size(), Acc(0, 0));
  const long nc = static_cast<long>(comps.size());
  // Small components: one task each. Large ones: split their worlds.
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < nc; ++i) {
    problems[i] = localize(gn, comps[i]);
    if (problems[i].k < kParallelWorldsFrom || !parallel) accs[i] = enumerate_component(problems[i], false);
  }
  if (parallel)
    for (long i = 0; i < nc; ++i)
      if (problems[i].k >= kParallelWorldsFrom) accs[i] = enumerate_component(problems[i], true);

  ExactSummary out;
  out.marginals.assign(gn.atom_count(), 0.0);
  out.expected_counts.assign(gn.slot_count(), 0.0);
  out.count_variance.assign(gn.slot_count(), 0.0);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Acc& a = accs[i];
    if (a.m == kNegInf || a.s <= 0.0)
      throw InconsistencyError("no assignment satisfies the hard clauses of the component containing " +
                               gn.atom_name(comps[i].vars[0]));
    out.log_z += a.m + std::log(a.s);
    for (std::size_t v = 0; v < comps[i].vars.size(); ++v) out.marginals[comps[i].vars[v]] = a.atom[v] / a.s;
    const auto& slots = problems[i].slots;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      double e1 = a.n1[j] / a.s, e2 = a.n2[j] / a.s;
      out.expected_counts[slots[j]] += e1;
      out.count_variance[slots[j]] += std::max(0.0, e2 - e1 * e1);
    }
  }
  return out;
}

}  // namespace

ExactSummary exact_summary(const GroundNetwork& gn, const ExactOptions& options) {
  return summarize(gn, options, true);
}

ExactSummary exact_summary_serial(const GroundNetwork& gn, const ExactOptions& options) {
  return summarize(gn, options, false);
}

MarginalTable exact_marginals(const GroundNetwork& gn, std::size_t cap) {
  return make_table(gn, exact_summary(gn, {cap}).marginals, "exact");
}

MarginalTable exact_marginals_serial(const GroundNetwork& gn, std::size_t cap) {
  return make_table(gn, exact_summary_serial(gn, {cap}).marginals, "exact");
}

}  // namespace mlnec
