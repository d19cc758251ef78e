#include <algorithm>
#include <numeric>

#include "mlnec/inference.hpp"

namespace mlnec {

std::vector<Component> components(const GroundNetwork& gn) {
  const int n = static_cast<int>(gn.atom_count());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : gn.clauses())
    for (std::size_t i = 1; i < c.lits.size(); ++i) {
      int a = find(lit_var(c.lits[0])), b = find(lit_var(c.lits[i]));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<int> id(n, -1);
  std::vector<Component> out;
  for (int v = 0; v < n; ++v) {
    int r = find(v);
    if (id[r] < 0) {
      id[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[id[r]].vars.push_back(v);
  }
  const auto& cl = gn.clauses();
  for (std::size_t i = 0; i < cl.size(); ++i) out[id[find(lit_var(cl[i].lits[0]))]].clauses.push_back(static_cast<int>(i));
  return out;
}

MarginalTable make_table(const GroundNetwork& gn, const std::vector<double>& prob, const char* method) {
  MarginalTable t;
  t.atoms = gn.queries();
  t.probability.assign(prob.begin(), prob.begin() + static_cast<long>(gn.query_count()));
  t.method = method;
  return t;
}

MapAssignment make_assignment(const GroundNetwork& gn, const World& world) {
  MapAssignment a;
  a.atoms = gn.queries();
  a.truth.resize(gn.query_count());
  for (std::size_t i = 0; i < gn.query_count(); ++i) a.truth[i] = world[i] != 0;
  a.score = gn.score(world);
  a.hard_ok = gn.hard_ok(world);
  return a;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mlnec
