// DPLL with unit propagation and chronological backtracking over the HARD
// clauses. Decisions try false first, in atom order.

#include <cstdint>

#include "mlnec/inference.hpp"

namespace mlnec {

std::optional<World> solve_hard(const GroundNetwork& gn) {
  const int n = static_cast<int>(gn.atom_count());
  std::vector<const GroundClause*> hard;
  for (const auto& c : gn.clauses())
    if (c.hard) hard.push_back(&c);
  std::vector<std::vector<int>> occ(n);
  for (std::size_t i = 0; i < hard.size(); ++i)
    for (int l : hard[i]->lits) occ[lit_var(l)].push_back(static_cast<int>(i));

  std::vector<std::int8_t> val(n, -1);
  std::vector<int> trail;
  struct Level {
    std::size_t trail_start;
    int var;
    bool flipped;
  };
  std::vector<Level> levels;
  std::vector<int> queue;

  auto lit_value = [&](int l) -> int {
    int v = val[lit_var(l)];
    if (v < 0) return -1;
    return (v == 1) == lit_positive(l) ? 1 : 0;
  };
  auto assign = [&](int var, bool value) {
    val[var] = value ? 1 : 0;
    trail.push_back(var);
    queue.push_back(var);
  };
  // Returns false on conflict.
  auto check_clause = [&](int ci) {
    int unassigned = 0, last = 0;
    for (int l : hard[ci]->lits) {
      int lv = lit_value(l);
      if (lv == 1) return true;
      if (lv < 0) {
        ++unassigned;
        last = l;
      }
    }
    if (unassigned == 0) return false;
    if (unassigned == 1) assign(lit_var(last), lit_positive(last));
    return true;
  };
  auto propagate = [&]() {
    while (!queue.empty()) {
      int var = queue.back();
      queue.pop_back();
      for (int ci : occ[var])
        if (!check_clause(ci)) {
          queue.clear();
          return false;
        }
    }
    return true;
  };
  auto backtrack = [&]() {
    while (!levels.empty()) {
      Level& lv = levels.back();
      while (trail.size() > lv.trail_start) {
        val[trail.back()] = -1;
        trail.pop_back();
      }
      if (!lv.flipped) {
        lv.flipped = true;
        assign(lv.var, true);
        return true;
      }
      levels.pop_back();
    }
    return false;
  };

  bool ok = true;
  for (std::size_t i = 0; i < hard.size() && ok; ++i) ok = check_clause(static_cast<int>(i));
  if (!ok) {
    // A conflict before any decision is final.
    return std::nullopt;
  }
  int next = 0;
  while (true) {
    if (!propagate()) {
      if (!backtrack()) return std::nullopt;
      next = 0;
      continue;
    }
    while (next < n && (val[next] >= 0 || occ[next].empty())) ++next;
    if (next >= n) break;
    levels.push_back({trail.size(), next, false});
    assign(next, false);
  }
  World w(n, 0);
  for (int v = 0; v < n; ++v) w[v] = val[v] == 1 ? 1 : 0;
  return w;
}

}  // namespace mlnec
