// Clique-tree inference. Cliques come from a greedy min-degree elimination
// order; clique i is {order[i]} plus its neighbours at elimination time and
// its parent is the clique of the earliest-eliminated remaining neighbour.
// Tables are log potentials indexed by a bit per clique atom (ascending).

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mlnec/error.hpp"
#include "mlnec/inference.hpp"

namespace mlnec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Table = std::vector<double>;

double lse(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double lse_all(const Table& t) {
  double m = kNegInf;
  for (double v : t) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : t) s += std::exp(v - m);
  return m + std::log(s);
}

struct Tree {
  std::vector<int> order;               // clique i eliminates order[i]
  std::vector<std::vector<int>> vars;   // clique atoms, ascending
  std::vector<int> parent;              // -1 for roots
  std::vector<std::vector<int>> children;
  std::vector<std::vector<int>> clauses;  // clauses whose factor lives in clique i
  std::size_t width = 0;
};

Tree build_tree(const GroundNetwork& gn, std::size_t max_clique, bool enforce) {
  const int n = static_cast<int>(gn.atom_count());
  std::vector<std::set<int>> adj(n);
  for (const auto& c : gn.clauses())
    for (int a : c.lits)
      for (int b : c.lits)
        if (lit_var(a) != lit_var(b)) adj[lit_var(a)].insert(lit_var(b));

  Tree t;
  std::vector<int> pos(n, -1);
  std::set<std::pair<std::size_t, int>> queue;
  for (int v = 0; v < n; ++v) queue.emplace(adj[v].size(), v);
  while (!queue.empty()) {
    int v = queue.begin()->second;
    queue.erase(queue.begin());
    pos[v] = static_cast<int>(t.order.size());
    t.order.push_back(v);
    std::vector<int> clique(adj[v].begin(), adj[v].end());
    clique.push_back(v);
    std::sort(clique.begin(), clique.end());
    t.width = std::max(t.width, clique.size());
    if (enforce && clique.size() > max_clique)
      throw CapacityError("elimination clique of " + std::to_string(clique.size()) + " atoms exceeds the limit of " +
                          std::to_string(max_clique));
    t.vars.push_back(clique);
    std::vector<int> nb(adj[v].begin(), adj[v].end());
    for (int u : nb) queue.erase({adj[u].size(), u});
    for (int u : nb) {
      adj[u].erase(v);
      for (int w : nb)
        if (w != u) adj[u].insert(w);
    }
    for (int u : nb) queue.emplace(adj[u].size(), u);
    adj[v].clear();
  }

  const int m = static_cast<int>(t.order.size());
  t.parent.assign(m, -1);
  t.children.assign(m, {});
  for (int i = 0; i < m; ++i) {
    int best = -1;
    for (int u : t.vars[i])
      if (u != t.order[i] && (best < 0 || pos[u] < best)) best = pos[u];
    t.parent[i] = best;
    if (best >= 0) t.children[best].push_back(i);
  }
  t.clauses.assign(m, {});
  const auto& cl = gn.clauses();
  for (std::size_t ci = 0; ci < cl.size(); ++ci) {
    int best = n;
    for (int l : cl[ci].lits) best = std::min(best, pos[lit_var(l)]);
    t.clauses[best].push_back(static_cast<int>(ci));
  }
  return t;
}

int bit_of(const std::vector<int>& vars, int atom) {
  return static_cast<int>(std::lower_bound(vars.begin(), vars.end(), atom) - vars.begin());
}

// For each bit of a sub-scope, its bit position inside the larger scope.
std::vector<int> positions(const std::vector<int>& sub, const std::vector<int>& big) {
  std::vector<int> p;
  for (int a : sub) p.push_back(bit_of(big, a));
  return p;
}

std::size_t project(std::size_t x, const std::vector<int>& pos) {
  std::size_t y = 0;
  for (std::size_t j = 0; j < pos.size(); ++j) y |= ((x >> pos[j]) & 1U) << j;
  return y;
}

std::vector<int> separator(const Tree& t, int i) {
  std::vector<int> s;
  for (int a : t.vars[i])
    if (a != t.order[i]) s.push_back(a);
  return s;
}

bool clause_sat(const GroundClause& c, const std::vector<int>& vars, std::size_t x) {
  for (int l : c.lits)
    if ((((x >> bit_of(vars, lit_var(l))) & 1U) != 0) == lit_positive(l)) return true;
  return false;
}

Table potential(const GroundNetwork& gn, const Tree& t, int i) {
  const auto& vars = t.vars[i];
  Table psi(std::size_t{1} << vars.size(), 0.0);
  for (int ci : t.clauses[i]) {
    const GroundClause& c = gn.clauses()[ci];
    for (std::size_t x = 0; x < psi.size(); ++x) {
      bool sat = clause_sat(c, vars, x);
      if (c.hard) {
        if (!sat) psi[x] = kNegInf;
      } else if (sat) {
        psi[x] += c.weight;
      }
    }
  }
  return psi;
}

// Add a message over a sub-scope into a clique table.
void absorb(Table& into, const std::vector<int>& into_vars, const Table& msg, const std::vector<int>& msg_vars) {
  auto p = positions(msg_vars, into_vars);
  for (std::size_t x = 0; x < into.size(); ++x) into[x] += msg[project(x, p)];
}

// Reduce a clique table onto a sub-scope with log-sum-exp (or max).
Table reduce(const Table& from, const std::vector<int>& from_vars, const std::vector<int>& to_vars, bool use_max) {
  auto p = positions(to_vars, from_vars);
  Table out(std::size_t{1} << to_vars.size(), kNegInf);
  for (std::size_t x = 0; x < from.size(); ++x) {
    std::size_t y = project(x, p);
    out[y] = use_max ? std::max(out[y], from[x]) : lse(out[y], from[x]);
  }
  return out;
}

struct Calibrated {
  Tree tree;
  std::vector<Table> belief;  // unnormalised final beliefs
  std::vector<double> norm;   // log normaliser of each clique's belief
  double log_z = 0.0;
};

Calibrated calibrate(const GroundNetwork& gn, const EliminationOptions& options) {
  Calibrated cal;
  cal.tree = build_tree(gn, options.max_clique, true);
  const Tree& t = cal.tree;
  const int m = static_cast<int>(t.order.size());
  std::vector<Table> psi(m), up(m), down(m);
  std::vector<std::vector<int>> sep(m);
  for (int i = 0; i < m; ++i) {
    psi[i] = potential(gn, t, i);
    sep[i] = separator(t, i);
  }
  for (int i = 0; i < m; ++i) {
    Table b = psi[i];
    for (int c : t.children[i]) absorb(b, t.vars[i], up[c], sep[c]);
    if (t.parent[i] < 0) {
      double z = lse_all(b);
      if (z == kNegInf)
        throw InconsistencyError("no assignment satisfies the hard clauses involving " + gn.atom_name(t.order[i]));
      cal.log_z += z;
    } else {
      up[i] = reduce(b, t.vars[i], sep[i], false);
    }
  }
  for (int i = m - 1; i >= 0; --i) {
    for (int c : t.children[i]) {
      Table b = psi[i];
      if (t.parent[i] >= 0) absorb(b, t.vars[i], down[i], sep[i]);
      for (int o : t.children[i])
        if (o != c) absorb(b, t.vars[i], up[o], sep[o]);
      down[c] = reduce(b, t.vars[i], sep[c], false);
    }
  }
  cal.belief.resize(m);
  cal.norm.resize(m);
  for (int i = 0; i < m; ++i) {
    Table b = std::move(psi[i]);
    if (t.parent[i] >= 0) absorb(b, t.vars[i], down[i], sep[i]);
    for (int c : t.children[i]) absorb(b, t.vars[i], up[c], sep[c]);
    cal.norm[i] = lse_all(b);
    cal.belief[i] = std::move(b);
  }
  return cal;
}

ExactSummary summary_from(const GroundNetwork& gn, const Calibrated& cal) {
  const Tree& t = cal.tree;
  ExactSummary out;
  out.log_z = cal.log_z;
  out.marginals.assign(gn.atom_count(), 0.0);
  out.expected_counts.assign(gn.slot_count(), 0.0);
  out.count_variance.assign(gn.slot_count(), 0.0);
  for (std::size_t i = 0; i < t.order.size(); ++i) {
    const Table& b = cal.belief[i];
    int bit = bit_of(t.vars[i], t.order[i]);
    double p = 0.0;
    for (std::size_t x = 0; x < b.size(); ++x)
      if ((x >> bit) & 1U) p += std::exp(b[x] - cal.norm[i]);
    out.marginals[t.order[i]] = std::min(1.0, std::max(0.0, p));
    for (int ci : t.clauses[i]) {
      const GroundClause& c = gn.clauses()[ci];
      if (c.hard) continue;
      double ps = 0.0;
      for (std::size_t x = 0; x < b.size(); ++x)
        if (clause_sat(c, t.vars[i], x)) ps += std::exp(b[x] - cal.norm[i]);
      for (const auto& k : c.contrib) out.expected_counts[k.slot] += k.coeff * ps;
    }
  }
  return out;
}

}  // namespace

std::size_t elimination_width(const GroundNetwork& gn) { return build_tree(gn, 0, false).width; }

ExactSummary ve_summary(const GroundNetwork& gn, const EliminationOptions& options) {
  ExactSummary out = summary_from(gn, calibrate(gn, options));
  if (!options.variances) return out;
  // Var[n_s] = d E[n_s] / d w_s, by central differences.
  const long slots = static_cast<long>(gn.slot_count());
  const double h = options.variance_step;
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < slots; ++s) {
    GroundNetwork g = gn;
    std::vector<double> w = gn.weights();
    w[s] += h;
    g.set_weights(w);
    double plus = summary_from(g, calibrate(g, options)).expected_counts[s];
    w[s] -= 2 * h;
    g.set_weights(w);
    double minus = summary_from(g, calibrate(g, options)).expected_counts[s];
    out.count_variance[s] = std::max(0.0, (plus - minus) / (2 * h));
  }
  return out;
}

MarginalTable ve_marginals(const GroundNetwork& gn, const EliminationOptions& options) {
  EliminationOptions o = options;
  o.variances = false;
  return make_table(gn, ve_summary(gn, o).marginals, "elimination");
}

MapAssignment ve_map(const GroundNetwork& gn, const EliminationOptions& options) {
  Tree t = build_tree(gn, options.max_clique, true);
  const int m = static_cast<int>(t.order.size());
  std::vector<Table> local(m), up(m);
  std::vector<std::vector<int>> sep(m);
  for (int i = 0; i < m; ++i) {
    sep[i] = separator(t, i);
    Table b = potential(gn, t, i);
    for (int c : t.children[i]) absorb(b, t.vars[i], up[c], sep[c]);
    if (t.parent[i] >= 0) up[i] = reduce(b, t.vars[i], sep[i], true);
    local[i] = std::move(b);
  }
  World world(gn.atom_count(), 0);
  for (int i = m - 1; i >= 0; --i) {
    const auto& vars = t.vars[i];
    std::size_t x = 0;
    int vbit = 0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (vars[j] == t.order[i])
        vbit = static_cast<int>(j);
      else if (world[vars[j]])
        x |= std::size_t{1} << j;
    }
    double f = local[i][x], tv = local[i][x | (std::size_t{1} << vbit)];
    if (f == kNegInf && tv == kNegInf)
      throw InconsistencyError("no assignment satisfies the hard clauses involving " + gn.atom_name(t.order[i]));
    bool take_true = f == kNegInf || (tv != kNegInf && tv > f + 1e-9 * std::max(1.0, std::abs(f)));
    world[t.order[i]] = take_true ? 1 : 0;
  }
  MapAssignment a = make_assignment(gn, world);
  if (!a.hard_ok) throw InconsistencyError("max-product decoding violated a hard clause");
  return a;
}

}  // namespace mlnec
