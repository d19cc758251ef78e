#pragma once

// Evidence-conditioned ground Markov network over holdsAt query atoms.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mlnec/compiler.hpp"
#include "mlnec/narrative.hpp"
#include "mlnec/results.hpp"

namespace mlnec {

/// Literal encoding: +(i+1) for atom i, -(i+1) for its negation.
inline int lit_var(int lit) { return (lit > 0 ? lit : -lit) - 1; }
inline bool lit_positive(int lit) { return lit > 0; }
inline int make_lit(int var, bool positive) { return positive ? var + 1 : -(var + 1); }

using World = std::vector<std::uint8_t>;

inline bool lit_true(int lit, const World& w) { return (w[lit_var(lit)] != 0) == lit_positive(lit); }

struct Contribution {
  int slot = -1;
  double coeff = 0.0;  // share of the formula weight carried by this clause
};

struct GroundClause {
  std::vector<int> lits;  // sorted by variable, no duplicates, no complementary pair
  bool hard = false;
  double weight = 0.0;  // sum of coeff * w[slot] over contributions
  std::vector<Contribution> contrib;
  std::vector<int> origins;  // compiled formula indices; fixed-value clauses use formula_names.size()-1

  bool satisfied(const World& w) const;
};

struct GroundOptions {
  /// Substitute evidence and drop satisfied clauses. When false, evidence
  /// atoms become network variables clamped by HARD unit clauses.
  bool simplify = true;
};

class GroundNetwork {
 public:
  std::size_t atom_count() const { return names_.size(); }
  /// holdsAt atoms come first; clamped evidence atoms (simplify=false) follow.
  std::size_t query_count() const { return queries_.size(); }
  const std::vector<QueryAtom>& queries() const { return queries_; }
  const std::string& atom_name(std::size_t i) const { return names_[i]; }
  const std::vector<GroundClause>& clauses() const { return clauses_; }
  int horizon() const { return horizon_; }
  const std::vector<std::string>& fluents() const { return fluents_; }
  /// Index of holdsAt(fluents()[f], t).
  int atom_index(std::size_t fluent, int t) const { return static_cast<int>(fluent) * (horizon_ + 1) + t; }
  /// Index of a query atom by holdsAt text, or -1.
  int find_atom(const std::string& name) const;

  std::size_t slot_count() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  /// Replace the slot weights and recompute clause weights.
  void set_weights(const std::vector<double>& w);

  const std::vector<std::string>& formula_names() const { return formula_names_; }

  bool hard_ok(const World& w) const;
  /// Sum of weights of satisfied soft clauses.
  double score(const World& w) const;
  /// Per-slot feature values: sum of coeff over satisfied soft clauses.
  std::vector<double> counts(const World& w) const;

  // Pre-simplification bookkeeping, filled by the grounder.
  std::vector<std::size_t> pre_counts;  // ground clauses per formula after boundary drops
  std::size_t boundary_dropped = 0;
  std::size_t satisfied_removed = 0;
  std::size_t falsified_soft_removed = 0;
  std::size_t tautologies_removed = 0;
  std::size_t merged_duplicates = 0;

 private:
  friend class NetworkBuilder;
  friend GroundNetwork make_network(std::size_t, std::vector<GroundClause>, std::vector<double>);

  std::vector<QueryAtom> queries_;
  std::vector<std::string> names_;
  std::vector<std::string> fluents_;
  std::vector<GroundClause> clauses_;
  std::vector<double> weights_;
  std::vector<std::string> formula_names_;
  int horizon_ = 0;
};

/// Ground a compiled KB over a narrative. Parallel over compiled clauses.
/// Throws InconsistencyError naming the ground clause and its formula when
/// the evidence falsifies a HARD clause.
GroundNetwork ground(const CompiledKB& ckb, const Narrative& narrative, const GroundOptions& options = {});
/// Single-threaded reference; produces an identical network.
GroundNetwork ground_serial(const CompiledKB& ckb, const Narrative& narrative, const GroundOptions& options = {});

/// Synthetic network over atoms holdsAt(x,0..n-1), one per index, with the
/// given clauses and slot weights. Literals are sorted and deduplicated;
/// soft clause weights are recomputed from their contributions. Throws Error
/// on out-of-range literals or slots and on tautological clauses.
GroundNetwork make_network(std::size_t atoms, std::vector<GroundClause> clauses, std::vector<double> weights);

struct FormulaStats {
  std::string name;
  std::size_t pre = 0;   // before evidence simplification
  std::size_t post = 0;  // surviving clauses whose first origin is this formula
};

struct NetworkStats {
  std::size_t atom_count = 0;
  std::size_t clause_count = 0;
  std::size_t hard_clause_count = 0;
  std::size_t pre_clause_count = 0;
  std::size_t boundary_dropped = 0;
  std::size_t satisfied_removed = 0;
  std::size_t falsified_soft_removed = 0;
  std::vector<FormulaStats> per_formula;
};

NetworkStats network_stats(const GroundNetwork& gn);
std::string format_stats(const NetworkStats& stats);

/// Text dump: atom table, then one clause per line ("hard" or weight,
/// followed by signed 1-based atom indices).
std::string dump_network(const GroundNetwork& gn);

}  // namespace mlnec
