#pragma once

// Marginal and MAP inference over a GroundNetwork.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mlnec/network.hpp"
#include "mlnec/results.hpp"

namespace mlnec {

// ---------------------------------------------------------------------------
// Structure

/// A connected component of the atom/clause interaction graph.
struct Component {
  std::vector<int> vars;     // ascending atom indices
  std::vector<int> clauses;  // clause indices
};

std::vector<Component> components(const GroundNetwork& gn);

/// Marginal table over the network's query atoms from per-atom probabilities.
MarginalTable make_table(const GroundNetwork& gn, const std::vector<double>& prob, const char* method);
/// MAP assignment record over the query atoms of a full world.
MapAssignment make_assignment(const GroundNetwork& gn, const World& world);

// ---------------------------------------------------------------------------
// Exact inference

/// Log partition function, marginals and first/second moments of the
/// per-slot feature counts under the current weights.
struct ExactSummary {
  double log_z = 0.0;
  std::vector<double> marginals;        // per atom (all atoms, including clamped evidence)
  std::vector<double> expected_counts;  // per slot
  std::vector<double> count_variance;   // per slot
};

struct ExactOptions {
  /// Largest connected component enumerated exhaustively.
  std::size_t cap = 20;
};

/// Enumeration per connected component; OpenMP over the worlds of each
/// component. Throws CapacityError above the cap and InconsistencyError
/// when no world satisfies the HARD clauses.
ExactSummary exact_summary(const GroundNetwork& gn, const ExactOptions& options = {});
/// Single-threaded reference of exact_summary.
ExactSummary exact_summary_serial(const GroundNetwork& gn, const ExactOptions& options = {});

MarginalTable exact_marginals(const GroundNetwork& gn, std::size_t cap = 20);
MarginalTable exact_marginals_serial(const GroundNetwork& gn, std::size_t cap = 20);

struct EliminationOptions {
  /// Largest clique (in atoms) allowed in the elimination tree.
  std::size_t max_clique = 22;
  /// Estimate count variances by central differences of the expectations.
  bool variances = false;
  double variance_step = 1e-4;
};

/// Exact inference by variable elimination on a clique tree built from a
/// greedy min-fill order; suited to long, narrow (chain-like) networks.
ExactSummary ve_summary(const GroundNetwork& gn, const EliminationOptions& options = {});
MarginalTable ve_marginals(const GroundNetwork& gn, const EliminationOptions& options = {});
/// Max-product on the same tree. Ties prefer false.
MapAssignment ve_map(const GroundNetwork& gn, const EliminationOptions& options = {});

/// Width of the elimination tree (largest clique), without building tables.
std::size_t elimination_width(const GroundNetwork& gn);

// ---------------------------------------------------------------------------
// Satisfiability of the HARD clauses

/// DPLL with unit propagation; unconstrained atoms are false. nullopt when
/// the HARD clauses are unsatisfiable.
std::optional<World> solve_hard(const GroundNetwork& gn);

// ---------------------------------------------------------------------------
// MC-SAT

struct McSatOptions {
  std::size_t samples = 1000;  // retained samples in total, across chains
  std::size_t burn_in = 100;   // per chain
  std::uint64_t seed = 1;
  int chains = 1;
  double walk_probability = 0.5;  // SampleSAT: WalkSAT move vs simulated annealing move
  double walk_noise = 0.5;        // WalkSAT: random literal vs greedy
  double temperature = 0.5;       // simulated annealing
  std::size_t flips_per_atom = 10;
  bool parallel = true;
  bool keep_counts = false;  // record per-slot counts of every sample
};

struct McSatResult {
  std::vector<double> marginals;  // per atom
  std::vector<double> mean_counts;
  std::vector<double> count_variance;
  std::vector<std::vector<double>> sample_counts;  // keep_counts only
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Throws InconsistencyError when the HARD clauses are unsatisfiable.
McSatResult mcsat(const GroundNetwork& gn, const McSatOptions& options);
MarginalTable mcsat_marginals(const GroundNetwork& gn, std::size_t samples, std::uint64_t seed);
MarginalTable mcsat_marginals(const GroundNetwork& gn, const McSatOptions& options);

// ---------------------------------------------------------------------------
// MAP

/// Branch and bound per connected component, atoms in index order with false
/// tried first; only strict improvements replace the incumbent, so ties
/// resolve to the lexicographically smallest optimal assignment. OpenMP over
/// components.
MapAssignment map_exact(const GroundNetwork& gn, std::size_t cap = 24);
MapAssignment map_exact_serial(const GroundNetwork& gn, std::size_t cap = 24);

struct LocalSearchOptions {
  std::size_t flips = 10000;  // per restart
  std::size_t restarts = 10;
  double noise = 0.5;
  std::uint64_t seed = 1;
  bool parallel = true;
};

/// MaxWalkSAT minimising (violated HARD clauses, violated soft weight)
/// lexicographically. Sets best_effort when no HARD-feasible state was seen.
MapAssignment map_localsearch(const GroundNetwork& gn, const LocalSearchOptions& options);
MapAssignment map_localsearch(const GroundNetwork& gn, std::size_t flips, std::uint64_t seed, double noise);

/// Derive an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mlnec
