#pragma once

// Discriminative weight learning from annotated narratives: CLL gradients,
// diagonal Newton and an averaged MAP perceptron.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlnec/inference.hpp"
#include "mlnec/network.hpp"

namespace mlnec {

struct TrainingInstance {
  GroundNetwork network;
  World observed;                      // annotation on query atoms, evidence on clamped atoms
  std::vector<double> counts_observed;  // per slot
  std::string name;
};

/// Build an instance from a grounded narrative. Unannotated query atoms are
/// false. Throws InconsistencyError listing the violated HARD clauses when
/// the observed state is infeasible.
TrainingInstance make_instance(GroundNetwork network, const Narrative& narrative, std::string name = {});

enum class GradientEngine { Auto, Exact, Elimination, McSat };

struct LearnOptions {
  GradientEngine engine = GradientEngine::Auto;
  std::size_t exact_cap = 20;
  std::size_t max_clique = 22;
  McSatOptions mcsat{};  // samples per instance
  double lambda = 1.0;   // diagonal Newton damping
  std::size_t max_backtracks = 20;
  double learning_rate = 1.0;  // perceptron
  std::size_t map_cap = 24;
  LocalSearchOptions localsearch{};
  bool parallel = true;  // over instances
};

struct GradientResult {
  std::vector<double> gradient;  // E_w[n] - n(observed)
  std::vector<double> expected;
  std::vector<double> variance;
  /// Exact negative CLL; absent when sampled.
  std::optional<double> neg_cll;
  /// Per-sample counts when sampled, for backtracking estimates.
  std::vector<std::vector<double>> sample_counts;
  std::string engine;
};

/// Gradient of the negative CLL of one instance at weights w.
GradientResult cll_gradient(TrainingInstance& instance, const std::vector<double>& w, const LearnOptions& options = {});

/// Exact negative CLL, log Z - w.n(observed). Throws CapacityError when the
/// network is too large for exact inference.
double negative_cll(TrainingInstance& instance, const std::vector<double>& w, const LearnOptions& options = {});
double negative_cll(std::vector<TrainingInstance>& instances, const std::vector<double>& w,
                    const LearnOptions& options = {});

struct EpochReport {
  std::vector<double> weights;
  std::vector<double> gradient;  // summed over instances at the start weights
  double step = 0.0;             // accepted backtracking factor
  std::optional<double> neg_cll_before;
  std::optional<double> neg_cll_after;
};

/// w <- w - a*g/(Var[n]+lambda), with a halved until the (exact or
/// importance-sampled) negative CLL does not increase. Throws NumericError
/// on non-finite updates.
EpochReport diagonal_newton_epoch(std::vector<TrainingInstance>& instances, const std::vector<double>& w,
                                  const LearnOptions& options = {});

struct PerceptronState {
  std::vector<double> weights;  // current iterate
  std::vector<double> sum;      // running sum of iterates for averaging
  std::size_t steps = 0;

  explicit PerceptronState(std::vector<double> w = {});
  std::vector<double> averaged() const;
};

/// Best MAP engine for a network: exact branch and bound, max-product, or
/// local search when neither fits.
MapAssignment map_auto(const GroundNetwork& gn, const LearnOptions& options = {});

/// One pass over the instances: w += eta*(n(observed) - n(MAP)). Returns the
/// averaged weights so far.
std::vector<double> perceptron_epoch(std::vector<TrainingInstance>& instances, PerceptronState& state,
                                     const LearnOptions& options = {});

}  // namespace mlnec
