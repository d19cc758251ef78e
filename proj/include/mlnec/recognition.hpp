#pragma once

// End-to-end recognition: inference over grounded narratives, thresholding,
// metrics, evidence ablation and synthetic narratives.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlnec/compiler.hpp"
#include "mlnec/inference.hpp"
#include "mlnec/kb.hpp"
#include "mlnec/narrative.hpp"

namespace mlnec {

// ---------------------------------------------------------------------------
// Inference front door

enum class RecognitionMode { Marginal, Map };
enum class Engine { Auto, Exact, Elimination, McSat, BranchAndBound, LocalSearch };

std::optional<Engine> engine_from_name(std::string_view name);
const char* engine_name(Engine e);

struct RecognizeOptions {
  RecognitionMode mode = RecognitionMode::Marginal;
  double threshold = 0.5;
  Engine engine = Engine::Auto;
  std::size_t exact_cap = 20;
  std::size_t max_clique = 22;
  std::size_t map_cap = 24;
  McSatOptions mcsat{};
  LocalSearchOptions localsearch{};
};

/// Marginals with the requested engine. Auto picks enumeration when every
/// component fits, then variable elimination, then MC-SAT.
MarginalTable infer_marginals(const GroundNetwork& gn, const RecognizeOptions& options = {});
/// MAP with the requested engine. Auto picks branch and bound, then
/// max-product elimination, then local search.
MapAssignment infer_map(const GroundNetwork& gn, const RecognizeOptions& options = {});

struct Recognition {
  std::vector<QueryAtom> atoms;
  std::vector<double> probability;  // marginal mode; 1/0 in MAP mode
  std::vector<bool> recognised;
  int horizon = 0;
  std::string method;
  bool best_effort = false;
};

Recognition recognize(const GroundNetwork& gn, const RecognizeOptions& options = {});
/// Ground and infer; errors carry a "ground:" or "infer:" stage tag.
Recognition recognize(const CompiledKB& ckb, const Narrative& narrative, const RecognizeOptions& options = {});

/// Recognition from a results CSV (probability or truth rows).
Recognition recognition_from_results(std::string_view csv, double threshold = 0.5);

// ---------------------------------------------------------------------------
// Metrics

struct MetricsReport {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::optional<double> auprc;
  double threshold = 0.5;

  /// Micro aggregation: counts add, ratios are recomputed.
  MetricsReport& operator+=(const MetricsReport& other);
};

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn = 0,
                                  double threshold = 0.5);

/// Compare decisions with the annotation of a narrative (absent = false).
/// Throws Error when the annotation refers to a time or fluent outside the
/// recognised atoms, or the horizons differ.
MetricsReport metrics(const Recognition& rec, const Narrative& annotation, double threshold = 0.5);

/// Labels of the recognised atoms under an annotation, with the same checks.
std::vector<bool> labels_for(const Recognition& rec, const Narrative& annotation);

/// Area under the step-interpolated precision-recall curve over all
/// distinct scores. Throws Error when there is no positive label.
double auprc(const std::vector<double>& score, const std::vector<bool>& label);

/// Metrics at evenly spaced thresholds on [0,1] (101 points by default).
std::vector<MetricsReport> threshold_sweep(const std::vector<double>& score, const std::vector<bool>& label,
                                           std::size_t points = 101);

std::string format_metrics_csv(const std::vector<MetricsReport>& rows, bool header = true);

// ---------------------------------------------------------------------------
// Ablation

struct AblationSpec {
  double start_probability = 0.01;
  std::vector<int> lengths{10, 20};
  int repetitions = 5;
  std::uint64_t seed = 1;
  /// Erasure starts only where at least this many entities have SDEs.
  std::size_t min_entities = 2;
};

struct AblatedNarrative {
  int length = 0;
  int repetition = 0;
  std::vector<int> starts;
  std::size_t erased = 0;  // evidence atoms removed
  Narrative narrative;
};

/// Entities with an SDE (happens atom) at each time-point.
std::vector<std::size_t> entities_per_time(const Narrative& narrative);
std::vector<int> eligible_timepoints(const Narrative& narrative, std::size_t min_entities);

/// One degraded narrative per (repetition, length). Starts are drawn once per
/// repetition, so longer lengths extend the same intervals. Annotation and
/// fixed atoms are kept.
std::vector<AblatedNarrative> ablate(const Narrative& narrative, const AblationSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic narratives

/// Crisp Event Calculus annotation of every fluent instance: the state at 0
/// comes from fixed atoms (false otherwise); at each step termination wins
/// over initiation, else the state persists.
void annotate_crisp(const CompletedKB& completed, Narrative& narrative);

/// Scenario from JSON; see docs/formats.md. Throws Error on malformed specs.
Narrative simulate(std::string_view scenario_json, const KnowledgeBaseSource& kb, std::optional<std::uint64_t> seed = {});
/// Bundled presets: fig1, inertia-decay, random-walkers.
std::string preset_scenario(std::string_view name);
std::vector<std::string> preset_names();

/// Source text of the bundled meeting/moving knowledge base.
std::string_view bundled_kb_text();

// ---------------------------------------------------------------------------
// Inertia laboratory

struct SeriesPoint {
  int time = 0;
  double probability = 0.0;
};

/// Exact marginal series of one fluent instance.
std::vector<SeriesPoint> fluent_series(const CompiledKB& ckb, const Narrative& narrative, const std::string& fluent,
                                       const RecognizeOptions& options = {});
std::string format_series(const std::vector<SeriesPoint>& series);

// ---------------------------------------------------------------------------
// Manifests

struct ManifestEntry {
  std::string narrative;   // path
  std::string annotation;  // path, may be empty
  int fold = -1;
};

/// Lines "narrative [annotation] [fold=N]"; relative paths are resolved
/// against base_dir. '#' starts a comment.
std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::string& base_dir = {});
std::vector<ManifestEntry> load_manifest(const std::string& path);

}  // namespace mlnec
