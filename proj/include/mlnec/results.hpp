#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mlnec {

/// A ground holdsAt(fluent, time) query atom.
struct QueryAtom {
  std::string fluent;
  int time = 0;

  std::string str() const { return "holdsAt(" + fluent + "," + std::to_string(time) + ")"; }
  friend bool operator==(const QueryAtom&, const QueryAtom&) = default;
};

struct MarginalTable {
  std::vector<QueryAtom> atoms;
  std::vector<double> probability;
  std::string method;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

struct MapAssignment {
  std::vector<QueryAtom> atoms;
  std::vector<bool> truth;
  double score = 0.0;
  bool hard_ok = true;
  /// Set by local search when no hard-feasible state was found.
  bool best_effort = false;
};

/// CSV "time,fluent,probability" with four decimals, ordered by (fluent, time).
std::string serialize_results(const MarginalTable& table);
/// CSV "time,fluent,truth", ordered by (fluent, time).
std::string serialize_results(const MapAssignment& assignment);

struct ResultRow {
  int time = 0;
  std::string fluent;
  double value = 0.0;  // probability, or 1/0 for truth rows
};

/// Read either CSV form back, or recognize output (the trailing recognised
/// column is ignored); header line required.
std::vector<ResultRow> parse_results(std::string_view csv);

}  // namespace mlnec
