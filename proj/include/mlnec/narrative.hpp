#pragma once

// Time-indexed evidence (SDEs and spatial constraints), optional CE
// annotation and fixed fluent values.

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mlnec/logic.hpp"

namespace mlnec {

struct GroundFact {
  Atom atom;
  bool truth = true;
  int time = -1;  // -1 for atoms without a time argument
  std::string key;

  friend bool operator==(const GroundFact& a, const GroundFact& b) { return a.key == b.key && a.truth == b.truth; }
};

/// A narrative under the closed-world assumption: evidence atoms not listed
/// are false, and an explicitly negated atom is equivalent to an absent one.
class Narrative {
 public:
  int horizon() const { return horizon_; }
  /// True when the horizon was given explicitly rather than inferred.
  bool explicit_horizon() const { return explicit_horizon_; }
  void set_horizon(int t_max, bool explicit_value = true);

  /// Add an evidence atom. Throws Error if it contradicts an earlier entry.
  void add_evidence(const Atom& atom, bool truth, int time);
  /// Add an annotation atom (ground holdsAt) with its truth value.
  void add_annotation(const Atom& atom, bool truth, int time);
  /// Fix a query atom to a value; grounds to a HARD unit clause.
  void add_fixed(const Atom& atom, bool truth, int time);

  const std::vector<GroundFact>& evidence() const { return evidence_; }
  const std::vector<GroundFact>& annotation() const { return annotation_; }
  const std::vector<GroundFact>& fixed() const { return fixed_; }
  bool has_annotation() const { return !annotation_.empty(); }

  /// Closed-world truth of an evidence atom, by canonical key.
  bool evidence_true(const std::string& key) const;
  /// Annotated truth of a holdsAt atom (absent = false).
  bool annotated(const std::string& key) const;

  void clear_annotation();
  /// Keep only evidence entries satisfying a predicate.
  template <typename Pred>
  void filter_evidence(Pred&& keep) {
    std::vector<GroundFact> kept;
    for (auto& f : evidence_)
      if (keep(f)) kept.push_back(std::move(f));
    evidence_ = std::move(kept);
    reindex();
  }

 private:
  void reindex();
  void bump(int time);

  int horizon_ = 0;
  bool explicit_horizon_ = false;
  std::vector<GroundFact> evidence_;
  std::vector<GroundFact> annotation_;
  std::vector<GroundFact> fixed_;
  std::unordered_map<std::string, bool> evidence_index_;
  std::unordered_map<std::string, bool> annotation_index_;
};

/// Index of the time-sorted argument of a predicate, or -1.
int time_argument(const Atom& atom, const Signature& sig);

/// Parse a narrative (.evid). Lines hold one ground atom each with an
/// optional '!' prefix; "horizon N" fixes the horizon; "fix [!]holdsAt(...)"
/// fixes a query atom; holdsAt lines are annotation.
Narrative parse_narrative(std::string_view text, const Signature& sig);
Narrative load_narrative(const std::string& path, const Signature& sig);

/// Merge an annotation file (.ann: holdsAt lines or CSV time,fluent,truth)
/// into a narrative.
void parse_annotation(std::string_view text, const Signature& sig, Narrative& narrative);

/// Canonical text form; entries ordered by time then text.
std::string serialize_narrative(const Narrative& narrative);

}  // namespace mlnec
