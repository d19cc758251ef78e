// Random erasure of evidence intervals.

#include <random>
#include <set>

#include "mlnec/error.hpp"
#include "mlnec/recognition.hpp"

namespace mlnec {

namespace {

void collect_constants(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Constant) out.insert(t.name);
  for (const auto& a : t.args) collect_constants(a, out);
}

}  // namespace

std::vector<std::size_t> entities_per_time(const Narrative& narrative) {
  std::vector<std::set<std::string>> seen(static_cast<std::size_t>(narrative.horizon()) + 1);
  for (const auto& f : narrative.evidence()) {
    if (!f.truth || f.time < 0 || f.atom.predicate != kHappens || f.atom.args.empty()) continue;
    collect_constants(f.atom.args[0], seen[f.time]);
  }
  std::vector<std::size_t> out(seen.size());
  for (std::size_t t = 0; t < seen.size(); ++t) out[t] = seen[t].size();
  return out;
}

std::vector<int> eligible_timepoints(const Narrative& narrative, std::size_t min_entities) {
  auto counts = entities_per_time(narrative);
  std::vector<int> out;
  for (std::size_t t = 0; t < counts.size(); ++t)
    if (counts[t] >= min_entities) out.push_back(static_cast<int>(t));
  return out;
}

std::vector<AblatedNarrative> ablate(const Narrative& narrative, const AblationSpec& spec) {
  if (!(spec.start_probability >= 0.0 && spec.start_probability <= 1.0))
    throw Error("ablation start probability must lie in [0,1]");
  for (int l : spec.lengths)
    if (l <= 0) throw Error("ablation interval lengths must be positive");
  if (spec.repetitions < 0) throw Error("ablation repetitions must be non-negative");

  const std::vector<int> eligible = eligible_timepoints(narrative, spec.min_entities);
  std::vector<AblatedNarrative> out;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(rep)));
    std::bernoulli_distribution start(spec.start_probability);
    std::vector<int> starts;
    for (int t : eligible)
      if (start(rng)) starts.push_back(t);
    for (int length : spec.lengths) {
      std::vector<char> erased(static_cast<std::size_t>(narrative.horizon()) + 1, 0);
      for (int s : starts)
        for (int t = s; t < s + length && t <= narrative.horizon(); ++t) erased[t] = 1;
      AblatedNarrative a;
      a.length = length;
      a.repetition = rep;
      a.starts = starts;
      a.narrative = narrative;
      std::size_t before = a.narrative.evidence().size();
      a.narrative.filter_evidence([&](const GroundFact& f) { return f.time < 0 || !erased[f.time]; });
      a.erased = before - a.narrative.evidence().size();
      out.push_back(std::move(a));
    }
  }
  return out;
}

}  // namespace mlnec
