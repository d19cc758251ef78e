// Engine selection, recognition, marginal series and manifests.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "mlnec/error.hpp"
#include "mlnec/recognition.hpp"

namespace mlnec {

namespace {

std::size_t largest_component(const GroundNetwork& gn) {
  std::size_t m = 0;
  for (const auto& c : components(gn)) m = std::max(m, c.vars.size());
  return m;
}

EliminationOptions ve_options(const RecognizeOptions& o) {
  EliminationOptions e;
  e.max_clique = o.max_clique;
  return e;
}

}  // namespace

std::optional<Engine> engine_from_name(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "auto") return Engine::Auto;
  if (s == "exact" || s == "enumeration") return Engine::Exact;
  if (s == "elimination" || s == "ve") return Engine::Elimination;
  if (s == "mcsat") return Engine::McSat;
  if (s == "bnb" || s == "branch-and-bound") return Engine::BranchAndBound;
  if (s == "localsearch" || s == "maxwalksat") return Engine::LocalSearch;
  return std::nullopt;
}

const char* engine_name(Engine e) {
  switch (e) {
    case Engine::Auto:
      return "auto";
    case Engine::Exact:
      return "exact";
    case Engine::Elimination:
      return "elimination";
    case Engine::McSat:
      return "mcsat";
    case Engine::BranchAndBound:
      return "bnb";
    case Engine::LocalSearch:
      return "localsearch";
  }
  return "auto";
}

MarginalTable infer_marginals(const GroundNetwork& gn, const RecognizeOptions& o) {
  Engine e = o.engine;
  if (e == Engine::Auto) {
    if (largest_component(gn) <= o.exact_cap)
      e = Engine::Exact;
    else if (elimination_width(gn) <= o.max_clique)
      e = Engine::Elimination;
    else
      e = Engine::McSat;
  }
  switch (e) {
    case Engine::Exact:
      return exact_marginals(gn, o.exact_cap);
    case Engine::Elimination:
      return ve_marginals(gn, ve_options(o));
    case Engine::McSat:
      return mcsat_marginals(gn, o.mcsat);
    default:
      throw Error(std::string("engine ") + engine_name(e) + " does not compute marginals");
  }
}

MapAssignment infer_map(const GroundNetwork& gn, const RecognizeOptions& o) {
  Engine e = o.engine;
  if (e == Engine::Auto) {
    if (largest_component(gn) <= o.map_cap)
      e = Engine::BranchAndBound;
    else if (elimination_width(gn) <= o.max_clique)
      e = Engine::Elimination;
    else
      e = Engine::LocalSearch;
  }
  switch (e) {
    case Engine::BranchAndBound:
    case Engine::Exact:
      return map_exact(gn, o.map_cap);
    case Engine::Elimination:
      return ve_map(gn, ve_options(o));
    case Engine::LocalSearch:
      return map_localsearch(gn, o.localsearch);
    default:
      throw Error(std::string("engine ") + engine_name(e) + " does not compute MAP assignments");
  }
}

Recognition recognize(const GroundNetwork& gn, const RecognizeOptions& o) {
  Recognition r;
  r.horizon = gn.horizon();
  if (o.mode == RecognitionMode::Marginal) {
    MarginalTable t = infer_marginals(gn, o);
    r.atoms = std::move(t.atoms);
    r.probability = std::move(t.probability);
    r.method = t.method;
    r.recognised.resize(r.probability.size());
    for (std::size_t i = 0; i < r.probability.size(); ++i) r.recognised[i] = r.probability[i] >= o.threshold;
  } else {
    MapAssignment m = infer_map(gn, o);
    r.atoms = std::move(m.atoms);
    r.recognised = m.truth;
    r.probability.resize(m.truth.size());
    for (std::size_t i = 0; i < m.truth.size(); ++i) r.probability[i] = m.truth[i] ? 1.0 : 0.0;
    r.method = "map";
    r.best_effort = m.best_effort;
  }
  return r;
}

Recognition recognize(const CompiledKB& ckb, const Narrative& narrative, const RecognizeOptions& o) {
  GroundNetwork gn;
  try {
    gn = ground(ckb, narrative);
  } catch (const std::exception& e) {
    throw Error(std::string("ground: ") + e.what());
  }
  try {
    return recognize(gn, o);
  } catch (const std::exception& e) {
    throw Error(std::string("infer: ") + e.what());
  }
}

Recognition recognition_from_results(std::string_view csv, double threshold) {
  Recognition r;
  for (const auto& row : parse_results(csv)) {
    r.atoms.push_back({row.fluent, row.time});
    r.probability.push_back(row.value);
    r.recognised.push_back(row.value >= threshold);
    r.horizon = std::max(r.horizon, row.time);
  }
  r.method = "results";
  return r;
}

std::vector<SeriesPoint> fluent_series(const CompiledKB& ckb, const Narrative& narrative, const std::string& fluent,
                                       const RecognizeOptions& options) {
  GroundNetwork gn = ground(ckb, narrative);
  std::size_t f = 0;
  while (f < gn.fluents().size() && gn.fluents()[f] != fluent) ++f;
  if (f == gn.fluents().size()) throw Error("unknown fluent instance " + fluent);
  MarginalTable t = infer_marginals(gn, options);
  std::vector<SeriesPoint> out;
  for (int time = 0; time <= gn.horizon(); ++time) out.push_back({time, t.probability[gn.atom_index(f, time)]});
  return out;
}

std::string format_series(const std::vector<SeriesPoint>& series) {
  std::string out = "time,probability\n";
  char buf[64];
  for (const auto& p : series) {
    std::snprintf(buf, sizeof buf, "%d,%.6f\n", p.time, p.probability);
    out += buf;
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::string& base_dir) {
  std::vector<ManifestEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
    return path.string();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> fields;
    for (std::string f; ls >> f;) fields.push_back(f);
    if (fields.empty()) continue;
    ManifestEntry e;
    for (const auto& f : fields) {
      if (f.rfind("fold=", 0) == 0) {
        try {
          e.fold = std::stoi(f.substr(5));
        } catch (const std::exception&) {
          throw ParseError("bad fold number '" + f + "'", lineno, 1);
        }
      } else if (e.narrative.empty()) {
        e.narrative = resolve(f);
      } else if (e.annotation.empty()) {
        e.annotation = resolve(f);
      } else {
        throw ParseError("too many fields in manifest line", lineno, 1);
      }
    }
    if (e.narrative.empty()) throw ParseError("manifest line without a narrative", lineno, 1);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  return with_file(path, [&] { return parse_manifest(read_file(path), std::filesystem::path(path).parent_path().string()); });
}

}  // namespace mlnec
