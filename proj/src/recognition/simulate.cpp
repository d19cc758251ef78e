// Scenario-driven synthetic narratives and crisp Event Calculus annotation.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <regex>

#include <json.hpp>

#include "mlnec/error.hpp"
#include "mlnec/recognition.hpp"

namespace mlnec {

namespace {

constexpr const char* kBundledKb =
#include "bundled_kb.inc"
    ;

using json = nlohmann::json;

struct Instance {
  Term fluent;
  Binding binding;  // head variables -> constants
  const FluentDefinition* def;
};

std::vector<Instance> fluent_instances(const CompletedKB& completed, const Signature& sig) {
  std::vector<Instance> out;
  std::vector<Term> domain = sig.domain(kFluentSort);
  for (const auto& def : completed.fluents)
    for (const auto& g : domain) {
      if (g.kind != Term::Kind::Function || g.name != def.fluent || g.args.size() != def.head.args.size()) continue;
      Instance inst{g, {}, &def};
      for (std::size_t i = 0; i < g.args.size(); ++i) inst.binding[def.head.args[i].name] = g.args[i];
      out.push_back(std::move(inst));
    }
  return out;
}

Atom holds_atom(const Term& fluent, int t) { return Atom{kHoldsAt, {fluent, Term::time(t)}}; }

// ---------------------------------------------------------------------------
// Random walkers

struct WalkerConfig {
  std::vector<std::string> entities;
  std::vector<std::pair<std::string, double>> activities;
  double stay = 0.85;
  double exit_probability = 0.01;
  double enter_probability = 0.2;
  std::vector<int> close_levels;
  double together_switch = 0.05;
  double orientation_agree = 0.9;
  double orientation_noise = 0.1;
};

double activity_speed(const std::string& a) {
  if (a == "walking") return 2.0;
  if (a == "running") return 5.0;
  return 0.5;
}

WalkerConfig walker_config(const json& j, const Signature& sig) {
  WalkerConfig c;
  if (j.contains("entities")) {
    c.entities = j.at("entities").get<std::vector<std::string>>();
  } else if (const Sort* s = sig.sort(j.value("entity_sort", std::string("person")))) {
    c.entities = s->constants;
  }
  if (j.contains("activities")) {
    for (const auto& [k, v] : j.at("activities").items()) c.activities.emplace_back(k, v.get<double>());
  } else {
    c.activities = {{"walking", 0.4}, {"active", 0.25}, {"inactive", 0.25}, {"running", 0.1}};
  }
  c.stay = j.value("stay", c.stay);
  c.exit_probability = j.value("exit_probability", c.exit_probability);
  c.enter_probability = j.value("enter_probability", c.enter_probability);
  c.together_switch = j.value("together_switch", c.together_switch);
  c.orientation_agree = j.value("orientation_agree", c.orientation_agree);
  c.orientation_noise = j.value("orientation_noise", c.orientation_noise);
  if (j.contains("close_levels")) {
    c.close_levels = j.at("close_levels").get<std::vector<int>>();
  } else if (const Sort* s = sig.sort("distance")) {
    for (const auto& k : s->constants) c.close_levels.push_back(std::stoi(k));
  }
  if (c.entities.size() < 2) throw Error("walkers need at least two entities");
  if (c.activities.empty()) throw Error("walkers need at least one activity");
  return c;
}

void walk(const WalkerConfig& c, int horizon, std::mt19937_64& rng, std::vector<std::string>& lines) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> mix;
  for (const auto& a : c.activities) mix.push_back(a.second);
  std::discrete_distribution<std::size_t> pick(mix.begin(), mix.end());
  const std::size_t n = c.entities.size();
  std::vector<bool> present(n, true);
  std::vector<std::size_t> act(n);
  for (auto& a : act) a = pick(rng);

  struct Pair {
    std::size_t a, b;
    double d;
    bool together;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) pairs.push_back({a, b, 5.0 + 45.0 * unit(rng), false});

  for (int t = 0; t <= horizon; ++t) {
    const std::string ts = std::to_string(t);
    for (std::size_t e = 0; e < n; ++e) {
      const std::string& id = c.entities[e];
      if (present[e]) {
        if (unit(rng) < c.exit_probability) {
          present[e] = false;
          lines.push_back("happens(exit(" + id + ")," + ts + ")");
          continue;
        }
        if (unit(rng) >= c.stay) act[e] = pick(rng);
        lines.push_back("happens(" + c.activities[act[e]].first + "(" + id + ")," + ts + ")");
      } else if (unit(rng) < c.enter_probability) {
        present[e] = true;
        act[e] = pick(rng);
        lines.push_back("happens(enter(" + id + ")," + ts + ")");
      }
    }
    for (auto& p : pairs) {
      if (unit(rng) < c.together_switch) p.together = !p.together;
      double speed = std::max(activity_speed(c.activities[act[p.a]].first), activity_speed(c.activities[act[p.b]].first));
      double target = p.together ? 12.0 : 45.0;
      std::normal_distribution<double> step(0.0, speed);
      p.d = std::clamp(p.d + 0.15 * (target - p.d) + step(rng), 0.0, 80.0);
      if (!present[p.a] || !present[p.b]) continue;
      const std::string& x = c.entities[p.a];
      const std::string& y = c.entities[p.b];
      for (int level : c.close_levels)
        if (p.d <= level) {
          lines.push_back("close(" + x + "," + y + "," + std::to_string(level) + "," + ts + ")");
          lines.push_back("close(" + y + "," + x + "," + std::to_string(level) + "," + ts + ")");
        }
      bool both_walking = c.activities[act[p.a]].first == "walking" && c.activities[act[p.b]].first == "walking";
      double q = both_walking && p.together ? c.orientation_agree : c.orientation_noise;
      if (unit(rng) < q) {
        lines.push_back("orientationMove(" + x + "," + y + "," + ts + ")");
        lines.push_back("orientationMove(" + y + "," + x + "," + ts + ")");
      }
    }
  }
}

std::string bind_time(const std::string& atom, int t) {
  static const std::regex var(R"(\bT\b)");
  return std::regex_replace(atom, var, std::to_string(t));
}

}  // namespace

std::string_view bundled_kb_text() { return kBundledKb; }

void annotate_crisp(const CompletedKB& completed, Narrative& narrative) {
  Signature sig = completed.signature;
  sig.set_horizon(narrative.horizon());
  std::vector<Instance> inst = fluent_instances(completed, sig);
  std::map<std::pair<std::string, int>, bool> forced;
  for (const auto& f : narrative.fixed()) forced[{f.atom.args[0].str(), f.time}] = f.truth;

  std::vector<std::string> keys;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    keys.push_back(inst[i].fluent.str());
    index[keys.back()] = i;
  }
  auto apply_forced = [&](std::vector<char>& state, int t) {
    for (std::size_t i = 0; i < inst.size(); ++i) {
      auto it = forced.find({keys[i], t});
      if (it != forced.end()) state[i] = it->second;
    }
  };
  std::vector<char> state(inst.size(), 0);
  apply_forced(state, 0);
  narrative.clear_annotation();
  for (int t = 0;; ++t) {
    for (std::size_t i = 0; i < inst.size(); ++i)
      if (state[i]) narrative.add_annotation(holds_atom(inst[i].fluent, t), true, t);
    if (t == narrative.horizon()) break;
    auto truth = [&](const Atom& a) -> bool {
      if (a.predicate == kHoldsAt) {
        auto it = index.find(a.args[0].str());
        return it != index.end() && state[it->second];
      }
      return narrative.evidence_true(a.str());
    };
    std::vector<char> next(state);
    for (std::size_t i = 0; i < inst.size(); ++i) {
      Binding b = inst[i].binding;
      b[inst[i].def->time_var] = Term::time(t);
      auto fires = [&](const std::vector<Formula>& bodies) {
        for (const auto& body : bodies) {
          auto g = substitute(body, b, sig);
          if (g && evaluate(*g, truth)) return true;
        }
        return false;
      };
      if (fires(inst[i].def->term))
        next[i] = 0;
      else if (fires(inst[i].def->init))
        next[i] = 1;
    }
    apply_forced(next, t + 1);
    state = std::move(next);
  }
}

Narrative simulate(std::string_view scenario_json, const KnowledgeBaseSource& kb, std::optional<std::uint64_t> seed) {
  json spec;
  try {
    spec = json::parse(scenario_json.empty() ? std::string_view("{}") : scenario_json);
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
  if (!spec.is_object()) throw Error("scenario: expected a JSON object");
  try {
    const int horizon = spec.value("horizon", 0);
    if (horizon < 0) throw Error("scenario: negative horizon");
    std::uint64_t s = seed ? *seed : spec.value("seed", std::uint64_t{1});
    std::mt19937_64 rng(s);

    std::vector<std::string> lines;
    lines.push_back("horizon " + std::to_string(horizon));
    Signature sig = kb.signature;
    if (spec.value("fix_initial", false) || spec.contains("initially")) {
      std::vector<std::string> on;
      if (spec.contains("initially")) on = spec.at("initially").get<std::vector<std::string>>();
      std::vector<std::string> all;
      for (const auto& f : sig.domain(kFluentSort)) all.push_back(f.str());
      for (const auto& o : on)
        if (std::find(all.begin(), all.end(), o) == all.end()) throw Error("scenario: unknown fluent " + o);
      if (spec.value("fix_initial", false)) {
        for (const auto& f : all) {
          bool v = std::find(on.begin(), on.end(), f) != on.end();
          lines.push_back(std::string("fix ") + (v ? "" : "!") + "holdsAt(" + f + ",0)");
        }
      } else {
        for (const auto& o : on) lines.push_back("fix holdsAt(" + o + ",0)");
      }
    }
    if (spec.contains("evidence"))
      for (const auto& a : spec.at("evidence").get<std::vector<std::string>>()) lines.push_back(a);
    if (spec.contains("script"))
      for (const auto& block : spec.at("script")) {
        int from = block.at("from").get<int>();
        int to = block.value("to", from);
        for (int t = from; t <= to; ++t)
          for (const auto& a : block.at("atoms").get<std::vector<std::string>>()) lines.push_back(bind_time(a, t));
      }
    if (spec.contains("walkers")) walk(walker_config(spec.at("walkers"), sig), horizon, rng, lines);

    std::string text;
    for (const auto& l : lines) text += l + "\n";
    Narrative n = parse_narrative(text, sig);
    if (spec.value("annotation", false)) annotate_crisp(complete(kb), n);
    return n;
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
}

std::vector<std::string> preset_names() { return {"fig1", "inertia-decay", "random-walkers"}; }

std::string preset_scenario(std::string_view name) {
  if (name == "fig1")
    return R"json({
  "horizon": 30,
  "fix_initial": true,
  "annotation": true,
  "evidence": [
    "happens(active(id1),3)", "close(id1,id2,25,3)", "close(id1,id2,34,3)",
    "happens(inactive(id1),10)", "close(id1,id2,25,10)", "close(id1,id2,34,10)",
    "happens(walking(id1),20)"
  ]
})json";
  if (name == "inertia-decay")
    return R"json({
  "horizon": 20,
  "fix_initial": true,
  "initially": ["meeting(id1,id2)"],
  "annotation": false
})json";
  if (name == "random-walkers")
    return R"json({
  "horizon": 100,
  "seed": 1,
  "fix_initial": true,
  "annotation": true,
  "walkers": {}
})json";
  throw Error("unknown preset " + std::string(name));
}

}  // namespace mlnec
