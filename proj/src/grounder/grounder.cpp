#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <unordered_map>

#include <omp.h>

#include "mlnec/error.hpp"
#include "mlnec/network.hpp"

namespace mlnec {

bool GroundClause::satisfied(const World& w) const {
  for (int l : lits)
    if (lit_true(l, w)) return true;
  return false;
}

int GroundNetwork::find_atom(const std::string& name) const {
  for (std::size_t i = 0; i < queries_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

void GroundNetwork::set_weights(const std::vector<double>& w) {
  if (w.size() != weights_.size())
    throw Error("weight vector has " + std::to_string(w.size()) + " entries, expected " +
                std::to_string(weights_.size()));
  weights_ = w;
  for (auto& c : clauses_) {
    if (c.hard) continue;
    c.weight = 0.0;
    for (const auto& k : c.contrib) c.weight += k.coeff * weights_[k.slot];
  }
}

bool GroundNetwork::hard_ok(const World& w) const {
  for (const auto& c : clauses_)
    if (c.hard && !c.satisfied(w)) return false;
  return true;
}

double GroundNetwork::score(const World& w) const {
  double s = 0.0;
  for (const auto& c : clauses_)
    if (!c.hard && c.satisfied(w)) s += c.weight;
  return s;
}

std::vector<double> GroundNetwork::counts(const World& w) const {
  std::vector<double> n(weights_.size(), 0.0);
  for (const auto& c : clauses_)
    if (!c.hard && c.satisfied(w))
      for (const auto& k : c.contrib) n[k.slot] += k.coeff;
  return n;
}

namespace {

struct RawClause {
  std::vector<int> lits;                              // query literals
  std::vector<std::pair<std::string, bool>> evidence;  // unsimplified mode only
  bool hard = false;
  int slot = -1;
  double coeff = 0.0;
  int formula = 0;
};

struct WorkItem {
  int formula;
  std::vector<Literal> literals;
  double coeff;
};

struct ItemResult {
  std::vector<RawClause> clauses;
  std::size_t pre = 0;
  std::size_t dropped = 0;
  std::size_t satisfied = 0;
  std::size_t falsified = 0;
  std::size_t tautologies = 0;
  std::exception_ptr error;
};

struct Context {
  const CompiledKB& ckb;
  const Narrative& narrative;
  GroundOptions options;
  Signature sig;
  std::unordered_map<std::string, int> fluent_index;
  int horizon = 0;
};

void ground_item(const Context& ctx, const WorkItem& item, ItemResult& out) {
  const CompiledFormula& f = ctx.ckb.formulas[item.formula];
  Clause c{item.literals, Weight::Hard(), ""};
  GroundingCursor cursor(c, ctx.sig);
  Clause g;
  while (cursor.next(g)) {
    ++out.pre;
    RawClause raw;
    raw.hard = f.hard();
    raw.slot = f.slot;
    raw.coeff = item.coeff;
    raw.formula = item.formula;
    bool sat = false;
    for (const auto& l : g.literals) {
      if (l.atom.predicate == kHoldsAt) {
        int fi = ctx.fluent_index.at(l.atom.args[0].str());
        int t = l.atom.args[1].value;
        raw.lits.push_back(make_lit(fi * (ctx.horizon + 1) + t, l.positive));
      } else if (ctx.options.simplify) {
        if (ctx.narrative.evidence_true(l.atom.str()) == l.positive) {
          sat = true;
          break;
        }
      } else {
        raw.evidence.emplace_back(l.atom.str(), l.positive);
      }
    }
    if (sat) {
      ++out.satisfied;
      continue;
    }
    std::sort(raw.lits.begin(), raw.lits.end(), [](int a, int b) {
      return lit_var(a) != lit_var(b) ? lit_var(a) < lit_var(b) : a < b;
    });
    raw.lits.erase(std::unique(raw.lits.begin(), raw.lits.end()), raw.lits.end());
    bool taut = false;
    for (std::size_t i = 1; i < raw.lits.size(); ++i)
      if (lit_var(raw.lits[i]) == lit_var(raw.lits[i - 1])) taut = true;
    std::sort(raw.evidence.begin(), raw.evidence.end());
    raw.evidence.erase(std::unique(raw.evidence.begin(), raw.evidence.end()), raw.evidence.end());
    for (std::size_t i = 1; i < raw.evidence.size(); ++i)
      if (raw.evidence[i].first == raw.evidence[i - 1].first) taut = true;
    if (taut) {
      ++out.tautologies;
      continue;
    }
    if (raw.lits.empty() && raw.evidence.empty()) {
      if (raw.hard)
        throw InconsistencyError("evidence falsifies hard ground clause " + g.str() + " of formula " +
                                 f.name(item.formula) + ": " + f.formula.str());
      ++out.falsified;
      continue;
    }
    out.clauses.push_back(std::move(raw));
  }
  out.dropped = cursor.dropped();
}

}  // namespace

class NetworkBuilder {
 public:
  static GroundNetwork build(const CompiledKB& ckb, const Narrative& narrative, const GroundOptions& options,
                             bool parallel) {
    Context ctx{ckb, narrative, options, ckb.signature, {}, narrative.horizon()};
    ctx.sig.set_horizon(narrative.horizon());

    GroundNetwork gn;
    gn.horizon_ = ctx.horizon;
    gn.weights_ = ckb.weights;
    for (const auto& t : ctx.sig.domain(kFluentSort)) {
      ctx.fluent_index[t.str()] = static_cast<int>(gn.fluents_.size());
      gn.fluents_.push_back(t.str());
    }
    for (const auto& fl : gn.fluents_)
      for (int t = 0; t <= ctx.horizon; ++t) {
        gn.queries_.push_back({fl, t});
        gn.names_.push_back(gn.queries_.back().str());
      }
    for (std::size_t i = 0; i < ckb.formulas.size(); ++i) gn.formula_names_.push_back(ckb.formulas[i].name(i));
    const int fixed_origin = static_cast<int>(gn.formula_names_.size());
    gn.formula_names_.push_back("fixed");
    const int evidence_origin = static_cast<int>(gn.formula_names_.size());
    gn.formula_names_.push_back("evidence");
    gn.pre_counts.assign(gn.formula_names_.size(), 0);

    std::vector<WorkItem> items;
    for (std::size_t i = 0; i < ckb.formulas.size(); ++i) {
      auto cnf = cnf_literals(ckb.formulas[i].formula);
      for (auto& lits : cnf)
        items.push_back({static_cast<int>(i), std::move(lits), 1.0 / static_cast<double>(cnf.size())});
    }

    std::vector<ItemResult> results(items.size());
    const long n_items = static_cast<long>(items.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long k = 0; k < n_items; ++k) {
      try {
        ground_item(ctx, items[k], results[k]);
      } catch (...) {
        results[k].error = std::current_exception();
      }
    }
    for (const auto& r : results)
      if (r.error) std::rethrow_exception(r.error);

    std::map<std::pair<bool, std::vector<int>>, std::size_t> seen;
    std::unordered_map<std::string, int> evidence_atoms;
    auto add = [&](std::vector<int> lits, bool hard, int slot, double coeff, int origin) {
      auto key = std::make_pair(hard, lits);
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(std::move(key), gn.clauses_.size());
        GroundClause c;
        c.lits = std::move(lits);
        c.hard = hard;
        if (!hard) c.contrib.push_back({slot, coeff});
        c.origins.push_back(origin);
        gn.clauses_.push_back(std::move(c));
        return;
      }
      ++gn.merged_duplicates;
      GroundClause& c = gn.clauses_[it->second];
      if (std::find(c.origins.begin(), c.origins.end(), origin) == c.origins.end()) c.origins.push_back(origin);
      if (hard) return;
      for (auto& k : c.contrib)
        if (k.slot == slot) {
          k.coeff += coeff;
          return;
        }
      c.contrib.push_back({slot, coeff});
    };

    for (std::size_t k = 0; k < items.size(); ++k) {
      ItemResult& r = results[k];
      gn.pre_counts[items[k].formula] += r.pre;
      gn.boundary_dropped += r.dropped;
      gn.satisfied_removed += r.satisfied;
      gn.falsified_soft_removed += r.falsified;
      gn.tautologies_removed += r.tautologies;
      for (auto& raw : r.clauses) {
        for (const auto& [name, positive] : raw.evidence) {
          auto [it, inserted] = evidence_atoms.emplace(name, static_cast<int>(gn.names_.size()));
          if (inserted) gn.names_.push_back(name);
          raw.lits.push_back(make_lit(it->second, positive));
        }
        std::sort(raw.lits.begin(), raw.lits.end(), [](int a, int b) { return lit_var(a) < lit_var(b); });
        add(std::move(raw.lits), raw.hard, raw.slot, raw.coeff, raw.formula);
      }
    }

    for (const auto& fx : narrative.fixed()) {
      int idx = ctx.fluent_index.count(fx.atom.args[0].str())
                    ? gn.atom_index(ctx.fluent_index.at(fx.atom.args[0].str()), fx.time)
                    : -1;
      if (idx < 0 || fx.time > ctx.horizon) throw Error("fixed atom outside the network: " + fx.key);
      ++gn.pre_counts[fixed_origin];
      add({make_lit(idx, fx.truth)}, true, -1, 0.0, fixed_origin);
    }
    if (!options.simplify) {
      for (std::size_t i = gn.queries_.size(); i < gn.names_.size(); ++i) {
        ++gn.pre_counts[evidence_origin];
        add({make_lit(static_cast<int>(i), narrative.evidence_true(gn.names_[i]))}, true, -1, 0.0, evidence_origin);
      }
    }
    gn.set_weights(gn.weights_);
    return gn;
  }
};

GroundNetwork ground(const CompiledKB& ckb, const Narrative& narrative, const GroundOptions& options) {
  return NetworkBuilder::build(ckb, narrative, options, true);
}

GroundNetwork ground_serial(const CompiledKB& ckb, const Narrative& narrative, const GroundOptions& options) {
  return NetworkBuilder::build(ckb, narrative, options, false);
}

GroundNetwork make_network(std::size_t atoms, std::vector<GroundClause> clauses, std::vector<double> weights) {
  GroundNetwork gn;
  gn.horizon_ = atoms == 0 ? 0 : static_cast<int>(atoms) - 1;
  if (atoms > 0) gn.fluents_.push_back("x");
  for (std::size_t i = 0; i < atoms; ++i) {
    gn.queries_.push_back({"x", static_cast<int>(i)});
    gn.names_.push_back(gn.queries_.back().str());
  }
  gn.weights_ = std::move(weights);
  for (auto& c : clauses) {
    for (int l : c.lits)
      if (l == 0 || static_cast<std::size_t>(lit_var(l)) >= atoms) throw Error("literal out of range");
    std::sort(c.lits.begin(), c.lits.end(), [](int a, int b) { return lit_var(a) < lit_var(b) || (lit_var(a) == lit_var(b) && a < b); });
    c.lits.erase(std::unique(c.lits.begin(), c.lits.end()), c.lits.end());
    for (std::size_t i = 1; i < c.lits.size(); ++i)
      if (lit_var(c.lits[i]) == lit_var(c.lits[i - 1])) throw Error("tautological clause");
    for (const auto& k : c.contrib)
      if (!c.hard && (k.slot < 0 || static_cast<std::size_t>(k.slot) >= gn.weights_.size()))
        throw Error("clause contribution refers to a missing slot");
  }
  gn.clauses_ = std::move(clauses);
  gn.formula_names_.clear();
  for (std::size_t j = 0; j < gn.weights_.size(); ++j) gn.formula_names_.push_back("w" + std::to_string(j));
  gn.pre_counts.assign(gn.formula_names_.size(), 0);
  gn.set_weights(gn.weights_);
  return gn;
}

NetworkStats network_stats(const GroundNetwork& gn) {
  NetworkStats s;
  s.atom_count = gn.atom_count();
  s.clause_count = gn.clauses().size();
  s.boundary_dropped = gn.boundary_dropped;
  s.satisfied_removed = gn.satisfied_removed;
  s.falsified_soft_removed = gn.falsified_soft_removed;
  for (std::size_t i = 0; i < gn.formula_names().size(); ++i) {
    FormulaStats f{gn.formula_names()[i], i < gn.pre_counts.size() ? gn.pre_counts[i] : 0, 0};
    s.pre_clause_count += f.pre;
    s.per_formula.push_back(std::move(f));
  }
  for (const auto& c : gn.clauses()) {
    if (c.hard) ++s.hard_clause_count;
    if (!c.origins.empty() && static_cast<std::size_t>(c.origins[0]) < s.per_formula.size())
      ++s.per_formula[c.origins[0]].post;
  }
  return s;
}

std::string format_stats(const NetworkStats& s) {
  std::string out;
  out += "atoms " + std::to_string(s.atom_count) + "\n";
  out += "clauses " + std::to_string(s.clause_count) + " (hard " + std::to_string(s.hard_clause_count) + ")\n";
  out += "pre_simplification_clauses " + std::to_string(s.pre_clause_count) + "\n";
  out += "boundary_dropped " + std::to_string(s.boundary_dropped) + "\n";
  out += "satisfied_by_evidence " + std::to_string(s.satisfied_removed) + "\n";
  out += "falsified_soft " + std::to_string(s.falsified_soft_removed) + "\n";
  out += "formula,pre,post\n";
  for (const auto& f : s.per_formula)
    if (f.pre || f.post) out += f.name + "," + std::to_string(f.pre) + "," + std::to_string(f.post) + "\n";
  return out;
}

std::string dump_network(const GroundNetwork& gn) {
  std::string out = "# atoms " + std::to_string(gn.atom_count()) + "\n";
  for (std::size_t i = 0; i < gn.atom_count(); ++i) out += std::to_string(i + 1) + " " + gn.atom_name(i) + "\n";
  out += "# clauses " + std::to_string(gn.clauses().size()) + "\n";
  char buf[32];
  for (const auto& c : gn.clauses()) {
    if (c.hard) {
      out += "hard";
    } else {
      std::snprintf(buf, sizeof buf, "%.10g", c.weight);
      out += buf;
    }
    for (int l : c.lits) out += " " + std::to_string(lit_positive(l) ? lit_var(l) + 1 : -(lit_var(l) + 1));
    out += "\n";
  }
  return out;
}

}  // namespace mlnec
