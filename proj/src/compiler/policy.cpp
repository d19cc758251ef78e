#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "mlnec/compiler.hpp"
#include "mlnec/error.hpp"

namespace mlnec {

std::string CompiledFormula::name(std::size_t index) const {
  std::string s = fluent.empty() ? std::string("constraint") : fluent + "/" + role_tag(role);
  return s + "/" + std::to_string(index);
}

void CompiledKB::assign_slots() {
  weights.clear();
  std::map<std::string, int> groups;
  for (auto& f : formulas) {
    if (f.hard()) {
      f.slot = -1;
      continue;
    }
    if (!f.group.empty()) {
      auto it = groups.find(f.group);
      if (it != groups.end()) {
        f.slot = it->second;
        f.weight.value = weights[f.slot];
        continue;
      }
      groups[f.group] = static_cast<int>(weights.size());
    }
    f.slot = static_cast<int>(weights.size());
    weights.push_back(f.weight.value);
  }
}

void CompiledKB::set_weights(const std::vector<double>& w) {
  if (w.size() != weights.size())
    throw Error("weight vector has " + std::to_string(w.size()) + " entries, expected " +
                std::to_string(weights.size()));
  weights = w;
  for (auto& f : formulas)
    if (f.slot >= 0) f.weight.value = weights[f.slot];
}

std::vector<std::string> CompiledKB::slot_names() const {
  std::vector<std::string> names(weights.size());
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const auto& f = formulas[i];
    if (f.slot < 0 || !names[f.slot].empty()) continue;
    names[f.slot] = f.group.empty() ? f.name(i) : f.group;
  }
  return names;
}

const char* variant_name(InertiaVariant v) {
  switch (v) {
    case InertiaVariant::HI:
      return "HI";
    case InertiaVariant::SI_h:
      return "SI_h";
    case InertiaVariant::SI_negh:
      return "SI_negh";
    case InertiaVariant::SI:
      return "SI";
    case InertiaVariant::SI_eq:
      return "SI_eq";
  }
  return "HI";
}

std::optional<InertiaVariant> variant_from_name(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  for (auto v : {InertiaVariant::HI, InertiaVariant::SI_h, InertiaVariant::SI_negh, InertiaVariant::SI,
                 InertiaVariant::SI_eq})
    if (lower(name) == lower(variant_name(v))) return v;
  return std::nullopt;
}

namespace {

bool softened(InertiaVariant v, FormulaRole role) {
  switch (v) {
    case InertiaVariant::HI:
      return false;
    case InertiaVariant::SI_h:
      return role == FormulaRole::Persists;
    case InertiaVariant::SI_negh:
      return role == FormulaRole::PersistsNeg;
    case InertiaVariant::SI:
    case InertiaVariant::SI_eq:
      return true;
  }
  return false;
}

}  // namespace

CompiledKB apply_policy(CompiledKB ckb, const InertiaPolicy& policy, bool sigma_soft, double default_weight) {
  auto soft_value = [&](const WeightSpec& w) {
    return WeightSpec::soft(w.kind == WeightSpec::Kind::Soft ? w.value : default_weight);
  };

  std::size_t n_soft_inertia = 0;
  for (const auto& f : ckb.formulas)
    if (is_inertia(f.role) && softened(policy.variant, f.role)) ++n_soft_inertia;
  if (policy.variant == InertiaVariant::SI_eq) {
    if (policy.weights.size() > 1)
      throw Error("SI_eq takes a single inertia weight, got " + std::to_string(policy.weights.size()));
  } else if (!policy.weights.empty() && policy.weights.size() != n_soft_inertia) {
    throw Error(std::string("policy ") + variant_name(policy.variant) + " softens " + std::to_string(n_soft_inertia) +
                " inertia formulas but " + std::to_string(policy.weights.size()) + " weights were given");
  }

  std::size_t k = 0;
  for (auto& f : ckb.formulas) {
    switch (f.role) {
      case FormulaRole::Initiates:
      case FormulaRole::Terminates:
        if (!sigma_soft || f.weight.kind == WeightSpec::Kind::Hard)
          f.weight = WeightSpec::hard();
        else
          f.weight = soft_value(f.weight);
        break;
      case FormulaRole::Persists:
      case FormulaRole::PersistsNeg:
        if (!softened(policy.variant, f.role)) {
          f.weight = WeightSpec::hard();
          f.group.clear();
        } else if (policy.variant == InertiaVariant::SI_eq) {
          f.weight = policy.weights.empty() ? soft_value(f.weight) : WeightSpec::soft(policy.weights[0]);
          f.group = "inertia";
        } else {
          f.weight = policy.weights.empty() ? soft_value(f.weight) : WeightSpec::soft(policy.weights[k]);
          ++k;
        }
        break;
      case FormulaRole::Constraint:
        if (f.weight.kind == WeightSpec::Kind::Unspecified) f.weight = WeightSpec::hard();
        break;
    }
    if (f.weight.kind == WeightSpec::Kind::Soft && !std::isfinite(f.weight.value))
      throw NumericError("non-finite weight");
  }
  if (policy.variant == InertiaVariant::SI_eq && policy.weights.empty()) {
    // One shared value: take the first softened inertia weight.
    for (const auto& f : ckb.formulas)
      if (f.group == "inertia" && is_inertia(f.role)) {
        double w = f.weight.value;
        for (auto& g : ckb.formulas)
          if (g.group == "inertia" && is_inertia(g.role)) g.weight.value = w;
        break;
      }
  }
  ckb.assign_slots();
  return ckb;
}

CompiledKB compile(const KnowledgeBaseSource& kb, const InertiaPolicy& policy, bool sigma_soft, double default_weight) {
  return apply_policy(specialize_axioms(complete(kb)), policy, sigma_soft, default_weight);
}

CompiledKB from_compiled_source(const KnowledgeBaseSource& kb) {
  CompiledKB ckb;
  ckb.signature = kb.signature;
  for (const auto& r : kb.rules) {
    if (!r.role)
      throw UnsupportedError("line " + std::to_string(r.line) + ": untagged rule in a compiled knowledge base");
    CompiledFormula cf;
    cf.formula = r.formula;
    cf.rule_syntax = r.rule_syntax;
    cf.role = *r.role;
    cf.group = r.group;
    cf.weight = r.weight.kind == WeightSpec::Kind::Unspecified ? WeightSpec::hard() : r.weight;
    if (cf.role != FormulaRole::Constraint) {
      const Formula* head = r.rule_syntax ? &r.head() : nullptr;
      if (head && head->op == Formula::Op::Not) head = &head->kids[0];
      if (!head || head->op != Formula::Op::Atom || head->atom.predicate != kHoldsAt ||
          head->atom.args[0].kind != Term::Kind::Function)
        throw UnsupportedError("line " + std::to_string(r.line) + ": compiled " + role_tag(cf.role) +
                               " formula must have a holdsAt head");
      cf.fluent = head->atom.args[0].name;
    }
    ckb.formulas.push_back(std::move(cf));
  }
  ckb.assign_slots();
  return ckb;
}

CompiledKB load_compiled(const KnowledgeBaseSource& kb, const std::optional<InertiaPolicy>& policy, bool sigma_soft,
                         double default_weight) {
  if (kb.compiled()) {
    CompiledKB ckb = from_compiled_source(kb);
    return policy ? apply_policy(std::move(ckb), *policy, sigma_soft, default_weight) : ckb;
  }
  return compile(kb, policy.value_or(InertiaPolicy{}), sigma_soft, default_weight);
}

namespace {

void set_slots(CompiledKB& ckb, bool inertia, double w) {
  std::vector<double> weights = ckb.weights;
  for (const auto& f : ckb.formulas)
    if (f.slot >= 0 && f.role != FormulaRole::Constraint && is_inertia(f.role) == inertia) weights[f.slot] = w;
  ckb.set_weights(weights);
}

}  // namespace

void set_inertia_weight(CompiledKB& ckb, double w) { set_slots(ckb, true, w); }

void set_effect_weight(CompiledKB& ckb, double w) { set_slots(ckb, false, w); }

KnowledgeBaseSource to_source(const CompiledKB& ckb) {
  KnowledgeBaseSource kb;
  kb.signature = ckb.signature;
  for (const auto& f : ckb.formulas) {
    Rule r;
    r.kind = RuleKind::Compiled;
    r.formula = f.formula;
    r.rule_syntax = f.rule_syntax;
    r.weight = f.weight;
    r.role = f.role;
    r.group = f.group;
    kb.rules.push_back(std::move(r));
  }
  return kb;
}

std::string serialize_compiled(const CompiledKB& ckb) { return serialize_kb(to_source(ckb)); }

}  // namespace mlnec
