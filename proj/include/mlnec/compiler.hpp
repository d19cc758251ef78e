#pragma once

// Predicate completion of initiatedAt/terminatedAt, specialisation of the
// four Event Calculus axioms into effect (Sigma) and inertia (Sigma') rules,
// and inertia policies.

#include <optional>
#include <string>
#include <vector>

#include "mlnec/kb.hpp"

namespace mlnec {

/// Completed definition of one fluent:
///   initiatedAt(f(X..),T)  <=> init[0] v init[1] v ...
///   terminatedAt(f(X..),T) <=> term[0] v ...
/// An empty disjunction means the predicate is equivalent to false.
struct FluentDefinition {
  std::string fluent;              // function symbol, e.g. "meeting"
  Term head;                       // f(X1,..,Xn) over canonical variable names
  std::string time_var;            // canonical time variable
  std::vector<Formula> init;       // one body per initiation rule
  std::vector<WeightSpec> init_weights;
  std::vector<Formula> term;
  std::vector<WeightSpec> term_weights;

  Formula initiated_iff() const;
  Formula terminated_iff() const;
};

struct CompletedKB {
  Signature signature;
  std::vector<FluentDefinition> fluents;  // every declared fluent, declaration order
  std::vector<Rule> constraints;          // rules outside the EC fragment
};

/// Completion per fluent. Throws UnsupportedError when a rule head is not
/// initiatedAt/terminatedAt(f(X1..Xn),T) with distinct variables, a body
/// mentions a variable missing from the head, or a body uses another time.
CompletedKB complete(const KnowledgeBaseSource& kb);

struct CompiledFormula {
  Formula formula;  // implies(body, head) for rule-shaped formulas
  bool rule_syntax = true;
  FormulaRole role = FormulaRole::Constraint;
  std::string fluent;  // empty for constraints
  WeightSpec weight;   // resolved to Hard or Soft by apply_policy
  std::string group;   // non-empty groups share one weight slot
  int slot = -1;       // index into CompiledKB::weights, -1 when hard

  bool hard() const { return weight.kind != WeightSpec::Kind::Soft; }
  std::string name(std::size_t index) const;
};

struct CompiledKB {
  Signature signature;
  std::vector<CompiledFormula> formulas;
  std::vector<double> weights;  // one per slot

  /// Re-number slots from formula weights and groups.
  void assign_slots();
  /// Copy a weight vector back into the formulas.
  void set_weights(const std::vector<double>& w);
  std::size_t slot_count() const { return weights.size(); }
  std::vector<std::string> slot_names() const;
};

/// Sigma and Sigma' formulas, one Sigma formula per disjunct. Weights are
/// copied from the source rules; inertia weights are left unspecified.
CompiledKB specialize_axioms(const CompletedKB& completed);

enum class InertiaVariant { HI, SI_h, SI_negh, SI, SI_eq };

const char* variant_name(InertiaVariant v);
std::optional<InertiaVariant> variant_from_name(std::string_view name);

struct InertiaPolicy {
  InertiaVariant variant = InertiaVariant::HI;
  /// Initial weights of the softened inertia formulas in formula order
  /// (a single value for SI_eq). Empty means the default weight.
  std::vector<double> weights;
};

/// Set hard/soft markers. Sigma is soft iff sigma_soft; soft formulas keep a
/// soft source weight or get default_weight. Throws Error when the explicit
/// weight list has the wrong length.
CompiledKB apply_policy(CompiledKB ckb, const InertiaPolicy& policy, bool sigma_soft, double default_weight = 1.0);

/// complete + specialize_axioms + apply_policy.
CompiledKB compile(const KnowledgeBaseSource& kb, const InertiaPolicy& policy = {}, bool sigma_soft = true,
                   double default_weight = 1.0);

/// Set the weight of every soft inertia (or effect) slot to w.
void set_inertia_weight(CompiledKB& ckb, double w);
void set_effect_weight(CompiledKB& ckb, double w);

/// Read a KB that already holds tagged compiled formulas.
CompiledKB from_compiled_source(const KnowledgeBaseSource& kb);

/// Compile a source KB, or take a compiled one as is.
CompiledKB load_compiled(const KnowledgeBaseSource& kb, const std::optional<InertiaPolicy>& policy, bool sigma_soft,
                         double default_weight = 1.0);

KnowledgeBaseSource to_source(const CompiledKB& ckb);
std::string serialize_compiled(const CompiledKB& ckb);

}  // namespace mlnec
