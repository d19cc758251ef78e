#pragma once

// Knowledge-base DSL: declarations, Event Calculus rules, weighted formulas
// and compiled (tagged) formulas. See docs/formats.md for the grammar.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlnec/logic.hpp"

namespace mlnec {

/// Weight as written in the source. Unspecified weights are resolved by the
/// inertia policy at compile time (hard unless the policy softens the rule).
struct WeightSpec {
  enum class Kind { Unspecified, Hard, Soft };
  Kind kind = Kind::Unspecified;
  double value = 0.0;

  static WeightSpec unspecified() { return {}; }
  static WeightSpec hard() { return {Kind::Hard, 0.0}; }
  static WeightSpec soft(double w) { return {Kind::Soft, w}; }

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

enum class RuleKind { Initiation, Termination, Axiom, Constraint, Compiled };

/// Role of a compiled formula.
///   Initiates:     holdsAt(f,T+1)  <= initiation body
///   Terminates:   !holdsAt(f,T+1)  <= termination body
///   Persists:      holdsAt(f,T+1)  <= holdsAt(f,T) ^ !(termination bodies)
///   PersistsNeg:  !holdsAt(f,T+1)  <= !holdsAt(f,T) ^ !(initiation bodies)
enum class FormulaRole { Initiates, Terminates, Persists, PersistsNeg, Constraint };

const char* role_tag(FormulaRole role);
std::optional<FormulaRole> role_from_tag(std::string_view tag);
bool is_inertia(FormulaRole role);

struct Rule {
  RuleKind kind = RuleKind::Constraint;
  /// For rule syntax ("head :- body") this is implies(body, head).
  Formula formula;
  bool rule_syntax = false;
  WeightSpec weight;
  /// Compiled formulas only.
  std::optional<FormulaRole> role;
  /// Compiled formulas sharing a non-empty group share one weight.
  std::string group;
  int line = 0;

  const Formula& head() const { return formula.kids.at(1); }
  const Formula& body() const { return formula.kids.at(0); }

  bool same_ast(const Rule& other) const;
};

struct KnowledgeBaseSource {
  Signature signature = Signature::event_calculus();
  std::vector<Rule> rules;

  /// True when the KB holds tagged, already-compiled formulas.
  bool compiled() const;
  bool same_ast(const KnowledgeBaseSource& other) const;
};

/// Build a rule record, classifying it by its head and predicates.
Rule make_rule(Formula formula, bool rule_syntax, WeightSpec weight);

/// Parse KB text. Throws ParseError (with line/column) or SortError.
KnowledgeBaseSource parse_kb(std::string_view text);
KnowledgeBaseSource load_kb(const std::string& path);

/// Render a KB in the DSL; parse_kb(serialize_kb(kb)) reproduces the AST.
std::string serialize_kb(const KnowledgeBaseSource& kb);

/// Declarations only (sorts, events, fluents, evidence predicates).
std::string serialize_signature(const Signature& sig);

std::string serialize_rule(const Rule& rule);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace mlnec
