#pragma once

// Many-sorted first-order logic over finite domains: terms, atoms, formulas,
// clauses, signatures and grounding enumeration.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mlnec {

inline constexpr const char* kTimeSort = "time";
inline constexpr const char* kEventSort = "event";
inline constexpr const char* kFluentSort = "fluent";

inline constexpr const char* kHappens = "happens";
inline constexpr const char* kHoldsAt = "holdsAt";
inline constexpr const char* kInitiatedAt = "initiatedAt";
inline constexpr const char* kTerminatedAt = "terminatedAt";

// ---------------------------------------------------------------------------
// Terms and atoms

struct Term {
  enum class Kind { Variable, Constant, Function, Time };

  Kind kind = Kind::Constant;
  std::string name;        // variable, constant or function symbol
  std::vector<Term> args;  // Function only
  int value = 0;           // Time: the time-point; Variable: successor offset (T+value)

  static Term variable(std::string name, int offset = 0);
  static Term constant(std::string name);
  static Term function(std::string name, std::vector<Term> args);
  static Term time(int t);

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_ground() const;
  std::string str() const;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  std::string str() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Literal {
  Atom atom;
  bool positive = true;

  std::string str() const;
  Literal negated() const { return {atom, !positive}; }

  friend bool operator==(const Literal&, const Literal&) = default;
};

// ---------------------------------------------------------------------------
// Formulas

struct Formula {
  enum class Op { True, False, Atom, Not, And, Or, Implies, Iff, Exists };

  Op op = Op::True;
  Atom atom;                        // Op::Atom
  std::vector<Formula> kids;        // Not: 1, Implies/Iff: 2 (lhs, rhs), And/Or: n
  std::vector<std::string> bound;   // Op::Exists

  static Formula truth(bool value);
  static Formula of(Atom atom);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> fs);
  static Formula disjunction(std::vector<Formula> fs);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula iff(Formula lhs, Formula rhs);
  static Formula exists(std::vector<std::string> vars, Formula body);
  static Formula of(const Literal& lit);

  std::string str() const;

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Visit every atom occurring in a formula.
void for_each_atom(const Formula& f, const std::function<void(const Atom&)>& fn);

/// Truth value of a quantifier-free ground formula under an atom valuation.
bool evaluate(const Formula& f, const std::function<bool(const Atom&)>& truth);

// ---------------------------------------------------------------------------
// Clauses

/// Clause weight: either HARD or a finite real value.
struct Weight {
  bool hard = true;
  double value = 0.0;

  static Weight Hard() { return {}; }
  static Weight Soft(double w);

  std::string str() const;
  friend bool operator==(const Weight&, const Weight&) = default;
};

struct Clause {
  std::vector<Literal> literals;
  Weight weight;
  std::string origin;

  bool is_ground() const;
  std::string str() const;
};

// ---------------------------------------------------------------------------
// Signature

struct Sort {
  std::string name;
  std::vector<std::string> constants;

  friend bool operator==(const Sort&, const Sort&) = default;
};

enum class PredicateRole { Evidence, Query, Auxiliary };

struct PredicateDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  PredicateRole role = PredicateRole::Evidence;

  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct FunctionDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  std::string result_sort;

  friend bool operator==(const FunctionDecl&, const FunctionDecl&) = default;
};

class Signature {
 public:
  /// Signature with the time/event/fluent sorts and the four EC predicates.
  static Signature event_calculus();

  void add_sort(Sort sort);
  void add_predicate(PredicateDecl decl);
  void add_function(FunctionDecl decl);

  const Sort* sort(const std::string& name) const;
  const PredicateDecl* predicate(const std::string& name) const;
  const FunctionDecl* function(const std::string& name) const;

  const std::vector<Sort>& sorts() const { return sorts_; }
  const std::vector<PredicateDecl>& predicates() const { return predicates_; }
  const std::vector<FunctionDecl>& functions() const { return functions_; }

  /// Last time-point; the time domain is {0, ..., horizon}.
  int horizon() const { return horizon_; }
  void set_horizon(int t_max);

  /// Ground terms of a sort in declaration order. Time yields 0..horizon;
  /// event and fluent sorts yield every ground function application.
  std::vector<Term> domain(const std::string& sort) const;
  std::size_t domain_size(const std::string& sort) const;

  /// Whether a ground term belongs to a sort.
  bool member(const Term& ground, const std::string& sort) const;

  static bool builtin_sort(const std::string& name);

 private:
  std::vector<Sort> sorts_;
  std::vector<PredicateDecl> predicates_;
  std::vector<FunctionDecl> functions_;
  std::unordered_map<std::string, std::size_t> sort_index_;
  std::unordered_map<std::string, std::size_t> predicate_index_;
  std::unordered_map<std::string, std::size_t> function_index_;
  int horizon_ = 0;
};

using VariableSorts = std::map<std::string, std::string>;

/// Resolve the sort of every variable, checking arities and declarations.
/// Throws SortError on undeclared symbols, arity or sort conflicts.
VariableSorts variable_sorts(const Formula& f, const Signature& sig);
VariableSorts variable_sorts(const std::vector<Literal>& literals, const Signature& sig);

/// Check a ground atom against the signature (declared predicate, arity,
/// argument membership). Throws SortError.
void check_ground_atom(const Atom& atom, const Signature& sig);

// ---------------------------------------------------------------------------
// Transformations

/// Clausal normal form. Tautological and duplicate clauses are removed. The
/// weight of a soft formula is divided equally among its clauses.
/// Throws UnsupportedError on existential quantifiers.
std::vector<Clause> to_cnf(const Formula& f, Weight weight = Weight::Hard(), const std::string& origin = {});

/// Literal sets of the CNF of a formula (no weights).
std::vector<std::vector<Literal>> cnf_literals(const Formula& f);

using Binding = std::map<std::string, Term>;

/// Replace bound variables by constants. Returns nullopt when a successor
/// term T+k leaves the time domain (the boundary case). Throws SortError if
/// a binding does not respect the variable's sort.
std::optional<Formula> substitute(const Formula& f, const Binding& binding, const Signature& sig);

/// Substitution on a single term or atom without sort checks; nullopt on the
/// time boundary.
std::optional<Term> substitute(const Term& t, const Binding& binding, int horizon);
std::optional<Atom> substitute(const Atom& a, const Binding& binding, int horizon);

/// Simultaneous variable renaming (offsets are kept).
Formula rename_variables(const Formula& f, const std::map<std::string, std::string>& renaming);

/// Lazy enumeration of the ground instances of a clause: one per element of
/// the Cartesian product of its variable domains, skipping instances whose
/// successor time-points fall beyond the horizon.
class GroundingCursor {
 public:
  GroundingCursor(const Clause& clause, const Signature& sig);

  /// Advance to the next ground clause. Returns false when exhausted.
  bool next(Clause& out);

  /// Size of the Cartesian product of the variable domains.
  std::size_t product_size() const { return product_; }
  /// Instances skipped so far because of the time boundary.
  std::size_t dropped() const { return dropped_; }

  const std::vector<std::string>& variables() const { return vars_; }
  /// Binding of the instance most recently returned by next().
  const Binding& binding() const { return binding_; }

 private:
  const Clause* clause_;
  int horizon_;
  std::vector<std::string> vars_;
  std::vector<std::vector<Term>> domains_;
  std::vector<std::size_t> odometer_;
  std::size_t product_ = 1;
  std::size_t dropped_ = 0;
  bool done_ = false;
  Binding binding_;
};

std::vector<Clause> groundings(const Clause& clause, const Signature& sig);

}  // namespace mlnec
