#include <algorithm>
#include <set>

#include "mlnec/compiler.hpp"
#include "mlnec/error.hpp"

namespace mlnec {

namespace {

Atom holds(const Term& fluent, const Term& time) { return Atom{kHoldsAt, {fluent, time}}; }

bool mentions(const Formula& f, const char* predicate) {
  bool found = false;
  for_each_atom(f, [&](const Atom& a) { found |= a.predicate == predicate; });
  return found;
}

bool has_exists(const Formula& f) {
  if (f.op == Formula::Op::Exists) return true;
  return std::any_of(f.kids.begin(), f.kids.end(), has_exists);
}

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) out.insert(t.name);
  for (const auto& a : t.args) collect_vars(a, out);
}

// Standard axioms with the fluent variable renamed to F and time to T.
const std::vector<std::string>& standard_axioms() {
  static const std::vector<std::string> axioms = {
      "initiatedAt(F,T) => holdsAt(F,T+1)",
      "holdsAt(F,T) ^ !terminatedAt(F,T) => holdsAt(F,T+1)",
      "terminatedAt(F,T) => !holdsAt(F,T+1)",
      "!holdsAt(F,T) ^ !initiatedAt(F,T) => !holdsAt(F,T+1)",
  };
  return axioms;
}

std::string where(const Rule& r) { return r.line > 0 ? "line " + std::to_string(r.line) + ": " : std::string(); }

void check_axiom(const Rule& r, const Signature& sig) {
  VariableSorts sorts = variable_sorts(r.formula, sig);
  std::map<std::string, std::string> renaming;
  for (const auto& [var, sort] : sorts) {
    if (sort == kFluentSort)
      renaming[var] = "F";
    else if (sort == kTimeSort)
      renaming[var] = "T";
  }
  if (renaming.size() == sorts.size() && renaming.size() == 2) {
    std::string text = rename_variables(r.formula, renaming).str();
    const auto& axioms = standard_axioms();
    if (std::find(axioms.begin(), axioms.end(), text) != axioms.end()) return;
  }
  throw UnsupportedError(where(r) + "only the four standard Event Calculus axioms may mention initiatedAt/terminatedAt: " +
                         r.formula.str());
}

struct HeadShape {
  std::string fluent;
  std::vector<std::string> vars;
  std::string time_var;
};

HeadShape check_effect_rule(const Rule& r, const Signature& sig) {
  if (!r.rule_syntax || r.head().op != Formula::Op::Atom)
    throw UnsupportedError(where(r) + "effect rules must have the form initiatedAt(f(X..),T) :- body");
  const Atom& h = r.head().atom;
  const Term& f = h.args.at(0);
  const Term& t = h.args.at(1);
  const FunctionDecl* decl = f.kind == Term::Kind::Function ? sig.function(f.name) : nullptr;
  if (!decl || decl->result_sort != kFluentSort)
    throw UnsupportedError(where(r) + "rule head must apply a declared fluent: " + h.str());
  HeadShape shape{f.name, {}, {}};
  std::set<std::string> seen;
  for (const auto& a : f.args) {
    if (!a.is_variable() || !seen.insert(a.name).second)
      throw UnsupportedError(where(r) + "fluent arguments in a rule head must be distinct variables: " + h.str());
    shape.vars.push_back(a.name);
  }
  if (!t.is_variable() || t.value != 0 || seen.count(t.name))
    throw UnsupportedError(where(r) + "rule head time must be a plain time variable: " + h.str());
  shape.time_var = t.name;

  const Formula& body = r.body();
  if (has_exists(body)) throw UnsupportedError(where(r) + "existential quantifiers are not supported in rule bodies");
  if (mentions(body, kInitiatedAt) || mentions(body, kTerminatedAt))
    throw UnsupportedError(where(r) + "rule bodies cannot mention initiatedAt/terminatedAt");
  seen.insert(t.name);
  bool ok = true;
  for_each_atom(body, [&](const Atom& a) {
    std::set<std::string> vars;
    for (const auto& arg : a.args) collect_vars(arg, vars);
    for (const auto& v : vars)
      if (!seen.count(v)) ok = false;
    int ti = -1;
    const PredicateDecl* p = sig.predicate(a.predicate);
    for (std::size_t i = 0; p && i < p->arg_sorts.size(); ++i)
      if (p->arg_sorts[i] == kTimeSort) ti = static_cast<int>(i);
    if (ti >= 0) {
      const Term& bt = a.args[ti];
      if (!bt.is_variable() || bt.name != shape.time_var || bt.value != 0) ok = false;
    }
  });
  if (!ok)
    throw UnsupportedError(where(r) +
                           "rule bodies may only use the head's variables and its time-point: " + r.formula.str());
  return shape;
}

}  // namespace

Formula FluentDefinition::initiated_iff() const {
  return Formula::iff(Formula::of(Atom{kInitiatedAt, {head, Term::variable(time_var)}}), Formula::disjunction(init));
}

Formula FluentDefinition::terminated_iff() const {
  return Formula::iff(Formula::of(Atom{kTerminatedAt, {head, Term::variable(time_var)}}), Formula::disjunction(term));
}

CompletedKB complete(const KnowledgeBaseSource& kb) {
  if (kb.compiled()) throw UnsupportedError("knowledge base is already compiled");
  CompletedKB out;
  out.signature = kb.signature;
  std::map<std::string, std::size_t> index;
  std::vector<bool> named;
  for (const auto& fn : kb.signature.functions()) {
    if (fn.result_sort != kFluentSort) continue;
    FluentDefinition def;
    def.fluent = fn.name;
    std::vector<Term> args;
    for (std::size_t i = 0; i < fn.arg_sorts.size(); ++i) args.push_back(Term::variable("X" + std::to_string(i + 1)));
    def.head = Term::function(fn.name, std::move(args));
    def.time_var = "T";
    index[fn.name] = out.fluents.size();
    out.fluents.push_back(std::move(def));
    named.push_back(false);
  }

  for (const auto& r : kb.rules) {
    switch (r.kind) {
      case RuleKind::Axiom:
        check_axiom(r, kb.signature);
        break;
      case RuleKind::Constraint:
        if (has_exists(r.formula)) throw UnsupportedError(where(r) + "existential quantifiers are not supported");
        out.constraints.push_back(r);
        break;
      case RuleKind::Compiled:
        throw UnsupportedError(where(r) + "compiled formula in a source knowledge base");
      case RuleKind::Initiation:
      case RuleKind::Termination: {
        HeadShape shape = check_effect_rule(r, kb.signature);
        std::size_t k = index.at(shape.fluent);
        FluentDefinition& def = out.fluents[k];
        if (!named[k]) {
          // The first rule for a fluent fixes the variable names.
          for (std::size_t i = 0; i < shape.vars.size(); ++i) def.head.args[i] = Term::variable(shape.vars[i]);
          def.time_var = shape.time_var;
          named[k] = true;
        }
        std::map<std::string, std::string> renaming;
        for (std::size_t i = 0; i < shape.vars.size(); ++i) renaming[shape.vars[i]] = def.head.args[i].name;
        renaming[shape.time_var] = def.time_var;
        Formula body = rename_variables(r.body(), renaming);
        if (r.kind == RuleKind::Initiation) {
          def.init.push_back(std::move(body));
          def.init_weights.push_back(r.weight);
        } else {
          def.term.push_back(std::move(body));
          def.term_weights.push_back(r.weight);
        }
        break;
      }
    }
  }
  return out;
}

CompiledKB specialize_axioms(const CompletedKB& completed) {
  CompiledKB ckb;
  ckb.signature = completed.signature;
  for (const auto& def : completed.fluents) {
    Term t = Term::variable(def.time_var);
    Term t1 = Term::variable(def.time_var, 1);
    Formula next = Formula::of(holds(def.head, t1));
    Formula now = Formula::of(holds(def.head, t));
    auto add = [&](Formula body, Formula head, FormulaRole role, WeightSpec w) {
      CompiledFormula cf;
      cf.formula = Formula::implies(std::move(body), std::move(head));
      cf.role = role;
      cf.fluent = def.fluent;
      cf.weight = w;
      ckb.formulas.push_back(std::move(cf));
    };
    for (std::size_t i = 0; i < def.init.size(); ++i)
      add(def.init[i], next, FormulaRole::Initiates, def.init_weights[i]);
    for (std::size_t i = 0; i < def.term.size(); ++i)
      add(def.term[i], Formula::negation(next), FormulaRole::Terminates, def.term_weights[i]);

    std::vector<Formula> persist{now};
    if (!def.term.empty()) persist.push_back(Formula::negation(Formula::disjunction(def.term)));
    add(Formula::conjunction(std::move(persist)), next, FormulaRole::Persists, {});

    std::vector<Formula> persist_neg{Formula::negation(now)};
    if (!def.init.empty()) persist_neg.push_back(Formula::negation(Formula::disjunction(def.init)));
    add(Formula::conjunction(std::move(persist_neg)), Formula::negation(next), FormulaRole::PersistsNeg, {});
  }
  for (const auto& r : completed.constraints) {
    CompiledFormula cf;
    cf.formula = r.formula;
    cf.rule_syntax = r.rule_syntax;
    cf.role = FormulaRole::Constraint;
    cf.weight = r.weight;
    ckb.formulas.push_back(std::move(cf));
  }
  return ckb;
}

}  // namespace mlnec
