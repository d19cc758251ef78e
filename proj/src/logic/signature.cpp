#include <algorithm>

#include "mlnec/error.hpp"
#include "mlnec/logic.hpp"

namespace mlnec {

Signature Signature::event_calculus() {
  Signature sig;
  sig.add_sort({kTimeSort, {}});
  sig.add_sort({kEventSort, {}});
  sig.add_sort({kFluentSort, {}});
  sig.add_predicate({kHappens, {kEventSort, kTimeSort}, PredicateRole::Evidence});
  sig.add_predicate({kHoldsAt, {kFluentSort, kTimeSort}, PredicateRole::Query});
  sig.add_predicate({kInitiatedAt, {kFluentSort, kTimeSort}, PredicateRole::Auxiliary});
  sig.add_predicate({kTerminatedAt, {kFluentSort, kTimeSort}, PredicateRole::Auxiliary});
  return sig;
}

bool Signature::builtin_sort(const std::string& name) {
  return name == kTimeSort || name == kEventSort || name == kFluentSort;
}

void Signature::add_sort(Sort sort) {
  if (sort_index_.count(sort.name)) throw SortError("sort declared twice: " + sort.name);
  std::vector<std::string> seen = sort.constants;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw SortError("duplicate constant in sort " + sort.name);
  sort_index_[sort.name] = sorts_.size();
  sorts_.push_back(std::move(sort));
}

void Signature::add_predicate(PredicateDecl decl) {
  if (predicate_index_.count(decl.name) || function_index_.count(decl.name))
    throw SortError("symbol declared twice: " + decl.name);
  for (const auto& s : decl.arg_sorts)
    if (!sort(s)) throw SortError("predicate " + decl.name + " uses undeclared sort " + s);
  predicate_index_[decl.name] = predicates_.size();
  predicates_.push_back(std::move(decl));
}

void Signature::add_function(FunctionDecl decl) {
  if (predicate_index_.count(decl.name) || function_index_.count(decl.name))
    throw SortError("symbol declared twice: " + decl.name);
  if (!sort(decl.result_sort)) throw SortError("function " + decl.name + " has undeclared result sort");
  for (const auto& s : decl.arg_sorts) {
    if (!sort(s)) throw SortError("function " + decl.name + " uses undeclared sort " + s);
    if (s == kEventSort || s == kFluentSort)
      throw SortError("function " + decl.name + ": nested event/fluent arguments are not supported");
  }
  function_index_[decl.name] = functions_.size();
  functions_.push_back(std::move(decl));
}

const Sort* Signature::sort(const std::string& name) const {
  auto it = sort_index_.find(name);
  return it == sort_index_.end() ? nullptr : &sorts_[it->second];
}

const PredicateDecl* Signature::predicate(const std::string& name) const {
  auto it = predicate_index_.find(name);
  return it == predicate_index_.end() ? nullptr : &predicates_[it->second];
}

const FunctionDecl* Signature::function(const std::string& name) const {
  auto it = function_index_.find(name);
  return it == function_index_.end() ? nullptr : &functions_[it->second];
}

void Signature::set_horizon(int t_max) {
  if (t_max < 0) throw SortError("negative horizon");
  horizon_ = t_max;
}

std::vector<Term> Signature::domain(const std::string& name) const {
  std::vector<Term> out;
  if (name == kTimeSort) {
    out.reserve(static_cast<std::size_t>(horizon_) + 1);
    for (int t = 0; t <= horizon_; ++t) out.push_back(Term::time(t));
    return out;
  }
  const Sort* s = sort(name);
  if (!s) throw SortError("undeclared sort " + name);
  for (const auto& c : s->constants) out.push_back(Term::constant(c));
  for (const auto& fn : functions_) {
    if (fn.result_sort != name) continue;
    std::vector<std::vector<Term>> arg_domains;
    for (const auto& a : fn.arg_sorts) arg_domains.push_back(domain(a));
    std::vector<std::size_t> idx(arg_domains.size(), 0);
    bool empty = std::any_of(arg_domains.begin(), arg_domains.end(), [](const auto& d) { return d.empty(); });
    if (empty) continue;
    for (;;) {
      std::vector<Term> args;
      for (std::size_t i = 0; i < idx.size(); ++i) args.push_back(arg_domains[i][idx[i]]);
      out.push_back(Term::function(fn.name, std::move(args)));
      bool carry = true;
      for (std::size_t k = idx.size(); k > 0 && carry;) {
        --k;
        if (++idx[k] < arg_domains[k].size())
          carry = false;
        else
          idx[k] = 0;
      }
      if (carry) break;
    }
  }
  return out;
}

std::size_t Signature::domain_size(const std::string& name) const {
  if (name == kTimeSort) return static_cast<std::size_t>(horizon_) + 1;
  return domain(name).size();
}

bool Signature::member(const Term& t, const std::string& sort_name) const {
  switch (t.kind) {
    case Term::Kind::Time:
      return sort_name == kTimeSort && t.value >= 0 && t.value <= horizon_;
    case Term::Kind::Constant: {
      const Sort* s = sort(sort_name);
      if (!s) return false;
      return std::find(s->constants.begin(), s->constants.end(), t.name) != s->constants.end();
    }
    case Term::Kind::Function: {
      const FunctionDecl* fn = function(t.name);
      if (!fn || fn->result_sort != sort_name || fn->arg_sorts.size() != t.args.size()) return false;
      for (std::size_t i = 0; i < t.args.size(); ++i)
        if (!member(t.args[i], fn->arg_sorts[i])) return false;
      return true;
    }
    case Term::Kind::Variable:
      return false;
  }
  return false;
}

namespace {

void collect_term(const Term& t, const std::string& sort, const Signature& sig, VariableSorts& out) {
  switch (t.kind) {
    case Term::Kind::Variable: {
      if (t.value != 0 && sort != kTimeSort)
        throw SortError("successor offset on non-time variable " + t.name);
      auto [it, inserted] = out.emplace(t.name, sort);
      if (!inserted && it->second != sort)
        throw SortError("variable " + t.name + " used with sorts " + it->second + " and " + sort);
      break;
    }
    case Term::Kind::Time:
      if (sort != kTimeSort) throw SortError("time-point " + t.str() + " used where sort " + sort + " expected");
      break;
    case Term::Kind::Constant: {
      if (sort == kTimeSort) throw SortError("constant " + t.name + " used as a time-point");
      const Sort* s = sig.sort(sort);
      if (!s || std::find(s->constants.begin(), s->constants.end(), t.name) == s->constants.end())
        throw SortError("constant " + t.name + " is not declared in sort " + sort);
      break;
    }
    case Term::Kind::Function: {
      const FunctionDecl* fn = sig.function(t.name);
      if (!fn) throw SortError("undeclared function " + t.name);
      if (fn->result_sort != sort)
        throw SortError("function " + t.name + " has sort " + fn->result_sort + ", expected " + sort);
      if (fn->arg_sorts.size() != t.args.size())
        throw SortError("arity mismatch for " + t.name + ": expected " + std::to_string(fn->arg_sorts.size()) +
                        ", got " + std::to_string(t.args.size()));
      for (std::size_t i = 0; i < t.args.size(); ++i) collect_term(t.args[i], fn->arg_sorts[i], sig, out);
      break;
    }
  }
}

void collect_atom(const Atom& a, const Signature& sig, VariableSorts& out) {
  const PredicateDecl* p = sig.predicate(a.predicate);
  if (!p) throw SortError("undeclared predicate " + a.predicate);
  if (p->arg_sorts.size() != a.args.size())
    throw SortError("arity mismatch for " + a.predicate + ": expected " + std::to_string(p->arg_sorts.size()) +
                    ", got " + std::to_string(a.args.size()));
  for (std::size_t i = 0; i < a.args.size(); ++i) collect_term(a.args[i], p->arg_sorts[i], sig, out);
}

}  // namespace

VariableSorts variable_sorts(const Formula& f, const Signature& sig) {
  VariableSorts out;
  for_each_atom(f, [&](const Atom& a) { collect_atom(a, sig, out); });
  return out;
}

VariableSorts variable_sorts(const std::vector<Literal>& literals, const Signature& sig) {
  VariableSorts out;
  for (const auto& l : literals) collect_atom(l.atom, sig, out);
  return out;
}

void check_ground_atom(const Atom& atom, const Signature& sig) {
  if (!atom.is_ground()) throw SortError("atom is not ground: " + atom.str());
  VariableSorts unused;
  collect_atom(atom, sig, unused);
}

}  // namespace mlnec
