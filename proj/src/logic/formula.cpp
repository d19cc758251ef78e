#include <limits>

#include "mlnec/error.hpp"
#include "mlnec/logic.hpp"

namespace mlnec {

Formula Formula::truth(bool value) {
  Formula f;
  f.op = value ? Op::True : Op::False;
  return f;
}

Formula Formula::of(Atom atom) {
  Formula f;
  f.op = Op::Atom;
  f.atom = std::move(atom);
  return f;
}

Formula Formula::of(const Literal& lit) {
  Formula f = of(lit.atom);
  return lit.positive ? f : negation(std::move(f));
}

Formula Formula::negation(Formula g) {
  Formula f;
  f.op = Op::Not;
  f.kids.push_back(std::move(g));
  return f;
}

Formula Formula::conjunction(std::vector<Formula> fs) {
  if (fs.empty()) return truth(true);
  if (fs.size() == 1) return std::move(fs.front());
  Formula f;
  f.op = Op::And;
  f.kids = std::move(fs);
  return f;
}

Formula Formula::disjunction(std::vector<Formula> fs) {
  if (fs.empty()) return truth(false);
  if (fs.size() == 1) return std::move(fs.front());
  Formula f;
  f.op = Op::Or;
  f.kids = std::move(fs);
  return f;
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  Formula f;
  f.op = Op::Implies;
  f.kids.push_back(std::move(lhs));
  f.kids.push_back(std::move(rhs));
  return f;
}

Formula Formula::iff(Formula lhs, Formula rhs) {
  Formula f;
  f.op = Op::Iff;
  f.kids.push_back(std::move(lhs));
  f.kids.push_back(std::move(rhs));
  return f;
}

Formula Formula::exists(std::vector<std::string> vars, Formula body) {
  Formula f;
  f.op = Op::Exists;
  f.bound = std::move(vars);
  f.kids.push_back(std::move(body));
  return f;
}

namespace {

int precedence(Formula::Op op) {
  switch (op) {
    case Formula::Op::Exists:
      return 0;
    case Formula::Op::Iff:
      return 1;
    case Formula::Op::Implies:
      return 2;
    case Formula::Op::Or:
      return 3;
    case Formula::Op::And:
      return 4;
    case Formula::Op::Not:
      return 5;
    default:
      return 6;
  }
}

void print(const Formula& f, std::string& out);

void print_child(const Formula& parent, const Formula& kid, std::string& out) {
  bool parens = precedence(kid.op) <= precedence(parent.op) && precedence(kid.op) < 6;
  if (parent.op == Formula::Op::Not) parens = precedence(kid.op) < 5;
  if (parens) out += "(";
  print(kid, out);
  if (parens) out += ")";
}

void print(const Formula& f, std::string& out) {
  using Op = Formula::Op;
  switch (f.op) {
    case Op::True:
      out += "true";
      break;
    case Op::False:
      out += "false";
      break;
    case Op::Atom:
      out += f.atom.str();
      break;
    case Op::Not:
      out += "!";
      print_child(f, f.kids[0], out);
      break;
    case Op::And:
    case Op::Or: {
      const char* sep = f.op == Op::And ? " ^ " : " v ";
      for (std::size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += sep;
        print_child(f, f.kids[i], out);
      }
      break;
    }
    case Op::Implies:
    case Op::Iff:
      print_child(f, f.kids[0], out);
      out += f.op == Op::Implies ? " => " : " <=> ";
      print_child(f, f.kids[1], out);
      break;
    case Op::Exists: {
      out += "exist ";
      for (std::size_t i = 0; i < f.bound.size(); ++i) {
        if (i) out += ",";
        out += f.bound[i];
      }
      out += " (";
      print(f.kids[0], out);
      out += ")";
      break;
    }
  }
}

}  // namespace

std::string Formula::str() const {
  std::string out;
  print(*this, out);
  return out;
}

void for_each_atom(const Formula& f, const std::function<void(const Atom&)>& fn) {
  if (f.op == Formula::Op::Atom) {
    fn(f.atom);
    return;
  }
  for (const auto& k : f.kids) for_each_atom(k, fn);
}

bool evaluate(const Formula& f, const std::function<bool(const Atom&)>& truth) {
  using Op = Formula::Op;
  switch (f.op) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom:
      return truth(f.atom);
    case Op::Not:
      return !evaluate(f.kids[0], truth);
    case Op::And:
      for (const auto& k : f.kids)
        if (!evaluate(k, truth)) return false;
      return true;
    case Op::Or:
      for (const auto& k : f.kids)
        if (evaluate(k, truth)) return true;
      return false;
    case Op::Implies:
      return !evaluate(f.kids[0], truth) || evaluate(f.kids[1], truth);
    case Op::Iff:
      return evaluate(f.kids[0], truth) == evaluate(f.kids[1], truth);
    case Op::Exists:
      throw UnsupportedError("cannot evaluate an existentially quantified formula");
  }
  return false;
}

// ---------------------------------------------------------------------------
// Substitution

std::optional<Term> substitute(const Term& t, const Binding& binding, int horizon) {
  switch (t.kind) {
    case Term::Kind::Variable: {
      auto it = binding.find(t.name);
      if (it == binding.end()) return t;
      if (t.value == 0) return it->second;
      if (it->second.kind == Term::Kind::Variable) return Term::variable(it->second.name, it->second.value + t.value);
      if (it->second.kind != Term::Kind::Time)
        throw SortError("successor offset applied to non-time binding of " + t.name);
      int tp = it->second.value + t.value;
      if (tp > horizon) return std::nullopt;
      return Term::time(tp);
    }
    case Term::Kind::Function: {
      Term out = t;
      for (auto& a : out.args) {
        auto s = substitute(a, binding, horizon);
        if (!s) return std::nullopt;
        a = std::move(*s);
      }
      return out;
    }
    default:
      return t;
  }
}

std::optional<Atom> substitute(const Atom& a, const Binding& binding, int horizon) {
  Atom out;
  out.predicate = a.predicate;
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) {
    auto s = substitute(t, binding, horizon);
    if (!s) return std::nullopt;
    out.args.push_back(std::move(*s));
  }
  return out;
}

namespace {

std::optional<Formula> substitute_rec(const Formula& f, const Binding& binding, int horizon) {
  using Op = Formula::Op;
  switch (f.op) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Atom: {
      auto a = substitute(f.atom, binding, horizon);
      if (!a) return std::nullopt;
      return Formula::of(std::move(*a));
    }
    case Op::Exists: {
      Binding inner = binding;
      for (const auto& v : f.bound) inner.erase(v);
      auto body = substitute_rec(f.kids[0], inner, horizon);
      if (!body) return std::nullopt;
      return Formula::exists(f.bound, std::move(*body));
    }
    default: {
      Formula out;
      out.op = f.op;
      for (const auto& k : f.kids) {
        auto s = substitute_rec(k, binding, horizon);
        if (!s) return std::nullopt;
        out.kids.push_back(std::move(*s));
      }
      return out;
    }
  }
}

}  // namespace

std::optional<Formula> substitute(const Formula& f, const Binding& binding, const Signature& sig) {
  VariableSorts sorts = variable_sorts(f, sig);
  for (const auto& [var, value] : binding) {
    auto it = sorts.find(var);
    if (it == sorts.end()) continue;
    if (!value.is_ground())
      throw SortError("binding for " + var + " is not ground");
    if (!sig.member(value, it->second))
      throw SortError("binding " + var + " -> " + value.str() + " does not belong to sort " + it->second);
  }
  return substitute_rec(f, binding, sig.horizon());
}

}  // namespace mlnec

namespace mlnec {

Formula rename_variables(const Formula& f, const std::map<std::string, std::string>& renaming) {
  Binding b;
  for (const auto& [from, to] : renaming) b.emplace(from, Term::variable(to));
  return *substitute_rec(f, b, std::numeric_limits<int>::max());
}

}  // namespace mlnec
