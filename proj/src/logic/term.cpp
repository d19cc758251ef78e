#include <cmath>
#include <cstdio>

#include "mlnec/error.hpp"
#include "mlnec/logic.hpp"

namespace mlnec {

Term Term::variable(std::string name, int offset) {
  Term t;
  t.kind = Kind::Variable;
  t.name = std::move(name);
  t.value = offset;
  return t;
}

Term Term::constant(std::string name) {
  Term t;
  t.kind = Kind::Constant;
  t.name = std::move(name);
  return t;
}

Term Term::function(std::string name, std::vector<Term> args) {
  Term t;
  t.kind = Kind::Function;
  t.name = std::move(name);
  t.args = std::move(args);
  return t;
}

Term Term::time(int tp) {
  Term t;
  t.kind = Kind::Time;
  t.value = tp;
  return t;
}

bool Term::is_ground() const {
  switch (kind) {
    case Kind::Variable:
      return false;
    case Kind::Function:
      for (const auto& a : args)
        if (!a.is_ground()) return false;
      return true;
    default:
      return true;
  }
}

std::string Term::str() const {
  switch (kind) {
    case Kind::Variable:
      return value == 0 ? name : name + "+" + std::to_string(value);
    case Kind::Constant:
      return name;
    case Kind::Time:
      return std::to_string(value);
    case Kind::Function: {
      std::string s = name + "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) s += ",";
        s += args[i].str();
      }
      return s + ")";
    }
  }
  return {};
}

bool Atom::is_ground() const {
  for (const auto& a : args)
    if (!a.is_ground()) return false;
  return true;
}

std::string Atom::str() const {
  std::string s = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i].str();
  }
  return s + ")";
}

std::string Literal::str() const { return positive ? atom.str() : "!" + atom.str(); }

Weight Weight::Soft(double w) {
  if (!std::isfinite(w)) throw NumericError("clause weight must be finite");
  return {false, w};
}

std::string Weight::str() const {
  if (hard) return "hard";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

bool Clause::is_ground() const {
  for (const auto& l : literals)
    if (!l.atom.is_ground()) return false;
  return true;
}

std::string Clause::str() const {
  std::string s;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (i) s += " v ";
    s += literals[i].str();
  }
  return s.empty() ? "false" : s;
}

}  // namespace mlnec
