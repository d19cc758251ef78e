#include <algorithm>
#include <set>

#include "mlnec/error.hpp"
#include "mlnec/logic.hpp"

namespace mlnec {

namespace {

using Op = Formula::Op;
using LiteralSet = std::vector<Literal>;

// Negation normal form: only And/Or over literals, True and False.
Formula nnf(const Formula& f, bool negate) {
  switch (f.op) {
    case Op::True:
    case Op::False:
      return Formula::truth((f.op == Op::True) != negate);
    case Op::Atom:
      return negate ? Formula::negation(f) : f;
    case Op::Not:
      return nnf(f.kids[0], !negate);
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids) kids.push_back(nnf(k, negate));
      bool conj = (f.op == Op::And) != negate;
      Formula out;
      out.op = conj ? Op::And : Op::Or;
      out.kids = std::move(kids);
      return out;
    }
    case Op::Implies: {
      // a => b  ==  !a v b
      Formula d = Formula::disjunction({Formula::negation(f.kids[0]), f.kids[1]});
      return nnf(d, negate);
    }
    case Op::Iff: {
      // a <=> b  ==  (!a v b) ^ (a v !b)
      const Formula& a = f.kids[0];
      const Formula& b = f.kids[1];
      Formula c = Formula::conjunction({Formula::disjunction({Formula::negation(a), b}),
                                        Formula::disjunction({a, Formula::negation(b)})});
      return nnf(c, negate);
    }
    case Op::Exists:
      throw UnsupportedError("existential quantifiers are not supported: " + f.str());
  }
  return f;
}

bool tautology(const LiteralSet& c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i].atom == c[j].atom && c[i].positive != c[j].positive) return true;
  return false;
}

void add_unique(LiteralSet& c, const Literal& l) {
  if (std::find(c.begin(), c.end(), l) == c.end()) c.push_back(l);
}

std::vector<LiteralSet> clauses_of(const Formula& f) {
  switch (f.op) {
    case Op::True:
      return {};
    case Op::False:
      return {LiteralSet{}};
    case Op::Atom:
      return {LiteralSet{Literal{f.atom, true}}};
    case Op::Not:
      return {LiteralSet{Literal{f.kids[0].atom, false}}};
    case Op::And: {
      std::vector<LiteralSet> out;
      for (const auto& k : f.kids) {
        auto part = clauses_of(k);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case Op::Or: {
      std::vector<LiteralSet> acc{LiteralSet{}};
      for (const auto& k : f.kids) {
        auto part = clauses_of(k);
        std::vector<LiteralSet> next;
        for (const auto& a : acc) {
          for (const auto& b : part) {
            LiteralSet c = a;
            for (const auto& l : b) add_unique(c, l);
            if (!tautology(c)) next.push_back(std::move(c));
          }
        }
        acc = std::move(next);
        if (acc.empty()) break;  // every combination is a tautology
      }
      return acc;
    }
    default:
      throw UnsupportedError("unexpected connective in negation normal form");
  }
}

std::set<std::string> key_of(const LiteralSet& c) {
  std::set<std::string> k;
  for (const auto& l : c) k.insert(l.str());
  return k;
}

}  // namespace

std::vector<std::vector<Literal>> cnf_literals(const Formula& f) {
  Formula n = nnf(f, false);
  std::vector<LiteralSet> raw = clauses_of(n);
  std::vector<LiteralSet> out;
  std::set<std::set<std::string>> seen;
  for (auto& c : raw) {
    if (tautology(c)) continue;
    if (seen.insert(key_of(c)).second) out.push_back(std::move(c));
  }
  return out;
}

std::vector<Clause> to_cnf(const Formula& f, Weight weight, const std::string& origin) {
  auto sets = cnf_literals(f);
  std::vector<Clause> out;
  out.reserve(sets.size());
  for (auto& s : sets) {
    Clause c;
    c.literals = std::move(s);
    c.origin = origin;
    c.weight = weight.hard ? Weight::Hard() : Weight::Soft(weight.value / static_cast<double>(sets.size()));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mlnec
