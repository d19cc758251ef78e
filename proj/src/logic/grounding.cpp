#include "mlnec/error.hpp"
#include "mlnec/logic.hpp"

namespace mlnec {

GroundingCursor::GroundingCursor(const Clause& clause, const Signature& sig)
    : clause_(&clause), horizon_(sig.horizon()) {
  for (const auto& [var, sort] : variable_sorts(clause.literals, sig)) {
    vars_.push_back(var);
    domains_.push_back(sig.domain(sort));
    product_ *= domains_.back().size();
  }
  odometer_.assign(vars_.size(), 0);
  done_ = product_ == 0;
}

bool GroundingCursor::next(Clause& out) {
  while (!done_) {
    binding_.clear();
    for (std::size_t i = 0; i < vars_.size(); ++i) binding_.emplace(vars_[i], domains_[i][odometer_[i]]);

    bool carry = true;
    for (std::size_t k = odometer_.size(); k > 0 && carry;) {
      --k;
      if (++odometer_[k] < domains_[k].size())
        carry = false;
      else
        odometer_[k] = 0;
    }
    if (carry) done_ = true;

    out.literals.clear();
    out.weight = clause_->weight;
    out.origin = clause_->origin;
    bool boundary = false;
    for (const auto& lit : clause_->literals) {
      auto a = substitute(lit.atom, binding_, horizon_);
      if (!a) {
        boundary = true;
        break;
      }
      out.literals.push_back({std::move(*a), lit.positive});
    }
    if (boundary) {
      ++dropped_;
      continue;
    }
    return true;
  }
  return false;
}

std::vector<Clause> groundings(const Clause& clause, const Signature& sig) {
  std::vector<Clause> out;
  GroundingCursor cursor(clause, sig);
  Clause c;
  while (cursor.next(c)) out.push_back(c);
  return out;
}

}  // namespace mlnec
