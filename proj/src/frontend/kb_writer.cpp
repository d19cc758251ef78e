#include <charconv>

#include "mlnec/kb.hpp"

namespace mlnec {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string join_sorts(const std::vector<std::string>& sorts) {
  std::string s;
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    if (i) s += ", ";
    s += sorts[i];
  }
  return s;
}

}  // namespace

std::string serialize_signature(const Signature& sig) {
  std::string out;
  for (const auto& s : sig.sorts()) {
    if (Signature::builtin_sort(s.name)) continue;
    out += "sort " + s.name + " = {";
    for (std::size_t i = 0; i < s.constants.size(); ++i) {
      if (i) out += ", ";
      out += s.constants[i];
    }
    out += "}\n";
  }
  for (const auto& f : sig.functions())
    out += (f.result_sort == kEventSort ? "event " : "fluent ") + f.name + "(" + join_sorts(f.arg_sorts) + ")\n";
  for (const auto& p : sig.predicates()) {
    if (p.name == kHappens || p.name == kHoldsAt || p.name == kInitiatedAt || p.name == kTerminatedAt) continue;
    out += "evidence " + p.name + "(" + join_sorts(p.arg_sorts) + ")\n";
  }
  return out;
}

std::string serialize_rule(const Rule& r) {
  std::string out;
  if (r.role) {
    out += "@";
    out += role_tag(*r.role);
    if (!r.group.empty()) out += "/" + r.group;
    out += " ";
  }
  switch (r.weight.kind) {
    case WeightSpec::Kind::Hard:
      out += "hard ";
      break;
    case WeightSpec::Kind::Soft:
      out += shortest(r.weight.value) + " ";
      break;
    case WeightSpec::Kind::Unspecified:
      break;
  }
  if (r.rule_syntax) {
    // Parenthesize a head or body that would otherwise bind looser than ":-".
    auto part = [](const Formula& f) {
      bool loose = f.op == Formula::Op::Implies || f.op == Formula::Op::Iff || f.op == Formula::Op::Exists;
      return loose ? "(" + f.str() + ")" : f.str();
    };
    out += part(r.head()) + " :- " + part(r.body());
  } else {
    out += r.formula.str();
  }
  return out;
}

std::string serialize_kb(const KnowledgeBaseSource& kb) {
  std::string out = serialize_signature(kb.signature);
  if (!kb.rules.empty()) out += "\n";
  for (const auto& r : kb.rules) out += serialize_rule(r) + "\n";
  return out;
}

}  // namespace mlnec
