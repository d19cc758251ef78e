#include <fstream>
#include <sstream>

#include "lexer.hpp"
#include "mlnec/error.hpp"
#include "mlnec/kb.hpp"

namespace mlnec {

using detail::Tok;
using detail::Token;
using detail::TokenCursor;

const char* role_tag(FormulaRole role) {
  switch (role) {
    case FormulaRole::Initiates:
      return "initiates";
    case FormulaRole::Terminates:
      return "terminates";
    case FormulaRole::Persists:
      return "persists";
    case FormulaRole::PersistsNeg:
      return "persists_neg";
    case FormulaRole::Constraint:
      return "constraint";
  }
  return "constraint";
}

std::optional<FormulaRole> role_from_tag(std::string_view tag) {
  for (auto r : {FormulaRole::Initiates, FormulaRole::Terminates, FormulaRole::Persists, FormulaRole::PersistsNeg,
                 FormulaRole::Constraint})
    if (tag == role_tag(r)) return r;
  return std::nullopt;
}

bool is_inertia(FormulaRole role) { return role == FormulaRole::Persists || role == FormulaRole::PersistsNeg; }

bool Rule::same_ast(const Rule& o) const {
  return kind == o.kind && formula == o.formula && rule_syntax == o.rule_syntax && weight == o.weight &&
         role == o.role && group == o.group;
}

bool KnowledgeBaseSource::compiled() const {
  for (const auto& r : rules)
    if (r.kind == RuleKind::Compiled) return true;
  return false;
}

bool KnowledgeBaseSource::same_ast(const KnowledgeBaseSource& o) const {
  if (signature.sorts() != o.signature.sorts() || signature.predicates() != o.signature.predicates() ||
      signature.functions() != o.signature.functions() || rules.size() != o.rules.size())
    return false;
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (!rules[i].same_ast(o.rules[i])) return false;
  return true;
}

namespace {

bool mentions_effect_predicate(const Formula& f) {
  bool found = false;
  for_each_atom(f, [&](const Atom& a) { found |= a.predicate == kInitiatedAt || a.predicate == kTerminatedAt; });
  return found;
}

}  // namespace

Rule make_rule(Formula formula, bool rule_syntax, WeightSpec weight) {
  Rule r;
  r.formula = std::move(formula);
  r.rule_syntax = rule_syntax;
  r.weight = weight;
  r.kind = RuleKind::Constraint;
  if (mentions_effect_predicate(r.formula)) {
    r.kind = RuleKind::Axiom;
    if (rule_syntax && r.head().op == Formula::Op::Atom) {
      const Atom& h = r.head().atom;
      bool effect = h.predicate == kInitiatedAt || h.predicate == kTerminatedAt;
      if (effect && !h.args.empty() && !h.args[0].is_variable())
        r.kind = h.predicate == kInitiatedAt ? RuleKind::Initiation : RuleKind::Termination;
    }
  }
  return r;
}

namespace {

class KbParser {
 public:
  explicit KbParser(KnowledgeBaseSource& kb) : kb_(kb) {}

  void statement(const std::vector<Token>& toks) {
    TokenCursor cur(toks);
    const Token& first = cur.peek();
    if (first.kind == Tok::Ident && cur.peek(1).kind == Tok::Ident) {
      if (first.text == "sort") return sort_decl(cur);
      if (first.text == "event" || first.text == "fluent") return function_decl(cur);
      if (first.text == "evidence" || first.text == "predicate") return predicate_decl(cur);
    }
    formula_statement(cur);
  }

 private:
  void sort_decl(TokenCursor& cur) {
    cur.take();
    const Token& name = cur.expect(Tok::Ident, "a sort name");
    if (Signature::builtin_sort(name.text)) cur.fail_at(name, "cannot redeclare built-in sort " + name.text);
    cur.expect(Tok::Equals, "'='");
    cur.expect(Tok::LBrace, "'{'");
    Sort s{name.text, {}};
    if (!cur.accept(Tok::RBrace)) {
      do {
        const Token& c = cur.peek();
        if (c.kind != Tok::Ident && c.kind != Tok::Number) cur.fail("expected a constant");
        if (c.kind == Tok::Ident && detail::is_variable_name(c.text))
          cur.fail("constants start with a lower-case letter or digit: " + c.text);
        s.constants.push_back(cur.take().text);
      } while (cur.accept(Tok::Comma));
      cur.expect(Tok::RBrace, "'}'");
    }
    cur.expect(Tok::End, "end of declaration");
    wrap(name, [&] { kb_.signature.add_sort(std::move(s)); });
  }

  std::vector<std::string> sort_list(TokenCursor& cur) {
    std::vector<std::string> sorts;
    cur.expect(Tok::LParen, "'('");
    if (!cur.accept(Tok::RParen)) {
      do {
        sorts.push_back(cur.expect(Tok::Ident, "a sort name").text);
      } while (cur.accept(Tok::Comma));
      cur.expect(Tok::RParen, "')'");
    }
    cur.expect(Tok::End, "end of declaration");
    return sorts;
  }

  void function_decl(TokenCursor& cur) {
    const Token& kw = cur.take();
    const Token& name = cur.expect(Tok::Ident, "a function name");
    FunctionDecl d{name.text, sort_list(cur), kw.text == "event" ? kEventSort : kFluentSort};
    wrap(name, [&] { kb_.signature.add_function(std::move(d)); });
  }

  void predicate_decl(TokenCursor& cur) {
    cur.take();
    const Token& name = cur.expect(Tok::Ident, "a predicate name");
    PredicateDecl d{name.text, sort_list(cur), PredicateRole::Evidence};
    wrap(name, [&] { kb_.signature.add_predicate(std::move(d)); });
  }

  void formula_statement(TokenCursor& cur) {
    const Token& start = cur.peek();
    std::optional<FormulaRole> role;
    std::string group;
    if (cur.accept(Tok::At)) {
      const Token& tag = cur.expect(Tok::Ident, "a formula role");
      role = role_from_tag(tag.text);
      if (!role) cur.fail_at(tag, "unknown formula role @" + tag.text);
      if (cur.accept(Tok::Slash)) group = cur.expect(Tok::Ident, "a weight group").text;
    }

    WeightSpec weight;
    if (cur.peek().kind == Tok::Ident && cur.peek().text == "hard" && cur.peek(1).kind != Tok::LParen) {
      cur.take();
      weight = WeightSpec::hard();
    } else if (cur.peek().kind == Tok::Number ||
               (cur.peek().kind == Tok::Minus && cur.peek(1).kind == Tok::Number)) {
      bool neg = cur.accept(Tok::Minus);
      const Token& n = cur.take();
      double w = std::stod(n.text);
      weight = WeightSpec::soft(neg ? -w : w);
    }

    Formula f = iff(cur);
    bool rule_syntax = false;
    if (cur.accept(Tok::If)) {
      Formula body = iff(cur);
      f = Formula::implies(std::move(body), std::move(f));
      rule_syntax = true;
    }
    cur.expect(Tok::End, "end of formula");

    try {
      variable_sorts(f, kb_.signature);
    } catch (const SortError& e) {
      throw SortError(std::to_string(start.line) + ":" + std::to_string(start.column) + ": " + e.what());
    }

    Rule r = make_rule(std::move(f), rule_syntax, weight);
    r.line = start.line;
    if (role) {
      r.kind = RuleKind::Compiled;
      r.role = role;
      r.group = group;
    }
    kb_.rules.push_back(std::move(r));
  }

  Formula iff(TokenCursor& cur) {
    Formula lhs = imp(cur);
    while (cur.accept(Tok::Iff)) lhs = Formula::iff(std::move(lhs), imp(cur));
    return lhs;
  }

  Formula imp(TokenCursor& cur) {
    Formula lhs = disj(cur);
    if (cur.accept(Tok::Implies)) return Formula::implies(std::move(lhs), imp(cur));
    return lhs;
  }

  Formula disj(TokenCursor& cur) {
    std::vector<Formula> parts{conj(cur)};
    while (cur.accept(Tok::Or)) parts.push_back(conj(cur));
    return Formula::disjunction(std::move(parts));
  }

  Formula conj(TokenCursor& cur) {
    std::vector<Formula> parts{unary(cur)};
    while (cur.accept(Tok::And)) parts.push_back(unary(cur));
    return Formula::conjunction(std::move(parts));
  }

  Formula unary(TokenCursor& cur) {
    if (cur.accept(Tok::Bang)) return Formula::negation(unary(cur));
    return primary(cur);
  }

  Formula primary(TokenCursor& cur) {
    const Token& t = cur.peek();
    if (cur.accept(Tok::LParen)) {
      Formula f = iff(cur);
      cur.expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::Ident && cur.peek(1).kind != Tok::LParen) {
      if (t.text == "true" || t.text == "false") {
        cur.take();
        return Formula::truth(t.text == "true");
      }
      if (t.text == "exist") {
        cur.take();
        std::vector<std::string> vars;
        do {
          const Token& v = cur.expect(Tok::Ident, "a variable");
          if (!detail::is_variable_name(v.text)) cur.fail_at(v, "expected a variable, found " + v.text);
          vars.push_back(v.text);
        } while (cur.accept(Tok::Comma));
        return Formula::exists(std::move(vars), unary(cur));
      }
      cur.fail("expected an atom, found '" + t.text + "'");
    }
    Token where = t;
    Atom a = detail::parse_atom(cur);
    detail::resolve_atom(a, kb_.signature, where);
    return Formula::of(std::move(a));
  }

  template <typename Fn>
  void wrap(const Token& at, Fn&& fn) {
    try {
      fn();
    } catch (const SortError& e) {
      throw SortError(std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + e.what());
    }
  }

  KnowledgeBaseSource& kb_;
};

}  // namespace

KnowledgeBaseSource parse_kb(std::string_view text) {
  KnowledgeBaseSource kb;
  KbParser parser(kb);
  for (const auto& stmt : detail::split_statements(detail::tokenize(text))) parser.statement(stmt);
  return kb;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << contents;
}

KnowledgeBaseSource load_kb(const std::string& path) {
  return with_file(path, [&] { return parse_kb(read_file(path)); });
}

}  // namespace mlnec
