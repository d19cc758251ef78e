#include <algorithm>
#include <sstream>

#include "lexer.hpp"
#include "mlnec/error.hpp"
#include "mlnec/kb.hpp"
#include "mlnec/narrative.hpp"

namespace mlnec {

using detail::Tok;
using detail::Token;
using detail::TokenCursor;

void Narrative::set_horizon(int t_max, bool explicit_value) {
  if (t_max < 0) throw Error("horizon must be non-negative");
  if (explicit_value) {
    auto check = [&](const std::vector<GroundFact>& facts) {
      for (const auto& f : facts)
        if (f.time > t_max)
          throw Error("time-point " + std::to_string(f.time) + " of " + f.key + " exceeds horizon " +
                      std::to_string(t_max));
    };
    check(evidence_);
    check(annotation_);
    check(fixed_);
  }
  horizon_ = t_max;
  explicit_horizon_ = explicit_value;
}

void Narrative::bump(int time) {
  if (time < 0) return;
  if (explicit_horizon_) {
    if (time > horizon_)
      throw Error("time-point " + std::to_string(time) + " exceeds horizon " + std::to_string(horizon_));
  } else {
    horizon_ = std::max(horizon_, time);
  }
}

namespace {

void insert_fact(std::vector<GroundFact>& facts, std::unordered_map<std::string, bool>* index, const Atom& atom,
                 bool truth, int time, const char* what) {
  GroundFact f{atom, truth, time, atom.str()};
  if (index) {
    auto [it, inserted] = index->emplace(f.key, truth);
    if (!inserted) {
      if (it->second != truth) throw InconsistencyError(std::string("contradictory ") + what + " for " + f.key);
      return;
    }
  } else {
    for (const auto& g : facts)
      if (g.key == f.key) {
        if (g.truth != truth) throw InconsistencyError(std::string("contradictory ") + what + " for " + f.key);
        return;
      }
  }
  facts.push_back(std::move(f));
}

}  // namespace

void Narrative::add_evidence(const Atom& atom, bool truth, int time) {
  bump(time);
  insert_fact(evidence_, &evidence_index_, atom, truth, time, "evidence");
}

void Narrative::add_annotation(const Atom& atom, bool truth, int time) {
  bump(time);
  insert_fact(annotation_, &annotation_index_, atom, truth, time, "annotation");
}

void Narrative::add_fixed(const Atom& atom, bool truth, int time) {
  bump(time);
  insert_fact(fixed_, nullptr, atom, truth, time, "fixed value");
}

bool Narrative::evidence_true(const std::string& key) const {
  auto it = evidence_index_.find(key);
  return it != evidence_index_.end() && it->second;
}

bool Narrative::annotated(const std::string& key) const {
  auto it = annotation_index_.find(key);
  return it != annotation_index_.end() && it->second;
}

void Narrative::clear_annotation() {
  annotation_.clear();
  annotation_index_.clear();
}

void Narrative::reindex() {
  evidence_index_.clear();
  for (const auto& f : evidence_) evidence_index_[f.key] = f.truth;
}

int time_argument(const Atom& atom, const Signature& sig) {
  const PredicateDecl* p = sig.predicate(atom.predicate);
  if (!p) return -1;
  for (std::size_t i = 0; i < p->arg_sorts.size(); ++i)
    if (p->arg_sorts[i] == kTimeSort) return static_cast<int>(i);
  return -1;
}

namespace {

int atom_time(const Atom& a, const Signature& sig) {
  int idx = time_argument(a, sig);
  return idx < 0 ? -1 : a.args[idx].value;
}

struct ParsedFact {
  Atom atom;
  bool truth;
  int time;
};

ParsedFact parse_fact(TokenCursor& cur, const Signature& sig) {
  bool truth = !cur.accept(Tok::Bang);
  Token where = cur.peek();
  Atom a = detail::parse_atom(cur);
  detail::resolve_atom(a, sig, where);
  if (!a.is_ground()) cur.fail_at(where, "narrative atoms must be ground: " + a.str());
  cur.accept(Tok::Dot);
  if (!cur.at_end()) cur.fail("unexpected '" + cur.peek().text + "' after atom");
  int time = atom_time(a, sig);
  return {std::move(a), truth, time};
}

[[noreturn]] void rethrow_at(const Token& t, const Error& e) {
  throw ParseError(e.what(), t.line, t.column);
}

}  // namespace

Narrative parse_narrative(std::string_view text, const Signature& sig) {
  Narrative n;
  std::optional<int> horizon;
  for (const auto& stmt : detail::split_statements(detail::tokenize(text))) {
    TokenCursor cur(stmt);
    const Token& first = cur.peek();
    if (first.kind == Tok::End) continue;
    if (first.kind == Tok::Ident && first.text == "horizon" && cur.peek(1).kind == Tok::Number) {
      cur.take();
      const Token& num = cur.take();
      if (num.text.find_first_not_of("0123456789") != std::string::npos)
        cur.fail_at(num, "horizon must be an integer");
      cur.accept(Tok::Dot);
      if (!cur.at_end()) cur.fail("unexpected tokens after horizon");
      if (horizon) cur.fail_at(first, "horizon given twice");
      horizon = std::stoi(num.text);
      continue;
    }
    bool fix = false;
    if (first.kind == Tok::Ident && first.text == "fix" &&
        (cur.peek(1).kind == Tok::Bang || cur.peek(1).kind == Tok::Ident)) {
      cur.take();
      fix = true;
    }
    Token where = cur.peek();
    ParsedFact f = parse_fact(cur, sig);
    const std::string& pred = f.atom.predicate;
    try {
      if (fix) {
        if (pred != kHoldsAt) cur.fail_at(where, "only holdsAt atoms can be fixed");
        n.add_fixed(f.atom, f.truth, f.time);
      } else if (pred == kHoldsAt) {
        n.add_annotation(f.atom, f.truth, f.time);
      } else if (pred == kInitiatedAt || pred == kTerminatedAt) {
        cur.fail_at(where, pred + " cannot appear in a narrative");
      } else {
        n.add_evidence(f.atom, f.truth, f.time);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      rethrow_at(where, e);
    }
  }
  if (horizon) n.set_horizon(*horizon, true);
  return n;
}

Narrative load_narrative(const std::string& path, const Signature& sig) {
  return with_file(path, [&] { return parse_narrative(read_file(path), sig); });
}

namespace {

bool parse_truth(std::string v, int lineno) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("bad truth value '" + v + "'", lineno, 1);
}

void parse_annotation_csv(std::string_view text, const Signature& sig, Narrative& n) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header) {
      header = true;
      continue;
    }
    auto first = line.find(',');
    auto last = line.rfind(',');
    if (first == std::string::npos || first == last) throw ParseError("expected time,fluent,truth", lineno, 1);
    int time = 0;
    try {
      time = std::stoi(line.substr(0, first));
    } catch (const std::exception&) {
      throw ParseError("bad time field", lineno, 1);
    }
    bool truth = parse_truth(line.substr(last + 1), lineno);
    auto toks = detail::tokenize(line.substr(first + 1, last - first - 1));
    for (auto& t : toks) {
      t.line = lineno;
      t.column += static_cast<int>(first) + 1;
    }
    TokenCursor cur(toks);
    Term fluent = detail::parse_term(cur);
    while (cur.peek().kind == Tok::Newline) cur.take();
    if (!cur.at_end()) cur.fail("unexpected tokens after fluent");
    Atom a{kHoldsAt, {fluent, Term::time(time)}};
    Token where{Tok::Ident, "", lineno, static_cast<int>(first) + 2};
    detail::resolve_atom(a, sig, where);
    if (!a.is_ground()) throw ParseError("fluent must be ground", lineno, where.column);
    try {
      n.add_annotation(a, truth, time);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      rethrow_at(where, e);
    }
  }
}

}  // namespace

void parse_annotation(std::string_view text, const Signature& sig, Narrative& n) {
  auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos && text.substr(start).rfind("time,", 0) == 0)
    return parse_annotation_csv(text.substr(start), sig, n);
  for (const auto& stmt : detail::split_statements(detail::tokenize(text))) {
    TokenCursor cur(stmt);
    if (cur.at_end()) continue;
    Token where = cur.peek();
    ParsedFact f = parse_fact(cur, sig);
    if (f.atom.predicate != kHoldsAt) cur.fail_at(where, "annotation lines must be holdsAt atoms");
    try {
      n.add_annotation(f.atom, f.truth, f.time);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      rethrow_at(where, e);
    }
  }
}

std::string serialize_narrative(const Narrative& n) {
  std::vector<std::pair<int, std::string>> lines;
  for (const auto& f : n.evidence()) lines.emplace_back(f.time, (f.truth ? "" : "!") + f.key);
  for (const auto& f : n.fixed()) lines.emplace_back(f.time, (f.truth ? "fix " : "fix !") + f.key);
  for (const auto& f : n.annotation()) lines.emplace_back(f.time, (f.truth ? "" : "!") + f.key);
  std::stable_sort(lines.begin(), lines.end());
  std::string out = "horizon " + std::to_string(n.horizon()) + "\n";
  for (const auto& [t, s] : lines) out += s + "\n";
  return out;
}

}  // namespace mlnec
