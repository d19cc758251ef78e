#include "lexer.hpp"

#include <cctype>

#include "mlnec/error.hpp"

namespace mlnec::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool continues(Tok k) {
  switch (k) {
    case Tok::And:
    case Tok::Or:
    case Tok::Implies:
    case Tok::Iff:
    case Tok::If:
    case Tok::Comma:
    case Tok::Bang:
    case Tok::Equals:
    case Tok::At:
    case Tok::Slash:
    case Tok::Plus:
    case Tok::Minus:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string s, int c) { out.push_back({k, std::move(s), line, c}); };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      push(Tok::Newline, "\n", col);
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    int start_col = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      Tok kind = word == "v" ? Tok::Or : Tok::Ident;
      push(kind, std::move(word), start_col);
      continue;
    }
    if (digit(c)) {
      std::size_t j = i;
      while (j < text.size() && digit(text[j])) ++j;
      if (j + 1 < text.size() && text[j] == '.' && digit(text[j + 1])) {
        ++j;
        while (j < text.size() && digit(text[j])) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && digit(text[k])) {
          j = k;
          while (j < text.size() && digit(text[j])) ++j;
        }
      }
      push(Tok::Number, std::string(text.substr(i, j - i)), start_col);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto two = text.substr(i, 2);
    auto three = text.substr(i, 3);
    if (three == "<=>") {
      push(Tok::Iff, "<=>", start_col);
      i += 3;
      col += 3;
      continue;
    }
    if (two == ":-" || two == "=>") {
      push(two == ":-" ? Tok::If : Tok::Implies, std::string(two), start_col);
      i += 2;
      col += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case '=': k = Tok::Equals; break;
      case '!': k = Tok::Bang; break;
      case '^': k = Tok::And; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '.': k = Tok::Dot; break;
      case '@': k = Tok::At; break;
      case '/': k = Tok::Slash; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    push(k, std::string(1, c), start_col);
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

std::vector<std::vector<Token>> split_statements(const std::vector<Token>& tokens) {
  std::vector<std::vector<Token>> out;
  std::vector<Token> cur;
  int depth = 0;
  auto flush = [&](const Token& at) {
    if (cur.empty()) return;
    cur.push_back({Tok::End, "", at.line, at.column});
    out.push_back(std::move(cur));
    cur.clear();
  };
  for (const auto& t : tokens) {
    switch (t.kind) {
      case Tok::End:
        flush(t);
        return out;
      case Tok::Newline:
        if (depth == 0 && !cur.empty() && !continues(cur.back().kind)) flush(t);
        continue;
      case Tok::Dot:
        if (depth == 0) {
          flush(t);
          continue;
        }
        break;
      case Tok::LParen:
      case Tok::LBrace:
        ++depth;
        break;
      case Tok::RParen:
      case Tok::RBrace:
        if (depth > 0) --depth;
        break;
      default:
        break;
    }
    cur.push_back(t);
  }
  return out;
}

bool is_variable_name(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  std::size_t p = pos_ + ahead;
  if (p < toks_->size()) return (*toks_)[p];
  if (!toks_->empty()) {
    end_.line = toks_->back().line;
    end_.column = toks_->back().column;
  }
  return end_;
}

const Token& TokenCursor::take() {
  const Token& t = peek();
  if (pos_ < toks_->size()) ++pos_;
  return t;
}

bool TokenCursor::accept(Tok kind) {
  if (peek().kind != kind) return false;
  take();
  return true;
}

const Token& TokenCursor::expect(Tok kind, const char* what) {
  if (peek().kind != kind) {
    const Token& t = peek();
    fail_at(t, std::string("expected ") + what + (t.kind == Tok::End ? " at end of statement" : ", found '" + t.text + "'"));
  }
  return take();
}

void TokenCursor::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenCursor::fail_at(const Token& t, const std::string& message) const {
  throw ParseError(message, t.line, t.column);
}

Term parse_term(TokenCursor& cur) {
  const Token& t = cur.peek();
  if (t.kind == Tok::Number) {
    cur.take();
    if (t.text.find_first_not_of("0123456789") != std::string::npos)
      cur.fail_at(t, "non-integer constant " + t.text);
    return Term::constant(t.text);
  }
  if (t.kind != Tok::Ident) cur.fail("expected a term");
  std::string name = cur.take().text;
  if (cur.accept(Tok::LParen)) {
    std::vector<Term> args;
    if (!cur.accept(Tok::RParen)) {
      do {
        args.push_back(parse_term(cur));
      } while (cur.accept(Tok::Comma));
      cur.expect(Tok::RParen, "')'");
    }
    return Term::function(std::move(name), std::move(args));
  }
  if (is_variable_name(name)) {
    int offset = 0;
    if (cur.accept(Tok::Plus)) {
      const Token& n = cur.expect(Tok::Number, "a successor offset");
      if (n.text.find_first_not_of("0123456789") != std::string::npos) cur.fail_at(n, "offset must be an integer");
      offset = std::stoi(n.text);
    }
    return Term::variable(std::move(name), offset);
  }
  return Term::constant(std::move(name));
}

Atom parse_atom(TokenCursor& cur) {
  const Token& t = cur.expect(Tok::Ident, "a predicate");
  if (is_variable_name(t.text)) cur.fail_at(t, "predicate names start with a lower-case letter: " + t.text);
  Atom a;
  a.predicate = t.text;
  cur.expect(Tok::LParen, "'('");
  if (!cur.accept(Tok::RParen)) {
    do {
      a.args.push_back(parse_term(cur));
    } while (cur.accept(Tok::Comma));
    cur.expect(Tok::RParen, "')'");
  }
  return a;
}

void resolve_atom(Atom& atom, const Signature& sig, const Token& where) {
  auto prefix = [&] { return std::to_string(where.line) + ":" + std::to_string(where.column) + ": "; };
  const PredicateDecl* decl = sig.predicate(atom.predicate);
  if (!decl) throw SortError(prefix() + "undeclared predicate " + atom.predicate);
  if (decl->arg_sorts.size() != atom.args.size())
    throw SortError(prefix() + "arity mismatch for " + atom.predicate + ": expected " +
                    std::to_string(decl->arg_sorts.size()) + ", got " + std::to_string(atom.args.size()));
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    Term& a = atom.args[i];
    if (decl->arg_sorts[i] == kTimeSort && a.kind == Term::Kind::Constant &&
        a.name.find_first_not_of("0123456789") == std::string::npos)
      a = Term::time(std::stoi(a.name));
  }
  try {
    variable_sorts(std::vector<Literal>{Literal{atom, true}}, sig);
  } catch (const SortError& e) {
    throw SortError(prefix() + e.what());
  }
}

}  // namespace mlnec::detail
