#pragma once

// Tokenizer and term/atom parsing shared by the KB, narrative and annotation
// readers. Internal to the library.

#include <string>
#include <string_view>
#include <vector>

#include "mlnec/logic.hpp"

namespace mlnec::detail {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Equals,
  Bang,
  And,      // ^
  Or,       // v
  Implies,  // =>
  Iff,      // <=>
  If,       // :-
  Plus,
  Minus,
  Dot,
  At,
  Slash,
  Newline,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

/// Tokenize text; comments start with "//" or "#" and run to end of line.
std::vector<Token> tokenize(std::string_view text);

/// Split a token stream into logical statements. A newline ends a statement
/// unless brackets are open or the previous token expects a continuation. A
/// '.' at bracket depth zero also ends a statement.
std::vector<std::vector<Token>> split_statements(const std::vector<Token>& tokens);

bool is_variable_name(const std::string& name);

class TokenCursor {
 public:
  explicit TokenCursor(const std::vector<Token>& toks) : toks_(&toks) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& take();
  bool accept(Tok kind);
  const Token& expect(Tok kind, const char* what);
  bool at_end() const { return peek().kind == Tok::End; }
  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& message) const;

 private:
  const std::vector<Token>* toks_;
  std::size_t pos_ = 0;
  mutable Token end_{Tok::End, "", 0, 0};
};

Term parse_term(TokenCursor& cur);
Atom parse_atom(TokenCursor& cur);

/// Convert integer constants in time-sorted positions to time-points and
/// validate the atom against the signature. Errors carry the token position.
void resolve_atom(Atom& atom, const Signature& sig, const Token& where);

}  // namespace mlnec::detail
