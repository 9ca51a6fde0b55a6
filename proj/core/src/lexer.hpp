#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "modsynth/logic.hpp"

namespace modsynth::detail {

enum class Tok {
  Ident, Number,
  LParen, RParen, LBrace, RBrace, Comma, Colon, Semi, Dot,
  Plus, Minus, Star, Slash,
  Le, Lt, Ge, Gt, Eq, Ne,
  Not, And, Or, Implies, Iff,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view text);

// Token stream with lookahead and positioned errors.
class Cursor {
 public:
  explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t k = 0) const;
  const Token& next();
  bool at(Tok t) const { return peek().kind == t; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool accept(Tok t);
  bool accept_word(std::string_view w);
  const Token& expect(Tok t, std::string_view what);
  void expect_word(std::string_view w);

  std::size_t position() const { return pos_; }
  void rewind(std::size_t p) { pos_ = p; }

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& tok, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// Scope for resolving identifiers in arithmetic expressions.
class Scope {
 public:
  explicit Scope(const SortContext& globals) : globals_(globals) {}
  void push(const std::string& name, Sort sort) { locals_.emplace_back(name, sort); }
  void pop() { locals_.pop_back(); }
  const Sort* find(const std::string& name) const;

 private:
  const SortContext& globals_;
  std::vector<std::pair<std::string, Sort>> locals_;
};

struct TypedTerm {
  LinearTerm term;
  bool has_int = false;
  bool has_real = false;
};

// Linear expression: sums of (rational constant) * variable terms.
TypedTerm parse_expression(Cursor& cur, const Scope& scope);

bool is_relation(Tok t);

// `expr rel expr` or `divides(k, expr)`; returns the normalized formula.
Formula parse_atom(Cursor& cur, const Scope& scope);

}  // namespace modsynth::detail
