#include "lexer.hpp"

#include <cctype>

#include "modsynth/errors.hpp"

namespace modsynth::detail {

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto emit = [&](Tok kind, std::size_t len) {
    out.push_back(Token{kind, std::string(text.substr(i, len)), line, col});
    advance(len);
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      emit(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      emit(Tok::Number, j - i);
      continue;
    }
    auto two = text.substr(i, 2);
    auto three = text.substr(i, 3);
    if (three == "<->") { emit(Tok::Iff, 3); continue; }
    if (two == "->") { emit(Tok::Implies, 2); continue; }
    if (two == "<=") { emit(Tok::Le, 2); continue; }
    if (two == ">=") { emit(Tok::Ge, 2); continue; }
    if (two == "!=") { emit(Tok::Ne, 2); continue; }
    if (two == "==") { emit(Tok::Eq, 2); continue; }
    if (two == "&&") { emit(Tok::And, 2); continue; }
    if (two == "||") { emit(Tok::Or, 2); continue; }
    switch (c) {
      case '(': emit(Tok::LParen, 1); continue;
      case ')': emit(Tok::RParen, 1); continue;
      case '{': emit(Tok::LBrace, 1); continue;
      case '}': emit(Tok::RBrace, 1); continue;
      case ',': emit(Tok::Comma, 1); continue;
      case ':': emit(Tok::Colon, 1); continue;
      case ';': emit(Tok::Semi, 1); continue;
      case '.': emit(Tok::Dot, 1); continue;
      case '+': emit(Tok::Plus, 1); continue;
      case '-': emit(Tok::Minus, 1); continue;
      case '*': emit(Tok::Star, 1); continue;
      case '/': emit(Tok::Slash, 1); continue;
      case '<': emit(Tok::Lt, 1); continue;
      case '>': emit(Tok::Gt, 1); continue;
      case '=': emit(Tok::Eq, 1); continue;
      case '!': emit(Tok::Not, 1); continue;
      case '&': emit(Tok::And, 1); continue;
      case '|': emit(Tok::Or, 1); continue;
      default: break;
    }
    throw SyntaxError(std::to_string(line) + ":" + std::to_string(col) + ": unexpected character '" +
                      std::string(1, c) + "'");
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

const Token& Cursor::peek(std::size_t k) const {
  std::size_t idx = std::min(pos_ + k, tokens_.size() - 1);
  return tokens_[idx];
}

const Token& Cursor::next() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool Cursor::accept(Tok t) {
  if (!at(t)) return false;
  next();
  return true;
}

bool Cursor::accept_word(std::string_view w) {
  if (!at_word(w)) return false;
  next();
  return true;
}

const Token& Cursor::expect(Tok t, std::string_view what) {
  if (!at(t)) fail("expected " + std::string(what));
  return next();
}

void Cursor::expect_word(std::string_view w) {
  if (!accept_word(w)) fail("expected '" + std::string(w) + "'");
}

void Cursor::fail(const std::string& message) const { fail_at(peek(), message); }

void Cursor::fail_at(const Token& tok, const std::string& message) const {
  std::string found = tok.kind == Tok::End ? "end of input" : "'" + tok.text + "'";
  throw SyntaxError(std::to_string(tok.line) + ":" + std::to_string(tok.column) + ": " + message + ", found " +
                    found);
}

const Sort* Scope::find(const std::string& name) const {
  for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
    if (it->first == name) return &it->second;
  auto g = globals_.find(name);
  return g == globals_.end() ? nullptr : &g->second;
}

namespace {

Rational number_value(const Token& t) {
  auto dot = t.text.find('.');
  if (dot == std::string::npos) return Rational(Integer(t.text));
  std::string digits = t.text.substr(0, dot) + t.text.substr(dot + 1);
  Integer den = 1;
  for (std::size_t k = dot + 1; k < t.text.size(); ++k) den *= 10;
  Rational q(Integer(digits), den);
  q.canonicalize();
  return q;
}

TypedTerm parse_sum(Cursor& cur, const Scope& scope);

TypedTerm parse_factor(Cursor& cur, const Scope& scope) {
  if (cur.accept(Tok::Minus)) {
    TypedTerm t = parse_factor(cur, scope);
    t.term = -t.term;
    return t;
  }
  if (cur.accept(Tok::Plus)) return parse_factor(cur, scope);
  if (cur.at(Tok::Number)) return TypedTerm{LinearTerm(number_value(cur.next()))};
  if (cur.at(Tok::Ident)) {
    static const char* const reserved[] = {"forall", "exists", "true", "false", "divides"};
    for (const char* w : reserved)
      if (cur.at_word(w)) cur.fail("expected a term");
    const Token& tok = cur.next();
    const Sort* sort = scope.find(tok.text);
    if (!sort) throw UndeclaredVariable(std::to_string(tok.line) + ":" + std::to_string(tok.column) +
                                        ": undeclared variable '" + tok.text + "'");
    TypedTerm t{LinearTerm::variable(tok.text)};
    (*sort == Sort::Int ? t.has_int : t.has_real) = true;
    return t;
  }
  if (cur.accept(Tok::LParen)) {
    TypedTerm t = parse_sum(cur, scope);
    cur.expect(Tok::RParen, "')'");
    return t;
  }
  cur.fail("expected a term");
}

TypedTerm parse_product(Cursor& cur, const Scope& scope) {
  TypedTerm acc = parse_factor(cur, scope);
  while (cur.at(Tok::Star) || cur.at(Tok::Slash)) {
    const Token& op = cur.next();
    TypedTerm rhs = parse_factor(cur, scope);
    if (op.kind == Tok::Star) {
      if (!acc.term.is_constant() && !rhs.term.is_constant()) cur.fail_at(op, "nonlinear product");
      if (acc.term.is_constant()) std::swap(acc, rhs);
      acc.term = acc.term * rhs.term.constant();
    } else {
      if (!rhs.term.is_constant()) cur.fail_at(op, "division by a non-constant term");
      if (rhs.term.constant() == 0) cur.fail_at(op, "division by zero");
      acc.term = acc.term * Rational(1 / rhs.term.constant());
    }
    acc.has_int = acc.has_int || rhs.has_int;
    acc.has_real = acc.has_real || rhs.has_real;
  }
  return acc;
}

TypedTerm parse_sum(Cursor& cur, const Scope& scope) {
  TypedTerm acc = parse_product(cur, scope);
  while (cur.at(Tok::Plus) || cur.at(Tok::Minus)) {
    bool minus = cur.next().kind == Tok::Minus;
    TypedTerm rhs = parse_product(cur, scope);
    acc.term += minus ? -rhs.term : rhs.term;
    acc.has_int = acc.has_int || rhs.has_int;
    acc.has_real = acc.has_real || rhs.has_real;
  }
  return acc;
}

Sort sort_of(const TypedTerm& t, const Cursor& cur) {
  if (t.has_int && t.has_real) throw SortMismatch("atom mixes int and real variables near " +
                                                  std::to_string(cur.peek().line) + ":" +
                                                  std::to_string(cur.peek().column));
  return t.has_real ? Sort::Real : Sort::Int;
}

}  // namespace

TypedTerm parse_expression(Cursor& cur, const Scope& scope) { return parse_sum(cur, scope); }

bool is_relation(Tok t) {
  return t == Tok::Le || t == Tok::Lt || t == Tok::Ge || t == Tok::Gt || t == Tok::Eq || t == Tok::Ne;
}

Formula parse_atom(Cursor& cur, const Scope& scope) {
  if (cur.at_word("divides") && cur.peek(1).kind == Tok::LParen) {
    cur.next();
    cur.next();
    const Token& k = cur.expect(Tok::Number, "divisibility modulus");
    Rational mod = number_value(k);
    if (!is_integer(mod) || mod <= 0) cur.fail_at(k, "modulus must be a positive integer");
    cur.expect(Tok::Comma, "','");
    TypedTerm t = parse_expression(cur, scope);
    cur.expect(Tok::RParen, "')'");
    if (t.has_real) throw SortMismatch("divisibility over a real-sorted term");
    return normalize_atom(RawAtom{t.term, RawRelation::Divides, Sort::Int, mod.get_num()});
  }
  TypedTerm lhs = parse_expression(cur, scope);
  if (!is_relation(cur.peek().kind)) cur.fail("expected a relation");
  Tok rel = cur.next().kind;
  TypedTerm rhs = parse_expression(cur, scope);
  TypedTerm diff{lhs.term - rhs.term, lhs.has_int || rhs.has_int, lhs.has_real || rhs.has_real};
  RawRelation raw = RawRelation::Eq;
  switch (rel) {
    case Tok::Le: raw = RawRelation::Le; break;
    case Tok::Lt: raw = RawRelation::Lt; break;
    case Tok::Ge: raw = RawRelation::Ge; break;
    case Tok::Gt: raw = RawRelation::Gt; break;
    case Tok::Ne: raw = RawRelation::Ne; break;
    default: break;
  }
  return normalize_atom(RawAtom{diff.term, raw, sort_of(diff, cur)});
}

}  // namespace modsynth::detail
