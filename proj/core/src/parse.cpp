#include "modsynth/parse.hpp"

#include "lexer.hpp"
#include "modsynth/errors.hpp"

namespace modsynth {

namespace {

using detail::Cursor;
using detail::Scope;
using detail::Tok;

class FormulaParser {
 public:
  FormulaParser(Cursor& cur, Scope& scope) : cur_(cur), scope_(scope) {}

  Formula parse() { return iff(); }

 private:
  Formula iff() {
    Formula lhs = implication();
    while (cur_.accept(Tok::Iff)) {
      Formula rhs = implication();
      lhs = Formula::conj(Formula::implies(lhs, rhs), Formula::implies(rhs, lhs));
    }
    return lhs;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (cur_.accept(Tok::Implies)) return Formula::implies(lhs, implication());
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (cur_.accept(Tok::Or)) parts.push_back(conjunction());
    return parts.size() == 1 ? parts.front() : Formula::disj(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (cur_.accept(Tok::And)) parts.push_back(unary());
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  Formula unary() {
    if (cur_.accept(Tok::Not)) return Formula::negate(unary());
    if (cur_.at_word("forall") || cur_.at_word("exists")) return quantifier();
    return primary();
  }

  Formula quantifier() {
    bool universal = cur_.next().text == "forall";
    const auto& name = cur_.expect(Tok::Ident, "bound variable").text;
    std::string var = name;
    cur_.expect(Tok::Colon, "':'");
    const auto& sort_tok = cur_.expect(Tok::Ident, "sort");
    Sort sort;
    try {
      sort = parse_sort(sort_tok.text);
    } catch (const SyntaxError&) {
      cur_.fail_at(sort_tok, "unknown sort");
    }
    cur_.expect(Tok::Dot, "'.'");
    scope_.push(var, sort);
    Formula body = iff();
    scope_.pop();
    return universal ? Formula::forall(var, sort, body) : Formula::exists(var, sort, body);
  }

  Formula primary() {
    if (cur_.accept_word("true")) return Formula::top();
    if (cur_.accept_word("false")) return Formula::bottom();
    if (cur_.at(Tok::LParen)) {
      std::size_t mark = cur_.position();
      try {
        return detail::parse_atom(cur_, scope_);
      } catch (const SyntaxError&) {
        cur_.rewind(mark);
      }
      cur_.next();
      Formula inner = iff();
      cur_.expect(Tok::RParen, "')'");
      return inner;
    }
    return detail::parse_atom(cur_, scope_);
  }

  Cursor& cur_;
  Scope& scope_;
};

}  // namespace

Formula parse_formula(std::string_view text, const SortContext& sorts) {
  Cursor cur(detail::tokenize(text));
  Scope scope(sorts);
  FormulaParser parser(cur, scope);
  Formula f = parser.parse();
  if (!cur.at(Tok::End)) cur.fail("unexpected trailing input");
  return alpha_rename(f);
}

LinearTerm parse_term(std::string_view text, const SortContext& sorts) {
  Cursor cur(detail::tokenize(text));
  Scope scope(sorts);
  LinearTerm t = detail::parse_expression(cur, scope).term;
  if (!cur.at(Tok::End)) cur.fail("unexpected trailing input");
  return t;
}

}  // namespace modsynth
