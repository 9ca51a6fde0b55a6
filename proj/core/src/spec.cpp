#include "modsynth/spec.hpp"

#include <algorithm>
#include <set>

#include "lexer.hpp"
#include "modsynth/errors.hpp"

namespace modsynth {

using detail::Cursor;
using detail::Scope;
using detail::Tok;

SortContext LtlTSpec::sorts() const {
  SortContext ctx;
  for (const auto& v : env) ctx[v.name] = v.sort;
  for (const auto& v : sys) ctx[v.name] = v.sort;
  return ctx;
}

bool LtlTSpec::is_env(const std::string& name) const {
  return std::any_of(env.begin(), env.end(), [&](const Variable& v) { return v.name == name; });
}

namespace {

bool is_temporal_word(const Cursor& cur) {
  return cur.at_word("G") || cur.at_word("F") || cur.at_word("X");
}

const std::set<std::string> kReserved{"G", "F", "X", "U", "R", "true", "false", "forall", "exists",
                                      "divides", "env", "sys", "property", "int", "real"};

// Shared LTL grammar; leaves come from a callback.
class LtlParser {
 public:
  using LeafFn = std::function<LtlNode(Cursor&)>;

  LtlParser(Cursor& cur, LeafFn leaf) : cur_(cur), leaf_(std::move(leaf)) {}

  LtlNode parse() { return iff(); }

 private:
  LtlNode iff() {
    LtlNode lhs = implication();
    while (cur_.accept(Tok::Iff)) lhs = LtlNode::binary(LtlNode::Kind::Iff, std::move(lhs), implication());
    return lhs;
  }

  LtlNode implication() {
    LtlNode lhs = disjunction();
    if (cur_.accept(Tok::Implies)) return LtlNode::binary(LtlNode::Kind::Implies, std::move(lhs), implication());
    return lhs;
  }

  LtlNode disjunction() {
    LtlNode lhs = conjunction();
    while (cur_.accept(Tok::Or)) lhs = LtlNode::binary(LtlNode::Kind::Or, std::move(lhs), conjunction());
    return lhs;
  }

  LtlNode conjunction() {
    LtlNode lhs = binary_temporal();
    while (cur_.accept(Tok::And)) lhs = LtlNode::binary(LtlNode::Kind::And, std::move(lhs), binary_temporal());
    return lhs;
  }

  LtlNode binary_temporal() {
    LtlNode lhs = unary();
    if (cur_.accept_word("U")) return LtlNode::binary(LtlNode::Kind::Until, std::move(lhs), binary_temporal());
    if (cur_.accept_word("R")) return LtlNode::binary(LtlNode::Kind::Release, std::move(lhs), binary_temporal());
    return lhs;
  }

  LtlNode unary() {
    if (cur_.accept(Tok::Not)) return LtlNode::unary(LtlNode::Kind::Not, unary());
    if (is_temporal_word(cur_)) {
      std::string w = cur_.next().text;
      LtlNode::Kind k = w == "G" ? LtlNode::Kind::Globally : w == "F" ? LtlNode::Kind::Eventually : LtlNode::Kind::Next;
      return LtlNode::unary(k, unary());
    }
    return primary();
  }

  LtlNode primary() {
    if (cur_.accept_word("true")) return LtlNode::constant(true);
    if (cur_.accept_word("false")) return LtlNode::constant(false);
    if (cur_.at(Tok::LParen)) {
      std::size_t mark = cur_.position();
      try {
        return leaf_(cur_);
      } catch (const SyntaxError&) {
        cur_.rewind(mark);
      } catch (const UndeclaredVariable&) {
        cur_.rewind(mark);
      }
      cur_.next();
      LtlNode inner = iff();
      cur_.expect(Tok::RParen, "')'");
      return inner;
    }
    return leaf_(cur_);
  }

  Cursor& cur_;
  LeafFn leaf_;
};

class LiteralTable {
 public:
  explicit LiteralTable(std::vector<Formula>& literals) : literals_(literals) {}

  LtlNode convert(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::True: return LtlNode::constant(true);
      case Formula::Kind::False: return LtlNode::constant(false);
      case Formula::Kind::Atom: return lookup(f);
      case Formula::Kind::Not: return LtlNode::unary(LtlNode::Kind::Not, convert(f.children()[0]));
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        auto k = f.kind() == Formula::Kind::And ? LtlNode::Kind::And : LtlNode::Kind::Or;
        LtlNode acc = convert(f.children()[0]);
        for (std::size_t i = 1; i < f.children().size(); ++i)
          acc = LtlNode::binary(k, std::move(acc), convert(f.children()[i]));
        return acc;
      }
      default: throw SyntaxError("quantified formula used as a literal: " + to_string(f));
    }
  }

 private:
  LtlNode lookup(const Formula& atom) {
    for (std::size_t i = 0; i < literals_.size(); ++i)
      if (literals_[i] == atom) return LtlNode::lit(i);
    Formula neg = complement(atom.as_atom());
    if (neg.kind() == Formula::Kind::Atom)
      for (std::size_t i = 0; i < literals_.size(); ++i)
        if (literals_[i] == neg) return LtlNode::unary(LtlNode::Kind::Not, LtlNode::lit(i));
    literals_.push_back(atom);
    return LtlNode::lit(literals_.size() - 1);
  }

  std::vector<Formula>& literals_;
};

}  // namespace

LtlTSpec parse_spec(std::string_view text, std::optional<Sort> theory) {
  Cursor cur(detail::tokenize(text));
  LtlTSpec spec;
  std::set<std::string> declared;
  while (cur.at_word("env") || cur.at_word("sys")) {
    bool env = cur.next().text == "env";
    const auto& name_tok = cur.expect(Tok::Ident, "variable name");
    std::string name = name_tok.text;
    if (kReserved.count(name)) cur.fail_at(name_tok, "reserved word used as a variable name");
    cur.expect(Tok::Colon, "':'");
    const auto& sort_tok = cur.expect(Tok::Ident, "sort");
    Sort sort;
    try {
      sort = parse_sort(sort_tok.text);
    } catch (const SyntaxError&) {
      cur.fail_at(sort_tok, "unknown sort");
    }
    cur.expect(Tok::Semi, "';'");
    if (!declared.insert(name).second)
      throw DuplicateDeclaration(std::to_string(name_tok.line) + ":" + std::to_string(name_tok.column) +
                                 ": variable '" + name + "' declared twice");
    if (theory) sort = *theory;
    (env ? spec.env : spec.sys).push_back(Variable{name, sort});
  }
  if (cur.accept_word("property")) cur.expect(Tok::Colon, "':'");
  SortContext ctx = spec.sorts();
  Scope scope(ctx);
  LiteralTable table(spec.literals);
  LtlParser parser(cur, [&](Cursor& c) { return table.convert(detail::parse_atom(c, scope)); });
  spec.property = parser.parse();
  cur.accept(Tok::Semi);
  if (!cur.at(Tok::End)) cur.fail("unexpected trailing input");
  return spec;
}

const std::vector<Formula>& extract_literals(const LtlTSpec& spec) { return spec.literals; }

bool is_boolean(const LtlNode& n) {
  switch (n.kind) {
    case LtlNode::Kind::True:
    case LtlNode::Kind::False:
    case LtlNode::Kind::Literal: return true;
    case LtlNode::Kind::Not:
    case LtlNode::Kind::And:
    case LtlNode::Kind::Or:
    case LtlNode::Kind::Implies:
    case LtlNode::Kind::Iff:
      return std::all_of(n.children.begin(), n.children.end(), [](const LtlNode& c) { return is_boolean(c); });
    default: return false;
  }
}

namespace {

// Boolean combination in which Next only wraps temporal-free subformulas.
bool is_step(const LtlNode& n) {
  switch (n.kind) {
    case LtlNode::Kind::Next: return is_boolean(n.children[0]);
    case LtlNode::Kind::True:
    case LtlNode::Kind::False:
    case LtlNode::Kind::Literal: return true;
    case LtlNode::Kind::Not:
    case LtlNode::Kind::And:
    case LtlNode::Kind::Or:
    case LtlNode::Kind::Implies:
    case LtlNode::Kind::Iff:
      return std::all_of(n.children.begin(), n.children.end(), [](const LtlNode& c) { return is_step(c); });
    default: return false;
  }
}

bool is_safety_conjunct(const LtlNode& n) {
  if (n.kind == LtlNode::Kind::And) return is_safety_conjunct(n.children[0]) && is_safety_conjunct(n.children[1]);
  if (n.kind == LtlNode::Kind::Globally) {
    const LtlNode& body = n.children[0];
    if (body.kind == LtlNode::Kind::Globally) return is_safety_conjunct(body);
    return is_step(body);
  }
  return is_step(n);
}

}  // namespace

Fragment classify_fragment(const LtlNode& property) {
  return is_safety_conjunct(property) ? Fragment::GXSafety : Fragment::General;
}

bool eval_boolean(const LtlNode& n, const std::function<bool(std::size_t)>& leaf) {
  switch (n.kind) {
    case LtlNode::Kind::True: return true;
    case LtlNode::Kind::False: return false;
    case LtlNode::Kind::Literal: return leaf(n.literal);
    case LtlNode::Kind::Not: return !eval_boolean(n.children[0], leaf);
    case LtlNode::Kind::And: return eval_boolean(n.children[0], leaf) && eval_boolean(n.children[1], leaf);
    case LtlNode::Kind::Or: return eval_boolean(n.children[0], leaf) || eval_boolean(n.children[1], leaf);
    case LtlNode::Kind::Implies: return !eval_boolean(n.children[0], leaf) || eval_boolean(n.children[1], leaf);
    case LtlNode::Kind::Iff: return eval_boolean(n.children[0], leaf) == eval_boolean(n.children[1], leaf);
    default: throw FragmentError("temporal operator in a Boolean position");
  }
}

std::string render_ltl(const LtlNode& n, const std::function<std::string(std::size_t)>& leaf) {
  auto wrap = [&](const LtlNode& c) {
    std::string s = render_ltl(c, leaf);
    bool simple = c.children.empty() ? s.find(' ') == std::string::npos : c.children.size() == 1;
    return simple ? s : "(" + s + ")";
  };
  auto bin = [&](const char* op) { return wrap(n.children[0]) + " " + op + " " + wrap(n.children[1]); };
  switch (n.kind) {
    case LtlNode::Kind::True: return "true";
    case LtlNode::Kind::False: return "false";
    case LtlNode::Kind::Literal: return leaf(n.literal);
    case LtlNode::Kind::Not: return "!" + wrap(n.children[0]);
    case LtlNode::Kind::And: return bin("&&");
    case LtlNode::Kind::Or: return bin("||");
    case LtlNode::Kind::Implies: return bin("->");
    case LtlNode::Kind::Iff: return bin("<->");
    case LtlNode::Kind::Until: return bin("U");
    case LtlNode::Kind::Release: return bin("R");
    case LtlNode::Kind::Next: return "X " + wrap(n.children[0]);
    case LtlNode::Kind::Eventually: return "F " + wrap(n.children[0]);
    case LtlNode::Kind::Globally: return "G " + wrap(n.children[0]);
  }
  return "";
}

std::string render_spec(const LtlTSpec& spec) {
  std::string out;
  for (const auto& v : spec.env) out += "env " + v.name + " : " + std::string(to_string(v.sort)) + ";\n";
  for (const auto& v : spec.sys) out += "sys " + v.name + " : " + std::string(to_string(v.sort)) + ";\n";
  out += "property : " +
         render_ltl(spec.property, [&](std::size_t i) { return to_string(spec.literals.at(i)); }) + "\n";
  return out;
}

LtlNode parse_propositional_ltl(std::string_view text, const std::vector<std::string>& names) {
  Cursor cur(detail::tokenize(text));
  LtlParser parser(cur, [&](Cursor& c) -> LtlNode {
    const auto& tok = c.expect(Tok::Ident, "proposition");
    auto it = std::find(names.begin(), names.end(), tok.text);
    if (it == names.end()) c.fail_at(tok, "unknown proposition");
    return LtlNode::lit(static_cast<std::size_t>(it - names.begin()));
  });
  LtlNode n = parser.parse();
  if (!cur.at(Tok::End)) cur.fail("unexpected trailing input");
  return n;
}

}  // namespace modsynth
