#include <gtest/gtest.h>

#include <random>

#include "modsynth/errors.hpp"
#include "modsynth/spec.hpp"
#include "support/fixtures.hpp"

using namespace modsynth;
using Kind = LtlNode::Kind;

namespace {

std::string lits(const LtlTSpec& s) {
  std::string out;
  for (const auto& l : s.literals) out += (out.empty() ? "" : " | ") + to_string(l);
  return out;
}

// Pointwise equivalence of two literals over x in [-10, 10].
bool same_on_range(const Formula& a, const Formula& b) {
  for (long x = -10; x <= 10; ++x) {
    Valuation v{{"x", Rational(x)}};
    if (eval_formula(a, v) != eval_formula(b, v)) return false;
  }
  return true;
}

}  // namespace

TEST(ParseSpec, RunningExampleLiterals) {
  auto s = fixture::load_spec("running");
  ASSERT_EQ(s.literals.size(), 3u);
  ASSERT_EQ(s.env.size(), 1u);
  ASSERT_EQ(s.sys.size(), 1u);
  EXPECT_EQ(s.env[0].name, "x");
  EXPECT_EQ(s.sys[0].name, "y");
  // (x<2), (y>1), (y<=x) in first-occurrence order
  for (long x = -5; x <= 5; ++x)
    for (long y = -5; y <= 5; ++y) {
      Valuation v{{"x", Rational(x)}, {"y", Rational(y)}};
      EXPECT_EQ(eval_formula(s.literals[0], v), x < 2);
      EXPECT_EQ(eval_formula(s.literals[1], v), y > 1);
      EXPECT_EQ(eval_formula(s.literals[2], v), y <= x);
    }
  EXPECT_EQ(LtlTSpec::proposition(0), "s0");
  EXPECT_EQ(LtlTSpec::proposition(2), "s2");
}

TEST(ParseSpec, SingleLiteral) {
  auto s = parse_spec("env x:int; sys y:int; G(y > x)");
  ASSERT_EQ(s.literals.size(), 1u);
  EXPECT_EQ(s.property, LtlNode::unary(Kind::Globally, LtlNode::lit(0)));
}

TEST(ParseSpec, PropertyKeywordOptional) {
  auto a = parse_spec("env x:int; sys y:int; property: G(y > x);");
  auto b = parse_spec("env x:int; sys y:int; G(y > x)");
  EXPECT_EQ(a.property, b.property);
}

TEST(ParseSpec, Errors) {
  EXPECT_THROW(parse_spec("env x:int; sys y:int; G(y > z)"), UndeclaredVariable);
  EXPECT_THROW(parse_spec("env x:int; sys x:int; G(x > 0)"), DuplicateDeclaration);
  EXPECT_THROW(parse_spec("env x:int; sys y:int; G(y > "), SyntaxError);
  EXPECT_THROW(parse_spec("env x:bool; sys y:int; G(y > x)"), SyntaxError);
}

TEST(ParseSpec, SyntaxErrorHasPosition) {
  try {
    parse_spec("env x:int;\nsys y:int;\nG (y >> x)");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_NE(std::string(e.what()).find("3:"), std::string::npos) << e.what();
  }
}

TEST(ParseSpec, TheoryOverride) {
  auto s = fixture::load_spec("running", Sort::Real);
  EXPECT_EQ(s.env[0].sort, Sort::Real);
  EXPECT_EQ(s.sys[0].sort, Sort::Real);
  EXPECT_EQ(s.literals.size(), 3u);
}

TEST(ExtractLiterals, SharedAtom) {
  auto s = parse_spec("env x:int; sys y:int; G(y > x) && F(y > x)");
  EXPECT_EQ(extract_literals(s).size(), 1u);
}

TEST(ExtractLiterals, ComplementMerges) {
  auto s = parse_spec("env x:int; sys y:int; G((x < 2) && !(x >= 2) && y > 0)");
  ASSERT_EQ(s.literals.size(), 2u) << lits(s);
  auto t = parse_spec("env x:int; sys y:int; G(x >= 2)");
  EXPECT_TRUE(same_on_range(s.literals[0], parse_spec("env x:int; sys y:int; G(x < 2)").literals[0]));
  EXPECT_FALSE(same_on_range(s.literals[0], t.literals[0]));
}

TEST(ExtractLiterals, MixedAtomsAllowed) {
  auto s = parse_spec("env x:int; sys y:int; G(x + y > 3)");
  EXPECT_EQ(s.literals.size(), 1u);
}

TEST(Fragment, Classification) {
  EXPECT_EQ(classify_fragment(fixture::load_spec("running").property), Fragment::GXSafety);
  EXPECT_EQ(classify_fragment(parse_spec("env x:int; sys y:int; F(y > x)").property), Fragment::General);
  EXPECT_EQ(classify_fragment(parse_spec("env x:int; sys y:int; G(X(X(y > x)))").property), Fragment::General);
  EXPECT_EQ(classify_fragment(parse_spec("env x:int; sys y:int; G(y > x U y > 0)").property), Fragment::General);
  EXPECT_EQ(classify_fragment(parse_spec("env x:int; sys y:int; y > 0 && G(y > x)").property), Fragment::GXSafety);
}

TEST(Render, RunningRoundTrip) {
  auto s = fixture::load_spec("running");
  auto t = parse_spec(render_spec(s));
  EXPECT_EQ(t.property, s.property);
  EXPECT_EQ(lits(t), lits(s));
}

TEST(Render, PropositionalParse) {
  std::vector<std::string> names{"s0", "s1", "s2"};
  auto n = parse_propositional_ltl("G ((s0 -> X s1) && (!s0 -> s2))", names);
  auto text = render_ltl(n, [&](std::size_t i) { return names[i]; });
  EXPECT_EQ(text, "G ((s0 -> X s1) && (!s0 -> s2))");
}

TEST(Render, RandomRoundTrip) {
  const std::vector<std::string> atoms{"x < 2", "y > 1", "y <= x", "2*x + y = 3", "x - y >= -4"};
  std::mt19937_64 rng(11);
  std::function<std::string(int)> gen = [&](int depth) -> std::string {
    int pick = depth <= 0 ? 0 : static_cast<int>(rng() % 9);
    switch (pick) {
      case 0: return "(" + atoms[rng() % atoms.size()] + ")";
      case 1: return "!" + gen(depth - 1);
      case 2: return "(" + gen(depth - 1) + " && " + gen(depth - 1) + ")";
      case 3: return "(" + gen(depth - 1) + " || " + gen(depth - 1) + ")";
      case 4: return "(" + gen(depth - 1) + " -> " + gen(depth - 1) + ")";
      case 5: return "X " + gen(depth - 1);
      case 6: return "G " + gen(depth - 1);
      case 7: return "(" + gen(depth - 1) + " U " + gen(depth - 1) + ")";
      default: return "F " + gen(depth - 1);
    }
  };
  for (int i = 0; i < 200; ++i) {
    std::string text = "env x:int; sys y:int; property: " + gen(4);
    auto s = parse_spec(text);
    auto t = parse_spec(render_spec(s));
    ASSERT_EQ(t.property, s.property) << text << "\n" << render_spec(s);
    ASSERT_EQ(lits(t), lits(s)) << text;
  }
}

TEST(Render, LiteralIndicesStable) {
  auto a = fixture::load_spec("syn_2_6");
  auto b = fixture::load_spec("syn_2_6");
  EXPECT_EQ(lits(a), lits(b));
  EXPECT_EQ(a.literals.size(), 6u);
}

TEST(SynTemplates, LiteralCounts) {
  for (std::size_t k = 3; k <= 6; ++k)
    EXPECT_EQ(fixture::load_spec("syn_2_" + std::to_string(k)).literals.size(), k);
}
