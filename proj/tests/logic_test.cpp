#include <gtest/gtest.h>

#include <random>

#include "modsynth/errors.hpp"
#include "modsynth/logic.hpp"
#include "modsynth/parse.hpp"
#include "support/oracle.hpp"

using namespace modsynth;

namespace {

Rational Q(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

const SortContext kInts{{"x", Sort::Int}, {"y", Sort::Int}, {"z", Sort::Int}};
const SortContext kReals{{"x", Sort::Real}, {"y", Sort::Real}, {"z", Sort::Real}};

Formula P(const std::string& text, const SortContext& ctx = kInts) { return parse_formula(text, ctx); }

Valuation V(std::initializer_list<std::pair<const std::string, Rational>> init) { return Valuation(init); }

Valuation from_env(const oracle::Env& env) {
  Valuation v;
  for (const auto& [k, x] : env) v[k] = Rational(static_cast<long>(x));
  return v;
}

}  // namespace

TEST(Eval, LiteralUnderValuation) {
  EXPECT_TRUE(eval_formula(P("y > 1"), V({{"y", 2}})));
  EXPECT_TRUE(eval_formula(P("!(x < 2) && y > 1 && y <= x"), V({{"x", 4}, {"y", 2}})));
  EXPECT_FALSE(eval_formula(P("x < 2"), V({{"x", 2}})));
}

TEST(Eval, MissingVariableIsAnError) {
  EXPECT_THROW(eval_formula(P("x + y < 2"), V({{"x", 1}})), MissingVariable);
}

TEST(Eval, ExactRationalArithmetic) {
  Formula f = P("3*x < 1", kReals);
  EXPECT_TRUE(eval_formula(f, V({{"x", Rational(1, 4)}})));
  EXPECT_FALSE(eval_formula(f, V({{"x", Rational(1, 3)}})));
  EXPECT_TRUE(eval_formula(P("x = 1/3", kReals), V({{"x", Rational(1, 3)}})));
}

TEST(Substitute, GroundsAndFolds) {
  Formula fc = P("!(x < 2) && y > 1 && y <= x");
  Formula g = substitute(fc, V({{"x", 4}}));
  EXPECT_EQ(g, P("y > 1 && y <= 4"));
  EXPECT_EQ(substitute(fc, Valuation{}), fc);
  EXPECT_EQ(substitute(P("y > x"), V({{"x", 3}})), P("y > 3"));
}

TEST(Substitute, ThenEvalMatchesExtendedValuation) {
  std::mt19937_64 rng(11);
  oracle::GenOptions opt;
  opt.free_vars = {"x", "y", "z"};
  opt.max_quantifiers = 0;
  for (int round = 0; round < 60; ++round) {
    auto node = oracle::random_formula(rng, opt);
    Formula f = P(oracle::render(node));
    std::uniform_int_distribution<int> d(-9, 9);
    for (int k = 0; k < 40; ++k) {
      oracle::Env env{{"x", d(rng)}, {"y", d(rng)}, {"z", d(rng)}};
      Valuation b{{"x", Rational(static_cast<long>(env["x"]))}};
      Valuation rest{{"y", Rational(static_cast<long>(env["y"]))}, {"z", Rational(static_cast<long>(env["z"]))}};
      EXPECT_EQ(eval_formula(substitute(f, b), rest), oracle::eval(node, env)) << oracle::render(node);
    }
  }
}

TEST(Normalize, FlipsAndComplements) {
  Formula ge = P("x >= 2");
  ASSERT_EQ(ge.kind(), Formula::Kind::Atom);
  EXPECT_EQ(ge.as_atom().term(), LinearTerm(2) - LinearTerm::variable("x"));
  EXPECT_EQ(ge.as_atom().relation(), Relation::Le);
  Formula lt = P("x < 2");
  EXPECT_EQ(complement(lt.as_atom()), ge);
  EXPECT_EQ(to_nnf(P("!(x >= 2)")), lt);
}

TEST(Normalize, DisequalitySplits) {
  Formula f = P("y != 0");
  ASSERT_EQ(f.kind(), Formula::Kind::Or);
  EXPECT_EQ(f, Formula::disj(P("y < 0"), P("0 < y")));
}

TEST(Normalize, IntegerTightening) {
  Formula f = P("y > 1");
  ASSERT_EQ(f.kind(), Formula::Kind::Atom);
  EXPECT_EQ(f.as_atom().term(), LinearTerm(2) - LinearTerm::variable("y"));
  EXPECT_EQ(f.as_atom().relation(), Relation::Le);
  for (int y = -5; y <= 5; ++y) EXPECT_EQ(eval_formula(f, V({{"y", y}})), y > 1);
}

TEST(Normalize, GcdReductionAndFolding) {
  EXPECT_EQ(P("2*x + 4*y <= 3"), P("x + 2*y <= 1"));
  EXPECT_TRUE(P("2*x = 1").is_false());
  EXPECT_TRUE(P("3 < 4").is_true());
  EXPECT_TRUE(P("divides(3, 3*x + 6)").is_true());
  EXPECT_TRUE(P("divides(4, 2*x + 1)").is_false());
  EXPECT_EQ(P("divides(4, 2*x + 2)"), P("divides(2, x + 1)"));
}

TEST(Normalize, DividesOnRealIsSortMismatch) {
  EXPECT_THROW(P("divides(2, x)", kReals), SortMismatch);
  RawAtom raw{LinearTerm::variable("x"), RawRelation::Divides, Sort::Real, 2};
  EXPECT_THROW(normalize_atom(raw), SortMismatch);
}

TEST(Normalize, PreservesSemanticsAtSamplePoints) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(-6, 6);
  for (int round = 0; round < 300; ++round) {
    LinearTerm t = LinearTerm::variable("x", c(rng)) + LinearTerm::variable("y", c(rng)) + LinearTerm(Q(c(rng), 1 + (round % 3)));
    auto rel = static_cast<RawRelation>(round % 6);
    for (Sort s : {Sort::Int, Sort::Real}) {
      Formula f = normalize_atom(RawAtom{t, rel, s});
      for (int k = 0; k < 30; ++k) {
        Rational x = s == Sort::Int ? Rational(c(rng)) : Q(c(rng), 1 + k % 4);
        Rational y = s == Sort::Int ? Rational(c(rng)) : Q(c(rng), 1 + k % 5);
        Rational val = t.evaluate(V({{"x", x}, {"y", y}}));
        bool expect = false;
        switch (rel) {
          case RawRelation::Le: expect = val <= 0; break;
          case RawRelation::Lt: expect = val < 0; break;
          case RawRelation::Eq: expect = val == 0; break;
          case RawRelation::Ne: expect = val != 0; break;
          case RawRelation::Ge: expect = val >= 0; break;
          case RawRelation::Gt: expect = val > 0; break;
          default: break;
        }
        EXPECT_EQ(eval_formula(f, V({{"x", x}, {"y", y}})), expect) << to_string(f);
      }
    }
  }
}

TEST(Normalize, DivisibilityMatchesEnumeration) {
  for (int k = 2; k <= 6; ++k) {
    for (int a = -5; a <= 5; ++a) {
      for (int b = -4; b <= 4; ++b) {
        LinearTerm t = LinearTerm::variable("x", a) + LinearTerm(b);
        Formula f = normalize_atom(RawAtom{t, RawRelation::Divides, Sort::Int, k});
        for (int x = -12; x <= 12; ++x) {
          long v = static_cast<long>(a) * x + b;
          EXPECT_EQ(eval_formula(f, V({{"x", x}})), v % k == 0);
        }
      }
    }
  }
}

TEST(Dnf, Distribution) {
  Formula a = P("x <= 0"), b = P("y <= 0"), c = P("z <= 0"), d = P("x + y <= 5");
  auto cells = to_dnf(Formula::conj(a, Formula::disj(b, c)));
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(Formula::conj(cells[0]), Formula::conj(a, b));
  EXPECT_EQ(Formula::conj(cells[1]), Formula::conj(a, c));
  auto single = to_dnf(a);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], Cell{a});
  auto four = to_dnf(Formula::conj(Formula::disj(a, b), Formula::disj(c, d)));
  ASSERT_EQ(four.size(), 4u);
  EXPECT_EQ(Formula::conj(four[0]), Formula::conj(a, c));
  EXPECT_EQ(Formula::conj(four[1]), Formula::conj(a, d));
  EXPECT_EQ(Formula::conj(four[2]), Formula::conj(b, c));
  EXPECT_EQ(Formula::conj(four[3]), Formula::conj(b, d));
}

TEST(Dnf, TruthTableOverFourPropositions) {
  // Independent atoms over distinct variables act as free booleans.
  Formula a = P("x <= 0"), b = P("y <= 0"), c = P("z <= 0");
  SortContext ctx = kInts;
  ctx["w"] = Sort::Int;
  Formula d = parse_formula("w <= 0", ctx);
  Formula f = Formula::conj(Formula::disj(a, b), Formula::disj(c, d));
  auto cells = to_dnf(f);
  for (int mask = 0; mask < 16; ++mask) {
    Valuation v{{"x", mask & 1 ? 0 : 1}, {"y", mask & 2 ? 0 : 1}, {"z", mask & 4 ? 0 : 1}, {"w", mask & 8 ? 0 : 1}};
    bool any = false;
    for (const auto& cell : cells) any = any || eval_formula(Formula::conj(cell), v);
    EXPECT_EQ(any, eval_formula(f, v));
  }
}

TEST(Dnf, BudgetExceeded) {
  std::vector<Formula> parts;
  for (int i = 0; i < 14; ++i)
    parts.push_back(Formula::disj(P("x <= " + std::to_string(3 * i)), P("y >= " + std::to_string(3 * i + 1000))));
  EXPECT_THROW(to_dnf(Formula::conj(parts), 4096), CellBudgetExceeded);
}

TEST(Dnf, PreservesSemanticsOnGrid) {
  std::mt19937_64 rng(17);
  oracle::GenOptions opt;
  opt.free_vars = {"x", "y", "z"};
  opt.max_quantifiers = 0;
  opt.max_depth = 4;
  for (int round = 0; round < 8; ++round) {
    auto node = oracle::random_formula(rng, opt);
    Formula f = P(oracle::render(node));
    auto cells = to_dnf(f);
    std::vector<Formula> disj;
    for (const auto& c : cells) disj.push_back(Formula::conj(c));
    Formula back = Formula::disj(disj);
    oracle::for_each_point({"x", "y", "z"}, -20, 20, [&](oracle::Env& env) {
      ASSERT_EQ(eval_formula(back, from_env(env)), oracle::eval(node, env)) << oracle::render(node);
    });
  }
}

TEST(Eval, AgreesWithReferenceEvaluator) {
  std::mt19937_64 rng(3);
  oracle::GenOptions opt;
  opt.free_vars = {"x", "y"};
  opt.max_quantifiers = 0;
  for (int round = 0; round < 100; ++round) {
    auto node = oracle::random_formula(rng, opt);
    Formula f = P(oracle::render(node));
    oracle::for_each_point({"x", "y"}, -8, 8, [&](oracle::Env& env) {
      ASSERT_EQ(eval_formula(f, from_env(env)), oracle::eval(node, env)) << oracle::render(node);
    });
  }
}

TEST(Pruning, ConjunctionAndDisjunctionOfBounds) {
  EXPECT_EQ(P("x <= 3 && x <= 5"), P("x <= 3"));
  EXPECT_TRUE(P("x <= 1 && x >= 2").is_false());
  EXPECT_EQ(P("x <= 2 && x >= 2"), P("x = 2"));
  EXPECT_TRUE(P("x <= 1 || x >= 2").is_true());
  EXPECT_EQ(P("x <= 1 || x <= 4"), P("x <= 4"));
  EXPECT_TRUE(P("x < 1 || x >= 1", kReals).is_true());
  EXPECT_FALSE(P("x < 1 || x > 1", kReals).is_true());
  EXPECT_TRUE(P("x = 3 && x = 4").is_false());
}

TEST(Render, RoundTrip) {
  std::mt19937_64 rng(23);
  oracle::GenOptions opt;
  opt.free_vars = {"x", "y"};
  opt.max_quantifiers = 2;
  opt.quant_lo = -5;
  opt.quant_hi = 5;
  for (int round = 0; round < 100; ++round) {
    Formula f = P(oracle::render(oracle::random_formula(rng, opt)));
    EXPECT_EQ(P(to_string(f)), f) << to_string(f);
  }
  EXPECT_EQ(to_string(P("x < 2")), "x <= 1");
  EXPECT_EQ(to_string(P("y <= x")), "x - y >= 0");
  EXPECT_EQ(to_string(P("2*x + 1/2 <= y", kReals)), "x - 1/2*y <= -1/4");
}

TEST(Parse, Errors) {
  EXPECT_THROW(P("x < "), SyntaxError);
  EXPECT_THROW(P("x * y < 2"), SyntaxError);
  EXPECT_THROW(P("q < 2"), UndeclaredVariable);
  SortContext mixed{{"i", Sort::Int}, {"r", Sort::Real}};
  EXPECT_THROW(parse_formula("i < r", mixed), SortMismatch);
}

TEST(Formula, AlphaRenamesBinders) {
  Formula f = P("(exists y:int. y > x) && (exists y:int. y < x) && y > 0");
  auto vars = free_variables(f);
  EXPECT_EQ(vars, (std::set<std::string>{"x", "y"}));
  std::set<std::string> binders;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g.is_quantifier()) {
      EXPECT_TRUE(binders.insert(g.bound_var()).second);
      EXPECT_FALSE(vars.count(g.bound_var()));
      walk(g.body());
    }
    if (g.kind() == Formula::Kind::And || g.kind() == Formula::Kind::Or || g.kind() == Formula::Kind::Not)
      for (const auto& c : g.children()) walk(c);
  };
  walk(f);
  EXPECT_EQ(binders.size(), 2u);
}
