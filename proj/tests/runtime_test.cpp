#include <gtest/gtest.h>

#include <random>

#include "modsynth/errors.hpp"
#include "modsynth/parse.hpp"
#include "modsynth/runtime.hpp"
#include "support/fixtures.hpp"

using namespace modsynth;
using fixture::val;

namespace {

const fixture::Built& running() {
  static const fixture::Built b = fixture::build("running");
  return b;
}

std::vector<Valuation> xs(std::initializer_list<long> values) {
  std::vector<Valuation> out;
  for (long x : values) out.push_back(val({{"x", x}}));
  return out;
}

std::shared_ptr<const StaticProvider> static_provider(const BooleanSpec& b,
                                                      std::optional<AdaptiveDescription> g = std::nullopt) {
  return std::make_shared<const StaticProvider>(b.table, std::move(g), SynthesisMode::Lazy);
}

std::vector<Rational> ys(const std::vector<StepRecord>& records) {
  std::vector<Rational> out;
  for (const auto& r : records) out.push_back(r.v_y.at("y"));
  return out;
}

}  // namespace

TEST(Controller, GoldenTrace) {
  const auto& b = running();
  TheoryController ctl(b.bspec, b.machine, static_provider(b.bspec));
  EXPECT_EQ(ctl.state(), b.machine.initial);
  auto records = ctl.run_trace(xs({4, 4, 1, 0, 2}));
  ASSERT_EQ(records.size(), 5u);
  EXPECT_EQ(records[0].choice, choice_at(4, 3));
  EXPECT_EQ(b.bspec.table.entries[records[0].letter].letter, "e_2");
  EXPECT_EQ(ys(records), std::vector<Rational>(5, Rational(2)));
  auto e0 = b.bspec.table.index_of("e_0");
  EXPECT_EQ(records[3].letter, e0);
  EXPECT_TRUE(b.bspec.table.entries[e0].contains(records[3].choice));
  auto report = check_trace(b.bspec.spec, records);
  EXPECT_TRUE(report.ok()) << report.summary();
  EXPECT_EQ(ctl.metrics().steps, 5u);
  for (const auto& r : records) {
    EXPECT_GE(r.partition_us, 0);
    EXPECT_GE(r.provide_us, 0);
  }
}

TEST(Controller, RepeatedRunsIdentical) {
  const auto& b = running();
  TheoryController ctl(b.bspec, b.machine, static_provider(b.bspec));
  auto first = ys(ctl.run_trace(xs({4, 4, 1, 0, 2})));
  for (int i = 0; i < 100; ++i) {
    ctl.reset();
    ASSERT_EQ(ys(ctl.run_trace(xs({4, 4, 1, 0, 2}))), first);
  }
}

TEST(Controller, SchemaMismatch) {
  const auto& b = running();
  auto other = fixture::build("syn_2_4");
  EXPECT_THROW(TheoryController(b.bspec, other.machine, static_provider(b.bspec)), SchemaMismatch);
  EXPECT_THROW(TheoryController(b.bspec, b.machine, static_provider(other.bspec)), SchemaMismatch);
}

TEST(Controller, AdaptiveGreatestPattern) {
  const auto& b = running();
  auto k = b.bspec.table.index_of("e_2");
  Choice c4 = choice_at(4, 3);
  AdaptiveDescription g;
  g.constraints.push_back({k, c4, shaped_constraint(b.bspec.table, k, c4, AdaptiveShape::Greatest, "y")});
  TheoryController ctl(b.bspec, b.machine, static_provider(b.bspec, g), g);
  auto records = ctl.run_trace(xs({4, 4, 1, 0, 2}));
  EXPECT_EQ(ys(records), (std::vector<Rational>{4, 4, 2, 2, 2}));
  EXPECT_TRUE(check_trace(b.bspec.spec, records).ok());
}

TEST(Controller, PrevOutputSeededWithDefault) {
  auto b = booleanize(parse_spec("env x:int; sys y:int; property: G(y > x)"));
  auto m = *solve_and_extract(build_game(b)).machine;
  SortContext ctx{{"x", Sort::Int}, {"y", Sort::Int}, {"z", Sort::Int}};
  AdaptiveDescription g;
  g.z.push_back({{"z", Sort::Int}, ZBinding::PrevOutput, "y", 0});
  for (Choice c : b.table.entries[0].reaction) g.constraints.push_back({0, c, parse_formula("y > z", ctx)});
  TheoryController ctl(b, m, static_provider(b, g), g);
  EXPECT_EQ(ctl.z_state().at("z"), 0);
  std::mt19937_64 rng(2);
  std::vector<Valuation> inputs;
  for (int i = 0; i < 50; ++i) inputs.push_back(val({{"x", static_cast<long>(rng() % 41) - 20}}));
  auto records = ctl.run_trace(inputs);
  EXPECT_EQ(records[0].v_z.at("z"), 0);
  EXPECT_GT(records[0].v_y.at("y"), 0);
  for (std::size_t i = 1; i < records.size(); ++i) {
    EXPECT_GT(records[i].v_y.at("y"), records[i - 1].v_y.at("y"));
    EXPECT_EQ(records[i].v_z.at("z"), records[i - 1].v_y.at("y"));
  }
  EXPECT_TRUE(check_trace(b.spec, records).ok());
}

TEST(Controller, ExternalZRequired) {
  const auto& b = running();
  AdaptiveDescription g;
  g.z.push_back({{"z", Sort::Int}, ZBinding::External, "", 0});
  TheoryController ctl(b.bspec, b.machine, static_provider(b.bspec, g), g);
  EXPECT_THROW(ctl.step(val({{"x", 3}})), MissingVariable);
  EXPECT_NO_THROW(ctl.step(val({{"x", 3}}), val({{"z", 9}})));
}

TEST(CheckTrace, ForgedOutput) {
  const auto& b = running();
  TheoryController ctl(b.bspec, b.machine, static_provider(b.bspec));
  auto records = ctl.run_trace(xs({4, 4, 1, 0, 2}));
  records[1].v_y["y"] = 0;
  auto report = check_trace(b.bspec.spec, records);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations[0].index, 1u);
  EXPECT_EQ(report.violations[0].kind, "literal");
}

TEST(CheckTrace, BrokenObligation) {
  const auto& b = running();
  StepRecord a, c;
  a.index = 0;
  a.v_x = val({{"x", 1}});
  a.v_y = val({{"y", 2}});
  a.choice = choice_at(1, 3);
  c.index = 1;
  c.v_x = val({{"x", 5}});
  c.v_y = val({{"y", 0}});
  c.choice = choice_at(6, 3);
  auto report = check_trace(b.bspec.spec, {a, c});
  ASSERT_FALSE(report.ok());
  EXPECT_TRUE(std::all_of(report.violations.begin(), report.violations.end(),
                          [](const Violation& v) { return v.kind == "safety"; }))
      << report.summary();
  EXPECT_NE(report.summary().find("violation"), std::string::npos);
}

TEST(CheckTrace, WithoutChoices) {
  const auto& b = running();
  TheoryController ctl(b.bspec, b.machine, static_provider(b.bspec));
  auto records = ctl.run_trace(xs({4, 4, 1, 0, 2}));
  for (auto& r : records) r.choice = 0;
  EXPECT_TRUE(check_trace(b.bspec.spec, records, false).ok());
}

TEST(Soundness, RandomTraces) {
  std::mt19937_64 rng(31);
  for (auto theory : {Sort::Int, Sort::Real})
    for (const auto& name : fixture::benchmark_specs()) {
      auto built = fixture::build(name, theory);
      TheoryController ctl(built.bspec, built.machine, static_provider(built.bspec));
      for (int run = 0; run < 200; ++run) {
        ctl.reset();
        std::vector<Valuation> inputs;
        for (int i = 0; i < 50; ++i) {
          Rational x(static_cast<long>(rng() % 61) - 30, theory == Sort::Int ? 1 : 1 + static_cast<long>(rng() % 2));
          x.canonicalize();
          inputs.push_back({{"x", x}});
        }
        auto report = check_trace(built.bspec.spec, ctl.run_trace(inputs));
        ASSERT_TRUE(report.ok()) << name << " " << report.summary();
      }
    }
}

TEST(Soundness, AdaptiveArbitraryZ) {
  const auto& b = running();
  AdaptiveDescription g;
  g.z.push_back({{"z", Sort::Int}, ZBinding::External, "", 0});
  for (std::size_t k = 0; k < b.bspec.table.entries.size(); ++k)
    for (Choice c : b.bspec.table.entries[k].reaction)
      g.constraints.push_back({k, c, shaped_constraint(b.bspec.table, k, c, AdaptiveShape::Closest, "y", "z")});
  TheoryController ctl(b.bspec, b.machine, static_provider(b.bspec, g), g);
  std::mt19937_64 rng(77);
  for (int run = 0; run < 50; ++run) {
    ctl.reset();
    std::vector<Valuation> inputs, zs;
    for (int i = 0; i < 50; ++i) {
      inputs.push_back(val({{"x", static_cast<long>(rng() % 41) - 20}}));
      zs.push_back(val({{"z", static_cast<long>(rng() % 201) - 100}}));
    }
    auto report = check_trace(b.bspec.spec, ctl.run_trace(inputs, zs));
    ASSERT_TRUE(report.ok()) << report.summary();
  }
}

TEST(Dynamic, SeededDivergence) {
  const auto& b = running();
  TheoryController ref(b.bspec, b.machine, static_provider(b.bspec));
  auto reference = ys(ref.run_trace(xs({4, 4, 1, 0, 2})));
  auto divergent_runs = [&](std::uint64_t seed) {
    int diverged = 0;
    for (int i = 0; i < 100; ++i) {
      auto d = std::make_shared<DynamicProvider>(b.bspec.table, std::nullopt, DynamicOptions{seed + i});
      TheoryController ctl(b.bspec, b.machine, d);
      auto records = ctl.run_trace(xs({4, 4, 1, 0, 2}));
      EXPECT_TRUE(check_trace(b.bspec.spec, records).ok());
      diverged += ys(records) != reference ? 1 : 0;
    }
    return diverged;
  };
  int a = divergent_runs(1000);
  EXPECT_GE(a, 1);
  EXPECT_EQ(a, divergent_runs(1000));
}
