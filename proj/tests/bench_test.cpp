#include <gtest/gtest.h>

#include <sstream>

#include "modsynth/bench.hpp"
#include "support/fixtures.hpp"

using namespace modsynth;
using fixture::val;

namespace {

struct Golden {
  fixture::Built built = fixture::build("running");
  std::shared_ptr<const StaticProvider> provider =
      std::make_shared<const StaticProvider>(built.bspec.table, std::nullopt, SynthesisMode::Lazy);
  std::vector<Valuation> inputs;

  explicit Golden(std::size_t repeat_golden) {
    for (std::size_t i = 0; i < repeat_golden; ++i)
      for (long x : {4, 4, 1, 0, 2}) inputs.push_back(val({{"x", x}}));
  }
};

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Bench, StaticIsItsOwnReference) {
  Golden s(4);
  BenchOptions opts;
  opts.repeats = 5;
  auto cmp = bench_compare(s.built.bspec, s.built.machine, s.provider, s.inputs, opts);
  EXPECT_EQ(cmp.static_report.divergence_pct, 0.0);
  EXPECT_EQ(cmp.static_report.rows.size(), s.inputs.size() * 5);
  EXPECT_EQ(cmp.dynamic_report.rows.size(), s.inputs.size() * 5);
  for (const auto& r : cmp.static_report.rows) EXPECT_GE(r.micros, 0);
  EXPECT_LE(cmp.static_report.provider.p50, cmp.static_report.provider.p95);
  EXPECT_GE(cmp.dynamic_report.divergence_pct, 0.0);
  EXPECT_LE(cmp.dynamic_report.divergence_pct, 100.0);
}

TEST(Bench, StaticFasterThanDynamic) {
  Golden s(200);
  BenchOptions opts;
  auto cmp = bench_compare(s.built.bspec, s.built.machine, s.provider, s.inputs, opts);
  EXPECT_LT(cmp.static_report.provider.mean, cmp.dynamic_report.provider.mean) << cmp.static_report.summary()
                                                                               << "\n" << cmp.dynamic_report.summary();
  EXPECT_LT(cmp.provider_ratio(), 1.0);
}

TEST(Bench, SeededDynamicReproducible) {
  Golden s(10);
  BenchOptions opts;
  opts.repeats = 20;
  opts.seed = 99;
  auto a = bench_compare(s.built.bspec, s.built.machine, s.provider, s.inputs, opts);
  auto b = bench_compare(s.built.bspec, s.built.machine, s.provider, s.inputs, opts);
  EXPECT_GT(a.dynamic_report.divergence_pct, 0.0);
  EXPECT_EQ(a.dynamic_report.divergence_pct, b.dynamic_report.divergence_pct);
  EXPECT_EQ(a.dynamic_report.seeds, b.dynamic_report.seeds);
  EXPECT_EQ(a.dynamic_report.seeds.front(), 99u);
  for (std::size_t i = 0; i < a.dynamic_report.rows.size(); ++i)
    ASSERT_EQ(a.dynamic_report.rows[i].diverged, b.dynamic_report.rows[i].diverged);
}

TEST(Bench, Csv) {
  Golden s(2);
  BenchOptions opts;
  opts.repeats = 3;
  opts.seed = 5;
  auto cmp = bench_compare(s.built.bspec, s.built.machine, s.provider, s.inputs, opts);
  auto csv = bench_csv({&cmp.static_report});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,component,micros,provider_kind,seed,diverged");
  EXPECT_EQ(lines(csv), 1 + s.inputs.size() * 3);
  auto both = bench_csv({&cmp.static_report, &cmp.dynamic_report});
  EXPECT_EQ(lines(both), 1 + 2 * s.inputs.size() * 3);
  std::istringstream in(both);
  std::string row;
  std::getline(in, row);
  while (std::getline(in, row)) {
    std::size_t commas = static_cast<std::size_t>(std::count(row.begin(), row.end(), ','));
    ASSERT_EQ(commas, 5u) << row;
    ASSERT_EQ(row.find('-'), std::string::npos) << row;
  }
  EXPECT_NE(cmp.dynamic_report.summary().find("seeds=5,6,7"), std::string::npos);
}
