#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbary/wbary.hpp"

using namespace wbary;

TEST(Greedy, HandTrace) {
  const auto inst = make_instance({make_measure({{0, 0}, {1, 0}}, std::vector<double>{0.5, 0.5}),
                                   make_measure({{0, 1}, {1, 1}}, std::vector<double>{0.3, 0.7})});
  const auto g = greedy_initial(inst);
  ASSERT_EQ(g.working_set.size(), 3u);
  EXPECT_EQ(g.working_set[0], (Combination{{0, 0}}));
  EXPECT_EQ(g.working_set[1], (Combination{{0, 1}}));
  EXPECT_EQ(g.working_set[2], (Combination{{1, 1}}));
  EXPECT_NEAR(g.w[0], 0.3, 1e-15);
  EXPECT_NEAR(g.w[1], 0.2, 1e-15);
  EXPECT_NEAR(g.w[2], 0.5, 1e-15);
}

TEST(Greedy, SinglePointMeasures) {
  const std::vector<double> one{1.0};
  const auto inst = make_instance({make_measure({{0, 0}}, one), make_measure({{1, 0}}, one), make_measure({{2, 2}}, one)});
  const auto g = greedy_initial(inst);
  ASSERT_EQ(g.working_set.size(), 1u);
  EXPECT_EQ(g.w[0], 1.0);
}

TEST(Greedy, SizeBoundAndExactTransport) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto inst = random_instance_varied(2 + seed % 5, 1, 6, seed);
    const auto g = greedy_initial(inst);
    EXPECT_LE(g.working_set.size() + inst.n(), inst.total_support() + 1);
    const auto off = inst.offsets();
    std::vector<double> received(inst.total_support(), 0.0);
    for (std::size_t h = 0; h < g.w.size(); ++h)
      for (std::size_t i = 0; i < inst.n(); ++i) received[off[i] + g.working_set[h][i]] += g.w[h];
    for (std::size_t i = 0; i < inst.n(); ++i)
      for (std::size_t k = 0; k < inst.measures[i].size(); ++k)
        EXPECT_NEAR(received[off[i] + k], inst.measures[i].mass(k), 1e-12);
  }
}

TEST(Run, SinglePointMeasures) {
  const std::vector<double> one{1.0};
  const auto inst = make_instance({make_measure({{0, 0}}, one), make_measure({{2, 0}}, one)});
  for (auto backend : {PricingBackend::classic, PricingBackend::mip}) {
    SolverConfig cfg;
    cfg.pricing = backend;
    const auto res = run(inst, cfg);
    EXPECT_LE(res.report.iterations, 1u);
    EXPECT_NEAR(res.report.final_cost, 1.0, 1e-12);
    EXPECT_EQ(res.report.terminated, Termination::optimal);
  }
}

TEST(Run, MatchesFullLpForBothBackends) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = random_instance_varied(3 + seed % 3, 2, 4, seed);
    const double expect = oracle::full_bary_lp(inst);
    for (auto backend : {PricingBackend::classic, PricingBackend::mip}) {
      SolverConfig cfg;
      cfg.pricing = backend;
      const auto res = run(inst, cfg);
      EXPECT_NEAR(res.report.final_cost, expect, 1e-8) << "seed " << seed << " " << to_string(backend);
      EXPECT_EQ(res.report.certified, std::optional<bool>(true));
      for (std::size_t t = 1; t < res.report.per_iteration.size(); ++t)
        EXPECT_LE(res.report.per_iteration[t].objective, res.report.per_iteration[t - 1].objective + 1e-9);
    }
  }
}

TEST(Run, IdenticalMeasuresHaveZeroCost) {
  const auto base = random_instance(1 + 1, 4, 5).measures[0];
  const auto inst = make_instance({base, base, base});
  const auto res = run(inst, SolverConfig{});
  EXPECT_NEAR(res.report.final_cost, 0.0, 1e-9);
  ASSERT_EQ(res.barycenter.support.size(), base.size());
  for (const auto& e : res.barycenter.support) {
    bool found = false;
    for (std::size_t k = 0; k < base.size(); ++k)
      if (std::abs(e.point[0] - base.point(k)[0]) < 1e-9 && std::abs(e.point[1] - base.point(k)[1]) < 1e-9) {
        EXPECT_NEAR(e.mass, base.mass(k), 1e-9);
        found = true;
      }
    EXPECT_TRUE(found);
  }
}

TEST(Run, SortedRunReportsOriginalOrder) {
  auto inst = random_instance_varied(4, 2, 5, 21);
  SolverConfig cfg;
  cfg.sort_measures = true;
  const auto res = run(inst, cfg);
  for (const auto& e : res.barycenter.support) {
    ASSERT_TRUE(is_valid_combination(inst, e.combination));
    const auto mean = weighted_mean(inst, e.combination);
    for (std::size_t c = 0; c < inst.dim; ++c) EXPECT_NEAR(e.point[c], mean[c], 1e-9);
  }
  EXPECT_NEAR(res.report.final_cost, oracle::full_bary_lp(inst), 1e-8);
}

TEST(Run, IterationCap) {
  const auto inst = random_instance(4, 4, 3);
  SolverConfig cfg;
  cfg.max_iterations = 1;
  const auto res = run(inst, cfg);
  EXPECT_EQ(res.report.terminated, Termination::iteration_cap);
  EXPECT_EQ(res.report.iterations, 1u);
  EXPECT_FALSE(res.report.certified.has_value());
}

TEST(Run, RejectsNonPositiveTolerance) {
  SolverConfig cfg;
  cfg.reduced_cost_tol = 0.0;
  EXPECT_THROW(run(random_instance(2, 2, 1), cfg), ColumnGenerationError);
}
