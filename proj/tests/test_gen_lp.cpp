#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wbary/wbary.hpp"

using namespace wbary;

namespace {

GenLpModel model_for(const Instance& raw, std::vector<double> y) {
  return build_gen_lp(shift_to_positive_orthant(raw).instance, y);
}

double max_min_rule_gap(const GenLpModel& model, std::span<const double> z) {
  double worst = 0.0;
  for (std::size_t p = 0; p < model.num_product(); ++p) {
    const auto& v = model.product(p);
    const double expect = std::min(z[model.selection_index(v.i, v.k)], z[model.selection_index(v.j, v.m)]);
    worst = std::max(worst, std::abs(z[model.num_selection() + p] - expect));
  }
  return worst;
}

}  // namespace

TEST(GenLp, SizesForTwoByTwo) {
  const auto inst = symmetric_instance(2, 2);
  const auto model = build_gen_lp(inst, std::vector<double>(4, 0.0));
  EXPECT_EQ(model.num_selection(), 4u);
  EXPECT_EQ(model.num_product(), 4u);
  EXPECT_EQ(model.num_main_constraints(), 10u);
}

TEST(GenLp, SizesForThreeByTwo) {
  const auto inst = symmetric_instance(3, 2);
  const auto model = build_gen_lp(inst, std::vector<double>(6, 0.0));
  EXPECT_EQ(model.num_selection(), 6u);
  EXPECT_EQ(model.num_product(), 12u);
  EXPECT_EQ(model.num_main_constraints(), 27u);
}

TEST(GenLp, VariableOrdering) {
  const auto inst = shift_to_positive_orthant(random_instance_varied(3, 2, 4, 6)).instance;
  const auto model = build_gen_lp(inst, std::vector<double>(inst.total_support(), 0.0));
  std::size_t expect = model.num_selection();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      for (std::size_t k = 0; k < inst.measures[i].size(); ++k)
        for (std::size_t m = 0; m < inst.measures[j].size(); ++m) {
          EXPECT_EQ(model.product_index(i, j, k, m), expect);
          const auto& v = model.product(expect - model.num_selection());
          EXPECT_EQ(v.i, i);
          EXPECT_EQ(v.j, j);
          EXPECT_EQ(v.k, k);
          EXPECT_EQ(v.m, m);
          ++expect;
        }
  EXPECT_EQ(model.selection_pair(model.selection_index(2, 1)), (std::pair<std::size_t, std::size_t>{2, 1}));
}

TEST(GenLp, ObjectiveCoefficients) {
  const auto inst = shift_to_positive_orthant(random_instance(3, 2, 2)).instance;
  std::vector<double> y{1, 2, 3, 4, 5, 6};
  const auto model = build_gen_lp(inst, y);
  const auto& lw = inst.weights;
  const auto x = [&](std::size_t i, std::size_t k) { return inst.measures[i].point(k); };
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 2; ++k) {
      const double sq = x(i, k)[0] * x(i, k)[0] + x(i, k)[1] * x(i, k)[1];
      EXPECT_NEAR(model.lp().cost(model.selection_index(i, k)), y[2 * i + k] - lw[i] * (1.0 - lw[i]) * sq, 1e-9);
    }
  const double dot = x(0, 1)[0] * x(2, 0)[0] + x(0, 1)[1] * x(2, 0)[1];
  EXPECT_NEAR(model.lp().cost(model.product_index(0, 2, 1, 0)), 2 * lw[0] * lw[2] * dot, 1e-9);
  for (std::size_t p = 0; p < model.num_product(); ++p) EXPECT_GT(model.lp().cost(model.num_selection() + p), 0.0);
}

TEST(GenLp, IntegralPointsReproduceReducedCost) {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto raw = random_instance_varied(4, 2, 5, seed);
    const auto y = oracle::greedy_master_duals(raw);
    const auto model = model_for(raw, y);
    for (int t = 0; t < 200; ++t) {
      std::vector<std::size_t> idx(raw.n());
      for (std::size_t i = 0; i < raw.n(); ++i) idx[i] = rng() % raw.measures[i].size();
      double expect = -oracle::pair_cost(raw, idx);
      for (std::size_t i = 0; i < raw.n(); ++i) expect += y[raw.offsets()[i] + idx[i]];
      EXPECT_NEAR(model.objective_value(model.encode(Combination{idx})), expect, 1e-9);
    }
  }
}

TEST(GenLp, RejectsNonPositiveCoordinates) {
  const auto inst = random_instance(2, 2, 1);
  std::vector<double> y(4, 0.0);
  auto bad = inst;
  bad.measures[0].point(0)[0] = 0.0;
  EXPECT_THROW(build_gen_lp(bad, y), PricingError);
  EXPECT_THROW(build_gen_lp(shift_to_positive_orthant(inst).instance, std::vector<double>(3, 0.0)), PricingError);
}

TEST(SolveNode, SinglePointMeasuresAreForced) {
  const std::vector<double> one{1.0};
  const auto raw = make_instance({make_measure({{0, 0}}, one), make_measure({{2, 0}}, one)});
  const std::vector<double> y{0.7, -0.2};
  const auto model = model_for(raw, y);
  const auto out = solve_node(model, BBNode{});
  ASSERT_EQ(out.status, lp::Status::optimal);
  EXPECT_NEAR(out.objective, 0.7 - 0.2 - 1.0, 1e-9);
  for (double v : out.primal) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(SolveNode, FullFixingGivesCombinationValue) {
  const auto raw = random_instance_varied(4, 2, 4, 3);
  const auto model = model_for(raw, oracle::greedy_master_duals(raw));
  const Combination s{{1, 0, 1, 1}};
  BBNode node;
  for (std::size_t i = 0; i < raw.n(); ++i) node.fixed_one.push_back(model.selection_index(i, s[i]));
  const auto out = solve_node(model, node);
  ASSERT_EQ(out.status, lp::Status::optimal);
  EXPECT_NEAR(out.objective, reduced_cost(raw, model.duals(), s), 1e-8);
  for (std::size_t i = 0; i < raw.n(); ++i)
    for (std::size_t k = 0; k < raw.measures[i].size(); ++k)
      EXPECT_NEAR(out.primal[model.selection_index(i, k)], k == s[i] ? 1.0 : 0.0, 1e-9);
}

TEST(SolveNode, ConflictingFixingsAreInfeasible) {
  const auto raw = random_instance(3, 2, 3);
  const auto model = model_for(raw, oracle::greedy_master_duals(raw));
  BBNode node;
  node.fixed_zero = {model.selection_index(1, 0), model.selection_index(1, 1)};
  EXPECT_EQ(solve_node(model, node).status, lp::Status::infeasible);
}

TEST(SolveNode, FixingToOneZeroesSiblings) {
  const auto raw = random_instance(4, 3, 10);
  const auto model = model_for(raw, oracle::greedy_master_duals(raw));
  for (std::size_t v = 0; v < model.num_selection(); ++v) {
    BBNode node;
    node.fixed_one = {v};
    const auto out = solve_node(model, node);
    ASSERT_EQ(out.status, lp::Status::optimal);
    const auto [i, k] = model.selection_pair(v);
    for (std::size_t l = 0; l < raw.measures[i].size(); ++l)
      if (l != k) EXPECT_NEAR(out.primal[model.selection_index(i, l)], 0.0, 1e-9);
  }
}

TEST(SolveNode, MinRuleAtRootOptimum) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto raw = random_instance_varied(5, 2, 4, seed);
    const auto model = model_for(raw, oracle::greedy_master_duals(raw));
    const auto out = solve_node(model, BBNode{});
    ASSERT_EQ(out.status, lp::Status::optimal);
    EXPECT_LE(max_min_rule_gap(model, out.primal), 1e-8) << "seed " << seed;
  }
}

TEST(SolveNode, SymmetricUniformPointIsFeasibleAndOptimal) {
  for (auto [n, p] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {3, 3}}) {
    const auto inst = symmetric_instance(n, p);
    const auto model = build_gen_lp(inst, std::vector<double>(inst.total_support(), 0.0));
    const std::vector<double> uniform(model.num_vars(), 1.0 / static_cast<double>(p));
    const auto& prob = model.lp();
    for (std::size_t r = 0; r < prob.num_rows(); ++r) {
      const double act = prob.row_activity(r, uniform);
      if (prob.relation(r) == lp::Relation::equal)
        EXPECT_NEAR(act, prob.rhs(r), 1e-12);
      else
        EXPECT_LE(act, prob.rhs(r) + 1e-12);
    }
    const auto out = solve_node(model, BBNode{});
    ASSERT_EQ(out.status, lp::Status::optimal);
    EXPECT_GE(out.objective + 1e-9, model.objective_value(uniform));
  }
}
