#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wbary/wbary.hpp"

using namespace wbary;
using namespace wbary::lp;

namespace {

// Residual of complementary slackness between rows and their duals, and
// between variables and their reduced costs.
double complementarity_residual(const LpProblem& prob, const LpOutcome& out) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prob.num_rows(); ++i) {
    const double slack = prob.rhs(i) - prob.row_activity(i, out.primal);
    worst = std::max(worst, std::abs(slack * out.dual[i]));
  }
  for (std::size_t j = 0; j < prob.num_vars(); ++j) {
    const double gap = std::min(std::abs(out.primal[j] - prob.lower(j)),
                                std::isinf(prob.upper(j)) ? kInf : std::abs(prob.upper(j) - out.primal[j]));
    worst = std::max(worst, std::abs(gap * out.reduced_cost[j]));
  }
  return worst;
}

double max_row_violation(const LpProblem& prob, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prob.num_rows(); ++i) {
    const double d = prob.row_activity(i, x) - prob.rhs(i);
    switch (prob.relation(i)) {
      case Relation::equal: worst = std::max(worst, std::abs(d)); break;
      case Relation::less_equal: worst = std::max(worst, d); break;
      case Relation::greater_equal: worst = std::max(worst, -d); break;
    }
  }
  return worst;
}

}  // namespace

TEST(SolveLp, DominatedVariableStaysAtZero) {
  LpProblem prob;
  prob.add_variable(1.0);
  prob.add_variable(2.0);
  prob.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0);
  const auto out = solve_lp(prob);
  ASSERT_EQ(out.status, Status::optimal);
  EXPECT_NEAR(out.primal[0], 1.0, 1e-12);
  EXPECT_NEAR(out.primal[1], 0.0, 1e-12);
  EXPECT_NEAR(out.objective, 1.0, 1e-12);
  ASSERT_EQ(out.dual.size(), 1u);
  EXPECT_NEAR(out.dual[0], 1.0, 1e-12);
}

TEST(SolveLp, DetectsInfeasibility) {
  LpProblem prob;
  prob.add_variable(1.0);
  prob.add_constraint({{0, 1.0}}, Relation::less_equal, -1.0);
  EXPECT_EQ(solve_lp(prob).status, Status::infeasible);
}

TEST(SolveLp, DetectsUnboundedness) {
  LpProblem prob(Sense::maximize);
  prob.add_variable(1.0);
  prob.add_variable(0.0);
  prob.add_constraint({{0, 1.0}, {1, -1.0}}, Relation::less_equal, 1.0);
  EXPECT_EQ(solve_lp(prob).status, Status::unbounded);
}

TEST(SolveLp, HonoursUpperBoundsAndMaximization) {
  LpProblem prob(Sense::maximize);
  prob.add_variable(3.0, 0.0, 1.0);
  prob.add_variable(2.0, 0.0, 4.0);
  prob.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::less_equal, 2.5);
  const auto out = solve_lp(prob);
  ASSERT_EQ(out.status, Status::optimal);
  EXPECT_NEAR(out.primal[0], 1.0, 1e-12);
  EXPECT_NEAR(out.primal[1], 1.5, 1e-12);
  EXPECT_NEAR(out.objective, 6.0, 1e-12);
  EXPECT_NEAR(dual_objective(prob, out), out.objective, 1e-9);
}

TEST(SolveLp, RejectsInconsistentBounds) {
  LpProblem prob;
  EXPECT_THROW(prob.add_variable(1.0, 2.0, 1.0), LpError);
  EXPECT_THROW(prob.add_constraint({{3, 1.0}}, Relation::equal, 0.0), LpError);
}

TEST(SolveLp, MatchesVertexEnumerationOnRandomEqualityLps) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto dense = oracle::random_feasible_lp(15, 20, seed);
    const auto expected = oracle::vertex_enumeration_min(dense);
    ASSERT_TRUE(expected.has_value());
    const auto prob = oracle::to_problem(dense);
    const auto out = solve_lp(prob);
    ASSERT_EQ(out.status, Status::optimal) << "seed " << seed;
    EXPECT_NEAR(out.objective, *expected, 1e-8) << "seed " << seed;
    EXPECT_LE(max_row_violation(prob, out.primal), 1e-9);
    EXPECT_LE(complementarity_residual(prob, out), 1e-8);
    EXPECT_NEAR(dual_objective(prob, out), out.objective, 1e-8);
    std::size_t nonzeros = 0;
    for (double v : out.primal) nonzeros += std::abs(v) > 1e-12;
    EXPECT_LE(nonzeros, prob.num_rows());
  }
}

TEST(SolveLp, MixedRelationsMatchSlackFormEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> entry(-1.0, 1.0), pos(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 5, cols = 6;
    std::vector<Relation> rel(rows);
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd x0(cols), c(cols);
    for (std::size_t j = 0; j < cols; ++j) x0[j] = pos(rng), c[j] = pos(rng);
    for (std::size_t i = 0; i < rows; ++i) {
      rel[i] = static_cast<Relation>(i % 3);
      for (std::size_t j = 0; j < cols; ++j) a(i, j) = entry(rng);
    }
    Eigen::VectorXd b = a * x0;
    LpProblem prob;
    for (std::size_t j = 0; j < cols; ++j) prob.add_variable(c[j]);
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<double> dense(cols);
      for (std::size_t j = 0; j < cols; ++j) dense[j] = a(i, j);
      prob.add_dense_constraint(dense, rel[i], b[i]);
    }
    // Slack form for the oracle: one slack per inequality.
    std::size_t slacks = 0;
    for (auto r : rel) slacks += r != Relation::equal;
    oracle::DenseLp eq{Eigen::MatrixXd::Zero(rows, cols + slacks), b, Eigen::VectorXd::Zero(cols + slacks)};
    eq.a.leftCols(cols) = a;
    eq.c.head(cols) = c;
    std::size_t s = cols;
    for (std::size_t i = 0; i < rows; ++i) {
      if (rel[i] == Relation::less_equal) eq.a(i, s++) = 1.0;
      if (rel[i] == Relation::greater_equal) eq.a(i, s++) = -1.0;
    }
    const auto expected = oracle::vertex_enumeration_min(eq);
    ASSERT_TRUE(expected.has_value());
    const auto out = solve_lp(prob);
    ASSERT_EQ(out.status, Status::optimal);
    EXPECT_NEAR(out.objective, *expected, 1e-8) << "trial " << trial;
    EXPECT_LE(max_row_violation(prob, out.primal), 1e-9);
    EXPECT_LE(complementarity_residual(prob, out), 1e-8);
    EXPECT_NEAR(dual_objective(prob, out), out.objective, 1e-8);
  }
}

TEST(SolveLp, WarmStartAfterBoundChangeMatchesColdSolve) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = shift_to_positive_orthant(random_instance(4, 3, seed)).instance;
    const auto model = build_gen_lp(inst, oracle::greedy_master_duals(inst));
    const auto root = solve_lp(model.lp());
    ASSERT_EQ(root.status, Status::optimal);
    for (std::size_t v = 0; v < model.num_selection(); ++v) {
      for (auto change : {BoundChange{v, 0.0, 0.0}, BoundChange{v, 1.0, kInf}}) {
        const std::vector<BoundChange> changes{change};
        const auto warm = solve_lp(model.lp(), changes, &root.basis);
        const auto cold = solve_lp(model.lp(), changes);
        ASSERT_EQ(warm.status, cold.status);
        if (cold.status == Status::optimal) EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
      }
    }
  }
}

TEST(SolveLp, WarmStartWithAppendedColumns) {
  const auto inst = random_instance(3, 3, 4);
  auto ws = greedy_initial(inst).working_set;
  const auto first = build_and_solve_master(inst, ws);
  add_column(ws, inst, Combination{{2, 0, 1}});
  const auto warm = build_and_solve_master(inst, ws, &first.basis);
  const auto cold = build_and_solve_master(inst, ws);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
}

TEST(SolveLp, IllFittingWarmStartIsIgnored) {
  LpProblem prob;
  prob.add_variable(1.0);
  prob.add_variable(2.0);
  prob.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0);
  Basis junk;
  junk.structural = {VarStatus::basic};
  const auto out = solve_lp(prob, &junk);
  ASSERT_EQ(out.status, Status::optimal);
  EXPECT_NEAR(out.objective, 1.0, 1e-12);
}

TEST(LpFormat, WritesSectionsAndBounds) {
  LpProblem prob(Sense::maximize);
  prob.add_variable(1.5, 0.0, 1.0);
  prob.add_variable(-2.0);
  prob.add_constraint({{0, 1.0}, {1, -1.0}}, Relation::less_equal, 0.0);
  std::ostringstream os;
  write_lp_format(os, prob);
  const auto text = os.str();
  EXPECT_NE(text.find("Maximize"), std::string::npos);
  EXPECT_NE(text.find("Subject To"), std::string::npos);
  EXPECT_NE(text.find("c0:"), std::string::npos);
  EXPECT_NE(text.find("0 <= x0 <= 1"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
}
