#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "oracles.hpp"
#include "wbary/wbary.hpp"

using namespace wbary;

namespace {

const std::filesystem::path kData = WBARY_TEST_DATA;

Instance two_point_instance(std::vector<std::vector<double>> a, std::vector<std::vector<double>> b) {
  const std::vector<double> ma(a.size(), 1.0 / static_cast<double>(a.size()));
  const std::vector<double> mb(b.size(), 1.0 / static_cast<double>(b.size()));
  return make_instance({make_measure(a, ma, {.renormalize = true}), make_measure(b, mb, {.renormalize = true})});
}

}  // namespace

TEST(LoadInstance, JsonWithoutWeightsIsUniform) {
  const auto inst = load_instance(kData / "two_singletons.json");
  ASSERT_EQ(inst.n(), 2u);
  EXPECT_EQ(inst.dim, 2u);
  EXPECT_DOUBLE_EQ(inst.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(inst.weights[1], 0.5);
  EXPECT_EQ(inst.measures[1].point(0)[0], 2.0);
}

TEST(LoadInstance, CsvMergesDuplicatePoints) {
  const auto inst = load_instance(kData / "dup_points.csv");
  ASSERT_EQ(inst.measures[0].size(), 2u);
  EXPECT_NEAR(inst.measures[0].mass(0), 0.5, 1e-15);
  EXPECT_EQ(inst.measures[0].point(0)[0], 0.0);
  EXPECT_NEAR(inst.measures[0].mass(1), 0.5, 1e-15);
}

TEST(LoadInstance, WeightsFile) {
  const auto inst = load_instance(kData / "dup_points.csv", InstanceFormat::csv, kData / "dup_weights.csv");
  EXPECT_DOUBLE_EQ(inst.weights[0], 0.25);
  EXPECT_DOUBLE_EQ(inst.weights[1], 0.75);
}

TEST(LoadInstance, RejectsBadMassSum) {
  try {
    load_instance(kData / "bad_mass.json");
    FAIL() << "expected an error";
  } catch (const InstanceError& e) {
    EXPECT_NE(std::string(e.what()).find("mass sum ≠ 1"), std::string::npos) << e.what();
  }
}

TEST(LoadInstance, RenormalizesSmallDeviationOnlyWhenAsked) {
  const std::string text = R"({"measures":[{"points":[[0,0],[1,1]],"masses":[0.5,0.5000004]},
                                           {"points":[[2,0]],"masses":[1]}]})";
  EXPECT_THROW(parse_instance_json(text), InstanceError);
  const auto inst = parse_instance_json(text, {}, {.renormalize = true});
  EXPECT_NEAR(inst.measures[0].mass(0) + inst.measures[0].mass(1), 1.0, 1e-15);
}

TEST(LoadInstance, RejectsMalformedInput) {
  EXPECT_THROW(parse_instance_json("{not json"), InstanceError);
  EXPECT_THROW(parse_instance_json(R"({"measures":[{"points":[[0,0]],"masses":[-1]},
                                                    {"points":[[1,0]],"masses":[1]}]})"),
               InstanceError);
  EXPECT_THROW(parse_instance_json(R"({"measures":[{"points":[[0,0]],"masses":[1]},
                                                    {"points":[[1,0,3]],"masses":[1]}]})"),
               InstanceError);
  EXPECT_THROW(parse_instance_json(R"({"measures":[{"points":[[0,0]],"masses":[1]}]})"), InstanceError);
  EXPECT_THROW(parse_instance_csv("measure,mass,x1\n1,abc,0\n"), InstanceError);
  EXPECT_THROW(load_instance(kData / "does_not_exist.json"), InstanceError);
}

TEST(LoadInstance, JsonRoundTripIsExact) {
  const auto inst = random_instance_varied(4, 2, 5, 17);
  const auto back = parse_instance_json(instance_to_json(inst).dump());
  ASSERT_EQ(back.n(), inst.n());
  for (std::size_t i = 0; i < inst.n(); ++i) {
    EXPECT_EQ(back.weights[i], inst.weights[i]);
    ASSERT_EQ(back.measures[i].size(), inst.measures[i].size());
    for (std::size_t k = 0; k < inst.measures[i].size(); ++k) {
      EXPECT_EQ(back.measures[i].mass(k), inst.measures[i].mass(k));
      for (std::size_t c = 0; c < inst.dim; ++c) EXPECT_EQ(back.measures[i].point(k)[c], inst.measures[i].point(k)[c]);
    }
  }
}

TEST(Shift, MovesMinimumCoordinateToOne) {
  const auto inst = two_point_instance({{-2, 0}}, {{3, 1}});
  const auto [shifted, shift] = shift_to_positive_orthant(inst);
  EXPECT_EQ(shift, (std::vector<double>{3.0, 1.0}));
  EXPECT_EQ(shifted.measures[0].point(0)[0], 1.0);
  EXPECT_EQ(shifted.measures[0].point(0)[1], 1.0);
  EXPECT_EQ(shifted.measures[1].point(0)[0], 6.0);
  EXPECT_EQ(shifted.measures[1].point(0)[1], 2.0);
}

TEST(Shift, IdentityWhenAlreadyPositive) {
  const auto inst = two_point_instance({{1, 5}, {2, 2}}, {{3, 1}});
  const auto [shifted, shift] = shift_to_positive_orthant(inst);
  EXPECT_EQ(shift, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(shifted.measures[0].coords()[1], 5.0);
}

TEST(Shift, PreservesCombinationCosts) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = random_instance_varied(3, 2, 4, seed);
    const auto shifted = shift_to_positive_orthant(inst).instance;
    EXPECT_GE(min_coordinate(shifted), 1.0);
    for (const auto& s : oracle::all_combinations(inst))
      EXPECT_NEAR(combination_cost(inst, Combination{s}), combination_cost(shifted, Combination{s}), 1e-9);
  }
}

TEST(Sort, AscendingBySizeWithPermutation) {
  auto inst = random_instance(3, 2, 1);
  inst.measures[0] = random_instance(2, 4, 2).measures[0];
  inst.measures[2] = random_instance(2, 3, 3).measures[0];
  inst.weights = {0.2, 0.3, 0.5};
  const auto sorted = sort_measures_by_size(inst);
  EXPECT_EQ(sorted.permutation, (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(sorted.instance.measures[0].size(), 2u);
  EXPECT_EQ(sorted.instance.measures[1].size(), 3u);
  EXPECT_EQ(sorted.instance.measures[2].size(), 4u);
  EXPECT_EQ(sorted.instance.weights, (std::vector<double>{0.3, 0.5, 0.2}));
}

TEST(Sort, StableOnTies) {
  const auto inst = random_instance(2, 2, 9);
  const auto sorted = sort_measures_by_size(inst);
  EXPECT_EQ(sorted.permutation, (std::vector<std::size_t>{0, 1}));
}

TEST(Sort, OptimalCostUnchanged) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = random_instance_varied(3, 2, 4, seed);
    SolverConfig plain, sorted;
    sorted.sort_measures = true;
    const double a = run(inst, plain).report.final_cost;
    const double b = run(inst, sorted).report.final_cost;
    const double c = run(shift_to_positive_orthant(inst).instance, plain).report.final_cost;
    EXPECT_NEAR(a, b, 1e-8);
    EXPECT_NEAR(a, c, 1e-8);
  }
}
