#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wbary/instance.hpp"

namespace wbary {

/// Random instance with `n` measures whose sizes are drawn from [p_min, p_max]:
/// coordinates uniform in [0, 100]^dim, masses from a symmetric Dirichlet(1),
/// uniform weights.
inline Instance random_instance_varied(std::size_t n, std::size_t p_min, std::size_t p_max, std::uint64_t seed,
                                       std::size_t dim = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(p_min, p_max);
  std::uniform_real_distribution<double> coord(0.0, 100.0);
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<DiscreteMeasure> measures;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = size(rng);
    std::vector<std::vector<double>> points(p, std::vector<double>(dim));
    std::vector<double> masses(p);
    double total = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      for (auto& x : points[k]) x = coord(rng);
      // Gamma(1) draws are exponential; the offset guards against underflow to 0.
      masses[k] = gamma1(rng) + 1e-12;
      total += masses[k];
    }
    for (auto& m : masses) m /= total;
    measures.push_back(make_measure(points, masses, {.renormalize = true}));
  }
  return make_instance(std::move(measures));
}

inline Instance random_instance(std::size_t n, std::size_t p, std::uint64_t seed, std::size_t dim = 2) {
  return random_instance_varied(n, p, p, seed, dim);
}

/// n copies of one measure with p points on a small regular polygon around
/// `center`, uniform masses. Every measure is congruent to every other.
inline Instance symmetric_instance(std::size_t n, std::size_t p, double center = 10.0, double radius = 1.0) {
  std::vector<std::vector<double>> points(p, std::vector<double>(2));
  constexpr double kTwoPi = 6.283185307179586;
  for (std::size_t k = 0; k < p; ++k) {
    const double angle = kTwoPi * static_cast<double>(k) / static_cast<double>(p);
    points[k][0] = center + radius * std::cos(angle);
    points[k][1] = center + radius * std::sin(angle);
  }
  std::vector<double> masses(p, 1.0 / static_cast<double>(p));
  std::vector<DiscreteMeasure> measures(n, make_measure(points, masses, {.renormalize = true}));
  return make_instance(std::move(measures));
}

}  // namespace wbary
