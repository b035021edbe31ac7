#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <thread>
#include <unordered_set>
#include <vector>

#include "wbary/error.hpp"
#include "wbary/instance.hpp"
#include "wbary/master.hpp"

namespace wbary {

/// A combination together with its reduced cost y^T A_s - c_s.
struct PricingResult {
  Combination combination;
  double reduced_cost = -std::numeric_limits<double>::infinity();
};

using CombinationSet = std::unordered_set<Combination, CombinationHash>;

namespace detail {

/// Pairwise lambda_i lambda_j ||x_ik - x_jm||^2 tables for all i < j.
class PairCostTable {
 public:
  explicit PairCostTable(const Instance& inst) : n_(inst.n()), tables_(n_ * n_), cols_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const auto& a = inst.measures[i];
        const auto& b = inst.measures[j];
        auto& t = tables_[i * n_ + j];
        t.resize(a.size() * b.size());
        cols_[i * n_ + j] = b.size();
        const double lw = inst.weights[i] * inst.weights[j];
        for (std::size_t k = 0; k < a.size(); ++k)
          for (std::size_t m = 0; m < b.size(); ++m) t[k * b.size() + m] = lw * squared_distance(a.point(k), b.point(m));
      }
  }

  double operator()(std::size_t i, std::size_t k, std::size_t j, std::size_t m) const noexcept {
    return tables_[i * n_ + j][k * cols_[i * n_ + j] + m];
  }

 private:
  std::size_t n_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::size_t> cols_;
};

/// Scans combinations with lexicographic ranks in [first, last). Digit i's
/// prefix value accumulates duals and pair costs of measures 0..i only, so a
/// change in the last digit costs O(n).
inline PricingResult enumerate_range(const Instance& inst, std::span<const double> y, const PairCostTable& pairs,
                                     const CombinationSet* exclude, std::uint64_t first, std::uint64_t last) {
  PricingResult best;
  const std::size_t n = inst.n();
  if (first >= last) return best;
  const auto offsets = inst.offsets();
  std::vector<std::size_t> digit(n);
  std::uint64_t rest = first;
  for (std::size_t i = n; i-- > 0;) {
    digit[i] = static_cast<std::size_t>(rest % inst.measures[i].size());
    rest /= inst.measures[i].size();
  }
  std::vector<double> prefix(n);
  auto refresh_from = [&](std::size_t start) {
    for (std::size_t i = start; i < n; ++i) {
      double v = (i == 0 ? 0.0 : prefix[i - 1]) + y[offsets[i] + digit[i]];
      for (std::size_t j = 0; j < i; ++j) v -= pairs(j, digit[j], i, digit[i]);
      prefix[i] = v;
    }
  };
  refresh_from(0);
  bool found = false;
  for (std::uint64_t rank = first; rank < last; ++rank) {
    const double value = prefix[n - 1];
    if (!found || value > best.reduced_cost) {
      Combination c{digit};
      if (!exclude || !exclude->contains(c)) {
        best.combination = std::move(c);
        best.reduced_cost = value;
        found = true;
      }
    }
    // odometer increment, last digit fastest
    std::size_t i = n;
    while (i-- > 0) {
      if (++digit[i] < inst.measures[i].size()) break;
      digit[i] = 0;
    }
    if (i >= n) break;
    refresh_from(i);
  }
  return best;
}

}  // namespace detail

/// Exhaustive pricing: the combination outside `exclude` maximizing
/// y^T A_s - c_s, ties broken towards the lexicographically smallest tuple.
/// The result does not depend on `workers`.
inline PricingResult enumerate_best(const Instance& inst, std::span<const double> y,
                                    const CombinationSet* exclude = nullptr, std::size_t workers = 1) {
  if (y.size() != inst.total_support()) throw PricingError("dual vector has the wrong length");
  const std::uint64_t total = inst.combination_count();
  if (total == std::numeric_limits<std::uint64_t>::max())
    throw PricingError("too many combinations to enumerate");
  if (exclude && exclude->size() >= total) {
    std::size_t valid = 0;
    for (const auto& c : *exclude) valid += is_valid_combination(inst, c) ? 1 : 0;
    if (valid >= total) throw PricingError("exclusion set covers every combination");
  }
  const detail::PairCostTable pairs(inst);
  workers = std::max<std::size_t>(1, std::min<std::uint64_t>(workers, total));
  if (workers == 1) return detail::enumerate_range(inst, y, pairs, exclude, 0, total);

  std::vector<PricingResult> partial(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::uint64_t first = total / workers * w + std::min<std::uint64_t>(w, total % workers);
      const std::uint64_t last = first + total / workers + (w < total % workers ? 1 : 0);
      pool.emplace_back([&, w, first, last] {
        partial[w] = detail::enumerate_range(inst, y, pairs, exclude, first, last);
      });
    }
  }
  // Ranges are ordered, so keeping the earliest worker on equal values
  // preserves the lexicographic tie-break.
  PricingResult best;
  bool found = false;
  for (auto& p : partial) {
    if (p.combination.indices.empty()) continue;
    if (!found || p.reduced_cost > best.reduced_cost) {
      best = std::move(p);
      found = true;
    }
  }
  return best;
}

}  // namespace wbary
