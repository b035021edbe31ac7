#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "wbary/error.hpp"

namespace wbary {

enum class BranchingStrategy { index_order, closest_to_integer, most_repeated };

inline constexpr BranchingStrategy kAllStrategies[] = {
    BranchingStrategy::index_order, BranchingStrategy::closest_to_integer, BranchingStrategy::most_repeated};

/// Fractional values closer than this share a bucket.
inline constexpr double kBucketResolution = 1e-7;
inline constexpr double kIntegralityTolerance = 1e-6;

inline std::string_view to_string(BranchingStrategy s) {
  switch (s) {
    case BranchingStrategy::index_order: return "index_order";
    case BranchingStrategy::closest_to_integer: return "closest_to_integer";
    case BranchingStrategy::most_repeated: return "most_repeated";
  }
  return "unknown";
}

inline std::optional<BranchingStrategy> parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

inline bool is_fractional(double v, double tol) noexcept { return v > tol && v < 1.0 - tol; }

inline std::int64_t bucket_of(double v) noexcept { return std::llround(v / kBucketResolution); }

/// Picks the selection variable to branch on. `z1` holds the selection
/// variables in model order.
inline std::size_t select_branch_variable(std::span<const double> z1, BranchingStrategy strategy,
                                          double tol = kIntegralityTolerance) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::size_t chosen = none;
  switch (strategy) {
    case BranchingStrategy::index_order:
      for (std::size_t v = 0; v < z1.size() && chosen == none; ++v)
        if (is_fractional(z1[v], tol)) chosen = v;
      break;
    case BranchingStrategy::closest_to_integer: {
      double best = 1.0;
      for (std::size_t v = 0; v < z1.size(); ++v) {
        if (!is_fractional(z1[v], tol)) continue;
        const double dist = std::min(z1[v], 1.0 - z1[v]);
        // 0.98 and 0.02 are equally close; only a clear improvement replaces.
        if (chosen == none || dist < best - 1e-12) {
          best = dist;
          chosen = v;
        }
      }
      break;
    }
    case BranchingStrategy::most_repeated: {
      std::map<std::int64_t, std::pair<std::size_t, std::size_t>> buckets;  // count, first index
      for (std::size_t v = 0; v < z1.size(); ++v) {
        if (!is_fractional(z1[v], tol)) continue;
        auto [it, fresh] = buckets.try_emplace(bucket_of(z1[v]), 0, v);
        ++it->second.first;
      }
      std::size_t best_count = 0;
      for (const auto& [key, entry] : buckets) {
        const auto [count, first] = entry;
        if (count > best_count || (count == best_count && first < chosen)) {
          best_count = count;
          chosen = first;
        }
      }
      break;
    }
  }
  if (chosen == none) throw PricingError("no fractional selection variable to branch on");
  return chosen;
}

struct FractionalityStats {
  double pct_fractional = 0.0;
  std::size_t unique_count = 0;
};

/// Share of fractional entries (in percent) and number of distinct
/// fractional values at bucket resolution.
inline FractionalityStats fractionality_stats(std::span<const double> z1, double tol = kIntegralityTolerance) {
  FractionalityStats out;
  if (z1.empty()) return out;
  std::set<std::int64_t> distinct;
  std::size_t count = 0;
  for (double v : z1) {
    if (!is_fractional(v, tol)) continue;
    ++count;
    distinct.insert(bucket_of(v));
  }
  out.pct_fractional = 100.0 * static_cast<double>(count) / static_cast<double>(z1.size());
  out.unique_count = distinct.size();
  return out;
}

}  // namespace wbary
