#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wbary/error.hpp"

namespace wbary {

/// Absolute tolerance on mass and weight sums accepted without renormalization.
inline constexpr double kSumTolerance = 1e-12;
/// Largest deviation from 1 that `renormalize` is allowed to repair.
inline constexpr double kRenormalizeTolerance = 1e-6;

/// A finitely supported probability measure. Points are stored row-major in a
/// flat coordinate buffer.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  DiscreteMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> masses)
      : dim_(dim), coords_(std::move(coords)), masses_(std::move(masses)) {
    if (dim_ == 0) throw InstanceError("measure dimension must be positive");
    if (coords_.size() != dim_ * masses_.size())
      throw InstanceError("coordinate buffer does not match point count and dimension");
  }

  std::size_t size() const noexcept { return masses_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t k) const noexcept {
    return {coords_.data() + k * dim_, dim_};
  }
  std::span<double> point(std::size_t k) noexcept { return {coords_.data() + k * dim_, dim_}; }

  double mass(std::size_t k) const noexcept { return masses_[k]; }
  std::span<const double> masses() const noexcept { return masses_; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> masses_;
};

/// n >= 2 discrete measures in R^d together with positive barycentric weights.
struct Instance {
  std::vector<DiscreteMeasure> measures;
  std::vector<double> weights;
  std::size_t dim = 0;

  std::size_t n() const noexcept { return measures.size(); }

  std::size_t total_support() const noexcept {
    std::size_t total = 0;
    for (const auto& m : measures) total += m.size();
    return total;
  }

  /// Number of combinations, saturating at the largest representable value.
  std::uint64_t combination_count() const noexcept {
    std::uint64_t count = 1;
    for (const auto& m : measures) {
      if (m.size() != 0 && count > std::numeric_limits<std::uint64_t>::max() / m.size())
        return std::numeric_limits<std::uint64_t>::max();
      count *= m.size();
    }
    return count;
  }

  /// Offset of measure i in the measure-then-point ordering of (i, k) pairs.
  std::vector<std::size_t> offsets() const {
    std::vector<std::size_t> out(n() + 1, 0);
    for (std::size_t i = 0; i < n(); ++i) out[i + 1] = out[i] + measures[i].size();
    return out;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// One support point per measure, stored 0-based. Files and console output
/// present the indices 1-based.
struct Combination {
  std::vector<std::size_t> indices;

  std::size_t size() const noexcept { return indices.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return indices[i]; }

  friend auto operator<=>(const Combination&, const Combination&) = default;
  friend bool operator==(const Combination&, const Combination&) = default;
};

struct CombinationHash {
  std::size_t operator()(const Combination& c) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto k : c.indices) {
      h ^= k + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline std::string to_string(const Combination& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c[i] + 1);
  }
  return out + ")";
}

inline bool is_valid_combination(const Instance& inst, const Combination& c) noexcept {
  if (c.size() != inst.n()) return false;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] >= inst.measures[i].size()) return false;
  return true;
}

namespace detail {

inline double checked_sum(std::span<const double> values, const char* what, bool renormalize,
                          std::vector<double>& out) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double deviation = std::abs(sum - 1.0);
  out.assign(values.begin(), values.end());
  if (deviation <= kSumTolerance) return sum;
  if (renormalize && deviation <= kRenormalizeTolerance) {
    for (double& v : out) v /= sum;
    return sum;
  }
  throw InstanceError(std::string(what) + " sum ≠ 1 (got " + std::to_string(sum) + ")");
}

}  // namespace detail

struct BuildOptions {
  /// Rescale masses/weights whose sum is within 1e-6 of one.
  bool renormalize = false;
};

/// Builds a validated measure from explicit points. Duplicate points are
/// merged, keeping the position of the first occurrence and summing masses.
inline DiscreteMeasure make_measure(const std::vector<std::vector<double>>& points,
                                    std::span<const double> masses, BuildOptions opts = {}) {
  if (points.empty()) throw InstanceError("measure has no support points");
  if (points.size() != masses.size())
    throw InstanceError("measure has " + std::to_string(points.size()) + " points but " +
                        std::to_string(masses.size()) + " masses");
  const std::size_t dim = points.front().size();
  if (dim == 0) throw InstanceError("support points must have positive dimension");
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != dim) throw InstanceError("dimension mismatch inside measure");
    if (!(masses[k] > 0.0) || !std::isfinite(masses[k]))
      throw InstanceError("nonpositive mass " + std::to_string(masses[k]));
    for (double x : points[k])
      if (!std::isfinite(x)) throw InstanceError("non-finite coordinate");
  }

  std::vector<double> coords;
  std::vector<double> merged;
  std::map<std::vector<double>, std::size_t> slot_of;
  for (std::size_t k = 0; k < points.size(); ++k) {
    auto [it, inserted] = slot_of.try_emplace(points[k], merged.size());
    if (inserted) {
      merged.push_back(0.0);
      coords.insert(coords.end(), points[k].begin(), points[k].end());
    }
    merged[it->second] += masses[k];
  }

  std::vector<double> normalized;
  detail::checked_sum(merged, "mass", opts.renormalize, normalized);
  return DiscreteMeasure(dim, std::move(coords), std::move(normalized));
}

/// Assembles and validates an instance. Empty `weights` means uniform 1/n.
inline Instance make_instance(std::vector<DiscreteMeasure> measures, std::vector<double> weights = {},
                              BuildOptions opts = {}) {
  if (measures.size() < 2) throw InstanceError("an instance needs at least two measures");
  Instance inst;
  inst.dim = measures.front().dim();
  for (const auto& m : measures) {
    if (m.dim() != inst.dim) throw InstanceError("dimension mismatch between measures");
    if (m.size() == 0) throw InstanceError("measure has no support points");
  }
  if (weights.empty()) {
    weights.assign(measures.size(), 1.0 / static_cast<double>(measures.size()));
  } else {
    if (weights.size() != measures.size())
      throw InstanceError("expected " + std::to_string(measures.size()) + " weights, got " +
                          std::to_string(weights.size()));
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw InstanceError("nonpositive weight");
    std::vector<double> normalized;
    detail::checked_sum(weights, "weight", opts.renormalize, normalized);
    weights = std::move(normalized);
  }
  inst.measures = std::move(measures);
  inst.weights = std::move(weights);
  return inst;
}

/// Translation applied by `shift_to_positive_orthant`.
struct ShiftResult {
  Instance instance;
  std::vector<double> shift;
};

/// Translates all points so every coordinate is at least `target` (1.0 by
/// default). Coordinates that already satisfy the bound are left untouched.
inline ShiftResult shift_to_positive_orthant(const Instance& inst, double target = 1.0) {
  std::vector<double> lowest(inst.dim, std::numeric_limits<double>::infinity());
  for (const auto& m : inst.measures)
    for (std::size_t k = 0; k < m.size(); ++k)
      for (std::size_t c = 0; c < inst.dim; ++c) lowest[c] = std::min(lowest[c], m.point(k)[c]);

  ShiftResult out{inst, std::vector<double>(inst.dim, 0.0)};
  for (std::size_t c = 0; c < inst.dim; ++c)
    if (lowest[c] < target) out.shift[c] = target - lowest[c];
  for (auto& m : out.instance.measures)
    for (std::size_t k = 0; k < m.size(); ++k) {
      auto p = m.point(k);
      for (std::size_t c = 0; c < inst.dim; ++c) p[c] += out.shift[c];
    }
  return out;
}

inline double min_coordinate(const Instance& inst) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : inst.measures)
    for (double x : m.coords()) lo = std::min(lo, x);
  return lo;
}

struct SortResult {
  Instance instance;
  /// permutation[new_index] == original index
  std::vector<std::size_t> permutation;
};

/// Stable ascending sort of measures by support size; weights follow.
inline SortResult sort_measures_by_size(const Instance& inst) {
  SortResult out;
  out.permutation.resize(inst.n());
  std::iota(out.permutation.begin(), out.permutation.end(), std::size_t{0});
  std::stable_sort(out.permutation.begin(), out.permutation.end(), [&](std::size_t a, std::size_t b) {
    return inst.measures[a].size() < inst.measures[b].size();
  });
  out.instance.dim = inst.dim;
  for (auto idx : out.permutation) {
    out.instance.measures.push_back(inst.measures[idx]);
    out.instance.weights.push_back(inst.weights[idx]);
  }
  return out;
}

/// Maps a combination of a permuted instance back to the original measure order.
inline Combination unpermute(const Combination& c, std::span<const std::size_t> permutation) {
  Combination out{std::vector<std::size_t>(c.size())};
  for (std::size_t i = 0; i < c.size(); ++i) out.indices[permutation[i]] = c[i];
  return out;
}

/// Reorders a per-(i, k) vector (measure-then-point order) to follow `permutation`.
inline std::vector<double> permute_pair_vector(const Instance& original, std::span<const double> values,
                                               std::span<const std::size_t> permutation) {
  const auto offsets = original.offsets();
  std::vector<double> out;
  out.reserve(values.size());
  for (auto idx : permutation)
    for (std::size_t k = 0; k < original.measures[idx].size(); ++k) out.push_back(values[offsets[idx] + k]);
  return out;
}

}  // namespace wbary
