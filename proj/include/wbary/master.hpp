#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <unordered_set>
#include <vector>

#include "wbary/error.hpp"
#include "wbary/instance.hpp"
#include "wbary/lp.hpp"

namespace wbary {

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    s += diff * diff;
  }
  return s;
}

/// Unit-mass transport cost of a combination:
///   sum_{i<j} lambda_i lambda_j ||x_{i,k_i} - x_{j,k_j}||^2.
inline double combination_cost(const Instance& inst, const Combination& s) {
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < inst.n(); ++i) {
    const auto xi = inst.measures[i].point(s[i]);
    double inner = 0.0;
    for (std::size_t j = i + 1; j < inst.n(); ++j)
      inner += inst.weights[j] * squared_distance(xi, inst.measures[j].point(s[j]));
    cost += inst.weights[i] * inner;
  }
  return cost;
}

/// lambda-weighted mean of the points a combination selects.
inline std::vector<double> weighted_mean(const Instance& inst, const Combination& s) {
  std::vector<double> mean(inst.dim, 0.0);
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const auto x = inst.measures[i].point(s[i]);
    for (std::size_t c = 0; c < inst.dim; ++c) mean[c] += inst.weights[i] * x[c];
  }
  return mean;
}

/// Sum of the duals y_{i,k_i} a combination touches, i.e. y^T A_s.
inline double dual_sum(const Instance& inst, std::span<const double> y, const Combination& s) {
  const auto offsets = inst.offsets();
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n(); ++i) total += y[offsets[i] + s[i]];
  return total;
}

inline double reduced_cost(const Instance& inst, std::span<const double> y, const Combination& s) {
  return dual_sum(inst, y, s) - combination_cost(inst, s);
}

/// The restricted set of combinations the master problem may use. Columns are
/// only ever appended, so a master basis stays valid across additions.
class WorkingSet {
 public:
  std::size_t size() const noexcept { return combinations_.size(); }
  bool empty() const noexcept { return combinations_.empty(); }
  bool contains(const Combination& s) const { return index_.contains(s); }

  const std::vector<Combination>& combinations() const noexcept { return combinations_; }
  const std::vector<double>& costs() const noexcept { return costs_; }
  const Combination& operator[](std::size_t h) const { return combinations_[h]; }

  const std::unordered_set<Combination, CombinationHash>& index() const noexcept { return index_; }

  /// Appends `s` with its cost. Throws on duplicates and invalid indices.
  void add(const Instance& inst, Combination s) {
    if (!is_valid_combination(inst, s)) throw MasterError("combination " + to_string(s) + " is out of range");
    if (contains(s)) throw MasterError("combination " + to_string(s) + " is already in the working set");
    costs_.push_back(combination_cost(inst, s));
    index_.insert(s);
    combinations_.push_back(std::move(s));
  }

 private:
  std::vector<Combination> combinations_;
  std::vector<double> costs_;
  std::unordered_set<Combination, CombinationHash> index_;
};

inline void add_column(WorkingSet& ws, const Instance& inst, Combination s) { ws.add(inst, std::move(s)); }

struct MasterSolution {
  /// Mass per working-set combination.
  std::vector<double> w;
  /// Dual per (measure, point) pair in measure-then-point order.
  std::vector<double> y;
  double objective = 0.0;
  lp::Basis basis;
};

/// The restricted master LP: min c^T w subject to A w = d, w >= 0, with one
/// equality row per (i, k) in measure-then-point order.
inline lp::LpProblem build_master_lp(const Instance& inst, const WorkingSet& ws) {
  lp::LpProblem prob(lp::Sense::minimize);
  const auto offsets = inst.offsets();
  for (std::size_t h = 0; h < ws.size(); ++h) prob.add_variable(ws.costs()[h]);
  std::vector<std::vector<lp::Term>> rows(inst.total_support());
  for (std::size_t h = 0; h < ws.size(); ++h)
    for (std::size_t i = 0; i < inst.n(); ++i) rows[offsets[i] + ws[h][i]].push_back({h, 1.0});
  for (std::size_t i = 0; i < inst.n(); ++i)
    for (std::size_t k = 0; k < inst.measures[i].size(); ++k)
      prob.add_constraint(std::move(rows[offsets[i] + k]), lp::Relation::equal, inst.measures[i].mass(k));
  return prob;
}

inline MasterSolution build_and_solve_master(const Instance& inst, const WorkingSet& ws,
                                             const lp::Basis* warm_start = nullptr) {
  const auto prob = build_master_lp(inst, ws);
  auto out = lp::solve_lp(prob, warm_start);
  if (out.status == lp::Status::infeasible)
    throw MasterError("master problem is infeasible over the working set (corrupted working set)");
  if (out.status != lp::Status::optimal)
    throw MasterError(std::string("master LP failed: ") + lp::to_string(out.status) + " " + out.message);
  MasterSolution sol;
  sol.w = std::move(out.primal);
  for (auto& v : sol.w) v = std::max(v, 0.0);
  sol.y = std::move(out.dual);
  sol.objective = out.objective;
  sol.basis = std::move(out.basis);
  return sol;
}

struct BarycenterSupport {
  std::vector<double> point;
  double mass = 0.0;
  /// Source combination; the first one when several share a weighted mean.
  Combination combination;
};

struct Barycenter {
  std::vector<BarycenterSupport> support;
  double cost = 0.0;
};

/// Places the mass of every used combination at its weighted mean. Columns
/// with w_h <= `mass_threshold` are dropped; means that agree within
/// `merge_tol` per coordinate are merged.
inline Barycenter extract_barycenter(const Instance& inst, const WorkingSet& ws, const MasterSolution& sol,
                                     double mass_threshold = 1e-9, double merge_tol = 1e-9) {
  Barycenter bary;
  bary.cost = sol.objective;
  for (std::size_t h = 0; h < ws.size(); ++h) {
    if (sol.w[h] <= mass_threshold) continue;
    auto mean = weighted_mean(inst, ws[h]);
    bool merged = false;
    for (auto& entry : bary.support) {
      bool same = true;
      for (std::size_t c = 0; c < mean.size() && same; ++c) same = std::abs(entry.point[c] - mean[c]) <= merge_tol;
      if (same) {
        entry.mass += sol.w[h];
        merged = true;
        break;
      }
    }
    if (!merged) bary.support.push_back({std::move(mean), sol.w[h], ws[h]});
  }
  return bary;
}

}  // namespace wbary
