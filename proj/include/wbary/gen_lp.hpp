#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wbary/error.hpp"
#include "wbary/instance.hpp"
#include "wbary/lp.hpp"
#include "wbary/master.hpp"

namespace wbary {

/// Identifies a product variable z_ijkm (i < j) standing for z_ik * z_jm.
struct ProductVar {
  std::size_t i, j, k, m;
};

/// Linear relaxation of the pricing MIP for a fixed dual vector.
///
/// Variable order: the selection variables z_ik (measure-major, then point),
/// followed by the product variables z_ijkm for every pair i < j in
/// lexicographic (i, j, k, m) order. Row order: the n selection equalities
/// sum_k z_ik = 1, then for each product variable in variable order the two
/// rows z_ijkm - z_ik <= 0 and z_ijkm - z_jm <= 0.
///
/// Maximized objective:
///   sum y_ik z_ik - sum_i lambda_i (sum_{j != i} lambda_j) ||x_ik||^2 z_ik
///     + sum_{i<j} 2 lambda_i lambda_j <x_ik, x_jm> z_ijkm.
/// All points must lie in the open positive orthant so that every product
/// coefficient is positive and z_ijkm = min(z_ik, z_jm) at any optimum.
class GenLpModel {
 public:
  GenLpModel(Instance inst, std::vector<double> y) : inst_(std::move(inst)), y_(std::move(y)) {
    if (y_.size() != inst_.total_support()) throw PricingError("dual vector has the wrong length");
    for (const auto& m : inst_.measures)
      for (double x : m.coords())
        if (!(x > 0.0)) throw PricingError("pricing model needs positive coordinates; shift the instance first");
    build();
  }

  const Instance& instance() const noexcept { return inst_; }
  std::span<const double> duals() const noexcept { return y_; }
  const lp::LpProblem& lp() const noexcept { return lp_; }

  std::size_t n() const noexcept { return inst_.n(); }
  std::size_t num_selection() const noexcept { return offsets_.back(); }
  std::size_t num_product() const noexcept { return products_.size(); }
  std::size_t num_vars() const noexcept { return num_selection() + num_product(); }
  /// Selection equalities plus two linking rows per product variable.
  std::size_t num_main_constraints() const noexcept { return lp_.num_rows(); }

  std::size_t selection_index(std::size_t i, std::size_t k) const noexcept { return offsets_[i] + k; }
  std::size_t product_index(std::size_t i, std::size_t j, std::size_t k, std::size_t m) const noexcept {
    return num_selection() + pair_start_[i * n() + j] + k * inst_.measures[j].size() + m;
  }
  /// (measure, point) of selection variable `v`.
  std::pair<std::size_t, std::size_t> selection_pair(std::size_t v) const noexcept {
    std::size_t i = 0;
    while (offsets_[i + 1] <= v) ++i;
    return {i, v - offsets_[i]};
  }
  const ProductVar& product(std::size_t p) const noexcept { return products_[p]; }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }

  /// Row index of z_ijkm - z_ik <= 0 for product p; the z_jm row follows it.
  std::size_t first_link_row(std::size_t p) const noexcept { return n() + 2 * p; }

  /// 0/1 point encoding a combination, with products set to z_ik z_jm.
  std::vector<double> encode(const Combination& s) const {
    std::vector<double> z(num_vars(), 0.0);
    for (std::size_t i = 0; i < n(); ++i) z[selection_index(i, s[i])] = 1.0;
    for (std::size_t p = 0; p < products_.size(); ++p) {
      const auto& v = products_[p];
      z[num_selection() + p] = (s[v.i] == v.k && s[v.j] == v.m) ? 1.0 : 0.0;
    }
    return z;
  }

  double objective_value(std::span<const double> z) const { return lp_.objective_value(z); }

  /// Exact reduced cost of a combination, independent of the LP.
  double evaluate(const Combination& s) const { return reduced_cost(inst_, y_, s); }

 private:
  void build() {
    const std::size_t n = inst_.n();
    offsets_ = inst_.offsets();
    pair_start_.assign(n * n, 0);
    lp_ = lp::LpProblem(lp::Sense::maximize);

    for (std::size_t i = 0; i < n; ++i) {
      double others = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) others += inst_.weights[j];
      const auto& mi = inst_.measures[i];
      for (std::size_t k = 0; k < mi.size(); ++k) {
        const auto x = mi.point(k);
        double sq = 0.0;
        for (double c : x) sq += c * c;
        lp_.add_variable(y_[offsets_[i] + k] - inst_.weights[i] * others * sq);
      }
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        pair_start_[i * n + j] = count;
        const double lw = 2.0 * inst_.weights[i] * inst_.weights[j];
        for (std::size_t k = 0; k < inst_.measures[i].size(); ++k)
          for (std::size_t m = 0; m < inst_.measures[j].size(); ++m) {
            const auto a = inst_.measures[i].point(k);
            const auto b = inst_.measures[j].point(m);
            double dot = 0.0;
            for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
            products_.push_back({i, j, k, m});
            lp_.add_variable(lw * dot);
            ++count;
          }
      }

    for (std::size_t i = 0; i < n; ++i) {
      std::vector<lp::Term> row;
      for (std::size_t k = 0; k < inst_.measures[i].size(); ++k) row.push_back({offsets_[i] + k, 1.0});
      lp_.add_constraint(std::move(row), lp::Relation::equal, 1.0);
    }
    for (std::size_t p = 0; p < products_.size(); ++p) {
      const auto& v = products_[p];
      const std::size_t zp = num_selection() + p;
      lp_.add_constraint({{selection_index(v.i, v.k), -1.0}, {zp, 1.0}}, lp::Relation::less_equal, 0.0);
      lp_.add_constraint({{selection_index(v.j, v.m), -1.0}, {zp, 1.0}}, lp::Relation::less_equal, 0.0);
    }
    lp_.cache_columns();
  }

  Instance inst_;
  std::vector<double> y_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> pair_start_;
  std::vector<ProductVar> products_;
  lp::LpProblem lp_;
};

/// Builds the relaxation for an instance whose points are already shifted
/// into the positive orthant.
inline GenLpModel build_gen_lp(const Instance& inst, std::span<const double> y) {
  return GenLpModel(inst, std::vector<double>(y.begin(), y.end()));
}

/// Branching decisions on selection variables, applied as bound changes.
struct BBNode {
  std::vector<std::size_t> fixed_zero;
  std::vector<std::size_t> fixed_one;
  /// LP objective of the parent; +inf at the root.
  double parent_bound = lp::kInf;
  std::size_t depth = 0;
};

/// Solves the node relaxation: fixed_zero sets an upper bound of 0, fixed_one
/// a lower bound of 1.
inline lp::LpOutcome solve_node(const GenLpModel& model, const BBNode& node, const lp::Basis* warm_start = nullptr) {
  std::vector<lp::BoundChange> changes;
  changes.reserve(node.fixed_zero.size() + node.fixed_one.size());
  for (auto v : node.fixed_zero) changes.push_back({v, 0.0, 0.0});
  for (auto v : node.fixed_one) changes.push_back({v, 1.0, lp::kInf});
  return lp::solve_lp(model.lp(), changes, warm_start);
}

}  // namespace wbary
