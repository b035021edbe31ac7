#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wbary/error.hpp"
#include "wbary/gen_lp.hpp"
#include "wbary/lp.hpp"

namespace wbary {

struct RankCertificate {
  std::size_t active_rows = 0;
  std::size_t rank = 0;
  std::size_t dimension = 0;
  bool is_vertex = false;
};

/// Rank of the constraints active at `z`: the selection equalities, linking
/// rows with slack at most `tol`, nonnegativity bounds with value at most
/// `tol`, and (when `node` is given) the branching bounds. `z` is a full
/// model point, selection variables first.
inline RankCertificate vertex_rank(const GenLpModel& model, std::span<const double> z, double tol = 1e-9,
                                   const BBNode* node = nullptr) {
  const auto& prob = model.lp();
  const std::size_t dim = prob.num_vars();
  if (z.size() != dim) throw PricingError("point has the wrong dimension");

  std::vector<std::vector<lp::Term>> active;
  for (std::size_t j = 0; j < dim; ++j)
    if (z[j] < -tol) throw PricingError("point violates a nonnegativity bound");
  for (std::size_t i = 0; i < prob.num_rows(); ++i) {
    const double act = prob.row_activity(i, z);
    const double rhs = prob.rhs(i);
    if (prob.relation(i) == lp::Relation::equal) {
      if (std::abs(act - rhs) > tol) throw PricingError("point violates row " + std::to_string(i));
      active.emplace_back(prob.row(i).begin(), prob.row(i).end());
    } else {
      if (act > rhs + tol) throw PricingError("point violates row " + std::to_string(i));
      if (act >= rhs - tol) active.emplace_back(prob.row(i).begin(), prob.row(i).end());
    }
  }
  std::vector<bool> lower_active(dim, false);
  for (std::size_t j = 0; j < dim; ++j)
    if (z[j] <= tol) lower_active[j] = true;
  if (node) {
    for (auto v : node->fixed_zero) {
      if (z[v] > tol) throw PricingError("point violates a branching bound");
      lower_active[v] = true;
    }
    for (auto v : node->fixed_one) {
      if (z[v] < 1.0 - tol) throw PricingError("point violates a branching bound");
      if (z[v] <= 1.0 + tol) active.push_back({{v, 1.0}});
    }
  }
  for (std::size_t j = 0; j < dim; ++j)
    if (lower_active[j]) active.push_back({{j, 1.0}});

  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(active.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < active.size(); ++r)
    for (const auto& t : active[r]) mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t.var)) = t.coef;

  RankCertificate cert;
  cert.active_rows = active.size();
  cert.dimension = dim;
  if (!active.empty()) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mat);
    qr.setThreshold(1e-8);
    cert.rank = static_cast<std::size_t>(qr.rank());
  }
  cert.is_vertex = cert.rank == dim;
  return cert;
}

using WitnessMatrix = std::array<std::array<int, 5>, 5>;

/// 5x5 submatrix of the constraint matrix on the columns z_11, z_12, z_21,
/// z_1211, z_1221 and the rows
///   z_11 + z_12 + ... = 1,  z_1211 <= z_11,  z_1211 <= z_21,
///   z_1221 <= z_12,  z_1221 <= z_21
/// (1-based measure/point labels), in that order.
inline WitnessMatrix non_tu_witness_matrix(const GenLpModel& model) {
  const auto& inst = model.instance();
  if (inst.n() < 2 || inst.measures[0].size() < 2 || inst.measures[1].size() < 2)
    throw PricingError("witness requires p ≥ 2 in the first two measures");
  const std::array<std::size_t, 5> cols = {model.selection_index(0, 0), model.selection_index(0, 1),
                                           model.selection_index(1, 0), model.product_index(0, 1, 0, 0),
                                           model.product_index(0, 1, 1, 0)};
  const std::size_t p1211 = model.product_index(0, 1, 0, 0) - model.num_selection();
  const std::size_t p1221 = model.product_index(0, 1, 1, 0) - model.num_selection();
  const std::array<std::size_t, 5> rows = {0, model.first_link_row(p1211), model.first_link_row(p1211) + 1,
                                           model.first_link_row(p1221), model.first_link_row(p1221) + 1};
  WitnessMatrix u{};
  for (std::size_t r = 0; r < 5; ++r)
    for (const auto& t : model.lp().row(rows[r]))
      for (std::size_t c = 0; c < 5; ++c)
        if (t.var == cols[c]) u[r][c] = static_cast<int>(t.coef);
  return u;
}

/// Exact integer determinant (fraction-free Bareiss elimination).
inline std::int64_t integer_determinant(WitnessMatrix a) {
  std::array<std::array<std::int64_t, 5>, 5> m{};
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) m[r][c] = a[r][c];
  std::int64_t sign = 1, prev = 1;
  for (std::size_t k = 0; k < 5; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < 5 && m[swap][k] == 0) ++swap;
      if (swap == 5) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t r = k + 1; r < 5; ++r)
      for (std::size_t c = k + 1; c < 5; ++c) m[r][c] = (m[r][c] * m[k][k] - m[r][k] * m[k][c]) / prev;
    prev = m[k][k];
  }
  return sign * m[4][4];
}

/// Determinant of the witness submatrix; any value outside {-1, 0, 1} shows
/// the constraint matrix is not totally unimodular.
inline std::int64_t non_tu_witness(const GenLpModel& model) {
  return integer_determinant(non_tu_witness_matrix(model));
}

}  // namespace wbary
