#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace wbary::lp::detail {

/// LU factorization of a square sparse basis matrix given by columns.
///
/// Column and row singletons are peeled off first, which brings the matrix
/// into block upper triangular form
///   [ H  *  * ]
///   [ 0  N  * ]
///   [ 0  0  T ]
/// with H and T triangular up to permutation. Only the remaining nucleus N
/// is factored densely (partial pivoting).
class BasisLu {
 public:
  /// Columns are given in CSC form: entries [start[c], start[c+1]) of
  /// `rows`/`vals` belong to column c. Returns false if the matrix is
  /// (numerically) singular.
  bool factorize(std::size_t m, std::vector<std::size_t> start, std::vector<std::size_t> rows,
                 std::vector<double> vals) {
    m_ = m;
    start_ = std::move(start);
    rows_ = std::move(rows);
    vals_ = std::move(vals);
    head_.clear();
    tail_.clear();
    nuc_rows_.clear();
    nuc_cols_.clear();
    block_.assign(m_, Block::nucleus);

    // Row-wise pattern: for each row, the columns with an entry in it.
    std::vector<std::size_t> rstart(m_ + 1, 0);
    for (std::size_t e = 0; e < rows_.size(); ++e) ++rstart[rows_[e] + 1];
    for (std::size_t i = 0; i < m_; ++i) rstart[i + 1] += rstart[i];
    std::vector<std::size_t> rcols(rows_.size());
    {
      std::vector<std::size_t> fill(rstart.begin(), rstart.end() - 1);
      for (std::size_t c = 0; c < m_; ++c)
        for (std::size_t e = start_[c]; e < start_[c + 1]; ++e) rcols[fill[rows_[e]]++] = c;
    }

    std::vector<std::size_t> col_count(m_), row_count(m_);
    std::vector<char> row_active(m_, 1), col_active(m_, 1);
    std::vector<std::size_t> colq, rowq;
    for (std::size_t c = 0; c < m_; ++c) {
      col_count[c] = start_[c + 1] - start_[c];
      if (col_count[c] == 0) return false;
      if (col_count[c] == 1) colq.push_back(c);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      row_count[i] = rstart[i + 1] - rstart[i];
      if (row_count[i] == 0) return false;
      if (row_count[i] == 1) rowq.push_back(i);
    }

    while (!colq.empty() || !rowq.empty()) {
      if (!colq.empty()) {
        const std::size_t c = colq.back();
        colq.pop_back();
        if (!col_active[c]) continue;
        if (col_count[c] == 0) return false;
        std::size_t r = m_;
        double p = 0.0;
        for (std::size_t e = start_[c]; e < start_[c + 1]; ++e)
          if (row_active[rows_[e]]) {
            r = rows_[e];
            p = vals_[e];
          }
        if (std::abs(p) < kTinyPivot) return false;
        col_active[c] = 0;
        row_active[r] = 0;
        block_[r] = Block::head;
        head_.push_back({r, c, p});
        for (std::size_t e = rstart[r]; e < rstart[r + 1]; ++e) {
          const std::size_t j = rcols[e];
          if (col_active[j] && --col_count[j] == 1) colq.push_back(j);
        }
      } else {
        const std::size_t r = rowq.back();
        rowq.pop_back();
        if (!row_active[r]) continue;
        if (row_count[r] == 0) return false;
        std::size_t c = m_;
        for (std::size_t e = rstart[r]; e < rstart[r + 1]; ++e)
          if (col_active[rcols[e]]) c = rcols[e];
        double p = 0.0;
        for (std::size_t e = start_[c]; e < start_[c + 1]; ++e)
          if (rows_[e] == r) p += vals_[e];
        if (std::abs(p) < kTinyPivot) return false;
        col_active[c] = 0;
        row_active[r] = 0;
        block_[r] = Block::tail;
        tail_.push_back({r, c, p});
        for (std::size_t e = start_[c]; e < start_[c + 1]; ++e) {
          const std::size_t i = rows_[e];
          if (row_active[i] && --row_count[i] == 1) rowq.push_back(i);
        }
      }
    }

    for (std::size_t i = 0; i < m_; ++i)
      if (row_active[i]) nuc_rows_.push_back(i);
    for (std::size_t c = 0; c < m_; ++c)
      if (col_active[c]) nuc_cols_.push_back(c);
    if (nuc_rows_.size() != nuc_cols_.size()) return false;

    const auto k = static_cast<Eigen::Index>(nuc_rows_.size());
    if (k > 0) {
      std::vector<std::size_t> pos(m_, 0);
      for (std::size_t t = 0; t < nuc_rows_.size(); ++t) pos[nuc_rows_[t]] = t;
      Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(k, k);
      for (std::size_t s = 0; s < nuc_cols_.size(); ++s)
        for (std::size_t e = start_[nuc_cols_[s]]; e < start_[nuc_cols_[s] + 1]; ++e)
          if (block_[rows_[e]] == Block::nucleus)
            dense(static_cast<Eigen::Index>(pos[rows_[e]]), static_cast<Eigen::Index>(s)) += vals_[e];
      lu_.compute(dense);
      const auto diag = lu_.matrixLU().diagonal().cwiseAbs();
      if (!(diag.minCoeff() > kTinyPivot * std::max(1.0, diag.maxCoeff()))) return false;
      rhs_.resize(k);
    }
    return true;
  }

  /// Solves B x = v. On entry `v` is indexed by row, on exit by column.
  void ftran(std::vector<double>& v) const {
    auto& x = scratch_;
    x.assign(m_, 0.0);
    for (const auto& pv : tail_) sweep_column(pv, v, x);
    if (!nuc_cols_.empty()) {
      for (std::size_t t = 0; t < nuc_rows_.size(); ++t) rhs_[static_cast<Eigen::Index>(t)] = v[nuc_rows_[t]];
      sol_ = lu_.solve(rhs_);
      const auto& sol = sol_;
      for (std::size_t s = 0; s < nuc_cols_.size(); ++s) {
        const std::size_t c = nuc_cols_[s];
        const double xc = sol[static_cast<Eigen::Index>(s)];
        x[c] = xc;
        if (xc == 0.0) continue;
        for (std::size_t e = start_[c]; e < start_[c + 1]; ++e)
          if (block_[rows_[e]] == Block::head) v[rows_[e]] -= vals_[e] * xc;
      }
    }
    for (auto it = head_.rbegin(); it != head_.rend(); ++it) sweep_column(*it, v, x);
    v.swap(x);
  }

  /// Solves B^T y = w. On entry `w` is indexed by column, on exit by row.
  void btran(std::vector<double>& w) const {
    auto& y = scratch_;
    y.assign(m_, 0.0);
    for (const auto& pv : head_) y[pv.row] = column_residual(pv, w, y) / pv.value;
    if (!nuc_cols_.empty()) {
      for (std::size_t s = 0; s < nuc_cols_.size(); ++s) {
        const std::size_t c = nuc_cols_[s];
        double r = w[c];
        for (std::size_t e = start_[c]; e < start_[c + 1]; ++e)
          if (block_[rows_[e]] == Block::head) r -= vals_[e] * y[rows_[e]];
        rhs_[static_cast<Eigen::Index>(s)] = r;
      }
      sol_ = lu_.transpose().solve(rhs_);
      const auto& sol = sol_;
      for (std::size_t t = 0; t < nuc_rows_.size(); ++t) y[nuc_rows_[t]] = sol[static_cast<Eigen::Index>(t)];
    }
    for (auto it = tail_.rbegin(); it != tail_.rend(); ++it) y[it->row] = column_residual(*it, w, y) / it->value;
    w.swap(y);
  }

  std::size_t nucleus_size() const noexcept { return nuc_rows_.size(); }

 private:
  static constexpr double kTinyPivot = 1e-11;

  enum class Block : std::uint8_t { head, nucleus, tail };

  struct Pivot {
    std::size_t row, col;
    double value;
  };

  void sweep_column(const Pivot& pv, std::vector<double>& v, std::vector<double>& x) const {
    const double xc = v[pv.row] / pv.value;
    x[pv.col] = xc;
    if (xc == 0.0) return;
    for (std::size_t e = start_[pv.col]; e < start_[pv.col + 1]; ++e)
      if (rows_[e] != pv.row) v[rows_[e]] -= vals_[e] * xc;
  }

  double column_residual(const Pivot& pv, const std::vector<double>& w, const std::vector<double>& y) const {
    double r = w[pv.col];
    for (std::size_t e = start_[pv.col]; e < start_[pv.col + 1]; ++e)
      if (rows_[e] != pv.row) r -= vals_[e] * y[rows_[e]];
    return r;
  }

  std::size_t m_ = 0;
  std::vector<std::size_t> start_, rows_;
  std::vector<double> vals_;
  std::vector<Pivot> head_, tail_;
  std::vector<std::size_t> nuc_rows_, nuc_cols_;
  std::vector<Block> block_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  mutable Eigen::VectorXd rhs_, sol_;
  // Output buffer, swapped with the caller's vector so neither reallocates.
  mutable std::vector<double> scratch_;
};

}  // namespace wbary::lp::detail
