#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wbary/error.hpp"
#include "wbary/lp_factor.hpp"

namespace wbary::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };
enum class Status { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct Term {
  std::size_t var;
  double coef;
};

/// A linear program with sparse rows and per-variable bounds. Lower bounds
/// default to 0, upper bounds to +infinity.
/// Compressed column form of the constraint matrix; duplicate entries of a
/// variable in one row are summed and zeros dropped.
struct ColumnForm {
  std::vector<std::size_t> start;
  std::vector<std::size_t> row;
  std::vector<double> val;
};

class LpProblem {
 public:
  explicit LpProblem(Sense sense = Sense::minimize) : sense_(sense) {}

  std::size_t add_variable(double cost, double lower = 0.0, double upper = kInf) {
    check_bounds(lower, upper);
    columns_.reset();
    cost_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    return cost_.size() - 1;
  }

  /// Appends a variable together with its coefficients in existing rows.
  std::size_t add_column(double cost, std::span<const Term> entries, double lower = 0.0, double upper = kInf) {
    const std::size_t j = add_variable(cost, lower, upper);
    for (const auto& [row, coef] : entries) {
      if (row >= rows_.size()) throw LpError("column entry refers to a missing row");
      rows_[row].push_back({j, coef});
    }
    columns_.reset();
    return j;
  }

  std::size_t add_constraint(std::vector<Term> terms, Relation rel, double rhs) {
    for (const auto& t : terms)
      if (t.var >= num_vars()) throw LpError("constraint refers to an unknown variable");
    rows_.push_back(std::move(terms));
    columns_.reset();
    relations_.push_back(rel);
    rhs_.push_back(rhs);
    return rows_.size() - 1;
  }

  /// Dense row; its length must equal the number of variables.
  std::size_t add_dense_constraint(std::span<const double> row, Relation rel, double rhs) {
    if (row.size() != num_vars()) throw LpError("dense row length differs from the variable count");
    std::vector<Term> terms;
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] != 0.0) terms.push_back({j, row[j]});
    return add_constraint(std::move(terms), rel, rhs);
  }

  void set_bounds(std::size_t j, double lower, double upper) {
    check_bounds(lower, upper);
    lower_.at(j) = lower;
    upper_.at(j) = upper;
  }
  void set_cost(std::size_t j, double c) { cost_.at(j) = c; }
  void set_sense(Sense s) { sense_ = s; }

  Sense sense() const noexcept { return sense_; }
  std::size_t num_vars() const noexcept { return cost_.size(); }
  std::size_t num_rows() const noexcept { return rows_.size(); }
  double cost(std::size_t j) const { return cost_[j]; }
  double lower(std::size_t j) const { return lower_[j]; }
  double upper(std::size_t j) const { return upper_[j]; }
  std::span<const Term> row(std::size_t i) const { return rows_[i]; }
  Relation relation(std::size_t i) const { return relations_[i]; }
  double rhs(std::size_t i) const { return rhs_[i]; }
  std::span<const double> costs() const noexcept { return cost_; }

  /// Column form, cached by `cache_columns` or built on the fly.
  std::shared_ptr<const ColumnForm> column_form() const { return columns_ ? columns_ : build_column_form(); }

  /// Stores the column form so repeated solves of this problem skip rebuilding it.
  void cache_columns() { columns_ = build_column_form(); }

  /// Activity of row i at x.
  double row_activity(std::size_t i, std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : rows_[i]) s += t.coef * x[t.var];
    return s;
  }

  double objective_value(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < num_vars(); ++j) s += cost_[j] * x[j];
    return s;
  }

 private:
  std::shared_ptr<const ColumnForm> build_column_form() const {
    const std::size_t n = num_vars();
    std::vector<std::size_t> count(n + 1, 0);
    for (const auto& r : rows_)
      for (const auto& t : r) ++count[t.var + 1];
    auto cf = std::make_shared<ColumnForm>();
    cf->start.assign(n + 1, 0);
    std::vector<std::size_t> fill(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) fill[j + 1] = fill[j] + count[j + 1];
    std::vector<std::size_t> rws(fill[n]);
    std::vector<double> vls(fill[n]);
    std::vector<std::size_t> pos(fill.begin(), fill.end() - 1);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (const auto& t : rows_[i]) {
        auto& p = pos[t.var];
        if (p > fill[t.var] && rws[p - 1] == i) {
          vls[p - 1] += t.coef;
        } else {
          rws[p] = i;
          vls[p] = t.coef;
          ++p;
        }
      }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t e = fill[j]; e < pos[j]; ++e)
        if (vls[e] != 0.0) {
          cf->row.push_back(rws[e]);
          cf->val.push_back(vls[e]);
        }
      cf->start[j + 1] = cf->row.size();
    }
    return cf;
  }

  static void check_bounds(double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) throw LpError("inconsistent variable bounds");
    if (lower == kInf || upper == -kInf) throw LpError("variable bound at the wrong infinity");
  }

  Sense sense_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::vector<Term>> rows_;
  std::vector<Relation> relations_;
  std::vector<double> rhs_;
  std::shared_ptr<const ColumnForm> columns_;
};

enum class VarStatus : std::uint8_t { basic, at_lower, at_upper };

/// Basic/nonbasic status of every structural and slack variable. Reusable as
/// a warm start for problems that differ in bounds, costs, or appended columns.
struct Basis {
  std::vector<VarStatus> structural;
  std::vector<VarStatus> slack;

  bool empty() const noexcept { return structural.empty() && slack.empty(); }
  std::vector<std::size_t> basic_structurals() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < structural.size(); ++j)
      if (structural[j] == VarStatus::basic) out.push_back(j);
    return out;
  }
};

struct LpOutcome {
  Status status = Status::numerical_failure;
  std::vector<double> primal;
  /// One multiplier per constraint; objective = sum_i dual_i * rhs_i plus the
  /// reduced-cost contributions of variables resting at nonzero bounds.
  std::vector<double> dual;
  std::vector<double> reduced_cost;
  double objective = 0.0;
  Basis basis;
  std::size_t iterations = 0;
  std::string message;
};

/// Bound replacement applied for one solve without copying the problem.
struct BoundChange {
  std::size_t var;
  double lower;
  double upper;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  std::size_t refactor_interval = 64;
  std::size_t degenerate_limit = 50;
  /// 0 selects a size-dependent default.
  std::size_t max_iterations = 0;
};

namespace detail {

class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& prob, const SimplexOptions& opts, std::span<const BoundChange> changes = {})
      : prob_(prob), opts_(opts) {
    m_ = prob.num_rows();
    ns_ = prob.num_vars();
    nt_ = ns_ + m_;
    cols_ = prob.column_form();
    cost_.assign(nt_, 0.0);
    lo_.assign(nt_, 0.0);
    up_.assign(nt_, 0.0);
    const double flip = prob.sense() == Sense::maximize ? -1.0 : 1.0;
    double cmax = 1.0;
    for (std::size_t j = 0; j < ns_; ++j) {
      cost_[j] = flip * prob.cost(j);
      lo_[j] = prob.lower(j);
      up_[j] = prob.upper(j);
      cmax = std::max(cmax, std::abs(cost_[j]));
    }
    for (const auto& c : changes) {
      if (c.var >= ns_) throw LpError("bound change refers to an unknown variable");
      if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper || c.lower == kInf || c.upper == -kInf)
        throw LpError("inconsistent variable bounds");
      lo_[c.var] = c.lower;
      up_[c.var] = c.upper;
    }
    for (std::size_t j = 0; j < ns_; ++j)
      if (lo_[j] == -kInf && up_[j] == kInf) throw LpError("free variables are not supported");
    double bmax = 1.0;
    b_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      b_[i] = prob.rhs(i);
      bmax = std::max(bmax, std::abs(b_[i]));
      const std::size_t s = ns_ + i;
      switch (prob.relation(i)) {
        case Relation::less_equal: lo_[s] = 0.0; up_[s] = kInf; break;
        case Relation::greater_equal: lo_[s] = -kInf; up_[s] = 0.0; break;
        case Relation::equal: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
    }
    otol_ = opts.optimality_tol * cmax;
    ftol_ = opts.feasibility_tol * bmax;
    max_iter_ = opts.max_iterations ? opts.max_iterations : std::max<std::size_t>(20000, 50 * (nt_ + m_));
  }

  LpOutcome solve(const Basis* warm) {
    LpOutcome out;
    if (m_ == 0) return solve_unconstrained();
    bool started = false;
    if (warm && !warm->empty()) started = load_basis(*warm);
    if (!started) cold_basis();

    std::size_t iter = 0;
    // A warm basis usually stays dual feasible after bound changes.
    if (started) {
      const auto dual = dual_simplex(iter);
      if (dual == DualResult::singular) cold_basis();
    }

    bool fresh = true;
    bool bland = false;
    std::size_t degenerate_run = 0;
    std::vector<double> y(m_), cb(m_), alpha(m_);
    for (; iter < max_iter_; ++iter) {
      if (etas_.size() >= opts_.refactor_interval) {
        if (!refactor()) return failure(out, iter, "basis became singular during refactorization");
        fresh = true;
      }

      bool phase1 = false;
      for (std::size_t r = 0; r < m_; ++r) {
        const auto v = basic_[r];
        cb[r] = 0.0;
        if (x_[v] < lo_[v] - ftol_) { cb[r] = -1.0; phase1 = true; }
        else if (x_[v] > up_[v] + ftol_) { cb[r] = 1.0; phase1 = true; }
      }
      if (!phase1)
        for (std::size_t r = 0; r < m_; ++r) cb[r] = cost_[basic_[r]];
      y = cb;
      btran(y);

      // Pricing: Dantzig rule, or Bland's smallest index while cycling is suspected.
      std::size_t enter = nt_;
      double best = 0.0;
      double enter_d = 0.0;
      const double tol = phase1 ? opts_.optimality_tol : otol_;
      for (std::size_t j = 0; j < nt_; ++j) {
        if (status_[j] == VarStatus::basic || lo_[j] == up_[j]) continue;
        const double d = (phase1 ? 0.0 : cost_[j]) - column_dot(j, y);
        const bool improves =
            (status_[j] == VarStatus::at_lower && d < -tol) || (status_[j] == VarStatus::at_upper && d > tol);
        if (!improves) continue;
        if (bland) { enter = j; enter_d = d; break; }
        if (std::abs(d) > best) { best = std::abs(d); enter = j; enter_d = d; }
      }

      if (enter == nt_) {
        if (!fresh) {
          if (!refactor()) return failure(out, iter, "basis became singular during refactorization");
          fresh = true;
          continue;
        }
        if (phase1) {
          out.status = Status::infeasible;
          out.iterations = iter;
          return finish(out, false);
        }
        out.status = Status::optimal;
        out.iterations = iter;
        return finish(out, true);
      }

      std::fill(alpha.begin(), alpha.end(), 0.0);
      scatter_column(enter, alpha);
      ftran(alpha);
      const double dir = enter_d < 0.0 ? 1.0 : -1.0;

      // Harris two-pass ratio test over the first breakpoint of each basic variable.
      double relaxed = kInf;
      for (std::size_t r = 0; r < m_; ++r) {
        if (std::abs(alpha[r]) <= opts_.pivot_tol) continue;
        const double rate = -dir * alpha[r];
        const double bound = breakpoint(basic_[r], rate);
        if (std::isinf(bound)) continue;
        const double room = rate < 0.0 ? x_[basic_[r]] - bound + ftol_ : bound - x_[basic_[r]] + ftol_;
        relaxed = std::min(relaxed, std::max(room, 0.0) / std::abs(rate));
      }
      const double range = up_[enter] - lo_[enter];
      std::size_t leave = m_;
      double step = kInf;
      if (relaxed < kInf) {
        double pivot_size = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
          if (std::abs(alpha[r]) <= opts_.pivot_tol) continue;
          const double rate = -dir * alpha[r];
          const double bound = breakpoint(basic_[r], rate);
          if (std::isinf(bound)) continue;
          const double dist = rate < 0.0 ? x_[basic_[r]] - bound : bound - x_[basic_[r]];
          const double t = std::max(dist, 0.0) / std::abs(rate);
          if (t > relaxed) continue;
          const bool better = bland ? (leave == m_ || basic_[r] < basic_[leave])
                                    : std::abs(alpha[r]) > pivot_size;
          if (better) { leave = r; pivot_size = std::abs(alpha[r]); step = t; }
        }
      }

      if (range <= step && range < kInf) {
        // Bound flip: the entering variable reaches its opposite bound first.
        for (std::size_t r = 0; r < m_; ++r) x_[basic_[r]] -= dir * range * alpha[r];
        x_[enter] = status_[enter] == VarStatus::at_lower ? up_[enter] : lo_[enter];
        status_[enter] = status_[enter] == VarStatus::at_lower ? VarStatus::at_upper : VarStatus::at_lower;
        fresh = false;
        degenerate_run = 0;
        bland = false;
        continue;
      }
      if (leave == m_) {
        if (phase1) return failure(out, iter, "phase-one ratio test found no breakpoint");
        out.status = Status::unbounded;
        out.iterations = iter;
        return finish(out, false);
      }

      const std::size_t lv = basic_[leave];
      const double rate = -dir * alpha[leave];
      const double target = breakpoint(lv, rate);
      for (std::size_t r = 0; r < m_; ++r) x_[basic_[r]] -= dir * step * alpha[r];
      x_[enter] += dir * step;
      x_[lv] = target;
      status_[lv] = target == lo_[lv] ? VarStatus::at_lower : VarStatus::at_upper;
      status_[enter] = VarStatus::basic;
      basic_[leave] = enter;
      push_eta(leave, alpha);
      fresh = false;

      if (step <= 1e-12) {
        if (++degenerate_run > opts_.degenerate_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
    return failure(out, iter, "iteration limit reached");
  }

 private:
  enum class DualResult { feasible, not_dual_feasible, stalled, singular };

  /// Dual simplex on the current basis. Stops when the basis is primal
  /// feasible or whenever it cannot continue safely; the primal method then
  /// finishes (or certifies infeasibility).
  DualResult dual_simplex(std::size_t& iter) {
    std::vector<double> d(nt_, 0.0), rho(m_), alpha(m_), row(nt_, 0.0);
    std::vector<char> mark(nt_, 0);
    std::vector<std::size_t> touched;
    std::vector<double> weight(m_, 1.0), tau(m_);
    auto price = [&] {
      std::vector<double> y(m_);
      for (std::size_t r = 0; r < m_; ++r) y[r] = cost_[basic_[r]];
      btran(y);
      for (std::size_t j = 0; j < nt_; ++j) d[j] = status_[j] == VarStatus::basic ? 0.0 : cost_[j] - column_dot(j, y);
    };
    price();
    for (std::size_t j = 0; j < nt_; ++j) {
      if (status_[j] == VarStatus::basic || lo_[j] == up_[j]) continue;
      if ((status_[j] == VarStatus::at_lower && d[j] < -otol_) || (status_[j] == VarStatus::at_upper && d[j] > otol_))
        return DualResult::not_dual_feasible;
    }

    const std::size_t limit = std::min(max_iter_, iter + 20 * m_ + 100);
    std::size_t degenerate_run = 0;
    for (; iter < limit; ++iter) {
      if (etas_.size() >= opts_.refactor_interval) {
        if (!refactor()) return DualResult::singular;
        price();
      }
      // Leaving row: largest infeasibility relative to its steepest-edge weight.
      std::size_t r = m_;
      double worst = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        const auto v = basic_[k];
        const double inf = x_[v] < lo_[v] ? lo_[v] - x_[v] : (x_[v] > up_[v] ? x_[v] - up_[v] : 0.0);
        if (inf <= ftol_) continue;
        const double score = inf * inf / weight[k];
        if (score > worst) {
          worst = score;
          r = k;
        }
      }
      if (r == m_) return DualResult::feasible;

      const auto v = basic_[r];
      const bool to_lower = x_[v] < lo_[v];
      std::fill(rho.begin(), rho.end(), 0.0);
      rho[r] = 1.0;
      btran(rho);

      // Pivot row, accumulated row-wise over the nonzeros of rho.
      touched.clear();
      for (std::size_t i = 0; i < m_; ++i) {
        const double ri = rho[i];
        if (ri == 0.0) continue;
        for (const auto& t : prob_.row(i)) {
          if (!mark[t.var]) {
            mark[t.var] = 1;
            touched.push_back(t.var);
          }
          row[t.var] += ri * t.coef;
        }
        const std::size_t sl = ns_ + i;
        mark[sl] = 1;
        touched.push_back(sl);
        row[sl] = ri;
      }
      auto eligible = [&](std::size_t j) { return status_[j] != VarStatus::basic && lo_[j] != up_[j]; };

      // Harris ratio test on the pivot row.
      double bound = kInf;
      for (auto j : touched) {
        if (!eligible(j)) continue;
        const double at = to_lower ? -row[j] : row[j];
        if (status_[j] == VarStatus::at_lower && at > opts_.pivot_tol) bound = std::min(bound, (d[j] + otol_) / at);
        else if (status_[j] == VarStatus::at_upper && at < -opts_.pivot_tol) bound = std::min(bound, (d[j] - otol_) / at);
      }
      std::size_t q = nt_;
      double pivot = 0.0;
      for (auto j : touched) {
        if (!eligible(j)) continue;
        const double at = to_lower ? -row[j] : row[j];
        double ratio;
        if (status_[j] == VarStatus::at_lower && at > opts_.pivot_tol) ratio = std::max(d[j], 0.0) / at;
        else if (status_[j] == VarStatus::at_upper && at < -opts_.pivot_tol) ratio = std::min(d[j], 0.0) / at;
        else continue;
        if (ratio <= bound && std::abs(at) > pivot) {
          pivot = std::abs(at);
          q = j;
        }
      }
      auto clear_row = [&] {
        for (auto j : touched) {
          row[j] = 0.0;
          mark[j] = 0;
        }
      };
      // No candidate: the primal problem is infeasible, which the primal method certifies.
      if (q == nt_) {
        clear_row();
        return DualResult::stalled;
      }

      std::fill(alpha.begin(), alpha.end(), 0.0);
      scatter_column(q, alpha);
      ftran(alpha);
      if (std::abs(alpha[r]) <= opts_.pivot_tol || std::abs(alpha[r] - row[q]) > 1e-6 * (1.0 + std::abs(row[q]))) {
        clear_row();
        return refactor() ? DualResult::stalled : DualResult::singular;
      }

      // Steepest-edge weight update, using tau = B^-1 rho.
      double rho_norm = 0.0;
      for (double e : rho) rho_norm += e * e;
      tau = rho;
      ftran(tau);
      const double ar = alpha[r];
      for (std::size_t k = 0; k < m_; ++k) {
        if (k == r || alpha[k] == 0.0) continue;
        const double ratio = alpha[k] / ar;
        weight[k] = std::max(weight[k] - 2.0 * ratio * tau[k] + ratio * ratio * rho_norm, 1e-4);
      }
      weight[r] = std::max(rho_norm / (ar * ar), 1e-4);

      const double theta = d[q] / row[q];
      for (auto j : touched)
        if (eligible(j)) d[j] -= theta * row[j];
      clear_row();
      d[q] = 0.0;
      d[v] = -theta;

      const double target = to_lower ? lo_[v] : up_[v];
      const double step = (x_[v] - target) / alpha[r];
      for (std::size_t k = 0; k < m_; ++k) x_[basic_[k]] -= step * alpha[k];
      x_[q] += step;
      x_[v] = target;
      status_[v] = to_lower ? VarStatus::at_lower : VarStatus::at_upper;
      status_[q] = VarStatus::basic;
      basic_[r] = q;
      push_eta(r, alpha);

      if (std::abs(theta) <= 1e-12) {
        if (++degenerate_run > 10 * opts_.degenerate_limit) return DualResult::stalled;
      } else {
        degenerate_run = 0;
      }
    }
    return DualResult::stalled;
  }

  // Eta entries below this magnitude are rounding noise.
  static constexpr double kEtaDrop = 1e-14;

  struct Eta {
    std::size_t pos;
    double pivot;
    std::vector<std::pair<std::size_t, double>> entries;
  };

  double column_dot(std::size_t j, const std::vector<double>& v) const {
    if (j >= ns_) return v[j - ns_];
    double s = 0.0;
    for (std::size_t e = cols_->start[j]; e < cols_->start[j + 1]; ++e) s += cols_->val[e] * v[cols_->row[e]];
    return s;
  }

  void scatter_column(std::size_t j, std::vector<double>& v) const {
    if (j >= ns_) { v[j - ns_] += 1.0; return; }
    for (std::size_t e = cols_->start[j]; e < cols_->start[j + 1]; ++e) v[cols_->row[e]] += cols_->val[e];
  }

  /// Value at which basic variable v stops moving in direction `rate`, or inf.
  double breakpoint(std::size_t v, double rate) const {
    const double xv = x_[v];
    if (rate < 0.0) {
      if (xv > up_[v] + ftol_) return up_[v];
      if (xv >= lo_[v] - ftol_) return lo_[v];
      return -kInf;
    }
    if (xv < lo_[v] - ftol_) return lo_[v];
    if (xv <= up_[v] + ftol_) return up_[v];
    return kInf;
  }

  double nonbasic_value(std::size_t j) const {
    if (status_[j] == VarStatus::at_upper) return up_[j];
    return lo_[j];
  }

  void cold_basis() {
    status_.assign(nt_, VarStatus::at_lower);
    x_.assign(nt_, 0.0);
    basic_.resize(m_);
    for (std::size_t j = 0; j < ns_; ++j) {
      status_[j] = lo_[j] == -kInf ? VarStatus::at_upper : VarStatus::at_lower;
      x_[j] = nonbasic_value(j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      status_[ns_ + i] = VarStatus::basic;
      basic_[i] = ns_ + i;
    }
    refactor();
  }

  bool load_basis(const Basis& basis) {
    if (basis.slack.size() != m_ || basis.structural.size() > ns_) return false;
    status_.assign(nt_, VarStatus::at_lower);
    for (std::size_t j = 0; j < basis.structural.size(); ++j) status_[j] = basis.structural[j];
    for (std::size_t i = 0; i < m_; ++i) status_[ns_ + i] = basis.slack[i];
    basic_.clear();
    x_.assign(nt_, 0.0);
    for (std::size_t j = 0; j < nt_; ++j) {
      if (status_[j] == VarStatus::basic) {
        basic_.push_back(j);
        continue;
      }
      if (status_[j] == VarStatus::at_lower && lo_[j] == -kInf) status_[j] = VarStatus::at_upper;
      if (status_[j] == VarStatus::at_upper && up_[j] == kInf) status_[j] = VarStatus::at_lower;
      x_[j] = nonbasic_value(j);
    }
    if (basic_.size() != m_) return false;
    if (!refactor()) return false;
    // Reject numerically singular bases that the factorization let through.
    std::vector<double> resid = rhs_minus_nonbasic();
    for (std::size_t r = 0; r < m_; ++r) {
      const auto v = basic_[r];
      if (v >= ns_) { resid[v - ns_] -= x_[v]; continue; }
      for (std::size_t e = cols_->start[v]; e < cols_->start[v + 1]; ++e) resid[cols_->row[e]] -= cols_->val[e] * x_[v];
    }
    double worst = 0.0;
    for (double r : resid) worst = std::max(worst, std::abs(r));
    return worst <= 1e-6 * std::max(1.0, max_abs(b_));
  }

  static double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  }

  std::vector<double> rhs_minus_nonbasic() const {
    std::vector<double> r = b_;
    for (std::size_t j = 0; j < nt_; ++j) {
      if (status_[j] == VarStatus::basic || x_[j] == 0.0) continue;
      if (j >= ns_) { r[j - ns_] -= x_[j]; continue; }
      for (std::size_t e = cols_->start[j]; e < cols_->start[j + 1]; ++e) r[cols_->row[e]] -= cols_->val[e] * x_[j];
    }
    return r;
  }

  bool refactor() {
    etas_.clear();
    std::vector<std::size_t> start(m_ + 1, 0), rows;
    std::vector<double> vals;
    for (std::size_t r = 0; r < m_; ++r) {
      const auto v = basic_[r];
      if (v >= ns_) {
        rows.push_back(v - ns_);
        vals.push_back(1.0);
      } else {
        for (std::size_t e = cols_->start[v]; e < cols_->start[v + 1]; ++e) {
          rows.push_back(cols_->row[e]);
          vals.push_back(cols_->val[e]);
        }
      }
      start[r + 1] = rows.size();
    }
    if (!lu_.factorize(m_, std::move(start), std::move(rows), std::move(vals))) return false;
    std::vector<double> xb = rhs_minus_nonbasic();
    ftran(xb);
    for (std::size_t r = 0; r < m_; ++r) x_[basic_[r]] = xb[r];
    return true;
  }

  void ftran(std::vector<double>& v) const {
    lu_.ftran(v);
    for (const auto& eta : etas_) {
      const double vr = v[eta.pos] / eta.pivot;
      v[eta.pos] = vr;
      if (vr == 0.0) continue;
      for (const auto& [i, a] : eta.entries) v[i] -= a * vr;
    }
  }

  void btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->pos];
      for (const auto& [i, a] : it->entries) s -= a * v[i];
      v[it->pos] = s / it->pivot;
    }
    lu_.btran(v);
  }

  void push_eta(std::size_t pos, const std::vector<double>& alpha) {
    Eta eta{pos, alpha[pos], {}};
    std::size_t nz = 0;
    for (std::size_t i = 0; i < m_; ++i) nz += std::abs(alpha[i]) > kEtaDrop;
    eta.entries.reserve(nz);
    for (std::size_t i = 0; i < m_; ++i)
      if (i != pos && std::abs(alpha[i]) > kEtaDrop) eta.entries.emplace_back(i, alpha[i]);
    etas_.push_back(std::move(eta));
  }

  LpOutcome& failure(LpOutcome& out, std::size_t iter, std::string why) {
    out.status = Status::numerical_failure;
    out.iterations = iter;
    out.message = std::move(why);
    return out;
  }

  LpOutcome solve_unconstrained() {
    LpOutcome out;
    out.primal.assign(ns_, 0.0);
    out.basis.structural.assign(ns_, VarStatus::at_lower);
    for (std::size_t j = 0; j < ns_; ++j) {
      const bool to_upper = cost_[j] < 0.0 || lo_[j] == -kInf;
      const double v = to_upper ? up_[j] : lo_[j];
      if (std::isinf(v)) {
        out.status = Status::unbounded;
        return out;
      }
      out.primal[j] = v;
      out.basis.structural[j] = to_upper ? VarStatus::at_upper : VarStatus::at_lower;
    }
    out.status = Status::optimal;
    out.objective = prob_.objective_value(out.primal);
    out.reduced_cost.assign(prob_.costs().begin(), prob_.costs().end());
    return out;
  }

  LpOutcome finish(LpOutcome& out, bool optimal) {
    out.primal.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(ns_));
    out.basis.structural.assign(status_.begin(), status_.begin() + static_cast<std::ptrdiff_t>(ns_));
    out.basis.slack.assign(status_.begin() + static_cast<std::ptrdiff_t>(ns_), status_.end());
    if (!optimal) return out;

    // Snap nonbasic variables exactly onto their bounds, then certify feasibility.
    for (std::size_t j = 0; j < ns_; ++j)
      if (status_[j] != VarStatus::basic) out.primal[j] = nonbasic_value(j);
    const double scale = std::max(1.0, max_abs(b_));
    for (std::size_t j = 0; j < ns_; ++j) {
      if (out.primal[j] < lo_[j] - ftol_ || out.primal[j] > up_[j] + ftol_) {
        out.status = Status::numerical_failure;
        out.message = "final primal point violates a variable bound";
        return out;
      }
      out.primal[j] = std::clamp(out.primal[j], lo_[j], up_[j]);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const double act = prob_.row_activity(i, out.primal);
      const double viol = violation(prob_.relation(i), act, b_[i]);
      if (viol > opts_.feasibility_tol * scale * 10.0) {
        out.status = Status::numerical_failure;
        out.message = "final primal point violates row " + std::to_string(i);
        return out;
      }
    }

    std::vector<double> y(m_);
    for (std::size_t r = 0; r < m_; ++r) y[r] = cost_[basic_[r]];
    btran(y);
    const double flip = prob_.sense() == Sense::maximize ? -1.0 : 1.0;
    out.dual.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.dual[i] = flip * y[i];
    out.reduced_cost.resize(ns_);
    for (std::size_t j = 0; j < ns_; ++j) out.reduced_cost[j] = prob_.cost(j) - column_dot(j, out.dual);
    out.objective = prob_.objective_value(out.primal);
    return out;
  }

  static double violation(Relation rel, double act, double rhs) {
    switch (rel) {
      case Relation::less_equal: return std::max(0.0, act - rhs);
      case Relation::greater_equal: return std::max(0.0, rhs - act);
      case Relation::equal: return std::abs(act - rhs);
    }
    return 0.0;
  }

  const LpProblem& prob_;
  SimplexOptions opts_;
  std::size_t m_ = 0, ns_ = 0, nt_ = 0;
  std::shared_ptr<const ColumnForm> cols_;
  std::vector<double> cost_, lo_, up_, b_, x_;
  std::vector<VarStatus> status_;
  std::vector<std::size_t> basic_;
  BasisLu lu_;
  std::vector<Eta> etas_;
  double otol_ = 1e-9, ftol_ = 1e-9;
  std::size_t max_iter_ = 0;
};

}  // namespace detail

/// Solves `prob` with the bounded-variable revised simplex method. A warm
/// basis that does not fit the problem (wrong shape, singular) is ignored.
inline LpOutcome solve_lp(const LpProblem& prob, const Basis* warm_start = nullptr,
                          const SimplexOptions& opts = {}) {
  detail::RevisedSimplex engine(prob, opts);
  return engine.solve(warm_start);
}

inline LpOutcome solve_lp(const LpProblem& prob, const Basis& warm_start, const SimplexOptions& opts = {}) {
  return solve_lp(prob, &warm_start, opts);
}

/// Solves `prob` with some variable bounds replaced; `prob` itself is not modified.
inline LpOutcome solve_lp(const LpProblem& prob, std::span<const BoundChange> changes, const Basis* warm_start = nullptr,
                          const SimplexOptions& opts = {}) {
  detail::RevisedSimplex engine(prob, opts, changes);
  return engine.solve(warm_start);
}

/// Dual objective b^T y plus bound contributions of nonbasic variables.
inline double dual_objective(const LpProblem& prob, const LpOutcome& out) {
  double s = 0.0;
  for (std::size_t i = 0; i < prob.num_rows(); ++i) s += out.dual[i] * prob.rhs(i);
  for (std::size_t j = 0; j < prob.num_vars(); ++j)
    if (out.primal[j] != 0.0 && out.basis.structural[j] != VarStatus::basic)
      s += out.reduced_cost[j] * out.primal[j];
  return s;
}

}  // namespace wbary::lp
