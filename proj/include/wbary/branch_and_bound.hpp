#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "wbary/branching.hpp"
#include "wbary/error.hpp"
#include "wbary/gen_lp.hpp"
#include "wbary/lp.hpp"
#include "wbary/pricing_classic.hpp"

namespace wbary {

struct RunStats {
  std::size_t nodes_processed = 0;
  std::size_t max_depth = 0;
  double root_fraction_pct = 0.0;
  std::size_t root_unique_fractional = 0;
  std::size_t lp_solves = 0;
  double wall_ms = 0.0;
};

/// Invoked once per solved node LP (serialized, never concurrently).
using NodeObserver = std::function<void(const BBNode&, const lp::LpOutcome&)>;

struct BranchAndBoundOptions {
  BranchingStrategy strategy = BranchingStrategy::most_repeated;
  double integrality_tol = kIntegralityTolerance;
  /// A node is discarded when its bound does not beat the incumbent by more than this.
  double prune_margin = 1e-9;
  std::size_t workers = 1;
  /// Combinations that must not be returned. Excluded integral solutions are
  /// cut off by branching on one of their unfixed selection variables.
  const CombinationSet* exclude = nullptr;
  NodeObserver observer;
};

struct BranchAndBoundResult {
  PricingResult best;
  RunStats stats;
};

/// Per measure, the point with the largest dual (smallest index on ties).
inline Combination dual_argmax_combination(const Instance& inst, std::span<const double> y) {
  const auto offsets = inst.offsets();
  Combination s{std::vector<std::size_t>(inst.n(), 0)};
  for (std::size_t i = 0; i < inst.n(); ++i)
    for (std::size_t k = 1; k < inst.measures[i].size(); ++k)
      if (y[offsets[i] + k] > y[offsets[i] + s.indices[i]]) s.indices[i] = k;
  return s;
}

/// Reduced cost of the dual-argmax combination; a valid starting lower bound.
inline PricingResult greedy_incumbent(const GenLpModel& model, const CombinationSet* exclude = nullptr) {
  auto s = dual_argmax_combination(model.instance(), model.duals());
  if (exclude && exclude->contains(s)) return {};
  const double value = model.evaluate(s);
  return {std::move(s), value};
}

namespace detail {

struct OpenNode {
  BBNode node;
  double bound = 0.0;
  std::vector<double> z1;
  lp::Basis basis;
  bool right = false;
  std::uint64_t seq = 0;
  /// Set for integral but excluded solutions: the variable to split on.
  std::optional<std::size_t> forced_branch;
};

struct OpenNodeOrder {
  bool operator()(const OpenNode& a, const OpenNode& b) const noexcept {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.right != b.right) return !a.right;
    return a.seq > b.seq;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const GenLpModel& model, const BranchAndBoundOptions& opts, PricingResult incumbent)
      : model_(model), opts_(opts), best_(std::move(incumbent)) {}

  BranchAndBoundResult run() {
    const auto start = std::chrono::steady_clock::now();
    BBNode root;
    auto outcome = solve_node(model_, root);
    {
      std::unique_lock lock(mutex_);
      const auto z1 = selection_slice(outcome);
      if (outcome.status == lp::Status::optimal) {
        const auto frac = fractionality_stats(z1, opts_.integrality_tol);
        stats_.root_fraction_pct = frac.pct_fractional;
        stats_.root_unique_fractional = frac.unique_count;
      }
      absorb(root, false, std::move(outcome));
    }
    if (!error_) {
      const std::size_t workers = std::max<std::size_t>(1, opts_.workers);
      if (workers == 1) {
        work();
      } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([this] { work(); });
      }
    }
    if (error_) std::rethrow_exception(error_);
    stats_.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (best_.combination.indices.empty()) throw PricingError("branch-and-bound found no admissible combination");
    return {best_, stats_};
  }

 private:
  std::span<const double> selection_slice(const lp::LpOutcome& out) const {
    if (out.primal.size() < model_.num_selection()) return {};
    return std::span<const double>(out.primal).first(model_.num_selection());
  }

  bool integral(std::span<const double> z1) const {
    for (double v : z1)
      if (is_fractional(v, opts_.integrality_tol)) return false;
    return true;
  }

  Combination round(std::span<const double> z1) const {
    Combination s{std::vector<std::size_t>(model_.n(), 0)};
    const auto off = model_.offsets();
    for (std::size_t i = 0; i < model_.n(); ++i)
      for (std::size_t k = 1; k < off[i + 1] - off[i]; ++k)
        if (z1[off[i] + k] > z1[off[i] + s.indices[i]]) s.indices[i] = k;
    return s;
  }

  double incumbent_value() const { return best_.reduced_cost; }

  static std::string describe(const BBNode& node) {
    std::string text = "depth " + std::to_string(node.depth) + ", fixed to 0 {";
    for (auto v : node.fixed_zero) text += " " + std::to_string(v);
    text += " }, fixed to 1 {";
    for (auto v : node.fixed_one) text += " " + std::to_string(v);
    return text + " }";
  }

  /// Records a solved node and decides its fate. Caller holds the lock.
  void absorb(BBNode node, bool right, lp::LpOutcome outcome) {
    ++stats_.nodes_processed;
    ++stats_.lp_solves;
    stats_.max_depth = std::max(stats_.max_depth, node.depth);
    if (opts_.observer) opts_.observer(node, outcome);
    if (outcome.status == lp::Status::infeasible) return;
    if (outcome.status != lp::Status::optimal) {
      error_ = std::make_exception_ptr(PricingError("node LP failed (" + std::string(lp::to_string(outcome.status)) +
                                                    ": " + outcome.message + ") at " + describe(node)));
      return;
    }
    const double bound = outcome.objective;
    if (bound <= incumbent_value() + opts_.prune_margin) return;
    const auto z1 = selection_slice(outcome);

    OpenNode open;
    if (integral(z1)) {
      auto s = round(z1);
      if (!opts_.exclude || !opts_.exclude->contains(s)) {
        const double value = model_.evaluate(s);
        if (value > incumbent_value() || best_.combination.indices.empty()) best_ = {std::move(s), value};
        return;
      }
      // Excluded: split on a selected variable that is not fixed yet.
      std::optional<std::size_t> split;
      for (std::size_t i = 0; i < model_.n() && !split; ++i) {
        const auto v = model_.selection_index(i, s[i]);
        if (std::find(node.fixed_one.begin(), node.fixed_one.end(), v) == node.fixed_one.end()) split = v;
      }
      if (!split) return;
      open.forced_branch = split;
    }
    open.bound = bound;
    open.z1.assign(z1.begin(), z1.end());
    open.basis = std::move(outcome.basis);
    open.node = std::move(node);
    open.right = right;
    open.seq = seq_++;
    heap_.push(std::move(open));
  }

  void work() {
    std::unique_lock lock(mutex_);
    while (true) {
      cv_.wait(lock, [&] { return error_ || !heap_.empty() || active_ == 0; });
      if (error_ || (heap_.empty() && active_ == 0)) break;
      OpenNode top = heap_.top();
      heap_.pop();
      if (top.bound <= incumbent_value() + opts_.prune_margin) continue;
      ++active_;
      lock.unlock();

      std::optional<std::exception_ptr> failure;
      BBNode right_node, left_node;
      lp::LpOutcome right_out, left_out;
      try {
        const std::size_t var = top.forced_branch ? *top.forced_branch
                                                  : select_branch_variable(top.z1, opts_.strategy, opts_.integrality_tol);
        right_node = top.node;
        right_node.fixed_one.push_back(var);
        right_node.parent_bound = top.bound;
        right_node.depth = top.node.depth + 1;
        left_node = top.node;
        left_node.fixed_zero.push_back(var);
        left_node.parent_bound = top.bound;
        left_node.depth = top.node.depth + 1;
        right_out = solve_node(model_, right_node, &top.basis);
        left_out = solve_node(model_, left_node, &top.basis);
      } catch (...) {
        failure = std::current_exception();
      }

      lock.lock();
      --active_;
      if (failure) {
        error_ = *failure;
      } else {
        absorb(std::move(right_node), true, std::move(right_out));
        absorb(std::move(left_node), false, std::move(left_out));
      }
      cv_.notify_all();
    }
    cv_.notify_all();
  }

  const GenLpModel& model_;
  const BranchAndBoundOptions& opts_;
  PricingResult best_;
  RunStats stats_;
  std::priority_queue<OpenNode, std::vector<OpenNode>, OpenNodeOrder> heap_;
  std::uint64_t seq_ = 0;
  std::size_t active_ = 0;
  std::exception_ptr error_;
  std::mutex mutex_;
  std::condition_variable cv_;
};

}  // namespace detail

/// Exact maximizer of the pricing MIP by branch-and-bound over the selection
/// variables of `model`. Pass an empty `initial_incumbent` to start from -inf.
inline BranchAndBoundResult branch_and_bound(const GenLpModel& model, const BranchAndBoundOptions& opts,
                                             PricingResult initial_incumbent = {}) {
  if (opts.exclude && !initial_incumbent.combination.indices.empty() &&
      opts.exclude->contains(initial_incumbent.combination))
    initial_incumbent = {};
  detail::BranchAndBound solver(model, opts, std::move(initial_incumbent));
  return solver.run();
}

}  // namespace wbary
