#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wbary/branch_and_bound.hpp"
#include "wbary/error.hpp"
#include "wbary/gen_lp.hpp"
#include "wbary/instance.hpp"
#include "wbary/master.hpp"
#include "wbary/pricing_classic.hpp"

namespace wbary {

enum class PricingBackend { classic, mip };

inline const char* to_string(PricingBackend b) { return b == PricingBackend::classic ? "classic" : "mip"; }

struct SolverConfig {
  PricingBackend pricing = PricingBackend::mip;
  BranchingStrategy strategy = BranchingStrategy::most_repeated;
  bool sort_measures = false;
  /// Stop once the best reduced cost is at most this value.
  double reduced_cost_tol = 1e-7;
  std::optional<std::size_t> max_iterations;
  std::size_t workers = 1;
  /// Re-check optimality by enumeration when there are at most
  /// `certify_limit` combinations.
  bool certify = true;
  std::uint64_t certify_limit = 2'000'000;
};

enum class Termination { optimal, iteration_cap };

inline const char* to_string(Termination t) { return t == Termination::optimal ? "optimal" : "iteration_cap"; }

struct IterationRecord {
  double objective = 0.0;
  /// Best reduced cost found by pricing; NaN when pricing was skipped.
  double reduced_cost = std::numeric_limits<double>::quiet_NaN();
  Combination combination;
  RunStats stats;
  std::size_t working_set_size = 0;
};

struct RunReport {
  std::size_t iterations = 0;
  double final_cost = 0.0;
  std::vector<IterationRecord> per_iteration;
  Termination terminated = Termination::optimal;
  /// Outcome of the enumeration check, when it ran.
  std::optional<bool> certified;
  double certificate_reduced_cost = std::numeric_limits<double>::quiet_NaN();
};

struct GreedyStart {
  WorkingSet working_set;
  std::vector<double> w;
};

/// Initial feasible transport: repeatedly combine the first point with
/// remaining mass in every measure and move the largest mass all of them can
/// still receive.
inline GreedyStart greedy_initial(const Instance& inst) {
  GreedyStart out;
  std::vector<std::vector<double>> remaining;
  for (const auto& m : inst.measures) remaining.emplace_back(m.masses().begin(), m.masses().end());
  std::vector<std::size_t> cursor(inst.n(), 0);
  while (true) {
    double mass = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inst.n(); ++i) mass = std::min(mass, remaining[i][cursor[i]]);
    out.working_set.add(inst, Combination{cursor});
    out.w.push_back(mass);
    bool done = false;
    for (std::size_t i = 0; i < inst.n(); ++i) {
      auto& r = remaining[i][cursor[i]];
      r -= mass;
      // Rounding residue below 1e-14 counts as exhausted.
      if (r <= 1e-14) {
        if (++cursor[i] == inst.measures[i].size()) done = true;
      }
    }
    // Mass sums agree to 1e-12, so one exhausted measure means all are.
    if (done) break;
  }
  return out;
}

struct RunResult {
  Barycenter barycenter;
  RunReport report;
  /// Final working set in the caller's measure order.
  WorkingSet working_set;
  MasterSolution master;
};

/// Column generation from the greedy start until no combination has reduced
/// cost above `cfg.reduced_cost_tol` (or the iteration cap is hit).
inline RunResult run(const Instance& inst, const SolverConfig& cfg) {
  if (!(cfg.reduced_cost_tol > 0.0)) throw ColumnGenerationError("reduced_cost_tol must be positive");

  Instance work = inst;
  std::vector<std::size_t> permutation(inst.n());
  for (std::size_t i = 0; i < inst.n(); ++i) permutation[i] = i;
  if (cfg.sort_measures) {
    auto sorted = sort_measures_by_size(inst);
    work = std::move(sorted.instance);
    permutation = std::move(sorted.permutation);
  }
  if (cfg.pricing == PricingBackend::mip) work = shift_to_positive_orthant(work).instance;

  RunResult result;
  auto& report = result.report;
  WorkingSet ws = greedy_initial(work).working_set;
  const std::uint64_t total = work.combination_count();
  std::optional<lp::Basis> basis;
  MasterSolution sol;

  while (true) {
    sol = build_and_solve_master(work, ws, basis ? &*basis : nullptr);
    basis = sol.basis;
    ++report.iterations;
    IterationRecord rec;
    rec.objective = sol.objective;
    rec.working_set_size = ws.size();

    if (ws.size() >= total) {
      report.per_iteration.push_back(std::move(rec));
      report.terminated = Termination::optimal;
      break;
    }

    PricingResult priced;
    try {
      if (cfg.pricing == PricingBackend::classic) {
        priced = enumerate_best(work, sol.y, &ws.index(), cfg.workers);
      } else {
        const auto model = build_gen_lp(work, sol.y);
        BranchAndBoundOptions opts;
        opts.strategy = cfg.strategy;
        opts.workers = cfg.workers;
        auto bb = branch_and_bound(model, opts, greedy_incumbent(model));
        priced = std::move(bb.best);
        rec.stats = bb.stats;
      }
    } catch (const Error& e) {
      throw ColumnGenerationError("pricing failed in iteration " + std::to_string(report.iterations) + ": " +
                                  e.what());
    }
    rec.reduced_cost = priced.reduced_cost;
    rec.combination = priced.combination;
    report.per_iteration.push_back(rec);

    if (priced.reduced_cost <= cfg.reduced_cost_tol) {
      report.terminated = Termination::optimal;
      break;
    }
    if (ws.contains(priced.combination))
      throw ColumnGenerationError("iteration " + std::to_string(report.iterations) + ": pricing returned " +
                                  to_string(priced.combination) + " with reduced cost " +
                                  std::to_string(priced.reduced_cost) + " although it is already in the working set");
    if (cfg.max_iterations && report.iterations >= *cfg.max_iterations) {
      report.terminated = Termination::iteration_cap;
      break;
    }
    ws.add(work, std::move(priced.combination));
  }

  if (report.terminated == Termination::optimal && cfg.certify && total <= cfg.certify_limit) {
    const auto check = enumerate_best(work, sol.y, nullptr, cfg.workers);
    report.certificate_reduced_cost = check.reduced_cost;
    report.certified = check.reduced_cost <= cfg.reduced_cost_tol;
  }

  for (const auto& s : ws.combinations()) result.working_set.add(inst, unpermute(s, permutation));
  report.final_cost = sol.objective;
  result.barycenter = extract_barycenter(inst, result.working_set, sol);
  result.master = std::move(sol);
  return result;
}

}  // namespace wbary
