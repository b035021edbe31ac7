#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wbary/branch_and_bound.hpp"
#include "wbary/colgen.hpp"
#include "wbary/error.hpp"
#include "wbary/gen_lp.hpp"
#include "wbary/instance.hpp"
#include "wbary/master.hpp"
#include "wbary/serialize.hpp"

namespace wbary {

/// Duals of the master problem restricted to the greedy working set.
inline std::vector<double> greedy_duals(const Instance& inst) {
  const auto start = greedy_initial(inst);
  return build_and_solve_master(inst, start.working_set).y;
}

struct BenchRun {
  StatsRow row;
  PricingResult result;
};

/// One pricing solve per branching strategy, on the instance as given and on
/// its size-sorted copy, all at the same duals `y` (given in the order of
/// `inst`). Rows come out strategy-major, unsorted before sorted.
inline std::vector<BenchRun> bench_pricing(const Instance& inst, std::span<const double> y, std::size_t workers = 1,
                                           bool timing = true) {
  const auto sorted = sort_measures_by_size(inst);
  const auto y_sorted = permute_pair_vector(inst, y, sorted.permutation);
  const GenLpModel models[2] = {build_gen_lp(shift_to_positive_orthant(inst).instance, y),
                                build_gen_lp(shift_to_positive_orthant(sorted.instance).instance, y_sorted)};
  std::vector<BenchRun> runs;
  for (auto strategy : kAllStrategies)
    for (int s = 0; s < 2; ++s) {
      BranchAndBoundOptions opts;
      opts.strategy = strategy;
      opts.workers = workers;
      auto bb = branch_and_bound(models[s], opts, greedy_incumbent(models[s]));
      if (!timing) bb.stats.wall_ms = 0.0;
      BenchRun run;
      run.row = {strategy, s == 1, inst.n(), inst.total_support(), bb.stats};
      run.result = std::move(bb.best);
      runs.push_back(std::move(run));
    }
  return runs;
}

/// Largest spread of the optimal value within one batch of `bench_pricing`.
inline double value_spread(const std::vector<BenchRun>& runs) {
  double lo = runs.front().result.reduced_cost, hi = lo;
  for (const auto& r : runs) {
    lo = std::min(lo, r.result.reduced_cost);
    hi = std::max(hi, r.result.reduced_cost);
  }
  return hi - lo;
}

inline double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

/// Median node count for one strategy and sort mode over `rows`.
inline double median_nodes(const std::vector<StatsRow>& rows, BranchingStrategy strategy, bool sorted) {
  std::vector<double> nodes;
  for (const auto& r : rows)
    if (r.strategy == strategy && r.sorted == sorted) nodes.push_back(static_cast<double>(r.stats.nodes_processed));
  return median(std::move(nodes));
}

/// Plain-text table of median nodes per strategy, unsorted and sorted.
inline std::string summary_table(const std::vector<StatsRow>& rows) {
  std::string out = "strategy             median_nodes_unsorted  median_nodes_sorted\n";
  for (auto s : kAllStrategies) {
    char line[128];
    std::snprintf(line, sizeof line, "%-20s %22.1f %20.1f\n", std::string(to_string(s)).c_str(),
                  median_nodes(rows, s, false), median_nodes(rows, s, true));
    out += line;
  }
  return out;
}

}  // namespace wbary
