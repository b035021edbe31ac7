// Prices one dual vector both ways: full enumeration and branch-and-bound
// with each branching strategy.

#include <iostream>

#include "wbary/wbary.hpp"

int main() {
  const auto inst = wbary::random_instance(5, 4, 7);
  const auto y = wbary::greedy_duals(inst);

  const auto oracle = wbary::enumerate_best(inst, y);
  std::cout << "enumeration         " << oracle.reduced_cost << "  " << wbary::to_string(oracle.combination) << '\n';

  const auto model = wbary::build_gen_lp(wbary::shift_to_positive_orthant(inst).instance, y);
  for (auto strategy : wbary::kAllStrategies) {
    wbary::BranchAndBoundOptions opts;
    opts.strategy = strategy;
    const auto bb = wbary::branch_and_bound(model, opts, wbary::greedy_incumbent(model));
    std::cout << wbary::to_string(strategy) << std::string(20 - wbary::to_string(strategy).size(), ' ')
              << bb.best.reduced_cost << "  " << wbary::to_string(bb.best.combination) << "  nodes "
              << bb.stats.nodes_processed << '\n';
  }
}
